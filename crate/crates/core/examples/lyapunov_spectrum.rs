// Lyapunov spectrum of `Q_m = S_m ... S_1` on the zero-sum subspace, and
// the simplex collapse check that precedes any mixing computation.
//
// ```bash
// cargo run --release --example lyapunov_spectrum
// ```

use efcp::products::{collapse_diagnostic, estimate_lyapunov};
use efcp::{PaintboxLaw, StochasticMatrix};

pub fn run_example() -> efcp::Result<()> {
    let pm = PaintboxLaw::point_mass(StochasticMatrix::from_columns(&[
        vec![0.8, 0.2],
        vec![0.3, 0.7],
    ])?);
    let est = estimate_lyapunov(&pm, 2_000, 1, 0)?;
    println!(
        "point mass: lambda1 = {:.12} (trace - 1 = 0.5)",
        est.lambda1
    );

    let dir = PaintboxLaw::self_similar(vec![1.0, 1.0])?;
    let est = estimate_lyapunov(&dir, 5_000, 8, 1)?;
    let theta = -1.0 / (2.0 * est.lambda1.ln());
    println!(
        "Dirichlet(1,1) columns: lambda1 = {:.4} +- {:.4}, kappa = {:.4}, theta = {:.4}",
        est.lambda1,
        est.std_error.unwrap_or(0.0),
        est.kappa_hat,
        theta
    );

    let three = PaintboxLaw::self_similar(vec![0.5; 3])?;
    let est = estimate_lyapunov(&three, 5_000, 4, 2)?;
    println!("Dirichlet(1/2,..) k=3: spectrum {:?}", est.spectrum);

    let perms = PaintboxLaw::permutation_mix(3, None)?;
    println!(
        "permutations: collapse {:?}",
        collapse_diagnostic(&perms, 16, 200, 0).verdict
    );
    println!(
        "Dirichlet: collapse {:?}",
        collapse_diagnostic(&three, 16, 200, 0).verdict
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> efcp::Result<()> {
    run_example()
}
