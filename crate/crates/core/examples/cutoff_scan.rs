// A small cutoff scan: mixing times against log n next to the Lyapunov
// prediction. Pass `full` for the desk-scale grid (2^6..2^12, 10^4
// replicates).
//
// ```bash
// cargo run --release --example cutoff_scan -- full
// ```

use efcp::tvlab::{cutoff_experiment, CutoffOptions};
use efcp::PaintboxLaw;

pub fn run_example() -> efcp::Result<()> {
    let full = std::env::args().any(|a| a == "full");
    let opts = if full {
        CutoffOptions::default()
    } else {
        CutoffOptions {
            n_grid: vec![32, 64, 128, 256],
            replicates: 1_000,
            lyapunov_steps: 2_000,
            lyapunov_replicates: 8,
            ..CutoffOptions::default()
        }
    };
    let law = PaintboxLaw::self_similar(vec![1.0, 1.0])?;
    let rep = cutoff_experiment(&law, &opts)?;
    println!(
        "lambda1 = {:.4}, theta = {:.4}",
        rep.lambda1_hat, rep.theta_hat
    );
    for r in &rep.rows {
        println!(
            "n={:5} t({})={:?} t({})={:?} window/log n = {:?}",
            r.n,
            rep.epsilon,
            r.crossing_eps,
            1.0 - rep.epsilon,
            r.crossing_one_minus_eps,
            r.window_ratio
        );
    }
    println!(
        "slope ratios {:?} / {:?}, pass = {}",
        rep.slope_ratio_eps, rep.slope_ratio_one_minus_eps, rep.pass
    );
    for note in &rep.notes {
        println!("note: {note}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> efcp::Result<()> {
    run_example()
}
