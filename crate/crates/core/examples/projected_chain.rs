// Projection to unlabeled partitions: a projected trajectory, then exact
// labeled and projected mixing times for an exchangeable law.
//
// ```bash
// cargo run --release --example projected_chain
// ```

use efcp::chains::{run_efcp_matrix_with, RunOptions};
use efcp::paintbox::rce_orbit_law;
use efcp::projections::{project_run, projected_mixing_equivalence};
use efcp::{Coloring, StochasticMatrix};

pub fn run_example() -> efcp::Result<()> {
    let base = StochasticMatrix::from_columns(&[
        vec![0.7, 0.2, 0.1],
        vec![0.1, 0.6, 0.3],
        vec![0.3, 0.3, 0.4],
    ])?;
    let law = rce_orbit_law(&base)?;
    let run = run_efcp_matrix_with(
        &law,
        &Coloring::parse("111222333", 3)?,
        6,
        1,
        &RunOptions::every_step(),
    )?;
    let p = project_run(&run);
    println!("markov: {} ({})", p.markov, p.note);
    for (x, y) in run.trajectory.iter().zip(&p.trajectory) {
        println!("{x}  {y}");
    }

    let rep = projected_mixing_equivalence(&law, 5, 3, &[0.5, 0.25, 0.1])?;
    println!(
        "{} labeled / {} projected states, kernel identity error {:.1e}",
        rep.labeled_states, rep.projected_states, rep.kernel_identity_error
    );
    for e in &rep.entries {
        println!(
            "eps={}: t_X = {:?}, t_Y = {:?}",
            e.epsilon, e.t_labeled, e.t_projected
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> efcp::Result<()> {
    run_example()
}
