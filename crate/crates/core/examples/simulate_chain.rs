// Simulate an EFCP chain with both constructions and the induced chain on
// the simplex.
//
// ```bash
// cargo run --example simulate_chain
// ```

use efcp::chains::{
    run_efcp_coordinate_with, run_efcp_matrix_with, run_induced_simplex, RunOptions, SimplexPoint,
};
use efcp::{Coloring, PaintboxLaw};

pub fn run_example() -> efcp::Result<()> {
    let law = PaintboxLaw::dirichlet_columns(vec![
        vec![4.0, 1.0, 1.0],
        vec![1.0, 4.0, 1.0],
        vec![1.0, 1.0, 4.0],
    ])?;
    let x0 = Coloring::constant(24, 3, 0)?;
    let opts = RunOptions {
        thin: Some(2),
        record_paintbox: true,
    };
    let run = run_efcp_matrix_with(&law, &x0, 10, 7, &opts)?;
    for (t, x) in run.steps.iter().zip(&run.trajectory) {
        println!("t={t:2} {x}  counts {:?}", x.counts());
    }
    // the coordinate construction driven by the same seed has the same law,
    // not the same path
    let other = run_efcp_coordinate_with(&law, &x0, 10, 7, &RunOptions::default())?;
    println!("coordinate construction ends at {}", other.final_state());

    let ys = run_induced_simplex(&law, &SimplexPoint::new(vec![1.0, 0.0, 0.0])?, 5, 7)?;
    for (t, y) in ys.iter().enumerate() {
        println!("Y_{t} = {:?}", y.coords());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> efcp::Result<()> {
    run_example()
}
