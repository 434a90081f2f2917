// The cyclic group chain `X_t = X_{t-1} + L_t`, simulated and measured
// exactly against the uniform law.
//
// ```bash
// cargo run --example group_chain
// ```

use efcp::chains::run_group_chain;
use efcp::tvlab::group_chain_tv_exact;
use efcp::Coloring;

pub fn run_example() -> efcp::Result<()> {
    let lambda = [0.3, 0.4, 0.3];
    let x0 = Coloring::constant(12, 3, 0)?;
    let run = run_group_chain(&lambda, &x0, 6, 5)?;
    println!("{} -> {}", run.x0, run.final_state());
    for m in 0..8 {
        println!(
            "n=500, m={m}: TV to uniform {:.5}",
            group_chain_tv_exact(&lambda, 500, m)?.value
        );
    }
    if let Err(e) = run_group_chain(&[0.5, 0.3, 0.2], &x0, 1, 0) {
        println!("asymmetric weights: {e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> efcp::Result<()> {
    run_example()
}
