// Monte Carlo upper and lower bounds on the distance between the chains
// started from the two states of the block design.
//
// ```bash
// cargo run --release --example mc_brackets
// ```

use efcp::tvlab::{tv_lower_mc_profile, tv_upper_mc_profile, BlockDesign};
use efcp::PaintboxLaw;

pub fn run_example() -> efcp::Result<()> {
    let law = PaintboxLaw::self_similar(vec![1.0, 1.0])?;
    let d = BlockDesign::new(512, 2)?;
    let up = tv_upper_mc_profile(&law, &d.x0, &d.x0_tilde, 6, 2_000, 1)?;
    let lo = tv_lower_mc_profile(&law, &d.x0, &d.x0_tilde, 6, 2_000, 1)?;
    println!(" m  lower (certified)   upper (certified)  test");
    for m in 0..=6 {
        let (l, test) = &lo[m];
        println!(
            "{m:2}  {:.4} ({:.4})   {:.4} ({:.4})  {}",
            l.value,
            l.certified_bound(),
            up[m].value,
            up[m].certified_bound(),
            serde_json::to_string(test).unwrap()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> efcp::Result<()> {
    run_example()
}
