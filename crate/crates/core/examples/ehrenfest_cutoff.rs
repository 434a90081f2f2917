// Exact distance to stationarity of Ehrenfest chains next to the
// coupon-collector bound.
//
// ```bash
// cargo run --release --example ehrenfest_cutoff
// ```

use efcp::chains::EhrenfestParams;
use efcp::tvlab::{ehrenfest_bounds, ehrenfest_tv_curve, ehrenfest_upper_time, log_log_time};

pub fn run_example() -> efcp::Result<()> {
    let std = EhrenfestParams::standard(256)?;
    let scale = 256.0 * (256f64).ln();
    let curve = ehrenfest_tv_curve(&std, scale.ceil() as usize)?;
    for frac in [0.3, 0.4, 0.5, 0.6, 0.7, 1.0] {
        let t = (frac * scale).ceil() as usize;
        println!(
            "standard n=256, t = {frac} n log n: TV = {:.4}",
            curve[t].value
        );
    }

    let params = EhrenfestParams::general(256, 1.0 / 16.0)?;
    let t3 = ehrenfest_upper_time(&params, 3.0).ceil() as usize;
    let curve = ehrenfest_tv_curve(&params, t3)?;
    for beta in [1.0, 2.0, 3.0] {
        let t = ehrenfest_upper_time(&params, beta).ceil();
        let b = ehrenfest_bounds(&params, t, beta)?;
        println!(
            "alpha=1/16, beta={beta}: t={t} TV={:.4} coupling bound {:.4}",
            curve[t as usize].value, b.upper
        );
    }

    let ll = EhrenfestParams::log_log(10_000)?;
    println!(
        "log log schedule n=10^4: a = {}, t(beta=1) = {:.2}",
        ll.refresh_size(),
        log_log_time(10_000, 1.0)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> efcp::Result<()> {
    run_example()
}
