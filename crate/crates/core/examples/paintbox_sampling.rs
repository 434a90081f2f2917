// Paintbox laws: sample `S`, then a partition matrix from `mu_S`, and ask
// whether the law is row-column exchangeable.
//
// ```bash
// cargo run --example paintbox_sampling
// ```

use efcp::paintbox::{is_rce, rce_orbit_law, sample_m_given_s, sample_s};
use efcp::{PaintboxLaw, RngStream, StochasticMatrix};

pub fn run_example() -> efcp::Result<()> {
    let law: PaintboxLaw =
        serde_json::from_str(r#"{"kind": "self_similar", "nu": [1.0, 1.0, 1.0]}"#).unwrap();
    let law = law.validated()?;
    let mut rng = RngStream::new(42, 0);
    let s = sample_s(&law, &mut rng);
    println!("S =\n{s}");
    let m = sample_m_given_s(&s, 10, &mut rng);
    println!(
        "M ~ mu_S on 10 sites: {}",
        serde_json::to_string(&m).unwrap()
    );

    let skew = StochasticMatrix::from_columns(&[vec![0.8, 0.2], vec![0.3, 0.7]])?;
    for (name, l) in [
        ("self_similar(1,1,1)", law),
        ("point mass", PaintboxLaw::point_mass(skew.clone())),
        ("orbit of the point mass", rce_orbit_law(&skew)?),
    ] {
        let r = is_rce(&l);
        println!("{name}: rce = {} ({})", r.rce, r.certificate);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> efcp::Result<()> {
    run_example()
}
