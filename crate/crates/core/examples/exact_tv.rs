// Exact total variation on sufficient statistics: product multinomials,
// a fixed paintbox sequence, and a finitely supported law.
//
// ```bash
// cargo run --example exact_tv
// ```

use efcp::tvlab::{
    binomial_tv, tv_exact_atomic, tv_exact_conditional, tv_exact_product_multinomial,
    tv_likelihood_bound, ProductMultinomialLaw,
};
use efcp::{Coloring, PaintboxLaw, StochasticMatrix};

pub fn run_example() -> efcp::Result<()> {
    for n in [100, 1_000, 10_000] {
        let gap = (n as f64).powf(-0.6);
        let p = ProductMultinomialLaw::new(2, vec![(n, vec![0.5, 0.5])])?;
        let q = ProductMultinomialLaw::new(2, vec![(n, vec![0.5 + gap, 0.5 - gap])])?;
        println!(
            "n={n:5}: gap n^-0.6 -> {:.4}, gap n^-0.4 -> {:.4}",
            tv_exact_product_multinomial(&p, &q)?.value,
            binomial_tv(n, 0.5, 0.5 + (n as f64).powf(-0.4))
        );
    }

    let a = StochasticMatrix::from_columns(&[vec![0.8, 0.2], vec![0.3, 0.7]])?;
    let b = StochasticMatrix::from_columns(&[vec![0.5, 0.5], vec![0.7, 0.3]])?;
    let x = Coloring::parse("11112222", 2)?;
    let y = Coloring::parse("11222211", 2)?;
    println!(
        "given Q = a^3: {:.6}",
        tv_exact_conditional(&a.pow(3), &x, &y)?.value
    );
    let law = PaintboxLaw::atomic(vec![a, b], vec![0.5, 0.5])?;
    for m in 0..6 {
        println!(
            "mixture, m={m}: {:.6}",
            tv_exact_atomic(&law, &x, &y, m)?.value
        );
    }

    let mu = [0.1, 0.2, 0.3, 0.4];
    let nu = [0.12, 0.18, 0.33, 0.37];
    if let Some(c) = tv_likelihood_bound(&mu, &nu, 0.1)? {
        println!(
            "likelihood certificate: TV < {} (bad mass {:.3})",
            c.bound, c.bad_mass
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> efcp::Result<()> {
    run_example()
}
