// Certified mixing times, exact for a small finitely supported law and by
// Monte Carlo for a law with a density.
//
// ```bash
// cargo run --release --example mixing_time
// ```

use efcp::tvlab::{mixing_profile, MixingMethod, MixingOptions};
use efcp::{PaintboxLaw, StochasticMatrix};

pub fn run_example() -> efcp::Result<()> {
    let rank1 = StochasticMatrix::rank_one(&[0.3, 0.7])?;
    let law = PaintboxLaw::atomic(vec![rank1, StochasticMatrix::identity(2)], vec![0.5, 0.5])?;
    let exact = MixingOptions {
        epsilons: vec![0.2],
        method: MixingMethod::ExactAtomic,
        m_cap: 16,
        ..Default::default()
    };
    let prof = mixing_profile(&law, 16, &exact)?;
    println!(
        "rank-one atom, n=16: t_mix(0.2) = {:?}",
        prof.entry(0.2).and_then(|e| e.t_mix)
    );

    let dir = PaintboxLaw::self_similar(vec![1.0, 1.0])?;
    let mc = MixingOptions {
        method: MixingMethod::MonteCarlo { replicates: 2_000 },
        seed: 3,
        ..Default::default()
    };
    for n in [64, 256] {
        let prof = mixing_profile(&dir, n, &mc)?;
        for e in &prof.entries {
            println!(
                "Dirichlet(1,1), n={n}: eps={} t_mix={:?} bracket >= {} crossing {:?}",
                e.epsilon, e.t_mix, e.lower_end, e.crossing
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> efcp::Result<()> {
    run_example()
}
