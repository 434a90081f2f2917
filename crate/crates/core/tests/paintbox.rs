mod common;

use efcp::paintbox::{is_rce, permutations, sample_m_given_s, sample_s};
use efcp::{PaintboxLaw, PartitionMatrix, RngStream, StochasticMatrix};

fn s28() -> StochasticMatrix {
    StochasticMatrix::from_columns(&[vec![0.8, 0.2], vec![0.3, 0.7]]).unwrap()
}

#[test]
fn point_mass_always_returns_its_matrix() {
    let law = PaintboxLaw::point_mass(s28());
    let mut rng = RngStream::new(1, 0);
    for _ in 0..100 {
        assert_eq!(sample_s(&law, &mut rng), s28());
    }
}

#[test]
fn dirichlet_column_means() {
    let k = 3;
    let law = PaintboxLaw::self_similar(vec![1.0; k]).unwrap();
    let mut rng = RngStream::new(2, 0);
    let draws = 100_000;
    let mut sum = vec![0.0; k * k];
    for _ in 0..draws {
        let s = sample_s(&law, &mut rng);
        assert!(s.column_sum_error() < 1e-12);
        for (a, b) in sum.iter_mut().zip(s.data()) {
            *a += b;
        }
    }
    // Dirichlet(1,1,1) marginals are Beta(1,2): mean 1/3, variance 1/18
    let se = (1.0f64 / 18.0 / draws as f64).sqrt();
    for v in sum {
        assert!((v / draws as f64 - 1.0 / 3.0).abs() < 3.0 * se + 1e-12);
    }
}

#[test]
fn atomic_frequencies() {
    let law =
        PaintboxLaw::atomic(vec![s28(), StochasticMatrix::identity(2)], vec![0.3, 0.7]).unwrap();
    let mut rng = RngStream::new(3, 0);
    let draws = 100_000;
    let hits = (0..draws)
        .filter(|_| sample_s(&law, &mut rng) == s28())
        .count();
    let se = (0.3f64 * 0.7 / draws as f64).sqrt();
    assert!((hits as f64 / draws as f64 - 0.3).abs() < 3.0 * se);
}

#[test]
fn identity_paintbox_gives_identity_matrix() {
    let mut rng = RngStream::new(4, 0);
    for n in 1..10 {
        assert_eq!(
            sample_m_given_s(&StochasticMatrix::identity(3), n, &mut rng),
            PartitionMatrix::identity(n, 3)
        );
    }
}

#[test]
fn product_multinomial_cell_frequencies() {
    let s = StochasticMatrix::from_columns(&[
        vec![0.5, 0.3, 0.2],
        vec![0.1, 0.1, 0.8],
        vec![0.25, 0.25, 0.5],
    ])
    .unwrap();
    let (n, draws) = (6, 20_000);
    let mut rng = RngStream::new(5, 0);
    let mut count = [0.0; 9];
    for _ in 0..draws {
        let m = sample_m_given_s(&s, n, &mut rng);
        for r in 0..3 {
            for c in 0..3 {
                count[r * 3 + c] += m.cell(r, c).len() as f64;
            }
        }
    }
    for r in 0..3 {
        for c in 0..3 {
            let p = s.get(r, c);
            let mean = count[r * 3 + c] / draws as f64;
            let se = (n as f64 * p * (1.0 - p) / draws as f64).sqrt();
            assert!((mean - n as f64 * p).abs() < 4.0 * se, "cell ({r},{c})");
        }
    }
}

#[test]
fn exchangeability_decisions() {
    assert!(is_rce(&PaintboxLaw::self_similar(vec![1.0; 4]).unwrap()).rce);
    assert!(!is_rce(&PaintboxLaw::self_similar(vec![1.0, 2.0]).unwrap()).rce);
    assert!(!is_rce(&PaintboxLaw::point_mass(s28())).rce);
    assert!(is_rce(&PaintboxLaw::permutation_mix(3, None).unwrap()).rce);
    let perms: Vec<StochasticMatrix> = permutations(3)
        .iter()
        .map(|p| StochasticMatrix::permutation(p))
        .collect();
    let w = vec![1.0 / 6.0; perms.len()];
    assert!(is_rce(&PaintboxLaw::atomic(perms.clone(), w).unwrap()).rce);
    let mut skew = vec![0.15; perms.len()];
    skew[0] = 0.25;
    assert!(!is_rce(&PaintboxLaw::atomic(perms, skew).unwrap()).rce);
}

#[test]
fn law_configs_parse_and_validate() {
    let law: PaintboxLaw = serde_json::from_str(
        r#"{"kind": "atomic", "atoms": [{"columns": [[0.8,0.2],[0.3,0.7]]}, {"columns": [[1,0],[0,1]]}], "weights": [0.25, 0.75]}"#,
    )
    .unwrap();
    let law = law.validated().unwrap();
    let unnormalised = PaintboxLaw::atomic(vec![StochasticMatrix::identity(2)], vec![2.0]);
    assert!(unnormalised.is_err());
    assert_eq!(law.atoms().unwrap()[1].1, 0.75);
    assert!(serde_json::from_str::<PaintboxLaw>(
        r#"{"kind": "point_mass", "matrix": {"columns": [[0.5,0.6],[0.5,0.5]]}}"#
    )
    .map_err(|e| e.to_string())
    .and_then(|l| l.validated().map_err(|e| e.to_string()))
    .is_err());
    assert!(serde_json::from_str::<PaintboxLaw>(
        r#"{"kind": "self_similar", "nu": [1,1], "extra": 1}"#
    )
    .is_err());
    assert!(PaintboxLaw::dirichlet_columns(vec![vec![1.0, 1.0], vec![1.0]]).is_err());
}
