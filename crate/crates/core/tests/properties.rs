mod common;

use common::*;
use efcp::partitions::project;
use efcp::tvlab::{tv_exact_atomic, tv_exact_product_multinomial, ProductMultinomialLaw};
use efcp::{Coloring, PaintboxLaw, PartitionMatrix, StochasticMatrix};
use proptest::prelude::*;

fn word_strategy(n: usize, k: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(0..k, n)
}

fn matrix_strategy(n: usize, k: usize) -> impl Strategy<Value = PartitionMatrix> {
    proptest::collection::vec(word_strategy(n, k), k)
        .prop_map(move |cols| to_library(&set_matrix_from_columns(&cols, n), n))
}

fn triple() -> impl Strategy<Value = (usize, PartitionMatrix, PartitionMatrix, Vec<usize>)> {
    (1usize..=10, 1usize..=5).prop_flat_map(|(n, k)| {
        (
            Just(k),
            matrix_strategy(n, k),
            matrix_strategy(n, k),
            word_strategy(n, k),
        )
    })
}

fn simplex(k: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.01f64..1.0, k).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.iter().map(|x| x / s).collect()
    })
}

fn stochastic(k: usize) -> impl Strategy<Value = StochasticMatrix> {
    proptest::collection::vec(simplex(k), k)
        .prop_map(|cols| StochasticMatrix::from_columns(&cols).unwrap())
}

proptest! {
    #[test]
    fn action_is_compatible_with_product((k, a, b, x) in triple()) {
        let x = coloring(k, &x);
        let ab = a.matmul(&b).unwrap();
        prop_assert_eq!(ab.act(&x).unwrap(), a.act(&b.act(&x).unwrap()).unwrap());
    }

    #[test]
    fn product_columns_are_partitions((k, a, b, _x) in triple()) {
        let ab = a.matmul(&b).unwrap();
        let n = ab.n();
        for c in 0..k {
            let total: usize = (0..k).map(|r| ab.cell(r, c).len()).sum();
            prop_assert_eq!(total, n);
        }
    }

    #[test]
    fn projection_ignores_labels(x in word_strategy(9, 4), perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle()) {
        let c = coloring(4, &x);
        prop_assert_eq!(project(&c.relabel(&perm)), project(&c));
        let y = project(&c);
        prop_assert_eq!(project(&y.representative(4).unwrap()), y);
    }

    #[test]
    fn index_round_trips(x in word_strategy(7, 3)) {
        let c = coloring(3, &x);
        prop_assert_eq!(Coloring::from_index(c.index(), 7, 3), c);
    }

    #[test]
    fn mapping_matrix_reaches_any_target(x in word_strategy(6, 3), y in word_strategy(6, 3)) {
        let (cx, cy) = (coloring(3, &x), coloring(3, &y));
        prop_assert_eq!(PartitionMatrix::mapping(&cx, &cy).unwrap().act(&cx).unwrap(), cy);
    }

    #[test]
    fn product_multinomial_tv_is_a_metric_value(p in simplex(3), q in simplex(3), r in simplex(3), n in 1usize..30) {
        let law = |s: &Vec<f64>| ProductMultinomialLaw::new(3, vec![(n, s.clone())]).unwrap();
        let pq = tv_exact_product_multinomial(&law(&p), &law(&q)).unwrap().value;
        let qp = tv_exact_product_multinomial(&law(&q), &law(&p)).unwrap().value;
        let pr = tv_exact_product_multinomial(&law(&p), &law(&r)).unwrap().value;
        let rq = tv_exact_product_multinomial(&law(&r), &law(&q)).unwrap().value;
        prop_assert!((0.0..=1.0).contains(&pq));
        prop_assert!((pq - qp).abs() < 1e-12);
        prop_assert!(pq <= pr + rq + 1e-12);
    }

    #[test]
    fn chain_distance_never_increases(a in stochastic(2), b in stochastic(2), x in word_strategy(6, 2), y in word_strategy(6, 2)) {
        let law = PaintboxLaw::atomic(vec![a, b], vec![0.5, 0.5]).unwrap();
        let (cx, cy) = (coloring(2, &x), coloring(2, &y));
        let mut prev = 1.0 + 1e-12;
        for m in 0..5 {
            let d = tv_exact_atomic(&law, &cx, &cy, m).unwrap().value;
            prop_assert!(d <= prev + 1e-12);
            prev = d;
        }
    }

    #[test]
    fn column_stochastic_products_stay_stochastic(a in stochastic(4), b in stochastic(4)) {
        prop_assert!(a.mul(&b).column_sum_error() < 1e-12);
        prop_assert!(a.pow(7).column_sum_error() < 1e-12);
    }
}
