mod common;

use common::*;
use efcp::partitions::{cyclic_shift_matrix, project, SiteSet};
use efcp::{Coloring, PartitionMatrix, UnlabeledPartition};

fn cells(n: usize, rows: &[&[&[usize]]]) -> PartitionMatrix {
    let k = rows.len();
    let mut v = Vec::new();
    for r in rows {
        for c in r.iter() {
            let zero: Vec<usize> = c.iter().map(|i| i - 1).collect();
            v.push(SiteSet::from_sites(n, &zero).unwrap());
        }
    }
    PartitionMatrix::new(n, k, v).unwrap()
}

#[test]
fn hand_product_n2_k2() {
    let a = cells(2, &[&[&[1], &[2]], &[&[2], &[1]]]);
    let want = cells(2, &[&[&[1, 2], &[]], &[&[], &[1, 2]]]);
    assert_eq!(a.matmul(&a).unwrap(), want);
}

#[test]
fn identity_is_neutral() {
    let id = PartitionMatrix::identity(4, 3);
    for x in all_words(4, 3) {
        let c = coloring(3, &x);
        assert_eq!(id.act(&c).unwrap(), c);
    }
    let m = to_library(
        &set_matrix_from_columns(&[vec![0, 1, 2, 0], vec![2, 2, 1, 0], vec![1, 0, 0, 2]], 4),
        4,
    );
    assert_eq!(id.matmul(&m).unwrap(), m);
    assert_eq!(m.matmul(&id).unwrap(), m);
}

#[test]
fn mismatched_shapes_are_rejected() {
    let a = PartitionMatrix::identity(3, 2);
    let b = PartitionMatrix::identity(4, 2);
    assert!(a.matmul(&b).is_err());
    assert!(a.act(&Coloring::constant(4, 2, 0).unwrap()).is_err());
    // a column that is not a partition
    let bad = vec![
        SiteSet::full(2),
        SiteSet::empty(2),
        SiteSet::full(2),
        SiteSet::full(2),
    ];
    assert!(PartitionMatrix::new(2, 2, bad).is_err());
    let bad = vec![
        SiteSet::from_sites(2, &[0]).unwrap(),
        SiteSet::empty(2),
        SiteSet::empty(2),
        SiteSet::full(2),
    ];
    assert!(PartitionMatrix::new(2, 2, bad).is_err());
}

#[test]
fn projection_examples() {
    let a = Coloring::parse("1122", 2).unwrap();
    let b = Coloring::parse("2211", 2).unwrap();
    assert_eq!(project(&a).to_string(), "{{1,2},{3,4}}");
    assert_eq!(project(&a), project(&b));
    let ones = Coloring::constant(5, 3, 0).unwrap();
    assert_eq!(project(&ones).blocks(), vec![vec![0, 1, 2, 3, 4]]);
    let p = UnlabeledPartition::from_blocks(5, &[vec![1, 3], vec![0, 4], vec![2]]).unwrap();
    assert_eq!(p.to_string(), "{{1,5},{2,4},{3}}");
    assert_eq!(project(&p.representative(3).unwrap()), p);
    assert!(p.representative(2).is_err());
}

#[test]
fn shift_by_zero_is_identity_and_shifts_add() {
    let zero = Coloring::constant(4, 3, 0).unwrap();
    assert_eq!(cyclic_shift_matrix(&zero), PartitionMatrix::identity(4, 3));
    for x in all_words(3, 3) {
        for y in all_words(3, 3) {
            let got = cyclic_shift_matrix(&coloring(3, &x))
                .act(&coloring(3, &y))
                .unwrap();
            let want: Vec<usize> = x.iter().zip(&y).map(|(a, b)| (a + b) % 3).collect();
            assert_eq!(word(&got), want);
        }
    }
}

#[test]
fn mapping_matrix_sends_from_to_to() {
    let x = Coloring::parse("1213", 3).unwrap();
    let y = Coloring::parse("3311", 3).unwrap();
    assert_eq!(
        PartitionMatrix::mapping(&x, &y).unwrap().act(&x).unwrap(),
        y
    );
}

#[test]
fn serde_round_trips() {
    let m = to_library(
        &set_matrix_from_columns(&[vec![0, 1, 1], vec![1, 1, 0]], 3),
        3,
    );
    let s = serde_json::to_string(&m).unwrap();
    assert_eq!(serde_json::from_str::<PartitionMatrix>(&s).unwrap(), m);
    let x = Coloring::parse("12a", 10).unwrap();
    let s = serde_json::to_string(&x).unwrap();
    assert_eq!(serde_json::from_str::<Coloring>(&s).unwrap(), x);
    assert_eq!(x.to_string(), "12a");
}
