//! Brute-force oracles shared by the integration tests. Nothing here goes
//! through the sufficient-statistic shortcuts of the library.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::io::Write;

use efcp::{Coloring, PartitionMatrix, StochasticMatrix};
use rand::Rng;

/// Write a line past the test harness capture.
pub fn report(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

/// Partition matrix as plain sets, `cells[r][c]`.
pub type SetMatrix = Vec<Vec<BTreeSet<usize>>>;

pub fn set_matrix_from_columns(cols: &[Vec<usize>], n: usize) -> SetMatrix {
    let k = cols.len();
    let mut m = vec![vec![BTreeSet::new(); k]; k];
    for (c, col) in cols.iter().enumerate() {
        for i in 0..n {
            m[col[i]][c].insert(i);
        }
    }
    m
}

pub fn set_matmul(a: &SetMatrix, b: &SetMatrix) -> SetMatrix {
    let k = a.len();
    let mut out = vec![vec![BTreeSet::new(); k]; k];
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                out[i][j].extend(a[i][l].intersection(&b[l][j]).copied());
            }
        }
    }
    out
}

pub fn set_act(m: &SetMatrix, x: &[usize]) -> Vec<usize> {
    x.iter()
        .enumerate()
        .map(|(i, &c)| {
            (0..m.len())
                .find(|&r| m[r][c].contains(&i))
                .expect("column is a partition")
        })
        .collect()
}

pub fn to_library(m: &SetMatrix, n: usize) -> PartitionMatrix {
    let k = m.len();
    let mut cells = Vec::with_capacity(k * k);
    for r in 0..k {
        for c in 0..k {
            let sites: Vec<usize> = m[r][c].iter().copied().collect();
            cells.push(efcp::partitions::SiteSet::from_sites(n, &sites).unwrap());
        }
    }
    PartitionMatrix::new(n, k, cells).unwrap()
}

pub fn from_library(p: &PartitionMatrix) -> SetMatrix {
    let k = p.k();
    (0..k)
        .map(|r| (0..k).map(|c| p.cell(r, c).iter().collect()).collect())
        .collect()
}

pub fn coloring(k: usize, x: &[usize]) -> Coloring {
    Coloring::new(k, x.iter().map(|&c| c as u8).collect()).unwrap()
}

pub fn word(x: &Coloring) -> Vec<usize> {
    x.word().iter().map(|&c| c as usize).collect()
}

/// All words of length `n` over `k` letters, site 0 varying fastest.
pub fn all_words(n: usize, k: usize) -> Vec<Vec<usize>> {
    let total = k.pow(n as u32);
    (0..total)
        .map(|mut idx| {
            (0..n)
                .map(|_| {
                    let c = idx % k;
                    idx /= k;
                    c
                })
                .collect()
        })
        .collect()
}

pub fn random_word<R: Rng>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..k)).collect()
}

/// Column-stochastic matrix with entries drawn uniformly from
/// `[floor, 1)` and then normalised.
pub fn random_stochastic<R: Rng>(k: usize, floor: f64, rng: &mut R) -> StochasticMatrix {
    let cols: Vec<Vec<f64>> = (0..k)
        .map(|_| {
            let raw: Vec<f64> = (0..k).map(|_| rng.random_range(floor..1.0)).collect();
            let s: f64 = raw.iter().sum();
            raw.iter().map(|v| v / s).collect()
        })
        .collect();
    StochasticMatrix::from_columns(&cols).unwrap()
}

pub fn random_simplex<R: Rng>(k: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|v| v / s).collect()
}

pub fn tv(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// `Q = S_m ... S_1` as plain rows.
pub fn product(seq: &[&StochasticMatrix], k: usize) -> Vec<Vec<f64>> {
    let mut q: Vec<Vec<f64>> = (0..k)
        .map(|r| (0..k).map(|c| if r == c { 1.0 } else { 0.0 }).collect())
        .collect();
    for s in seq {
        let mut next = vec![vec![0.0; k]; k];
        for r in 0..k {
            for c in 0..k {
                next[r][c] = (0..k).map(|l| s.get(r, l) * q[l][c]).sum();
            }
        }
        q = next;
    }
    q
}

/// Law of `X_m` from `x0` over all `k^n` states, as the mixture over paintbox
/// sequences of the site-wise product `prod_i Q(y_i, x0_i)`.
pub fn joint_law(atoms: &[(StochasticMatrix, f64)], x0: &[usize], k: usize, m: usize) -> Vec<f64> {
    let n = x0.len();
    let words = all_words(n, k);
    let mut law = vec![0.0; words.len()];
    let r = atoms.len();
    for code in 0..r.pow(m as u32) {
        let mut c = code;
        let mut seq = Vec::with_capacity(m);
        let mut w = 1.0;
        for _ in 0..m {
            seq.push(&atoms[c % r].0);
            w *= atoms[c % r].1;
            c /= r;
        }
        let q = product(&seq, k);
        for (idx, y) in words.iter().enumerate() {
            let p: f64 = (0..n).map(|i| q[y[i]][x0[i]]).product();
            law[idx] += w * p;
        }
    }
    law
}
