//! Product multinomial laws and their exact total-variation distance.

use std::sync::OnceLock;

use serde::Serialize;

use super::TvEstimate;
use crate::error::{Error, Result};
use crate::linalg::KahanSum;
use crate::paintbox::StochasticMatrix;
use crate::partitions::{same_shape, Coloring};

/// Largest number of enumerated (p, q) cells before giving up.
pub const DEFAULT_ENUM_BUDGET: u128 = 50_000_000;

/// Cells whose log mass falls this far below the mode are dropped. The lost
/// mass is below `n * e^-50`.
const LOG_WINDOW: f64 = 50.0;

const LN_FACT_TABLE: usize = 1 << 20;

fn ln_fact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| crate::linalg::ln_factorials(LN_FACT_TABLE))
}

/// `ln n!`.
pub fn ln_factorial(n: usize) -> f64 {
    if n <= LN_FACT_TABLE {
        return ln_fact_table()[n];
    }
    // Stirling series, far past where its error matters
    let x = n as f64 + 1.0;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
}

#[inline]
fn xlogy(x: usize, y: f64) -> f64 {
    if x == 0 {
        0.0
    } else {
        x as f64 * y.ln()
    }
}

/// `ln P(Bin(n, p) = j)`.
pub(crate) fn ln_binom_pmf(n: usize, j: usize, p: f64) -> f64 {
    ln_factorial(n) - ln_factorial(j) - ln_factorial(n - j) + xlogy(j, p) + xlogy(n - j, 1.0 - p)
}

/// Index range `[lo, hi]` carrying all but a negligible part of `Bin(n, p)`.
pub(crate) fn binom_window(n: usize, p: f64) -> (usize, usize) {
    let mode = (((n + 1) as f64) * p).floor().min(n as f64) as usize;
    let top = ln_binom_pmf(n, mode, p);
    let mut lo = mode;
    while lo > 0 && ln_binom_pmf(n, lo - 1, p) >= top - LOG_WINDOW {
        lo -= 1;
    }
    let mut hi = mode;
    while hi < n && ln_binom_pmf(n, hi + 1, p) >= top - LOG_WINDOW {
        hi += 1;
    }
    (lo, hi)
}

/// `Bin(n, p)` masses on `lo..=hi`.
pub(crate) fn binom_pmf_range(n: usize, p: f64, lo: usize, hi: usize) -> Vec<f64> {
    (lo..=hi).map(|j| ln_binom_pmf(n, j, p).exp()).collect()
}

/// Product of independent multinomial blocks: `n_j` i.i.d. draws from `s_j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductMultinomialLaw {
    k: usize,
    blocks: Vec<(usize, Vec<f64>)>,
}

impl ProductMultinomialLaw {
    pub fn new(k: usize, blocks: Vec<(usize, Vec<f64>)>) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("k must be positive"));
        }
        for (j, (_, s)) in blocks.iter().enumerate() {
            if s.len() != k {
                return Err(Error::dim(format!(
                    "block {} has {} cells, expected {}",
                    j + 1,
                    s.len(),
                    k
                )));
            }
            if s.iter().any(|x| !(*x >= 0.0) || !x.is_finite())
                || (s.iter().sum::<f64>() - 1.0).abs() > 1e-9
            {
                return Err(Error::invalid(format!(
                    "block {} is not a probability vector",
                    j + 1
                )));
            }
        }
        Ok(ProductMultinomialLaw { k, blocks })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> &[(usize, Vec<f64>)] {
        &self.blocks
    }

    pub fn n(&self) -> usize {
        self.blocks.iter().map(|b| b.0).sum()
    }
}

/// One independent coordinate of the statistic: masses under both laws.
#[derive(Clone, Debug)]
pub(crate) struct Factor {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl Factor {
    fn len(&self) -> usize {
        self.p.len()
    }
}

fn binomial_factor(n: usize, a: f64, b: f64) -> Factor {
    let (l1, h1) = binom_window(n, a);
    let (l2, h2) = binom_window(n, b);
    let (lo, hi) = (l1.min(l2), h1.max(h2));
    Factor {
        p: binom_pmf_range(n, a, lo, hi),
        q: binom_pmf_range(n, b, lo, hi),
    }
}

pub(crate) fn num_compositions(n: usize, k: usize) -> u128 {
    // C(n + k - 1, k - 1)
    let mut c: u128 = 1;
    for i in 1..k as u128 {
        c = c * (n as u128 + i) / i;
    }
    c
}

/// All compositions of `n` into `k` nonnegative parts, lexicographic.
pub(crate) fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; k];
    fn rec(pos: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let k = cur.len();
        if pos == k - 1 {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for c in 0..=left {
            cur[pos] = c;
            rec(pos + 1, left - c, cur, out);
        }
    }
    rec(0, n, &mut cur, &mut out);
    out
}

pub(crate) fn ln_multinomial_pmf(counts: &[usize], s: &[f64]) -> f64 {
    let n: usize = counts.iter().sum();
    let mut acc = ln_factorial(n);
    for (&c, &p) in counts.iter().zip(s) {
        acc += xlogy(c, p) - ln_factorial(c);
    }
    acc
}

fn multinomial_factor(n: usize, s: &[f64], t: &[f64]) -> Factor {
    let comps = compositions(n, s.len());
    Factor {
        p: comps
            .iter()
            .map(|c| ln_multinomial_pmf(c, s).exp())
            .collect(),
        q: comps
            .iter()
            .map(|c| ln_multinomial_pmf(c, t).exp())
            .collect(),
    }
}

/// `sum_{i,j} (pa_i pb_j - qa_i qb_j)^+` for two independent factors: sort
/// one factor by likelihood ratio, then each cell of the other picks a prefix.
fn tv_two_factors(a: &Factor, b: &Factor) -> f64 {
    let mut idx: Vec<(f64, usize)> = (0..b.len())
        .filter(|&j| b.p[j] > 0.0 || b.q[j] > 0.0)
        .map(|j| (b.p[j].ln() - b.q[j].ln(), j))
        .collect();
    idx.sort_by(|x, y| y.0.total_cmp(&x.0));
    let ratios: Vec<f64> = idx.iter().map(|x| x.0).collect();
    let mut pb = Vec::with_capacity(idx.len() + 1);
    let mut qb = Vec::with_capacity(idx.len() + 1);
    let (mut sp, mut sq) = (KahanSum::new(), KahanSum::new());
    pb.push(0.0);
    qb.push(0.0);
    for &(_, j) in &idx {
        sp.add(b.p[j]);
        sq.add(b.q[j]);
        pb.push(sp.value());
        qb.push(sq.value());
    }
    let mut total = KahanSum::new();
    for i in 0..a.len() {
        let (pa, qa) = (a.p[i], a.q[i]);
        if pa == 0.0 && qa == 0.0 {
            continue;
        }
        let tau = qa.ln() - pa.ln();
        // number of j with ratio > tau (ratios descending)
        let cut = ratios.partition_point(|&r| r > tau);
        let v = pa * pb[cut] - qa * qb[cut];
        if v > 0.0 {
            total.add(v);
        }
    }
    total.value()
}

fn tv_factors(mut factors: Vec<Factor>, budget: u128) -> Result<f64> {
    match factors.len() {
        0 => return Ok(0.0),
        1 => {
            let f = &factors[0];
            let s: KahanSum = f.p.iter().zip(&f.q).map(|(p, q)| (p - q).abs()).collect();
            return Ok(0.5 * s.value());
        }
        _ => {}
    }
    factors.sort_by_key(|f| f.len());
    let last = factors.pop().unwrap();
    let need: u128 = factors.iter().map(|f| f.len() as u128).product();
    if need.saturating_mul(2) > budget {
        return Err(Error::Budget {
            required: need,
            budget,
        });
    }
    let mut merged = Factor {
        p: vec![1.0],
        q: vec![1.0],
    };
    for f in &factors {
        let mut p = Vec::with_capacity(merged.len() * f.len());
        let mut q = Vec::with_capacity(merged.len() * f.len());
        for i in 0..merged.len() {
            for j in 0..f.len() {
                p.push(merged.p[i] * f.p[j]);
                q.push(merged.q[i] * f.q[j]);
            }
        }
        merged = Factor { p, q };
    }
    Ok(tv_two_factors(&merged, &last))
}

pub(crate) fn factors_for(
    p: &ProductMultinomialLaw,
    q: &ProductMultinomialLaw,
    budget: u128,
) -> Result<Vec<Factor>> {
    if p.k != q.k
        || p.blocks.len() != q.blocks.len()
        || p.blocks.iter().zip(&q.blocks).any(|(a, b)| a.0 != b.0)
    {
        return Err(Error::dim(
            "product multinomial laws with different block structure",
        ));
    }
    let k = p.k;
    let mut out = Vec::new();
    for ((n, s), (_, t)) in p.blocks.iter().zip(&q.blocks) {
        if *n == 0 || s == t {
            continue;
        }
        if k == 2 {
            out.push(binomial_factor(*n, s[0], t[0]));
        } else {
            let cells = num_compositions(*n, k);
            if cells > budget {
                return Err(Error::Budget {
                    required: cells,
                    budget,
                });
            }
            out.push(multinomial_factor(*n, s, t));
        }
    }
    Ok(out)
}

/// Exact TV between two product multinomial laws with the same blocks,
/// computed on the per-block count vectors.
pub fn tv_exact_product_multinomial(
    p: &ProductMultinomialLaw,
    q: &ProductMultinomialLaw,
) -> Result<TvEstimate> {
    tv_exact_product_multinomial_with_budget(p, q, DEFAULT_ENUM_BUDGET)
}

pub fn tv_exact_product_multinomial_with_budget(
    p: &ProductMultinomialLaw,
    q: &ProductMultinomialLaw,
    budget: u128,
) -> Result<TvEstimate> {
    let factors = factors_for(p, q, budget)?;
    Ok(TvEstimate::exact(tv_factors(factors, budget)?))
}

/// `TV(Bin(n, a), Bin(n, b))`.
pub fn binomial_tv(n: usize, a: f64, b: f64) -> f64 {
    if n == 0 || a == b {
        return 0.0;
    }
    tv_factors(vec![binomial_factor(n, a, b)], u128::MAX).expect("single factor")
}

/// `sqrt(1 - BC^2)` with `BC` the Bhattacharyya coefficient; always an upper
/// bound on TV.
pub fn hellinger_upper_bound(p: &ProductMultinomialLaw, q: &ProductMultinomialLaw) -> Result<f64> {
    if p.k != q.k
        || p.blocks.len() != q.blocks.len()
        || p.blocks.iter().zip(&q.blocks).any(|(a, b)| a.0 != b.0)
    {
        return Err(Error::dim(
            "product multinomial laws with different block structure",
        ));
    }
    let mut ln_bc = 0.0;
    for ((n, s), (_, t)) in p.blocks.iter().zip(&q.blocks) {
        let bc: f64 = s.iter().zip(t).map(|(a, b)| (a * b).sqrt()).sum();
        ln_bc += *n as f64 * bc.min(1.0).ln();
    }
    Ok((1.0 - (2.0 * ln_bc).exp()).max(0.0).sqrt())
}

/// Group sites by `(x0[i], x0_tilde[i])`: the block sizes with the pair of
/// starting colors. Pairs with equal colors are kept.
pub(crate) fn refine(x0: &Coloring, x0_tilde: &Coloring) -> Vec<(usize, usize, usize)> {
    let k = x0.k();
    let mut counts = vec![0usize; k * k];
    for i in 0..x0.n() {
        counts[x0.color(i) * k + x0_tilde.color(i)] += 1;
    }
    (0..k * k)
        .filter(|&g| counts[g] > 0)
        .map(|g| (counts[g], g / k, g % k))
        .collect()
}

/// The two conditional laws of `X_m` given `Q_m = qm`, as product
/// multinomials on the common refinement of the starting states.
pub(crate) fn conditional_laws(
    qm: &StochasticMatrix,
    x0: &Coloring,
    x0_tilde: &Coloring,
) -> Result<(ProductMultinomialLaw, ProductMultinomialLaw)> {
    same_shape(x0, x0_tilde)?;
    if qm.k() != x0.k() {
        return Err(Error::dim("paintbox product and colorings disagree on k"));
    }
    let groups: Vec<(usize, usize, usize)> = refine(x0, x0_tilde)
        .into_iter()
        .filter(|g| g.1 != g.2)
        .collect();
    let k = x0.k();
    let p = ProductMultinomialLaw {
        k,
        blocks: groups.iter().map(|&(n, c, _)| (n, qm.column(c))).collect(),
    };
    let q = ProductMultinomialLaw {
        k,
        blocks: groups.iter().map(|&(n, _, c)| (n, qm.column(c))).collect(),
    };
    Ok((p, q))
}

/// Exact TV between the laws of `X_m` from `x0` and from `x0_tilde` given the
/// paintbox product `qm`. Sites where the two starts agree contribute
/// identical factors and cancel.
pub fn tv_exact_conditional(
    qm: &StochasticMatrix,
    x0: &Coloring,
    x0_tilde: &Coloring,
) -> Result<TvEstimate> {
    let (p, q) = conditional_laws(qm, x0, x0_tilde)?;
    tv_exact_product_multinomial(&p, &q)
}
