//! Monte Carlo brackets for the pairwise distance between the laws of `X_m`
//! started from the two states of a block design.
//!
//! Upper bound: under the shared-paintbox coupling, TV of the mixtures is at
//! most the mean conditional TV, estimated by averaging exact conditional
//! distances over sampled paintbox sequences.
//!
//! Lower bound: for any event `B`, `TV >= P~(B) - P(B)`. A pilot batch picks
//! `B` among threshold events on the color counts of the two halves of a
//! design block; an independent main batch then estimates `P~(B) - P(B)`
//! without bias (each replicate contributes the exact conditional
//! difference given its paintbox product).

use rayon::prelude::*;
use serde::Serialize;

use super::multinomial::{binom_window, conditional_laws, hellinger_upper_bound, ln_binom_pmf};
use super::{mean_se, tv_exact_product_multinomial, TvEstimate, TvKind};
use crate::error::{Error, Result};
use crate::paintbox::{PaintboxLaw, PaintboxSampler, StochasticMatrix};
use crate::partitions::Coloring;
use crate::rng::RngStream;

const TAG_UPPER: u64 = 0x5550;
const TAG_PILOT: u64 = 0x5049;
const TAG_MAIN: u64 = 0x4d41;

/// Conditional distances below this are treated as zero from then on; the
/// pathwise distance can only decrease.
const NEGLIGIBLE_TV: f64 = 1e-15;

pub const FLAG_HELLINGER: &str = "hellinger_fallback";

/// One design block: on `2 * half` sites starting at `start`, `x0` is `from`
/// everywhere while `x0_tilde` is `from` on the first half and `to` on the
/// second.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DesignBlock {
    pub from: usize,
    pub to: usize,
    pub start: usize,
}

/// The paired starting states used for lower bounds: `k(k-1)` blocks, one
/// per ordered color pair. Sites beyond `2 k (k-1) half` are padding with
/// color 1 in both states.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockDesign {
    pub n: usize,
    pub k: usize,
    pub half: usize,
    pub blocks: Vec<DesignBlock>,
    pub x0: Coloring,
    pub x0_tilde: Coloring,
}

impl BlockDesign {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid("block designs need k >= 2"));
        }
        let per = 2 * k * (k - 1);
        let half = n / per;
        if half == 0 {
            return Err(Error::invalid(format!(
                "n = {} too small for a block design with k = {} (need n >= {})",
                n, k, per
            )));
        }
        let mut a = vec![0u8; n];
        let mut b = vec![0u8; n];
        let mut blocks = Vec::new();
        let mut start = 0;
        for from in 0..k {
            for to in (0..k).filter(|&t| t != from) {
                for i in 0..2 * half {
                    a[start + i] = from as u8;
                    b[start + i] = if i < half { from as u8 } else { to as u8 };
                }
                blocks.push(DesignBlock { from, to, start });
                start += 2 * half;
            }
        }
        Ok(BlockDesign {
            n,
            k,
            half,
            blocks,
            x0: Coloring::new(k, a)?,
            x0_tilde: Coloring::new(k, b)?,
        })
    }

    /// Accept a pair of states only if it is the design for its `(n, k)`.
    pub fn recognize(x0: &Coloring, x0_tilde: &Coloring) -> Result<Self> {
        let d = BlockDesign::new(x0.n(), x0.k())
            .map_err(|e| Error::invalid(format!("not a block design: {}", e)))?;
        if &d.x0 != x0 || &d.x0_tilde != x0_tilde {
            return Err(Error::invalid(
                "the lower bound needs the paired block design (see BlockDesign::new)",
            ));
        }
        Ok(d)
    }
}

fn sample_products(
    sampler: &PaintboxSampler,
    rng: &mut RngStream,
    m_max: usize,
) -> Vec<StochasticMatrix> {
    let mut q = StochasticMatrix::identity(sampler.k());
    let mut out = Vec::with_capacity(m_max + 1);
    out.push(q.clone());
    for _ in 0..m_max {
        q = sampler.sample(rng).mul(&q);
        out.push(q.clone());
    }
    out
}

/// Conditional TV given `Q`, with the Hellinger bound when enumeration is
/// out of budget. The flag reports the fallback.
fn conditional_upper(q: &StochasticMatrix, x0: &Coloring, x1: &Coloring) -> Result<(f64, bool)> {
    let (p, pt) = conditional_laws(q, x0, x1)?;
    match tv_exact_product_multinomial(&p, &pt) {
        Ok(t) => Ok((t.value, false)),
        Err(Error::Budget { .. }) => Ok((hellinger_upper_bound(&p, &pt)?, true)),
        Err(e) => Err(e),
    }
}

/// Upper bounds for `m = 0..=m_max` from shared paintbox paths; entry `m` is
/// the same number [`tv_upper_mc`] returns for that `m` and seed.
pub fn tv_upper_mc_profile(
    law: &PaintboxLaw,
    x0: &Coloring,
    x0_tilde: &Coloring,
    m_max: usize,
    replicates: usize,
    seed: u64,
) -> Result<Vec<TvEstimate>> {
    crate::partitions::same_shape(x0, x0_tilde)?;
    if law.k() != x0.k() {
        return Err(Error::dim("law and colorings disagree on k"));
    }
    if replicates == 0 {
        return Err(Error::invalid("replicates must be positive"));
    }
    if x0 == x0_tilde {
        return Ok(vec![upper(0.0, 0.0, replicates, false); m_max + 1]);
    }
    let sampler = law.sampler();
    let paths: Vec<Result<(Vec<f64>, bool)>> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::tagged(seed, TAG_UPPER, r);
            let mut q = StochasticMatrix::identity(law.k());
            let mut vals = Vec::with_capacity(m_max + 1);
            let mut fallback = false;
            let (v0, f0) = conditional_upper(&q, x0, x0_tilde)?;
            vals.push(v0);
            fallback |= f0;
            for _ in 0..m_max {
                q = sampler.sample(&mut rng).mul(&q);
                let prev = *vals.last().unwrap();
                if prev < NEGLIGIBLE_TV {
                    vals.push(0.0);
                    continue;
                }
                let (v, f) = conditional_upper(&q, x0, x0_tilde)?;
                fallback |= f;
                vals.push(v.min(prev));
            }
            Ok((vals, fallback))
        })
        .collect();
    let paths: Vec<(Vec<f64>, bool)> = paths.into_iter().collect::<Result<_>>()?;
    let fallback = paths.iter().any(|p| p.1);
    Ok((0..=m_max)
        .map(|m| {
            let xs: Vec<f64> = paths.iter().map(|p| p.0[m]).collect();
            let (mean, se) = mean_se(&xs);
            upper(mean, se, replicates, fallback)
        })
        .collect())
}

fn upper(mean: f64, se: f64, replicates: usize, fallback: bool) -> TvEstimate {
    TvEstimate {
        value: mean.clamp(0.0, 1.0),
        kind: TvKind::UpperBound,
        mc_std_error: se,
        replicates,
        flags: if fallback {
            vec![FLAG_HELLINGER.to_string()]
        } else {
            vec![]
        },
    }
}

/// Mean conditional TV over sampled paintbox sequences of length `m`.
pub fn tv_upper_mc(
    law: &PaintboxLaw,
    x0: &Coloring,
    x0_tilde: &Coloring,
    m: usize,
    replicates: usize,
    seed: u64,
) -> Result<TvEstimate> {
    Ok(tv_upper_mc_profile(law, x0, x0_tilde, m, replicates, seed)?
        .pop()
        .unwrap())
}

/// The test event chosen by the pilot batch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum LowerTest {
    /// `{V >= c}` (or its complement when `upper` is false), `V` the count of
    /// `color` in the second half of block `block`.
    SecondHalf {
        block: usize,
        color: usize,
        c: usize,
        upper: bool,
    },
    /// `{|U - V| >= c}`, `U` and `V` the counts of `color` in the two halves.
    HalvesDiffer {
        block: usize,
        color: usize,
        c: usize,
    },
}

/// `Bin(n, p)` restricted to its numerical support, with a CDF.
struct Binom {
    n: usize,
    lo: usize,
    pmf: Vec<f64>,
    cdf: Vec<f64>,
}

impl Binom {
    fn new(n: usize, p: f64) -> Self {
        let (lo, hi) = binom_window(n, p);
        let pmf: Vec<f64> = (lo..=hi).map(|j| ln_binom_pmf(n, j, p).exp()).collect();
        let mut cdf = Vec::with_capacity(pmf.len());
        let mut acc = 0.0;
        for x in &pmf {
            acc += x;
            cdf.push(acc);
        }
        let total = acc;
        for c in cdf.iter_mut() {
            *c /= total;
        }
        let pmf = pmf.into_iter().map(|x| x / total).collect();
        Binom { n, lo, pmf, cdf }
    }

    fn hi(&self) -> usize {
        self.lo + self.pmf.len() - 1
    }

    /// `P(X <= x)`.
    fn cdf_at(&self, x: i64) -> f64 {
        if x < self.lo as i64 {
            0.0
        } else if x >= self.hi() as i64 {
            1.0
        } else {
            self.cdf[(x - self.lo as i64) as usize]
        }
    }

    /// `P(X >= x)`.
    fn sf_at(&self, x: i64) -> f64 {
        1.0 - self.cdf_at(x - 1)
    }

    /// `P(|X - Y| >= c)` for independent `X ~ self`, `Y ~ other`.
    fn abs_diff_at_least(&self, other: &Binom, c: usize) -> f64 {
        if c == 0 {
            return 1.0;
        }
        let c = c as i64;
        let mut acc = 0.0;
        for (i, px) in self.pmf.iter().enumerate() {
            let x = (self.lo + i) as i64;
            acc += px * (other.cdf_at(x - c) + other.sf_at(x + c));
        }
        acc.min(1.0)
    }

    /// `P(|X - Y| >= c)` for every `c = 0..=n`.
    fn abs_diff_tail(&self, other: &Binom) -> Vec<f64> {
        let n = self.n;
        let mut dist = vec![0.0; n + 1];
        for (i, px) in self.pmf.iter().enumerate() {
            let x = self.lo + i;
            for (j, py) in other.pmf.iter().enumerate() {
                let y = other.lo + j;
                dist[x.abs_diff(y)] += px * py;
            }
        }
        let mut tail = vec![0.0; n + 2];
        for c in (0..=n).rev() {
            tail[c] = tail[c + 1] + dist[c];
        }
        tail.truncate(n + 1);
        tail
    }
}

struct Candidates {
    half: usize,
    k: usize,
    blocks: Vec<DesignBlock>,
}

impl Candidates {
    /// Colors worth testing: for k = 2 one color determines the other.
    fn colors(&self) -> usize {
        if self.k == 2 {
            1
        } else {
            self.k
        }
    }

    fn params(&self, q: &StochasticMatrix, block: usize, color: usize) -> (f64, f64) {
        let b = self.blocks[block];
        (q.get(color, b.from), q.get(color, b.to))
    }

    /// Gains `P~(B) - P(B)` for every candidate event, in a fixed layout:
    /// per (block, color): `n'+1` values for `{V >= c}`, then `n'+1` for
    /// `{|U - V| >= c}`.
    fn all_gains(&self, q: &StochasticMatrix) -> Vec<f64> {
        let h = self.half;
        let mut out = Vec::with_capacity(self.blocks.len() * self.colors() * 2 * (h + 1));
        for block in 0..self.blocks.len() {
            for color in 0..self.colors() {
                let (a, b) = self.params(q, block, color);
                let ba = Binom::new(h, a);
                let bb = Binom::new(h, b);
                for c in 0..=h {
                    out.push(bb.sf_at(c as i64) - ba.sf_at(c as i64));
                }
                let same = ba.abs_diff_tail(&ba);
                let diff = ba.abs_diff_tail(&bb);
                for c in 0..=h {
                    out.push(diff[c] - same[c]);
                }
            }
        }
        out
    }

    fn decode(&self, idx: usize, negate: bool) -> LowerTest {
        let h1 = self.half + 1;
        let per = 2 * h1;
        let pair = idx / per;
        let (block, color) = (pair / self.colors(), pair % self.colors());
        let off = idx % per;
        if off < h1 {
            LowerTest::SecondHalf {
                block,
                color,
                c: off,
                upper: !negate,
            }
        } else {
            LowerTest::HalvesDiffer {
                block,
                color,
                c: off - h1,
            }
        }
    }

    fn gain(&self, q: &StochasticMatrix, test: &LowerTest) -> f64 {
        match *test {
            LowerTest::SecondHalf {
                block,
                color,
                c,
                upper,
            } => {
                let (a, b) = self.params(q, block, color);
                let g = Binom::new(self.half, b).sf_at(c as i64)
                    - Binom::new(self.half, a).sf_at(c as i64);
                if upper {
                    g
                } else {
                    -g
                }
            }
            LowerTest::HalvesDiffer { block, color, c } => {
                let (a, b) = self.params(q, block, color);
                let ba = Binom::new(self.half, a);
                let bb = Binom::new(self.half, b);
                ba.abs_diff_at_least(&bb, c) - ba.abs_diff_at_least(&ba, c)
            }
        }
    }
}

/// Pilot batch size for `replicates` main replicates.
pub fn pilot_size(replicates: usize) -> usize {
    (replicates / 20).clamp(100, 400)
}

/// Lower-bound estimates for `m = 0..=m_max` together with the chosen test
/// events.
pub fn tv_lower_mc_profile(
    law: &PaintboxLaw,
    x0: &Coloring,
    x0_tilde: &Coloring,
    m_max: usize,
    replicates: usize,
    seed: u64,
) -> Result<Vec<(TvEstimate, LowerTest)>> {
    let design = BlockDesign::recognize(x0, x0_tilde)?;
    if law.k() != design.k {
        return Err(Error::dim("law and design disagree on k"));
    }
    if replicates == 0 {
        return Err(Error::invalid("replicates must be positive"));
    }
    let cands = Candidates {
        half: design.half,
        k: design.k,
        blocks: design.blocks.clone(),
    };
    let sampler = law.sampler();
    let pilot = pilot_size(replicates);

    // pilot: mean gain of every candidate event at every m
    let pilot_gains: Vec<Vec<Vec<f64>>> = (0..pilot as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::tagged(seed, TAG_PILOT, r);
            sample_products(&sampler, &mut rng, m_max)
                .iter()
                .map(|q| cands.all_gains(q))
                .collect()
        })
        .collect();
    let tests: Vec<LowerTest> = (0..=m_max)
        .map(|m| {
            let len = pilot_gains[0][m].len();
            let mut best = (f64::NEG_INFINITY, 0usize, false);
            for i in 0..len {
                let g = pilot_gains.iter().map(|p| p[m][i]).sum::<f64>() / pilot as f64;
                if g > best.0 {
                    best = (g, i, false);
                }
                if -g > best.0 {
                    best = (-g, i, true);
                }
            }
            let t = cands.decode(best.1, best.2);
            match t {
                // the complement of a two-sided event is never better
                LowerTest::HalvesDiffer { .. } if best.2 => {
                    cands.decode(best.1 - cands.half - 1, false)
                }
                _ => t,
            }
        })
        .collect();

    let main: Vec<Vec<f64>> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::tagged(seed, TAG_MAIN, r);
            sample_products(&sampler, &mut rng, m_max)
                .iter()
                .zip(&tests)
                .map(|(q, t)| cands.gain(q, t))
                .collect()
        })
        .collect();
    Ok((0..=m_max)
        .map(|m| {
            let xs: Vec<f64> = main.iter().map(|v| v[m]).collect();
            let (mean, se) = mean_se(&xs);
            let est = TvEstimate {
                value: mean.clamp(0.0, 1.0),
                kind: TvKind::LowerBound,
                mc_std_error: se,
                replicates,
                flags: vec![],
            };
            (est, tests[m])
        })
        .collect())
}

/// Conservative lower bound on the pairwise distance at step `m`; the
/// states must form a [`BlockDesign`].
pub fn tv_lower_mc(
    law: &PaintboxLaw,
    x0: &Coloring,
    x0_tilde: &Coloring,
    m: usize,
    replicates: usize,
    seed: u64,
) -> Result<TvEstimate> {
    Ok(tv_lower_mc_profile(law, x0, x0_tilde, m, replicates, seed)?
        .pop()
        .unwrap()
        .0)
}
