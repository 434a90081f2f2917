//! Random products `Q_m = S_m ... S_1`, their restriction to the subspace `V`
//! orthogonal to the ones vector, and Lyapunov exponents.
//!
//! Column-stochastic matrices satisfy `1^T S = 1^T`, so they map `V` into
//! itself. The spectrum on `V` is tracked by pushing an orthonormal frame of
//! `V` through each factor and re-orthonormalising (QR with positive
//! diagonal); the logs of the diagonal telescope to the exponents.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, helmert, restrict_to_v};
use crate::paintbox::{PaintboxLaw, StochasticMatrix};
use crate::rng::RngStream;

/// A frame direction whose norm drops below this after one step is treated
/// as collapsed (exponent minus infinity).
pub const COLLAPSE_EPS: f64 = 1e-13;

/// Floor applied to per-step `log |det S|V|` when estimating kappa.
pub const LOG_DET_FLOOR: f64 = -700.0;

/// Running product with its QR-tracked frame on `V`.
#[derive(Clone, Debug)]
pub struct ProductState {
    k: usize,
    q: StochasticMatrix,
    m: usize,
    /// `k x (k-1)` row-major, orthonormal columns in `V`.
    frame: Vec<f64>,
    log_r_sums: Vec<f64>,
    collapsed: Vec<bool>,
}

impl ProductState {
    pub fn new(k: usize) -> Self {
        ProductState {
            k,
            q: StochasticMatrix::identity(k),
            m: 0,
            frame: helmert(k),
            log_r_sums: vec![0.0; k.saturating_sub(1)],
            collapsed: vec![false; k.saturating_sub(1)],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> &StochasticMatrix {
        &self.q
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn frame(&self) -> &[f64] {
        &self.frame
    }

    /// Accumulated `log r_jj`; minus infinity for collapsed directions.
    pub fn log_r_sums(&self) -> &[f64] {
        &self.log_r_sums
    }

    pub fn is_degenerate(&self) -> bool {
        self.collapsed.iter().any(|&c| c)
    }

    /// Multiply by `s` on the left and re-orthonormalise the frame.
    /// Returns this step's `log r_jj` increments.
    pub fn step(&mut self, s: &StochasticMatrix) -> Result<Vec<f64>> {
        if s.k() != self.k {
            return Err(Error::dim(format!(
                "factor is {}x{}, product is {}x{}",
                s.k(),
                s.k(),
                self.k,
                self.k
            )));
        }
        let k = self.k;
        let d = k - 1;
        self.q = s.mul(&self.q);
        self.m += 1;
        let mut f = linalg::matmul(s.data(), &self.frame, k, k, d);
        // stay inside V despite rounding
        for j in 0..d {
            let mean = (0..k).map(|i| f[i * d + j]).sum::<f64>() / k as f64;
            for i in 0..k {
                f[i * d + j] -= mean;
            }
        }
        let mut incs = vec![0.0; d];
        for j in 0..d {
            let mut v: Vec<f64> = (0..k).map(|i| f[i * d + j]).collect();
            for _pass in 0..2 {
                for p in 0..j {
                    let dot: f64 = (0..k).map(|i| f[i * d + p] * v[i]).sum();
                    for i in 0..k {
                        v[i] -= dot * f[i * d + p];
                    }
                }
            }
            let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if self.collapsed[j] || r <= COLLAPSE_EPS {
                self.collapsed[j] = true;
                self.log_r_sums[j] = f64::NEG_INFINITY;
                incs[j] = f64::NEG_INFINITY;
                v = self.replacement_direction(&f, j);
            } else {
                incs[j] = r.ln();
                self.log_r_sums[j] += incs[j];
                for x in v.iter_mut() {
                    *x /= r;
                }
            }
            for i in 0..k {
                f[i * d + j] = v[i];
            }
        }
        self.frame = f;
        Ok(incs)
    }

    /// A unit vector of `V` orthogonal to frame columns `0..j`.
    fn replacement_direction(&self, f: &[f64], j: usize) -> Vec<f64> {
        let (k, d) = (self.k, self.k - 1);
        let h = helmert(k);
        let mut best = (0.0, vec![0.0; k]);
        for c in 0..d {
            let mut v: Vec<f64> = (0..k).map(|i| h[i * d + c]).collect();
            for _pass in 0..2 {
                for p in 0..j {
                    let dot: f64 = (0..k).map(|i| f[i * d + p] * v[i]).sum();
                    for i in 0..k {
                        v[i] -= dot * f[i * d + p];
                    }
                }
            }
            let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if r > best.0 {
                best = (r, v);
            }
        }
        let (r, mut v) = best;
        for x in v.iter_mut() {
            *x /= r;
        }
        v
    }
}

/// Euclidean diameter of `q(Δ_k)`: the image is the convex hull of the
/// columns, so the largest distance between two columns.
pub fn simplex_diameter(q: &StochasticMatrix) -> f64 {
    let k = q.k();
    let mut best: f64 = 0.0;
    for a in 0..k {
        for b in a + 1..k {
            let d2: f64 = (0..k).map(|r| (q.get(r, a) - q.get(r, b)).powi(2)).sum();
            best = best.max(d2.sqrt());
        }
    }
    best
}

/// Largest singular value of `H^T q H` (the operator norm of `q` on `V`).
pub fn top_singular_on_v(q: &StochasticMatrix) -> f64 {
    let k = q.k();
    if k < 2 {
        return 0.0;
    }
    let b = restrict_to_v(q.data(), k);
    linalg::singular_values(&b, k - 1, k - 1)[0]
}

/// `log |det (S restricted to V)|`.
pub fn log_abs_det_on_v(s: &StochasticMatrix) -> f64 {
    let k = s.k();
    if k < 2 {
        return 0.0;
    }
    linalg::log_abs_det(&restrict_to_v(s.data(), k), k - 1)
}

/// How per-step log increments are averaged into exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    /// Plain Birkhoff average `log_r_sums / m`.
    Uniform,
    /// Average with the smooth bump weight `exp(-1/(x(1-x)))`. For a fixed
    /// matrix the increments are quasi-periodic and this average converges
    /// much faster than `1/m`.
    Weighted,
}

#[derive(Clone, Debug, Default)]
pub struct LyapunovOptions {
    /// Defaults to weighted for point masses and uniform otherwise.
    pub averaging: Option<Averaging>,
    /// Record the running estimate of replicate 0 every this many steps
    /// (0 disables the trace).
    pub trace_every: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TracePoint {
    pub step: usize,
    pub lambda1: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LyapunovEstimate {
    pub lambda1: f64,
    /// Exponentials of the exponents, descending.
    pub spectrum: Vec<f64>,
    /// The exponents themselves (`log` of `spectrum`).
    pub exponents: Vec<f64>,
    pub kappa_hat: f64,
    pub m: usize,
    pub replicates: usize,
    /// Standard error of `lambda1` across replicates; `None` with one
    /// replicate or after a collapse.
    pub std_error: Option<f64>,
    /// Standard error of `kappa_hat` across replicates.
    pub kappa_std_error: Option<f64>,
    pub averaging: Averaging,
    pub flags: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TracePoint>,
}

pub const FLAG_COLLAPSE: &str = "super_exponential_collapse";
pub const FLAG_DEGENERATE: &str = "degenerate_direction";
pub const FLAG_LOG_DET_FLOOR: &str = "log_det_floor_hit";

/// Normalised bump weights for steps `1..=m`.
pub fn bump_weights(m: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..m)
        .map(|t| {
            let x = (t as f64 + 0.5) / m as f64;
            (-1.0 / (x * (1.0 - x))).exp()
        })
        .collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / s).collect()
}

struct ReplicateResult {
    exponents: Vec<f64>,
    kappa: f64,
    floor_hit: bool,
    degenerate: bool,
    trace: Vec<TracePoint>,
}

fn lyapunov_replicate(
    law: &PaintboxLaw,
    m: usize,
    rng: &mut RngStream,
    weights: Option<&[f64]>,
    trace_every: usize,
) -> ReplicateResult {
    let k = law.k();
    let d = k - 1;
    let sampler = law.sampler();
    let mut state = ProductState::new(k);
    let mut acc = vec![linalg::KahanSum::new(); d];
    let mut kappa = linalg::KahanSum::new();
    let mut floor_hit = false;
    let mut trace = Vec::new();
    for t in 0..m {
        let s = sampler.sample(rng);
        let incs = state.step(&s).expect("dimensions match");
        let w = weights.map_or(1.0 / m as f64, |w| w[t]);
        for j in 0..d {
            if incs[j].is_finite() {
                acc[j].add(w * incs[j]);
            }
        }
        let mut ld = log_abs_det_on_v(&s);
        if ld < LOG_DET_FLOOR {
            ld = LOG_DET_FLOOR;
            floor_hit = true;
        }
        kappa.add(w * ld);
        if trace_every > 0 && (t + 1) % trace_every == 0 {
            let top = state
                .log_r_sums()
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            trace.push(TracePoint {
                step: t + 1,
                lambda1: (top / (t + 1) as f64).exp(),
            });
        }
    }
    let mut exponents: Vec<f64> = (0..d)
        .map(|j| {
            if state.log_r_sums()[j] == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                acc[j].value()
            }
        })
        .collect();
    exponents.sort_by(|a, b| b.total_cmp(a));
    ReplicateResult {
        exponents,
        kappa: kappa.value(),
        floor_hit,
        degenerate: state.is_degenerate(),
        trace,
    }
}

/// Estimate the Lyapunov spectrum of `Q_m` on `V` with default options.
pub fn estimate_lyapunov(
    law: &PaintboxLaw,
    m: usize,
    replicates: usize,
    seed: u64,
) -> Result<LyapunovEstimate> {
    estimate_lyapunov_with(law, m, replicates, seed, &LyapunovOptions::default())
}

pub fn estimate_lyapunov_with(
    law: &PaintboxLaw,
    m: usize,
    replicates: usize,
    seed: u64,
    opts: &LyapunovOptions,
) -> Result<LyapunovEstimate> {
    let k = law.k();
    if k < 2 {
        return Err(Error::invalid("Lyapunov exponents on V need k >= 2"));
    }
    if m == 0 || replicates == 0 {
        return Err(Error::invalid("need m >= 1 and replicates >= 1"));
    }
    let averaging = opts.averaging.unwrap_or(match law {
        PaintboxLaw::PointMass { .. } => Averaging::Weighted,
        _ => Averaging::Uniform,
    });
    let weights = (averaging == Averaging::Weighted).then(|| bump_weights(m));
    let results: Vec<ReplicateResult> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::new(seed, r);
            let every = if r == 0 { opts.trace_every } else { 0 };
            lyapunov_replicate(law, m, &mut rng, weights.as_deref(), every)
        })
        .collect();

    let d = k - 1;
    let rf = replicates as f64;
    let exponents: Vec<f64> = (0..d)
        .map(|j| {
            if results.iter().any(|r| r.exponents[j] == f64::NEG_INFINITY) {
                f64::NEG_INFINITY
            } else {
                results.iter().map(|r| r.exponents[j]).sum::<f64>() / rf
            }
        })
        .collect();
    let spectrum: Vec<f64> = exponents.iter().map(|e| e.exp()).collect();
    let kappas: Vec<f64> = results.iter().map(|r| r.kappa).collect();
    let kappa_hat = kappas.iter().sum::<f64>() / rf;

    let mut flags = Vec::new();
    if exponents[0] == f64::NEG_INFINITY {
        flags.push(FLAG_COLLAPSE.to_string());
    }
    if results.iter().any(|r| r.degenerate) {
        flags.push(FLAG_DEGENERATE.to_string());
    }
    if results.iter().any(|r| r.floor_hit) {
        flags.push(FLAG_LOG_DET_FLOOR.to_string());
    }
    let lambda1 = spectrum[0];
    let std_error = if replicates > 1 && exponents[0].is_finite() {
        let e1: Vec<f64> = results.iter().map(|r| r.exponents[0]).collect();
        Some(lambda1 * sample_sd(&e1) / rf.sqrt())
    } else {
        None
    };
    let kappa_std_error = (replicates > 1).then(|| sample_sd(&kappas) / rf.sqrt());
    Ok(LyapunovEstimate {
        lambda1,
        spectrum,
        exponents,
        kappa_hat,
        m,
        replicates,
        std_error,
        kappa_std_error,
        averaging,
        flags,
        trace: results
            .into_iter()
            .next()
            .map(|r| r.trace)
            .unwrap_or_default(),
    })
}

pub(crate) fn sample_sd(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    if x.len() < 2 {
        return 0.0;
    }
    let mean = x.iter().sum::<f64>() / n;
    (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CollapseVerdict {
    Yes,
    /// Nothing was observed; sampling cannot prove that collapse fails.
    Undetermined,
}

#[derive(Clone, Debug, Serialize)]
pub struct CollapseReport {
    pub m_max: usize,
    pub replicates: usize,
    pub delta: f64,
    /// `contraction_prob[m-1]` estimates `P(top singular value of Q_m on V < 1 - delta)`.
    pub contraction_prob: Vec<f64>,
    /// `positivity_prob[m-1]` estimates `P(all entries of Q_m > 0)`.
    pub positivity_prob: Vec<f64>,
    pub verdict: CollapseVerdict,
}

pub const DEFAULT_DELTA: f64 = 1e-6;
pub const DEFAULT_M_MAX: usize = 32;

/// Look for evidence of simplex collapse along sampled products.
pub fn collapse_diagnostic(
    law: &PaintboxLaw,
    m_max: usize,
    replicates: usize,
    seed: u64,
) -> CollapseReport {
    collapse_diagnostic_with(law, m_max, replicates, seed, DEFAULT_DELTA)
}

pub fn collapse_diagnostic_with(
    law: &PaintboxLaw,
    m_max: usize,
    replicates: usize,
    seed: u64,
    delta: f64,
) -> CollapseReport {
    let sampler = law.sampler();
    let k = law.k();
    let hits: Vec<(Vec<bool>, Vec<bool>)> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::new(seed, r);
            let mut q = StochasticMatrix::identity(k);
            let mut contract = Vec::with_capacity(m_max);
            let mut positive = Vec::with_capacity(m_max);
            for _ in 0..m_max {
                q = sampler.sample(&mut rng).mul(&q);
                contract.push(top_singular_on_v(&q) < 1.0 - delta);
                positive.push(q.data().iter().all(|&x| x > 0.0));
            }
            (contract, positive)
        })
        .collect();
    let rf = replicates.max(1) as f64;
    let frac = |pick: &dyn Fn(&(Vec<bool>, Vec<bool>)) -> bool| {
        hits.iter().filter(|h| pick(h)).count() as f64 / rf
    };
    let contraction_prob: Vec<f64> = (0..m_max).map(|m| frac(&|h| h.0[m])).collect();
    let positivity_prob: Vec<f64> = (0..m_max).map(|m| frac(&|h| h.1[m])).collect();
    let seen = contraction_prob
        .iter()
        .chain(&positivity_prob)
        .any(|&p| p > 0.0);
    CollapseReport {
        m_max,
        replicates,
        delta,
        contraction_prob,
        positivity_prob,
        verdict: if seen {
            CollapseVerdict::Yes
        } else {
            CollapseVerdict::Undetermined
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2() -> StochasticMatrix {
        StochasticMatrix::from_columns(&[vec![0.8, 0.2], vec![0.3, 0.7]]).unwrap()
    }

    #[test]
    fn identity_step_changes_nothing() {
        let mut st = ProductState::new(3);
        let f0 = st.frame().to_vec();
        let inc = st.step(&StochasticMatrix::identity(3)).unwrap();
        assert!(inc.iter().all(|x| x.abs() < 1e-15));
        assert_eq!(st.q(), &StochasticMatrix::identity(3));
        for (a, b) in st.frame().iter().zip(&f0) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn two_by_two_rate_is_trace_minus_one() {
        let mut st = ProductState::new(2);
        for _ in 0..200 {
            st.step(&s2()).unwrap();
        }
        assert!((st.log_r_sums()[0] / 200.0 - 0.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn diameter_and_norm_on_simple_matrices() {
        let id = StochasticMatrix::identity(3);
        assert!((simplex_diameter(&id) - 2f64.sqrt()).abs() < 1e-15);
        assert!((top_singular_on_v(&id) - 1.0).abs() < 1e-12);
        let r1 = StochasticMatrix::rank_one(&[0.2, 0.3, 0.5]).unwrap();
        assert!(simplex_diameter(&r1) < 1e-15);
        assert!(top_singular_on_v(&r1) < 1e-12);
        assert!((top_singular_on_v(&s2()) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rank_one_point_mass_flags_collapse() {
        let law = PaintboxLaw::point_mass(StochasticMatrix::rank_one(&[0.4, 0.6]).unwrap());
        let est = estimate_lyapunov(&law, 50, 2, 1).unwrap();
        assert_eq!(est.lambda1, 0.0);
        assert!(est.flags.iter().any(|f| f == FLAG_COLLAPSE));
        assert!(est.flags.iter().any(|f| f == FLAG_LOG_DET_FLOOR));
    }

    #[test]
    fn permutations_never_contract() {
        let law = PaintboxLaw::permutation_mix(3, None).unwrap();
        let rep = collapse_diagnostic(&law, 8, 50, 3);
        assert_eq!(rep.verdict, CollapseVerdict::Undetermined);
        let law = PaintboxLaw::self_similar(vec![1.0; 3]).unwrap();
        let rep = collapse_diagnostic(&law, 2, 50, 3);
        assert_eq!(rep.verdict, CollapseVerdict::Yes);
        assert_eq!(rep.positivity_prob[0], 1.0);
    }
}
