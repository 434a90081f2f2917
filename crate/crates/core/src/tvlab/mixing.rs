//! Mixing-time search on the pairwise distance over the block design, and
//! the cutoff experiment.
//!
//! `d(m) <= dbar(m) <= 2 d(m)`, so the pairwise distance brackets the
//! distance to stationarity within a factor two in epsilon. Slopes against
//! `log n` are unaffected by that factor.

use serde::{Deserialize, Serialize};

use super::atomic::tv_exact_atomic;
use super::mc::{tv_lower_mc_profile, tv_upper_mc_profile, BlockDesign};
use super::TvEstimate;
use crate::error::{Error, Result};
use crate::paintbox::PaintboxLaw;
use crate::products::{collapse_diagnostic, estimate_lyapunov, CollapseVerdict, DEFAULT_M_MAX};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MixingMethod {
    /// Exact mixtures over all paintbox sequences (atomic laws only).
    ExactAtomic,
    /// Upper and lower Monte Carlo brackets.
    MonteCarlo { replicates: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MixingOptions {
    pub epsilons: Vec<f64>,
    pub method: MixingMethod,
    /// First horizon tried; doubled until every epsilon is certified.
    pub m_start: usize,
    pub m_cap: usize,
    pub seed: u64,
    pub collapse_replicates: usize,
}

impl Default for MixingOptions {
    fn default() -> Self {
        MixingOptions {
            epsilons: vec![0.25, 0.75],
            method: MixingMethod::MonteCarlo { replicates: 10_000 },
            m_start: 16,
            m_cap: 256,
            seed: 0,
            collapse_replicates: 200,
        }
    }
}

/// The bracket on `dbar(m)`; both ends coincide for exact methods.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingPoint {
    pub m: usize,
    pub upper: TvEstimate,
    pub lower: TvEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TmixEntry {
    pub epsilon: f64,
    /// Smallest `m >= 1` with a certified distance below epsilon.
    pub t_mix: Option<usize>,
    /// `t_mix` is at least this: every earlier `m` is certified at or above
    /// epsilon.
    pub lower_end: usize,
    /// Linear interpolation of the epsilon crossing of the certified upper
    /// curve.
    pub crossing: Option<f64>,
    pub inconclusive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingProfile {
    pub n: usize,
    pub k: usize,
    pub x0: String,
    pub x0_tilde: String,
    pub method: MixingMethod,
    pub points: Vec<MixingPoint>,
    pub entries: Vec<TmixEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl MixingProfile {
    pub fn entry(&self, eps: f64) -> Option<&TmixEntry> {
        self.entries
            .iter()
            .find(|e| (e.epsilon - eps).abs() < 1e-12)
    }
}

pub const FLAG_INCONCLUSIVE: &str = "inconclusive at given replicates";

fn entries(points: &[MixingPoint], epsilons: &[f64]) -> Vec<TmixEntry> {
    epsilons
        .iter()
        .map(|&eps| {
            let t_mix = points
                .iter()
                .skip(1)
                .find(|p| p.upper.certified_below(eps))
                .map(|p| p.m);
            let lower_end = points
                .iter()
                .skip(1)
                .take_while(|p| p.lower.certified_at_least(eps))
                .last()
                .map_or(1, |p| p.m + 1);
            let crossing = crossing(points, eps);
            TmixEntry {
                epsilon: eps,
                t_mix,
                lower_end,
                crossing,
                inconclusive: t_mix.is_none(),
            }
        })
        .collect()
}

fn crossing(points: &[MixingPoint], eps: f64) -> Option<f64> {
    let u: Vec<f64> = points
        .iter()
        .map(|p| {
            if p.m == 0 {
                1.0
            } else {
                p.upper.certified_bound()
            }
        })
        .collect();
    let m = (1..u.len()).find(|&m| u[m] < eps)?;
    let (a, b) = (u[m - 1], u[m]);
    Some((m - 1) as f64 + ((a - eps) / (a - b)).clamp(0.0, 1.0))
}

fn all_certified(points: &[MixingPoint], epsilons: &[f64]) -> bool {
    entries(points, epsilons).iter().all(|e| e.t_mix.is_some())
}

/// Profile of the pairwise distance on the block design of size `n`, grown
/// until every epsilon is certified or the horizon cap is reached.
pub fn mixing_profile(law: &PaintboxLaw, n: usize, opts: &MixingOptions) -> Result<MixingProfile> {
    if opts.epsilons.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::invalid("epsilons must lie in (0, 1)"));
    }
    let report = collapse_diagnostic(law, DEFAULT_M_MAX, opts.collapse_replicates, opts.seed);
    if report.verdict != CollapseVerdict::Yes {
        return Err(Error::refused(
            "no simplex collapse observed, so ergodicity is not established",
        ));
    }
    let design = BlockDesign::new(n, law.k())?;
    let (x0, x1) = (&design.x0, &design.x0_tilde);
    let points = match opts.method {
        MixingMethod::ExactAtomic => {
            let mut points = Vec::new();
            let mut m = 0;
            loop {
                let tv = tv_exact_atomic(law, x0, x1, m)?;
                points.push(MixingPoint {
                    m,
                    upper: tv.clone(),
                    lower: tv,
                });
                if (m > 0 && all_certified(&points, &opts.epsilons)) || m >= opts.m_cap {
                    break;
                }
                m += 1;
            }
            points
        }
        MixingMethod::MonteCarlo { replicates } => {
            let mut m_max = opts.m_start.clamp(1, opts.m_cap.max(1));
            loop {
                let up = tv_upper_mc_profile(law, x0, x1, m_max, replicates, opts.seed)?;
                let lo = tv_lower_mc_profile(law, x0, x1, m_max, replicates, opts.seed)?;
                let points: Vec<MixingPoint> = up
                    .into_iter()
                    .zip(lo)
                    .enumerate()
                    .map(|(m, (upper, (lower, _)))| MixingPoint { m, upper, lower })
                    .collect();
                if all_certified(&points, &opts.epsilons) || m_max >= opts.m_cap {
                    break points;
                }
                m_max = (2 * m_max).min(opts.m_cap);
            }
        }
    };
    let entries = entries(&points, &opts.epsilons);
    let mut flags: Vec<String> = points.iter().flat_map(|p| p.upper.flags.clone()).collect();
    flags.sort();
    flags.dedup();
    if entries.iter().any(|e| e.inconclusive) {
        flags.push(FLAG_INCONCLUSIVE.to_string());
    }
    Ok(MixingProfile {
        n,
        k: law.k(),
        x0: x0.to_string(),
        x0_tilde: x1.to_string(),
        method: opts.method,
        points,
        entries,
        flags,
    })
}

/// `t_mix(eps)` for one epsilon.
pub fn mixing_time(
    law: &PaintboxLaw,
    n: usize,
    k: usize,
    eps: f64,
    method: MixingMethod,
    seed: u64,
) -> Result<TmixEntry> {
    if law.k() != k {
        return Err(Error::dim("law and k disagree"));
    }
    let opts = MixingOptions {
        epsilons: vec![eps],
        method,
        seed,
        ..MixingOptions::default()
    };
    Ok(mixing_profile(law, n, &opts)?.entries.remove(0))
}

/// Ordinary least squares `y = intercept + slope x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
    pub points: usize,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::invalid("a line fit needs at least 3 paired points"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("x values are all equal"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let s2 = rss / (n - 2.0);
    Ok(LinearFit {
        slope,
        intercept,
        slope_se: (s2 / sxx).sqrt(),
        intercept_se: (s2 * (1.0 / n + mx * mx / sxx)).sqrt(),
        points: x.len(),
    })
}

/// Least squares `y = b0 + b1 x + b2 x^2`, for testing curvature.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadraticFit {
    pub coef: [f64; 3],
    pub std_error: [f64; 3],
    pub points: usize,
}

pub fn quadratic_fit(x: &[f64], y: &[f64]) -> Result<QuadraticFit> {
    if x.len() != y.len() || x.len() < 4 {
        return Err(Error::invalid(
            "a quadratic fit needs at least 4 paired points",
        ));
    }
    // centre x for conditioning; b2 is unchanged by the shift
    let n = x.len();
    let mx = x.iter().sum::<f64>() / n as f64;
    let rows: Vec<[f64; 3]> = x.iter().map(|&a| [1.0, a - mx, (a - mx).powi(2)]).collect();
    let mut xtx = [0.0; 9];
    let mut xty = [0.0; 3];
    for (r, &yy) in rows.iter().zip(y) {
        for i in 0..3 {
            xty[i] += r[i] * yy;
            for j in 0..3 {
                xtx[i * 3 + j] += r[i] * r[j];
            }
        }
    }
    let inv =
        invert3(&xtx).ok_or_else(|| Error::invalid("degenerate design for a quadratic fit"))?;
    let mut c = [0.0; 3];
    for i in 0..3 {
        c[i] = (0..3).map(|j| inv[i * 3 + j] * xty[j]).sum();
    }
    let rss: f64 = rows
        .iter()
        .zip(y)
        .map(|(r, &yy)| (yy - c[0] - c[1] * r[1] - c[2] * r[2]).powi(2))
        .sum();
    let s2 = rss / (n as f64 - 3.0);
    let se = [
        (s2 * inv[0]).sqrt(),
        (s2 * inv[4]).sqrt(),
        (s2 * inv[8]).sqrt(),
    ];
    // back to the uncentred parametrisation
    let coef = [
        c[0] - c[1] * mx + c[2] * mx * mx,
        c[1] - 2.0 * c[2] * mx,
        c[2],
    ];
    Ok(QuadraticFit {
        coef,
        std_error: se,
        points: n,
    })
}

fn invert3(a: &[f64; 9]) -> Option<[f64; 9]> {
    let det = crate::linalg::det(a, 3);
    if det.abs() < 1e-300 {
        return None;
    }
    let m = |r: usize, c: usize| a[r * 3 + c];
    let mut inv = [0.0; 9];
    for r in 0..3 {
        for c in 0..3 {
            let (r1, r2) = ((c + 1) % 3, (c + 2) % 3);
            let (c1, c2) = ((r + 1) % 3, (r + 2) % 3);
            inv[r * 3 + c] = (m(r1, c1) * m(r2, c2) - m(r1, c2) * m(r2, c1)) / det;
        }
    }
    Some(inv)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CutoffOptions {
    pub n_grid: Vec<usize>,
    pub epsilon: f64,
    pub replicates: usize,
    pub lyapunov_steps: usize,
    pub lyapunov_replicates: usize,
    pub slope_tolerance: f64,
    pub m_cap: usize,
    pub seed: u64,
}

impl Default for CutoffOptions {
    fn default() -> Self {
        CutoffOptions {
            n_grid: (6..=12).map(|e| 1usize << e).collect(),
            epsilon: 0.25,
            replicates: 10_000,
            lyapunov_steps: 10_000,
            lyapunov_replicates: 32,
            slope_tolerance: 0.25,
            m_cap: 256,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutoffRow {
    pub n: usize,
    pub ln_n: f64,
    /// Certified `t_mix(eps)` and `t_mix(1 - eps)`.
    pub t_eps: Option<usize>,
    pub t_one_minus_eps: Option<usize>,
    /// Interpolated crossings used in the fits.
    pub crossing_eps: Option<f64>,
    pub crossing_one_minus_eps: Option<f64>,
    /// `(t(eps) - t(1 - eps)) / ln n` on the crossings.
    pub window_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutoffReport {
    pub k: usize,
    pub law_kind: String,
    pub epsilon: f64,
    pub lambda1_hat: f64,
    pub lambda1_std_error: Option<f64>,
    pub theta_hat: f64,
    pub rows: Vec<CutoffRow>,
    pub fit_eps: Option<LinearFit>,
    pub fit_one_minus_eps: Option<LinearFit>,
    pub slope_ratio_eps: Option<f64>,
    pub slope_ratio_one_minus_eps: Option<f64>,
    pub slopes_within_tolerance: bool,
    pub window_decreasing: bool,
    pub pass: bool,
    pub notes: Vec<String>,
}

/// Fit `t_mix(eps)` and `t_mix(1 - eps)` against `log n` and compare both
/// slopes to `theta = -1 / (2 log lambda1)`. Only laws with a density are
/// accepted.
pub fn cutoff_experiment(law: &PaintboxLaw, opts: &CutoffOptions) -> Result<CutoffReport> {
    if !law.has_density() {
        return Err(Error::refused(format!(
            "the cutoff theorem needs a paintbox law with a density; {} has none",
            law.kind_name()
        )));
    }
    let eps = opts.epsilon;
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::invalid("epsilon must lie in (0, 1/2)"));
    }
    if opts.n_grid.len() < 3 {
        return Err(Error::invalid("n_grid needs at least 3 sizes"));
    }
    let lyap = estimate_lyapunov(
        law,
        opts.lyapunov_steps,
        opts.lyapunov_replicates,
        opts.seed,
    )?;
    let theta_hat = -1.0 / (2.0 * lyap.lambda1.ln());
    let mix = MixingOptions {
        epsilons: vec![eps, 1.0 - eps],
        method: MixingMethod::MonteCarlo {
            replicates: opts.replicates,
        },
        m_start: 16,
        m_cap: opts.m_cap,
        seed: opts.seed,
        ..MixingOptions::default()
    };
    let mut rows = Vec::new();
    let mut notes = vec!["distances are pairwise over the block design, which brackets the distance to stationarity within a factor 2".to_string()];
    for &n in &opts.n_grid {
        let p = mixing_profile(law, n, &mix)?;
        let (a, b) = (p.entry(eps).unwrap(), p.entry(1.0 - eps).unwrap());
        if a.inconclusive || b.inconclusive {
            notes.push(format!("n = {}: {}", n, FLAG_INCONCLUSIVE));
        }
        let ln_n = (n as f64).ln();
        rows.push(CutoffRow {
            n,
            ln_n,
            t_eps: a.t_mix,
            t_one_minus_eps: b.t_mix,
            crossing_eps: a.crossing,
            crossing_one_minus_eps: b.crossing,
            window_ratio: a.crossing.zip(b.crossing).map(|(x, y)| (x - y) / ln_n),
        });
    }
    let fit = |pick: &dyn Fn(&CutoffRow) -> Option<f64>| -> Option<LinearFit> {
        let (x, y): (Vec<f64>, Vec<f64>) = rows
            .iter()
            .filter_map(|r| pick(r).map(|t| (r.ln_n, t)))
            .unzip();
        linear_fit(&x, &y).ok()
    };
    let fit_eps = fit(&|r| r.crossing_eps);
    let fit_one_minus_eps = fit(&|r| r.crossing_one_minus_eps);
    let slope_ratio_eps = fit_eps.map(|f| f.slope / theta_hat);
    let slope_ratio_one_minus_eps = fit_one_minus_eps.map(|f| f.slope / theta_hat);
    let tol = opts.slope_tolerance;
    let within = |r: Option<f64>| r.is_some_and(|r| (r - 1.0).abs() <= tol);
    let slopes_within_tolerance = within(slope_ratio_eps) && within(slope_ratio_one_minus_eps);
    let upper = &rows[rows.len() / 2..];
    let window_decreasing = upper.iter().all(|r| r.window_ratio.is_some())
        && upper
            .windows(2)
            .all(|w| w[1].window_ratio.unwrap() < w[0].window_ratio.unwrap());
    Ok(CutoffReport {
        k: law.k(),
        law_kind: law.kind_name().to_string(),
        epsilon: eps,
        lambda1_hat: lyap.lambda1,
        lambda1_std_error: lyap.std_error,
        theta_hat,
        rows,
        fit_eps,
        fit_one_minus_eps,
        slope_ratio_eps,
        slope_ratio_one_minus_eps,
        slopes_within_tolerance,
        window_decreasing,
        pass: slopes_within_tolerance && window_decreasing,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paintbox::StochasticMatrix;

    #[test]
    fn line_fit_recovers_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 + 0.5 * v).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-12 && (f.intercept - 2.0).abs() < 1e-12);
        assert!(f.slope_se < 1e-12);
    }

    #[test]
    fn quadratic_fit_recovers_curvature() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| 1.0 - v + 0.25 * v * v).collect();
        let f = quadratic_fit(&x, &y).unwrap();
        for (c, e) in f.coef.iter().zip([1.0, -1.0, 0.25]) {
            assert!((c - e).abs() < 1e-9);
        }
    }

    #[test]
    fn point_mass_cutoff_is_refused() {
        let law = PaintboxLaw::point_mass(
            StochasticMatrix::from_columns(&[vec![0.8, 0.2], vec![0.3, 0.7]]).unwrap(),
        );
        assert!(matches!(
            cutoff_experiment(&law, &CutoffOptions::default()),
            Err(Error::Refused(_))
        ));
    }

    #[test]
    fn identity_law_is_refused() {
        let law = PaintboxLaw::point_mass(StochasticMatrix::identity(2));
        let r = mixing_time(&law, 16, 2, 0.25, MixingMethod::ExactAtomic, 1);
        assert!(matches!(r, Err(Error::Refused(_))));
    }

    #[test]
    fn exact_profile_on_rank_one_law() {
        let s = StochasticMatrix::from_columns(&[vec![0.3, 0.7], vec![0.3, 0.7]]).unwrap();
        let law =
            PaintboxLaw::atomic(vec![s, StochasticMatrix::identity(2)], vec![0.5, 0.5]).unwrap();
        // dbar(m) is a little under 0.5^m: the rank-1 mixture component
        // charges both starting states
        let e = mixing_time(&law, 16, 2, 0.2, MixingMethod::ExactAtomic, 1).unwrap();
        assert_eq!(e.t_mix, Some(3));
        assert_eq!(e.lower_end, 3);
    }
}
