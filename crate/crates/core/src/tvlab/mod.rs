//! Total-variation machinery.
//!
//! Exact distances are computed on sufficient statistics (per-group color
//! counts), which turns `k^n`-sized sums into sums over count vectors.
//! Monte Carlo estimators bracket the distance when exact sums are out of
//! reach: an upper bound from the shared-paintbox coupling and a lower bound
//! from a test event on block counts.

mod atomic;
mod ehrenfest;
mod likelihood;
mod mc;
mod mixing;
mod multinomial;

use serde::Serialize;

pub use atomic::{tv_exact_atomic, tv_exact_atomic_with_budget, DEFAULT_ATOMIC_BUDGET};
pub use ehrenfest::{
    ehrenfest_bounds, ehrenfest_lower_bound, ehrenfest_lower_time, ehrenfest_stationary,
    ehrenfest_tv_curve, ehrenfest_tv_exact, ehrenfest_upper_bound, ehrenfest_upper_time,
    group_chain_tv_exact, log_log_time, refresh_transition, EhrenfestBounds, MAX_EHRENFEST_N,
};
pub use likelihood::{tv_likelihood_bound, LikelihoodCertificate};
pub use mc::{
    tv_lower_mc, tv_lower_mc_profile, tv_upper_mc, tv_upper_mc_profile, BlockDesign, LowerTest,
};
pub use mixing::{
    cutoff_experiment, linear_fit, mixing_profile, mixing_time, quadratic_fit, CutoffOptions,
    CutoffReport, CutoffRow, LinearFit, MixingMethod, MixingOptions, MixingPoint, MixingProfile,
    QuadraticFit, TmixEntry,
};
pub(crate) use multinomial::compositions;
pub use multinomial::{
    binomial_tv, hellinger_upper_bound, ln_factorial, tv_exact_conditional,
    tv_exact_product_multinomial, tv_exact_product_multinomial_with_budget, ProductMultinomialLaw,
    DEFAULT_ENUM_BUDGET,
};

/// What a reported TV number means.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TvKind {
    Exact,
    UpperBound,
    LowerBound,
}

impl TvKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TvKind::Exact => "exact",
            TvKind::UpperBound => "upper_bound",
            TvKind::LowerBound => "lower_bound",
        }
    }
}

/// A total-variation value with its kind and Monte Carlo error.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TvEstimate {
    pub value: f64,
    pub kind: TvKind,
    /// Zero for exact values.
    pub mc_std_error: f64,
    pub replicates: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

/// Number of standard errors a certified claim must clear.
pub const CERTIFY_SIGMAS: f64 = 3.0;

impl TvEstimate {
    pub fn exact(value: f64) -> Self {
        TvEstimate {
            value: value.clamp(0.0, 1.0),
            kind: TvKind::Exact,
            mc_std_error: 0.0,
            replicates: 0,
            flags: vec![],
        }
    }

    /// The value pushed 3 sigma in the conservative direction: up for upper
    /// bounds, down for lower bounds, unchanged for exact values.
    pub fn certified_bound(&self) -> f64 {
        match self.kind {
            TvKind::Exact => self.value,
            TvKind::UpperBound => (self.value + CERTIFY_SIGMAS * self.mc_std_error).min(1.0),
            TvKind::LowerBound => (self.value - CERTIFY_SIGMAS * self.mc_std_error).max(0.0),
        }
    }

    /// True when the distance is certainly below `eps`.
    pub fn certified_below(&self, eps: f64) -> bool {
        matches!(self.kind, TvKind::Exact | TvKind::UpperBound) && self.certified_bound() < eps
    }

    /// True when the distance is certainly at least `eps`.
    pub fn certified_at_least(&self, eps: f64) -> bool {
        matches!(self.kind, TvKind::Exact | TvKind::LowerBound) && self.certified_bound() >= eps
    }
}

/// Mean and standard error of a sample.
pub(crate) fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let s: crate::linalg::KahanSum = xs.iter().copied().collect();
    let mean = s.value() / n;
    let se = if xs.len() > 1 {
        let v: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (v / n).sqrt()
    } else {
        0.0
    };
    (mean, se)
}
