//! Exact distances for the Ehrenfest(alpha) chains and the group chain, and
//! the closed-form Ehrenfest bounds.
//!
//! Started from a constant state the law of an Ehrenfest chain is
//! exchangeable, as is its stationary law, so the distance to stationarity
//! equals the distance between the laws of `h`, the number of sites with
//! color 2. One step picks `j ~ Hypergeometric(n, h, a)` of those sites
//! inside the refreshed set and repaints the whole set with one fair coin:
//! `h' = h - j + a` or `h' = h - j`.

use serde::Serialize;

use super::multinomial::ln_factorial;
use super::{tv_exact_product_multinomial, ProductMultinomialLaw, TvEstimate};
use crate::chains::{check_group_weights, EhrenfestParams};
use crate::error::{Error, Result};
use crate::linalg::{solve, KahanSum};

/// Largest `n` handled by the exact weight-chain computation.
pub const MAX_EHRENFEST_N: usize = 2048;

fn ln_choose(n: usize, r: usize) -> f64 {
    ln_factorial(n) - ln_factorial(r) - ln_factorial(n - r)
}

/// `P(j)` for `j` successes when drawing `a` out of `n` with `h` marked.
fn hypergeometric(n: usize, h: usize, a: usize) -> (usize, Vec<f64>) {
    let lo = (a + h).saturating_sub(n);
    let hi = a.min(h);
    let denom = ln_choose(n, a);
    let p = (lo..=hi)
        .map(|j| (ln_choose(h, j) + ln_choose(n - h, a - j) - denom).exp())
        .collect();
    (lo, p)
}

/// One-step law of the unrefreshed count: entry `j` is
/// `P(R_{t+1} = j | R_t = r)` for `j = 0..=r`. The refreshed set meets the
/// `r` unrefreshed sites in a hypergeometric number `r - j` of them, so the
/// mass is `C(r, r-j) C(n-r, a-r+j) / C(n, a)`.
pub fn refresh_transition(n: usize, a: usize, r: usize) -> Result<Vec<f64>> {
    if a == 0 || a > n || r > n {
        return Err(Error::invalid(format!(
            "need 1 <= a <= n and r <= n (n = {}, a = {}, r = {})",
            n, a, r
        )));
    }
    let (lo, p) = hypergeometric(n, r, a);
    let mut out = vec![0.0; r + 1];
    for (i, w) in p.into_iter().enumerate() {
        out[r - (lo + i)] = w;
    }
    Ok(out)
}

/// Sparse rows of the weight chain: `rows[h]` lists `(h', P(h -> h'))`.
fn weight_kernel(n: usize, a: usize) -> Vec<Vec<(usize, f64)>> {
    (0..=n)
        .map(|h| {
            let (lo, p) = hypergeometric(n, h, a);
            let mut row: Vec<(usize, f64)> = Vec::with_capacity(2 * p.len());
            for (i, w) in p.into_iter().enumerate() {
                let j = lo + i;
                row.push((h - j, 0.5 * w));
                row.push((h - j + a, 0.5 * w));
            }
            row
        })
        .collect()
}

fn check_n(params: &EhrenfestParams) -> Result<()> {
    if params.n > MAX_EHRENFEST_N {
        return Err(Error::refused(format!(
            "exact Ehrenfest computation limited to n <= {} (got {})",
            MAX_EHRENFEST_N, params.n
        )));
    }
    Ok(())
}

/// Stationary law of the color-2 count, by solving `pi K = pi`.
pub fn ehrenfest_stationary(params: &EhrenfestParams) -> Result<Vec<f64>> {
    check_n(params)?;
    let n = params.n;
    let a = params.refresh_size();
    if a == 1 {
        // single-site refresh is the lazy hypercube walk
        return Ok((0..=n)
            .map(|h| (ln_choose(n, h) - n as f64 * std::f64::consts::LN_2).exp())
            .collect());
    }
    let d = n + 1;
    let kernel = weight_kernel(n, a);
    // rows of (K^T - I), the last replaced by the normalization
    let mut m = vec![0.0; d * d];
    for (h, row) in kernel.iter().enumerate() {
        for &(g, w) in row {
            m[g * d + h] += w;
        }
        m[h * d + h] -= 1.0;
    }
    let mut b = vec![0.0; d];
    for h in 0..d {
        m[(d - 1) * d + h] = 1.0;
    }
    b[d - 1] = 1.0;
    let pi = solve(&m, &b, d).ok_or_else(|| Error::invalid("singular stationary system"))?;
    let pi: Vec<f64> = pi.into_iter().map(|x| x.max(0.0)).collect();
    let s: f64 = pi.iter().sum();
    Ok(pi.into_iter().map(|x| x / s).collect())
}

/// Exact distance to stationarity from the all-ones state for
/// `t = 0..=t_max`.
pub fn ehrenfest_tv_curve(params: &EhrenfestParams, t_max: usize) -> Result<Vec<TvEstimate>> {
    let pi = ehrenfest_stationary(params)?;
    let n = params.n;
    let kernel = weight_kernel(n, params.refresh_size());
    let mut law = vec![0.0; n + 1];
    law[0] = 1.0;
    let mut out = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        if t > 0 {
            let mut next = vec![0.0; n + 1];
            for (h, row) in kernel.iter().enumerate() {
                if law[h] == 0.0 {
                    continue;
                }
                for &(g, w) in row {
                    next[g] += law[h] * w;
                }
            }
            law = next;
        }
        let s: KahanSum = law.iter().zip(&pi).map(|(p, q)| (p - q).abs()).collect();
        out.push(TvEstimate::exact(0.5 * s.value()));
    }
    Ok(out)
}

/// Exact distance to stationarity at step `t` from the all-ones state.
pub fn ehrenfest_tv_exact(params: &EhrenfestParams, t: usize) -> Result<TvEstimate> {
    Ok(ehrenfest_tv_curve(params, t)?.pop().unwrap())
}

/// `n (1 - a/n)^t`, the coupon-collector upper bound.
pub fn ehrenfest_upper_bound(params: &EhrenfestParams, t: f64) -> f64 {
    let n = params.n as f64;
    n * (1.0 - params.refresh_size() as f64 / n).powf(t)
}

/// `1 - 8 e^{1 - 2 beta}`, valid at [`ehrenfest_lower_time`]`(beta)` when
/// `alpha <= 1/2`.
pub fn ehrenfest_lower_bound(params: &EhrenfestParams, beta: f64) -> Result<f64> {
    if params.alpha > 0.5 {
        return Err(Error::refused(format!(
            "the lower bound holds only for alpha in (0, 1/2] (alpha = {})",
            params.alpha
        )));
    }
    Ok(1.0 - 8.0 * (1.0 - 2.0 * beta).exp())
}

/// `(n / 2a) log n + beta n / a`.
pub fn ehrenfest_upper_time(params: &EhrenfestParams, beta: f64) -> f64 {
    let n = params.n as f64;
    let a = params.refresh_size() as f64;
    n / (2.0 * a) * n.ln() + beta * n / a
}

/// `(n / 2a) log n - beta n / a`.
pub fn ehrenfest_lower_time(params: &EhrenfestParams, beta: f64) -> f64 {
    let n = params.n as f64;
    let a = params.refresh_size() as f64;
    n / (2.0 * a) * n.ln() - beta * n / a
}

/// `(1 + beta) log log n`, the horizon for the log-log schedule.
pub fn log_log_time(n: usize, beta: f64) -> f64 {
    (1.0 + beta) * (n as f64).ln().ln()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EhrenfestBounds {
    pub t: f64,
    pub beta: f64,
    /// Upper bound on the distance at `t`.
    pub upper: f64,
    /// Lower bound on the distance at `lower_time`.
    pub lower: f64,
    pub lower_time: f64,
}

/// Both closed-form bounds; refused for `alpha > 1/2` since the lower bound
/// does not apply there.
pub fn ehrenfest_bounds(params: &EhrenfestParams, t: f64, beta: f64) -> Result<EhrenfestBounds> {
    let lower = ehrenfest_lower_bound(params, beta)?;
    Ok(EhrenfestBounds {
        t,
        beta,
        upper: ehrenfest_upper_bound(params, t),
        lower,
        lower_time: ehrenfest_lower_time(params, beta),
    })
}

/// Distance to the uniform law after `m` steps of the group chain. The
/// increments `X_m - x_0` are i.i.d. with law the `m`-fold cyclic
/// convolution of `lambda`, and the color counts are sufficient.
pub fn group_chain_tv_exact(lambda: &[f64], n: usize, m: usize) -> Result<TvEstimate> {
    check_group_weights(lambda)?;
    let k = lambda.len();
    let mut law = vec![0.0; k];
    law[0] = 1.0;
    for _ in 0..m {
        let mut next = vec![0.0; k];
        for (i, p) in law.iter().enumerate() {
            for (j, l) in lambda.iter().enumerate() {
                next[(i + j) % k] += p * l;
            }
        }
        law = next;
    }
    let p = ProductMultinomialLaw::new(k, vec![(n, law)])?;
    let q = ProductMultinomialLaw::new(k, vec![(n, vec![1.0 / k as f64; k])])?;
    tv_exact_product_multinomial(&p, &q)
}
