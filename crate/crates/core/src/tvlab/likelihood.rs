//! Likelihood-ratio certificate: with `B = {x : |mu(x)/nu(x) - 1| > eps}`,
//! `nu(B) < eps` implies `TV(mu, nu) < 2 eps`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::KahanSum;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LikelihoodCertificate {
    pub epsilon: f64,
    /// `nu(B_eps)`.
    pub bad_mass: f64,
    /// The certified bound `2 eps`.
    pub bound: f64,
}

/// Try to certify `TV(mu, nu) < 2 eps` for laws on a shared enumerated
/// support. Points with `nu(x) = 0 < mu(x)` count as bad.
pub fn tv_likelihood_bound(
    mu: &[f64],
    nu: &[f64],
    eps: f64,
) -> Result<Option<LikelihoodCertificate>> {
    if mu.len() != nu.len() {
        return Err(Error::dim("laws must share a support"));
    }
    if !(eps > 0.0) {
        return Err(Error::invalid("eps must be positive"));
    }
    if mu.iter().chain(nu).any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::invalid(
            "probabilities must be finite and nonnegative",
        ));
    }
    let mut bad = KahanSum::new();
    for (&p, &q) in mu.iter().zip(nu) {
        let in_b = if q == 0.0 {
            p > 0.0
        } else {
            (p / q - 1.0).abs() > eps
        };
        if in_b {
            bad.add(q);
        }
    }
    let bad_mass = bad.value();
    Ok((bad_mass < eps).then_some(LikelihoodCertificate {
        epsilon: eps,
        bad_mass,
        bound: 2.0 * eps,
    }))
}
