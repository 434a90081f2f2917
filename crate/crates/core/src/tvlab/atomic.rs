//! Exact TV for finitely supported paintbox laws by enumerating paintbox
//! sequences and mixing the conditional laws on the refined count statistic.

use super::multinomial::{compositions, ln_multinomial_pmf, num_compositions, refine};
use super::TvEstimate;
use crate::error::{Error, Result};
use crate::linalg::KahanSum;
use crate::paintbox::{PaintboxLaw, StochasticMatrix};
use crate::partitions::{same_shape, Coloring};

/// Default cap on `R^m * (statistic size)`.
pub const DEFAULT_ATOMIC_BUDGET: u128 = 200_000_000;

pub fn tv_exact_atomic(
    law: &PaintboxLaw,
    x0: &Coloring,
    x0_tilde: &Coloring,
    m: usize,
) -> Result<TvEstimate> {
    tv_exact_atomic_with_budget(law, x0, x0_tilde, m, DEFAULT_ATOMIC_BUDGET)
}

/// TV between the laws of `X_m` started from `x0` and `x0_tilde`, both
/// mixtures over all `R^m` paintbox sequences. The per-group count vector is
/// sufficient for both mixtures because they share the grouping.
pub fn tv_exact_atomic_with_budget(
    law: &PaintboxLaw,
    x0: &Coloring,
    x0_tilde: &Coloring,
    m: usize,
    budget: u128,
) -> Result<TvEstimate> {
    same_shape(x0, x0_tilde)?;
    let atoms = law
        .atoms()
        .ok_or_else(|| Error::invalid("tv_exact_atomic needs a finitely supported law"))?;
    if law.k() != x0.k() {
        return Err(Error::dim("law and colorings disagree on k"));
    }
    let k = x0.k();
    let groups = refine(x0, x0_tilde);
    let stat: u128 = groups.iter().map(|g| num_compositions(g.0, k)).product();
    let seqs = (atoms.len() as u128)
        .checked_pow(m as u32)
        .unwrap_or(u128::MAX);
    let required = seqs.saturating_mul(stat);
    if required > budget {
        return Err(Error::Budget { required, budget });
    }
    let comps: Vec<Vec<Vec<usize>>> = groups.iter().map(|g| compositions(g.0, k)).collect();
    let size = stat as usize;
    let mut mix_p = vec![0.0; size];
    let mut mix_q = vec![0.0; size];
    let mut ctx = Ctx {
        atoms: &atoms,
        groups: &groups,
        comps: &comps,
        mix_p: &mut mix_p,
        mix_q: &mut mix_q,
    };
    ctx.walk(m, &StochasticMatrix::identity(k), 1.0);
    let s: KahanSum = mix_p
        .iter()
        .zip(&mix_q)
        .map(|(a, b)| (a - b).abs())
        .collect();
    Ok(TvEstimate::exact(0.5 * s.value()))
}

struct Ctx<'a> {
    atoms: &'a [(StochasticMatrix, f64)],
    groups: &'a [(usize, usize, usize)],
    comps: &'a [Vec<Vec<usize>>],
    mix_p: &'a mut [f64],
    mix_q: &'a mut [f64],
}

impl Ctx<'_> {
    fn walk(&mut self, left: usize, q: &StochasticMatrix, w: f64) {
        if left == 0 {
            self.accumulate(q, w);
            return;
        }
        for (s, ws) in self.atoms {
            self.walk(left - 1, &s.mul(q), w * ws);
        }
    }

    fn accumulate(&mut self, q: &StochasticMatrix, w: f64) {
        let pmfs = |pick_tilde: bool| -> Vec<Vec<f64>> {
            self.groups
                .iter()
                .zip(self.comps)
                .map(|(&(_, c, ct), comps)| {
                    let col = q.column(if pick_tilde { ct } else { c });
                    comps
                        .iter()
                        .map(|cnt| ln_multinomial_pmf(cnt, &col).exp())
                        .collect()
                })
                .collect()
        };
        let outer = |vs: Vec<Vec<f64>>| -> Vec<f64> {
            let mut acc = vec![w];
            for v in vs {
                let mut next = Vec::with_capacity(acc.len() * v.len());
                for a in &acc {
                    for b in &v {
                        next.push(a * b);
                    }
                }
                acc = next;
            }
            acc
        };
        let p = outer(pmfs(false));
        let q = outer(pmfs(true));
        for (dst, v) in self.mix_p.iter_mut().zip(p) {
            *dst += v;
        }
        for (dst, v) in self.mix_q.iter_mut().zip(q) {
            *dst += v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tvlab::tv_exact_conditional;

    #[test]
    fn zero_steps_is_an_indicator() {
        let law = PaintboxLaw::self_similar(vec![1.0, 1.0]);
        assert!(law.is_ok());
        let s = StochasticMatrix::from_columns(&[vec![0.8, 0.2], vec![0.3, 0.7]]).unwrap();
        let law = PaintboxLaw::point_mass(s);
        let a = Coloring::parse("1122", 2).unwrap();
        let b = Coloring::parse("1212", 2).unwrap();
        assert_eq!(tv_exact_atomic(&law, &a, &b, 0).unwrap().value, 1.0);
        assert_eq!(tv_exact_atomic(&law, &a, &a, 0).unwrap().value, 0.0);
    }

    #[test]
    fn single_atom_matches_conditional() {
        let s = StochasticMatrix::from_columns(&[
            vec![0.6, 0.3, 0.1],
            vec![0.2, 0.5, 0.3],
            vec![0.1, 0.1, 0.8],
        ])
        .unwrap();
        let law = PaintboxLaw::point_mass(s.clone());
        let a = Coloring::parse("11223", 3).unwrap();
        let b = Coloring::parse("12313", 3).unwrap();
        for m in 0..4 {
            let ex = tv_exact_atomic(&law, &a, &b, m).unwrap().value;
            let co = tv_exact_conditional(&s.pow(m), &a, &b).unwrap().value;
            assert!((ex - co).abs() < 1e-12, "m={} {} {}", m, ex, co);
        }
    }

    #[test]
    fn budget_refusal_reports_requirement() {
        let s = StochasticMatrix::identity(2);
        let law = PaintboxLaw::atomic(vec![s.clone(), s], vec![0.5, 0.5]).unwrap();
        let a = Coloring::parse("1122", 2).unwrap();
        let err = tv_exact_atomic_with_budget(&law, &a, &a, 10, 1000).unwrap_err();
        assert!(matches!(err, Error::Budget { required, .. } if required == 1024 * 9));
    }
}
