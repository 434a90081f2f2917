//! Projected (unlabeled) chains and the transfer of mixing times.
//!
//! When the paintbox law is row-column exchangeable the kernel satisfies
//! `P(L, L') = P(L, gamma L')` for every relabeling `gamma`, so from step
//! one on the law of `X_m` is label invariant and the projection is a
//! sufficient statistic against the (label invariant) stationary law. The
//! two distances then agree at every `m >= 1`.

use std::collections::HashMap;

use serde::Serialize;

use crate::chains::{exact_kernel, ChainRun, Driver};
use crate::error::{Error, Result};
use crate::linalg::{solve, KahanSum};
use crate::paintbox::{
    is_rce, permutations, rce_orbit_law, PaintboxLaw, StochasticMatrix, MAX_PERMUTATION_K,
};
use crate::partitions::{project, Coloring, UnlabeledPartition, MAX_K};

#[derive(Clone, Debug, Serialize)]
pub struct ProjectedRun {
    pub base: ChainRun,
    pub trajectory: Vec<UnlabeledPartition>,
    /// Whether the projection is known to be Markov.
    pub markov: bool,
    pub note: String,
}

/// Project every stored state. Runs whose driver is not known to be label
/// symmetric are still projected but marked diagnostic only.
pub fn project_run(run: &ChainRun) -> ProjectedRun {
    let (markov, note) = match &run.driver {
        Driver::Paintbox { law } => {
            let r = is_rce(law);
            if r.rce {
                (true, format!("row-column exchangeable: {}", r.certificate))
            } else {
                (
                    false,
                    format!(
                        "diagnostic only, the projection need not be Markov: {}",
                        r.certificate
                    ),
                )
            }
        }
        Driver::Ehrenfest { .. } => (
            true,
            "the fair color coin makes the kernel invariant under the label swap".into(),
        ),
        Driver::Group { lambda } if lambda.len() <= 2 => (
            true,
            "for k = 2 the label swap is a group translation".into(),
        ),
        Driver::Group { .. } => (
            false,
            "diagnostic only: the group chain is not row-column exchangeable".into(),
        ),
        Driver::Injected => (
            false,
            "diagnostic only: an injected paintbox sequence cannot be checked".into(),
        ),
    };
    ProjectedRun {
        base: run.clone(),
        trajectory: run.trajectory.iter().map(project).collect(),
        markov,
        note,
    }
}

/// `k (k-1) ... (k-r+1)`, the number of ways to label `r` blocks.
pub fn falling_factorial(k: usize, r: usize) -> f64 {
    (0..r).map(|i| k.saturating_sub(i) as f64).product()
}

/// The projected state space of `[k]^n` with the projection of every
/// labeled index.
struct Lumping {
    states: Vec<UnlabeledPartition>,
    class_of: Vec<usize>,
    reps: Vec<usize>,
}

fn lumping(n: usize, k: usize, labeled: usize) -> Lumping {
    let mut index: HashMap<UnlabeledPartition, usize> = HashMap::new();
    let mut states = Vec::new();
    let mut class_of = Vec::with_capacity(labeled);
    for x in 0..labeled {
        let y = project(&Coloring::from_index(x, n, k));
        let next = states.len();
        let id = *index.entry(y.clone()).or_insert_with(|| {
            states.push(y);
            next
        });
        class_of.push(id);
    }
    let reps = states
        .iter()
        .map(|y| y.representative(k).expect("at most k blocks").index())
        .collect();
    Lumping {
        states,
        class_of,
        reps,
    }
}

/// Projected kernel `Q(y, y') = k^{(#y')} P(rep y, rep y')`, and the same
/// kernel summed over preimages as a check. Row-major, `|Y| x |Y|`.
fn projected_kernels(p: &[f64], lump: &Lumping, k: usize) -> (Vec<f64>, Vec<f64>) {
    let labeled = lump.class_of.len();
    let d = lump.states.len();
    let mut formula = vec![0.0; d * d];
    let mut summed = vec![0.0; d * d];
    for (a, &ra) in lump.reps.iter().enumerate() {
        for (b, (yb, &rb)) in lump.states.iter().zip(&lump.reps).enumerate() {
            formula[a * d + b] = falling_factorial(k, yb.num_blocks()) * p[ra * labeled + rb];
        }
        for x in 0..labeled {
            summed[a * d + lump.class_of[x]] += p[ra * labeled + x];
        }
    }
    (formula, summed)
}

fn stationary(p: &[f64], d: usize) -> Result<Vec<f64>> {
    let mut m = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            m[j * d + i] = p[i * d + j];
        }
        m[i * d + i] -= 1.0;
    }
    for j in 0..d {
        m[(d - 1) * d + j] = 1.0;
    }
    let mut b = vec![0.0; d];
    b[d - 1] = 1.0;
    let pi = solve(&m, &b, d)
        .ok_or_else(|| Error::refused("no unique stationary law: the chain is not ergodic"))?;
    if pi.iter().any(|&x| x < -1e-9) {
        return Err(Error::refused(
            "no unique stationary law: the chain is not ergodic",
        ));
    }
    Ok(pi)
}

fn tv(a: &[f64], b: &[f64]) -> f64 {
    let s: KahanSum = a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect();
    (0.5 * s.value()).clamp(0.0, 1.0)
}

fn step(v: &[f64], p: &[f64], d: usize) -> Vec<f64> {
    let mut out = vec![0.0; d];
    for (i, &w) in v.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let row = &p[i * d..(i + 1) * d];
        for (o, &q) in out.iter_mut().zip(row) {
            *o += w * q;
        }
    }
    out
}

/// `max_x TV(P^m(x, .), pi)` for `m = 0..=m_max`, the max over the given
/// starts.
fn distance_profile(p: &[f64], pi: &[f64], starts: &[usize], m_max: usize) -> Vec<f64> {
    let d = pi.len();
    let mut best = vec![0.0f64; m_max + 1];
    for &x in starts {
        let mut v = vec![0.0; d];
        v[x] = 1.0;
        let mut cur = 1.0;
        for (m, b) in best.iter_mut().enumerate() {
            // the distance to stationarity never increases, so once it is
            // negligible the remaining steps are skipped
            if cur > 1e-15 {
                if m > 0 {
                    v = step(&v, p, d);
                }
                cur = tv(&v, pi);
            }
            *b = b.max(cur);
        }
    }
    best
}

/// Sorted words `0^{c_0} 1^{c_1} ...`: one start per orbit of the site
/// permutations, which commute with an exchangeable kernel.
fn labeled_starts(n: usize, k: usize) -> Vec<usize> {
    crate::tvlab::compositions(n, k)
        .into_iter()
        .map(|c| {
            let word: Vec<u8> = c
                .iter()
                .enumerate()
                .flat_map(|(col, &cnt)| std::iter::repeat_n(col as u8, cnt))
                .collect();
            Coloring::new(k, word).expect("valid colors").index()
        })
        .collect()
}

/// Integer partitions of `n` into at most `k` parts, as consecutive blocks.
fn projected_starts(n: usize, k: usize, lump: &Lumping) -> Vec<usize> {
    fn rec(left: usize, max: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        if parts == 0 {
            return;
        }
        for p in (1..=max.min(left)).rev() {
            cur.push(p);
            rec(left - p, p, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut parts = Vec::new();
    rec(n, n, k, &mut Vec::new(), &mut parts);
    parts
        .into_iter()
        .map(|sizes| {
            let word: Vec<u8> = sizes
                .iter()
                .enumerate()
                .flat_map(|(b, &s)| std::iter::repeat_n(b as u8, s))
                .collect();
            let y = project(&Coloring::new(k, word).expect("at most k blocks"));
            lump.states
                .iter()
                .position(|s| *s == y)
                .expect("every partition is a state")
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectedTmix {
    pub epsilon: f64,
    pub t_labeled: Option<usize>,
    pub t_projected: Option<usize>,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectionReport {
    pub n: usize,
    pub k: usize,
    pub labeled_states: usize,
    pub projected_states: usize,
    /// Largest gap between the falling-factorial kernel and the kernel
    /// summed over preimages.
    pub kernel_identity_error: f64,
    /// Largest gap between the pushforward of the labeled stationary law and
    /// the stationary law of the projected kernel.
    pub stationary_error: f64,
    pub labeled_profile: Vec<f64>,
    pub projected_profile: Vec<f64>,
    /// Projected distance never exceeds the labeled one.
    pub contraction_holds: bool,
    pub entries: Vec<ProjectedTmix>,
    pub pass: bool,
}

fn first_below(profile: &[f64], eps: f64) -> Option<usize> {
    (1..profile.len()).find(|&m| profile[m] < eps)
}

pub const DEFAULT_PROJECTION_HORIZON: usize = 200;

/// Exact labeled and projected distance profiles for a row-column
/// exchangeable finite law, and the epsilon mixing times of both.
pub fn projected_mixing_equivalence(
    law: &PaintboxLaw,
    n: usize,
    k: usize,
    epsilons: &[f64],
) -> Result<ProjectionReport> {
    projected_mixing_equivalence_with(law, n, k, epsilons, DEFAULT_PROJECTION_HORIZON)
}

pub fn projected_mixing_equivalence_with(
    law: &PaintboxLaw,
    n: usize,
    k: usize,
    epsilons: &[f64],
    m_max: usize,
) -> Result<ProjectionReport> {
    if law.k() != k {
        return Err(Error::dim("law and k disagree"));
    }
    let r = is_rce(law);
    if !r.rce {
        return Err(Error::refused(format!(
            "the law is not row-column exchangeable: {}",
            r.certificate
        )));
    }
    if law.atoms().is_none() {
        return Err(Error::invalid(
            "exact profiles need a finitely supported law",
        ));
    }
    let p = exact_kernel(law, n)?;
    let labeled = p.len().isqrt();
    let lump = lumping(n, k, labeled);
    let d = lump.states.len();
    let (q, q_summed) = projected_kernels(&p, &lump, k);
    let kernel_identity_error = q
        .iter()
        .zip(&q_summed)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let pi_x = stationary(&p, labeled)?;
    let mut pi_y = vec![0.0; d];
    for (x, &w) in pi_x.iter().enumerate() {
        pi_y[lump.class_of[x]] += w;
    }
    let pi_y_direct = stationary(&q, d)?;
    let stationary_error = pi_y
        .iter()
        .zip(&pi_y_direct)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let labeled_profile = distance_profile(&p, &pi_x, &labeled_starts(n, k), m_max);
    let projected_profile = distance_profile(&q, &pi_y, &projected_starts(n, k, &lump), m_max);
    let contraction_holds = labeled_profile
        .iter()
        .zip(&projected_profile)
        .all(|(a, b)| *b <= a + 1e-12);
    let entries: Vec<ProjectedTmix> = epsilons
        .iter()
        .map(|&eps| {
            let t_labeled = first_below(&labeled_profile, eps);
            let t_projected = first_below(&projected_profile, eps);
            ProjectedTmix {
                epsilon: eps,
                t_labeled,
                t_projected,
                equal: t_labeled == t_projected,
            }
        })
        .collect();
    let pass = entries.iter().all(|e| e.equal && e.t_labeled.is_some());
    Ok(ProjectionReport {
        n,
        k,
        labeled_states: labeled,
        projected_states: d,
        kernel_identity_error,
        stationary_error,
        labeled_profile,
        projected_profile,
        contraction_holds,
        entries,
        pass,
    })
}

/// A row-column exchangeable finite law with the chain size to test it at.
#[derive(Clone, Debug, Serialize)]
pub struct RceInstance {
    pub name: String,
    pub law: PaintboxLaw,
    pub n: usize,
}

fn perm_mix_with_uniform(k: usize, c: f64) -> Result<PaintboxLaw> {
    let perms = permutations(k);
    let w = (1.0 - c) / perms.len() as f64;
    let mut atoms: Vec<StochasticMatrix> = perms
        .iter()
        .map(|p| StochasticMatrix::permutation(p))
        .collect();
    let mut weights = vec![w; atoms.len()];
    atoms.push(StochasticMatrix::rank_one(&vec![1.0 / k as f64; k])?);
    weights.push(c);
    PaintboxLaw::atomic(atoms, weights)
}

/// Row-column exchangeable atomic laws with every `n >= 1` such that
/// `k^n <= max_states`:
///
/// * `k = 2..4`: orbits of a generic positive matrix, of a matrix with a zero
///   entry, and of a rank-one matrix with unequal entries;
/// * `k = 2..8`: uniform permutations mixed with `J/k`;
/// * `k = 9..16`: the point mass at `J/k`.
pub fn rce_atomic_instances(max_states: usize) -> Result<Vec<RceInstance>> {
    let mut laws: Vec<(String, PaintboxLaw)> = Vec::new();
    for k in 2..=4usize {
        let generic: Vec<Vec<f64>> = (0..k)
            .map(|c| {
                normalize(
                    &(0..k)
                        .map(|r| 1.0 + ((r + 2 * c) % k) as f64 + if r == c { 0.5 } else { 0.0 })
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        let sparse: Vec<Vec<f64>> = (0..k)
            .map(|c| {
                normalize(
                    &(0..k)
                        .map(|r| {
                            if r == 0 && c == 0 {
                                0.0
                            } else {
                                1.0 + r as f64
                            }
                        })
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        let ramp: Vec<f64> = (0..k).map(|r| 1.0 + r as f64).collect();
        laws.push((
            format!("orbit of a positive matrix, k = {}", k),
            rce_orbit_law(&StochasticMatrix::from_columns(&generic)?)?,
        ));
        laws.push((
            format!("orbit of a matrix with a zero, k = {}", k),
            rce_orbit_law(&StochasticMatrix::from_columns(&sparse)?)?,
        ));
        laws.push((
            format!("orbit of a rank-one matrix, k = {}", k),
            rce_orbit_law(&StochasticMatrix::rank_one(&normalize(&ramp))?)?,
        ));
    }
    for k in 2..=MAX_PERMUTATION_K {
        laws.push((
            format!("permutations mixed with J/k, k = {}", k),
            perm_mix_with_uniform(k, 0.3)?,
        ));
    }
    for k in MAX_PERMUTATION_K + 1..=MAX_K {
        laws.push((
            format!("point mass at J/k, k = {}", k),
            PaintboxLaw::point_mass(StochasticMatrix::rank_one(&vec![1.0 / k as f64; k])?),
        ));
    }
    let mut out = Vec::new();
    for (name, law) in laws {
        let k = law.k();
        let mut states = k;
        let mut n = 1;
        while states <= max_states {
            out.push(RceInstance {
                name: name.clone(),
                law: law.clone(),
                n,
            });
            n += 1;
            states = states.saturating_mul(k);
        }
    }
    Ok(out)
}

fn normalize(v: &[f64]) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.iter().map(|x| x / s).collect()
}
