//! One PASS/FAIL line per acceptance criterion. Every check uses the
//! tolerance stated for it; a FAIL line is followed by a failing assert.

mod common;

use std::time::Instant;

use common::*;
use efcp::chains::EhrenfestParams;
use efcp::paintbox::sample_s;
use efcp::products::{estimate_lyapunov, ProductState};
use efcp::projections::{projected_mixing_equivalence, rce_atomic_instances};
use efcp::tvlab::{
    binomial_tv, cutoff_experiment, ehrenfest_tv_curve, ehrenfest_upper_bound,
    ehrenfest_upper_time, mixing_profile, quadratic_fit, tv_exact_atomic,
    tv_exact_product_multinomial, CutoffOptions, MixingMethod, MixingOptions,
    ProductMultinomialLaw,
};
use efcp::{Coloring, PaintboxLaw, PartitionMatrix, RngStream, StochasticMatrix};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn verdict(id: usize, ok: bool, detail: String) {
    report(&format!(
        "criterion {id}: {} {detail}",
        if ok { "PASS" } else { "FAIL" }
    ));
    assert!(ok, "criterion {id}: {detail}");
}

// -- 1 ---------------------------------------------------------------------

/// Kernels `K_a(x, y) = P(M x = y)` for each atom, summing over every
/// partition matrix weighted by its product-multinomial probability.
fn matrix_kernels(atoms: &[(StochasticMatrix, f64)], n: usize, k: usize) -> Vec<Vec<f64>> {
    let cols = all_words(n, k);
    let ncol = cols.len();
    let states = ncol;
    let total = ncol.pow(k as u32);
    let na = atoms.len();
    (0..total)
        .into_par_iter()
        .fold(
            || vec![vec![0.0; states * states]; na],
            |mut acc, code| {
                let mut c = code;
                let chosen: Vec<&Vec<usize>> = (0..k)
                    .map(|_| {
                        let w = &cols[c % ncol];
                        c /= ncol;
                        w
                    })
                    .collect();
                let probs: Vec<f64> = atoms
                    .iter()
                    .map(|(s, _)| {
                        let mut p = 1.0;
                        for (j, col) in chosen.iter().enumerate() {
                            for &r in col.iter() {
                                p *= s.get(r, j);
                            }
                        }
                        p
                    })
                    .collect();
                if probs.iter().all(|&p| p == 0.0) {
                    return acc;
                }
                let colorings: Vec<Coloring> = chosen.iter().map(|w| coloring(k, w)).collect();
                let m = PartitionMatrix::from_columns(&colorings).unwrap();
                for (xi, x) in cols.iter().enumerate() {
                    let y = m.act(&coloring(k, x)).unwrap().index();
                    for a in 0..na {
                        acc[a][xi * states + y] += probs[a];
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![vec![0.0; states * states]; na],
            |mut a, b| {
                for (u, v) in a.iter_mut().zip(b) {
                    for (p, q) in u.iter_mut().zip(v) {
                        *p += q;
                    }
                }
                a
            },
        )
}

#[test]
fn criterion_01_construction_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for k in 2..=3 {
        for n in 1..=4 {
            let atoms = [
                (random_stochastic(k, 0.0, &mut rng), 0.0),
                (random_stochastic(k, 0.0, &mut rng), 0.0),
            ];
            let w: f64 = rng.random_range(0.1..0.9);
            let atoms = vec![(atoms[0].0.clone(), w), (atoms[1].0.clone(), 1.0 - w)];
            let kernels = matrix_kernels(&atoms, n, k);
            let states = k.pow(n as u32);
            let mixed: Vec<f64> = (0..states * states)
                .map(|i| atoms[0].1 * kernels[0][i] + atoms[1].1 * kernels[1][i])
                .collect();
            for (xi, x0) in all_words(n, k).iter().enumerate() {
                let mut row: Vec<f64> = (0..states)
                    .map(|y| if y == xi { 1.0 } else { 0.0 })
                    .collect();
                for m in 1..=3 {
                    let next: Vec<f64> = (0..states)
                        .map(|y| (0..states).map(|x| row[x] * mixed[x * states + y]).sum())
                        .collect();
                    row = next;
                    let oracle = joint_law(&atoms, x0, k, m);
                    let err = row
                        .iter()
                        .zip(&oracle)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    worst = worst.max(err);
                    cases += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = worst <= 1e-12 && secs < 10.0;
    verdict(
        1,
        ok,
        format!("{cases} (x0, m) cases, max abs error {worst:.2e}, {secs:.1} s"),
    );
}

// -- 2 ---------------------------------------------------------------------

fn check_triple(
    a: &SetMatrix,
    b: &SetMatrix,
    c: &SetMatrix,
    x: &[usize],
    n: usize,
    k: usize,
) -> Result<(), String> {
    let (la, lb, lc) = (to_library(a, n), to_library(b, n), to_library(c, n));
    if from_library(&la) != *a {
        return Err("round trip".into());
    }
    let ab = la.matmul(&lb).unwrap();
    if from_library(&ab) != set_matmul(a, b) {
        return Err("product differs from set oracle".into());
    }
    let left = ab.matmul(&lc).unwrap();
    let right = la.matmul(&lb.matmul(&lc).unwrap()).unwrap();
    if left != right {
        return Err("associativity".into());
    }
    let id = PartitionMatrix::identity(n, k);
    if la.matmul(&id).unwrap() != la || id.matmul(&la).unwrap() != la {
        return Err("identity".into());
    }
    let xc = coloring(k, x);
    if id.act(&xc).unwrap() != xc {
        return Err("identity action".into());
    }
    let lhs = ab.act(&xc).unwrap();
    let rhs = la.act(&lb.act(&xc).unwrap()).unwrap();
    if lhs != rhs || word(&lhs) != set_act(&set_matmul(a, b), x) {
        return Err("action compatibility".into());
    }
    if word(&la.act(&xc).unwrap()) != set_act(a, x) {
        return Err("action differs from set oracle".into());
    }
    Ok(())
}

#[test]
fn criterion_02_monoid_and_action() {
    let mut failures = Vec::new();
    let mut checked = 0;
    let (n, k) = (2, 2);
    let words = all_words(n, k);
    let mats: Vec<SetMatrix> = words
        .iter()
        .flat_map(|c0| {
            words
                .iter()
                .map(move |c1| set_matrix_from_columns(&[c0.clone(), c1.clone()], n))
        })
        .collect();
    for a in &mats {
        for b in &mats {
            for c in &mats {
                for x in &words {
                    checked += 1;
                    if let Err(e) = check_triple(a, b, c, x, n, k) {
                        failures.push(e);
                    }
                }
            }
        }
    }
    let exhaustive = checked;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10_000 {
        let n = rng.random_range(1..=8);
        let k = rng.random_range(1..=4);
        let draw = |rng: &mut ChaCha8Rng| {
            let cols: Vec<Vec<usize>> = (0..k).map(|_| random_word(n, k, rng)).collect();
            set_matrix_from_columns(&cols, n)
        };
        let (a, b, c) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
        let x = random_word(n, k, &mut rng);
        if let Err(e) = check_triple(&a, &b, &c, &x, n, k) {
            failures.push(e);
        }
    }
    verdict(
        2,
        failures.is_empty(),
        format!(
            "{exhaustive} exhaustive + 10000 random instances, {} failures {:?}",
            failures.len(),
            failures.first()
        ),
    );
}

// -- 3 ---------------------------------------------------------------------

fn brute_product_law(k: usize, blocks: &[(usize, Vec<f64>)]) -> Vec<f64> {
    let n: usize = blocks.iter().map(|b| b.0).sum();
    let owner: Vec<usize> = blocks
        .iter()
        .enumerate()
        .flat_map(|(b, (size, _))| std::iter::repeat_n(b, *size))
        .collect();
    all_words(n, k)
        .iter()
        .map(|y| (0..n).map(|i| blocks[owner[i]].1[y[i]]).product())
        .collect()
}

fn split_sizes<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    let parts = rng.random_range(1..=3.min(n));
    let mut cuts: Vec<usize> = (0..parts - 1).map(|_| rng.random_range(1..n)).collect();
    cuts.sort();
    cuts.dedup();
    let mut sizes = Vec::new();
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(n)) {
        sizes.push(c - prev);
        prev = c;
    }
    sizes
}

#[test]
fn criterion_03_tv_oracles() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for k in 2..=16usize {
        let mut n = 1;
        while k.pow(n as u32) <= 4096 {
            for _rep in 0..3 {
                let sizes = split_sizes(n, &mut rng);
                let p_blocks: Vec<(usize, Vec<f64>)> = sizes
                    .iter()
                    .map(|&s| (s, random_simplex(k, &mut rng)))
                    .collect();
                let mut q_blocks: Vec<(usize, Vec<f64>)> = sizes
                    .iter()
                    .map(|&s| (s, random_simplex(k, &mut rng)))
                    .collect();
                if rng.random_bool(0.3) {
                    q_blocks[0].1 = p_blocks[0].1.clone();
                }
                let p = ProductMultinomialLaw::new(k, p_blocks.clone()).unwrap();
                let q = ProductMultinomialLaw::new(k, q_blocks.clone()).unwrap();
                let got = tv_exact_product_multinomial(&p, &q).unwrap().value;
                let oracle = tv(
                    &brute_product_law(k, &p_blocks),
                    &brute_product_law(k, &q_blocks),
                );
                worst = worst.max((got - oracle).abs());

                let atoms = vec![
                    (random_stochastic(k, 0.0, &mut rng), 0.4),
                    (random_stochastic(k, 0.0, &mut rng), 0.6),
                ];
                let law = PaintboxLaw::atomic(
                    atoms.iter().map(|a| a.0.clone()).collect(),
                    vec![0.4, 0.6],
                )
                .unwrap();
                let x0 = random_word(n, k, &mut rng);
                let x1 = random_word(n, k, &mut rng);
                for m in 0..=2 {
                    let got = tv_exact_atomic(&law, &coloring(k, &x0), &coloring(k, &x1), m)
                        .unwrap()
                        .value;
                    let oracle = tv(&joint_law(&atoms, &x0, k, m), &joint_law(&atoms, &x1, k, m));
                    worst = worst.max((got - oracle).abs());
                }
                cases += 1;
            }
            n += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        3,
        worst <= 1e-10 && secs < 60.0,
        format!("{cases} instances, max abs error {worst:.2e}, {secs:.1} s"),
    );
}

// -- 4 ---------------------------------------------------------------------

fn second_modulus(s: &StochasticMatrix) -> f64 {
    let k = s.k();
    let m = DMatrix::from_fn(k, k, |r, c| s.get(r, c));
    let mut mods: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    mods.sort_by(|a, b| b.partial_cmp(a).unwrap());
    mods[1]
}

#[test]
fn criterion_04_lyapunov_point_masses() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    for i in 0..20 {
        let k = 2 + i % 3;
        let s = random_stochastic(k, 0.0, &mut rng);
        let est =
            estimate_lyapunov(&PaintboxLaw::point_mass(s.clone()), 10_000, 1, i as u64).unwrap();
        worst = worst.max((est.lambda1 - second_modulus(&s)).abs());
        if k == 2 {
            let trace = s.get(0, 0) + s.get(1, 1);
            worst_trace = worst_trace.max((est.lambda1 - (trace - 1.0).abs()).abs());
        }
    }
    verdict(
        4,
        worst <= 1e-6 && worst_trace <= 1e-6,
        format!(
            "20 matrices, max error vs eigenvalues {worst:.2e}, vs |trace - 1| {worst_trace:.2e}"
        ),
    );
}

// -- 5 ---------------------------------------------------------------------

/// `log |det S|_V|` in the basis `e_i - e_k` of the zero-sum subspace.
fn log_det_on_v(s: &StochasticMatrix) -> f64 {
    let k = s.k();
    let b = DMatrix::from_fn(k, k - 1, |r, c| {
        if r == c {
            1.0
        } else if r == k - 1 {
            -1.0
        } else {
            0.0
        }
    });
    let sm = DMatrix::from_fn(k, k, |r, c| s.get(r, c));
    let bt = b.transpose();
    let coords = (&bt * &b).try_inverse().unwrap() * bt * sm * b;
    coords.determinant().abs().ln()
}

#[test]
fn criterion_05_spectrum_determinant() {
    let law = PaintboxLaw::self_similar(vec![1.0, 1.0, 1.0]).unwrap();
    let mut worst: f64 = 0.0;
    for path in 0..100 {
        let mut rng = RngStream::new(5, path);
        let mut state = ProductState::new(3);
        let mut oracle = 0.0;
        for _ in 0..50 {
            let s = sample_s(&law, &mut rng);
            oracle += log_det_on_v(&s);
            state.step(&s).unwrap();
        }
        let sum: f64 = state.log_r_sums().iter().sum();
        worst = worst.max((sum - oracle).abs() / oracle.abs().max(1.0));
    }
    verdict(
        5,
        worst <= 1e-8,
        format!("100 paths, k = 3, m = 50, max relative error {worst:.2e}"),
    );
}

// -- 6, 7 ------------------------------------------------------------------

#[test]
fn criterion_06_ehrenfest_bounds() {
    let start = Instant::now();
    let mut ok = true;
    let mut details = Vec::new();
    for &n in &[64usize, 256] {
        for &alpha in &[1.0 / 16.0, 0.25] {
            let params = EhrenfestParams::general(n, alpha).unwrap();
            let t_max = ehrenfest_upper_time(&params, 3.0).ceil() as usize;
            let curve = ehrenfest_tv_curve(&params, t_max).unwrap();
            let coupling = curve
                .iter()
                .enumerate()
                .all(|(t, e)| e.value < ehrenfest_upper_bound(&params, t as f64));
            let mut parts = vec![format!(
                "coupling {}",
                if coupling { "ok" } else { "violated" }
            )];
            ok &= coupling;
            for beta in [1.0, 2.0, 3.0] {
                let t = ehrenfest_upper_time(&params, beta).ceil() as usize;
                let target = (n as f64).powf(-0.5) * (-beta).exp();
                let value = curve[t].value;
                ok &= value < target;
                parts.push(format!(
                    "b={beta}: {value:.4}{}{target:.4}",
                    if value < target { "<" } else { ">=" }
                ));
            }
            details.push(format!(
                "[n={n} a={} {}]",
                params.refresh_size(),
                parts.join(", ")
            ));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 120.0;
    verdict(6, ok, format!("{} {secs:.1} s", details.join(" ")));
}

#[test]
fn criterion_07_standard_ehrenfest_bracket() {
    let start = Instant::now();
    let n = 512;
    let params = EhrenfestParams::standard(n).unwrap();
    let scale = n as f64 * (n as f64).ln();
    let (t_lo, t_hi) = ((0.4 * scale).ceil() as usize, (0.6 * scale).ceil() as usize);
    let curve = ehrenfest_tv_curve(&params, t_hi).unwrap();
    let (early, late) = (curve[t_lo].value, curve[t_hi].value);
    let secs = start.elapsed().as_secs_f64();
    let ok = early > 0.9 && late < 0.1 && secs < 120.0;
    verdict(7, ok, format!("TV({t_lo}) = {early:.4} (need > 0.9), TV({t_hi}) = {late:.4} (need < 0.1), {secs:.1} s"));
}

// -- 8, 9, 10 --------------------------------------------------------------

#[test]
fn criterion_08_cutoff_slope() {
    let start = Instant::now();
    let law = PaintboxLaw::self_similar(vec![1.0, 1.0]).unwrap();
    let rep = cutoff_experiment(&law, &CutoffOptions::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let windows: Vec<String> = rep
        .rows
        .iter()
        .map(|r| format!("{:.3}", r.window_ratio.unwrap_or(f64::NAN)))
        .collect();
    verdict(
        8,
        rep.pass && secs < 1800.0,
        format!(
            "lambda1 = {:.4}, theta = {:.4}, slope ratios {:?} / {:?}, windows [{}], {secs:.0} s",
            rep.lambda1_hat,
            rep.theta_hat,
            rep.slope_ratio_eps,
            rep.slope_ratio_one_minus_eps,
            windows.join(", ")
        ),
    );
}

fn mc_options(seed: u64) -> MixingOptions {
    MixingOptions {
        epsilons: vec![0.25],
        method: MixingMethod::MonteCarlo { replicates: 10_000 },
        seed,
        ..MixingOptions::default()
    }
}

#[test]
fn criterion_09_log_n_scaling() {
    let start = Instant::now();
    let a = StochasticMatrix::from_columns(&[vec![0.8, 0.2], vec![0.3, 0.7]]).unwrap();
    let b = StochasticMatrix::from_columns(&[vec![0.5, 0.5], vec![0.7, 0.3]]).unwrap();
    let law = PaintboxLaw::atomic(vec![a, b], vec![0.5, 0.5]).unwrap();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut certified = true;
    let mut times = Vec::new();
    for e in 6..=12 {
        let n = 1usize << e;
        let prof = mixing_profile(&law, n, &mc_options(9)).unwrap();
        let entry = prof.entry(0.25).unwrap();
        certified &= entry.t_mix.is_some();
        times.push(format!("{}:{:?}", n, entry.t_mix));
        if let Some(c) = entry.crossing {
            xs.push((n as f64).ln());
            ys.push(c);
        }
    }
    let fit = quadratic_fit(&xs, &ys).unwrap();
    let (b2, se) = (fit.coef[2], fit.std_error[2]);
    let flat = b2.abs() <= 2.776 * se;
    let secs = start.elapsed().as_secs_f64();
    verdict(
        9,
        certified && flat && secs < 600.0,
        format!(
            "t_mix(0.25) [{}], quadratic term {b2:.4} (se {se:.4}), {secs:.0} s",
            times.join(" ")
        ),
    );
}

#[test]
fn criterion_10_rank_one_constant() {
    let rank1 = StochasticMatrix::rank_one(&[0.3, 0.7]).unwrap();
    let law =
        PaintboxLaw::atomic(vec![rank1, StochasticMatrix::identity(2)], vec![0.5, 0.5]).unwrap();
    let mut ts = Vec::new();
    for e in 4..=10 {
        let n = 1usize << e;
        let prof = mixing_profile(&law, n, &mc_options(10)).unwrap();
        ts.push(prof.entry(0.25).unwrap().t_mix);
    }
    let ok = ts[0].is_some() && ts.iter().all(|t| *t == ts[0]);
    verdict(10, ok, format!("t_mix(0.25) over n = 2^4..2^10: {ts:?}"));
}

// -- 11 --------------------------------------------------------------------

#[test]
fn criterion_11_projection_equivalence() {
    let start = Instant::now();
    let instances = rce_atomic_instances(1024).unwrap();
    let results: Vec<(String, bool)> = instances
        .par_iter()
        .map(|inst| {
            let k = inst.law.k();
            let ok = match projected_mixing_equivalence(&inst.law, inst.n, k, &[0.5, 0.25]) {
                Ok(rep) => rep.pass && rep.entries.iter().all(|e| e.equal && e.t_labeled.is_some()),
                Err(_) => false,
            };
            (format!("{} n={}", inst.name, inst.n), ok)
        })
        .collect();
    let failed: Vec<&String> = results.iter().filter(|r| !r.1).map(|r| &r.0).collect();
    let secs = start.elapsed().as_secs_f64();
    verdict(
        11,
        !results.is_empty() && failed.is_empty(),
        format!(
            "{} instances, {} mismatches {:?}, {secs:.0} s",
            results.len(),
            failed.len(),
            failed.first()
        ),
    );
}

// -- 12 --------------------------------------------------------------------

#[test]
fn criterion_12_trend_suite() {
    let grid = [100usize, 1_000, 10_000];
    let multi: Vec<f64> = grid
        .iter()
        .map(|&n| {
            let gap = (n as f64).powf(-0.6);
            let p = ProductMultinomialLaw::new(2, vec![(n, vec![0.5, 0.5])]).unwrap();
            let q = ProductMultinomialLaw::new(2, vec![(n, vec![0.5 + gap, 0.5 - gap])]).unwrap();
            tv_exact_product_multinomial(&p, &q).unwrap().value
        })
        .collect();
    let bern: Vec<f64> = grid
        .iter()
        .map(|&n| binomial_tv(n, 0.5, 0.5 + (n as f64).powf(-0.4)))
        .collect();
    let multi_ok = multi.windows(2).all(|w| w[1] < w[0]) && multi[2] <= 0.05;
    let bern_ok = bern.windows(2).all(|w| w[1] > w[0]) && bern[2] >= 0.95;
    verdict(
        12,
        multi_ok && bern_ok,
        format!(
            "shrinking gap {:?} (decreasing to <= 0.05: {multi_ok}); growing gap {:?} (increasing to >= 0.95: {bern_ok})",
            multi.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>(),
            bern.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>()
        ),
    );
}
