//! Simulators: the EFCP chain (matrix and coordinate constructions), the
//! induced simplex chain, the Ehrenfest family and the cyclic group chain.

use std::collections::HashMap;

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::paintbox::{coordinate_step, sample_m_given_s, PaintboxLaw, StochasticMatrix};
use crate::partitions::{act, cyclic_shift_matrix, Coloring, PartitionMatrix, SiteSet};
use crate::rng::RngStream;

/// What generated a run.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Driver {
    Paintbox {
        law: PaintboxLaw,
    },
    /// A fixed paintbox sequence supplied by the caller.
    Injected,
    Ehrenfest {
        params: EhrenfestParams,
    },
    Group {
        lambda: Vec<f64>,
    },
}

/// Which of the two equivalent EFCP constructions to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// Draw `M_t ~ mu_{S_t}` and apply it.
    Matrix,
    /// Move every coordinate independently through `S_t`.
    Coordinate,
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Keep every `thin`-th state. `None` keeps only the first and last.
    pub thin: Option<usize>,
    pub record_paintbox: bool,
}

impl RunOptions {
    pub fn every_step() -> Self {
        RunOptions {
            thin: Some(1),
            record_paintbox: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainRun {
    pub driver: Driver,
    pub x0: Coloring,
    /// Step index of each stored state; `steps[0] = 0`.
    pub steps: Vec<usize>,
    pub trajectory: Vec<Coloring>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paintbox_trace: Option<Vec<StochasticMatrix>>,
    pub seed: u64,
    pub m_steps: usize,
}

impl ChainRun {
    fn start(driver: Driver, x0: &Coloring, m_steps: usize, seed: u64, opts: &RunOptions) -> Self {
        ChainRun {
            driver,
            x0: x0.clone(),
            steps: vec![0],
            trajectory: vec![x0.clone()],
            paintbox_trace: opts.record_paintbox.then(Vec::new),
            seed,
            m_steps,
        }
    }

    fn record(&mut self, t: usize, x: &Coloring, opts: &RunOptions) {
        let keep = match opts.thin {
            Some(th) => th > 0 && t.is_multiple_of(th),
            None => false,
        };
        if keep || t == self.m_steps {
            self.steps.push(t);
            self.trajectory.push(x.clone());
        }
    }

    pub fn final_state(&self) -> &Coloring {
        self.trajectory.last().expect("trajectory holds x0")
    }
}

/// EFCP step through the partition matrix `M ~ mu_S`.
pub fn efcp_matrix_step<R: Rng + ?Sized>(
    s: &StochasticMatrix,
    x: &Coloring,
    rng: &mut R,
) -> Coloring {
    let m = sample_m_given_s(s, x.n(), rng);
    act(&m, x).expect("shapes match")
}

/// EFCP step with coordinates moving independently through `S`.
pub fn efcp_coordinate_step<R: Rng + ?Sized>(
    s: &StochasticMatrix,
    x: &Coloring,
    rng: &mut R,
) -> Coloring {
    let mut y = x.clone();
    coordinate_step(s, &mut y, rng);
    y
}

fn check_law(law: &PaintboxLaw, x0: &Coloring) -> Result<()> {
    if law.k() != x0.k() {
        return Err(Error::dim(format!(
            "law has k = {}, x0 has k = {}",
            law.k(),
            x0.k()
        )));
    }
    Ok(())
}

fn run_efcp(
    construction: Construction,
    law: &PaintboxLaw,
    x0: &Coloring,
    m_steps: usize,
    seed: u64,
    opts: &RunOptions,
) -> Result<ChainRun> {
    check_law(law, x0)?;
    let sampler = law.sampler();
    let mut rng = RngStream::new(seed, 0);
    let mut run = ChainRun::start(
        Driver::Paintbox { law: law.clone() },
        x0,
        m_steps,
        seed,
        opts,
    );
    let mut x = x0.clone();
    for t in 1..=m_steps {
        let s = sampler.sample(&mut rng);
        x = match construction {
            Construction::Matrix => efcp_matrix_step(&s, &x, &mut rng),
            Construction::Coordinate => efcp_coordinate_step(&s, &x, &mut rng),
        };
        if let Some(tr) = run.paintbox_trace.as_mut() {
            tr.push(s);
        }
        run.record(t, &x, opts);
    }
    Ok(run)
}

/// `X_t = M_t X_{t-1}` with `S_t ~ law`, `M_t ~ mu_{S_t}`.
pub fn run_efcp_matrix(
    law: &PaintboxLaw,
    x0: &Coloring,
    m_steps: usize,
    seed: u64,
) -> Result<ChainRun> {
    run_efcp(
        Construction::Matrix,
        law,
        x0,
        m_steps,
        seed,
        &RunOptions::default(),
    )
}

pub fn run_efcp_matrix_with(
    law: &PaintboxLaw,
    x0: &Coloring,
    m_steps: usize,
    seed: u64,
    opts: &RunOptions,
) -> Result<ChainRun> {
    run_efcp(Construction::Matrix, law, x0, m_steps, seed, opts)
}

/// Coordinates jump independently from `c` to `r` with probability `S_t(r, c)`.
pub fn run_efcp_coordinate(
    law: &PaintboxLaw,
    x0: &Coloring,
    m_steps: usize,
    seed: u64,
) -> Result<ChainRun> {
    run_efcp(
        Construction::Coordinate,
        law,
        x0,
        m_steps,
        seed,
        &RunOptions::default(),
    )
}

pub fn run_efcp_coordinate_with(
    law: &PaintboxLaw,
    x0: &Coloring,
    m_steps: usize,
    seed: u64,
    opts: &RunOptions,
) -> Result<ChainRun> {
    run_efcp(Construction::Coordinate, law, x0, m_steps, seed, opts)
}

/// Run either construction along a given paintbox sequence.
pub fn run_with_paintbox(
    construction: Construction,
    trace: &[StochasticMatrix],
    x0: &Coloring,
    seed: u64,
    opts: &RunOptions,
) -> Result<ChainRun> {
    if trace.iter().any(|s| s.k() != x0.k()) {
        return Err(Error::dim("paintbox trace and x0 disagree on k"));
    }
    let mut rng = RngStream::new(seed, 0);
    let mut run = ChainRun::start(Driver::Injected, x0, trace.len(), seed, opts);
    let mut x = x0.clone();
    for (t, s) in trace.iter().enumerate() {
        x = match construction {
            Construction::Matrix => efcp_matrix_step(s, &x, &mut rng),
            Construction::Coordinate => efcp_coordinate_step(s, &x, &mut rng),
        };
        if let Some(tr) = run.paintbox_trace.as_mut() {
            tr.push(s.clone());
        }
        run.record(t + 1, &x, opts);
    }
    Ok(run)
}

/// A point of the simplex `Δ_k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplexPoint {
    coords: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::invalid("simplex point has a negative entry"));
        }
        let s: f64 = coords.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("simplex point sums to {}", s)));
        }
        Ok(SimplexPoint { coords })
    }

    pub fn uniform(k: usize) -> Self {
        SimplexPoint {
            coords: vec![1.0 / k as f64; k],
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// `Y_m = S_m Y_{m-1}`.
pub fn run_induced_simplex(
    law: &PaintboxLaw,
    y0: &SimplexPoint,
    m_steps: usize,
    seed: u64,
) -> Result<Vec<SimplexPoint>> {
    if law.k() != y0.coords.len() {
        return Err(Error::dim("law and starting point disagree on k"));
    }
    let sampler = law.sampler();
    let mut rng = RngStream::new(seed, 0);
    let mut out = Vec::with_capacity(m_steps + 1);
    out.push(y0.clone());
    let mut y = y0.coords.clone();
    for _ in 0..m_steps {
        y = sampler.sample(&mut rng).apply(&y);
        out.push(SimplexPoint { coords: y.clone() });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EhrenfestVariant {
    /// One uniformly chosen site per step (`alpha = 1/n`).
    Standard,
    General,
}

/// Ehrenfest(alpha): each step a uniform subset of `floor(alpha n)` sites is
/// painted with one fair-coin color.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EhrenfestParams {
    pub n: usize,
    pub alpha: f64,
    pub variant: EhrenfestVariant,
}

impl EhrenfestParams {
    pub fn standard(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n must be positive"));
        }
        Ok(EhrenfestParams {
            n,
            alpha: 1.0 / n as f64,
            variant: EhrenfestVariant::Standard,
        })
    }

    /// `alpha` in `(0, 1]` with `floor(alpha n) >= 1`.
    pub fn general(n: usize, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::invalid(format!("alpha = {} outside (0, 1]", alpha)));
        }
        let p = EhrenfestParams {
            n,
            alpha,
            variant: EhrenfestVariant::General,
        };
        if p.refresh_size() == 0 {
            return Err(Error::invalid(format!(
                "floor(alpha n) = 0 for alpha = {}, n = {}",
                alpha, n
            )));
        }
        Ok(p)
    }

    /// The schedule `alpha_n = 1 - exp(-log n / log log n)`.
    pub fn log_log(n: usize) -> Result<Self> {
        let ln = (n as f64).ln();
        if ln.ln() <= 0.0 {
            return Err(Error::invalid("log log n must be positive (n >= 16)"));
        }
        EhrenfestParams::general(n, 1.0 - (-ln / ln.ln()).exp())
    }

    /// `floor(alpha n)`, with a little slack for alphas like `1/16` written in
    /// decimal.
    pub fn refresh_size(&self) -> usize {
        match self.variant {
            EhrenfestVariant::Standard => 1,
            EhrenfestVariant::General => ((self.alpha * self.n as f64) + 1e-9).floor() as usize,
        }
    }
}

/// One Ehrenfest move: paint `subset` with `color`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EhrenfestMove {
    pub subset: Vec<usize>,
    pub color: u8,
}

impl EhrenfestMove {
    pub fn apply(&self, x: &mut Coloring) {
        let w = x.word_mut();
        for &i in &self.subset {
            w[i] = self.color;
        }
    }

    /// The partition matrix `M(A, I)`: in every column, sites of `A` go to
    /// row `I` and the others stay on the diagonal.
    pub fn partition_matrix(&self, n: usize) -> PartitionMatrix {
        let a = SiteSet::from_sites(n, &self.subset).expect("sites in range");
        let mut rest = SiteSet::empty(n);
        for i in (0..n).filter(|&i| !a.contains(i)) {
            rest.insert(i);
        }
        let ic = self.color as usize;
        let mut cells = vec![SiteSet::empty(n); 4];
        for c in 0..2 {
            cells[ic * 2 + c].union_with(&a);
            cells[c * 2 + c].union_with(&rest);
        }
        PartitionMatrix::new(n, 2, cells).expect("columns are partitions")
    }
}

/// Stream of Ehrenfest moves; subsets come from a partial Fisher-Yates
/// shuffle of a persistent index array.
pub struct EhrenfestMoves {
    size: usize,
    perm: Vec<usize>,
    rng: RngStream,
}

impl EhrenfestMoves {
    pub fn new(params: &EhrenfestParams, rng: RngStream) -> Self {
        EhrenfestMoves {
            size: params.refresh_size(),
            perm: (0..params.n).collect(),
            rng,
        }
    }

    pub fn next_move(&mut self) -> EhrenfestMove {
        let n = self.perm.len();
        for j in 0..self.size {
            let r = self.rng.random_range(j..n);
            self.perm.swap(j, r);
        }
        let color = self.rng.random_range(0..2u8);
        EhrenfestMove {
            subset: self.perm[..self.size].to_vec(),
            color,
        }
    }
}

pub fn run_ehrenfest(
    params: &EhrenfestParams,
    x0: &Coloring,
    m_steps: usize,
    seed: u64,
) -> Result<ChainRun> {
    run_ehrenfest_with(params, x0, m_steps, seed, &RunOptions::default())
}

pub fn run_ehrenfest_with(
    params: &EhrenfestParams,
    x0: &Coloring,
    m_steps: usize,
    seed: u64,
    opts: &RunOptions,
) -> Result<ChainRun> {
    if x0.k() != 2 || x0.n() != params.n {
        return Err(Error::dim(
            "Ehrenfest chains live on {1,2}^n with the configured n",
        ));
    }
    let mut moves = EhrenfestMoves::new(params, RngStream::new(seed, 0));
    let mut run = ChainRun::start(
        Driver::Ehrenfest { params: *params },
        x0,
        m_steps,
        seed,
        opts,
    );
    let mut x = x0.clone();
    for t in 1..=m_steps {
        moves.next_move().apply(&mut x);
        run.record(t, &x, opts);
    }
    Ok(run)
}

/// Number of never-refreshed sites after each of `m_steps` moves.
pub fn unrefreshed_counts(params: &EhrenfestParams, m_steps: usize, seed: u64) -> Vec<usize> {
    let mut moves = EhrenfestMoves::new(params, RngStream::new(seed, 0));
    let mut fresh = vec![false; params.n];
    let mut left = params.n;
    let mut out = Vec::with_capacity(m_steps);
    for _ in 0..m_steps {
        for i in moves.next_move().subset {
            if !fresh[i] {
                fresh[i] = true;
                left -= 1;
            }
        }
        out.push(left);
    }
    out
}

/// Check `lambda(j) = lambda(k - j + 1) > 0` (1-based), as required for the
/// reversibility claim.
pub fn check_group_weights(lambda: &[f64]) -> Result<()> {
    let k = lambda.len();
    if k == 0 {
        return Err(Error::invalid("empty weight vector"));
    }
    if lambda.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
        return Err(Error::invalid("group weights must be strictly positive"));
    }
    if (lambda.iter().sum::<f64>() - 1.0).abs() > crate::paintbox::COLUMN_TOLERANCE {
        return Err(Error::invalid("group weights must sum to 1"));
    }
    for j in 0..k {
        if (lambda[j] - lambda[k - 1 - j]).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "weights not symmetric: lambda({}) = {} but lambda({}) = {}",
                j + 1,
                lambda[j],
                k - j,
                lambda[k - 1 - j]
            )));
        }
    }
    Ok(())
}

/// `X_t = X_{t-1} + L_t` in `Z/k` coordinatewise, `L_t` with i.i.d. lambda
/// coordinates, applied through the cyclic shift partition matrix.
pub fn run_group_chain(
    lambda: &[f64],
    x0: &Coloring,
    m_steps: usize,
    seed: u64,
) -> Result<ChainRun> {
    run_group_chain_with(lambda, x0, m_steps, seed, &RunOptions::default())
}

pub fn run_group_chain_with(
    lambda: &[f64],
    x0: &Coloring,
    m_steps: usize,
    seed: u64,
    opts: &RunOptions,
) -> Result<ChainRun> {
    check_group_weights(lambda)?;
    let k = lambda.len();
    if x0.k() != k {
        return Err(Error::dim("weights and x0 disagree on k"));
    }
    let dist = WeightedIndex::new(lambda).expect("positive weights");
    let mut rng = RngStream::new(seed, 0);
    let mut run = ChainRun::start(
        Driver::Group {
            lambda: lambda.to_vec(),
        },
        x0,
        m_steps,
        seed,
        opts,
    );
    let mut x = x0.clone();
    for t in 1..=m_steps {
        let word: Vec<u8> = (0..x.n()).map(|_| dist.sample(&mut rng) as u8).collect();
        let l = Coloring::new_unchecked(k, word);
        x = act(&cyclic_shift_matrix(&l), &x)?;
        run.record(t, &x, opts);
    }
    Ok(run)
}

/// Largest state space for which dense kernels are built.
pub const MAX_KERNEL_STATES: usize = 4096;

/// Dense one-step kernel of the EFCP chain on `[k]^n` for a finitely
/// supported law: `P[x][y] = sum_a w_a prod_i S_a(y_i, x_i)`, states indexed
/// by [`Coloring::index`]. Row-major, `k^n x k^n`.
pub fn exact_kernel(law: &PaintboxLaw, n: usize) -> Result<Vec<f64>> {
    let atoms = law
        .atoms()
        .ok_or_else(|| Error::invalid("exact kernels need a finitely supported law"))?;
    let k = law.k();
    let states = checked_states(k, n)?;
    let mut p = vec![0.0; states * states];
    let mut dense: Vec<(&StochasticMatrix, f64)> = Vec::new();
    for (s, w) in &atoms {
        if s.is_permutation() {
            let perm: Vec<usize> = (0..k)
                .map(|c| (0..k).find(|&r| s.get(r, c) == 1.0).unwrap())
                .collect();
            for x in 0..states {
                let y = Coloring::from_index(x, n, k).relabel(&perm).index();
                p[x * states + y] += w;
            }
            continue;
        }
        dense.push((s, *w));
    }
    if !dense.is_empty() {
        // P_a(x, y) only depends on the transition counts N[c][r] = #{i : x_i = c, y_i = r}
        let words: Vec<Vec<u8>> = (0..states)
            .map(|x| Coloring::from_index(x, n, k).word().to_vec())
            .collect();
        let mut cache: HashMap<Vec<u8>, f64> = HashMap::new();
        let mut counts = vec![0u8; k * k];
        for (x, wx) in words.iter().enumerate() {
            for (y, wy) in words.iter().enumerate() {
                counts.fill(0);
                for (&c, &r) in wx.iter().zip(wy) {
                    counts[c as usize * k + r as usize] += 1;
                }
                let v = match cache.get(&counts) {
                    Some(&v) => v,
                    None => {
                        let v: f64 = dense
                            .iter()
                            .map(|(s, w)| {
                                w * counts
                                    .iter()
                                    .enumerate()
                                    .map(|(i, &e)| s.get(i % k, i / k).powi(e as i32))
                                    .product::<f64>()
                            })
                            .sum();
                        cache.insert(counts.clone(), v);
                        v
                    }
                };
                p[x * states + y] += v;
            }
        }
    }
    Ok(p)
}

pub(crate) fn checked_states(k: usize, n: usize) -> Result<usize> {
    let mut states: usize = 1;
    for _ in 0..n {
        states = states.saturating_mul(k);
    }
    if states > MAX_KERNEL_STATES {
        return Err(Error::Budget {
            required: states as u128,
            budget: MAX_KERNEL_STATES as u128,
        });
    }
    Ok(states)
}
