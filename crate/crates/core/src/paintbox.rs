//! Column-stochastic matrices, paintbox laws and the product multinomial
//! sampler `mu_S`.

use std::collections::HashMap;
use std::fmt;

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::Rng;
use rand_distr::Gamma;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::partitions::{Coloring, PartitionMatrix, SiteSet, MAX_K};
use crate::rng::RngStream;

/// Column sums within this distance of 1 are renormalised; anything further
/// off is rejected.
pub const COLUMN_TOLERANCE: f64 = 1e-9;

/// Permutation mixtures enumerate all k! matrices, so k is capped here.
pub const MAX_PERMUTATION_K: usize = 8;

/// A k x k column-stochastic matrix, stored row-major.
#[derive(Clone, PartialEq, Debug)]
pub struct StochasticMatrix {
    k: usize,
    data: Vec<f64>,
}

impl StochasticMatrix {
    /// Columns are given as probability vectors; sums within
    /// [`COLUMN_TOLERANCE`] of 1 are renormalised.
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self> {
        let k = cols.len();
        if k == 0 || k > MAX_K {
            return Err(Error::invalid(format!("k = {} outside 1..={}", k, MAX_K)));
        }
        let mut data = vec![0.0; k * k];
        for (c, col) in cols.iter().enumerate() {
            if col.len() != k {
                return Err(Error::dim(format!(
                    "column {} has length {} != {}",
                    c + 1,
                    col.len(),
                    k
                )));
            }
            let normalized = normalize(col, &format!("column {}", c + 1))?;
            for r in 0..k {
                data[r * k + c] = normalized[r];
            }
        }
        Ok(StochasticMatrix { k, data })
    }

    /// Rows of the matrix as written on paper (`rows[r][c] = S(r, c)`).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        let cols: Vec<Vec<f64>> = (0..k)
            .map(|c| {
                rows.iter()
                    .map(|row| row.get(c).copied().unwrap_or(f64::NAN))
                    .collect()
            })
            .collect();
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::dim("matrix is not square"));
        }
        StochasticMatrix::from_columns(&cols)
    }

    pub fn identity(k: usize) -> Self {
        let mut data = vec![0.0; k * k];
        for i in 0..k {
            data[i * k + i] = 1.0;
        }
        StochasticMatrix { k, data }
    }

    /// The matrix sending color `c` to `perm[c]`.
    pub fn permutation(perm: &[usize]) -> Self {
        let k = perm.len();
        let mut data = vec![0.0; k * k];
        for (c, &r) in perm.iter().enumerate() {
            data[r * k + c] = 1.0;
        }
        StochasticMatrix { k, data }
    }

    /// Every column equal to `col`.
    pub fn rank_one(col: &[f64]) -> Result<Self> {
        StochasticMatrix::from_columns(&vec![col.to_vec(); col.len()])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.k + c]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.k).map(|r| self.get(r, c)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.k).map(|c| self.column(c)).collect()
    }

    /// `self * other`.
    pub fn mul(&self, other: &StochasticMatrix) -> StochasticMatrix {
        let k = self.k;
        StochasticMatrix {
            k,
            data: crate::linalg::matmul(&self.data, &other.data, k, k, k),
        }
    }

    /// `self * v` for a vector `v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.k)
            .map(|r| (0..self.k).map(|c| self.get(r, c) * v[c]).sum())
            .collect()
    }

    pub fn pow(&self, m: usize) -> StochasticMatrix {
        let mut out = StochasticMatrix::identity(self.k);
        for _ in 0..m {
            out = self.mul(&out);
        }
        out
    }

    /// Apply a row permutation and a column permutation:
    /// `out(rows[r], cols[c]) = self(r, c)`.
    pub fn permuted(&self, rows: &[usize], cols: &[usize]) -> StochasticMatrix {
        let k = self.k;
        let mut data = vec![0.0; k * k];
        for r in 0..k {
            for c in 0..k {
                data[rows[r] * k + cols[c]] = self.get(r, c);
            }
        }
        StochasticMatrix { k, data }
    }

    pub fn is_permutation(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0 || x == 1.0)
    }

    pub fn max_abs_diff(&self, other: &StochasticMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest deviation of a column sum from 1 (a sanity check).
    pub fn column_sum_error(&self) -> f64 {
        (0..self.k)
            .map(|c| ((0..self.k).map(|r| self.get(r, c)).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for StochasticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.k {
            let row: Vec<String> = (0..self.k)
                .map(|c| format!("{:.6}", self.get(r, c)))
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    columns: Vec<Vec<f64>>,
}

impl Serialize for StochasticMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            columns: self.columns(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StochasticMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MatrixRepr::deserialize(d)?;
        StochasticMatrix::from_columns(&r.columns).map_err(serde::de::Error::custom)
    }
}

fn normalize(v: &[f64], what: &str) -> Result<Vec<f64>> {
    if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::invalid(format!(
            "{} has a negative or non-finite entry",
            what
        )));
    }
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > COLUMN_TOLERANCE {
        return Err(Error::invalid(format!("{} sums to {} (not 1)", what, s)));
    }
    Ok(v.iter().map(|x| x / s).collect())
}

/// A law on k x k column-stochastic matrices.
///
/// JSON form uses a `kind` tag, e.g.
/// `{"kind": "self_similar", "nu": [1.0, 1.0]}` or
/// `{"kind": "atomic", "atoms": [{"columns": [[0.8,0.2],[0.3,0.7]]}], "weights": [1.0]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PaintboxLaw {
    PointMass {
        matrix: StochasticMatrix,
    },
    Atomic {
        atoms: Vec<StochasticMatrix>,
        weights: Vec<f64>,
    },
    /// Column `j` is Dirichlet(`alphas[j]`), columns independent.
    DirichletColumns {
        alphas: Vec<Vec<f64>>,
    },
    /// Columns i.i.d. Dirichlet(`nu`).
    SelfSimilar {
        nu: Vec<f64>,
    },
    /// Permutation matrices in lexicographic order of the permutation
    /// (`perm[c]` is the row of the 1 in column `c`); uniform if `weights`
    /// is omitted.
    PermutationMix {
        k: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
}

impl PaintboxLaw {
    pub fn point_mass(matrix: StochasticMatrix) -> Self {
        PaintboxLaw::PointMass { matrix }
    }

    pub fn atomic(atoms: Vec<StochasticMatrix>, weights: Vec<f64>) -> Result<Self> {
        let law = PaintboxLaw::Atomic { atoms, weights };
        law.validated()
    }

    pub fn self_similar(nu: Vec<f64>) -> Result<Self> {
        PaintboxLaw::SelfSimilar { nu }.validated()
    }

    pub fn dirichlet_columns(alphas: Vec<Vec<f64>>) -> Result<Self> {
        PaintboxLaw::DirichletColumns { alphas }.validated()
    }

    pub fn permutation_mix(k: usize, weights: Option<Vec<f64>>) -> Result<Self> {
        PaintboxLaw::PermutationMix { k, weights }.validated()
    }

    /// Check the invariants and renormalise weights; returns the cleaned law.
    pub fn validated(self) -> Result<Self> {
        match self {
            PaintboxLaw::PointMass { .. } => Ok(self),
            PaintboxLaw::Atomic { atoms, weights } => {
                if atoms.is_empty() || atoms.len() != weights.len() {
                    return Err(Error::invalid(
                        "atomic law needs one weight per atom (and >= 1 atom)",
                    ));
                }
                let k = atoms[0].k();
                if atoms.iter().any(|a| a.k() != k) {
                    return Err(Error::dim("atoms of different sizes"));
                }
                let weights = normalize(&weights, "atom weights")?;
                Ok(PaintboxLaw::Atomic { atoms, weights })
            }
            PaintboxLaw::DirichletColumns { alphas } => {
                let k = alphas.len();
                if k == 0 || k > MAX_K || alphas.iter().any(|a| a.len() != k) {
                    return Err(Error::dim(
                        "dirichlet_columns needs k parameter vectors of length k",
                    ));
                }
                check_dirichlet(alphas.iter().flatten())?;
                Ok(PaintboxLaw::DirichletColumns { alphas })
            }
            PaintboxLaw::SelfSimilar { nu } => {
                if nu.is_empty() || nu.len() > MAX_K {
                    return Err(Error::dim("self_similar needs 1..=16 parameters"));
                }
                check_dirichlet(nu.iter())?;
                Ok(PaintboxLaw::SelfSimilar { nu })
            }
            PaintboxLaw::PermutationMix { k, weights } => {
                if k == 0 || k > MAX_PERMUTATION_K {
                    return Err(Error::invalid(format!(
                        "permutation_mix supports k in 1..={}",
                        MAX_PERMUTATION_K
                    )));
                }
                let weights = match weights {
                    None => None,
                    Some(w) => {
                        if w.len() != factorial(k) {
                            return Err(Error::dim(format!(
                                "permutation_mix needs {} weights",
                                factorial(k)
                            )));
                        }
                        Some(normalize(&w, "permutation weights")?)
                    }
                };
                Ok(PaintboxLaw::PermutationMix { k, weights })
            }
        }
    }

    pub fn k(&self) -> usize {
        match self {
            PaintboxLaw::PointMass { matrix } => matrix.k(),
            PaintboxLaw::Atomic { atoms, .. } => atoms[0].k(),
            PaintboxLaw::DirichletColumns { alphas } => alphas.len(),
            PaintboxLaw::SelfSimilar { nu } => nu.len(),
            PaintboxLaw::PermutationMix { k, .. } => *k,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            PaintboxLaw::PointMass { .. } => "point_mass",
            PaintboxLaw::Atomic { .. } => "atomic",
            PaintboxLaw::DirichletColumns { .. } => "dirichlet_columns",
            PaintboxLaw::SelfSimilar { .. } => "self_similar",
            PaintboxLaw::PermutationMix { .. } => "permutation_mix",
        }
    }

    /// Atoms and weights when the law is finitely supported.
    pub fn atoms(&self) -> Option<Vec<(StochasticMatrix, f64)>> {
        match self {
            PaintboxLaw::PointMass { matrix } => Some(vec![(matrix.clone(), 1.0)]),
            PaintboxLaw::Atomic { atoms, weights } => {
                Some(atoms.iter().cloned().zip(weights.iter().copied()).collect())
            }
            PaintboxLaw::PermutationMix { k, weights } => {
                let perms = permutations(*k);
                let u = 1.0 / perms.len() as f64;
                Some(
                    perms
                        .iter()
                        .enumerate()
                        .map(|(i, p)| {
                            let w = weights.as_ref().map_or(u, |w| w[i]);
                            (StochasticMatrix::permutation(p), w)
                        })
                        .filter(|(_, w)| *w > 0.0)
                        .collect(),
                )
            }
            _ => None,
        }
    }

    /// Whether the law has an L^p density (p > 1) on the columns, the
    /// hypothesis behind the cutoff theorem. Only the Dirichlet families do.
    pub fn has_density(&self) -> bool {
        matches!(
            self,
            PaintboxLaw::DirichletColumns { .. } | PaintboxLaw::SelfSimilar { .. }
        )
    }

    pub fn sampler(&self) -> PaintboxSampler {
        PaintboxSampler::new(self)
    }
}

fn check_dirichlet<'a>(params: impl Iterator<Item = &'a f64>) -> Result<()> {
    for &a in params {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::invalid(format!(
                "Dirichlet parameter {} is not > 0",
                a
            )));
        }
    }
    Ok(())
}

pub(crate) fn factorial(k: usize) -> usize {
    (1..=k).product()
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(factorial(k));
    let mut p: Vec<usize> = (0..k).collect();
    loop {
        out.push(p.clone());
        // next lexicographic permutation
        let Some(i) = (1..k).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..k).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Pre-built sampler for a [`PaintboxLaw`].
#[derive(Clone, Debug)]
pub struct PaintboxSampler {
    k: usize,
    kind: SamplerKind,
}

#[derive(Clone, Debug)]
enum SamplerKind {
    Fixed(StochasticMatrix),
    Atoms(Vec<StochasticMatrix>, WeightedIndex<f64>),
    /// Per column: the parameters and one Gamma sampler per coordinate.
    Dirichlet(Vec<(Vec<f64>, Vec<Gamma<f64>>)>),
}

impl PaintboxSampler {
    pub fn new(law: &PaintboxLaw) -> Self {
        let k = law.k();
        let kind = match law {
            PaintboxLaw::PointMass { matrix } => SamplerKind::Fixed(matrix.clone()),
            PaintboxLaw::DirichletColumns { alphas } => SamplerKind::Dirichlet(
                alphas
                    .iter()
                    .map(|col| (col.clone(), col.iter().map(|&a| gamma(a)).collect()))
                    .collect(),
            ),
            PaintboxLaw::SelfSimilar { nu } => {
                let col: Vec<Gamma<f64>> = nu.iter().map(|&a| gamma(a)).collect();
                SamplerKind::Dirichlet(vec![(nu.clone(), col); k])
            }
            _ => {
                let atoms = law.atoms().expect("finitely supported");
                if atoms.len() == 1 {
                    SamplerKind::Fixed(atoms[0].0.clone())
                } else {
                    let w: Vec<f64> = atoms.iter().map(|a| a.1).collect();
                    let idx = WeightedIndex::new(&w).expect("validated weights");
                    SamplerKind::Atoms(atoms.into_iter().map(|a| a.0).collect(), idx)
                }
            }
        };
        PaintboxSampler { k, kind }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> StochasticMatrix {
        match &self.kind {
            SamplerKind::Fixed(s) => s.clone(),
            SamplerKind::Atoms(atoms, idx) => atoms[idx.sample(rng)].clone(),
            SamplerKind::Dirichlet(cols) => {
                let k = self.k;
                let mut data = vec![0.0; k * k];
                for (c, (alpha, gammas)) in cols.iter().enumerate() {
                    sample_dirichlet_into(alpha, gammas, rng, |r, x| data[r * k + c] = x);
                }
                StochasticMatrix { k, data }
            }
        }
    }
}

fn gamma(shape: f64) -> Gamma<f64> {
    Gamma::new(shape, 1.0).expect("validated Dirichlet parameter")
}

/// Normalised Gamma draws. When every draw underflows (all parameters tiny)
/// the draw is the small-parameter limit: a vertex picked with probability
/// proportional to its parameter.
fn sample_dirichlet_into<R: Rng + ?Sized>(
    alpha: &[f64],
    gammas: &[Gamma<f64>],
    rng: &mut R,
    mut put: impl FnMut(usize, f64),
) {
    let draws: Vec<f64> = gammas.iter().map(|g| g.sample(rng)).collect();
    let s: f64 = draws.iter().sum();
    if s > 0.0 && s.is_finite() {
        for (r, x) in draws.iter().enumerate() {
            put(r, x / s);
        }
    } else {
        let r = WeightedIndex::new(alpha)
            .expect("positive parameters")
            .sample(rng);
        for i in 0..gammas.len() {
            put(i, if i == r { 1.0 } else { 0.0 });
        }
    }
}

/// One draw `S ~ law`.
pub fn sample_s(law: &PaintboxLaw, rng: &mut RngStream) -> StochasticMatrix {
    law.sampler().sample(rng)
}

/// Draw a new color for a site currently colored `c`: row `r` with
/// probability `s(r, c)`.
#[inline]
pub(crate) fn draw_row<R: Rng + ?Sized>(s: &StochasticMatrix, c: usize, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let k = s.k();
    let mut acc = 0.0;
    for r in 0..k - 1 {
        acc += s.get(r, c);
        if u < acc {
            return r;
        }
    }
    k - 1
}

/// A draw from the product multinomial law `mu_S`: in each column `j`, site
/// `i` independently lands in row `r` with probability `s(r, j)`.
pub fn sample_m_given_s<R: Rng + ?Sized>(
    s: &StochasticMatrix,
    n: usize,
    rng: &mut R,
) -> PartitionMatrix {
    let k = s.k();
    let mut cells = vec![SiteSet::empty(n); k * k];
    for c in 0..k {
        for i in 0..n {
            let r = draw_row(s, c, rng);
            cells[r * k + c].insert(i);
        }
    }
    PartitionMatrix::new(n, k, cells).expect("columns are partitions by construction")
}

/// Outcome of the row-column exchangeability check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RceReport {
    pub rce: bool,
    /// Why the answer holds, in words.
    pub certificate: String,
}

/// Decide whether the law is invariant under separate permutations of rows
/// and of columns. All built-in kinds are decided structurally.
pub fn is_rce(law: &PaintboxLaw) -> RceReport {
    let yes = |s: &str| RceReport {
        rce: true,
        certificate: s.to_string(),
    };
    let no = |s: String| RceReport {
        rce: false,
        certificate: s,
    };
    match law {
        PaintboxLaw::SelfSimilar { nu } => {
            if nu.iter().all(|&a| a == nu[0]) {
                yes("i.i.d. columns with a symmetric Dirichlet law")
            } else {
                no(format!(
                    "Dirichlet parameter {:?} is not symmetric, so row swaps change the law",
                    nu
                ))
            }
        }
        PaintboxLaw::DirichletColumns { alphas } => {
            let a0 = alphas[0][0];
            if alphas.iter().flatten().all(|&a| a == a0) {
                yes("independent columns, all Dirichlet with one common symmetric parameter")
            } else {
                no("column parameters differ or are not symmetric".to_string())
            }
        }
        PaintboxLaw::PermutationMix { k, weights } => match weights {
            None => yes("uniform over all permutation matrices"),
            Some(w) => {
                let u = 1.0 / factorial(*k) as f64;
                if w.iter().all(|&x| (x - u).abs() <= 1e-12) {
                    yes("uniform over all permutation matrices")
                } else {
                    no("row permutations act transitively on permutation matrices, so weights must be uniform".into())
                }
            }
        },
        PaintboxLaw::PointMass { matrix } => {
            let v = matrix.get(0, 0);
            if matrix.data().iter().all(|&x| (x - v).abs() <= 1e-12) {
                yes("the point mass sits at the constant matrix J/k")
            } else {
                no(
                    "a point mass at a non-constant matrix moves under some row or column swap"
                        .into(),
                )
            }
        }
        PaintboxLaw::Atomic { atoms, weights } => atomic_rce(atoms, weights),
    }
}

/// Entries rounded to a 1e-9 grid, for hashing atoms.
fn grid_key(s: &StochasticMatrix) -> Vec<i64> {
    s.data.iter().map(|x| (x * 1e9).round() as i64).collect()
}

/// Equal atoms merged, with a hash index on the rounded entries. Lookups
/// that miss the index fall back to a linear scan.
struct AtomTable {
    distinct: Vec<(StochasticMatrix, f64)>,
    index: HashMap<Vec<i64>, usize>,
}

impl AtomTable {
    const TOL: f64 = 1e-12;

    fn new(atoms: &[StochasticMatrix], weights: &[f64]) -> Self {
        let mut t = AtomTable {
            distinct: Vec::new(),
            index: HashMap::new(),
        };
        for (a, &w) in atoms.iter().zip(weights) {
            match t.index.get(&grid_key(a)) {
                Some(&i) => t.distinct[i].1 += w,
                None => {
                    t.index.insert(grid_key(a), t.distinct.len());
                    t.distinct.push((a.clone(), w));
                }
            }
        }
        t
    }

    fn find(&self, a: &StochasticMatrix) -> Option<usize> {
        if let Some(&i) = self.index.get(&grid_key(a)) {
            if self.distinct[i].0.max_abs_diff(a) <= Self::TOL {
                return Some(i);
            }
        }
        self.distinct
            .iter()
            .position(|(b, _)| b.max_abs_diff(a) <= Self::TOL)
    }
}

fn atomic_rce(atoms: &[StochasticMatrix], weights: &[f64]) -> RceReport {
    let table = AtomTable::new(atoms, weights);
    let k = atoms[0].k();
    let id: Vec<usize> = (0..k).collect();
    // adjacent transpositions generate the symmetric group, so invariance under
    // them (rows and columns separately) is invariance under everything
    let mut gens: Vec<(Vec<usize>, Vec<usize>, String)> = Vec::new();
    for t in 0..k.saturating_sub(1) {
        let mut p = id.clone();
        p.swap(t, t + 1);
        gens.push((
            p.clone(),
            id.clone(),
            format!("rows {} and {}", t + 1, t + 2),
        ));
        gens.push((id.clone(), p, format!("columns {} and {}", t + 1, t + 2)));
    }
    for (a, w) in &table.distinct {
        for (rows, cols, what) in &gens {
            let b = a.permuted(rows, cols);
            match table.find(&b).map(|i| table.distinct[i].1) {
                Some(wb) if (wb - w).abs() <= 1e-12 => {}
                _ => {
                    return RceReport {
                        rce: false,
                        certificate: format!("swapping {} maps an atom of weight {} outside the support or onto a different weight", what, w),
                    }
                }
            }
        }
    }
    RceReport {
        rce: true,
        certificate: format!(
            "{} distinct atoms closed under row and column transpositions with matching weights",
            table.distinct.len()
        ),
    }
}

/// The orbit of `base` under all row and column permutations, as a uniform
/// atomic law. This is the standard way to build RCE atomic laws.
pub fn rce_orbit_law(base: &StochasticMatrix) -> Result<PaintboxLaw> {
    let k = base.k();
    if k > 5 {
        return Err(Error::invalid("orbit laws are limited to k <= 5"));
    }
    let perms = permutations(k);
    let all: Vec<StochasticMatrix> = perms
        .iter()
        .flat_map(|rp| perms.iter().map(move |cp| base.permuted(rp, cp)))
        .collect();
    let table = AtomTable::new(&all, &vec![1.0; all.len()]);
    let atoms: Vec<StochasticMatrix> = table.distinct.into_iter().map(|(a, _)| a).collect();
    let w = vec![1.0 / atoms.len() as f64; atoms.len()];
    PaintboxLaw::atomic(atoms, w)
}

/// Colors of a coloring pushed through one column-stochastic step, used by
/// the coordinate construction.
pub(crate) fn coordinate_step<R: Rng + ?Sized>(
    s: &StochasticMatrix,
    x: &mut Coloring,
    rng: &mut R,
) {
    for c in x.word_mut().iter_mut() {
        *c = draw_row(s, *c as usize, rng) as u8;
    }
}
