//! Labeled and unlabeled k-ary partitions of `[n]` and the partition-matrix
//! monoid.
//!
//! A [`Coloring`] is the chain state. Site `i` (0-based) carries color
//! `word[i]` in `0..k`; externally colors are written `1..=k` using the
//! digits `123456789abcdefg`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported number of colors.
pub const MAX_K: usize = 16;

const DIGITS: &[u8; MAX_K] = b"123456789abcdefg";

/// A subset of `[n]` stored as a bitmask.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SiteSet {
    n: usize,
    words: Vec<u64>,
}

impl SiteSet {
    pub fn empty(n: usize) -> Self {
        SiteSet {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = SiteSet::empty(n);
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    pub fn from_sites(n: usize, sites: &[usize]) -> Result<Self> {
        let mut s = SiteSet::empty(n);
        for &i in sites {
            if i >= n {
                return Err(Error::invalid(format!("site {} outside [0, {})", i, n)));
            }
            s.insert(i);
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersect(&self, other: &SiteSet) -> SiteSet {
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        SiteSet { n: self.n, words }
    }

    pub fn union_with(&mut self, other: &SiteSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn is_disjoint(&self, other: &SiteSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// Sites in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &bits)| {
            let mut b = bits;
            std::iter::from_fn(move || {
                if b == 0 {
                    return None;
                }
                let t = b.trailing_zeros() as usize;
                b &= b - 1;
                Some(w * 64 + t)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

/// A labeled k-ary partition of `[n]`, written as a color word.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Coloring {
    k: usize,
    word: Vec<u8>,
}

impl Coloring {
    /// Build from 0-based colors.
    pub fn new(k: usize, word: Vec<u8>) -> Result<Self> {
        check_k(k)?;
        if word.is_empty() {
            return Err(Error::invalid("coloring needs n >= 1"));
        }
        if let Some(&c) = word.iter().find(|&&c| c as usize >= k) {
            return Err(Error::invalid(format!(
                "color {} outside 1..={}",
                c as usize + 1,
                k
            )));
        }
        Ok(Coloring { k, word })
    }

    pub(crate) fn new_unchecked(k: usize, word: Vec<u8>) -> Self {
        Coloring { k, word }
    }

    pub fn constant(n: usize, k: usize, color: u8) -> Result<Self> {
        Coloring::new(k, vec![color; n])
    }

    /// Parse a digit string such as `"1122"`.
    pub fn parse(s: &str, k: usize) -> Result<Self> {
        check_k(k)?;
        let word = s
            .bytes()
            .map(|b| {
                DIGITS
                    .iter()
                    .position(|&d| d == b.to_ascii_lowercase())
                    .map(|p| p as u8)
                    .ok_or_else(|| Error::invalid(format!("bad color digit {:?}", b as char)))
            })
            .collect::<Result<Vec<u8>>>()?;
        Coloring::new(k, word)
    }

    /// The labeled-partition view `(L_1, ..., L_k)`.
    pub fn from_classes(n: usize, classes: &[SiteSet]) -> Result<Self> {
        let k = classes.len();
        check_k(k)?;
        let mut word = vec![u8::MAX; n];
        for (c, set) in classes.iter().enumerate() {
            if set.n() != n {
                return Err(Error::dim("class over a different ground set"));
            }
            for i in set.iter() {
                if word[i] != u8::MAX {
                    return Err(Error::invalid(format!("site {} in two classes", i + 1)));
                }
                word[i] = c as u8;
            }
        }
        if word.contains(&u8::MAX) {
            return Err(Error::invalid("classes do not cover [n]"));
        }
        Coloring::new(k, word)
    }

    pub fn classes(&self) -> Vec<SiteSet> {
        let mut out = vec![SiteSet::empty(self.n()); self.k];
        for (i, &c) in self.word.iter().enumerate() {
            out[c as usize].insert(i);
        }
        out
    }

    pub fn n(&self) -> usize {
        self.word.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub(crate) fn word_mut(&mut self) -> &mut [u8] {
        &mut self.word
    }

    #[inline]
    pub fn color(&self, i: usize) -> usize {
        self.word[i] as usize
    }

    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.k];
        for &x in &self.word {
            c[x as usize] += 1;
        }
        c
    }

    /// Index in `0..k^n` with site 0 as the least significant digit.
    pub fn index(&self) -> usize {
        self.word
            .iter()
            .rev()
            .fold(0, |acc, &c| acc * self.k + c as usize)
    }

    pub fn from_index(mut idx: usize, n: usize, k: usize) -> Self {
        let mut word = Vec::with_capacity(n);
        for _ in 0..n {
            word.push((idx % k) as u8);
            idx /= k;
        }
        Coloring { k, word }
    }

    /// Apply a permutation of the color labels: color `c` becomes `perm[c]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let word = self.word.iter().map(|&c| perm[c as usize] as u8).collect();
        Coloring { k: self.k, word }
    }

    pub fn project(&self) -> UnlabeledPartition {
        project(self)
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self
            .word
            .iter()
            .map(|&c| DIGITS[c as usize] as char)
            .collect();
        f.write_str(&s)
    }
}

#[derive(Serialize, Deserialize)]
struct ColoringRepr {
    k: usize,
    word: String,
}

impl Serialize for Coloring {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ColoringRepr {
            k: self.k,
            word: self.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Coloring {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ColoringRepr::deserialize(d)?;
        Coloring::parse(&r.word, r.k).map_err(serde::de::Error::custom)
    }
}

/// A set partition of `[n]` into at most k nonempty blocks, blocks ordered by
/// their least element.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct UnlabeledPartition {
    n: usize,
    /// Block of each site, numbered in order of first appearance.
    rgs: Vec<u8>,
}

impl UnlabeledPartition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_blocks(&self) -> usize {
        self.rgs.iter().map(|&b| b as usize + 1).max().unwrap_or(0)
    }

    /// Restricted growth string: site `i` lies in block `rgs[i]`.
    pub fn rgs(&self) -> &[u8] {
        &self.rgs
    }

    /// Blocks as sorted 0-based site lists.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (i, &b) in self.rgs.iter().enumerate() {
            out[b as usize].push(i);
        }
        out
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut owner = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::invalid("empty block"));
            }
            for &i in block {
                if i >= n || owner[i] != usize::MAX {
                    return Err(Error::invalid(format!(
                        "site {} repeated or out of range",
                        i + 1
                    )));
                }
                owner[i] = b;
            }
        }
        if owner.contains(&usize::MAX) {
            return Err(Error::invalid("blocks do not cover [n]"));
        }
        let word: Vec<u8> = owner.iter().map(|&b| b as u8).collect();
        Ok(canonical_rgs(&word))
    }

    /// The canonical labeled representative: block `b` gets color `b`.
    pub fn representative(&self, k: usize) -> Result<Coloring> {
        if self.num_blocks() > k {
            return Err(Error::invalid("more blocks than colors"));
        }
        Coloring::new(k, self.rgs.clone())
    }
}

impl fmt::Display for UnlabeledPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| {
                let s: Vec<String> = b.iter().map(|i| (i + 1).to_string()).collect();
                format!("{{{}}}", s.join(","))
            })
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl Serialize for UnlabeledPartition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let blocks: Vec<Vec<usize>> = self
            .blocks()
            .into_iter()
            .map(|b| b.into_iter().map(|i| i + 1).collect())
            .collect();
        blocks.serialize(s)
    }
}

fn canonical_rgs(word: &[u8]) -> UnlabeledPartition {
    let mut map = [u8::MAX; 256];
    let mut next = 0u8;
    let rgs = word
        .iter()
        .map(|&c| {
            if map[c as usize] == u8::MAX {
                map[c as usize] = next;
                next += 1;
            }
            map[c as usize]
        })
        .collect();
    UnlabeledPartition { n: word.len(), rgs }
}

/// Forget the labels: drop empty classes, order blocks by least element.
pub fn project(x: &Coloring) -> UnlabeledPartition {
    canonical_rgs(&x.word)
}

/// A k x k matrix of subsets of `[n]` whose columns are labeled partitions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PartitionMatrix {
    n: usize,
    k: usize,
    /// Row-major: `cells[r * k + c]`.
    cells: Vec<SiteSet>,
}

impl PartitionMatrix {
    pub fn new(n: usize, k: usize, cells: Vec<SiteSet>) -> Result<Self> {
        check_k(k)?;
        if cells.len() != k * k {
            return Err(Error::dim(format!(
                "expected {} cells, got {}",
                k * k,
                cells.len()
            )));
        }
        if cells.iter().any(|s| s.n() != n) {
            return Err(Error::dim("cell over a different ground set"));
        }
        let m = PartitionMatrix { n, k, cells };
        for c in 0..k {
            let mut seen = SiteSet::empty(n);
            for r in 0..k {
                let cell = m.cell(r, c);
                if !seen.is_disjoint(cell) {
                    return Err(Error::invalid(format!(
                        "column {} has overlapping cells",
                        c + 1
                    )));
                }
                seen.union_with(cell);
            }
            if seen.len() != n {
                return Err(Error::invalid(format!(
                    "column {} does not cover [n]",
                    c + 1
                )));
            }
        }
        Ok(m)
    }

    pub fn identity(n: usize, k: usize) -> Self {
        let mut cells = vec![SiteSet::empty(n); k * k];
        for r in 0..k {
            cells[r * k + r] = SiteSet::full(n);
        }
        PartitionMatrix { n, k, cells }
    }

    /// Identify a partition matrix with the k-tuple of its column colorings.
    pub fn from_columns(cols: &[Coloring]) -> Result<Self> {
        let k = cols.len();
        check_k(k)?;
        let n = cols[0].n();
        if cols.iter().any(|c| c.n() != n || c.k() != k) {
            return Err(Error::dim("columns must share n and k = number of columns"));
        }
        let mut cells = vec![SiteSet::empty(n); k * k];
        for (c, col) in cols.iter().enumerate() {
            for i in 0..n {
                cells[col.color(i) * k + c].insert(i);
            }
        }
        Ok(PartitionMatrix { n, k, cells })
    }

    /// Column `c` as a coloring: site `i` gets the row whose cell holds it.
    pub fn columns(&self) -> Vec<Coloring> {
        (0..self.k)
            .map(|c| {
                let mut word = vec![0u8; self.n];
                for r in 0..self.k {
                    for i in self.cell(r, c).iter() {
                        word[i] = r as u8;
                    }
                }
                Coloring::new_unchecked(self.k, word)
            })
            .collect()
    }

    /// A matrix sending `from` to `to` (exists for every pair).
    pub fn mapping(from: &Coloring, to: &Coloring) -> Result<Self> {
        same_shape(from, to)?;
        let (n, k) = (from.n(), from.k());
        let cols: Vec<Coloring> = (0..k)
            .map(|c| {
                let word = (0..n)
                    .map(|i| if from.color(i) == c { to.word[i] } else { 0 })
                    .collect();
                Coloring::new_unchecked(k, word)
            })
            .collect();
        PartitionMatrix::from_columns(&cols)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn cell(&self, r: usize, c: usize) -> &SiteSet {
        &self.cells[r * self.k + c]
    }

    /// `(a * b)_{ij} = union over l of a_{il} ∩ b_{lj}`.
    pub fn matmul(&self, b: &PartitionMatrix) -> Result<PartitionMatrix> {
        matmul(self, b)
    }

    pub fn act(&self, x: &Coloring) -> Result<Coloring> {
        act(self, x)
    }
}

impl Serialize for PartitionMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Vec<usize>>> = (0..self.k)
            .map(|r| {
                (0..self.k)
                    .map(|c| self.cell(r, c).iter().map(|i| i + 1).collect())
                    .collect()
            })
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PartitionMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rows: Vec<Vec<Vec<usize>>> = Vec::deserialize(d)?;
        let k = rows.len();
        let n = rows
            .iter()
            .flatten()
            .map(|cell| cell.len())
            .sum::<usize>()
            .checked_div(k.max(1))
            .unwrap_or(0);
        let mut cells = Vec::with_capacity(k * k);
        for row in &rows {
            if row.len() != k {
                return Err(D::Error::custom("partition matrix must be k x k"));
            }
            for cell in row {
                let sites: Vec<usize> = cell.iter().map(|&i| i.wrapping_sub(1)).collect();
                cells.push(SiteSet::from_sites(n, &sites).map_err(D::Error::custom)?);
            }
        }
        PartitionMatrix::new(n, k, cells).map_err(D::Error::custom)
    }
}

pub fn matmul(a: &PartitionMatrix, b: &PartitionMatrix) -> Result<PartitionMatrix> {
    if a.n != b.n || a.k != b.k {
        return Err(Error::dim(format!(
            "matmul of (n={}, k={}) and (n={}, k={})",
            a.n, a.k, b.n, b.k
        )));
    }
    let k = a.k;
    let mut cells = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let mut acc = SiteSet::empty(a.n);
            for l in 0..k {
                acc.union_with(&a.cell(i, l).intersect(b.cell(l, j)));
            }
            cells.push(acc);
        }
    }
    Ok(PartitionMatrix { n: a.n, k, cells })
}

/// Site `i` gets color `r` where `i` is in cell `(r, x[i])`.
pub fn act(m: &PartitionMatrix, x: &Coloring) -> Result<Coloring> {
    if m.n != x.n() || m.k != x.k() {
        return Err(Error::dim(format!(
            "matrix (n={}, k={}) acting on coloring (n={}, k={})",
            m.n,
            m.k,
            x.n(),
            x.k()
        )));
    }
    let word = (0..m.n)
        .map(|i| {
            let c = x.color(i);
            (0..m.k)
                .find(|&r| m.cell(r, c).contains(i))
                .expect("column is a partition") as u8
        })
        .collect();
    Ok(Coloring::new_unchecked(m.k, word))
}

/// The matrix whose action adds `x` coordinatewise in `Z/k`.
///
/// Column `j` holds the classes of `x` rotated by `j`, so that
/// `act(cyclic_shift_matrix(x), y)[i] = x[i] + y[i] mod k` (0-based colors;
/// with 1-based colors this is `x + y - 2 mod k + 1`).
pub fn cyclic_shift_matrix(x: &Coloring) -> PartitionMatrix {
    let (n, k) = (x.n(), x.k());
    let mut cells = vec![SiteSet::empty(n); k * k];
    for i in 0..n {
        for c in 0..k {
            let r = (x.color(i) + c) % k;
            cells[r * k + c].insert(i);
        }
    }
    PartitionMatrix { n, k, cells }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > MAX_K {
        return Err(Error::invalid(format!("k = {} outside 1..={}", k, MAX_K)));
    }
    Ok(())
}

pub(crate) fn same_shape(a: &Coloring, b: &Coloring) -> Result<()> {
    if a.n() != b.n() || a.k() != b.k() {
        return Err(Error::dim(format!(
            "colorings (n={}, k={}) and (n={}, k={})",
            a.n(),
            a.k(),
            b.n(),
            b.k()
        )));
    }
    Ok(())
}
