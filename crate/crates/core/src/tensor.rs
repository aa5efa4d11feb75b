//! Sparse trilinear tensors with exact rational coefficients.
//!
//! A tensor is a finite map from index triples `(i, j, k)` to nonzero
//! rationals, over three axes of fixed dimension. Dense arrays are never
//! materialized: all structural operations work on the support directly.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Default cap on the support size produced by [`Tensor::power`].
pub const DEFAULT_SUPPORT_BUDGET: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }
}

/// A term `x_i y_j z_k`, zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 3]", into = "[usize; 3]")]
pub struct Triple {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl Triple {
    pub const fn new(i: usize, j: usize, k: usize) -> Self {
        Triple { i, j, k }
    }

    pub fn from_array([i, j, k]: [usize; 3]) -> Self {
        Triple { i, j, k }
    }

    pub fn to_array(self) -> [usize; 3] {
        [self.i, self.j, self.k]
    }

    pub fn get(self, axis: Axis) -> usize {
        match axis {
            Axis::X => self.i,
            Axis::Y => self.j,
            Axis::Z => self.k,
        }
    }

    fn in_range(self, dims: [usize; 3]) -> bool {
        self.i < dims[0] && self.j < dims[1] && self.k < dims[2]
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}y{}z{}", self.i, self.j, self.k)
    }
}

impl From<[usize; 3]> for Triple {
    fn from(a: [usize; 3]) -> Self {
        Triple::from_array(a)
    }
}

impl From<Triple> for [usize; 3] {
    fn from(t: Triple) -> Self {
        t.to_array()
    }
}

impl From<(usize, usize, usize)> for Triple {
    fn from((i, j, k): (usize, usize, usize)) -> Self {
        Triple { i, j, k }
    }
}

/// Human-readable variable names, one list per axis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labels {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub z: Vec<String>,
}

impl Labels {
    pub fn axis(&self, axis: Axis) -> &[String] {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
            Axis::Z => &self.z,
        }
    }

    /// Labels `prefix0 .. prefix{n-1}` on each axis.
    pub fn indexed(dims: [usize; 3]) -> Self {
        let names = |c: char, n: usize| (0..n).map(|i| format!("{c}{i}")).collect();
        Labels {
            x: names('x', dims[0]),
            y: names('y', dims[1]),
            z: names('z', dims[2]),
        }
    }

    fn validate(&self, dims: [usize; 3]) -> Result<()> {
        for axis in Axis::ALL {
            let got = self.axis(axis).len();
            let expected = dims[axis.index()];
            if got != expected {
                return Err(Error::LabelLength {
                    axis: axis.letter(),
                    got,
                    expected,
                });
            }
        }
        Ok(())
    }
}

/// Three per-axis index sets, used both for zeroing out and for the
/// variables a tensor actually touches.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AxisSubset {
    pub x: BTreeSet<usize>,
    pub y: BTreeSet<usize>,
    pub z: BTreeSet<usize>,
}

impl AxisSubset {
    pub fn new(
        x: impl IntoIterator<Item = usize>,
        y: impl IntoIterator<Item = usize>,
        z: impl IntoIterator<Item = usize>,
    ) -> Self {
        AxisSubset {
            x: x.into_iter().collect(),
            y: y.into_iter().collect(),
            z: z.into_iter().collect(),
        }
    }

    pub fn full(dims: [usize; 3]) -> Self {
        AxisSubset::new(0..dims[0], 0..dims[1], 0..dims[2])
    }

    pub fn axis(&self, axis: Axis) -> &BTreeSet<usize> {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
            Axis::Z => &self.z,
        }
    }

    pub fn axis_mut(&mut self, axis: Axis) -> &mut BTreeSet<usize> {
        match axis {
            Axis::X => &mut self.x,
            Axis::Y => &mut self.y,
            Axis::Z => &mut self.z,
        }
    }

    pub fn contains(&self, t: Triple) -> bool {
        self.x.contains(&t.i) && self.y.contains(&t.j) && self.z.contains(&t.k)
    }

    pub fn sizes(&self) -> [usize; 3] {
        [self.x.len(), self.y.len(), self.z.len()]
    }

    pub fn is_subset_of(&self, other: &AxisSubset) -> bool {
        self.x.is_subset(&other.x) && self.y.is_subset(&other.y) && self.z.is_subset(&other.z)
    }

    pub fn within(&self, dims: [usize; 3]) -> bool {
        Axis::ALL
            .iter()
            .all(|&a| self.axis(a).iter().all(|&v| v < dims[a.index()]))
    }
}

/// Sparse trilinear form `Σ T_ijk x_i y_j z_k` with nonzero rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    dims: [usize; 3],
    labels: Option<Labels>,
    terms: BTreeMap<Triple, Rational>,
}

impl Tensor {
    /// Validates dimensions, indices and coefficients.
    pub fn new(
        dims: [usize; 3],
        terms: impl IntoIterator<Item = (Triple, Rational)>,
    ) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidDims(dims));
        }
        let mut map = BTreeMap::new();
        for (t, c) in terms {
            if !t.in_range(dims) {
                return Err(Error::IndexOutOfRange { triple: t, dims });
            }
            if c.is_zero() {
                return Err(Error::ZeroCoefficient(t));
            }
            if map.insert(t, c).is_some() {
                return Err(Error::DuplicateTriple(t));
            }
        }
        Ok(Tensor {
            dims,
            labels: None,
            terms: map,
        })
    }

    /// A 0/1 tensor on the given support.
    pub fn from_support(
        dims: [usize; 3],
        support: impl IntoIterator<Item = Triple>,
    ) -> Result<Self> {
        Tensor::new(dims, support.into_iter().map(|t| (t, Rational::one())))
    }

    pub fn empty(dims: [usize; 3]) -> Result<Self> {
        Tensor::new(dims, std::iter::empty())
    }

    pub fn with_labels(mut self, labels: Labels) -> Result<Self> {
        labels.validate(self.dims)?;
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn without_labels(mut self) -> Self {
        self.labels = None;
        self
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn dim(&self, axis: Axis) -> usize {
        self.dims[axis.index()]
    }

    /// `|T|`, the support size.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Triple, &Rational)> + '_ {
        self.terms.iter().map(|(t, c)| (*t, c))
    }

    /// Support triples in lexicographic order.
    pub fn support(&self) -> impl Iterator<Item = Triple> + '_ {
        self.terms.keys().copied()
    }

    pub fn support_set(&self) -> BTreeSet<Triple> {
        self.terms.keys().copied().collect()
    }

    pub fn coefficient(&self, t: Triple) -> Option<&Rational> {
        self.terms.get(&t)
    }

    pub fn contains(&self, t: Triple) -> bool {
        self.terms.contains_key(&t)
    }

    pub fn is_square(&self) -> bool {
        self.dims[0] == self.dims[1] && self.dims[1] == self.dims[2]
    }

    /// True when every coefficient equals one.
    pub fn is_zero_one(&self) -> bool {
        self.terms.values().all(|c| c.is_one())
    }

    /// Same support pattern on the same dimensions.
    pub fn same_support(&self, other: &Tensor) -> bool {
        self.dims == other.dims && self.terms.keys().eq(other.terms.keys())
    }

    /// `self ⊆ other`: every term of `self` appears in `other` with the same coefficient.
    pub fn is_subtensor_of(&self, other: &Tensor) -> bool {
        self.dims == other.dims
            && self
                .terms
                .iter()
                .all(|(t, c)| other.terms.get(t) == Some(c))
    }

    /// Keeps only the support triples accepted by `keep`; dimensions unchanged.
    pub fn filter(&self, mut keep: impl FnMut(Triple, &Rational) -> bool) -> Tensor {
        Tensor {
            dims: self.dims,
            labels: self.labels.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(t, c)| keep(**t, c))
                .map(|(t, c)| (*t, c.clone()))
                .collect(),
        }
    }

    /// Number of support terms touching each variable, per axis.
    pub fn degrees(&self) -> [Vec<usize>; 3] {
        let mut deg = [
            vec![0; self.dims[0]],
            vec![0; self.dims[1]],
            vec![0; self.dims[2]],
        ];
        for t in self.support() {
            deg[0][t.i] += 1;
            deg[1][t.j] += 1;
            deg[2][t.k] += 1;
        }
        deg
    }

    /// Kronecker product. Index pairing is row-major: `(i, i')` becomes
    /// `i * other.dim(X) + i'`, and likewise on the other axes.
    pub fn tensor_product(&self, other: &Tensor) -> Tensor {
        let [bx, by, bz] = other.dims;
        let dims = [self.dims[0] * bx, self.dims[1] * by, self.dims[2] * bz];
        let mut terms = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let t = Triple::new(a.i * bx + b.i, a.j * by + b.j, a.k * bz + b.k);
                terms.insert(t, ca * cb);
            }
        }
        let labels = match (&self.labels, &other.labels) {
            (Some(la), Some(lb)) => Some(Labels {
                x: pair_labels(&la.x, &lb.x),
                y: pair_labels(&la.y, &lb.y),
                z: pair_labels(&la.z, &lb.z),
            }),
            _ => None,
        };
        Tensor {
            dims,
            labels,
            terms,
        }
    }

    /// `n`-fold Kronecker power. Fails if the support would exceed `max_support`.
    ///
    /// Axis index `idx` of the power decodes to the base-index tuple
    /// returned by [`decode_power_index`] (first coordinate most significant).
    pub fn power(&self, n: usize, max_support: usize) -> Result<Tensor> {
        if n == 0 {
            return Err(Error::invalid("tensor power exponent must be positive"));
        }
        let required = (self.len() as u128)
            .checked_pow(n as u32)
            .unwrap_or(u128::MAX);
        if required > max_support as u128 {
            return Err(Error::BudgetExceeded {
                required,
                budget: max_support as u128,
            });
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = self.tensor_product(&acc);
        }
        Ok(acc)
    }

    /// Block-diagonal direct sum: `other` occupies the index range after `self` on every axis.
    pub fn direct_sum(&self, other: &Tensor) -> Tensor {
        let [ox, oy, oz] = self.dims;
        let dims = [ox + other.dims[0], oy + other.dims[1], oz + other.dims[2]];
        let mut terms = self.terms.clone();
        for (t, c) in &other.terms {
            terms.insert(Triple::new(t.i + ox, t.j + oy, t.k + oz), c.clone());
        }
        let labels = match (&self.labels, &other.labels) {
            (Some(la), Some(lb)) => Some(Labels {
                x: la.x.iter().chain(&lb.x).cloned().collect(),
                y: la.y.iter().chain(&lb.y).cloned().collect(),
                z: la.z.iter().chain(&lb.z).cloned().collect(),
            }),
            _ => None,
        };
        Tensor {
            dims,
            labels,
            terms,
        }
    }

    /// Zeroes every variable outside `keep`. Dimensions are unchanged so
    /// weight maps on the original axes still apply to the result.
    pub fn zero_out(&self, keep: &AxisSubset) -> Tensor {
        self.filter(|t, _| keep.contains(t))
    }

    /// The variables appearing in at least one support term.
    pub fn minimal_sets(&self) -> AxisSubset {
        let mut s = AxisSubset::default();
        for t in self.support() {
            s.x.insert(t.i);
            s.y.insert(t.j);
            s.z.insert(t.k);
        }
        s
    }

    /// `μ(T) = |X'|·|Y'|·|Z'|` over the minimal variable sets.
    pub fn measure(&self) -> u128 {
        let [a, b, c] = self.minimal_sets().sizes();
        a as u128 * b as u128 * c as u128
    }

    /// Exact ranks of the three flattenings `T_X`, `T_Y`, `T_Z`.
    pub fn flattening_ranks(&self) -> FlatteningRanks {
        let mut ranks = [0usize; 3];
        for axis in Axis::ALL {
            let mut rows: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); self.dim(axis)];
            for (t, c) in &self.terms {
                let (row, col) = match axis {
                    Axis::X => (t.i, t.j * self.dims[2] + t.k),
                    Axis::Y => (t.j, t.i * self.dims[2] + t.k),
                    Axis::Z => (t.k, t.i * self.dims[1] + t.j),
                };
                rows[row].insert(col, c.clone());
            }
            ranks[axis.index()] = exact_rank(rows);
        }
        let concise = ranks == self.dims;
        FlatteningRanks { ranks, concise }
    }

    /// Whether the support is an independent tensor `⟨r⟩` up to index
    /// permutation: no variable occurs in two support terms.
    pub fn is_independent(&self) -> (bool, usize) {
        let mut seen: [HashSet<usize>; 3] = Default::default();
        let ok = self
            .support()
            .all(|t| seen[0].insert(t.i) && seen[1].insert(t.j) && seen[2].insert(t.k));
        (ok, self.len())
    }

    /// Support triples grouped by the variable they use on `axis`.
    pub fn incidence(&self, axis: Axis) -> Vec<Vec<Triple>> {
        let mut inc = vec![Vec::new(); self.dim(axis)];
        for t in self.support() {
            inc[t.get(axis)].push(t);
        }
        inc
    }

    /// Replaces the axis indices through `maps` (one injective map per axis)
    /// onto new dimensions. Used for relabelling and for embeddings.
    pub fn relabel(&self, new_dims: [usize; 3], maps: &[Vec<usize>; 3]) -> Result<Tensor> {
        Tensor::new(
            new_dims,
            self.terms.iter().map(|(t, c)| {
                (
                    Triple::new(maps[0][t.i], maps[1][t.j], maps[2][t.k]),
                    c.clone(),
                )
            }),
        )
    }
}

impl fmt::Display for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (t, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            if !c.is_one() {
                write!(f, "{c}·")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

fn pair_labels(a: &[String], b: &[String]) -> Vec<String> {
    a.iter()
        .flat_map(|l| b.iter().map(move |r| format!("({l},{r})")))
        .collect()
}

/// Decodes an axis index of an `n`-th Kronecker power into base indices,
/// first coordinate most significant.
pub fn decode_power_index(mut idx: usize, base_dim: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = idx % base_dim;
        idx /= base_dim;
    }
    out
}

/// Inverse of [`decode_power_index`].
pub fn encode_power_index(coords: &[usize], base_dim: usize) -> usize {
    coords.iter().fold(0, |acc, &c| acc * base_dim + c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatteningRanks {
    pub ranks: [usize; 3],
    pub concise: bool,
}

/// Rank of a sparse rational matrix by fraction-free elimination: each row
/// is scaled to primitive integers and reduced against pivot rows with
/// integer cross-multiplication.
fn exact_rank(rows: Vec<BTreeMap<usize, Rational>>) -> usize {
    let mut pivots: BTreeMap<usize, BTreeMap<usize, BigInt>> = BTreeMap::new();
    for row in rows {
        let mut r = integer_row(&row);
        while let Some((&lead, _)) = r.iter().next() {
            let Some(p) = pivots.get(&lead) else {
                pivots.insert(lead, r);
                break;
            };
            let a = p[&lead].clone();
            let b = r[&lead].clone();
            let mut next: BTreeMap<usize, BigInt> = BTreeMap::new();
            for (col, v) in &r {
                next.insert(*col, v * &a);
            }
            for (col, v) in p {
                let e = next.entry(*col).or_insert_with(BigInt::zero);
                *e -= v * &b;
            }
            next.retain(|_, v| !v.is_zero());
            r = primitive(next);
        }
    }
    pivots.len()
}

fn integer_row(row: &BTreeMap<usize, Rational>) -> BTreeMap<usize, BigInt> {
    let lcm = row
        .values()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let scaled = row
        .iter()
        .map(|(c, v)| (*c, (v * Rational::from_integer(lcm.clone())).to_integer()))
        .collect();
    primitive(scaled)
}

fn primitive(mut row: BTreeMap<usize, BigInt>) -> BTreeMap<usize, BigInt> {
    let g = row.values().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for v in row.values_mut() {
            *v /= &g;
        }
    }
    if let Some(v) = row.values().next() {
        if v.is_negative() {
            for v in row.values_mut() {
                *v = -v.clone();
            }
        }
    }
    row
}

/// A set partition of a tensor's support into ordered parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    parts: Vec<BTreeSet<Triple>>,
}

impl Partition {
    /// Builds a partition from a total assignment `triple -> part index`.
    pub fn new(tensor: &Tensor, assignment: &BTreeMap<Triple, usize>) -> Result<Self> {
        if let Some(t) = assignment.keys().find(|t| !tensor.contains(**t)) {
            return Err(Error::TripleNotInSupport(*t));
        }
        if let Some(t) = tensor.support().find(|t| !assignment.contains_key(t)) {
            return Err(Error::MissingTriple(t));
        }
        let count = assignment.values().max().map_or(0, |m| m + 1);
        let mut parts = vec![BTreeSet::new(); count];
        for (t, p) in assignment {
            parts[*p].insert(*t);
        }
        Ok(Partition { parts })
    }

    /// Every support term in one part.
    pub fn trivial(tensor: &Tensor) -> Self {
        Partition {
            parts: vec![tensor.support_set()],
        }
    }

    pub fn parts(&self) -> &[BTreeSet<Triple>] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Part `idx` as a sub-tensor of `tensor` on the same axes.
    pub fn part_tensor(&self, tensor: &Tensor, idx: usize) -> Tensor {
        let part = &self.parts[idx];
        tensor.filter(|t, _| part.contains(&t))
    }

    pub fn part_tensors(&self, tensor: &Tensor) -> Vec<Tensor> {
        (0..self.parts.len())
            .map(|i| self.part_tensor(tensor, i))
            .collect()
    }

    /// Checks the partition still matches `tensor` exactly.
    pub fn is_valid_for(&self, tensor: &Tensor) -> bool {
        let mut seen = HashSet::new();
        for part in &self.parts {
            for t in part {
                if !tensor.contains(*t) || !seen.insert(*t) {
                    return false;
                }
            }
        }
        seen.len() == tensor.len()
    }
}

/// Index lookup from `(i, j)` to the z-indices completing a support term.
/// Used by searches that need the mixed-triple test in constant time.
#[derive(Clone, Debug)]
pub struct SupportIndex {
    pub set: HashSet<Triple>,
    pub xy: HashMap<(usize, usize), Vec<usize>>,
}

impl SupportIndex {
    pub fn new(tensor: &Tensor) -> Self {
        let mut xy: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for t in tensor.support() {
            xy.entry((t.i, t.j)).or_default().push(t.k);
        }
        SupportIndex {
            set: tensor.support().collect(),
            xy,
        }
    }

    pub fn contains(&self, t: Triple) -> bool {
        self.set.contains(&t)
    }
}
