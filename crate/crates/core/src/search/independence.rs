//! Exact independence number by branch and bound over sets of support terms.
//!
//! A set `D` of terms is the result of a zeroing out iff its terms share no
//! variable and no mixed term `(x(t1), y(t2), z(t3))` with `t1, t2, t3 ∈ D`
//! not all equal lies in the support. Terms are ordered by
//! `(deg x, deg y, deg z, i, j, k)`; the search includes before it excludes,
//! so the first maximum set reached is the lexicographically least one in
//! that order.
//!
//! One worker runs a Russian-doll search: first terms are processed from the
//! last to the first, and the best size found in each suffix bounds every
//! later branch. Several workers split on the first included term instead and
//! take the answer from the smallest such term. Both return the same witness.

use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bits::Bits;
use crate::error::{Error, Result};
use crate::tensor::{AxisSubset, Tensor, Triple};

pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceWitness {
    pub kept: AxisSubset,
    pub triples: Vec<Triple>,
    pub size: usize,
}

impl IndependenceWitness {
    pub fn from_triples(mut triples: Vec<Triple>) -> Self {
        triples.sort();
        let kept = AxisSubset::new(
            triples.iter().map(|t| t.i),
            triples.iter().map(|t| t.j),
            triples.iter().map(|t| t.k),
        );
        IndependenceWitness {
            size: triples.len(),
            kept,
            triples,
        }
    }

    /// The zeroing out to `kept` must give exactly `triples`, and they must be independent.
    pub fn validate(&self, t: &Tensor) -> Result<()> {
        if !self.kept.within(t.dims()) {
            return Err(Error::InvalidWitness("kept variables out of range".into()));
        }
        let induced: Vec<Triple> = t.zero_out(&self.kept).support().collect();
        let mut listed = self.triples.clone();
        listed.sort();
        if induced != listed {
            return Err(Error::InvalidWitness(format!(
                "zeroing out leaves {} terms, witness lists {}",
                induced.len(),
                listed.len()
            )));
        }
        if self.size != listed.len() {
            return Err(Error::InvalidWitness(
                "size does not match the term count".into(),
            ));
        }
        let sub = Tensor::from_support(t.dims(), listed)?;
        if !sub.is_independent().0 {
            return Err(Error::InvalidWitness("terms share a variable".into()));
        }
        Ok(())
    }

    /// Witness for `A ⊗ B` from witnesses for `A` and `B` (row-major indices).
    pub fn product(
        &self,
        other: &IndependenceWitness,
        other_dims: [usize; 3],
    ) -> IndependenceWitness {
        let [bx, by, bz] = other_dims;
        IndependenceWitness::from_triples(
            self.triples
                .iter()
                .flat_map(|a| {
                    other
                        .triples
                        .iter()
                        .map(move |b| Triple::new(a.i * bx + b.i, a.j * by + b.j, a.k * bz + b.k))
                })
                .collect(),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Node limit across all workers.
    pub budget: u64,
    /// Worker threads; 0 and 1 both mean a single sequential worker.
    pub jobs: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: DEFAULT_NODE_BUDGET,
            jobs: 0,
        }
    }
}

impl SearchOptions {
    pub fn with_budget(budget: u64) -> Self {
        SearchOptions {
            budget,
            ..Default::default()
        }
    }

    pub(crate) fn run<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        if self.jobs <= 1 {
            return f();
        }
        match rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
        {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceResult {
    pub witness: IndependenceWitness,
    /// False when the node budget ran out: the size is then only a lower bound.
    pub exact: bool,
    pub nodes: u64,
}

enum Membership {
    Dense { dims: [usize; 3], bits: Bits },
    Sparse(HashSet<Triple>),
}

impl Membership {
    fn new(t: &Tensor) -> Self {
        let [x, y, z] = t.dims();
        let cells = x.saturating_mul(y).saturating_mul(z);
        if cells <= 1 << 27 {
            let mut bits = Bits::new(cells);
            for tr in t.support() {
                bits.insert((tr.i * y + tr.j) * z + tr.k);
            }
            Membership::Dense {
                dims: [x, y, z],
                bits,
            }
        } else {
            Membership::Sparse(t.support().collect())
        }
    }

    #[inline]
    fn has(&self, i: usize, j: usize, k: usize) -> bool {
        match self {
            Membership::Dense { dims, bits } => bits.contains((i * dims[1] + j) * dims[2] + k),
            Membership::Sparse(s) => s.contains(&Triple::new(i, j, k)),
        }
    }
}

struct Ctx {
    order: Vec<Triple>,
    compat: Vec<Bits>,
    member: Membership,
    dims: [usize; 3],
    budget: u64,
    nodes: AtomicU64,
    exhausted: AtomicBool,
    global_best: AtomicUsize,
}

impl Ctx {
    fn new(t: &Tensor, budget: u64) -> Self {
        let deg = t.degrees();
        let mut order: Vec<Triple> = t.support().collect();
        order.sort_by_key(|tr| (deg[0][tr.i], deg[1][tr.j], deg[2][tr.k], tr.i, tr.j, tr.k));
        let member = Membership::new(t);
        let n = order.len();
        let mut compat = vec![Bits::new(n); n];
        for a in 0..n {
            for b in a + 1..n {
                if pair_ok(&member, order[a], order[b]) {
                    compat[a].insert(b);
                    compat[b].insert(a);
                }
            }
        }
        Ctx {
            order,
            compat,
            member,
            dims: t.dims(),
            budget,
            nodes: AtomicU64::new(0),
            exhausted: AtomicBool::new(false),
            global_best: AtomicUsize::new(0),
        }
    }

    /// Candidates compatible with `c` and with every pair `(c, a)`, `a ∈ chosen`.
    fn filter(&self, cand: &mut Bits, c: usize, chosen: &[usize]) {
        cand.and_assign(&self.compat[c]);
        if chosen.is_empty() {
            return;
        }
        let tc = self.order[c];
        let drop: Vec<usize> = cand
            .iter()
            .filter(|&u| {
                let tu = self.order[u];
                chosen.iter().any(|&a| {
                    let ta = self.order[a];
                    let m = &self.member;
                    m.has(tu.i, tc.j, ta.k)
                        || m.has(tu.i, ta.j, tc.k)
                        || m.has(tc.i, tu.j, ta.k)
                        || m.has(ta.i, tu.j, tc.k)
                        || m.has(tc.i, ta.j, tu.k)
                        || m.has(ta.i, tc.j, tu.k)
                })
            })
            .collect();
        for u in drop {
            cand.remove(u);
        }
    }

    /// Whether `cand` can still contribute at least `need` more terms.
    fn can_reach(&self, cand: &Bits, need: usize) -> bool {
        if need == 0 {
            return true;
        }
        if cand.len() < need {
            return false;
        }
        for axis in 0..3 {
            let mut seen = Bits::new(self.dims[axis]);
            let mut count = 0;
            for u in cand.iter() {
                let v = self.order[u].to_array()[axis];
                if !seen.contains(v) {
                    seen.insert(v);
                    count += 1;
                }
            }
            if count < need {
                return false;
            }
        }
        // Greedy colouring: each class is pairwise incompatible, so it holds at most one term of D.
        let mut uncoloured = cand.clone();
        let mut colours = 0;
        while !uncoloured.is_empty() {
            colours += 1;
            if colours >= need {
                return true;
            }
            let mut class = uncoloured.clone();
            while let Some(v) = class.first() {
                class.remove(v);
                uncoloured.remove(v);
                class.and_not_assign(&self.compat[v]);
            }
        }
        false
    }

    fn tick(&self) -> bool {
        if self.exhausted.load(Ordering::Relaxed) {
            return false;
        }
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.exhausted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    fn expand(&self, chosen: &mut Vec<usize>, mut cand: Bits, best: &mut Vec<usize>) -> bool {
        if chosen.len() > best.len() {
            *best = chosen.clone();
            self.global_best.fetch_max(best.len(), Ordering::Relaxed);
        }
        loop {
            if !self.tick() {
                return false;
            }
            if cand.is_empty() {
                return true;
            }
            let target = (best.len() + 1).max(self.global_best.load(Ordering::Relaxed));
            if chosen.len() + cand.len() < target
                || !self.can_reach(&cand, target.saturating_sub(chosen.len()))
            {
                return true;
            }
            let c = cand.first().expect("nonempty");
            cand.remove(c);
            let mut inc = cand.clone();
            self.filter(&mut inc, c, chosen);
            chosen.push(c);
            let go_on = self.expand(chosen, inc, best);
            chosen.pop();
            if !go_on {
                return false;
            }
        }
    }

    /// Russian-doll step: the best set with smallest term `chosen[0]` and
    /// size at least `floor`, where `suffix[u]` bounds sets drawn from terms `≥ u`.
    /// Stops early at `floor + 1`, which no set with this first term can beat.
    fn doll(
        &self,
        chosen: &mut Vec<usize>,
        mut cand: Bits,
        best: &mut Vec<usize>,
        floor: usize,
        suffix: &[usize],
    ) -> Step {
        if chosen.len() > best.len() && chosen.len() >= floor {
            *best = chosen.clone();
            if best.len() > floor {
                return Step::Done;
            }
        }
        loop {
            if !self.tick() {
                return Step::Exhausted;
            }
            let Some(u) = cand.first() else {
                return Step::Continue;
            };
            let need = (best.len() + 1).max(floor).saturating_sub(chosen.len());
            if suffix[u] < need || !self.can_reach(&cand, need) {
                return Step::Continue;
            }
            cand.remove(u);
            let mut inc = cand.clone();
            self.filter(&mut inc, u, chosen);
            chosen.push(u);
            let step = self.doll(chosen, inc, best, floor, suffix);
            chosen.pop();
            if !matches!(step, Step::Continue) {
                return step;
            }
        }
    }

    fn russian_doll(&self) -> Vec<usize> {
        let n = self.order.len();
        let mut suffix = vec![0; n + 1];
        let mut best = Vec::new();
        for f in (0..n).rev() {
            let mut cand = Bits::new(n);
            for u in f + 1..n {
                cand.insert(u);
            }
            self.filter(&mut cand, f, &[]);
            let floor = suffix[f + 1];
            let mut local = Vec::new();
            let step = self.doll(&mut vec![f], cand, &mut local, floor, &suffix);
            suffix[f] = floor.max(local.len());
            // Ties go to the smaller first term.
            if !local.is_empty() && local.len() >= best.len() {
                best = local;
            }
            if matches!(step, Step::Exhausted) {
                break;
            }
        }
        best
    }

    /// Best set among those whose first (smallest) term is `first`.
    fn task(&self, first: usize) -> Vec<usize> {
        let n = self.order.len();
        let mut cand = Bits::new(n);
        for u in first + 1..n {
            cand.insert(u);
        }
        self.filter(&mut cand, first, &[]);
        let mut chosen = vec![first];
        let mut best = Vec::new();
        if self.global_best.load(Ordering::Relaxed) <= 1 + cand.len() {
            self.expand(&mut chosen, cand, &mut best);
        }
        best
    }
}

enum Step {
    Continue,
    Done,
    Exhausted,
}

fn pair_ok(m: &Membership, a: Triple, b: Triple) -> bool {
    a.i != b.i
        && a.j != b.j
        && a.k != b.k
        && !m.has(a.i, a.j, b.k)
        && !m.has(a.i, b.j, a.k)
        && !m.has(b.i, a.j, a.k)
        && !m.has(a.i, b.j, b.k)
        && !m.has(b.i, a.j, b.k)
        && !m.has(b.i, b.j, a.k)
}

/// Maximum-size independent zeroing out of `t`.
pub fn exact_independence(t: &Tensor, opts: SearchOptions) -> IndependenceResult {
    let ctx = Ctx::new(t, opts.budget);
    let n = ctx.order.len();
    let best = if opts.jobs <= 1 {
        ctx.russian_doll()
    } else {
        let per_first: Vec<Vec<usize>> =
            opts.run(|| (0..n).into_par_iter().map(|f| ctx.task(f)).collect());
        // Largest size wins; among equal sizes the smallest first term.
        let mut best: Vec<usize> = Vec::new();
        for set in per_first {
            if set.len() > best.len() {
                best = set;
            }
        }
        best
    };
    let witness = IndependenceWitness::from_triples(best.iter().map(|&u| ctx.order[u]).collect());
    IndependenceResult {
        witness,
        exact: !ctx.exhausted.load(Ordering::Relaxed),
        nodes: ctx.nodes.load(Ordering::Relaxed),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerIndependence {
    pub n: usize,
    pub result: IndependenceResult,
    /// `I(T^⊗n)^{1/n}`, a lower bound on the asymptotic independence number.
    pub root: f64,
}

pub fn independence_of_power(
    t: &Tensor,
    n: usize,
    opts: SearchOptions,
    max_support: usize,
) -> Result<PowerIndependence> {
    let p = t.power(n, max_support)?;
    let result = exact_independence(&p, opts);
    let root = (result.witness.size as f64).powf(1.0 / n as f64);
    Ok(PowerIndependence { n, result, root })
}
