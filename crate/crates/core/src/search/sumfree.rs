//! Tri-colored sum-free sets in powers of a finite group, obtained from
//! independent sub-tensors of group tensor powers.

use serde::{Deserialize, Serialize};

use super::independence::{IndependenceResult, IndependenceWitness, SearchOptions};
use crate::catalog;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::tensor::{decode_power_index, encode_power_index, Triple, DEFAULT_SUPPORT_BUDGET};

/// Triples `(a, b, c)` of elements of `G^n`, each element an n-tuple of
/// element indices of the base group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumFreeSet {
    pub group: String,
    pub power: usize,
    pub triples: Vec<[Vec<usize>; 3]>,
}

impl SumFreeSet {
    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }
}

/// Reads a sum-free set off an independent sub-tensor of `T_G^{⊗n}`.
pub fn extract_sumfree(g: &Group, n: usize, w: &IndependenceWitness) -> Result<SumFreeSet> {
    if n == 0 {
        return Err(Error::invalid("power must be at least 1"));
    }
    let t = catalog::group_tensor(g)
        .tensor
        .power(n, DEFAULT_SUPPORT_BUDGET)?;
    w.validate(&t)?;
    let d = g.order();
    let triples = w
        .triples
        .iter()
        .map(|t| {
            [
                decode_power_index(t.i, d, n),
                decode_power_index(t.j, d, n),
                decode_power_index(t.k, d, n),
            ]
        })
        .collect();
    Ok(SumFreeSet {
        group: g.name().to_string(),
        power: n,
        triples,
    })
}

/// Checks `ab = c` on every triple and `a₁b₂ ≠ c₃` over all ordered triples
/// of indices that are not all equal.
pub fn verify_sumfree(g: &Group, n: usize, s: &SumFreeSet) -> bool {
    let valid_elem = |e: &Vec<usize>| e.len() == n && e.iter().all(|&x| x < g.order());
    if s.power != n || !s.triples.iter().all(|t| t.iter().all(valid_elem)) {
        return false;
    }
    if s.triples.iter().any(|[a, b, c]| g.mul_tuple(a, b) != *c) {
        return false;
    }
    let m = s.triples.len();
    for p in 0..m {
        for q in 0..m {
            let ab = g.mul_tuple(&s.triples[p][0], &s.triples[q][1]);
            for r in 0..m {
                if !(p == q && q == r) && ab == s.triples[r][2] {
                    return false;
                }
            }
        }
    }
    true
}

/// Multiplication table of `G^n` on row-major element indices.
struct PowerGroup {
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
    identity: usize,
}

impl PowerGroup {
    fn new(g: &Group, n: usize) -> Self {
        let d = g.order();
        let size = d.pow(n as u32);
        let elems: Vec<Vec<usize>> = (0..size).map(|x| decode_power_index(x, d, n)).collect();
        let mul: Vec<Vec<usize>> = elems
            .iter()
            .map(|a| {
                elems
                    .iter()
                    .map(|b| encode_power_index(&g.mul_tuple(a, b), d))
                    .collect()
            })
            .collect();
        let identity = encode_power_index(&vec![g.identity(); n], d);
        let inv = (0..size)
            .map(|a| (0..size).find(|&b| mul[a][b] == identity).expect("group"))
            .collect();
        PowerGroup { mul, inv, identity }
    }
}

/// Maps on `G^n` fixing `e` that preserve sum-freeness when applied to all
/// three coordinates: automorphisms of one factor, factor swaps and, for
/// abelian `G`, the shear `x₁ ↦ x₁x₀`. Together with the two role maps in
/// [`pair_orbits`] they generate the symmetries used by the search.
fn element_symmetries(g: &Group, n: usize) -> Vec<Vec<usize>> {
    let d = g.order();
    let size = d.pow(n as u32);
    let lift = |f: &dyn Fn(&mut Vec<usize>)| -> Vec<usize> {
        (0..size)
            .map(|x| {
                let mut v = decode_power_index(x, d, n);
                f(&mut v);
                encode_power_index(&v, d)
            })
            .collect()
    };
    let mut maps: Vec<Vec<usize>> = g
        .automorphisms()
        .iter()
        .map(|aut| lift(&|v: &mut Vec<usize>| v[0] = aut[v[0]]))
        .collect();
    if n >= 2 {
        maps.push(lift(&|v: &mut Vec<usize>| v.swap(0, 1)));
        maps.push(lift(&|v: &mut Vec<usize>| v.rotate_left(1)));
        if g.is_abelian() {
            maps.push(lift(&|v: &mut Vec<usize>| v[1] = g.mul(v[1], v[0])));
        }
    }
    maps
}

/// Orbit label of every pair `(a, b)`, index `a·|G^n| + b`.
fn pair_orbits(pg: &PowerGroup, maps: &[Vec<usize>]) -> Vec<usize> {
    let size = pg.inv.len();
    let mut parent: Vec<usize> = (0..size * size).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut join = |x: usize, y: usize| {
        let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
        parent[rx.max(ry)] = rx.min(ry);
    };
    for a in 0..size {
        for b in 0..size {
            let here = a * size + b;
            for f in maps {
                join(here, f[a] * size + f[b]);
            }
            // (a, b, c) ↦ (b⁻¹, a⁻¹, c⁻¹) and (a, b, c) ↦ (c, b⁻¹, a).
            join(here, pg.inv[b] * size + pg.inv[a]);
            join(here, pg.mul[a][b] * size + pg.inv[b]);
        }
    }
    (0..size * size).map(|x| find(&mut parent, x)).collect()
}

#[derive(Clone, Copy)]
struct Cand {
    a: u8,
    b: u8,
    c: u8,
}

/// Elements ruled out on each axis: used ones and those that would close a
/// product `a_i b_j = c_k` with `i, j, k` not all equal.
#[derive(Clone, Copy, Default)]
struct Blocked([u128; 3]);

impl Blocked {
    fn admits(&self, t: Cand) -> bool {
        self.0[0] >> t.a & 1 == 0 && self.0[1] >> t.b & 1 == 0 && self.0[2] >> t.c & 1 == 0
    }
}

struct SumFreeSearch<'a> {
    g: &'a PowerGroup,
    budget: u64,
    nodes: u64,
    exhausted: bool,
    chosen: Vec<Cand>,
    best: Vec<Cand>,
}

impl SumFreeSearch<'_> {
    fn add(&self, blocked: Blocked, t: Cand) -> Blocked {
        let (m, inv) = (&self.g.mul, &self.g.inv);
        let (a, b, c) = (t.a as usize, t.b as usize, t.c as usize);
        let mut out = blocked.0;
        out[0] |= 1 << a;
        out[1] |= 1 << b;
        out[2] |= 1 << c;
        for s in &self.chosen {
            let (sa, sb, sc) = (s.a as usize, s.b as usize, s.c as usize);
            out[0] |= 1 << m[c][inv[sb]] | 1 << m[sc][inv[b]];
            out[1] |= 1 << m[inv[a]][sc] | 1 << m[inv[sa]][c];
            out[2] |= 1 << m[a][sb] | 1 << m[sa][b];
        }
        Blocked(out)
    }

    fn push(&mut self, blocked: Blocked, t: Cand) -> Blocked {
        let next = self.add(blocked, t);
        self.chosen.push(t);
        if self.chosen.len() > self.best.len() {
            self.best = self.chosen.clone();
        }
        next
    }

    fn dfs(&mut self, cands: &[Cand], blocked: Blocked) {
        let mut axes = [0u128; 3];
        for t in cands {
            axes[0] |= 1 << t.a;
            axes[1] |= 1 << t.b;
            axes[2] |= 1 << t.c;
        }
        let room = axes
            .iter()
            .map(|x| x.count_ones() as usize)
            .min()
            .unwrap_or(0);
        if self.chosen.len() + room <= self.best.len() {
            return;
        }
        for (u, &t) in cands.iter().enumerate() {
            if self.chosen.len() + cands.len() - u <= self.best.len() {
                return;
            }
            if self.nodes >= self.budget {
                self.exhausted = true;
                return;
            }
            self.nodes += 1;
            let next_blocked = self.push(blocked, t);
            let next: Vec<Cand> = cands[u + 1..]
                .iter()
                .copied()
                .filter(|&s| next_blocked.admits(s))
                .collect();
            self.dfs(&next, next_blocked);
            self.chosen.pop();
        }
    }
}

/// Largest tri-colored sum-free set in `G^n` by exhaustive search over the
/// group itself, returned as an independent zeroing out of `T_G^{⊗n}`.
///
/// Translating `(a, b, c) ↦ (ua, bv, uabv)` preserves sum-freeness, so every
/// set can be moved to contain `(e, e, e)`. Symmetries fixing `(e, e, e)`
/// then split the remaining triples into orbits: the search for the `i`-th
/// orbit adds its representative and skips the earlier orbits, which were
/// already covered. Limited to `|G|^n ≤ 128`.
pub fn sumfree_search(g: &Group, n: usize, opts: SearchOptions) -> Result<IndependenceResult> {
    if n == 0 {
        return Err(Error::invalid("power must be at least 1"));
    }
    let size = g
        .order()
        .checked_pow(n as u32)
        .filter(|&s| s <= 128)
        .ok_or_else(|| {
            Error::invalid("group power too large for the sum-free search (limit 128 elements)")
        })?;
    let pg = PowerGroup::new(g, n);
    let e = pg.identity as u8;
    let first = Cand { a: e, b: e, c: e };
    let mut search = SumFreeSearch {
        g: &pg,
        budget: opts.budget.max(1),
        nodes: 1,
        exhausted: false,
        chosen: vec![],
        best: vec![],
    };
    let root = search.push(Blocked::default(), first);
    let orbit = pair_orbits(&pg, &element_symmetries(g, n));
    let cands: Vec<(usize, Cand)> = (0..size)
        .flat_map(|a| (0..size).map(move |b| (a, b)))
        .map(|(a, b)| {
            let t = Cand {
                a: a as u8,
                b: b as u8,
                c: pg.mul[a][b] as u8,
            };
            (orbit[a * size + b], t)
        })
        .filter(|&(_, t)| root.admits(t))
        .collect();
    let mut done = std::collections::BTreeSet::new();
    for &(o, rep) in &cands {
        if done.contains(&o) || search.exhausted {
            continue;
        }
        search.nodes += 1;
        let blocked = search.push(root, rep);
        let rest: Vec<Cand> = cands
            .iter()
            .filter(|&&(p, t)| !done.contains(&p) && blocked.admits(t))
            .map(|&(_, t)| t)
            .collect();
        search.dfs(&rest, blocked);
        search.chosen.pop();
        done.insert(o);
    }
    let triples = search
        .best
        .iter()
        .map(|t| Triple::new(t.a as usize, t.b as usize, t.c as usize))
        .collect();
    Ok(IndependenceResult {
        witness: IndependenceWitness::from_triples(triples),
        exact: !search.exhausted,
        nodes: search.nodes,
    })
}
