//! Sub-tensor embedding search: axis injections mapping every support term
//! of `A` onto a support term of `B`, by backtracking with forward checking.

use std::collections::{BTreeSet, HashSet};
use std::sync::atomic::{AtomicU64, Ordering};

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::bits::Bits;
use super::independence::SearchOptions;
use crate::degeneration::{verify_monomial_degeneration, MonomialMap};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::tensor::{Rational, Tensor, Triple};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingWitness {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub z: Vec<usize>,
}

impl EmbeddingWitness {
    pub fn map(&self, t: Triple) -> Triple {
        Triple::new(self.x[t.i], self.y[t.j], self.z[t.k])
    }

    fn axes(&self) -> [&Vec<usize>; 3] {
        [&self.x, &self.y, &self.z]
    }

    /// Injective on every axis and maps each term of `a` into the support of `b`.
    pub fn validate(&self, a: &Tensor, b: &Tensor) -> Result<()> {
        for (axis, m) in self.axes().into_iter().enumerate() {
            if m.len() != a.dims()[axis] {
                return Err(Error::InvalidWitness(format!(
                    "axis {axis} map has the wrong length"
                )));
            }
            let distinct: BTreeSet<usize> = m.iter().copied().collect();
            if distinct.len() != m.len() || m.iter().any(|&v| v >= b.dims()[axis]) {
                return Err(Error::InvalidWitness(format!(
                    "axis {axis} map is not an injection"
                )));
            }
        }
        if let Some(t) = a.support().find(|&t| !b.contains(self.map(t))) {
            return Err(Error::InvalidWitness(format!(
                "{t} maps outside the target support"
            )));
        }
        Ok(())
    }

    /// The image of `a` as a sub-tensor of `b` (coefficients from `b`).
    pub fn image(&self, a: &Tensor, b: &Tensor) -> Tensor {
        let img: HashSet<Triple> = a.support().map(|t| self.map(t)).collect();
        b.filter(|t, _| img.contains(&t))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EmbeddingOutcome {
    Found {
        witness: EmbeddingWitness,
    },
    /// The search space was exhausted without a witness.
    NotEmbeddable,
    /// The node budget ran out first.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingResult {
    pub outcome: EmbeddingOutcome,
    pub nodes: u64,
}

/// One CSP variable: a used variable of `A` on some axis.
struct Var {
    axis: usize,
    index: usize,
    degree: usize,
}

struct Csp<'a> {
    vars: Vec<Var>,
    /// For each CSP variable, the terms of A touching it (as CSP variable triples).
    touching: Vec<Vec<[usize; 3]>>,
    b: &'a Tensor,
    b_member: HashSet<Triple>,
    /// `b_inc[axis][v]` = terms of B using variable `v` on that axis.
    b_inc: [Vec<Vec<Triple>>; 3],
    budget: u64,
    nodes: AtomicU64,
}

#[derive(Clone)]
struct State {
    assigned: Vec<Option<usize>>,
    domains: Vec<Bits>,
}

enum Flow {
    Continue,
    Stop,
    Exhausted,
}

impl<'a> Csp<'a> {
    fn new(a: &Tensor, b: &'a Tensor, budget: u64) -> (Self, State) {
        let deg_a = a.degrees();
        let deg_b = b.degrees();
        let mut vars = Vec::new();
        let mut id = [
            vec![usize::MAX; a.dims()[0]],
            vec![usize::MAX; a.dims()[1]],
            vec![usize::MAX; a.dims()[2]],
        ];
        for axis in 0..3 {
            for v in 0..a.dims()[axis] {
                if deg_a[axis][v] > 0 {
                    id[axis][v] = vars.len();
                    vars.push(Var {
                        axis,
                        index: v,
                        degree: deg_a[axis][v],
                    });
                }
            }
        }
        let mut touching = vec![Vec::new(); vars.len()];
        for t in a.support() {
            let ids = [id[0][t.i], id[1][t.j], id[2][t.k]];
            for &v in &ids {
                touching[v].push(ids);
            }
        }
        let domains = vars
            .iter()
            .map(|v| {
                let mut d = Bits::new(b.dims()[v.axis]);
                for w in 0..b.dims()[v.axis] {
                    if deg_b[v.axis][w] >= v.degree {
                        d.insert(w);
                    }
                }
                d
            })
            .collect();
        let state = State {
            assigned: vec![None; vars.len()],
            domains,
        };
        let b_inc = [
            b.incidence(crate::tensor::Axis::X),
            b.incidence(crate::tensor::Axis::Y),
            b.incidence(crate::tensor::Axis::Z),
        ];
        (
            Csp {
                vars,
                touching,
                b,
                b_member: b.support().collect(),
                b_inc,
                budget,
                nodes: AtomicU64::new(0),
            },
            state,
        )
    }

    /// Assigns `v := val` and forward-checks. Returns false on a wipe-out.
    fn assign(&self, st: &mut State, v: usize, val: usize) -> bool {
        st.assigned[v] = Some(val);
        let mut single = Bits::new(self.b.dims()[self.vars[v].axis]);
        single.insert(val);
        st.domains[v] = single;
        let axis = self.vars[v].axis;
        for (u, var) in self.vars.iter().enumerate() {
            if u != v && var.axis == axis && st.assigned[u].is_none() {
                st.domains[u].remove(val);
                if st.domains[u].is_empty() {
                    return false;
                }
            }
        }
        for ids in &self.touching[v] {
            let free: Vec<usize> = (0..3).filter(|&p| st.assigned[ids[p]].is_none()).collect();
            match free.len() {
                0 => {
                    let t = Triple::new(
                        st.assigned[ids[0]].unwrap(),
                        st.assigned[ids[1]].unwrap(),
                        st.assigned[ids[2]].unwrap(),
                    );
                    if !self.b_member.contains(&t) {
                        return false;
                    }
                }
                _ => {
                    // Supported values: terms of B through an assigned coordinate,
                    // compatible with the current domains of the free ones.
                    let fixed = (0..3)
                        .find(|&p| st.assigned[ids[p]].is_some())
                        .expect("v is assigned");
                    let fixed_val = st.assigned[ids[fixed]].unwrap();
                    let mut support: [Option<Bits>; 3] = Default::default();
                    for &p in &free {
                        support[p] = Some(Bits::new(self.b.dims()[p]));
                    }
                    for t in &self.b_inc[fixed][fixed_val] {
                        let arr = t.to_array();
                        let ok = (0..3).all(|p| match st.assigned[ids[p]] {
                            Some(val) => arr[p] == val,
                            None => st.domains[ids[p]].contains(arr[p]),
                        });
                        if ok {
                            for &p in &free {
                                support[p].as_mut().unwrap().insert(arr[p]);
                            }
                        }
                    }
                    for &p in &free {
                        let s = support[p].take().unwrap();
                        st.domains[ids[p]].and_assign(&s);
                        if st.domains[ids[p]].is_empty() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn pick(&self, st: &State) -> Option<usize> {
        (0..self.vars.len())
            .filter(|&v| st.assigned[v].is_none())
            .min_by_key(|&v| (st.domains[v].len(), usize::MAX - self.vars[v].degree, v))
    }

    fn solve(&self, st: State, on_solution: &mut dyn FnMut(&State) -> bool) -> Flow {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            return Flow::Exhausted;
        }
        let Some(v) = self.pick(&st) else {
            return if on_solution(&st) {
                Flow::Continue
            } else {
                Flow::Stop
            };
        };
        let values: Vec<usize> = st.domains[v].iter().collect();
        for val in values {
            let mut next = st.clone();
            if self.assign(&mut next, v, val) {
                match self.solve(next, on_solution) {
                    Flow::Continue => {}
                    other => return other,
                }
            }
        }
        Flow::Continue
    }

    fn witness(&self, st: &State, a: &Tensor) -> EmbeddingWitness {
        let mut maps = [
            vec![usize::MAX; a.dims()[0]],
            vec![usize::MAX; a.dims()[1]],
            vec![usize::MAX; a.dims()[2]],
        ];
        for (v, var) in self.vars.iter().enumerate() {
            maps[var.axis][var.index] = st.assigned[v].expect("complete assignment");
        }
        for (axis, m) in maps.iter_mut().enumerate() {
            let used: BTreeSet<usize> = m.iter().copied().filter(|&v| v != usize::MAX).collect();
            let mut free = (0..self.b.dims()[axis]).filter(|w| !used.contains(w));
            for slot in m.iter_mut().filter(|s| **s == usize::MAX) {
                *slot = free.next().expect("dims of A do not exceed dims of B");
            }
        }
        let [x, y, z] = maps;
        EmbeddingWitness { x, y, z }
    }
}

fn check_inputs(a: &Tensor, b: &Tensor, group: Option<&Group>) -> Result<()> {
    if (0..3).any(|p| a.dims()[p] > b.dims()[p]) {
        return Err(Error::invalid(format!(
            "source dims {:?} exceed target dims {:?}",
            a.dims(),
            b.dims()
        )));
    }
    if let Some(g) = group {
        if !crate::catalog::group_tensor(g).tensor.same_support(b) {
            return Err(Error::invalid(
                "target is not the group tensor of the given group",
            ));
        }
    }
    Ok(())
}

/// Fixes one x-variable and one y-variable of maximal degree to the
/// identity. Valid for group targets because `(x_g, y_h, z_k) ↦ (x_{ug}, y_{hv}, z_{ukv})`
/// preserves `T_G` for all `u, v`.
fn normalize_for_group(csp: &Csp, st: &mut State, g: &Group) -> bool {
    for axis in 0..2 {
        let pivot = (0..csp.vars.len())
            .filter(|&v| csp.vars[v].axis == axis)
            .max_by_key(|&v| (csp.vars[v].degree, usize::MAX - v));
        if let Some(v) = pivot {
            if !st.domains[v].contains(g.identity()) || !csp.assign(st, v, g.identity()) {
                return false;
            }
        }
    }
    true
}

fn run_embedding(
    a: &Tensor,
    b: &Tensor,
    opts: SearchOptions,
    group: Option<&Group>,
    on_witness: &mut dyn FnMut(EmbeddingWitness) -> bool,
) -> Result<(Flow, u64)> {
    check_inputs(a, b, group)?;
    let (csp, mut st) = Csp::new(a, b, opts.budget);
    if st.domains.iter().any(Bits::is_empty) {
        return Ok((Flow::Continue, 0));
    }
    if let Some(g) = group {
        if !normalize_for_group(&csp, &mut st, g) {
            return Ok((Flow::Continue, 0));
        }
    }
    let flow = csp.solve(st, &mut |s| on_witness(csp.witness(s, a)));
    Ok((flow, csp.nodes.load(Ordering::Relaxed)))
}

/// Searches for axis injections embedding the support of `a` into that of `b`.
/// Pass `group` when `b` is the group tensor of that group to enable the
/// identity normalization.
pub fn subtensor_embedding_search(
    a: &Tensor,
    b: &Tensor,
    opts: SearchOptions,
    group: Option<&Group>,
) -> Result<EmbeddingResult> {
    let mut found = None;
    let (flow, nodes) = run_embedding(a, b, opts, group, &mut |w| {
        found = Some(w);
        false
    })?;
    let outcome = match (found, flow) {
        (Some(witness), _) => EmbeddingOutcome::Found { witness },
        (None, Flow::Exhausted) => EmbeddingOutcome::Inconclusive,
        (None, _) => EmbeddingOutcome::NotEmbeddable,
    };
    Ok(EmbeddingResult { outcome, nodes })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MonomialOutcome {
    Found {
        witness: EmbeddingWitness,
        map: MonomialMap,
    },
    /// Every embedding was tried and none is a monomial degeneration.
    NotFound {
        embeddings: u64,
    },
    Inconclusive {
        embeddings: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialResult {
    pub outcome: MonomialOutcome,
    pub nodes: u64,
}

/// Weights on the image variables making exactly the image terms zero-sum,
/// found by an exact LP, then scaled to integers.
fn image_weights(b: &Tensor, image: &HashSet<Triple>) -> Option<[Vec<Option<i64>>; 3]> {
    let mut used: [BTreeSet<usize>; 3] = Default::default();
    for t in image {
        for (p, v) in t.to_array().into_iter().enumerate() {
            used[p].insert(v);
        }
    }
    // Column of each image variable; free weights split as w = plus - minus.
    let mut col: [Vec<Option<usize>>; 3] = [
        vec![None; b.dims()[0]],
        vec![None; b.dims()[1]],
        vec![None; b.dims()[2]],
    ];
    let mut n = 0;
    for p in 0..3 {
        for &v in &used[p] {
            col[p][v] = Some(n);
            n += 1;
        }
    }
    let mut lp = LinearProgram::new(2 * n);
    let one = Rational::from_integer(1.into());
    for t in b.support() {
        let arr = t.to_array();
        let cols: Option<Vec<usize>> = (0..3).map(|p| col[p][arr[p]]).collect();
        let Some(cols) = cols else { continue };
        let mut coeffs = Vec::new();
        for c in cols {
            coeffs.push((2 * c, one.clone()));
            coeffs.push((2 * c + 1, -one.clone()));
        }
        if image.contains(&t) {
            lp.add(coeffs, Relation::Eq, Rational::zero());
        } else {
            lp.add(coeffs, Relation::Ge, one.clone());
        }
    }
    let LpOutcome::Optimal { x, .. } = lp.solve() else {
        return None;
    };
    let w: Vec<Rational> = (0..n).map(|c| &x[2 * c] - &x[2 * c + 1]).collect();
    let lcm = w
        .iter()
        .fold(num_bigint::BigInt::from(1), |acc, r| acc.lcm(r.denom()));
    let scaled: Vec<i64> = w
        .iter()
        .map(|r| {
            (r * Rational::from_integer(lcm.clone()))
                .to_integer()
                .to_i64()
        })
        .collect::<Option<_>>()?;
    let mut out: [Vec<Option<i64>>; 3] = [
        vec![None; b.dims()[0]],
        vec![None; b.dims()[1]],
        vec![None; b.dims()[2]],
    ];
    for p in 0..3 {
        for (v, c) in col[p].iter().enumerate() {
            if let Some(c) = c {
                out[p][v] = Some(scaled[*c]);
            }
        }
    }
    Some(out)
}

/// Embeddings of `a` into `b` whose image is a monomial degeneration of `b`.
/// Variables outside the image get a weight larger than any negative partial
/// sum, so every term touching them has a positive sum.
pub fn monomial_embedding_search(
    a: &Tensor,
    b: &Tensor,
    opts: SearchOptions,
    group: Option<&Group>,
) -> Result<MonomialResult> {
    let mut tried: HashSet<Vec<Triple>> = HashSet::new();
    let mut embeddings = 0u64;
    let mut result: Option<(EmbeddingWitness, MonomialMap)> = None;
    let mut failure: Option<Error> = None;
    let (flow, nodes) = run_embedding(a, b, opts, group, &mut |w| {
        embeddings += 1;
        let image: HashSet<Triple> = a.support().map(|t| w.map(t)).collect();
        let mut key: Vec<Triple> = image.iter().copied().collect();
        key.sort();
        if !tried.insert(key) {
            return true;
        }
        let Some(weights) = image_weights(b, &image) else {
            return true;
        };
        let sentinel = 1 + weights
            .iter()
            .flatten()
            .flatten()
            .map(|v| v.abs())
            .sum::<i64>();
        let fill = |ws: &Vec<Option<i64>>| ws.iter().map(|v| v.unwrap_or(sentinel)).collect();
        let map = MonomialMap {
            a: fill(&weights[0]),
            b: fill(&weights[1]),
            c: fill(&weights[2]),
        };
        let claimed = w.image(a, b);
        match verify_monomial_degeneration(b, &map, &claimed) {
            Ok(r) if r.valid => {
                result = Some((w, map));
                false
            }
            Ok(r) => {
                failure = Some(Error::InvalidWitness(format!(
                    "LP weights failed verification at {:?}",
                    r.violations.first()
                )));
                false
            }
            Err(e) => {
                failure = Some(e);
                false
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let outcome = match (result, flow) {
        (Some((witness, map)), _) => MonomialOutcome::Found { witness, map },
        (None, Flow::Exhausted) => MonomialOutcome::Inconclusive { embeddings },
        (None, _) => MonomialOutcome::NotFound { embeddings },
    };
    Ok(MonomialResult { outcome, nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::degeneration::apply_monomial_map;

    fn group(name: &str) -> Group {
        Group::by_name(name).unwrap()
    }

    fn embed(a: &Tensor, g: &Group) -> EmbeddingResult {
        let b = catalog::group_tensor(g).tensor;
        subtensor_embedding_search(a, &b, SearchOptions::default(), Some(g)).unwrap()
    }

    #[test]
    fn cw2_into_c4() {
        let g = group("C4");
        let r = embed(&catalog::cw(2).tensor, &g);
        match r.outcome {
            EmbeddingOutcome::Found { witness } => {
                witness
                    .validate(&catalog::cw(2).tensor, &catalog::group_tensor(&g).tensor)
                    .unwrap();
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn abelian_too_small() {
        let r = embed(&catalog::cw(3).tensor, &group("C5"));
        assert_eq!(r.outcome, EmbeddingOutcome::NotEmbeddable);
    }

    #[test]
    fn cw4_not_in_s3() {
        let r = embed(&catalog::cw(4).tensor, &group("S3"));
        assert_eq!(r.outcome, EmbeddingOutcome::NotEmbeddable);
    }

    #[test]
    fn cw6_sits_inside_q8() {
        // Six elements of Q8 square to the same element, which is all the
        // middle family needs.
        let g = group("Q8");
        let a = catalog::cw(6).tensor;
        let b = catalog::group_tensor(&g).tensor;
        let r = monomial_embedding_search(&a, &b, SearchOptions::default(), Some(&g)).unwrap();
        let MonomialOutcome::Found { witness, map } = r.outcome else {
            panic!("expected an embedding");
        };
        witness.validate(&a, &b).unwrap();
        let minus_one = witness.z[0];
        for i in 1..=6 {
            assert_eq!(witness.x[i], witness.y[i]);
            assert_eq!(g.mul(witness.x[i], witness.x[i]), minus_one);
        }
        assert!(
            verify_monomial_degeneration(&b, &map, &witness.image(&a, &b))
                .unwrap()
                .valid
        );
        assert_eq!(
            embed(&a, &group("D4")).outcome,
            EmbeddingOutcome::NotEmbeddable
        );
    }

    #[test]
    fn normalization_agrees_with_plain_search() {
        for (q, name) in [
            (1, "C3"),
            (2, "C4"),
            (2, "C2xC2"),
            (3, "C5"),
            (4, "S3"),
            (4, "C6"),
        ] {
            let a = catalog::cw(q).tensor;
            let g = group(name);
            let b = catalog::group_tensor(&g).tensor;
            let with =
                subtensor_embedding_search(&a, &b, SearchOptions::default(), Some(&g)).unwrap();
            let without =
                subtensor_embedding_search(&a, &b, SearchOptions::default(), None).unwrap();
            assert_eq!(
                matches!(with.outcome, EmbeddingOutcome::Found { .. }),
                matches!(without.outcome, EmbeddingOutcome::Found { .. }),
                "CW_{q} into {name}"
            );
            assert_ne!(without.outcome, EmbeddingOutcome::Inconclusive);
        }
    }

    #[test]
    fn budget_gives_inconclusive() {
        let g = group("C6");
        let b = catalog::group_tensor(&g).tensor;
        let r = subtensor_embedding_search(
            &catalog::cw(4).tensor,
            &b,
            SearchOptions::with_budget(1),
            None,
        )
        .unwrap();
        assert_eq!(r.outcome, EmbeddingOutcome::Inconclusive);
    }

    #[test]
    fn dims_must_fit() {
        assert!(subtensor_embedding_search(
            &catalog::cw(3).tensor,
            &catalog::cyclic_tensor(3),
            SearchOptions::default(),
            None
        )
        .is_err());
    }

    #[test]
    fn monomial_examples() {
        for q in [1, 2] {
            let a = catalog::cw(q).tensor;
            let b = catalog::cyclic_tensor(q + 2);
            let g = Group::cyclic(q + 2).unwrap();
            let r = monomial_embedding_search(&a, &b, SearchOptions::default(), Some(&g)).unwrap();
            match r.outcome {
                MonomialOutcome::Found { witness, map } => {
                    witness.validate(&a, &b).unwrap();
                    let img = apply_monomial_map(&b, &map).unwrap();
                    assert_eq!(img, witness.image(&a, &b));
                    assert!(verify_monomial_degeneration(&b, &map, &img).unwrap().valid);
                }
                other => panic!("q={q}: {other:?}"),
            }
        }
        let r = monomial_embedding_search(
            &catalog::cw(3).tensor,
            &catalog::cyclic_tensor(5),
            SearchOptions::default(),
            None,
        )
        .unwrap();
        assert_eq!(r.outcome, MonomialOutcome::NotFound { embeddings: 0 });
    }
}
