//! Balanced distributions on the support: every variable carries at least
//! `1/q - ε` of the probability mass.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::io::rational_to_string;
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::tensor::{Rational, Tensor, Triple};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    pub probs: BTreeMap<Triple, Rational>,
}

impl Serialize for Distribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<(Triple, String)> = self
            .probs
            .iter()
            .map(|(t, p)| (*t, rational_to_string(p)))
            .collect();
        rows.serialize(s)
    }
}

impl Distribution {
    pub fn uniform(t: &Tensor) -> Self {
        let p = Rational::new(1.into(), t.len().into());
        Distribution {
            probs: t.support().map(|tr| (tr, p.clone())).collect(),
        }
    }

    /// Mass on each variable of each axis.
    pub fn marginals(&self, dims: [usize; 3]) -> [Vec<Rational>; 3] {
        let mut m = dims.map(|d| vec![Rational::zero(); d]);
        for (t, p) in &self.probs {
            for (axis, v) in t.to_array().into_iter().enumerate() {
                m[axis][v] += p;
            }
        }
        m
    }

    /// Nonnegative, sums to one, supported on `t`, and every marginal is at least `1/q - ε`.
    pub fn is_balanced(&self, t: &Tensor, eps: &Rational) -> bool {
        if !t.is_square() || self.probs.keys().any(|tr| !t.contains(*tr)) {
            return false;
        }
        if self.probs.values().any(Signed::is_negative)
            || self.probs.values().sum::<Rational>() != Rational::one()
        {
            return false;
        }
        let floor = Rational::new(1.into(), t.dims()[0].into()) - eps;
        self.marginals(t.dims())
            .iter()
            .flatten()
            .all(|m| *m >= floor)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BalancedOutcome {
    Feasible {
        distribution: Distribution,
        /// Whether the uniform distribution on the support already works.
        uniform: bool,
    },
    /// Farkas multipliers: one for the total-mass row, then the x, y and z
    /// marginal rows in index order.
    Infeasible {
        #[serde(serialize_with = "ser_rationals")]
        farkas: Vec<Rational>,
    },
}

fn ser_rationals<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter()
        .map(rational_to_string)
        .collect::<Vec<_>>()
        .serialize(s)
}

impl BalancedOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, BalancedOutcome::Feasible { .. })
    }
}

/// The feasibility LP with one variable per support term.
pub fn balanced_lp(t: &Tensor, eps: &Rational) -> LinearProgram {
    let terms: Vec<Triple> = t.support().collect();
    let q = t.dims()[0];
    let mut lp = LinearProgram::new(terms.len());
    let one = Rational::one();
    lp.add(
        (0..terms.len()).map(|j| (j, one.clone())).collect(),
        Relation::Eq,
        one.clone(),
    );
    let floor = Rational::new(1.into(), q.into()) - eps;
    for axis in 0..3 {
        for v in 0..t.dims()[axis] {
            let coeffs = terms
                .iter()
                .enumerate()
                .filter(|(_, tr)| tr.to_array()[axis] == v)
                .map(|(j, _)| (j, one.clone()))
                .collect();
            lp.add(coeffs, Relation::Ge, floor.clone());
        }
    }
    lp
}

/// Decides exactly whether a distribution on the support of a square tensor
/// puts at least `1/q - ε` on every variable. Both outcomes are re-verified.
pub fn lp_balanced_distribution(t: &Tensor, eps: &Rational) -> Result<BalancedOutcome> {
    if !t.is_square() {
        return Err(Error::invalid(
            "balanced distributions need a square tensor",
        ));
    }
    if eps.is_negative() {
        return Err(Error::invalid("ε must be nonnegative"));
    }
    let uniform = Distribution::uniform(t);
    if uniform.is_balanced(t, eps) {
        return Ok(BalancedOutcome::Feasible {
            distribution: uniform,
            uniform: true,
        });
    }
    let lp = balanced_lp(t, eps);
    match lp.solve() {
        LpOutcome::Optimal { x, .. } => {
            let distribution = Distribution {
                probs: t.support().zip(x).filter(|(_, p)| !p.is_zero()).collect(),
            };
            if !distribution.is_balanced(t, eps) {
                return Err(Error::InvalidWitness(
                    "simplex returned an unbalanced point".into(),
                ));
            }
            Ok(BalancedOutcome::Feasible {
                distribution,
                uniform: false,
            })
        }
        LpOutcome::Infeasible { farkas } => {
            if !lp.verify_farkas(&farkas) {
                return Err(Error::InvalidWitness(
                    "Farkas certificate failed verification".into(),
                ));
            }
            Ok(BalancedOutcome::Infeasible { farkas })
        }
        LpOutcome::Unbounded => unreachable!("feasibility LP has no objective"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn zero() -> Rational {
        Rational::zero()
    }

    #[test]
    fn uniform_cases() {
        for q in 1..=8 {
            let r = lp_balanced_distribution(&catalog::cyclic_tensor(q), &zero()).unwrap();
            match r {
                BalancedOutcome::Feasible {
                    distribution,
                    uniform,
                } => {
                    assert!(uniform);
                    assert!(distribution
                        .probs
                        .values()
                        .all(|p| *p == Rational::new(1.into(), (q * q).into())));
                }
                other => panic!("{other:?}"),
            }
        }
        for n in 1..=3 {
            assert!(lp_balanced_distribution(&catalog::matmul(n, n, n), &zero())
                .unwrap()
                .is_feasible());
        }
    }

    #[test]
    fn corner_tensors_infeasible() {
        for q in 2..=6 {
            let r = lp_balanced_distribution(&catalog::cw(q).tensor, &zero()).unwrap();
            assert!(!r.is_feasible(), "CW_{q}");
        }
        for q in 3..=6 {
            assert!(!lp_balanced_distribution(&catalog::tq_lower(q), &zero())
                .unwrap()
                .is_feasible());
        }
    }

    #[test]
    fn feasible_for_large_eps_and_monotone() {
        let t = catalog::cw(2).tensor;
        let quarter = Rational::new(1.into(), 4.into());
        let r = lp_balanced_distribution(&t, &quarter).unwrap();
        let BalancedOutcome::Feasible { distribution, .. } = r else {
            panic!("ε = 1/q always admits a distribution");
        };
        for k in 1..4 {
            assert!(distribution.is_balanced(&t, &(&quarter + Rational::new(k.into(), 10.into()))));
        }
    }

    #[test]
    fn non_uniform_feasible_point() {
        // Not regular, but a balanced distribution exists: weight 1/2 on each
        // of two disjoint terms plus a dead extra term.
        let t = Tensor::from_support(
            [2; 3],
            [
                Triple::new(0, 0, 0),
                Triple::new(1, 1, 1),
                Triple::new(0, 1, 1),
            ],
        )
        .unwrap();
        match lp_balanced_distribution(&t, &zero()).unwrap() {
            BalancedOutcome::Feasible {
                distribution,
                uniform,
            } => {
                assert!(!uniform);
                assert!(distribution.is_balanced(&t, &zero()));
            }
            other => panic!("{other:?}"),
        }
    }
}
