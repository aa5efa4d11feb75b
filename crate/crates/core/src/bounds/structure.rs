//! Structural hypotheses: corner terms and lower-triangular shape.

use serde::Serialize;

use crate::degeneration::{
    diagonal_map, is_lower_triangular, verify_monomial_degeneration, MonomialMap,
};
use crate::error::Result;
use crate::tensor::{Axis, Tensor, Triple};

/// Two terms sharing a variable on `shared`, such that the first term's
/// variable on the next axis (cyclically) and the second term's variable on
/// the axis after that occur in no other term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Corners {
    pub shared: Axis,
    pub variable: usize,
    pub first: Triple,
    pub second: Triple,
}

/// Searches the three orientations, shared `z` first, and returns the
/// least pair in each orientation.
pub fn detect_corners(t: &Tensor) -> Option<Corners> {
    let deg = t.degrees();
    for (s, shared) in [(2, Axis::Z), (0, Axis::X), (1, Axis::Y)] {
        let u = (s + 1) % 3;
        let v = (s + 2) % 3;
        let inc = t.incidence(shared);
        for first in t.support() {
            let a = first.to_array();
            if deg[u][a[u]] != 1 {
                continue;
            }
            let partner = inc[a[s]]
                .iter()
                .find(|second| **second != first && deg[v][second.to_array()[v]] == 1);
            if let Some(&second) = partner {
                return Some(Corners {
                    shared,
                    variable: a[s],
                    first,
                    second,
                });
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagonalWitness {
    pub map: MonomialMap,
    pub image: Vec<Triple>,
    pub degeneration_valid: bool,
    pub independent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LowerTriangularVerdict {
    pub square: bool,
    pub q: usize,
    pub is_lower_triangular: bool,
    /// Terms with `i + j = q - 1`.
    pub diagonal: Vec<Triple>,
    /// `q` diagonal terms with pairwise distinct z-variables.
    pub distinct_diagonal: bool,
    /// The z-variable when every diagonal term uses the same one.
    pub shared_z: Option<usize>,
    pub witness: Option<DiagonalWitness>,
    /// `"itilde_equals_q"`, `"itilde_below_q"` or `"not_lower_triangular"`.
    pub conclusion: String,
}

/// For a lower-triangular tensor, `Ĩ = q` exactly when the diagonal has `q`
/// terms with distinct z-variables; the diagonal map then degenerates onto
/// that independent diagonal.
pub fn analyze_lower_triangular(t: &Tensor) -> Result<LowerTriangularVerdict> {
    let square = t.is_square();
    let q = t.dims()[0];
    let lower = is_lower_triangular(t);
    let diagonal: Vec<Triple> = if square {
        t.support().filter(|tr| tr.i + tr.j + 1 == q).collect()
    } else {
        Vec::new()
    };
    let zs: std::collections::BTreeSet<usize> = diagonal.iter().map(|tr| tr.k).collect();
    let distinct = lower && diagonal.len() == q && zs.len() == q;
    let shared_z = (zs.len() == 1).then(|| *zs.iter().next().unwrap());
    let mut witness = None;
    if distinct {
        let (map, image) = diagonal_map(t)?;
        let degeneration_valid = verify_monomial_degeneration(t, &map, &image)?.valid;
        let (independent, size) = image.is_independent();
        witness = Some(DiagonalWitness {
            map,
            image: image.support().collect(),
            degeneration_valid,
            independent: independent && size == q,
        });
    }
    let conclusion = match (lower, distinct) {
        (false, _) => "not_lower_triangular",
        (true, true) => "itilde_equals_q",
        (true, false) => "itilde_below_q",
    };
    Ok(LowerTriangularVerdict {
        square,
        q,
        is_lower_triangular: lower,
        diagonal,
        distinct_diagonal: distinct,
        shared_z,
        witness,
        conclusion: conclusion.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn cw_corners() {
        for q in 1..=6 {
            let c = detect_corners(&catalog::cw(q).tensor).unwrap();
            assert_eq!(c.shared, Axis::Z);
            assert_eq!(c.variable, 0);
            let pair = [c.first, c.second];
            assert!(pair.contains(&Triple::new(q + 1, 0, 0)));
            assert!(pair.contains(&Triple::new(0, q + 1, 0)));
        }
    }

    #[test]
    fn lower_corners() {
        for q in 2..=6 {
            let c = detect_corners(&catalog::tq_lower(q)).unwrap();
            assert_eq!(c.shared, Axis::Z);
            assert_eq!(c.variable, q - 1);
            assert_eq!(c.first, Triple::new(q - 1, 0, q - 1));
            assert_eq!(c.second, Triple::new(0, q - 1, q - 1));
        }
    }

    #[test]
    fn no_corners_in_regular_tensors() {
        for q in 2..=5 {
            assert!(detect_corners(&catalog::cyclic_tensor(q)).is_none());
        }
        assert!(detect_corners(&catalog::matmul(2, 2, 2)).is_none());
    }

    #[test]
    fn lower_triangular_verdicts() {
        for q in 2..=8 {
            let v = analyze_lower_triangular(&catalog::tq_lower(q)).unwrap();
            assert!(v.is_lower_triangular);
            assert_eq!(v.diagonal.len(), q);
            assert_eq!(v.shared_z, Some(q - 1));
            assert!(!v.distinct_diagonal);
            assert_eq!(v.conclusion, "itilde_below_q");

            let d = analyze_lower_triangular(&catalog::distinct_diagonal(q)).unwrap();
            let w = d.witness.unwrap();
            assert!(w.degeneration_valid && w.independent);
            assert_eq!(w.image.len(), q);
            assert_eq!(d.conclusion, "itilde_equals_q");

            let c = analyze_lower_triangular(&catalog::cyclic_tensor(q)).unwrap();
            assert!(!c.is_lower_triangular);
        }
    }
}
