//! Monomial degenerations given by integer weights on the three axes.
//!
//! A map `(a, b, c)` degenerates `T` to the sub-tensor of terms with
//! `a(i) + b(j) + c(k) = 0`, provided every term of `T` has a nonnegative sum.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::tensor::{decode_power_index, Axis, AxisSubset, Tensor, Triple};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MonomialMap {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub c: Vec<i64>,
}

impl MonomialMap {
    pub fn zero(dims: [usize; 3]) -> Self {
        MonomialMap {
            a: vec![0; dims[0]],
            b: vec![0; dims[1]],
            c: vec![0; dims[2]],
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.a.len(), self.b.len(), self.c.len()]
    }

    pub fn axis(&self, axis: Axis) -> &[i64] {
        match axis {
            Axis::X => &self.a,
            Axis::Y => &self.b,
            Axis::Z => &self.c,
        }
    }

    pub fn weight(&self, t: Triple) -> i128 {
        self.a[t.i] as i128 + self.b[t.j] as i128 + self.c[t.k] as i128
    }

    fn check_total(&self, t: &Tensor) -> Result<()> {
        if self.dims() != t.dims() {
            return Err(Error::invalid(format!(
                "map has axis lengths {:?} but the tensor has dims {:?}",
                self.dims(),
                t.dims()
            )));
        }
        Ok(())
    }

    /// Weights on an `n`-th Kronecker power: the sum of the base weights of
    /// the decoded coordinates.
    pub fn power(&self, n: usize) -> MonomialMap {
        let lift = |w: &[i64]| -> Vec<i64> {
            let d = w.len();
            let total = d.pow(n as u32);
            (0..total)
                .map(|idx| decode_power_index(idx, d, n).iter().map(|&c| w[c]).sum())
                .collect()
        };
        MonomialMap {
            a: lift(&self.a),
            b: lift(&self.b),
            c: lift(&self.c),
        }
    }

    /// Zeroing-out as a monomial map: weight 0 on kept variables and 1 on
    /// removed ones. All weights are nonnegative, so every term touching a
    /// removed variable has a positive sum.
    pub fn from_zeroing(dims: [usize; 3], keep: &AxisSubset) -> Self {
        let w =
            |n: usize, s: &BTreeSet<usize>| (0..n).map(|v| i64::from(!s.contains(&v))).collect();
        MonomialMap {
            a: w(dims[0], &keep.x),
            b: w(dims[1], &keep.y),
            c: w(dims[2], &keep.z),
        }
    }
}

/// `power_map(m, n)`.
pub fn power_map(m: &MonomialMap, n: usize) -> MonomialMap {
    m.power(n)
}

/// The sub-tensor of zero-sum terms, coefficients preserved.
pub fn apply_monomial_map(t: &Tensor, m: &MonomialMap) -> Result<Tensor> {
    m.check_total(t)?;
    Ok(t.filter(|tr, _| m.weight(tr) == 0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// A source term with negative weight sum.
    NegativeSum,
    /// A zero-sum source term missing from the claimed tensor.
    UnclaimedZeroSum,
    /// A claimed term whose weight sum is not zero.
    ClaimedNonzeroSum,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub triple: Triple,
    pub sum: i128,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegenerationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
    pub result: Option<Tensor>,
}

/// Checks that `m` degenerates `source` to exactly `claimed`.
pub fn verify_monomial_degeneration(
    source: &Tensor,
    m: &MonomialMap,
    claimed: &Tensor,
) -> Result<DegenerationReport> {
    if claimed.dims() != source.dims() {
        return Err(Error::NotSubtensor(format!(
            "claimed dims {:?} differ from source dims {:?}",
            claimed.dims(),
            source.dims()
        )));
    }
    for (t, c) in claimed.terms() {
        match source.coefficient(t) {
            None => return Err(Error::NotSubtensor(format!("{t} is not a source term"))),
            Some(sc) if sc != c => {
                return Err(Error::NotSubtensor(format!(
                    "{t} has coefficient {c}, source has {sc}"
                )))
            }
            _ => {}
        }
    }
    m.check_total(source)?;
    let mut violations = Vec::new();
    for t in source.support() {
        let sum = m.weight(t);
        let kind = if sum < 0 {
            Some(ViolationKind::NegativeSum)
        } else if sum == 0 && !claimed.contains(t) {
            Some(ViolationKind::UnclaimedZeroSum)
        } else if sum > 0 && claimed.contains(t) {
            Some(ViolationKind::ClaimedNonzeroSum)
        } else {
            None
        };
        if let Some(kind) = kind {
            violations.push(Violation {
                triple: t,
                sum,
                kind,
            });
        }
    }
    let valid = violations.is_empty();
    Ok(DegenerationReport {
        valid,
        violations,
        result: valid.then(|| claimed.clone()),
    })
}

/// Centred coordinate `idx - (n-1)/2`, so odd `n` gives `-m..=m`.
fn centred(idx: usize, n: usize) -> i64 {
    idx as i64 - ((n as i64 - 1) / 2)
}

fn strassen_weights(a: usize, b: usize, c: usize) -> MonomialMap {
    let mut m = MonomialMap::zero([a * b, b * c, c * a]);
    for i in 0..a {
        for j in 0..b {
            let (ci, cj) = (centred(i, a), centred(j, b));
            m.a[i * b + j] = ci * ci + 2 * ci * cj;
        }
    }
    for j in 0..b {
        for k in 0..c {
            let (cj, ck) = (centred(j, b), centred(k, c));
            m.b[j * c + k] = cj * cj + 2 * cj * ck;
        }
    }
    for k in 0..c {
        for i in 0..a {
            let (ck, ci) = (centred(k, c), centred(i, a));
            m.c[k * a + i] = ck * ck + 2 * ck * ci;
        }
    }
    m
}

/// Weights `i² + 2ij`, `j² + 2jk`, `k² + 2ki` on `⟨a,b,c⟩` with centred
/// indices; each term's sum is `(i+j+k)²`, so the image is the independent
/// tensor of terms with `i + j + k = 0`.
pub fn strassen_independent_map(a: usize, b: usize, c: usize) -> Result<(MonomialMap, Tensor)> {
    if [a, b, c].iter().any(|&n| n % 2 == 0) {
        return Err(Error::invalid(format!(
            "Strassen weights need odd sizes, got ({a},{b},{c}); use strassen_embedded_map"
        )));
    }
    strassen_embedded_map(a, b, c)
}

/// Any positive sizes: an even side is treated as the next odd size with
/// its lowest centred index removed, which keeps every sum a perfect square.
pub fn strassen_embedded_map(a: usize, b: usize, c: usize) -> Result<(MonomialMap, Tensor)> {
    if a == 0 || b == 0 || c == 0 {
        return Err(Error::invalid("matrix dimensions must be positive"));
    }
    let t = crate::catalog::matmul(a, b, c);
    let m = strassen_weights(a, b, c);
    let image = apply_monomial_map(&t, &m)?;
    Ok((m, image))
}

/// `#{(i,j,k) : i+j+k = 0}` over centred index boxes: the Strassen image size.
pub fn strassen_count(a: usize, b: usize, c: usize) -> usize {
    let mut n = 0;
    for i in 0..a {
        for j in 0..b {
            let k = -(centred(i, a) + centred(j, b));
            let lo = centred(0, c);
            let hi = centred(c - 1, c);
            if (lo..=hi).contains(&k) {
                n += 1;
            }
        }
    }
    n
}

/// Weights on `T_G`: identity 0, `g` gets `2, 2, -2`, every other element `1, 1, -1`.
/// The image is a generalized CW tensor of parameter `|G| - 2`.
pub fn group_to_cw_map(group: &Group, g: usize) -> Result<(MonomialMap, Tensor)> {
    let n = group.order();
    if n < 3 {
        return Err(Error::invalid("the group must have order at least 3"));
    }
    if g >= n {
        return Err(Error::invalid(format!("element {g} out of range")));
    }
    let e = group.identity();
    if g == e {
        return Err(Error::invalid("g must not be the identity"));
    }
    let w = |v: usize| -> i64 {
        if v == e {
            0
        } else if v == g {
            2
        } else {
            1
        }
    };
    let xs: Vec<i64> = (0..n).map(w).collect();
    let m = MonomialMap {
        a: xs.clone(),
        b: xs.clone(),
        c: xs.iter().map(|v| -v).collect(),
    };
    let t = crate::catalog::group_tensor(group).tensor;
    let image = apply_monomial_map(&t, &m)?;
    Ok((m, image))
}

/// `σ(h) = h⁻¹ g` on the non-identity, non-`g` elements: the pairing of the
/// `z_e` family in the image of [`group_to_cw_map`].
pub fn group_cw_sigma(group: &Group, g: usize) -> Vec<(usize, usize)> {
    (0..group.order())
        .filter(|&h| h != group.identity() && h != g)
        .map(|h| (h, group.mul(group.inverse(h), g)))
        .collect()
}

/// Lower triangular: square, at most one `k` per `(i, j)`, and no term with `i + j ≥ q`.
pub fn is_lower_triangular(t: &Tensor) -> bool {
    if !t.is_square() {
        return false;
    }
    let q = t.dims()[0];
    let mut seen = BTreeSet::new();
    t.support()
        .all(|tr| tr.i + tr.j < q && seen.insert((tr.i, tr.j)))
}

/// Weights `a(x_i) = b(y_i) = -i`, `c(z_k) = q - 1`: keeps the diagonal `i + j = q - 1`.
pub fn diagonal_map(t: &Tensor) -> Result<(MonomialMap, Tensor)> {
    if !is_lower_triangular(t) {
        return Err(Error::invalid("tensor is not lower triangular"));
    }
    let q = t.dims()[0];
    let neg: Vec<i64> = (0..q as i64).map(|i| -i).collect();
    let m = MonomialMap {
        a: neg.clone(),
        b: neg,
        c: vec![q as i64 - 1; q],
    };
    let image = apply_monomial_map(t, &m)?;
    Ok((m, image))
}
