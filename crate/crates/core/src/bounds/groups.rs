//! Lower bounds `Ĩ(T_G) ≥ |G|^c` with a certified exponent `c`.

use num_bigint::BigUint;
use serde::Serialize;

use super::formulas::cw_itilde_lower;
use super::{int, ratio, strictly_less};
use crate::catalog;
use crate::degeneration::{group_to_cw_map, verify_monomial_degeneration};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::interval::{Interval, IntervalJson};
use crate::search::{exact_independence, sumfree_search, SearchOptions};
use crate::tensor::DEFAULT_SUPPORT_BUDGET;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupExponentMethod {
    /// `|G| = 1`: `Ĩ(T_G) = 1 = |G|^c` for every `c`.
    Trivial,
    /// `T_G` degenerates to a generalized `CW_{|G|-2}`, whose `Ĩ` is at least `|G|^{2/f(|G|-2)}`.
    CwChain { q: usize, degeneration_valid: bool },
    /// `Ĩ(T_G) ≥ I(T_G^{⊗n})^{1/n}` from an exhaustive search.
    Search {
        n: usize,
        independence: usize,
        exact: bool,
    },
    /// Orders 2 to 4 rest on an external result; the best search evidence
    /// found within `n ≤ max_n` is attached but does not reach `2/3`.
    Cited {
        n: usize,
        independence: usize,
        exact: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupExponent {
    pub group: String,
    pub order: usize,
    pub method: GroupExponentMethod,
    pub exponent: Option<IntervalJson>,
    /// `c > 2/3` certified here.
    pub above_two_thirds: bool,
    /// `c > 2/3` holds only by an external result.
    pub cited: bool,
}

fn search_certificate(
    g: &Group,
    max_n: usize,
    opts: SearchOptions,
    prec: u32,
) -> Result<(GroupExponentMethod, Interval, bool)> {
    let d = g.order();
    let t = catalog::group_tensor(g).tensor;
    let mut last = None;
    for n in 1..=max_n {
        let p = t.power(n, DEFAULT_SUPPORT_BUDGET)?;
        let r = match sumfree_search(g, n, opts) {
            Ok(r) => r,
            Err(_) => exact_independence(&p, opts),
        };
        r.witness.validate(&p)?;
        let i = r.witness.size;
        // I^{1/n} > d^{2/3} iff I³ > d^{2n}, decided in exact integers.
        let above = BigUint::from(i).pow(3) > BigUint::from(d).pow(2 * n as u32);
        let c = int(prec, i as i64)
            .ln()?
            .div(&int(prec, d as i64).ln()?.mul(&int(prec, n as i64)))?;
        let method = GroupExponentMethod::Search {
            n,
            independence: i,
            exact: r.exact,
        };
        if above {
            return Ok((method, c, true));
        }
        last = Some((method, c));
    }
    let (method, c) = last.ok_or_else(|| Error::invalid("need at least one power"))?;
    let GroupExponentMethod::Search {
        n,
        independence,
        exact,
    } = method
    else {
        unreachable!()
    };
    Ok((
        GroupExponentMethod::Cited {
            n,
            independence,
            exact,
        },
        c,
        false,
    ))
}

/// Certifies `c_{|G|} > 2/3` for the group tensor through the generalized
/// CW degeneration when `|G| ≥ 5`. Smaller nontrivial groups are searched
/// (`T_G^{⊗n}`, `n ≤ max_n`) and marked as cited when that falls short.
pub fn group_exponent(
    g: &Group,
    max_n: usize,
    opts: SearchOptions,
    prec: u32,
) -> Result<GroupExponent> {
    let d = g.order();
    let (method, exponent, above) = if d == 1 {
        (GroupExponentMethod::Trivial, None, true)
    } else if d >= 5 {
        let q = d - 2;
        let g_elem = (0..d)
            .find(|&x| x != g.identity())
            .expect("nontrivial group");
        let (map, image) = group_to_cw_map(g, g_elem)?;
        let valid = verify_monomial_degeneration(&catalog::group_tensor(g).tensor, &map, &image)?
            .valid
            && catalog::recognize_generalized_cw(&image).is_some_and(|s| s.q == q);
        let lower = cw_itilde_lower(q, prec)?;
        let c = lower.value.ln()?.div(&int(prec, d as i64).ln()?)?;
        let above = valid && strictly_less(&ratio(prec, 2, 3), &c) == Some(true);
        (
            GroupExponentMethod::CwChain {
                q,
                degeneration_valid: valid,
            },
            Some(c),
            above,
        )
    } else {
        let (m, c, above) = search_certificate(g, max_n, opts, prec)?;
        (m, Some(c), above)
    };
    let cited = matches!(method, GroupExponentMethod::Cited { .. });
    Ok(GroupExponent {
        group: g.name().to_string(),
        order: d,
        cited,
        method,
        exponent: exponent.map(|c| c.to_json()),
        above_two_thirds: above,
    })
}
