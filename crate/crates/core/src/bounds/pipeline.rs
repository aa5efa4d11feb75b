//! Partition measures and the combined ω_g pipeline for generalized CW tensors.

use serde::Serialize;

use super::formulas::{
    bound_corners, bound_removeanx, bound_removeanx_inner, omega_lower_from_itilde,
};
use super::structure::{detect_corners, Corners};
use super::{int, ratio, strictly_less, BoundReport, Direction, Method};
use crate::catalog::{self, CwPerms};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::tensor::{Partition, Tensor};

/// `Ĩ(T) ≤ Σ μ(P_i)^{1/3}` over the parts of a partition of the support.
pub fn bound_measures(t: &Tensor, p: &Partition, prec: u32) -> Result<BoundReport> {
    if !p.is_valid_for(t) {
        return Err(Error::invalid(
            "partition does not cover the support exactly once",
        ));
    }
    let measures: Vec<u128> = p.part_tensors(t).iter().map(Tensor::measure).collect();
    let mut value = int(prec, 0);
    for &m in &measures {
        let m = Interval::from_rational(prec, &crate::tensor::Rational::from_integer(m.into()));
        value = value.add(&m.cbrt());
    }
    let min_axis = t.minimal_sets().sizes().into_iter().min().unwrap_or(0);
    let beats = strictly_less(&value, &int(prec, min_axis as i64));
    let binding = if beats == Some(true) {
        "measures"
    } else {
        "min_axis"
    };
    Ok(
        BoundReport::new(Method::Measures, Direction::ItildeUpper, value)
            .param(
                "part_measures",
                measures.iter().map(u128::to_string).collect::<Vec<_>>(),
            )
            .param("min_axis", min_axis)
            .param("binding", binding)
            .claim("beats_min_axis", beats)
            .cite("sum of cube roots of part measures"),
    )
}

/// How the measure of a part of the three-part CW partition is counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MuConvention {
    /// `μ = (q+1)²`, as the definition gives.
    Literal,
    /// `μ = q²`, as commonly stated.
    Stated,
}

impl MuConvention {
    fn mu(self, q: usize) -> i64 {
        let s = match self {
            MuConvention::Literal => q + 1,
            MuConvention::Stated => q,
        } as i64;
        s * s
    }
}

/// `3 μ^{1/3}` and the comparison `3 μ^{1/3} < q^{0.997}`.
fn measures_margin(
    conv: MuConvention,
    q: usize,
    prec: u32,
) -> Result<(Interval, Interval, Option<bool>)> {
    let three_roots = int(prec, 3).mul(&int(prec, conv.mu(q)).cbrt());
    let target = int(prec, q as i64).pow(&ratio(prec, 997, 1000))?;
    let holds = strictly_less(&three_roots, &target);
    Ok((three_roots, target, holds))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MeasuresThreshold {
    pub convention: MuConvention,
    /// Least `q` with `3 μ^{1/3} < q^{0.997}` certified.
    pub first: Option<usize>,
    /// Every `q` below `first` certified to fail.
    pub certified_below: bool,
    /// Every `q` from `first` to `checked_to` certified to hold.
    pub holds_after: bool,
    pub checked_to: usize,
}

pub fn measures_threshold(
    conv: MuConvention,
    checked_to: usize,
    prec: u32,
) -> Result<MeasuresThreshold> {
    let mut first = None;
    let mut certified_below = true;
    let mut holds_after = true;
    for q in 1..=checked_to {
        let (_, _, holds) = measures_margin(conv, q, prec)?;
        match (first, holds) {
            (None, Some(true)) => first = Some(q),
            (None, Some(false)) => {}
            (None, None) => certified_below = false,
            (Some(_), h) => holds_after &= h == Some(true),
        }
    }
    Ok(MeasuresThreshold {
        convention: conv,
        first,
        certified_below,
        holds_after: first.is_some() && holds_after,
        checked_to,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CwMeasures {
    pub q: usize,
    /// Measures bound on `CW_q` from its canonical three-part partition.
    pub literal: BoundReport,
    #[serde(serialize_with = "super::serialize_interval")]
    pub stated: Interval,
    pub literal_below_q_power: Option<bool>,
    pub stated_below_q_power: Option<bool>,
}

/// The three-part partition bound on `CW_q` under both measure conventions,
/// each compared with `q^{0.997}`.
pub fn cw_measures(q: usize, prec: u32) -> Result<CwMeasures> {
    let t = catalog::cw(q).tensor;
    let literal = bound_measures(&t, &catalog::cw_three_partition(&t)?, prec)?;
    let (lit_check, _, literal_below) = measures_margin(MuConvention::Literal, q, prec)?;
    debug_assert!(lit_check.hi() >= literal.value.lo() && literal.value.hi() >= lit_check.lo());
    let (stated, _, stated_below) = measures_margin(MuConvention::Stated, q, prec)?;
    Ok(CwMeasures {
        q,
        literal,
        stated,
        literal_below_q_power: literal_below,
        stated_below_q_power: stated_below,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelinePath {
    pub name: String,
    pub status: String,
    pub itilde: Option<BoundReport>,
    pub omega: Option<BoundReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub q: usize,
    pub r: usize,
    pub corners: Option<Corners>,
    pub paths: Vec<PipelinePath>,
    /// The largest ω_g lower bound certified above 2, if any.
    pub best: Option<BoundReport>,
}

fn omega_path(name: &str, r: &Interval, itilde: BoundReport) -> Result<PipelinePath> {
    let omega = omega_lower_from_itilde(r, &itilde.value)?;
    let status = match omega.claims["above_two"] {
        Some(true) => "certified",
        Some(false) => "no_gain",
        None => "undecided",
    };
    Ok(PipelinePath {
        name: name.to_string(),
        status: status.to_string(),
        itilde: Some(itilde),
        omega: Some(omega),
    })
}

fn skipped(name: &str, status: &str, itilde: Option<BoundReport>) -> PipelinePath {
    PipelinePath {
        name: name.to_string(),
        status: status.to_string(),
        itilde,
        omega: None,
    }
}

/// Runs the corner, measures and x-removal paths on `CW_q` with the given
/// permutations and keeps the best certified ω_g lower bound, with `r = q + 2`.
pub fn cw_pipeline(q: usize, perms: &CwPerms, prec: u32) -> Result<PipelineReport> {
    if q < 1 {
        return Err(Error::invalid("q must be at least 1"));
    }
    let t = catalog::cw_general(q, perms)?;
    let r_usize = q + 2;
    let r = int(prec, r_usize as i64);
    let mut paths = Vec::new();

    let corners = detect_corners(&t);
    paths.push(match &corners {
        Some(_) => omega_path("corners", &r, bound_corners(r_usize, prec)?)?,
        None => skipped("corners", "no_corners", None),
    });

    let measures = bound_measures(&t, &catalog::cw_three_partition(&t)?, prec)?;
    let (stated, _, _) = measures_margin(MuConvention::Stated, q, prec)?;
    let measures = measures
        .param_interval("stated_convention_value", &stated)
        .param(
            "stated_threshold",
            measures_threshold(MuConvention::Stated, 200, prec)?.first,
        )
        .param(
            "literal_threshold",
            measures_threshold(MuConvention::Literal, 200, prec)?.first,
        );
    paths.push(if measures.value.certainly_lt(&r) {
        omega_path("measures", &r, measures)?
    } else {
        skipped("measures", "not_below_r", Some(measures))
    });

    let inner = bound_removeanx_inner(q, prec)?;
    paths.push(if inner.certified("below_outer_threshold") {
        let outer = bound_removeanx(r_usize, &inner.value)?.param_interval("inner", &inner.value);
        omega_path("removeanx", &r, outer)?
    } else {
        skipped("removeanx", "hypothesis_not_met", Some(inner))
    });

    let best = paths
        .iter()
        .filter_map(|p| p.omega.as_ref())
        .filter(|o| o.certified("above_two"))
        .max_by(|a, b| a.value.lo().partial_cmp(b.value.lo()).expect("finite"))
        .cloned();
    Ok(PipelineReport {
        q,
        r: r_usize,
        corners,
        paths,
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::CwPerms;

    const P: u32 = 128;

    #[test]
    fn trivial_partition_is_cube_root_of_measure() {
        for r in 1..=5 {
            let t = catalog::independent(r);
            let b = bound_measures(&t, &Partition::trivial(&t), P).unwrap();
            assert!((b.value.mid_f64() - r as f64).abs() < 1e-20);
        }
    }

    #[test]
    fn cw_partition_values() {
        let m28 = cw_measures(28, P).unwrap();
        assert!((m28.literal.value.mid_f64() - 3.0 * 841f64.cbrt()).abs() < 1e-9);
        assert!((m28.stated.mid_f64() - 3.0 * 784f64.cbrt()).abs() < 1e-9);
        assert_eq!(m28.stated_below_q_power, Some(true));
        assert_eq!(m28.literal_below_q_power, Some(false));
        let m2 = cw_measures(2, P).unwrap();
        assert!((m2.literal.value.mid_f64() - 3.0 * 9f64.cbrt()).abs() < 1e-9);
        assert_eq!(m2.literal.parameters["binding"], "min_axis");
    }

    #[test]
    fn thresholds() {
        let s = measures_threshold(MuConvention::Stated, 300, P).unwrap();
        assert_eq!(s.first, Some(28));
        assert!(s.certified_below && s.holds_after);
        let l = measures_threshold(MuConvention::Literal, 300, P).unwrap();
        assert_eq!(l.first, Some(30));
        assert!(l.certified_below && l.holds_after);
    }

    #[test]
    fn pipeline_q6_uses_removeanx() {
        for perms in [
            CwPerms::identity(6),
            CwPerms::with_sigma(vec![2, 3, 1, 5, 6, 4]),
        ] {
            let rep = cw_pipeline(6, &perms, P).unwrap();
            let best = rep.best.unwrap();
            assert!(best.certified("above_two"));
            let removal = rep.paths.iter().find(|p| p.name == "removeanx").unwrap();
            assert_eq!(removal.status, "certified");
            assert_eq!(best.value, removal.omega.as_ref().unwrap().value);
            let u = &removal.itilde.as_ref().unwrap().value;
            assert!((u.mid_f64() - 7.9973).abs() < 1e-3);
        }
    }

    #[test]
    fn pipeline_q2_corners_only() {
        let rep = cw_pipeline(2, &CwPerms::identity(2), P).unwrap();
        let statuses: Vec<(&str, &str)> = rep
            .paths
            .iter()
            .map(|p| (p.name.as_str(), p.status.as_str()))
            .collect();
        assert_eq!(
            statuses,
            vec![
                ("corners", "certified"),
                ("measures", "not_below_r"),
                ("removeanx", "hypothesis_not_met")
            ]
        );
        let corner_u = bound_corners(4, P).unwrap().value;
        let best = rep.best.unwrap();
        assert_eq!(
            best.parameters["U"],
            serde_json::to_value(corner_u.to_json()).unwrap()
        );
    }

    #[test]
    fn pipeline_q28_measures_path() {
        let rep = cw_pipeline(28, &CwPerms::identity(28), P).unwrap();
        let m = rep.paths.iter().find(|p| p.name == "measures").unwrap();
        assert_eq!(m.status, "certified");
        let params = &m.itilde.as_ref().unwrap().parameters;
        assert_eq!(params["stated_threshold"], 28);
        assert_eq!(params["literal_threshold"], 30);
    }
}
