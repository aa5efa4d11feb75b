//! Certified bounds on the asymptotic independence number and on ω_g,
//! evaluated with outward-rounded interval arithmetic.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::error::Result;
use crate::interval::Interval;

mod balanced;
mod formulas;
mod groups;
mod pipeline;
mod structure;

pub use balanced::{balanced_lp, lp_balanced_distribution, BalancedOutcome, Distribution};
pub use formulas::{
    bound_corners, bound_removeanx, bound_removeanx_inner, corner_delta, cw_itilde_lower,
    cw_value_f, mmind_value, omega_lower_from_itilde, removeanx_formula, removeanx_threshold,
    RemoveanxValues,
};
pub use groups::{group_exponent, GroupExponent, GroupExponentMethod};
pub use pipeline::{
    bound_measures, cw_measures, cw_pipeline, measures_threshold, CwMeasures, MeasuresThreshold,
    MuConvention, PipelineReport,
};
pub use structure::{
    analyze_lower_triangular, detect_corners, Corners, DiagonalWitness, LowerTriangularVerdict,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Removeanx,
    Measures,
    Corners,
    Lp,
    Mmind,
    Cwilb,
    Omega,
    Trivial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `Ĩ(T) ≤ value.hi`.
    ItildeUpper,
    /// `Ĩ(T) ≥ value.lo`.
    ItildeLower,
    /// `ω_g(T) ≥ value.lo`.
    OmegaLower,
    /// An enclosure of an auxiliary quantity such as `f(q)`.
    Value,
}

/// A computed interval next to an externally stated number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReferenceCheck {
    pub quantity: String,
    pub reference: String,
    pub tolerance: String,
    pub computed: crate::interval::IntervalJson,
    /// The computed interval lies inside `reference ± tolerance`.
    pub matches: bool,
}

impl ReferenceCheck {
    pub fn new(quantity: &str, value: &Interval, reference: &str, tolerance: &str) -> Result<Self> {
        let prec = value.prec();
        let r = Interval::from_decimal(prec, reference)?;
        let t = Interval::from_decimal(prec, tolerance)?;
        let band = r.sub(&t).hull(&r.add(&t));
        Ok(ReferenceCheck {
            quantity: quantity.to_string(),
            reference: reference.to_string(),
            tolerance: tolerance.to_string(),
            computed: value.to_json(),
            matches: value.is_within(&band),
        })
    }
}

fn serialize_interval<S: Serializer>(v: &Interval, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.to_json().serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub method: Method,
    pub direction: Direction,
    #[serde(serialize_with = "serialize_interval")]
    pub value: Interval,
    pub parameters: BTreeMap<String, Value>,
    /// Named strict claims: `true`/`false` when certified either way, `null` when
    /// the working precision cannot decide.
    pub claims: BTreeMap<String, Option<bool>>,
    pub provenance: Vec<String>,
    pub references: Vec<ReferenceCheck>,
}

impl BoundReport {
    pub fn new(method: Method, direction: Direction, value: Interval) -> Self {
        BoundReport {
            method,
            direction,
            value,
            parameters: BTreeMap::new(),
            claims: BTreeMap::new(),
            provenance: Vec::new(),
            references: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, v: impl Serialize) -> Self {
        self.parameters.insert(
            key.to_string(),
            serde_json::to_value(v).expect("serializable parameter"),
        );
        self
    }

    pub fn param_interval(self, key: &str, v: &Interval) -> Self {
        self.param(key, v.to_json())
    }

    pub fn claim(mut self, key: &str, v: Option<bool>) -> Self {
        self.claims.insert(key.to_string(), v);
        self
    }

    pub fn cite(mut self, s: &str) -> Self {
        self.provenance.push(s.to_string());
        self
    }

    pub fn reference(
        mut self,
        quantity: &str,
        value: &Interval,
        reference: &str,
        tolerance: &str,
    ) -> Result<Self> {
        self.references
            .push(ReferenceCheck::new(quantity, value, reference, tolerance)?);
        Ok(self)
    }

    /// Whether a named claim was certified true.
    pub fn certified(&self, key: &str) -> bool {
        self.claims.get(key).copied().flatten() == Some(true)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable report")
    }
}

/// `Some(true)` if certainly `a < b`, `Some(false)` if certainly `a ≥ b`.
pub(crate) fn strictly_less(a: &Interval, b: &Interval) -> Option<bool> {
    if a.certainly_lt(b) {
        Some(true)
    } else if b.certainly_le(a) {
        Some(false)
    } else {
        None
    }
}

pub(crate) fn int(prec: u32, v: i64) -> Interval {
    Interval::from_int(prec, v)
}

pub(crate) fn ratio(prec: u32, n: i64, d: i64) -> Interval {
    Interval::from_rational(prec, &crate::tensor::Rational::new(n.into(), d.into()))
}
