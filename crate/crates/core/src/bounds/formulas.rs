//! Closed-form bounds. Logarithms are natural; every formula here only
//! uses ratios of logarithms, so the base does not matter.

use num_bigint::BigInt;
use serde::Serialize;

use super::{int, ratio, strictly_less, BoundReport, Direction, Method};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::tensor::Rational;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RemoveanxValues {
    #[serde(serialize_with = "super::serialize_interval")]
    pub p: Interval,
    #[serde(serialize_with = "super::serialize_interval")]
    pub bound: Interval,
}

/// `(q-1) / q^{1/(q-1)}`: the largest `Ĩ(B)` the x-removal bound accepts.
pub fn removeanx_threshold(prec: u32, q: usize) -> Result<Interval> {
    if q < 2 {
        return Err(Error::invalid("axis size must be at least 2"));
    }
    let qm1 = int(prec, q as i64 - 1);
    let root = int(prec, q as i64).pow(&ratio(prec, 1, q as i64 - 1))?;
    qm1.div(&root)
}

/// The x-removal formula without the hypothesis check:
/// `p = L / (ln q + L)` with `L = ln((q-1)/c)`, and
/// `bound = ((q-1)/(1-p))^{1-p} / p^p`.
pub fn removeanx_formula(q: usize, c: &Interval) -> Result<RemoveanxValues> {
    let prec = c.prec();
    if q < 2 {
        return Err(Error::invalid("axis size must be at least 2"));
    }
    let qm1 = int(prec, q as i64 - 1);
    if c.lo_f64().is_nan() || c.lo_f64() <= 0.0 || !c.certainly_lt(&qm1) {
        return Err(Error::invalid("need 0 < c < q - 1"));
    }
    let l = qm1.div(c)?.ln()?;
    let p = l.div(&int(prec, q as i64).ln()?.add(&l))?;
    let one_m_p = int(prec, 1).sub(&p);
    let log_bound = one_m_p.mul(&qm1.div(&one_m_p)?.ln()?).sub(&p.mul(&p.ln()?));
    Ok(RemoveanxValues {
        p,
        bound: log_bound.exp(),
    })
}

/// Upper bound on `Ĩ(T)` for a tensor with `q` x-variables where removing
/// one x-variable leaves `B` with `Ĩ(B) ≤ c`.
pub fn bound_removeanx(q: usize, c: &Interval) -> Result<BoundReport> {
    let prec = c.prec();
    let threshold = removeanx_threshold(prec, q)?;
    if c.lo() > threshold.hi() {
        return Err(Error::HypothesisViolated(format!(
            "c = {c} exceeds (q-1)/q^(1/(q-1)) = {threshold}"
        )));
    }
    if !c.certainly_le(&threshold) {
        return Err(Error::Undecided(format!(
            "c = {c} overlaps the threshold {threshold}"
        )));
    }
    let v = removeanx_formula(q, c)?;
    let below_q = strictly_less(&v.bound, &int(prec, q as i64));
    Ok(
        BoundReport::new(Method::Removeanx, Direction::ItildeUpper, v.bound.clone())
            .param("q", q)
            .param_interval("c", c)
            .param_interval("p", &v.p)
            .param_interval("threshold", &threshold)
            .claim("hypothesis", Some(true))
            .claim("below_q", below_q)
            .cite("removal of one x-variable from a tensor whose remainder has small Ĩ"),
    )
}

/// Closed-form bound on `Ĩ` of `CW_q^σ` with `x_0` zeroed out:
/// `(q^{ln(q+1)} ln(q²+q)^{ln(q²+q)} / (ln(q+1)^{ln(q+1)} ln(q)^{ln q}))^{1/ln(q²+q)}`,
/// with `0^0 = 1` at `q = 1`. The `below_outer_threshold` claim says whether
/// the value admits a second x-removal step on `CW_q^σ` itself.
pub fn bound_removeanx_inner(q: usize, prec: u32) -> Result<BoundReport> {
    if q < 1 {
        return Err(Error::invalid("q must be at least 1"));
    }
    let q_iv = int(prec, q as i64);
    let lq = q_iv.ln()?;
    let lq1 = int(prec, q as i64 + 1).ln()?;
    let lqq = int(prec, (q * q + q) as i64).ln()?;
    // x ln x for x = ln q, taken as 0 at q = 1.
    let xlogx = |x: &Interval| -> Result<Interval> {
        if q == 1 && x.hi_f64() == 0.0 {
            Ok(int(prec, 0))
        } else {
            Ok(x.mul(&x.ln()?))
        }
    };
    let num = lq.mul(&lq1).add(&xlogx(&lqq)?);
    let den = xlogx(&lq1)?.add(&xlogx(&lq)?);
    let value = num.sub(&den).div(&lqq)?.exp();
    let outer = removeanx_threshold(prec, q + 2)?;
    let mut report = BoundReport::new(Method::Removeanx, Direction::ItildeUpper, value.clone())
        .param("q", q)
        .param_interval("outer_threshold", &outer)
        .claim("below_outer_threshold", strictly_less(&value, &outer))
        .cite("x-removal bound applied to CW_q^σ with x_0 zeroed out");
    if q == 6 {
        report = report.reference("inner_bound", &value, "5.07905", "0.001")?;
    }
    Ok(report)
}

/// `δ_q = (1 / (q (q+1) √ln q))²`.
pub fn corner_delta(prec: u32, q: usize) -> Result<Interval> {
    if q < 2 {
        return Err(Error::invalid("corner bound needs q ≥ 2"));
    }
    let qq = (q * (q + 1)) as i64;
    int(prec, qq * qq).mul(&int(prec, q as i64).ln()?).recip()
}

/// `Ĩ(T) ≤ q^{1-δ_q}` for square tensors of axis size `q` with corner terms.
pub fn bound_corners(q: usize, prec: u32) -> Result<BoundReport> {
    let delta = corner_delta(prec, q)?;
    let q_iv = int(prec, q as i64);
    let value = q_iv.pow(&int(prec, 1).sub(&delta))?;
    Ok(
        BoundReport::new(Method::Corners, Direction::ItildeUpper, value.clone())
            .param("q", q)
            .param_interval("delta", &delta)
            .claim("below_q", strictly_less(&value, &q_iv))
            .cite("corner terms force an unbalanced marginal"),
    )
}

/// `ω_g ≥ 6 / (s + 2)` with `s = log_r U`, from `Ĩ(T) ≥ R̃(T)^{6/ω_g - 2}`.
/// `r` encloses (a lower bound on) the asymptotic rank and `U` an upper bound on `Ĩ`.
pub fn omega_lower_from_itilde(r: &Interval, u: &Interval) -> Result<BoundReport> {
    let prec = r.prec();
    let one = int(prec, 1);
    if !one.certainly_lt(r) {
        return Err(Error::invalid("r must exceed 1"));
    }
    if u.certainly_lt(&one) {
        return Err(Error::invalid("U must be at least 1"));
    }
    let s = u.ln()?.div(&r.ln()?)?;
    let value = int(prec, 6).div(&s.add(&int(prec, 2)))?;
    let two = int(prec, 2);
    let above_two = if two.certainly_lt(&value) {
        Some(true)
    } else if value.certainly_le(&two) {
        Some(false)
    } else {
        None
    };
    Ok(
        BoundReport::new(Method::Omega, Direction::OmegaLower, value)
            .param_interval("r", r)
            .param_interval("U", u)
            .param_interval("s", &s)
            .claim("above_two", above_two)
            .cite("Ĩ(T) ≥ R̃(T)^(6/ω_g(T) - 2) for concise T"),
    )
}

/// `Ĩ(F ⊙ ⟨a,b,c⟩) = F·abc / max{a,b,c}`.
pub fn mmind_value(f: u64, a: u64, b: u64, c: u64) -> Rational {
    let max = a.max(b).max(c).max(1);
    Rational::new(BigInt::from(f) * a * b * c, BigInt::from(max))
}

fn f_interval(q: usize, prec: u32) -> Result<Interval> {
    if q < 2 {
        return Err(Error::invalid("q must be at least 2"));
    }
    let inner = int(prec, 4)
        .mul(&int(prec, q as i64 + 2).powi(3))
        .div(&int(prec, 27))?;
    inner.ln()?.div(&int(prec, q as i64).ln()?)
}

/// `f(q) = log_q(4 (q+2)³ / 27)`.
pub fn cw_value_f(q: usize, prec: u32) -> Result<BoundReport> {
    let f = f_interval(q, prec)?;
    let mut report = BoundReport::new(Method::Cwilb, Direction::Value, f.clone())
        .param("q", q)
        .claim("below_three", strictly_less(&f, &int(prec, 3)))
        .cite("value exponent of CW_q");
    if q == 6 {
        report = report.reference("f", &f, "2.4159", "0.001")?;
    }
    Ok(report)
}

/// `Ĩ(CW_q) ≥ (q+2)^{2/f(q)}`.
pub fn cw_itilde_lower(q: usize, prec: u32) -> Result<BoundReport> {
    let f = f_interval(q, prec)?;
    let base = int(prec, q as i64 + 2);
    let value = base.pow(&int(prec, 2).div(&f)?)?;
    let two_thirds = base.pow(&ratio(prec, 2, 3))?;
    Ok(
        BoundReport::new(Method::Cwilb, Direction::ItildeLower, value.clone())
            .param("q", q)
            .param_interval("f", &f)
            .param_interval("two_thirds_power", &two_thirds)
            .claim(
                "exceeds_two_thirds_power",
                strictly_less(&two_thirds, &value),
            )
            .cite("value of CW_q converted to an independence lower bound"),
    )
}
