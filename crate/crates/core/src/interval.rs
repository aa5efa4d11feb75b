//! Closed real intervals with outward-rounded MPFR endpoints.

use std::cmp::Ordering;
use std::fmt;

use rug::float::Round;
use rug::ops::{AddAssignRound, DivAssignRound, MulAssignRound, SubAssignRound};
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::Rational;

pub const DEFAULT_PRECISION: u32 = 128;

#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    lo: Float,
    hi: Float,
}

fn to_rug(r: &Rational) -> rug::Rational {
    let n: rug::Integer = r.numer().to_string().parse().expect("decimal integer");
    let d: rug::Integer = r.denom().to_string().parse().expect("decimal integer");
    rug::Rational::from((n, d))
}

impl Interval {
    pub fn new(lo: Float, hi: Float) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::invalid("interval endpoints out of order"));
        }
        Ok(Interval { lo, hi })
    }

    pub fn from_int(prec: u32, v: i64) -> Self {
        Interval::from_rational(prec, &Rational::from_integer(v.into()))
    }

    /// Tightest enclosure of an exact rational.
    pub fn from_rational(prec: u32, r: &Rational) -> Self {
        let r = to_rug(r);
        let lo = Float::with_val_round(prec, &r, Round::Down).0;
        let hi = Float::with_val_round(prec, &r, Round::Up).0;
        Interval { lo, hi }
    }

    /// Enclosure of a decimal string such as `"5.07905"`.
    pub fn from_decimal(prec: u32, s: &str) -> Result<Self> {
        let r = decimal_to_rational(s)
            .ok_or_else(|| Error::invalid(format!("not a decimal number: `{s}`")))?;
        Ok(Interval::from_rational(prec, &r))
    }

    pub fn prec(&self) -> u32 {
        self.lo.prec()
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64_round(Round::Down)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64_round(Round::Up)
    }

    pub fn mid_f64(&self) -> f64 {
        (self.lo.to_f64() + self.hi.to_f64()) / 2.0
    }

    pub fn width_f64(&self) -> f64 {
        let mut w = self.hi.clone();
        w.sub_assign_round(&self.lo, Round::Up);
        w.to_f64_round(Round::Up)
    }

    pub fn contains_f64(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// `self ⊆ other`.
    pub fn is_within(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(&other.lo),
            hi: self.hi.clone().max(&other.hi),
        }
    }

    fn point(prec: u32, lo: Float, hi: Float) -> Self {
        debug_assert!(lo.prec() == prec || lo.is_zero());
        Interval { lo, hi }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        let mut lo = self.lo.clone();
        lo.add_assign_round(&o.lo, Round::Down);
        let mut hi = self.hi.clone();
        hi.add_assign_round(&o.hi, Round::Up);
        Interval::point(self.prec(), lo, hi)
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        let mut lo = self.lo.clone();
        lo.sub_assign_round(&o.hi, Round::Down);
        let mut hi = self.hi.clone();
        hi.sub_assign_round(&o.lo, Round::Up);
        Interval::point(self.prec(), lo, hi)
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let prods = |round: Round| -> Vec<Float> {
            [
                (&self.lo, &o.lo),
                (&self.lo, &o.hi),
                (&self.hi, &o.lo),
                (&self.hi, &o.hi),
            ]
            .iter()
            .map(|(a, b)| {
                let mut p = (*a).clone();
                p.mul_assign_round(*b, round);
                p
            })
            .collect()
        };
        let lo = prods(Round::Down)
            .into_iter()
            .min_by(cmp)
            .expect("four products");
        let hi = prods(Round::Up)
            .into_iter()
            .max_by(cmp)
            .expect("four products");
        Interval::point(self.prec(), lo, hi)
    }

    /// Fails if the divisor contains zero.
    pub fn div(&self, o: &Interval) -> Result<Interval> {
        if o.lo <= 0 && o.hi >= 0 {
            return Err(Error::invalid(
                "interval division by an interval containing zero",
            ));
        }
        let quots = |round: Round| -> Vec<Float> {
            [
                (&self.lo, &o.lo),
                (&self.lo, &o.hi),
                (&self.hi, &o.lo),
                (&self.hi, &o.hi),
            ]
            .iter()
            .map(|(a, b)| {
                let mut p = (*a).clone();
                p.div_assign_round(*b, round);
                p
            })
            .collect()
        };
        let lo = quots(Round::Down)
            .into_iter()
            .min_by(cmp)
            .expect("four quotients");
        let hi = quots(Round::Up)
            .into_iter()
            .max_by(cmp)
            .expect("four quotients");
        Ok(Interval::point(self.prec(), lo, hi))
    }

    pub fn recip(&self) -> Result<Interval> {
        Interval::from_int(self.prec(), 1).div(self)
    }

    /// Natural logarithm; requires a positive interval.
    pub fn ln(&self) -> Result<Interval> {
        if self.lo <= 0 {
            return Err(Error::invalid("logarithm of a non-positive interval"));
        }
        let mut lo = self.lo.clone();
        lo.ln_round(Round::Down);
        let mut hi = self.hi.clone();
        hi.ln_round(Round::Up);
        Ok(Interval { lo, hi })
    }

    pub fn exp(&self) -> Interval {
        let mut lo = self.lo.clone();
        lo.exp_round(Round::Down);
        let mut hi = self.hi.clone();
        hi.exp_round(Round::Up);
        Interval { lo, hi }
    }

    /// Requires a nonnegative interval.
    pub fn sqrt(&self) -> Result<Interval> {
        if self.lo < 0 {
            return Err(Error::invalid("square root of a negative interval"));
        }
        let mut lo = self.lo.clone();
        lo.sqrt_round(Round::Down);
        let mut hi = self.hi.clone();
        hi.sqrt_round(Round::Up);
        Ok(Interval { lo, hi })
    }

    pub fn cbrt(&self) -> Interval {
        let mut lo = self.lo.clone();
        lo.cbrt_round(Round::Down);
        let mut hi = self.hi.clone();
        hi.cbrt_round(Round::Up);
        Interval { lo, hi }
    }

    pub fn square(&self) -> Interval {
        if self.lo >= 0 {
            self.mul(self)
        } else if self.hi <= 0 {
            self.neg().mul(&self.neg())
        } else {
            let m = if self.lo.clone().abs() > self.hi.clone().abs() {
                self.neg().hi.clone()
            } else {
                self.hi.clone()
            };
            let mut hi = m;
            hi.square_round(Round::Up);
            Interval {
                lo: Float::with_val(self.prec(), 0),
                hi,
            }
        }
    }

    /// `self^e = exp(e · ln self)` for a positive base.
    pub fn pow(&self, e: &Interval) -> Result<Interval> {
        Ok(e.mul(&self.ln()?).exp())
    }

    /// `self^e` where `self` may be zero only if `e` is a positive integer; for
    /// positive bases this is [`Interval::pow`].
    pub fn powi(&self, e: u32) -> Interval {
        let mut acc = Interval::from_int(self.prec(), 1);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Certainly `self < other`.
    pub fn certainly_lt(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    pub fn certainly_le(&self, other: &Interval) -> bool {
        self.hi <= other.lo
    }

    pub fn certainly_gt(&self, other: &Interval) -> bool {
        other.certainly_lt(self)
    }

    /// `Some(ordering)` when the intervals are disjoint or both degenerate and equal.
    pub fn compare(&self, other: &Interval) -> Option<Ordering> {
        if self.certainly_lt(other) {
            Some(Ordering::Less)
        } else if other.certainly_lt(self) {
            Some(Ordering::Greater)
        } else if self.lo == self.hi && other.lo == other.hi && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Endpoints as decimal strings with `digits` significant digits,
    /// rounded outward.
    pub fn to_decimal_strings(&self, digits: usize) -> (String, String) {
        (
            self.lo.to_string_radix_round(10, Some(digits), Round::Down),
            self.hi.to_string_radix_round(10, Some(digits), Round::Up),
        )
    }

    pub fn to_json(&self) -> IntervalJson {
        let digits = ((self.prec() as f64) * std::f64::consts::LOG10_2).floor() as usize;
        let (lo, hi) = self.to_decimal_strings(digits.max(1));
        IntervalJson {
            lo,
            hi,
            precision_bits: self.prec(),
        }
    }
}

fn cmp(a: &Float, b: &Float) -> Ordering {
    a.partial_cmp(b).expect("no NaN endpoints")
}

/// Exact value of a plain decimal literal (optional sign, digits, optional fraction,
/// optional exponent).
pub fn decimal_to_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(p) => (&s[..p], s[p + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: num_bigint::BigInt = format!("{int}{frac}0").parse().ok()?;
    let digits = digits / 10;
    let scale = exp - frac.len() as i32;
    let ten = num_bigint::BigInt::from(10);
    let mut r = if scale >= 0 {
        Rational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Some(r)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalJson {
    pub lo: String,
    pub hi: String,
    pub precision_bits: u32,
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.to_decimal_strings(12);
        write!(f, "[{lo}, {hi}]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(v: i64) -> Interval {
        Interval::from_int(128, v)
    }

    #[test]
    fn ln_encloses_known_value() {
        let l = iv(8).ln().unwrap();
        assert!((l.mid_f64() - 8f64.ln()).abs() < 1e-15);
        assert!(l.width_f64() < 1e-30);
    }

    #[test]
    fn rational_enclosure() {
        let third = Interval::from_rational(64, &Rational::new(1.into(), 3.into()));
        assert!(third.lo() < third.hi());
        let three = third.mul(&iv(3));
        assert!(three.contains_f64(1.0));
    }

    #[test]
    fn decimals() {
        assert_eq!(
            decimal_to_rational("5.07905").unwrap(),
            Rational::new(507905.into(), 100000.into())
        );
        assert_eq!(
            decimal_to_rational("-2e3").unwrap(),
            Rational::from_integer((-2000).into())
        );
        assert_eq!(
            decimal_to_rational("1.5e-1").unwrap(),
            Rational::new(3.into(), 20.into())
        );
        assert!(decimal_to_rational("abc").is_none());
        assert!(decimal_to_rational(".").is_none());
    }

    #[test]
    fn division_by_zero_interval() {
        let z = Interval::new(Float::with_val(64, -1), Float::with_val(64, 1)).unwrap();
        assert!(iv(1).div(&z).is_err());
        assert!(iv(0).ln().is_err());
    }

    #[test]
    fn nesting_under_more_precision() {
        let f = |prec: u32| {
            let q = Interval::from_int(prec, 7);
            q.ln()
                .unwrap()
                .div(&Interval::from_int(prec, 3).ln().unwrap())
                .unwrap()
                .exp()
        };
        assert!(f(256).is_within(&f(128)));
        assert!(f(128).is_within(&f(64)));
    }

    #[test]
    fn square_and_pow() {
        let x = Interval::new(Float::with_val(64, -2), Float::with_val(64, 1)).unwrap();
        let s = x.square();
        assert_eq!(s.lo_f64(), 0.0);
        assert_eq!(s.hi_f64(), 4.0);
        let p = iv(2).pow(&iv(10)).unwrap();
        assert!(p.contains_f64(1024.0));
        assert!(iv(27).cbrt().contains_f64(3.0));
        assert_eq!(iv(3).powi(3).lo_f64(), 27.0);
    }

    #[test]
    fn decimal_output_is_outward() {
        let third = Interval::from_rational(128, &Rational::new(1.into(), 3.into()));
        let (lo, hi) = third.to_decimal_strings(5);
        assert!(lo.starts_with("3.3333e-1"), "{lo}");
        assert!(hi.starts_with("3.3334e-1"), "{hi}");
    }
}
