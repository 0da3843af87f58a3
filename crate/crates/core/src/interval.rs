//! Closed real intervals.
//!
//! Endpoints are computed with ordinary round-to-nearest arithmetic. Where a
//! caller needs to assert that a computed value lies inside a computed bound,
//! [`Interval::inflate_ulps`] widens the bound outward by a fixed number of
//! units in the last place.
//!
//! Infinite endpoints are allowed so that vacuous bounds can be represented,
//! and the product `0 * inf` is taken to be `0` everywhere in this module.

use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of ulps used when checking enclosure membership.
pub const VALIDITY_ULPS: u32 = 4;

/// A closed interval `[lo, hi]` with `lo <= hi` and no NaN endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

/// Product with the annihilation convention `0 * ±inf = 0`.
pub(crate) fn mul0(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "interval endpoint is NaN: [{lo}, {hi}]"
            )));
        }
        if lo > hi {
            return Err(Error::InvalidArgument(format!(
                "interval endpoints out of order: [{lo}, {hi}]"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: f64) -> Self {
        assert!(!x.is_nan(), "point interval at NaN");
        Interval { lo: x, hi: x }
    }

    /// Smallest interval containing both values. Panics on NaN.
    pub fn hull_of(a: f64, b: f64) -> Self {
        assert!(!a.is_nan() && !b.is_nan(), "hull of NaN");
        Interval {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    pub fn entire() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        if self.lo == self.hi {
            0.0
        } else {
            self.hi - self.lo
        }
    }

    pub fn mid(&self) -> f64 {
        0.5 * self.lo + 0.5 * self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    /// Closed membership test. A NaN argument is never contained.
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// `true` when `x` is strictly between the endpoints.
    pub fn contains_interior(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn is_subset(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// `{z * alpha : z in self}`.
    pub fn scale(&self, alpha: f64) -> Result<Self> {
        if alpha.is_nan() {
            return Err(Error::InvalidArgument("scale factor is NaN".into()));
        }
        let a = mul0(self.lo, alpha);
        let b = mul0(self.hi, alpha);
        Ok(if alpha >= 0.0 {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        })
    }

    /// Widen each finite endpoint outward by `n` ulps.
    pub fn inflate_ulps(&self, n: u32) -> Self {
        let mut lo = self.lo;
        let mut hi = self.hi;
        for _ in 0..n {
            lo = lo.next_down();
            hi = hi.next_up();
        }
        Interval { lo, hi }
    }

    /// Widen outward by a nonnegative absolute amount.
    pub fn inflate_abs(&self, delta: f64) -> Self {
        debug_assert!(delta >= 0.0);
        Interval {
            lo: self.lo - delta,
            hi: self.hi + delta,
        }
    }

    pub fn hull(&self, other: &Interval) -> Self {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Self> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn add(&self, other: &Interval) -> Self {
        Interval::sanitize(self.lo + other.lo, self.hi + other.hi)
    }

    pub fn add_scalar(&self, c: f64) -> Self {
        Interval::sanitize(self.lo + c, self.hi + c)
    }

    pub fn neg(&self) -> Self {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    pub fn mul(&self, other: &Interval) -> Self {
        let p = [
            mul0(self.lo, other.lo),
            mul0(self.lo, other.hi),
            mul0(self.hi, other.lo),
            mul0(self.hi, other.hi),
        ];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval { lo, hi }
    }

    /// Interval Horner evaluation of `sum coeffs[i] * x^i`.
    pub fn eval_poly(coeffs: &[f64], x: &Interval) -> Self {
        let mut acc = Interval::point(0.0);
        for &c in coeffs.iter().rev() {
            acc = acc.mul(x).add_scalar(c);
        }
        acc
    }

    // inf + (-inf) can only arise from already-vacuous operands
    fn sanitize(lo: f64, hi: f64) -> Self {
        Interval {
            lo: if lo.is_nan() { f64::NEG_INFINITY } else { lo },
            hi: if hi.is_nan() { f64::INFINITY } else { hi },
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// JSON encoding of a possibly infinite float: a number, `"inf"` or `"-inf"`.
pub mod json_float {
    use serde::de::{self, Deserializer};
    use serde::{Deserialize, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if *x == f64::INFINITY {
            s.serialize_str("inf")
        } else if *x == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(*x)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) => match s.as_str() {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(de::Error::custom(format!("bad float literal {other:?}"))),
            },
        }
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    #[serde(with = "json_float")]
    lo: f64,
    #[serde(with = "json_float")]
    hi: f64,
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Interval", 2)?;
        st.serialize_field("lo", &JsonF(self.lo))?;
        st.serialize_field("hi", &JsonF(self.hi))?;
        st.end()
    }
}

struct JsonF(f64);

impl Serialize for JsonF {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        json_float::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = IntervalRepr::deserialize(d)?;
        Interval::new(repr.lo, repr.hi).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn rejects_bad_endpoints() {
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_ok());
    }

    #[test]
    fn scale_examples() {
        assert_eq!(iv(1.0, 2.0).scale(3.0).unwrap(), iv(3.0, 6.0));
        assert_eq!(iv(1.0, 2.0).scale(-3.0).unwrap(), iv(-6.0, -3.0));
        assert_eq!(iv(-1.0, 1.0).scale(0.0).unwrap(), iv(0.0, 0.0));
        assert!(iv(1.0, 2.0).scale(f64::NAN).is_err());
    }

    #[test]
    fn zero_times_infinite_is_zero() {
        let vacuous = iv(0.0, f64::INFINITY);
        assert_eq!(vacuous.scale(0.0).unwrap(), iv(0.0, 0.0));
        assert_eq!(vacuous.scale(-2.0).unwrap(), iv(f64::NEG_INFINITY, 0.0));
    }

    #[test]
    fn width_examples() {
        assert!((iv(0.70255, 1.4522).width() - 0.74965).abs() < 1e-12);
        assert_eq!(iv(5.0, 5.0).width(), 0.0);
        assert_eq!(iv(0.0, f64::INFINITY).width(), f64::INFINITY);
        assert_eq!(Interval::point(f64::INFINITY).width(), 0.0);
    }

    #[test]
    fn contains_examples() {
        let unit = iv(0.0, 1.0);
        assert!(unit.contains(0.5));
        assert!(unit.contains(1.0));
        assert!(!unit.contains(1.0000001));
        assert!(!unit.contains(f64::NAN));
    }

    #[test]
    fn subset_examples() {
        assert!(iv(0.70255, 1.4522).is_subset(&iv(0.5, 3.6945)));
        let i = iv(-3.0, 7.0);
        assert!(i.is_subset(&i));
        assert!(!iv(0.0, 2.0).is_subset(&iv(0.0, 1.0)));
    }

    #[test]
    fn json_round_trip_with_infinities() {
        let i = iv(0.0, f64::INFINITY);
        let s = serde_json::to_string(&i).unwrap();
        assert_eq!(s, r#"{"lo":0.0,"hi":"inf"}"#);
        let back: Interval = serde_json::from_str(&s).unwrap();
        assert_eq!(back, i);
        let neg: Interval = serde_json::from_str(r#"{"lo":"-inf","hi":1.5}"#).unwrap();
        assert_eq!(neg, iv(f64::NEG_INFINITY, 1.5));
        assert!(serde_json::from_str::<Interval>(r#"{"lo":2,"hi":1}"#).is_err());
    }

    #[test]
    fn poly_enclosure_contains_samples() {
        let coeffs = [1.0, -3.0, 0.5, 2.0];
        let x = iv(-1.5, 0.75);
        let range = Interval::eval_poly(&coeffs, &x);
        for i in 0..=100 {
            let t = -1.5 + 2.25 * i as f64 / 100.0;
            let v = coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c);
            assert!(range.inflate_ulps(4).contains(v));
        }
    }

    fn ulps_apart(a: f64, b: f64) -> u64 {
        let key = |x: f64| {
            let bits = x.to_bits() as i64;
            if bits < 0 {
                i64::MIN - bits
            } else {
                bits
            }
        };
        key(a).abs_diff(key(b))
    }

    proptest! {
        #[test]
        fn scale_is_associative(lo in -1e3f64..1e3, w in 0.0f64..1e3, a in -1e3f64..1e3, b in -1e3f64..1e3) {
            let i = iv(lo, lo + w);
            let twice = i.scale(a).unwrap().scale(b).unwrap();
            let once = i.scale(a * b).unwrap();
            // one rounding on each side of the comparison
            prop_assert!(ulps_apart(twice.lo(), once.lo()) <= 2 || (twice.lo() - once.lo()).abs() < 1e-300);
            prop_assert!(ulps_apart(twice.hi(), once.hi()) <= 2 || (twice.hi() - once.hi()).abs() < 1e-300);
        }

        #[test]
        fn scale_contains_scaled_members(lo in -1e3f64..1e3, w in 0.0f64..1e3, t in 0.0f64..=1.0, a in -1e3f64..1e3) {
            let i = iv(lo, lo + w);
            let z = (lo + t * w).min(i.hi());
            prop_assert!(i.scale(a).unwrap().inflate_ulps(VALIDITY_ULPS).contains(z * a));
        }

        #[test]
        fn scale_multiplies_width(lo in -1e3f64..1e3, w in 0.0f64..1e3, a in -1e3f64..1e3) {
            let i = iv(lo, lo + w);
            let lhs = i.scale(a).unwrap().width();
            let rhs = a.abs() * i.width();
            prop_assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON * (lo.abs() + w) * a.abs() + 1e-300);
        }
    }
}
