//! Function descriptors for the supported one-dimensional functions.
//!
//! A [`FunctionDescriptor`] bundles a function with closed-form derivatives of
//! every order, an interval extension of each derivative, and the structural
//! facts the enclosure dispatcher consumes:
//!
//! * monotonicity of the `k`th derivative over a region, from sign analysis
//!   of the `(k+1)`st derivative,
//! * an even-symmetric Hessian certificate for the activation functions,
//! * a local-extrema oracle for `sin` and `cos`.
//!
//! Linear combinations `sum w_i f_i(s_i x + t_i) + p(x)` are built with
//! [`combine_linear`]; they carry no certificate of their own and are
//! resolved by interval evaluation of their derivatives.

mod parse;
mod special;

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;

pub use parse::parse_function;

/// Radius of the region around the origin where the SiLU Hessian is
/// nonincreasing in `|x|`: the first positive zero of `silu'''`.
/// Derivation: `scripts/hessian_radius.py`.
pub const SILU_HESSIAN_RADIUS: f64 = 3.435_840_993_535_111;

/// `gelu'''(x) = phi(x) x (x^2 - 4)` vanishes first at `x = 2`.
pub const GELU_HESSIAN_RADIUS: f64 = 2.0;

/// `hard_silu` is exactly quadratic on `[-3, 3]`; its first derivative jumps
/// at both ends of that range.
pub const HARD_SILU_HESSIAN_RADIUS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Unknown,
}

/// Where a monotonicity verdict came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MonotoneEvidence {
    Certificate,
    LocalExtrema,
    IntervalDerivative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvenSymmetricHessian {
    /// `f''` is even on `[-alpha, alpha]`.
    pub alpha: f64,
    pub hessian_decreasing_on_0_alpha: bool,
}

/// One summand `weight * function(arg_scale * x + arg_shift)` of a linear
/// combination.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub weight: f64,
    pub function: FunctionDescriptor,
    pub arg_scale: f64,
    pub arg_shift: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Exp,
    /// `c^x`, `c > 0`.
    PowBase {
        c: f64,
        ln_c: f64,
    },
    Log,
    Abs,
    /// `x^c`; integer `c` on the real line, real `c > 0` on `[0, inf)`.
    Power {
        c: f64,
    },
    Sin,
    Cos,
    Softplus,
    Relu,
    LeakyRelu {
        slope: f64,
    },
    Gelu,
    Silu,
    HardSilu,
    Combination {
        terms: Vec<Term>,
        poly: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDescriptor {
    kind: Kind,
}

fn falling_factorial(c: f64, n: usize) -> f64 {
    (0..n).map(|i| c - i as f64).product()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn is_integer(c: f64) -> bool {
    c.fract() == 0.0
}

fn sign_pow(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `k`th derivative of `sin` is `trig(k mod 4, x)`.
fn trig(phase: usize, x: f64) -> f64 {
    match phase % 4 {
        0 => x.sin(),
        1 => x.cos(),
        2 => -x.sin(),
        _ => -x.cos(),
    }
}

/// Zeros of `trig(phase, .)` inside `[lo, hi]`, sorted.
fn trig_zeros(phase: usize, region: &Interval) -> Vec<f64> {
    // sin-like phases vanish at m*pi, cos-like phases at pi/2 + m*pi
    let offset = if phase.is_multiple_of(2) {
        0.0
    } else {
        FRAC_PI_2
    };
    let first = ((region.lo() - offset) / PI).ceil() as i64;
    let last = ((region.hi() - offset) / PI).floor() as i64;
    (first..=last)
        .map(|m| offset + m as f64 * PI)
        .filter(|x| region.contains(*x))
        .collect()
}

fn trig_range(phase: usize, region: &Interval) -> Interval {
    let mut range = Interval::hull_of(trig(phase, region.lo()), trig(phase, region.hi()));
    for z in trig_zeros(phase + 1, region) {
        range = range.hull(&Interval::point(trig(phase, z)));
    }
    range
}

fn poly_derivative(poly: &[f64], n: usize) -> Vec<f64> {
    poly.iter()
        .enumerate()
        .skip(n)
        .map(|(i, &c)| c * falling_factorial(i as f64, n))
        .collect()
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

impl FunctionDescriptor {
    fn new(kind: Kind) -> Self {
        FunctionDescriptor { kind }
    }

    /// Canonical textual form, parseable by [`parse_function`].
    pub fn name(&self) -> String {
        self.to_string()
    }

    /// Derivatives are available to every order; points where one does not
    /// exist report a domain error instead.
    pub fn max_derivative_order(&self) -> Option<usize> {
        None
    }

    /// Closure of the set where the function is defined.
    pub fn domain(&self) -> Interval {
        match &self.kind {
            Kind::Log => Interval::new(0.0, f64::INFINITY).unwrap(),
            Kind::Power { c } if !is_integer(*c) => Interval::new(0.0, f64::INFINITY).unwrap(),
            Kind::Combination { terms, .. } => {
                let mut dom = Interval::entire();
                for t in terms {
                    let inner = t.function.domain();
                    if inner == Interval::entire() {
                        continue;
                    }
                    let mapped = if t.arg_scale == 0.0 {
                        Interval::entire()
                    } else {
                        inner
                            .add_scalar(-t.arg_shift)
                            .scale(1.0 / t.arg_scale)
                            .expect("finite scale")
                    };
                    // terms with disjoint domains are caught by check_region
                    dom = dom.intersect(&mapped).unwrap_or(dom);
                }
                dom
            }
            _ => Interval::entire(),
        }
    }

    /// Points where the function or one of its derivatives fails to exist.
    pub fn kinks(&self) -> Vec<f64> {
        match &self.kind {
            Kind::Abs | Kind::Relu | Kind::LeakyRelu { .. } | Kind::Log => vec![0.0],
            Kind::Power { c } if !is_integer(*c) || *c < 0.0 => vec![0.0],
            Kind::HardSilu => vec![-3.0, 3.0],
            Kind::Combination { terms, .. } => {
                let mut out: Vec<f64> = terms
                    .iter()
                    .filter(|t| t.arg_scale != 0.0)
                    .flat_map(|t| {
                        t.function
                            .kinks()
                            .into_iter()
                            .map(move |k| (k - t.arg_shift) / t.arg_scale)
                    })
                    .collect();
                out.sort_by(f64::total_cmp);
                out.dedup();
                out
            }
            _ => Vec::new(),
        }
    }

    pub fn check_point(&self, x: f64) -> Result<()> {
        if x.is_nan() {
            return Err(Error::domain(&self.name(), "argument is NaN"));
        }
        match &self.kind {
            Kind::Log if x < 0.0 => {
                Err(Error::domain(&self.name(), format!("log undefined at {x}")))
            }
            Kind::Power { c } if !is_integer(*c) && x < 0.0 => Err(Error::domain(
                &self.name(),
                format!("non-integer power undefined at {x}"),
            )),
            Kind::Power { c } if *c < 0.0 && x == 0.0 => Err(Error::domain(
                &self.name(),
                "negative power has a pole at 0",
            )),
            Kind::Combination { terms, .. } => {
                for t in terms {
                    t.function.check_point(t.arg_scale * x + t.arg_shift)?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Every point of `region` must be in the domain.
    pub fn check_region(&self, region: &Interval) -> Result<()> {
        if !region.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "region {region} is not finite"
            )));
        }
        match &self.kind {
            Kind::Power { c } if *c < 0.0 && is_integer(*c) && region.contains(0.0) => Err(
                Error::domain(&self.name(), format!("pole at 0 inside region {region}")),
            ),
            Kind::Combination { terms, .. } => {
                for t in terms {
                    t.function.check_region(&inner_region(t, region))?;
                }
                Ok(())
            }
            _ => {
                self.check_point(region.lo())?;
                self.check_point(region.hi())
            }
        }
    }

    /// Function value; may be infinite at a domain boundary.
    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Exp => x.exp(),
            Kind::PowBase { ln_c, .. } => (x * ln_c).exp(),
            Kind::Log => x.ln(),
            Kind::Abs => x.abs(),
            Kind::Power { c } => power(x, *c),
            Kind::Sin => x.sin(),
            Kind::Cos => x.cos(),
            Kind::Softplus => special::softplus(x),
            Kind::Relu => x.max(0.0),
            Kind::LeakyRelu { slope } => {
                if x >= 0.0 {
                    x
                } else {
                    slope * x
                }
            }
            Kind::Gelu => x * special::normal_cdf(x),
            Kind::Silu => x * special::sigmoid(x),
            Kind::HardSilu => x * (x + 3.0).clamp(0.0, 6.0) / 6.0,
            Kind::Combination { terms, poly } => {
                terms
                    .iter()
                    .map(|t| t.weight * t.function.eval(t.arg_scale * x + t.arg_shift))
                    .sum::<f64>()
                    + horner(poly, x)
            }
        }
    }

    /// Estimated absolute rounding error of [`eval`](Self::eval) at `x`.
    ///
    /// Linear combinations can cancel, so the estimate scales with the size of
    /// the summands and the sensitivity to the rounded inner arguments rather
    /// than with `|f(x)|`.
    pub fn eval_error(&self, x: f64) -> f64 {
        let magnitude = match &self.kind {
            Kind::Combination { terms, poly } => {
                let inner: f64 = terms
                    .iter()
                    .map(|t| {
                        let u = t.arg_scale * x + t.arg_shift;
                        let slope = t.function.nth_derivative(1, u).map_or(0.0, f64::abs);
                        t.weight.abs()
                            * (t.function.eval(u).abs()
                                + slope * ((t.arg_scale * x).abs() + t.arg_shift.abs())
                                + t.function.eval_error(u) / f64::EPSILON)
                    })
                    .sum();
                let outer: f64 = poly
                    .iter()
                    .enumerate()
                    .map(|(j, c)| (c * x.powi(j as i32)).abs())
                    .sum();
                (1 + terms.len() + poly.len()) as f64 * (inner + outer)
            }
            _ => self.eval(x).abs(),
        };
        4.0 * f64::EPSILON * magnitude
    }

    /// `f^(n)(x)`, or a domain error naming the order when it does not exist.
    pub fn nth_derivative(&self, n: usize, x: f64) -> Result<f64> {
        self.check_point(x)?;
        if n == 0 {
            return Ok(self.eval(x));
        }
        let undefined = || {
            Err(Error::domain(
                &self.name(),
                format!("derivative of order {n} undefined at {x}"),
            ))
        };
        let v = match &self.kind {
            Kind::Exp => x.exp(),
            Kind::PowBase { ln_c, .. } => ln_c.powi(n as i32) * (x * ln_c).exp(),
            Kind::Log => sign_pow(n - 1) * factorial(n - 1) / x.powi(n as i32),
            Kind::Abs => {
                if x == 0.0 {
                    return undefined();
                }
                if n == 1 {
                    x.signum()
                } else {
                    0.0
                }
            }
            Kind::Power { c } => {
                let coef = falling_factorial(*c, n);
                if coef == 0.0 {
                    0.0
                } else {
                    if x == 0.0 && !is_integer(*c) && *c < n as f64 {
                        // derivative blows up at the boundary of [0, inf)
                        return Ok(coef.signum() * f64::INFINITY);
                    }
                    coef * power(x, *c - n as f64)
                }
            }
            Kind::Sin => trig(n, x),
            Kind::Cos => trig(n + 1, x),
            Kind::Softplus => special::sigmoid_derivative(n - 1, x),
            Kind::Relu | Kind::LeakyRelu { .. } => {
                if x == 0.0 {
                    return undefined();
                }
                let slope = match self.kind {
                    Kind::LeakyRelu { slope } => slope,
                    _ => 0.0,
                };
                match (n, x > 0.0) {
                    (1, true) => 1.0,
                    (1, false) => slope,
                    _ => 0.0,
                }
            }
            Kind::HardSilu => {
                if x.abs() == 3.0 {
                    return undefined();
                }
                let inside = x.abs() < 3.0;
                match n {
                    1 if inside => (2.0 * x + 3.0) / 6.0,
                    1 => {
                        if x > 0.0 {
                            1.0
                        } else {
                            0.0
                        }
                    }
                    2 if inside => 1.0 / 3.0,
                    _ => 0.0,
                }
            }
            Kind::Gelu => {
                x * special::normal_cdf_derivative(n, x)
                    + n as f64 * special::normal_cdf_derivative(n - 1, x)
            }
            Kind::Silu => {
                x * special::sigmoid_derivative(n, x)
                    + n as f64 * special::sigmoid_derivative(n - 1, x)
            }
            Kind::Combination { terms, poly } => {
                let mut acc = horner(&poly_derivative(poly, n), x);
                for t in terms {
                    let inner = t
                        .function
                        .nth_derivative(n, t.arg_scale * x + t.arg_shift)?;
                    acc += t.weight * t.arg_scale.powi(n as i32) * inner;
                }
                acc
            }
        };
        Ok(v)
    }

    /// Interval extension of `f^(n)` over `region`: an interval guaranteed to
    /// contain `f^(n)(y)` for every `y` in `region` where it exists (up to
    /// round-off). Point masses of a discontinuous lower derivative appear as
    /// infinite endpoints.
    pub fn derivative_interval(&self, n: usize, region: &Interval) -> Interval {
        let (a, b) = (region.lo(), region.hi());
        let interior_has = |p: f64| region.contains_interior(p);
        match &self.kind {
            Kind::Exp => Interval::hull_of(a.exp(), b.exp()),
            Kind::PowBase { ln_c, .. } => Interval::hull_of((a * ln_c).exp(), (b * ln_c).exp())
                .scale(ln_c.powi(n as i32))
                .unwrap(),
            Kind::Log => {
                if n == 0 {
                    Interval::hull_of(a.ln(), b.ln())
                } else {
                    Interval::hull_of(a.powi(-(n as i32)), b.powi(-(n as i32)))
                        .scale(sign_pow(n - 1) * factorial(n - 1))
                        .unwrap()
                }
            }
            Kind::Abs => match n {
                0 => {
                    let r = Interval::hull_of(a.abs(), b.abs());
                    if region.contains(0.0) {
                        r.hull(&Interval::point(0.0))
                    } else {
                        r
                    }
                }
                1 => piece_hull(&[(a < 0.0, -1.0), (b > 0.0, 1.0)]),
                2 => {
                    if interior_has(0.0) {
                        Interval::new(0.0, f64::INFINITY).unwrap()
                    } else {
                        Interval::point(0.0)
                    }
                }
                _ => {
                    if interior_has(0.0) {
                        Interval::entire()
                    } else {
                        Interval::point(0.0)
                    }
                }
            },
            Kind::Power { c } => {
                let coef = falling_factorial(*c, n);
                if coef == 0.0 {
                    return Interval::point(0.0);
                }
                let m = *c - n as f64;
                let mut r = Interval::hull_of(power(a, m), power(b, m));
                if m > 0.0 && is_integer(m) && (m as i64) % 2 == 0 && region.contains(0.0) {
                    r = r.hull(&Interval::point(0.0));
                }
                r.scale(coef).unwrap()
            }
            Kind::Sin => trig_range(n, region),
            Kind::Cos => trig_range(n + 1, region),
            Kind::Softplus => {
                if n == 0 {
                    Interval::hull_of(special::softplus(a), special::softplus(b))
                } else {
                    special::sigmoid_derivative_range(n - 1, region)
                }
            }
            Kind::Relu | Kind::LeakyRelu { .. } => {
                let slope = match self.kind {
                    Kind::LeakyRelu { slope } => slope,
                    _ => 0.0,
                };
                let jump = 1.0 - slope;
                match n {
                    0 => {
                        let r = Interval::hull_of(self.eval(a), self.eval(b));
                        if region.contains(0.0) {
                            r.hull(&Interval::point(0.0))
                        } else {
                            r
                        }
                    }
                    1 => piece_hull(&[(a < 0.0, slope), (b > 0.0, 1.0)]),
                    _ if !interior_has(0.0) || jump == 0.0 => Interval::point(0.0),
                    2 if jump > 0.0 => Interval::new(0.0, f64::INFINITY).unwrap(),
                    2 => Interval::new(f64::NEG_INFINITY, 0.0).unwrap(),
                    _ => Interval::entire(),
                }
            }
            Kind::HardSilu => {
                let mid = region.intersect(&Interval::new(-3.0, 3.0).unwrap());
                let left = a < -3.0;
                let right = b > 3.0;
                let kink_inside = interior_has(-3.0) || interior_has(3.0);
                match n {
                    0 => {
                        let mut r = Interval::hull_of(self.eval(a), self.eval(b));
                        if region.contains(-1.5) {
                            r = r.hull(&Interval::point(self.eval(-1.5)));
                        }
                        r
                    }
                    1 => {
                        let mut r: Option<Interval> = None;
                        let mut add = |i: Interval| {
                            r = Some(r.map_or(i, |acc| acc.hull(&i)));
                        };
                        if left {
                            add(Interval::point(0.0));
                        }
                        if right {
                            add(Interval::point(1.0));
                        }
                        if let Some(m) = mid {
                            add(Interval::hull_of(
                                (2.0 * m.lo() + 3.0) / 6.0,
                                (2.0 * m.hi() + 3.0) / 6.0,
                            ));
                        }
                        r.unwrap_or(Interval::point(0.0))
                    }
                    2 => {
                        let mut vals = Vec::new();
                        if left || right {
                            vals.push(0.0);
                        }
                        if mid.is_some_and(|m| !m.is_degenerate()) || (!left && !right) {
                            vals.push(1.0 / 3.0);
                        }
                        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
                        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                        // f' drops by 1/2 at both kinks
                        let lo = if kink_inside { f64::NEG_INFINITY } else { lo };
                        Interval::new(lo, hi).unwrap()
                    }
                    _ => {
                        if kink_inside {
                            Interval::entire()
                        } else {
                            Interval::point(0.0)
                        }
                    }
                }
            }
            Kind::Gelu => {
                let base = region.mul(&special::normal_cdf_derivative_range(n, region));
                if n == 0 {
                    base
                } else {
                    base.add(
                        &special::normal_cdf_derivative_range(n - 1, region)
                            .scale(n as f64)
                            .unwrap(),
                    )
                }
            }
            Kind::Silu => {
                let base = region.mul(&special::sigmoid_derivative_range(n, region));
                if n == 0 {
                    base
                } else {
                    base.add(
                        &special::sigmoid_derivative_range(n - 1, region)
                            .scale(n as f64)
                            .unwrap(),
                    )
                }
            }
            Kind::Combination { terms, poly } => {
                let mut acc = Interval::eval_poly(&poly_derivative(poly, n), region);
                for t in terms {
                    let inner = t.function.derivative_interval(n, &inner_region(t, region));
                    let factor = t.weight * t.arg_scale.powi(n as i32);
                    acc = acc.add(&inner.scale(factor).unwrap());
                }
                acc
            }
        }
    }

    /// Monotonicity of `f^(k)` over `region` from the function's own
    /// certificate (sign analysis of `f^(k+1)`), without any numerical
    /// evaluation.
    pub fn certified_monotonicity(&self, k: usize, region: &Interval) -> Monotonicity {
        use Monotonicity::*;
        let (a, b) = (region.lo(), region.hi());
        let from_sign = |s: f64| if s >= 0.0 { Increasing } else { Decreasing };
        match &self.kind {
            Kind::Exp => Increasing,
            Kind::PowBase { ln_c, .. } => from_sign(ln_c.powi(k as i32 + 1)),
            Kind::Log => {
                if k % 2 == 1 {
                    Decreasing
                } else {
                    Increasing
                }
            }
            Kind::Abs => match k {
                0 if a >= 0.0 => Increasing,
                0 if b <= 0.0 => Decreasing,
                1 => Increasing,
                _ => Unknown,
            },
            Kind::Power { c } => {
                let coef = falling_factorial(*c, k + 1);
                if coef == 0.0 {
                    return Increasing;
                }
                let m = *c - k as f64 - 1.0;
                let even_power = is_integer(m) && (m as i64) % 2 == 0;
                if even_power || a >= 0.0 {
                    from_sign(coef)
                } else if b <= 0.0 {
                    from_sign(-coef)
                } else {
                    Unknown
                }
            }
            Kind::Sin | Kind::Cos => Unknown,
            Kind::Softplus => match k {
                0 | 1 => Increasing,
                2 if a >= 0.0 => Decreasing,
                2 if b <= 0.0 => Increasing,
                _ => Unknown,
            },
            Kind::Relu | Kind::LeakyRelu { .. } => {
                let slope = match self.kind {
                    Kind::LeakyRelu { slope } => slope,
                    _ => 0.0,
                };
                match k {
                    0 if slope >= 0.0 || a >= 0.0 => Increasing,
                    0 if b <= 0.0 => Decreasing,
                    0 => Unknown,
                    1 => from_sign(1.0 - slope),
                    _ if !region.contains_interior(0.0) => Increasing,
                    _ => Unknown,
                }
            }
            Kind::HardSilu => {
                // f' drops by 1/2 at both kinks, so no derivative past f is
                // monotone across one
                let kink_inside = region.contains_interior(-3.0) || region.contains_interior(3.0);
                match k {
                    0 if a >= -1.5 => Increasing,
                    0 if b <= -1.5 => Decreasing,
                    0 => Unknown,
                    _ if kink_inside => Unknown,
                    _ => Increasing,
                }
            }
            Kind::Gelu | Kind::Silu | Kind::Combination { .. } => Unknown,
        }
    }

    /// Zeros of `f^(k+1)` in `region` (the local extrema of `f^(k)`), for
    /// functions where these can be enumerated.
    pub fn local_extrema(&self, k: usize, region: &Interval) -> Option<Vec<f64>> {
        match &self.kind {
            Kind::Sin => Some(trig_zeros(k + 1, region)),
            Kind::Cos => Some(trig_zeros(k + 2, region)),
            _ => None,
        }
    }

    pub fn even_symmetric_hessian(&self) -> Option<EvenSymmetricHessian> {
        let alpha = match &self.kind {
            Kind::Softplus | Kind::Relu => f64::INFINITY,
            Kind::LeakyRelu { slope } if *slope <= 1.0 => f64::INFINITY,
            Kind::HardSilu => HARD_SILU_HESSIAN_RADIUS,
            Kind::Gelu => GELU_HESSIAN_RADIUS,
            Kind::Silu => SILU_HESSIAN_RADIUS,
            _ => return None,
        };
        Some(EvenSymmetricHessian {
            alpha,
            hessian_decreasing_on_0_alpha: true,
        })
    }

    /// Monotonicity of `f^(k)` over `region`, trying in order the
    /// certificate, the local-extrema oracle, and interval evaluation of
    /// `f^(k+1)`.
    pub fn monotone_evidence(
        &self,
        k: usize,
        region: &Interval,
    ) -> (Monotonicity, Option<MonotoneEvidence>) {
        let cert = self.certified_monotonicity(k, region);
        if cert != Monotonicity::Unknown {
            return (cert, Some(MonotoneEvidence::Certificate));
        }
        if let Some(extrema) = self.local_extrema(k, region) {
            if extrema.iter().all(|x| !region.contains_interior(*x)) {
                let fa = self.nth_derivative(k, region.lo());
                let fb = self.nth_derivative(k, region.hi());
                if let (Ok(fa), Ok(fb)) = (fa, fb) {
                    let m = if fb >= fa {
                        Monotonicity::Increasing
                    } else {
                        Monotonicity::Decreasing
                    };
                    return (m, Some(MonotoneEvidence::LocalExtrema));
                }
            }
            return (Monotonicity::Unknown, None);
        }
        let next = self.derivative_interval(k + 1, region);
        if next.lo() >= 0.0 {
            (
                Monotonicity::Increasing,
                Some(MonotoneEvidence::IntervalDerivative),
            )
        } else if next.hi() <= 0.0 {
            (
                Monotonicity::Decreasing,
                Some(MonotoneEvidence::IntervalDerivative),
            )
        } else {
            (Monotonicity::Unknown, None)
        }
    }

    pub fn monotone_kth(&self, k: usize, region: &Interval) -> Monotonicity {
        self.monotone_evidence(k, region).0
    }
}

fn power(x: f64, c: f64) -> f64 {
    if is_integer(c) && c.abs() < i32::MAX as f64 {
        x.powi(c as i32)
    } else {
        x.powf(c)
    }
}

/// Hull of the constant pieces present in a region; a degenerate region on
/// the breakpoint gets the hull of all pieces.
fn piece_hull(pieces: &[(bool, f64)]) -> Interval {
    let mut present: Vec<f64> = pieces
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, v)| *v)
        .collect();
    if present.is_empty() {
        present = pieces.iter().map(|(_, v)| *v).collect();
    }
    Interval::hull_of(
        present.iter().copied().fold(f64::INFINITY, f64::min),
        present.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    )
}

fn inner_region(t: &Term, region: &Interval) -> Interval {
    region
        .scale(t.arg_scale)
        .expect("finite scale")
        .add_scalar(t.arg_shift)
}

impl fmt::Display for FunctionDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Exp => write!(f, "exp"),
            Kind::PowBase { c, .. } => write!(f, "pow_c_x:{}", fmt_num(*c)),
            Kind::Log => write!(f, "log"),
            Kind::Abs => write!(f, "abs"),
            Kind::Power { c } => write!(f, "pow_x_c:{}", fmt_num(*c)),
            Kind::Sin => write!(f, "sin"),
            Kind::Cos => write!(f, "cos"),
            Kind::Softplus => write!(f, "softplus"),
            Kind::Relu => write!(f, "relu"),
            Kind::LeakyRelu { slope } => write!(f, "leaky_relu:{}", fmt_num(*slope)),
            Kind::Gelu => write!(f, "gelu"),
            Kind::Silu => write!(f, "silu"),
            Kind::HardSilu => write!(f, "hard_silu"),
            Kind::Combination { terms, poly } => {
                let mut parts = Vec::new();
                if !terms.is_empty() {
                    let inner: Vec<String> = terms
                        .iter()
                        .map(|t| {
                            format!(
                                "({},{},{},{})",
                                fmt_num(t.weight),
                                t.function,
                                fmt_num(t.arg_scale),
                                fmt_num(t.arg_shift)
                            )
                        })
                        .collect();
                    parts.push(format!("lincomb:[{}]", inner.join(",")));
                }
                if !poly.is_empty() {
                    let cs: Vec<String> = poly.iter().map(|c| fmt_num(*c)).collect();
                    parts.push(format!("poly:[{}]", cs.join(",")));
                }
                write!(f, "{}", parts.join("+"))
            }
        }
    }
}

fn require_params(
    name: &str,
    params: &[f64],
    allowed: std::ops::RangeInclusive<usize>,
) -> Result<()> {
    if !allowed.contains(&params.len()) {
        return Err(Error::InvalidArgument(format!(
            "{name} takes {allowed:?} parameters, got {}",
            params.len()
        )));
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "{name}: parameters must be finite"
        )));
    }
    Ok(())
}

/// Look up a catalog function by name.
///
/// Names: `exp`, `log`, `abs`, `sin`, `cos`, `softplus`, `relu`, `gelu`,
/// `silu`, `hard_silu`, `pow_c_x` (`c^x`, one parameter `c > 0`), `pow_x_c`
/// (`x^c`, one parameter; integer, or real `c > 0` on `[0, inf)`), and
/// `leaky_relu` (optional slope, default `0.01`).
pub fn catalog_lookup(name: &str, params: &[f64]) -> Result<FunctionDescriptor> {
    let kind = match name {
        "exp" | "log" | "abs" | "sin" | "cos" | "softplus" | "relu" | "gelu" | "silu"
        | "hard_silu" => {
            require_params(name, params, 0..=0)?;
            match name {
                "exp" => Kind::Exp,
                "log" => Kind::Log,
                "abs" => Kind::Abs,
                "sin" => Kind::Sin,
                "cos" => Kind::Cos,
                "softplus" => Kind::Softplus,
                "relu" => Kind::Relu,
                "gelu" => Kind::Gelu,
                "silu" => Kind::Silu,
                _ => Kind::HardSilu,
            }
        }
        "pow_c_x" => {
            require_params(name, params, 1..=1)?;
            let c = params[0];
            if c <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "pow_c_x needs c > 0, got {c}"
                )));
            }
            Kind::PowBase { c, ln_c: c.ln() }
        }
        "pow_x_c" | "pow" => {
            require_params(name, params, 1..=1)?;
            let c = params[0];
            if !is_integer(c) && c <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "pow_x_c needs an integer or positive exponent, got {c}"
                )));
            }
            Kind::Power { c }
        }
        "leaky_relu" => {
            require_params(name, params, 0..=1)?;
            Kind::LeakyRelu {
                slope: params.first().copied().unwrap_or(0.01),
            }
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown function {other:?}"
            )))
        }
    };
    Ok(FunctionDescriptor::new(kind))
}

/// `sum weight_i * f_i(arg_scale_i * x + arg_shift_i) + sum poly[j] x^j`.
pub fn combine_linear(terms: Vec<Term>, poly: Vec<f64>) -> Result<FunctionDescriptor> {
    if terms.is_empty() && poly.is_empty() {
        return Err(Error::InvalidArgument(
            "linear combination needs at least one term or polynomial coefficient".into(),
        ));
    }
    for t in &terms {
        if !(t.weight.is_finite() && t.arg_scale.is_finite() && t.arg_shift.is_finite()) {
            return Err(Error::InvalidArgument(
                "term parameters must be finite".into(),
            ));
        }
    }
    if poly.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument(
            "polynomial coefficients must be finite".into(),
        ));
    }
    Ok(FunctionDescriptor::new(Kind::Combination { terms, poly }))
}

/// Polynomial `sum coeffs[i] x^i` as a descriptor.
pub fn polynomial(coeffs: Vec<f64>) -> Result<FunctionDescriptor> {
    combine_linear(Vec::new(), coeffs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RangeSource {
    /// Minimum and maximum over the endpoints and the enumerated extrema.
    LocalExtrema,
    /// Endpoint values of a monotone derivative.
    Monotone,
    /// Interval extension of the closed-form derivative.
    IntervalArithmetic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeRange {
    pub interval: Interval,
    pub source: RangeSource,
    pub diagnostics: Vec<String>,
}

/// Range of `f^(k)` over `region`.
///
/// Exact when the local extrema or the monotonicity of `f^(k)` are known;
/// otherwise an interval-arithmetic enclosure of the true range. A derivative
/// that does not exist somewhere in the region yields an infinite endpoint
/// and a diagnostic rather than an error.
pub fn derivative_range(f: &FunctionDescriptor, k: usize, region: &Interval) -> DerivativeRange {
    let mut diagnostics = Vec::new();
    let endpoint_values = || -> Option<(f64, f64)> {
        let fa = f.nth_derivative(k, region.lo()).ok()?;
        let fb = f.nth_derivative(k, region.hi()).ok()?;
        (!fa.is_nan() && !fb.is_nan()).then_some((fa, fb))
    };

    let mut result = None;
    if let Some(extrema) = f.local_extrema(k, region) {
        if let Some((fa, fb)) = endpoint_values() {
            let mut r = Interval::hull_of(fa, fb);
            for x in extrema {
                if let Ok(v) = f.nth_derivative(k, x) {
                    r = r.hull(&Interval::point(v));
                }
            }
            result = Some((r, RangeSource::LocalExtrema));
        }
    }
    if result.is_none() {
        let (mono, _) = f.monotone_evidence(k, region);
        if mono != Monotonicity::Unknown {
            if let Some((fa, fb)) = endpoint_values() {
                result = Some((Interval::hull_of(fa, fb), RangeSource::Monotone));
            }
        }
    }
    let (interval, source) = result.unwrap_or_else(|| {
        (
            f.derivative_interval(k, region),
            RangeSource::IntervalArithmetic,
        )
    });
    if !interval.is_finite() {
        diagnostics.push(format!(
            "derivative of order {k} of {f} is unbounded or undefined on {region}"
        ));
    }
    DerivativeRange {
        interval,
        source,
        diagnostics,
    }
}
