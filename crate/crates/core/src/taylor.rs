//! Taylor polynomials, remainders and the remainder ratio
//! `R_{k-1}(x) / (x - x0)^k`.

use serde::{Deserialize, Serialize};

use crate::catalog::FunctionDescriptor;
use crate::error::{Error, Result};

/// Maximum number of series terms used when evaluating the ratio near `x0`.
const TAIL_TERMS: usize = 30;

/// Relative size of the quotient's cancellation error at which the series
/// takes over: the switch happens once `|x - x0|^k` drops below
/// `QUOTIENT_FLOOR * (1 + |x0|)^k`.
const QUOTIENT_FLOOR: f64 = 1e-6;

/// `sum coeffs[i] (x - x0)^i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorPoly {
    pub x0: f64,
    pub coeffs: Vec<f64>,
}

impl TaylorPoly {
    /// Degree, or `None` for the empty polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Horner evaluation from the highest degree; returns `coeffs[0]` exactly
    /// at `x0`.
    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coeffs, x - self.x0)
    }

    /// `sum |coeffs[i]| |h|^i`, used to bound round-off in [`TaylorPoly::eval`].
    pub(crate) fn abs_sum(&self, h: f64) -> f64 {
        horner_abs(&self.coeffs, h.abs())
    }
}

pub(crate) fn horner(coeffs: &[f64], h: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * h + c)
}

fn horner_abs(coeffs: &[f64], h: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * h + c.abs())
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `f^(n)(x0) / n!`, required to be finite.
fn coefficient(f: &FunctionDescriptor, n: usize, x0: f64) -> Result<f64> {
    let c = f.nth_derivative(n, x0)? / factorial(n);
    if !c.is_finite() {
        return Err(Error::Domain {
            function: f.name(),
            message: format!("derivative of order {n} is not finite at {x0}"),
        });
    }
    Ok(c)
}

/// Degree-`j` Taylor polynomial of `f` at `x0`; `j = -1` gives the empty
/// polynomial.
pub fn taylor_coefficients(f: &FunctionDescriptor, j: i64, x0: f64) -> Result<TaylorPoly> {
    if j < -1 {
        return Err(Error::InvalidArgument(format!("degree {j} is below -1")));
    }
    let coeffs = (0..=j)
        .map(|i| coefficient(f, i as usize, x0))
        .collect::<Result<Vec<_>>>()?;
    Ok(TaylorPoly { x0, coeffs })
}

/// `R_j(x) = f(x) - T_j(x)`; `R_{-1} = f`.
pub fn remainder(f: &FunctionDescriptor, j: i64, x0: f64, x: f64) -> Result<f64> {
    f.check_point(x)?;
    let t = taylor_coefficients(f, j, x0)?;
    Ok(f.eval(x) - t.eval(x))
}

/// `R_{k-1}(x) / (x - x0)^k`, continuously extended by `f^(k)(x0)/k!` at
/// `x = x0`.
pub fn remainder_ratio(f: &FunctionDescriptor, k: usize, x0: f64, x: f64) -> Result<f64> {
    f.check_point(x)?;
    let ev = RatioEvaluator::new(f, k, x0)?;
    if x == x0 {
        return ev.limit().ok_or_else(|| Error::Domain {
            function: f.name(),
            message: format!("derivative of order {k} undefined at {x0}"),
        });
    }
    Ok(ev.eval(x))
}

/// Evaluates the remainder ratio for fixed `(f, k, x0)` at many points.
///
/// Close to `x0` the quotient `R_{k-1}(x) / (x - x0)^k` loses every
/// significant digit, so there the ratio is summed from its Taylor series
/// `sum_{i >= k} f^(i)(x0) (x - x0)^(i-k) / i!` instead, provided no kink lies
/// between `x0` and `x` and the series has converged within a fixed number of
/// terms.
#[derive(Debug, Clone)]
pub struct RatioEvaluator<'a> {
    f: &'a FunctionDescriptor,
    k: usize,
    lower: TaylorPoly,
    tail: Option<Vec<f64>>,
    switch_radius: f64,
    kinks: Vec<f64>,
}

impl<'a> RatioEvaluator<'a> {
    pub fn new(f: &'a FunctionDescriptor, k: usize, x0: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("ratio needs k >= 1".into()));
        }
        let lower = taylor_coefficients(f, k as i64 - 1, x0)?;
        let tail = (k..k + TAIL_TERMS)
            .map(|i| coefficient(f, i, x0).ok())
            .collect::<Option<Vec<_>>>();
        let switch_radius = (1.0 + x0.abs()) * QUOTIENT_FLOOR.powf(1.0 / k as f64);
        Ok(RatioEvaluator {
            f,
            k,
            lower,
            tail,
            switch_radius,
            kinks: f.kinks(),
        })
    }

    pub fn x0(&self) -> f64 {
        self.lower.x0
    }

    pub fn lower(&self) -> &TaylorPoly {
        &self.lower
    }

    /// `f^(k)(x0) / k!`, when that derivative exists and is finite.
    pub fn limit(&self) -> Option<f64> {
        match &self.tail {
            Some(t) => Some(t[0]),
            None => coefficient(self.f, self.k, self.x0()).ok(),
        }
    }

    /// Limit of the ratio as `x` approaches `x0` from the side `dir`
    /// (`+1.0` from above, `-1.0` from below). Differs from [`Self::limit`]
    /// only when `x0` is a kink.
    pub fn one_sided_limit(&self, dir: f64) -> Option<f64> {
        if let Some(l) = self.limit() {
            return Some(l);
        }
        let mut x = self.x0();
        for _ in 0..4 {
            x = if dir > 0.0 {
                x.next_up()
            } else {
                x.next_down()
            };
            if let Ok(d) = self.f.nth_derivative(self.k, x) {
                return Some(d / factorial(self.k));
            }
        }
        None
    }

    fn series(&self, h: f64) -> Option<f64> {
        let tail = self.tail.as_ref()?;
        let x0 = self.x0();
        let x = x0 + h;
        if self
            .kinks
            .iter()
            .any(|&p| (p >= x0.min(x)) && (p <= x0.max(x)))
        {
            return None;
        }
        let mut sum = 0.0;
        let mut pow = 1.0;
        for (i, &c) in tail.iter().enumerate() {
            let term = c * pow;
            sum += term;
            if i >= 2 && term.abs() <= 1e-17 * sum.abs() {
                return Some(sum);
            }
            pow *= h;
            if pow == 0.0 {
                return Some(sum);
            }
        }
        // not converged: the point may be outside the disc of convergence
        None
    }

    /// Ratio at `x`; the limit at `x0`, NaN where undefined.
    pub fn eval(&self, x: f64) -> f64 {
        let h = x - self.x0();
        if h == 0.0 {
            return self.limit().unwrap_or(f64::NAN);
        }
        if h.abs() < self.switch_radius {
            if let Some(v) = self.series(h) {
                return v;
            }
        }
        (self.f.eval(x) - self.lower.eval(x)) / h.powi(self.k as i32)
    }
}
