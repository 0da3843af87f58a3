//! Closed-form derivatives of the logistic sigmoid and the standard normal
//! distribution, with matching interval extensions.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::interval::Interval;

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(x))` without overflow.
pub(crate) fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Polynomials `Q_n` with `sigmoid^(n)(x) = s (1 - s) Q_n(s)`, `s = sigmoid(x)`,
/// for `n >= 1`. Coefficients are in increasing powers of `s`.
fn sigmoid_factor_poly(n: usize) -> Vec<f64> {
    debug_assert!(n >= 1);
    let mut q = vec![1.0];
    for _ in 1..n {
        // Q_{n+1} = (1 - 2s) Q_n + s (1 - s) Q_n'
        let mut next = vec![0.0; q.len() + 1];
        for (i, &c) in q.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= 2.0 * c;
            if i > 0 {
                let d = c * i as f64;
                next[i] += d;
                next[i + 1] -= d;
            }
        }
        q = next;
    }
    q
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// `n`th derivative of the logistic sigmoid.
pub(crate) fn sigmoid_derivative(n: usize, x: f64) -> f64 {
    let s = sigmoid(x);
    if n == 0 {
        return s;
    }
    // s (1 - s) computed as sigmoid(x) sigmoid(-x) to avoid cancellation
    let bump = s * sigmoid(-x);
    bump * horner(&sigmoid_factor_poly(n), s)
}

/// Interval extension of `sigmoid^(n)` over `x`.
pub(crate) fn sigmoid_derivative_range(n: usize, x: &Interval) -> Interval {
    let s = Interval::hull_of(sigmoid(x.lo()), sigmoid(x.hi()));
    if n == 0 {
        return s;
    }
    // s (1 - s) is concave in s with its peak 1/4 at s = 1/2
    let b_lo = sigmoid(x.lo()) * sigmoid(-x.lo());
    let b_hi = sigmoid(x.hi()) * sigmoid(-x.hi());
    let mut bump = Interval::hull_of(b_lo, b_hi);
    if x.contains(0.0) {
        bump = bump.hull(&Interval::point(0.25));
    }
    bump.mul(&Interval::eval_poly(&sigmoid_factor_poly(n), &s))
}

pub(crate) fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

pub(crate) fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Coefficients of the probabilists' Hermite polynomial `He_n`.
fn hermite_poly(n: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if n == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0];
    for m in 1..n {
        // He_{m+1} = x He_m - m He_{m-1}
        let mut next = vec![0.0; m + 2];
        for (i, &c) in cur.iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, &c) in prev.iter().enumerate() {
            next[i] -= m as f64 * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

fn alternating_sign(m: usize) -> f64 {
    if m.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `n`th derivative of the standard normal CDF.
pub(crate) fn normal_cdf_derivative(n: usize, x: f64) -> f64 {
    if n == 0 {
        return normal_cdf(x);
    }
    // Phi^(n) = phi^(n-1) = (-1)^(n-1) He_{n-1}(x) phi(x)
    alternating_sign(n - 1) * horner(&hermite_poly(n - 1), x) * normal_pdf(x)
}

pub(crate) fn normal_cdf_derivative_range(n: usize, x: &Interval) -> Interval {
    if n == 0 {
        return Interval::hull_of(normal_cdf(x.lo()), normal_cdf(x.hi()));
    }
    let near = if x.contains(0.0) {
        0.0
    } else {
        x.lo().abs().min(x.hi().abs())
    };
    let far = x.lo().abs().max(x.hi().abs());
    let pdf = Interval::hull_of(normal_pdf(far), normal_pdf(near));
    let herm = Interval::eval_poly(&hermite_poly(n - 1), x)
        .scale(alternating_sign(n - 1))
        .expect("finite sign");
    herm.mul(&pdf)
}
