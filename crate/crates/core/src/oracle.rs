//! Brute-force checks: grid estimates of the sharp interval, validity audits
//! of enclosures, and the width-ratio experiment as the region shrinks.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{FunctionDescriptor, Monotonicity};
use crate::enclosure::{eval_enclosure, lagrange_baseline, sharp_monotone, TaylorEnclosure};
use crate::error::{Error, Result};
use crate::interval::{json_float, Interval, VALIDITY_ULPS};
use crate::taylor::RatioEvaluator;

/// Default grid size for oracle intervals.
pub const ORACLE_GRID: usize = 1_000_000;
/// Default grid size for validity audits.
pub const AUDIT_GRID: usize = 100_000;
/// Default shrinking-region ladder.
pub const DEFAULT_EPSILONS: [f64; 7] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4];

const MIN_GRID: usize = 100;
const ELL_ZERO_TOL: f64 = 1e-12;
const MAX_ELL: usize = 24;

fn check_grid(n: usize) -> Result<()> {
    if n < MIN_GRID {
        return Err(Error::InvalidArgument(format!(
            "grid needs at least {MIN_GRID} points, got {n}"
        )));
    }
    Ok(())
}

/// `i`th of `n` uniform points on the region, hitting both endpoints exactly.
fn grid_point(region: &Interval, i: usize, n: usize) -> f64 {
    if i + 1 == n {
        return region.hi();
    }
    region.lo() + region.width() * (i as f64 / (n - 1) as f64)
}

/// `[min, max]` of the remainder ratio over `n` uniform points of `region`
/// together with `x0` (which contributes the limit value). NaN values, at
/// points where the ratio is undefined, are skipped.
pub fn grid_sharp_interval(
    f: &FunctionDescriptor,
    k: usize,
    x0: f64,
    region: &Interval,
    n: usize,
) -> Result<Interval> {
    check_grid(n)?;
    f.check_region(region)?;
    let ev = RatioEvaluator::new(f, k, x0)?;
    let fold = |(lo, hi): (f64, f64), v: f64| {
        if v.is_nan() {
            (lo, hi)
        } else {
            (lo.min(v), hi.max(v))
        }
    };
    let empty = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut lo, mut hi) = (0..n)
        .into_par_iter()
        .map(|i| ev.eval(grid_point(region, i, n)))
        .fold(|| empty, fold)
        .reduce(|| empty, |a, b| (a.0.min(b.0), a.1.max(b.1)));
    if region.contains(x0) {
        let at_x0 = if x0 == region.lo() {
            ev.one_sided_limit(1.0)
        } else if x0 == region.hi() {
            ev.one_sided_limit(-1.0)
        } else {
            ev.limit()
        };
        if let Some(v) = at_x0 {
            (lo, hi) = fold((lo, hi), v);
        }
    }
    Interval::new(lo, hi).map_err(|_| Error::Domain {
        function: f.name(),
        message: format!("remainder ratio undefined on every grid point of {region}"),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub x: f64,
    pub fx: f64,
    pub bound: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    pub points_checked: usize,
    pub violations: Vec<Violation>,
    /// Largest distance from `f(x)` to its bound, 0 when valid.
    pub max_violation_magnitude: f64,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Check `f(x)` against the enclosure's bounds (inflated by
/// [`VALIDITY_ULPS`]) at `n` uniform points of its trust region.
pub fn verify_enclosure(
    f: &FunctionDescriptor,
    e: &TaylorEnclosure,
    n: usize,
) -> Result<ValidityReport> {
    check_grid(n)?;
    let region = e.trust_region;
    let mut violations: Vec<Violation> = (0..n)
        .into_par_iter()
        .filter_map(|i| {
            let x = grid_point(&region, i, n);
            let fx = f.eval(x);
            // the reference value and the constant coefficient both carry evaluation error
            let bound = eval_enclosure(e, x)
                .ok()?
                .inflate_ulps(VALIDITY_ULPS)
                .inflate_abs(f.eval_error(x) + f.eval_error(e.x0));
            (!bound.contains(fx)).then_some(Violation { x, fx, bound })
        })
        .collect();
    violations.sort_by(|a, b| a.x.total_cmp(&b.x));
    let max_violation_magnitude = violations
        .iter()
        .map(|v| {
            if v.fx.is_nan() {
                f64::INFINITY
            } else {
                (v.bound.lo() - v.fx).max(v.fx - v.bound.hi())
            }
        })
        .fold(0.0, f64::max);
    Ok(ValidityReport {
        points_checked: n,
        violations,
        max_violation_magnitude,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioSeries {
    pub k: usize,
    pub x0: f64,
    /// Order of the first nonvanishing derivative past `k`, minus `k`.
    pub ell: usize,
    /// Descending.
    #[serde(serialize_with = "serialize_floats")]
    pub epsilons: Vec<f64>,
    #[serde(serialize_with = "serialize_floats")]
    pub baseline_widths: Vec<f64>,
    #[serde(serialize_with = "serialize_floats")]
    pub sharp_widths: Vec<f64>,
    #[serde(serialize_with = "serialize_floats")]
    pub ratios: Vec<f64>,
    /// `binom(k + ell, ell)`.
    pub predicted_limit: f64,
    /// Least-squares slope of `log(width)` against `log(eps)` over the
    /// smallest two decades of the ladder.
    #[serde(with = "json_float")]
    pub sharp_slope: f64,
    #[serde(with = "json_float")]
    pub baseline_slope: f64,
}

fn serialize_floats<S: serde::Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&FloatJson(*x))?;
    }
    seq.end()
}

struct FloatJson(f64);

impl Serialize for FloatJson {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        json_float::serialize(&self.0, s)
    }
}

impl RatioSeries {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("series serializes")
    }

    /// Columns `epsilon,baseline_width,sharp_width,ratio,predicted_limit`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = crate::plot::csv_writer(out);
        w.write_record([
            "epsilon",
            "baseline_width",
            "sharp_width",
            "ratio",
            "predicted_limit",
        ])?;
        for i in 0..self.epsilons.len() {
            w.write_record([
                crate::plot::fmt_float(self.epsilons[i]),
                crate::plot::fmt_float(self.baseline_widths[i]),
                crate::plot::fmt_float(self.sharp_widths[i]),
                crate::plot::fmt_float(self.ratios[i]),
                crate::plot::fmt_float(self.predicted_limit),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn binomial(n: usize, r: usize) -> f64 {
    (1..=r).fold(1.0, |acc, i| acc * (n + 1 - i) as f64 / i as f64)
}

fn loglog_slope(eps: &[f64], widths: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = eps
        .iter()
        .zip(widths)
        .filter(|(e, w)| **e > 0.0 && **w > 0.0 && w.is_finite())
        .map(|(e, w)| (e.ln(), w.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Baseline and sharp widths on `[x0, x0 + eps]` for each `eps`, their
/// ratios, and the limit `binom(k + ell, ell)` the ratios should approach.
pub fn width_ratio_series(
    f: &FunctionDescriptor,
    k: usize,
    x0: f64,
    epsilons: &[f64],
) -> Result<RatioSeries> {
    if k == 0 {
        return Err(Error::InvalidArgument("degree k must be at least 1".into()));
    }
    if epsilons.is_empty() || epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::InvalidArgument(
            "epsilons must be positive and finite".into(),
        ));
    }
    let ell = (1..=MAX_ELL)
        .find(|&j| {
            f.nth_derivative(k + j, x0)
                .map(|d| d.abs() > ELL_ZERO_TOL)
                .unwrap_or(false)
        })
        .ok_or_else(|| {
            Error::InvalidArgument(format!(
                "all derivatives of {f} of orders {}..={} vanish at {x0}; cannot determine ell",
                k + 1,
                k + MAX_ELL
            ))
        })?;

    let mut epsilons = epsilons.to_vec();
    epsilons.sort_by(|a, b| b.total_cmp(a));
    epsilons.dedup();

    let mut baseline_widths = Vec::with_capacity(epsilons.len());
    let mut sharp_widths = Vec::with_capacity(epsilons.len());
    for &eps in &epsilons {
        let region = Interval::new(x0, x0 + eps)?;
        baseline_widths.push(lagrange_baseline(f, k, &region)?.width());
        let sharp = if f.monotone_kth(k, &region) != Monotonicity::Unknown {
            sharp_monotone(f, k, x0, &region)?
        } else {
            grid_sharp_interval(f, k, x0, &region, 100_000)?
        };
        sharp_widths.push(sharp.width());
    }
    let ratios = baseline_widths
        .iter()
        .zip(&sharp_widths)
        .map(|(b, s)| b / s)
        .collect();

    let eps_min = *epsilons.last().unwrap();
    let tail: Vec<usize> = (0..epsilons.len())
        .filter(|&i| epsilons[i] <= 100.0 * eps_min * (1.0 + 1e-12))
        .collect();
    let pick = |v: &[f64]| tail.iter().map(|&i| v[i]).collect::<Vec<_>>();
    let tail_eps = pick(&epsilons);
    let sharp_slope = loglog_slope(&tail_eps, &pick(&sharp_widths));
    let baseline_slope = loglog_slope(&tail_eps, &pick(&baseline_widths));

    Ok(RatioSeries {
        k,
        x0,
        ell,
        epsilons,
        baseline_widths,
        sharp_widths,
        ratios,
        predicted_limit: binomial(k + ell, ell),
        sharp_slope,
        baseline_slope,
    })
}
