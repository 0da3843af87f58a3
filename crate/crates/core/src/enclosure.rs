//! Taylor polynomial enclosures.
//!
//! An enclosure of degree `k` at `x0` over `[a, b]` is
//! `T_{k-1}(x) + I (x - x0)^k` with an interval coefficient `I`. For odd `k`
//! the interval-scalar product swaps endpoints left of `x0`, so the lower
//! bound is built from `I.hi` there and from `I.lo` to the right.

use serde::{Deserialize, Serialize};

use crate::catalog::{
    derivative_range, FunctionDescriptor, MonotoneEvidence, Monotonicity, RangeSource,
};
use crate::error::{Error, Result};
use crate::interval::{json_float, Interval};
use crate::taylor::{factorial, RatioEvaluator, TaylorPoly};

/// Multiplier on `(k + 2) * EPSILON * magnitude` used to widen evaluated
/// bounds for round-off in the Taylor sum and in the coefficient itself.
const ROUNDOFF_FACTOR: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodTag {
    /// Endpoint ratios of a monotone `f^(k)`.
    SharpMonotone,
    /// Closed form for even-symmetric Hessians at `k = 2`.
    SharpEvenSymmetric,
    /// Lagrange range from the local extrema of `f^(k)`.
    LocalExtrema,
    /// Lagrange range from interval evaluation of `f^(k)`.
    IntervalDerivative,
    /// Lagrange range that is unbounded.
    LagrangeBaseline,
}

impl MethodTag {
    pub fn is_sharp(self) -> bool {
        matches!(
            self,
            MethodTag::SharpMonotone | MethodTag::SharpEvenSymmetric
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MethodTag::SharpMonotone => "sharp-monotone",
            MethodTag::SharpEvenSymmetric => "sharp-even-symmetric",
            MethodTag::LocalExtrema => "local-extrema",
            MethodTag::IntervalDerivative => "interval-derivative",
            MethodTag::LagrangeBaseline => "lagrange-baseline",
        }
    }
}

impl std::fmt::Display for MethodTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorEnclosure {
    pub x0: f64,
    pub k: usize,
    /// `T_{k-1}` at `x0`.
    pub lower_coeffs: TaylorPoly,
    pub interval_coeff: Interval,
    pub trust_region: Interval,
    pub method: MethodTag,
}

impl TaylorEnclosure {
    /// `T_{k-1}(x) + I (x - x0)^k` without round-off widening.
    pub fn nominal(&self, x: f64) -> Result<Interval> {
        self.check(x)?;
        let h = x - self.x0;
        if h == 0.0 {
            return Ok(Interval::point(self.lower_coeffs.coeffs[0]));
        }
        let t = self.lower_coeffs.eval(x);
        Ok(self
            .interval_coeff
            .scale(h.powi(self.k as i32))?
            .add_scalar(t))
    }

    fn check(&self, x: f64) -> Result<()> {
        if !self.trust_region.contains(x) {
            return Err(Error::OutOfRegion {
                x,
                lo: self.trust_region.lo(),
                hi: self.trust_region.hi(),
            });
        }
        Ok(())
    }
}

/// Bounds on `f(x)` from an enclosure, widened by a forward bound on the
/// round-off of the evaluation. Exact point at `x = x0`.
pub fn eval_enclosure(e: &TaylorEnclosure, x: f64) -> Result<Interval> {
    let nominal = e.nominal(x)?;
    let h = x - e.x0;
    if h == 0.0 {
        return Ok(nominal);
    }
    let coeff_mag = [e.interval_coeff.lo(), e.interval_coeff.hi()]
        .into_iter()
        .filter(|v| v.is_finite())
        .fold(0.0, |m: f64, v| m.max(v.abs()));
    let mag = e.lower_coeffs.abs_sum(h) + coeff_mag * h.abs().powi(e.k as i32);
    let delta = ROUNDOFF_FACTOR * (e.k as f64 + 2.0) * f64::EPSILON * mag;
    Ok(if delta.is_finite() {
        nominal.inflate_abs(delta)
    } else {
        nominal
    })
}

/// Evaluate a split enclosure at `x` using the piece whose region holds it.
pub fn eval_split(pieces: &[TaylorEnclosure], x: f64) -> Result<Interval> {
    let piece = pieces
        .iter()
        .find(|p| p.trust_region.contains(x))
        .ok_or_else(|| {
            let lo = pieces
                .iter()
                .map(|p| p.trust_region.lo())
                .fold(f64::INFINITY, f64::min);
            let hi = pieces
                .iter()
                .map(|p| p.trust_region.hi())
                .fold(f64::NEG_INFINITY, f64::max);
            Error::OutOfRegion { x, lo, hi }
        })?;
    eval_enclosure(piece, x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnclosureReport {
    pub function: String,
    pub enclosure: TaylorEnclosure,
    pub baseline_interval: Interval,
    /// Baseline width over enclosure width; `inf` for unbounded baselines.
    pub width_ratio: f64,
    pub diagnostics: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct ReportJson {
    function: String,
    k: usize,
    x0: f64,
    region: Interval,
    method: MethodTag,
    interval: Interval,
    baseline: Interval,
    #[serde(with = "json_float")]
    width_ratio: f64,
    taylor_coeffs: Vec<f64>,
    diagnostics: Vec<String>,
}

impl EnclosureReport {
    pub fn to_json(&self) -> String {
        let e = &self.enclosure;
        let doc = ReportJson {
            function: self.function.clone(),
            k: e.k,
            x0: e.x0,
            region: e.trust_region,
            method: e.method,
            interval: e.interval_coeff,
            baseline: self.baseline_interval,
            width_ratio: self.width_ratio,
            taylor_coeffs: e.lower_coeffs.coeffs.clone(),
            diagnostics: self.diagnostics.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ReportJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.taylor_coeffs.len() != doc.k {
            return Err(Error::Parse(format!(
                "expected {} Taylor coefficients, found {}",
                doc.k,
                doc.taylor_coeffs.len()
            )));
        }
        Ok(EnclosureReport {
            function: doc.function,
            enclosure: TaylorEnclosure {
                x0: doc.x0,
                k: doc.k,
                lower_coeffs: TaylorPoly {
                    x0: doc.x0,
                    coeffs: doc.taylor_coeffs,
                },
                interval_coeff: doc.interval,
                trust_region: doc.region,
                method: doc.method,
            },
            baseline_interval: doc.baseline,
            width_ratio: doc.width_ratio,
            diagnostics: doc.diagnostics,
        })
    }
}

fn validate(f: &FunctionDescriptor, k: usize, x0: f64, region: &Interval) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("degree k must be at least 1".into()));
    }
    if !x0.is_finite() {
        return Err(Error::InvalidArgument(format!("x0 = {x0} is not finite")));
    }
    if region.is_degenerate() {
        return Err(Error::InvalidArgument(format!(
            "trust region {region} is degenerate"
        )));
    }
    if !region.contains(x0) {
        return Err(Error::InvalidArgument(format!(
            "x0 = {x0} is outside the trust region {region}"
        )));
    }
    f.check_region(region)
}

/// Ratio at an endpoint of the region; the one-sided limit when it is `x0`.
fn endpoint_ratio(ev: &RatioEvaluator, x: f64, inward: f64) -> Result<f64> {
    let v = if x == ev.x0() {
        ev.one_sided_limit(inward).unwrap_or(f64::NAN)
    } else {
        ev.eval(x)
    };
    if v.is_nan() {
        return Err(Error::Domain {
            function: String::new(),
            message: format!("remainder ratio undefined at {x}"),
        });
    }
    Ok(v)
}

fn monotone_interval(
    ev: &RatioEvaluator,
    mono: Monotonicity,
    region: &Interval,
) -> Result<Interval> {
    let ra = endpoint_ratio(ev, region.lo(), 1.0)?;
    let rb = endpoint_ratio(ev, region.hi(), -1.0)?;
    let (lo, hi) = match mono {
        Monotonicity::Increasing => (ra, rb),
        Monotonicity::Decreasing => (rb, ra),
        Monotonicity::Unknown => {
            return Err(Error::Precondition(
                "monotonicity of f^(k) is unknown".into(),
            ))
        }
    };
    // a nearly constant ratio can come out reversed by round-off
    Ok(Interval::new(lo, hi).unwrap_or_else(|_| Interval::hull_of(lo, hi)))
}

/// Sharp interval for a monotone `f^(k)`: the ratios at the two endpoints.
pub fn sharp_monotone(
    f: &FunctionDescriptor,
    k: usize,
    x0: f64,
    region: &Interval,
) -> Result<Interval> {
    validate(f, k, x0, region)?;
    let mono = f.monotone_kth(k, region);
    if mono == Monotonicity::Unknown {
        return Err(Error::Precondition(format!(
            "derivative of order {k} of {f} is not known to be monotone on {region}"
        )));
    }
    let ev = RatioEvaluator::new(f, k, x0)?;
    monotone_interval(&ev, mono, region).map_err(|e| name_function(e, f))
}

fn name_function(e: Error, f: &FunctionDescriptor) -> Error {
    match e {
        Error::Domain { function, message } if function.is_empty() => Error::Domain {
            function: f.name(),
            message,
        },
        other => other,
    }
}

struct EvenSymmetric {
    interval: Interval,
    lower_at: f64,
    upper_at: f64,
}

fn even_symmetric(
    f: &FunctionDescriptor,
    ev: &RatioEvaluator,
    region: &Interval,
) -> Result<EvenSymmetric> {
    let cert = f.even_symmetric_hessian().ok_or_else(|| {
        Error::Precondition(format!("{f} has no even-symmetric Hessian certificate"))
    })?;
    let alpha = cert.alpha;
    if !(region.lo() >= -alpha && region.hi() <= alpha) {
        return Err(Error::Precondition(format!(
            "trust region {region} is not inside [-{alpha}, {alpha}]"
        )));
    }
    let (a, b) = (region.lo(), region.hi());
    let x0 = ev.x0();
    if !region.contains_interior(x0) {
        return Err(Error::Precondition(format!(
            "x0 = {x0} must lie strictly inside {region}"
        )));
    }
    let c = b.min((-x0).max(a));
    let ratio = |x: f64| endpoint_ratio(ev, x, 1.0);
    let (ra, rb, rc) = (ratio(a)?, ratio(b)?, ratio(c)?);
    let (lo, lower_at) = if ra <= rb { (ra, a) } else { (rb, b) };
    Ok(EvenSymmetric {
        interval: Interval::new(lo, rc).unwrap_or_else(|_| Interval::hull_of(lo, rc)),
        lower_at,
        upper_at: c,
    })
}

/// Sharp quadratic interval `[min(r(a), r(b)), r(c)]`, `c = min(b, max(-x0, a))`,
/// for functions with an even-symmetric Hessian nonincreasing in `|x|`.
pub fn sharp_even_symmetric_quadratic(
    f: &FunctionDescriptor,
    x0: f64,
    region: &Interval,
) -> Result<Interval> {
    validate(f, 2, x0, region)?;
    let ev = RatioEvaluator::new(f, 2, x0)?;
    even_symmetric(f, &ev, region)
        .map(|r| r.interval)
        .map_err(|e| name_function(e, f))
}

/// Lagrange-remainder interval: the range of `f^(k)` over the region over `k!`.
pub fn lagrange_baseline(f: &FunctionDescriptor, k: usize, region: &Interval) -> Result<Interval> {
    if k == 0 {
        return Err(Error::InvalidArgument("degree k must be at least 1".into()));
    }
    f.check_region(region)?;
    derivative_range(f, k, region)
        .interval
        .scale(1.0 / factorial(k))
}

fn evidence_name(e: Option<MonotoneEvidence>) -> &'static str {
    match e {
        Some(MonotoneEvidence::Certificate) => "structure certificate",
        Some(MonotoneEvidence::LocalExtrema) => "no interior extrema",
        Some(MonotoneEvidence::IntervalDerivative) => "interval evaluation of the next derivative",
        None => "unknown",
    }
}

/// Best available enclosure of `f` of degree `k` at `x0` over `region`.
///
/// Tries, in order, the monotone-derivative closed form, the even-symmetric
/// closed form (`k = 2`), and the Lagrange range of `f^(k)`. The reported
/// interval is always contained in the reported baseline.
pub fn enclose(
    f: &FunctionDescriptor,
    k: usize,
    x0: f64,
    region: &Interval,
) -> Result<EnclosureReport> {
    validate(f, k, x0, region)?;
    let ev = RatioEvaluator::new(f, k, x0)?;
    let range = derivative_range(f, k, region);
    let baseline = range.interval.scale(1.0 / factorial(k))?;
    let mut diagnostics = range.diagnostics.clone();

    let mut sharp = None;
    let (mono, evidence) = f.monotone_evidence(k, region);
    if mono != Monotonicity::Unknown {
        match monotone_interval(&ev, mono, region) {
            Ok(iv) => {
                let dir = if mono == Monotonicity::Increasing {
                    "increasing"
                } else {
                    "decreasing"
                };
                diagnostics.push(format!(
                    "f^({k}) {dir} on {region} by {}",
                    evidence_name(evidence)
                ));
                sharp = Some((iv, MethodTag::SharpMonotone));
            }
            Err(e) => diagnostics.push(format!("monotone closed form failed: {e}")),
        }
    }
    if sharp.is_none() && k == 2 && f.even_symmetric_hessian().is_some() {
        match even_symmetric(f, &ev, region) {
            Ok(r) => {
                diagnostics.push(format!(
                    "even-symmetric Hessian: lower endpoint attained at {}, upper at {}",
                    r.lower_at, r.upper_at
                ));
                sharp = Some((r.interval, MethodTag::SharpEvenSymmetric));
            }
            Err(e) => diagnostics.push(format!("even-symmetric closed form not applicable: {e}")),
        }
    }

    let (interval, method) = match sharp {
        Some((iv, tag)) => (iv.intersect(&baseline).unwrap_or(baseline), tag),
        None => {
            let tag = if !baseline.is_finite() {
                MethodTag::LagrangeBaseline
            } else if range.source == RangeSource::LocalExtrema {
                MethodTag::LocalExtrema
            } else {
                MethodTag::IntervalDerivative
            };
            (baseline, tag)
        }
    };
    if !interval.is_finite() {
        diagnostics.push("enclosure interval is unbounded".into());
    }

    let bw = baseline.width();
    let sw = interval.width();
    let width_ratio = if bw.is_infinite() {
        diagnostics.push("baseline is unbounded; width ratio reported as inf".into());
        f64::INFINITY
    } else if sw == 0.0 {
        if bw == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        bw / sw
    };

    Ok(EnclosureReport {
        function: f.name(),
        enclosure: TaylorEnclosure {
            x0,
            k,
            lower_coeffs: ev.lower().clone(),
            interval_coeff: interval,
            trust_region: *region,
            method,
        },
        baseline_interval: baseline,
        width_ratio,
        diagnostics,
    })
}

/// Separate enclosures on `[a, x0]` and `[x0, b]` for odd `k`; a single
/// enclosure when `x0` is an endpoint.
pub fn enclose_split(
    f: &FunctionDescriptor,
    k: usize,
    x0: f64,
    region: &Interval,
) -> Result<Vec<TaylorEnclosure>> {
    if k.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "split enclosures need odd k, got {k}"
        )));
    }
    validate(f, k, x0, region)?;
    if x0 == region.lo() || x0 == region.hi() {
        return Ok(vec![enclose(f, k, x0, region)?.enclosure]);
    }
    let left = Interval::new(region.lo(), x0)?;
    let right = Interval::new(x0, region.hi())?;
    Ok(vec![
        enclose(f, k, x0, &left)?.enclosure,
        enclose(f, k, x0, &right)?.enclosure,
    ])
}
