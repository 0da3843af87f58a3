//! One-dimensional majorization-minimization with quadratic Taylor
//! majorizers over a fixed-radius trust region.
//!
//! At `x_t` the upper bound `u(x) = f(x_t) + f'(x_t)(x - x_t) + z (x - x_t)^2`,
//! with `z` the upper endpoint of a degree-2 enclosure on
//! `[x_t - radius, x_t + radius]`, majorizes `f` there and touches it at `x_t`.
//! Minimizing `u` over the region can only decrease `f`.

use std::io::Write;

use serde::Serialize;

use crate::catalog::FunctionDescriptor;
use crate::enclosure::{enclose, lagrange_baseline};
use crate::error::{Error, Result};
use crate::interval::{json_float, Interval};
use crate::plot::{csv_writer, fmt_float};

/// Which interval coefficient supplies the curvature `z` of the majorizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Majorizer {
    /// The dispatcher's enclosure (sharp where available).
    #[default]
    Sharp,
    /// The Lagrange-remainder interval.
    Baseline,
}

/// One MM step: the majorizer built at `x` and the point it leads to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MMStep {
    pub x_next: f64,
    pub region: Interval,
    pub z_upper: f64,
    pub slope: f64,
}

impl MMStep {
    /// `u(x) - f(x_t)` for this step's majorizer centred at `x_t`.
    pub fn majorizer_offset(&self, x_t: f64, x: f64) -> f64 {
        let h = x - x_t;
        self.slope * h + self.z_upper * h * h
    }
}

fn step_region(f: &FunctionDescriptor, x_t: f64, radius: f64) -> Result<Interval> {
    let region = Interval::new(x_t - radius, x_t + radius)?;
    let clipped = region
        .intersect(&f.domain())
        .ok_or_else(|| Error::InvalidArgument(format!("x = {x_t} is outside the domain of {f}")))?;
    if clipped.is_degenerate() {
        return Err(Error::InvalidArgument(format!(
            "trust region around {x_t} collapses on the domain of {f}"
        )));
    }
    Ok(clipped)
}

/// Build the majorizer at `x_t` and return its minimizer over the region.
pub fn mm_step_with(
    f: &FunctionDescriptor,
    x_t: f64,
    radius: f64,
    kind: Majorizer,
) -> Result<MMStep> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let region = step_region(f, x_t, radius)?;
    let report = enclose(f, 2, x_t, &region)?;
    let z = match kind {
        Majorizer::Sharp => report.enclosure.interval_coeff.hi(),
        Majorizer::Baseline => lagrange_baseline(f, 2, &region)?.hi(),
    };
    if z == f64::INFINITY {
        return Err(Error::VacuousMajorizer {
            lo: region.lo(),
            hi: region.hi(),
        });
    }
    let g = report.enclosure.lower_coeffs.coeffs[1];
    let u = |x: f64| {
        let h = x - x_t;
        g * h + z * h * h
    };
    let (a, b) = (region.lo(), region.hi());
    let mut x_next = if g == 0.0 && z >= 0.0 {
        x_t
    } else {
        let vertex = if z > 0.0 {
            Some(x_t - g / (2.0 * z))
        } else {
            None
        };
        match vertex {
            Some(v) if region.contains(v) => v,
            _ => {
                if u(a) <= u(b) {
                    a
                } else {
                    b
                }
            }
        }
    };
    // round-off may make the new point marginally worse; never accept that
    if f.eval(x_next) > f.eval(x_t) {
        x_next = x_t;
    }
    Ok(MMStep {
        x_next,
        region,
        z_upper: z,
        slope: g,
    })
}

/// Minimizer of the sharp quadratic majorizer over `[x_t - radius, x_t + radius]`.
pub fn mm_step(f: &FunctionDescriptor, x_t: f64, radius: f64) -> Result<f64> {
    Ok(mm_step_with(f, x_t, radius, Majorizer::Sharp)?.x_next)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MMRecord {
    pub iter: usize,
    pub x: f64,
    pub loss: f64,
    /// Region of the majorizer built at `x`; absent for the final iterate.
    pub region: Option<Interval>,
    #[serde(with = "json_float")]
    pub z_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MMTrace {
    pub records: Vec<MMRecord>,
    pub converged: bool,
    pub diagnostics: Vec<String>,
}

impl MMTrace {
    pub fn final_x(&self) -> f64 {
        self.records.last().map(|r| r.x).unwrap_or(f64::NAN)
    }

    pub fn losses(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.loss).collect()
    }

    /// Columns `iter,x,loss,z_upper`; `z_upper` is empty on the final row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        w.write_record(["iter", "x", "loss", "z_upper"])?;
        for r in &self.records {
            let z = if r.region.is_some() {
                fmt_float(r.z_upper)
            } else {
                String::new()
            };
            w.write_record([r.iter.to_string(), fmt_float(r.x), fmt_float(r.loss), z])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Repeat [`mm_step`] until the iterate moves less than `tol` or `max_iters`
/// steps have been taken. A vacuous majorizer is retried once at half the
/// radius; a second failure ends the run with a diagnostic.
pub fn mm_minimize(
    f: &FunctionDescriptor,
    x_init: f64,
    radius: f64,
    max_iters: usize,
    tol: f64,
) -> Result<MMTrace> {
    mm_minimize_with(f, x_init, radius, max_iters, tol, Majorizer::Sharp)
}

pub fn mm_minimize_with(
    f: &FunctionDescriptor,
    x_init: f64,
    radius: f64,
    max_iters: usize,
    tol: f64,
    kind: Majorizer,
) -> Result<MMTrace> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be nonnegative, got {tol}"
        )));
    }
    f.check_point(x_init)?;
    let mut records = Vec::new();
    let mut diagnostics = Vec::new();
    let mut converged = false;
    let mut x = x_init;
    for iter in 0..max_iters {
        let step = match mm_step_with(f, x, radius, kind) {
            Err(Error::VacuousMajorizer { .. }) => {
                diagnostics.push(format!("vacuous majorizer at x = {x}; halving the radius"));
                match mm_step_with(f, x, radius / 2.0, kind) {
                    Err(Error::VacuousMajorizer { lo, hi }) => {
                        diagnostics.push(format!(
                            "vacuous majorizer on [{lo}, {hi}] at the smallest radius; stopping"
                        ));
                        break;
                    }
                    other => other?,
                }
            }
            other => other?,
        };
        records.push(MMRecord {
            iter,
            x,
            loss: f.eval(x),
            region: Some(step.region),
            z_upper: step.z_upper,
        });
        let moved = (step.x_next - x).abs();
        x = step.x_next;
        if moved < tol {
            converged = true;
            break;
        }
    }
    records.push(MMRecord {
        iter: records.len(),
        x,
        loss: f.eval(x),
        region: None,
        z_upper: f64::NAN,
    });
    Ok(MMTrace {
        records,
        converged,
        diagnostics,
    })
}
