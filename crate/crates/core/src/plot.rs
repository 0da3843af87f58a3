//! Plot data: the function and its enclosure bounds on a uniform grid.

use std::io::Write;

use serde::Serialize;

use crate::catalog::FunctionDescriptor;
use crate::enclosure::{eval_split, TaylorEnclosure};
use crate::error::{Error, Result};
use crate::interval::Interval;

/// Fixed 17-significant-digit float format used in every CSV output.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlotRow {
    pub x: f64,
    pub f: f64,
    pub lower: f64,
    pub upper: f64,
}

/// `n` rows spanning the pieces' combined trust region. The interior grid
/// point nearest the expansion point is moved onto it, so one row always
/// shows the exact contact at `x0` (for `n > 2`).
pub fn plot_rows(
    f: &FunctionDescriptor,
    pieces: &[TaylorEnclosure],
    n: usize,
) -> Result<Vec<PlotRow>> {
    if pieces.is_empty() {
        return Err(Error::InvalidArgument("no enclosure to plot".into()));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 plot points, got {n}"
        )));
    }
    let region = pieces
        .iter()
        .skip(1)
        .fold(pieces[0].trust_region, |acc, p| acc.hull(&p.trust_region));
    let x0 = pieces[0].x0;
    let mut xs: Vec<f64> = (0..n)
        .map(|i| {
            if i + 1 == n {
                region.hi()
            } else {
                region.lo() + region.width() * (i as f64 / (n - 1) as f64)
            }
        })
        .collect();
    // endpoints stay put
    if n > 2 && !xs.contains(&x0) {
        let nearest = (1..n - 1)
            .min_by(|&i, &j| (xs[i] - x0).abs().total_cmp(&(xs[j] - x0).abs()))
            .unwrap();
        xs[nearest] = x0;
    }
    xs.iter()
        .map(|&x| {
            let b: Interval = eval_split(pieces, x)?;
            Ok(PlotRow {
                x,
                f: f.eval(x),
                lower: b.lo(),
                upper: b.hi(),
            })
        })
        .collect()
}

/// Columns `x,f,lower,upper`.
pub fn write_plot_csv<W: Write>(rows: &[PlotRow], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["x", "f", "lower", "upper"])?;
    for r in rows {
        w.write_record([
            fmt_float(r.x),
            fmt_float(r.f),
            fmt_float(r.lower),
            fmt_float(r.upper),
        ])?;
    }
    w.flush()?;
    Ok(())
}
