//! Taylor polynomial enclosures for one-dimensional functions.
//!
//! Given `f`, a degree `k`, an expansion point `x0` and a trust region
//! `[a, b]`, an enclosure is the pair of polynomials
//! `T_{k-1}(x) + [lo, hi] (x - x0)^k` bracketing `f` on `[a, b]`. The
//! tightest such interval is `[inf r, sup r]` for the remainder ratio
//! `r(x) = R_{k-1}(x) / (x - x0)^k`; [`enclose`] computes it in closed form
//! when `f^(k)` is monotone or (for `k = 2`) when `f''` is even-symmetric,
//! and falls back to the Lagrange-remainder range of `f^(k)` otherwise.

pub mod catalog;
pub mod enclosure;
pub mod error;
pub mod interval;
pub mod mm;
pub mod oracle;
pub mod plot;
pub mod taylor;

pub use catalog::{
    catalog_lookup, combine_linear, derivative_range, parse_function, polynomial, DerivativeRange,
    EvenSymmetricHessian, FunctionDescriptor, MonotoneEvidence, Monotonicity, RangeSource, Term,
};
pub use enclosure::{
    enclose, enclose_split, eval_enclosure, eval_split, lagrange_baseline,
    sharp_even_symmetric_quadratic, sharp_monotone, EnclosureReport, MethodTag, TaylorEnclosure,
};
pub use error::{Error, Result};
pub use interval::{Interval, VALIDITY_ULPS};
pub use mm::{
    mm_minimize, mm_minimize_with, mm_step, mm_step_with, MMRecord, MMStep, MMTrace, Majorizer,
};
pub use oracle::{
    grid_sharp_interval, verify_enclosure, width_ratio_series, RatioSeries, ValidityReport,
    Violation,
};
pub use plot::{fmt_float, plot_rows, write_plot_csv, PlotRow};
pub use taylor::{remainder, remainder_ratio, taylor_coefficients, RatioEvaluator, TaylorPoly};
