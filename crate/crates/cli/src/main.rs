//! `tpe`: Taylor polynomial enclosures from the command line.
//!
//! ```text
//! tpe enclose  --f exp --k 2 --x0 0.5 --region 0,2
//! tpe compare  --f exp --k 2 --x0 0.5 --region 0,2
//! tpe verify   --f relu --k 2 --x0 0.5 --region -1,1 --n 100000
//! tpe ratio    --f exp --k 2 --x0 0.5 --epsilons 0.1,0.01,0.001
//! tpe mm       --f softplus --x0 3 --radius 1 --iters 50 --tol 1e-9
//! tpe plotdata --f "lincomb:[(1.5,exp,3,0)]+poly:[0,0,-25]" --k 2 --x0 0.5 --region 0,1 --n 200
//! ```
//!
//! Function specifications: a catalog name with optional parameters
//! (`exp`, `log`, `abs`, `sin`, `cos`, `softplus`, `relu`, `gelu`, `silu`,
//! `hard_silu`, `leaky_relu:<slope>`, `pow_c_x:<c>` for `c^x`, `pow:<c>` or
//! `pow_x_c:<c>` for `x^c`), or a linear combination
//! `lincomb:[(w,f,s,t),...]+poly:[c0,c1,...]` meaning
//! `sum w f(s x + t) + c0 + c1 x + ...`.
//!
//! Exit status: 0 on success, 1 on a domain or evaluation error (reported on
//! stderr as `error: <kind>: <message>`), 2 on a usage error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use tpe_core::oracle::{AUDIT_GRID, DEFAULT_EPSILONS};
use tpe_core::plot::write_plot_csv;
use tpe_core::{
    enclose, enclose_split, mm_minimize, parse_function, plot_rows, verify_enclosure,
    width_ratio_series, FunctionDescriptor, Interval,
};

#[derive(Parser)]
#[command(
    name = "tpe",
    version,
    about = "Sharp Taylor polynomial enclosures of 1-D functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the enclosure report as JSON.
    Enclose(EncloseArgs),
    /// Print sharp and baseline intervals side by side as JSON.
    Compare(EncloseArgs),
    /// Audit an enclosure on a uniform grid and print the report as JSON.
    Verify(VerifyArgs),
    /// Width ratios on shrinking regions [x0, x0 + eps] as CSV.
    Ratio(RatioArgs),
    /// Run majorization-minimization and print the trace as CSV.
    Mm(MmArgs),
    /// Function and bounds on a grid as CSV (x, f, lower, upper).
    Plotdata(PlotArgs),
}

#[derive(Args)]
struct Common {
    /// Function specification.
    #[arg(long = "f", value_parser = parse_spec)]
    f: FunctionDescriptor,
    /// Output file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EncloseArgs {
    #[command(flatten)]
    common: Common,
    /// Degree of the enclosure.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Expansion point.
    #[arg(long, value_parser = parse_finite, allow_hyphen_values = true)]
    x0: f64,
    /// Trust region as `lo,hi`.
    #[arg(long, value_parser = parse_region, allow_hyphen_values = true)]
    region: Interval,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    enclosure: EncloseArgs,
    /// Grid size.
    #[arg(long, default_value_t = AUDIT_GRID)]
    n: usize,
}

#[derive(Args)]
struct RatioArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, value_parser = parse_finite, allow_hyphen_values = true)]
    x0: f64,
    /// Comma-separated region widths.
    #[arg(long, value_delimiter = ',', value_parser = parse_finite)]
    epsilons: Vec<f64>,
}

#[derive(Args)]
struct MmArgs {
    #[command(flatten)]
    common: Common,
    /// Starting point.
    #[arg(long, value_parser = parse_finite, allow_hyphen_values = true)]
    x0: f64,
    /// Trust-region radius around each iterate.
    #[arg(long, default_value_t = 1.0, value_parser = parse_finite)]
    radius: f64,
    #[arg(long, default_value_t = 100)]
    iters: usize,
    #[arg(long, default_value_t = 1e-10, value_parser = parse_finite)]
    tol: f64,
}

#[derive(Args)]
struct PlotArgs {
    #[command(flatten)]
    enclosure: EncloseArgs,
    /// Number of rows.
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// For odd k, use separate enclosures left and right of x0.
    #[arg(long)]
    split: bool,
}

fn parse_spec(s: &str) -> Result<FunctionDescriptor, String> {
    parse_function(s).map_err(|e| e.to_string())
}

fn parse_finite(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("not a number: {s:?}"))?;
    if !v.is_finite() {
        return Err(format!("not finite: {s:?}"));
    }
    Ok(v)
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_finite).collect()
}

fn parse_region(s: &str) -> Result<Interval, String> {
    match parse_list(s)?.as_slice() {
        [lo, hi] => Interval::new(*lo, *hi).map_err(|e| e.to_string()),
        _ => Err(format!("region must be `lo,hi`, got {s:?}")),
    }
}

fn output(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Enclose(a) => {
            let report = enclose(&a.common.f, a.k, a.x0, &a.region)?;
            let mut out = output(&a.common.out)?;
            writeln!(out, "{}", report.to_json())?;
            out.flush()?;
        }
        Command::Compare(a) => {
            let report = enclose(&a.common.f, a.k, a.x0, &a.region)?;
            let doc = json!({
                "function": report.function,
                "k": a.k,
                "x0": a.x0,
                "region": a.region,
                "method": report.enclosure.method,
                "sharp": report.enclosure.interval_coeff,
                "baseline": report.baseline_interval,
                "width_ratio": json_number(report.width_ratio),
            });
            let mut out = output(&a.common.out)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
            out.flush()?;
        }
        Command::Verify(v) => {
            let a = v.enclosure;
            let report = enclose(&a.common.f, a.k, a.x0, &a.region)?;
            let audit = verify_enclosure(&a.common.f, &report.enclosure, v.n)?;
            let doc = json!({
                "function": report.function,
                "method": report.enclosure.method,
                "interval": report.enclosure.interval_coeff,
                "valid": audit.is_valid(),
                "report": audit,
            });
            let mut out = output(&a.common.out)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
            out.flush()?;
        }
        Command::Ratio(a) => {
            let eps = if a.epsilons.is_empty() {
                DEFAULT_EPSILONS.to_vec()
            } else {
                a.epsilons
            };
            let series = width_ratio_series(&a.common.f, a.k, a.x0, &eps)?;
            let mut out = output(&a.common.out)?;
            series.write_csv(&mut out)?;
            out.flush()?;
        }
        Command::Mm(a) => {
            let trace = mm_minimize(&a.common.f, a.x0, a.radius, a.iters, a.tol)?;
            for d in &trace.diagnostics {
                eprintln!("note: {d}");
            }
            let mut out = output(&a.common.out)?;
            trace.write_csv(&mut out)?;
            out.flush()?;
        }
        Command::Plotdata(p) => {
            let a = p.enclosure;
            let pieces = if p.split {
                enclose_split(&a.common.f, a.k, a.x0, &a.region)?
            } else {
                vec![enclose(&a.common.f, a.k, a.x0, &a.region)?.enclosure]
            };
            let rows = plot_rows(&a.common.f, &pieces, p.n)?;
            let mut out = output(&a.common.out)?;
            write_plot_csv(&rows, &mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn json_number(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else if x > 0.0 {
        json!("inf")
    } else if x < 0.0 {
        json!("-inf")
    } else {
        json!("nan")
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            match err.downcast_ref::<tpe_core::Error>() {
                Some(e) => eprintln!("error: {}: {}", e.kind(), e.detail()),
                None => eprintln!("error: io: {err:#}"),
            }
            ExitCode::from(1)
        }
    }
}
