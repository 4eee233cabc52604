//! Command-line front end: argument types, command runners and output
//! formatting. The binary only parses arguments and maps errors to exit codes.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::circle_diameter::{self, COEFFICIENT_LIMIT};
use crate::error::{invalid, Error, Result};
use crate::measures::aligned_distance;
use crate::oracle::{self, LloydConfig};
use crate::result::{Allocation, Method, Model, OutputRecord, QuantizationResult};
use crate::segments::disconnected;

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

const TABLE_MAX: usize = 10_000;
const CIRCLE_TABLE_MAX: usize = 2_000;
const VERIFY_ERROR_TOL: f64 = 1e-5;
const VERIFY_POINT_TOL: f64 = 1e-4;

#[derive(Debug, Parser)]
#[command(name = "mixquant", version, about = "Optimal quantizers for mixed uniform distributions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute one optimal codebook.
    Quantize(QuantizeArgs),
    /// Tabulate allocation and error over a range of n.
    Table(TableArgs),
    /// Compare closed forms with the Lloyd oracle.
    Verify(VerifyArgs),
    /// n²·V_n and the dimension estimate for the circle model, n = 3k + 2.
    Asymptotics(AsymptoticsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

impl OracleArgs {
    fn config(&self) -> LloydConfig {
        LloydConfig {
            restarts: self.restarts,
            tol: self.tol,
            seed: self.seed,
            ..LloydConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct QuantizeArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Method::ClosedForm)]
    pub method: Method,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Atoms per component for the brute-force search.
    #[arg(long, default_value_t = 4096)]
    pub grid: usize,
    #[command(flatten)]
    pub oracle: OracleArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    #[arg(long, default_value_t = 1)]
    pub n_min: usize,
    #[arg(long)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    #[arg(long)]
    pub n_max: usize,
    #[command(flatten)]
    pub oracle: OracleArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AsymptoticsArgs {
    #[arg(long, value_enum, default_value_t = Model::CircleDiameter)]
    pub model: Model,
    #[arg(long, default_value_t = 100)]
    pub k_max: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArg(_) => EXIT_INVALID,
        Error::NonConvergence { .. } => EXIT_NONCONVERGENCE,
        _ => EXIT_FAILURE,
    }
}

/// Twelve significant digits, positional notation when reasonable.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-6..12).contains(&mag) {
        let decimals = (11 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

/// Runs a command, writing its output to `out`; returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let (text, code) = match &cli.command {
        Command::Quantize(a) => (quantize(a)?, 0),
        Command::Table(a) => (table(a)?, 0),
        Command::Verify(a) => verify(a)?,
        Command::Asymptotics(a) => (asymptotics(a)?, 0),
    };
    let target = match &cli.command {
        Command::Quantize(a) => &a.out,
        Command::Table(a) => &a.out,
        Command::Verify(a) => &a.out,
        Command::Asymptotics(a) => &a.out,
    };
    match target {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::InvalidArg(format!("cannot write {}: {e}", path.display())))?,
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Error::InvalidArg(format!("cannot write output: {e}")))?,
    }
    Ok(code)
}

pub fn compute(model: Model, n: usize, method: Method, grid: usize, config: &LloydConfig) -> Result<QuantizationResult> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    match method {
        Method::ClosedForm => model.optimal_set(n),
        Method::Lloyd => oracle::lloyd(&model.measure(), n, config),
        Method::BruteForce => oracle::brute_force(&model.measure(), n, grid),
    }
}

fn quantize(a: &QuantizeArgs) -> Result<String> {
    let r = compute(a.model, a.n, a.method, a.grid, &a.oracle.config())?;
    let rec = OutputRecord::new(a.model, &r);
    Ok(match a.format {
        Format::Json => serde_json::to_string_pretty(&rec).expect("record serialises") + "\n",
        Format::Csv => quantize_csv(&rec, a.model.dim()),
    })
}

fn quantize_csv(rec: &OutputRecord, dim: usize) -> String {
    let mut s = String::from(if dim == 1 {
        "model,n,method,error,error_exact,i,x\n"
    } else {
        "model,n,method,error,error_exact,i,x1,x2\n"
    });
    let method = serde_json::to_value(rec.method).unwrap();
    for (i, p) in rec.points.iter().enumerate() {
        let coords = match p {
            crate::result::PointRecord::Line(x) => sig12(*x),
            crate::result::PointRecord::Plane([x, y]) => format!("{},{}", sig12(*x), sig12(*y)),
        };
        s += &format!(
            "{},{},{},{},{},{},{}\n",
            rec.model,
            rec.n,
            method.as_str().unwrap(),
            sig12(rec.error),
            rec.error_exact.as_deref().unwrap_or(""),
            i + 1,
            coords
        );
    }
    s
}

#[derive(Debug, Clone, Serialize)]
struct TableRow {
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n1: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n2: Option<usize>,
    #[serde(rename = "Vn")]
    vn: f64,
    #[serde(rename = "Vn_exact", skip_serializing_if = "Option::is_none")]
    vn_exact: Option<String>,
}

fn table_row(model: Model, n: usize) -> Result<TableRow> {
    if model == Model::CircleDiameter && n >= 2 {
        let (t, _, v) = circle_diameter::optimal_configuration(n)?;
        return Ok(TableRow {
            n,
            k: Some(t.k),
            n1: Some(t.n1),
            n2: Some(t.n2),
            vn: v,
            vn_exact: None,
        });
    }
    let r = model.optimal_set(n)?;
    let (k, n1, n2) = match r.allocation {
        Some(Allocation::Circle(t)) => (Some(t.k), Some(t.n1), Some(t.n2)),
        Some(Allocation::Split { k }) => (Some(k), None, None),
        None => (None, None, None),
    };
    Ok(TableRow {
        n,
        k,
        n1,
        n2,
        vn: r.error,
        vn_exact: r.error_exact.map(crate::exact::format),
    })
}

fn table(a: &TableArgs) -> Result<String> {
    let cap = if a.model == Model::CircleDiameter { CIRCLE_TABLE_MAX } else { TABLE_MAX };
    if !(1 <= a.n_min && a.n_min <= a.n_max && a.n_max <= cap) {
        return invalid(format!(
            "need 1 <= n-min <= n-max <= {cap}, got {}..{}",
            a.n_min, a.n_max
        ));
    }
    let rows = (a.n_min..=a.n_max)
        .into_par_iter()
        .map(|n| table_row(a.model, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(match a.format {
        Format::Json => serde_json::to_string_pretty(&rows).expect("rows serialise") + "\n",
        Format::Csv => {
            let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
            let circle = a.model == Model::CircleDiameter;
            let mut s = String::from(if circle { "n,k,n1,n2,Vn\n" } else { "n,k,Vn\n" });
            for r in rows {
                if circle {
                    s += &format!("{},{},{},{},{}\n", r.n, opt(r.k), opt(r.n1), opt(r.n2), sig12(r.vn));
                } else {
                    s += &format!("{},{},{}\n", r.n, opt(r.k), sig12(r.vn));
                }
            }
            s
        }
    })
}

/// Outcome of comparing the closed form with Lloyd at one n.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyLine {
    pub n: usize,
    pub closed_form: f64,
    pub lloyd: f64,
    pub codebook_distance: f64,
    /// Whether the exact rational error matches the exact distortion of the
    /// rational codebook, where both are available.
    pub exact: Option<bool>,
    pub pass: bool,
}

fn exact_check(model: Model, n: usize, r: &QuantizationResult) -> Option<bool> {
    let want = r.error_exact?;
    match (model, r.allocation) {
        (Model::Disconnected, Some(Allocation::Split { k })) => {
            Some(disconnected::exact_distortion(&disconnected::exact_points(n, k)) == want)
        }
        _ => Some((crate::exact::to_f64(want) - r.error).abs() <= 1e-12 * r.error),
    }
}

pub fn verify_model(model: Model, n_max: usize, config: &LloydConfig) -> Result<Vec<VerifyLine>> {
    if n_max == 0 {
        return invalid("n-max must be at least 1");
    }
    let measure = model.measure();
    (1..=n_max)
        .map(|n| {
            let cf = model.optimal_set(n)?;
            let ll = oracle::lloyd(&measure, n, config)?;
            let dist = aligned_distance(cf.codebook.points(), ll.codebook.points());
            let exact = exact_check(model, n, &cf);
            let pass = (cf.error - ll.error).abs() <= VERIFY_ERROR_TOL
                && dist <= VERIFY_POINT_TOL
                && exact != Some(false);
            Ok(VerifyLine {
                n,
                closed_form: cf.error,
                lloyd: ll.error,
                codebook_distance: dist,
                exact,
                pass,
            })
        })
        .collect()
}

fn verify(a: &VerifyArgs) -> Result<(String, i32)> {
    let lines = verify_model(a.model, a.n_max, &a.oracle.config())?;
    let mut s = String::new();
    for l in &lines {
        s += &format!(
            "n={:<3} closed-form={} lloyd={} delta={:.3e} codebook-distance={:.3e}{} {}\n",
            l.n,
            sig12(l.closed_form),
            sig12(l.lloyd),
            (l.closed_form - l.lloyd).abs(),
            l.codebook_distance,
            match l.exact {
                Some(true) => " exact=ok",
                Some(false) => " exact=mismatch",
                None => "",
            },
            if l.pass { "PASS" } else { "FAIL" }
        );
    }
    let passed = lines.iter().filter(|l| l.pass).count();
    s += &format!("{}: {passed}/{} pass\n", a.model, lines.len());
    let code = if passed == lines.len() { 0 } else { EXIT_FAILURE };
    Ok((s, code))
}

fn asymptotics(a: &AsymptoticsArgs) -> Result<String> {
    if a.model != Model::CircleDiameter {
        return invalid("asymptotics are available for the circle-diameter model only");
    }
    if !(1..=(CIRCLE_TABLE_MAX - 2) / 3).contains(&a.k_max) {
        return invalid(format!("k-max must lie in 1..={}", (CIRCLE_TABLE_MAX - 2) / 3));
    }
    let coeff = circle_diameter::coefficient_estimate(a.k_max)?;
    let mut s = String::from("n,n2Vn,dim_estimate,target\n");
    let last = coeff.len() - 1;
    for (i, (n, c)) in coeff.into_iter().enumerate() {
        let v = c / (n * n) as f64;
        let dim = 2.0 * (n as f64).ln() / -v.ln();
        let target = if i == last { sig12(COEFFICIENT_LIMIT) } else { String::new() };
        s += &format!("{n},{},{},{target}\n", sig12(c), sig12(dim));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (Result<i32>, String) {
        let cli = Cli::try_parse_from(std::iter::once("mixquant").chain(args.iter().copied())).unwrap();
        let mut buf = Vec::new();
        let code = run(cli, &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn significant_digits() {
        assert_eq!(sig12(0.343690524873), "0.343690524873");
        assert_eq!(sig12(13.0 / 768.0), "0.0169270833333");
        assert_eq!(sig12(5.2011002), "5.20110020000");
        assert_eq!(sig12(1e-9), "1.00000000000e-9");
    }

    #[test]
    fn quantize_disconnected_json() {
        let (code, out) = run_args(&["quantize", "--model", "disconnected", "--n", "3"]);
        assert_eq!(code.unwrap(), 0);
        let rec: OutputRecord = serde_json::from_str(&out).unwrap();
        assert_eq!(rec.error_exact.as_deref(), Some("1/192"));
        assert_eq!(rec.n, 3);
    }

    #[test]
    fn quantize_csv_rows() {
        let (_, out) = run_args(&["quantize", "--model", "circle-diameter", "--n", "2", "--format", "csv"]);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "model,n,method,error,error_exact,i,x1,x2");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("circle-diameter,2,closed-form,0.343690"));
    }

    #[test]
    fn table_connected_header() {
        let (_, out) = run_args(&["table", "--model", "connected", "--n-min", "1", "--n-max", "4"]);
        assert!(out.starts_with("n,k,Vn\n1,,"));
        assert_eq!(out.lines().count(), 5);
    }

    #[test]
    fn invalid_ranges() {
        let (code, _) = run_args(&["table", "--model", "connected", "--n-min", "5", "--n-max", "4"]);
        assert_eq!(exit_code(&code.unwrap_err()), EXIT_INVALID);
        let (code, _) = run_args(&["asymptotics", "--model", "connected"]);
        assert_eq!(exit_code(&code.unwrap_err()), EXIT_INVALID);
        let (code, _) = run_args(&["quantize", "--model", "connected", "--n", "0"]);
        assert_eq!(exit_code(&code.unwrap_err()), EXIT_INVALID);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::InvalidArg("x".into())), 2);
        assert_eq!(
            exit_code(&Error::NonConvergence { what: "x".into(), residual: 1.0 }),
            3
        );
        assert_eq!(exit_code(&Error::Assertion("x".into())), 1);
    }
}
