//! The `pdae` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 numerical
//! failure, 3 verification or tolerance failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pencil::{analyze, AnalyzeOptions, DEFAULT_CLUSTER_TOL};
use crate::problem::{ExampleId, GridSpec};
use crate::solver::{march_with, CellStride, MarchOptions, SolveReport};
use crate::stencil::{build_stencil, StencilTable, MAX_DEGREE};
use crate::theory::{run_suite_with, TheoryCheckReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;

pub const CSV_HEADER: &str = "N,h,tau,t0,T,x0,X,m1,m2,delta_u";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StrideArg {
    Unit,
    Block,
}

impl From<StrideArg> for CellStride {
    fn from(s: StrideArg) -> Self {
        match s {
            StrideArg::Unit => CellStride::Unit,
            StrideArg::Block => CellStride::Block,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "pdae", version, about = "Spline-collocation solver and diagnostics for linear PDAE systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one problem on one grid.
    Solve(SolveArgs),
    /// Run every row of a JSON sweep configuration.
    Sweep(SweepArgs),
    /// Diagnose the pencil A + lambda B and print a JSON report.
    Analyze(AnalyzeArgs),
    /// Run the numerical identity and spectral checks.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
struct Domain {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    x0: f64,
    #[arg(long = "X", default_value_t = 1.0, allow_negative_numbers = true)]
    x_end: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t0: f64,
    #[arg(long = "T", default_value_t = 1.0, allow_negative_numbers = true)]
    t_end: f64,
}

fn parse_example(s: &str) -> std::result::Result<ExampleId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Built-in problem: 1, 2, demo or singular.
    #[arg(long, value_parser = parse_example)]
    example: ExampleId,
    #[arg(long)]
    h: f64,
    #[arg(long)]
    tau: f64,
    #[arg(long)]
    m1: usize,
    #[arg(long)]
    m2: usize,
    #[command(flatten)]
    domain: Domain,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
    #[arg(long, value_enum, default_value_t = StrideArg::Unit)]
    stride: StrideArg,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Path to the JSON configuration.
    config: PathBuf,
    /// Overrides the configuration's output format.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[arg(long, value_parser = parse_example)]
    example: ExampleId,
    /// Interior sample count (rounded to a square lattice).
    #[arg(long, default_value_t = 25)]
    samples: usize,
    #[arg(long, default_value_t = 2)]
    m1: usize,
    #[arg(long, default_value_t = 2)]
    m2: usize,
    #[arg(long, default_value_t = 0.1)]
    h: f64,
    #[arg(long, default_value_t = 0.1)]
    tau: f64,
    #[arg(long, default_value_t = DEFAULT_CLUSTER_TOL)]
    cluster_tol: f64,
    #[command(flatten)]
    domain: Domain,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 8)]
    m_max: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
}

/// One row of a sweep configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRow {
    /// Printed in the `N` column; defaults to the 1-based row index.
    #[serde(default)]
    pub label: Option<String>,
    pub example: ExampleId,
    pub h: f64,
    pub tau: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(rename = "X", default = "one")]
    pub x_end: f64,
    #[serde(default)]
    pub t0: f64,
    #[serde(rename = "T", default = "one")]
    pub t_end: f64,
    pub m1: usize,
    pub m2: usize,
    #[serde(default)]
    pub expected_delta_u: Option<f64>,
}

fn one() -> f64 {
    1.0
}

fn default_tolerance() -> f64 {
    3.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub rows: Vec<SweepRow>,
    #[serde(default)]
    pub output_format: OutputFormat,
    #[serde(default = "default_tolerance")]
    pub tolerance_factor: f64,
    #[serde(default)]
    pub stride: CellStride,
    #[serde(default)]
    pub description: Option<String>,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("malformed sweep config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(Error::InvalidArgument("sweep config has no rows".into()));
        }
        if !(self.tolerance_factor.is_finite() && self.tolerance_factor >= 1.0) {
            return Err(Error::InvalidArgument("tolerance_factor must be at least 1".into()));
        }
        for (k, row) in self.rows.iter().enumerate() {
            let ctx = |e: Error| Error::InvalidArgument(format!("row {}: {e}", k + 1));
            row.grid().map_err(ctx)?;
            for m in [row.m1, row.m2] {
                if m == 0 || m > MAX_DEGREE {
                    return Err(ctx(Error::InvalidArgument(format!("degree {m} outside 1..={MAX_DEGREE}"))));
                }
            }
        }
        Ok(())
    }
}

impl SweepRow {
    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.x0, self.x_end, self.t0, self.t_end, self.h, self.tau)
    }
}

/// One emitted sweep row; the first ten fields are the CSV columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    #[serde(rename = "N")]
    pub n: String,
    pub h: f64,
    pub tau: f64,
    pub t0: f64,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub x0: f64,
    #[serde(rename = "X")]
    pub x_end: f64,
    pub m1: usize,
    pub m2: usize,
    pub delta_u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub expected_delta_u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub within_tolerance: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

/// The ten CSV columns of a sweep row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    #[serde(rename = "N")]
    pub n: String,
    pub h: f64,
    pub tau: f64,
    pub t0: f64,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub x0: f64,
    #[serde(rename = "X")]
    pub x_end: f64,
    pub m1: usize,
    pub m2: usize,
    pub delta_u: Option<f64>,
}

impl From<&SweepResult> for CsvRow {
    fn from(r: &SweepResult) -> Self {
        CsvRow {
            n: r.n.clone(),
            h: r.h,
            tau: r.tau,
            t0: r.t0,
            t_end: r.t_end,
            x0: r.x0,
            x_end: r.x_end,
            m1: r.m1,
            m2: r.m2,
            delta_u: r.delta_u,
        }
    }
}

pub fn write_csv(rows: &[CsvRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory CSV write");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV is UTF-8")
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd.headers().map_err(|e| Error::InvalidArgument(format!("bad CSV header: {e}")))?;
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(Error::InvalidArgument(format!(
            "unexpected CSV header '{}'",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    rd.deserialize().map(|r| r.map_err(|e| Error::InvalidArgument(format!("bad CSV row: {e}")))).collect()
}

/// Runs every row (concurrently) and returns results in configuration order.
pub fn run_sweep(cfg: &SweepConfig) -> Vec<SweepResult> {
    let opts = MarchOptions { stride: cfg.stride };
    cfg.rows
        .par_iter()
        .enumerate()
        .map(|(k, row)| {
            let outcome = row.grid().and_then(|g| march_with(&row.example.problem(), &g, row.m1, row.m2, &opts));
            let (delta_u, error) = match outcome {
                Ok((_, report)) => (report.delta_u, None),
                Err(e) => (None, Some(e.to_string())),
            };
            let within_tolerance = match (row.expected_delta_u, delta_u) {
                (Some(exp), Some(du)) => Some(du <= exp * cfg.tolerance_factor && du >= exp / cfg.tolerance_factor),
                (Some(_), None) => Some(false),
                _ => None,
            };
            SweepResult {
                n: row.label.clone().unwrap_or_else(|| (k + 1).to_string()),
                h: row.h,
                tau: row.tau,
                t0: row.t0,
                t_end: row.t_end,
                x0: row.x0,
                x_end: row.x_end,
                m1: row.m1,
                m2: row.m2,
                delta_u,
                expected_delta_u: row.expected_delta_u,
                within_tolerance,
                error,
            }
        })
        .collect()
}

pub fn render_sweep(results: &[SweepResult], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => write_csv(&results.iter().map(CsvRow::from).collect::<Vec<_>>()),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(results).expect("serializable rows");
            s.push('\n');
            s
        }
        OutputFormat::Table => {
            let mut s = format!(
                "{:>4} {:>8} {:>8} {:>5} {:>5} {:>5} {:>5} {:>3} {:>3} {:>10} {:>10}  {}\n",
                "N", "h", "tau", "t0", "T", "x0", "X", "m1", "m2", "delta_u", "expected", "status"
            );
            for r in results {
                let du = r.delta_u.map_or_else(|| "-".to_string(), |v| format!("{v:.2e}"));
                let ex = r.expected_delta_u.map_or_else(|| "-".to_string(), |v| format!("{v:.2e}"));
                let status = match (&r.error, r.within_tolerance) {
                    (Some(e), _) => format!("error: {e}"),
                    (None, Some(true)) => "ok".into(),
                    (None, Some(false)) => "out of tolerance".into(),
                    (None, None) => String::new(),
                };
                s.push_str(&format!(
                    "{:>4} {:>8} {:>8} {:>5} {:>5} {:>5} {:>5} {:>3} {:>3} {:>10} {:>10}  {}\n",
                    r.n, r.h, r.tau, r.t0, r.t_end, r.x0, r.x_end, r.m1, r.m2, du, ex, status
                ));
            }
            s
        }
    }
}

fn sweep_exit_code(results: &[SweepResult]) -> i32 {
    if results.iter().any(|r| r.error.is_some()) {
        EXIT_NUMERICAL
    } else if results.iter().any(|r| r.within_tolerance == Some(false)) {
        EXIT_TOLERANCE
    } else {
        EXIT_OK
    }
}

fn error_exit(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_USAGE
    }
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    example: &'a str,
    grid: &'a GridSpec,
    m1: usize,
    m2: usize,
    stride: CellStride,
    report: &'a SolveReport,
}

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let grid = GridSpec::new(a.domain.x0, a.domain.x_end, a.domain.t0, a.domain.t_end, a.h, a.tau)?;
    let problem = a.example.problem();
    let opts = MarchOptions { stride: a.stride.into() };
    let (_, report) = march_with(&problem, &grid, a.m1, a.m2, &opts)?;
    for w in &report.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let du = report.delta_u.map(|v| v.to_string()).unwrap_or_default();
    let text = match a.format {
        OutputFormat::Json => {
            let doc = SolveOutput {
                example: a.example.as_str(),
                grid: &grid,
                m1: a.m1,
                m2: a.m2,
                stride: opts.stride,
                report: &report,
            };
            serde_json::to_string_pretty(&doc).expect("serializable report") + "\n"
        }
        OutputFormat::Csv => format!(
            "example,h,tau,t0,T,x0,X,m1,m2,delta_u,max_solution_norm,cells_solved,wall_time\n\
             {},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            a.example,
            grid.h,
            grid.tau,
            grid.t0,
            grid.t_end,
            grid.x0,
            grid.x_end,
            a.m1,
            a.m2,
            du,
            report.max_solution_norm,
            report.cells_solved,
            report.wall_time
        ),
        OutputFormat::Table => format!(
            "example            {}\n\
             grid               [{}, {}] x [{}, {}], h = {}, tau = {} ({} x {} steps, r = {})\n\
             degrees            m1 = {}, m2 = {}\n\
             delta_u            {}\n\
             max solution norm  {:.6e}\n\
             cells solved       {}\n\
             wall time          {:.3} s\n",
            problem.name(),
            grid.x0,
            grid.x_end,
            grid.t0,
            grid.t_end,
            grid.h,
            grid.tau,
            grid.n1,
            grid.n2,
            grid.r,
            a.m1,
            a.m2,
            report.delta_u.map_or_else(|| "n/a (no exact solution)".into(), |v| format!("{v:.2e}")),
            report.max_solution_norm,
            report.cells_solved,
            report.wall_time
        ),
    };
    out.write_all(text.as_bytes()).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(EXIT_OK)
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let text = std::fs::read_to_string(&a.config)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", a.config.display())))?;
    let cfg = SweepConfig::from_json(&text)?;
    let results = run_sweep(&cfg);
    for r in &results {
        if let Some(e) = &r.error {
            let _ = writeln!(err, "row {}: {e}", r.n);
        }
    }
    let rendered = render_sweep(&results, a.format.unwrap_or(cfg.output_format));
    out.write_all(rendered.as_bytes()).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(sweep_exit_code(&results))
}

fn cmd_analyze(a: &AnalyzeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let grid = GridSpec::new(a.domain.x0, a.domain.x_end, a.domain.t0, a.domain.t_end, a.h, a.tau)?;
    for (name, m) in [("m1", a.m1), ("m2", a.m2)] {
        if m == 0 || m > MAX_DEGREE {
            return Err(Error::InvalidArgument(format!("{name} = {m} outside 1..={MAX_DEGREE}")));
        }
    }
    let opts = AnalyzeOptions { samples: a.samples, m1: a.m1, m2: a.m2, cluster_tol: a.cluster_tol };
    let report = analyze(&a.example.problem(), &grid, &opts)?;
    for w in &report.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let text = serde_json::to_string_pretty(&report).expect("serializable report") + "\n";
    out.write_all(text.as_bytes()).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(EXIT_OK)
}

/// Runs the verification suite with stencils from `provider` and prints it.
pub fn run_verify_with(
    m_max: usize,
    format: OutputFormat,
    provider: &dyn Fn(usize) -> Result<StencilTable>,
    out: &mut dyn Write,
) -> Result<i32> {
    let report: TheoryCheckReport = run_suite_with(m_max, provider)?;
    let text = match format {
        OutputFormat::Json => serde_json::to_string_pretty(&report).expect("serializable report") + "\n",
        OutputFormat::Table | OutputFormat::Csv => {
            let mut s = String::new();
            for c in &report.checks {
                s.push_str(&format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
            }
            s.push_str(&format!("note: {}\n", report.sign_convention_note));
            s
        }
    };
    out.write_all(text.as_bytes()).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_TOLERANCE })
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ =
                if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a, out, err),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Analyze(a) => cmd_analyze(a, out, err),
        Command::Verify(a) => run_verify_with(a.m_max, a.format, &build_stencil, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            error_exit(&e)
        }
    }
}
