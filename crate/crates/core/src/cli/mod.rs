//! The `mdrf` command-line front end.
//!
//! Data goes to stdout as CSV (default) or JSON, diagnostics to stderr.
//! Exit codes: 0 success, 1 a `verify` check failed, 2 invalid input,
//! 3 infeasible closed form with `--no-fallback`.

mod commands;
mod render;
mod spec;
mod sweep;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

pub use commands::{
    allocate_model, cmd_allocate, cmd_mdrf, cmd_simulate, cmd_verify, simulate_model, Check, SimulationOutcome,
    Verification, GRID_TOL, KKT_TOL, ZERO_RATE_TOL, Z_LIMIT,
};
pub use render::{fmt_num, round_sig};
pub use spec::{ModelKind, ModelSpecFile, Settings, SpecOptions};
pub use sweep::{cmd_sweep, default_range, Cell, Range, SweepKind, SweepTable};

use crate::allocation::RateAllocation;
use crate::binary::{EntropyMode, TieRule};
use crate::error::Error;
use crate::oracles::DistortionReport;
use render::{fmt_list, nums, round_value, to_object};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "mdrf",
    version,
    about = "Mismatched distortion-rate functions and sum-rate allocation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal per-sensor rates for the budget `sum_rate`.
    Allocate(ModelArgs),
    /// Distortion at explicit rates.
    Mdrf(ModelArgs),
    /// Figure data over a parameter range.
    Sweep(SweepArgs),
    /// Monte Carlo distortion at explicit rates, or at the optimal allocation.
    Simulate(ModelArgs),
    /// Cross-check the allocator against grid search and simulation.
    Verify(ModelArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub kind: SweepKind,
    /// start,stop,points
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<Range>,
    #[command(flatten)]
    pub model: ModelArgs,
}

fn parse_entropy_mode(s: &str) -> Result<EntropyMode, String> {
    match s {
        "symmetric" => Ok(EntropyMode::Symmetric),
        "bias_corrected" | "bias-corrected" => Ok(EntropyMode::BiasCorrected),
        _ => Err(format!("unknown entropy mode {s:?} (symmetric, bias_corrected)")),
    }
}

fn parse_tie_rule(s: &str) -> Result<TieRule, String> {
    match s {
        "half_mass" | "half-mass" => Ok(TieRule::HalfMass),
        "strict" => Ok(TieRule::Strict),
        _ => Err(format!("unknown tie rule {s:?} (half_mass, strict)")),
    }
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// JSON model spec; inline flags override its fields.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Gaussian SNRs, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub gammas: Option<Vec<f64>>,
    /// Binary crossover probabilities, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub ps: Option<Vec<f64>>,
    /// P(X = 1) for the binary source.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub sum_rate: Option<f64>,
    /// Per-sensor rates, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub rates: Option<Vec<f64>>,
    /// Grid step in bits.
    #[arg(long, allow_hyphen_values = true)]
    pub step: Option<f64>,
    /// Monte Carlo sample count.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// symmetric or bias_corrected.
    #[arg(long, value_parser = parse_entropy_mode)]
    pub entropy_mode: Option<EntropyMode>,
    /// half_mass or strict.
    #[arg(long, value_parser = parse_tie_rule)]
    pub tie_rule: Option<TieRule>,
    /// Fail instead of running the numeric optimizer when no water level
    /// meets the budget.
    #[arg(long)]
    pub no_fallback: bool,
    /// Add grid and Monte Carlo cross-checks (mdrf).
    #[arg(long)]
    pub verify: bool,
}

impl ModelArgs {
    fn has_model(&self) -> bool {
        self.spec.is_some() || self.model.is_some() || self.gammas.is_some() || self.ps.is_some()
    }

    /// Merges the spec file (if any) with the inline flags.
    pub fn resolve(&self) -> crate::Result<ModelSpecFile> {
        let mut spec = match &self.spec {
            Some(path) => ModelSpecFile::from_path(path)?,
            None => {
                let model = match (self.model, &self.gammas, &self.ps) {
                    (Some(m), _, _) => m,
                    (None, Some(_), None) => ModelKind::Gaussian,
                    (None, None, Some(_)) => ModelKind::Binary,
                    (None, Some(_), Some(_)) => {
                        return Err(Error::Domain("give either --gammas or --ps, not both".into()))
                    }
                    (None, None, None) => return Err(Error::Domain("no model: pass --spec, --gammas or --ps".into())),
                };
                ModelSpecFile {
                    model,
                    gammas: None,
                    ps: None,
                    alpha: None,
                    sum_rate: 0.0,
                    rates: None,
                    options: SpecOptions::default(),
                }
            }
        };
        if let Some(m) = self.model {
            spec.model = m;
        }
        if let Some(g) = &self.gammas {
            spec.gammas = Some(g.clone());
        }
        if let Some(p) = &self.ps {
            spec.ps = Some(p.clone());
        }
        if self.alpha.is_some() {
            spec.alpha = self.alpha;
        }
        if let Some(r) = self.sum_rate {
            spec.sum_rate = r;
        }
        if let Some(r) = &self.rates {
            spec.rates = Some(r.clone());
        }
        let o = &mut spec.options;
        o.step = self.step.or(o.step);
        o.samples = self.samples.or(o.samples);
        o.seed = self.seed.or(o.seed);
        o.tol = self.tol.or(o.tol);
        o.entropy_mode = self.entropy_mode.or(o.entropy_mode);
        o.tie_rule = self.tie_rule.or(o.tie_rule);
        let s = o.settings();
        if !(s.step > 0.0) {
            return Err(Error::Domain(format!("step {} must be positive", s.step)));
        }
        if !(s.tol > 0.0) {
            return Err(Error::Domain(format!("tol {} must be positive", s.tol)));
        }
        spec.normalize()
    }
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Lib(Error::Infeasible(_)) => EXIT_INFEASIBLE,
            _ => EXIT_INVALID,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "{e}"),
        }
    }
}

fn spec_object(spec: &ModelSpecFile) -> Map<String, Value> {
    to_object(serde_json::to_value(spec).expect("spec serializes"))
}

fn write_json(out: &mut dyn Write, v: Value) -> io::Result<()> {
    let text = serde_json::to_string_pretty(&round_value(v)).expect("JSON values serialize");
    writeln!(out, "{text}")
}

fn param_name(spec: &ModelSpecFile) -> &'static str {
    match spec.model {
        ModelKind::Gaussian => "gamma",
        ModelKind::Binary => "p",
    }
}

fn params(spec: &ModelSpecFile) -> &[f64] {
    spec.gammas.as_deref().or(spec.ps.as_deref()).unwrap_or(&[])
}

fn opt_num(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn write_allocation(out: &mut dyn Write, spec: &ModelSpecFile, a: &RateAllocation, format: Format) -> io::Result<()> {
    let feasibility = a.feasibility.map(|f| f.label()).unwrap_or("");
    match format {
        Format::Csv => {
            writeln!(out, "# method,feasibility,nu_star,sum_rate,distortion")?;
            writeln!(
                out,
                "{},{},{},{},{}",
                a.method.as_str(),
                feasibility,
                opt_num(a.nu_star),
                fmt_num(a.sum_rate()),
                fmt_num(a.distortion)
            )?;
            writeln!(out, "# sensor,{},rate", param_name(spec))?;
            for (l, (&p, &r)) in params(spec).iter().zip(&a.rates).enumerate() {
                writeln!(out, "{},{},{}", l + 1, fmt_num(p), fmt_num(r))?;
            }
            Ok(())
        }
        Format::Json => {
            let mut o = spec_object(spec);
            o.insert("rates".into(), nums(&a.rates));
            o.insert("distortion".into(), json!(a.distortion));
            o.insert("method".into(), json!(a.method));
            if let Some(nu) = a.nu_star {
                o.insert("nu_star".into(), json!(nu));
            }
            if let Some(f) = a.feasibility {
                o.insert("feasibility".into(), json!(f));
            }
            write_json(out, Value::Object(o))
        }
    }
}

fn write_mdrf(out: &mut dyn Write, spec: &ModelSpecFile, r: &DistortionReport, format: Format) -> io::Result<()> {
    match format {
        Format::Csv => match (&r.grid, &r.monte_carlo) {
            (Some(g), Some(mc)) => {
                writeln!(out, "# analytic,grid_distortion,grid_rates,mc_estimate,mc_stderr,mc_z")?;
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    fmt_num(r.analytic),
                    fmt_num(g.best_distortion),
                    fmt_list(&g.best_rates),
                    fmt_num(mc.estimate),
                    fmt_num(mc.stderr),
                    fmt_num(mc.z_score(r.analytic))
                )
            }
            _ => {
                writeln!(out, "# analytic")?;
                writeln!(out, "{}", fmt_num(r.analytic))
            }
        },
        Format::Json => {
            let mut o = spec_object(spec);
            o.extend(to_object(serde_json::to_value(r).expect("report serializes")));
            write_json(out, Value::Object(o))
        }
    }
}

fn write_simulation(
    out: &mut dyn Write,
    spec: &ModelSpecFile,
    s: &SimulationOutcome,
    format: Format,
) -> io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "# estimate,stderr,samples,seed,analytic,z_score")?;
            writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt_num(s.report.estimate),
                fmt_num(s.report.stderr),
                s.report.samples,
                s.report.seed,
                fmt_num(s.analytic),
                fmt_num(s.z_score)
            )
        }
        Format::Json => {
            let mut o = spec_object(spec);
            o.insert("rates".into(), nums(&s.rates));
            o.insert("analytic".into(), json!(s.analytic));
            o.insert("monte_carlo".into(), json!(s.report));
            o.insert("z_score".into(), render::num(s.z_score));
            write_json(out, Value::Object(o))
        }
    }
}

fn write_verification(out: &mut dyn Write, spec: &ModelSpecFile, v: &Verification, format: Format) -> io::Result<()> {
    let status = |pass: bool| if pass { "PASS" } else { "FAIL" };
    match format {
        Format::Csv => {
            writeln!(out, "# check,result,observed,limit")?;
            for c in &v.checks {
                writeln!(
                    out,
                    "{},{},{},{}",
                    c.name,
                    status(c.pass),
                    fmt_num(c.observed),
                    fmt_num(c.limit)
                )?;
            }
            writeln!(out, "# overall {}", status(v.all_pass()))
        }
        Format::Json => {
            let mut o = spec_object(spec);
            o.insert("rates".into(), nums(&v.allocation.rates));
            o.insert("distortion".into(), json!(v.allocation.distortion));
            o.insert("method".into(), json!(v.allocation.method));
            let checks: Vec<Value> = v
                .checks
                .iter()
                .map(|c| json!({"name": c.name, "result": status(c.pass), "observed": render::num(c.observed), "limit": render::num(c.limit)}))
                .collect();
            o.insert("checks".into(), Value::Array(checks));
            o.insert("all_pass".into(), json!(v.all_pass()));
            write_json(out, Value::Object(o))
        }
    }
}

fn cell_text(c: &Cell) -> String {
    match c {
        Cell::Num(x) => fmt_num(*x),
        Cell::Text(t) => t.to_string(),
    }
}

fn write_sweep(out: &mut dyn Write, spec: Option<&ModelSpecFile>, t: &SweepTable, format: Format) -> io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "# {}", t.columns.join(","))?;
            for row in &t.rows {
                let cells: Vec<String> = row.iter().map(cell_text).collect();
                writeln!(out, "{}", cells.join(","))?;
            }
            Ok(())
        }
        Format::Json => {
            let mut o = spec.map(spec_object).unwrap_or_default();
            o.insert("kind".into(), json!(t.kind.name()));
            o.insert("columns".into(), json!(t.columns));
            let rows: Vec<Value> = t
                .rows
                .iter()
                .map(|r| {
                    Value::Array(
                        r.iter()
                            .map(|c| match c {
                                Cell::Num(x) => render::num(*x),
                                Cell::Text(s) => json!(s),
                            })
                            .collect(),
                    )
                })
                .collect();
            o.insert("rows".into(), Value::Array(rows));
            write_json(out, Value::Object(o))
        }
    }
}

fn execute(command: &Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Allocate(m) => {
            let spec = m.resolve()?;
            let a = cmd_allocate(&spec, !m.no_fallback)?;
            write_allocation(out, &spec, &a, m.format)?;
        }
        Command::Mdrf(m) => {
            let spec = m.resolve()?;
            let r = cmd_mdrf(&spec, m.verify)?;
            write_mdrf(out, &spec, &r, m.format)?;
        }
        Command::Simulate(m) => {
            let spec = m.resolve()?;
            let s = cmd_simulate(&spec, !m.no_fallback)?;
            write_simulation(out, &spec, &s, m.format)?;
        }
        Command::Verify(m) => {
            let spec = m.resolve()?;
            let v = cmd_verify(&spec, !m.no_fallback)?;
            write_verification(out, &spec, &v, m.format)?;
            if !v.all_pass() {
                return Ok(EXIT_CHECK_FAILED);
            }
        }
        Command::Sweep(a) => {
            let spec = if a.model.has_model() {
                Some(a.model.resolve()?)
            } else {
                None
            };
            let range = a.range.unwrap_or_else(|| default_range(a.kind, spec.as_ref()));
            let t = cmd_sweep(a.kind, spec.as_ref(), range, !a.model.no_fallback)?;
            write_sweep(out, spec.as_ref(), &t, a.model.format)?;
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_INVALID
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(&cli.command, out).and_then(|code| {
        out.flush()?;
        Ok(code)
    }) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "mdrf: {f}");
            f.exit_code()
        }
    }
}
