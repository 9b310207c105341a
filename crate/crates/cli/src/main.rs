//! Command-line front end: evaluate the special functions, tabulate
//! fractional kernels and option prices to CSV/JSON, and run the
//! verification suite.
//!
//! Exit codes: 0 success, 2 invalid arguments, 3 numerical failure,
//! 4 I/O failure. All output is deterministic: no timestamps, fixed
//! iteration order, floats printed with 17 significant digits.

use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use fracevo_core::blackscholes::{bs_price, frac_bs_price, frac_bs_residual, to_transformed,
    OptionSpec, TransformedCoords};
use fracevo_core::diffusion::{frac_heat_kernel, frac_kernel_mellin_closed,
    frac_kernel_mellin_numeric, heat_kernel, mass_check, KernelQuery};
use fracevo_core::math::{erfc, norm_cdf, SQRT_PI};
use fracevo_core::quadrature::integrate_interval;
use fracevo_core::specialfn::{density_cutoff, ml_density, ml_generalized, MLParams};
use fracevo_core::subordination::{subordinate, Form, SubordinationRequest};
use fracevo_core::transforms::{check_lemma1, check_lemma2, default_s_grid, TimeFunction};
use fracevo_core::{QuadratureSpec, SeriesConfig};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "fracevo", version, about = "Fractional evolution toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the generalized Mittag-Leffler function E_(a,b)(-z)
    MlEval(MlEvalArgs),
    /// Tabulate the subordination probability density f_a(z)
    Density(DensityArgs),
    /// Subordinate the scalar solution u(t) = exp(-lambda t)
    Subordinate(SubordinateArgs),
    /// Tabulate the fractional diffusion kernel G_a(r, t)
    Diffusion(DiffusionArgs),
    /// Price a European call, classical or fractional
    BsPrice(BsPriceArgs),
    /// Run the verification suite and emit a JSON report
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// Output format
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the artifact to this path instead of standard output
    #[arg(long)]
    out: Option<String>,
    /// JSON config file mirroring the flags; flags take precedence
    #[arg(long)]
    config: Option<String>,
}

#[derive(Args)]
struct MlEvalArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Single evaluation point (shorthand for a one-point grid)
    #[arg(long)]
    z: Option<f64>,
    /// Grid spec: start:stop:step or comma-separated values
    #[arg(long)]
    z_grid: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DensityArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    z: Option<f64>,
    #[arg(long)]
    z_grid: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SubordinateArgs {
    #[arg(long)]
    alpha: Option<f64>,
    /// Decay rate of the classical solution exp(-lambda t)
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    t_grid: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DiffusionArgs {
    #[arg(long)]
    alpha: Option<f64>,
    /// Space dimension
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    r_grid: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BsPriceArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    strike: Option<f64>,
    #[arg(long)]
    lambda0: Option<f64>,
    /// Transformed time to expiry, tau = sigma^2 (T - t) / 2
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    s_grid: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which checks to run
    #[arg(long)]
    suite: Option<String>,
    /// Restrict alpha-parameterized checks to a single alpha
    #[arg(long)]
    alpha: Option<f64>,
    #[command(flatten)]
    common: Common,
}

enum CliError {
    Args(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Args(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Args(m) | CliError::Numerical(m) | CliError::Io(m) => m,
        }
    }
}

fn args_err(msg: impl Into<String>) -> CliError {
    CliError::Args(msg.into())
}

/// 17-significant-digit serialization; re-parses to a bit-identical double.
fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

/// Parses `start:stop:step` (inclusive endpoints within half-step
/// tolerance) or a comma-separated list into a strictly increasing grid.
fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parse_one = |s: &str| -> Result<f64, CliError> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| args_err(format!("invalid number in grid spec: {s:?}")))
    };
    let vals = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(args_err(format!(
                "grid spec must be start:stop:step or a comma-separated list, got {spec:?}"
            )));
        }
        let (start, stop, step) = (parse_one(parts[0])?, parse_one(parts[1])?, parse_one(parts[2])?);
        if step <= 0.0 {
            return Err(args_err("grid step must be positive"));
        }
        if start > stop {
            return Err(args_err("grid start must not exceed stop"));
        }
        let n = ((stop - start) / step + 0.5).floor() as usize;
        (0..=n).map(|i| start + step * i as f64).collect()
    } else {
        spec.split(',')
            .map(parse_one)
            .collect::<Result<Vec<f64>, CliError>>()?
    };
    if vals.is_empty() {
        return Err(args_err("grid spec produced no points"));
    }
    if vals.windows(2).any(|w| w[0] >= w[1]) {
        return Err(args_err("grid values must be strictly increasing"));
    }
    Ok(vals)
}

/// Loads the optional JSON config file; flags override its entries.
fn load_config(path: Option<&str>) -> Result<Map<String, Value>, CliError> {
    let Some(path) = path else {
        return Ok(Map::new());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {path}: {e}")))?;
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(args_err("config file must contain a JSON object")),
        Err(e) => Err(args_err(format!("config file is not valid JSON: {e}"))),
    }
}

fn cfg_f64(cfg: &Map<String, Value>, key: &str) -> Result<Option<f64>, CliError> {
    match cfg.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| args_err(format!("config key {key:?} must be a number"))),
    }
}

fn cfg_str(cfg: &Map<String, Value>, key: &str) -> Result<Option<String>, CliError> {
    match cfg.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_str()
            .map(|s| Some(s.to_owned()))
            .ok_or_else(|| args_err(format!("config key {key:?} must be a string"))),
    }
}

fn require(name: &str, v: Option<f64>) -> Result<f64, CliError> {
    v.ok_or_else(|| args_err(format!("missing required parameter --{name}")))
}

/// Resolves the evaluation grid from a scalar flag, a grid flag, or the
/// config file (keys `<name>` and `<name>_grid`).
fn resolve_grid(
    name: &str,
    scalar: Option<f64>,
    grid: Option<&str>,
    cfg: &Map<String, Value>,
) -> Result<Vec<f64>, CliError> {
    if scalar.is_some() && grid.is_some() {
        return Err(args_err(format!("--{name} and --{name}-grid are mutually exclusive")));
    }
    if let Some(g) = grid {
        return parse_grid(g);
    }
    if let Some(v) = scalar {
        return Ok(vec![v]);
    }
    let grid_key = format!("{name}_grid");
    if let Some(g) = cfg_str(cfg, &grid_key)? {
        return parse_grid(&g);
    }
    if let Some(v) = cfg_f64(cfg, name)? {
        return Ok(vec![v]);
    }
    Err(args_err(format!("missing required parameter --{name} or --{name}-grid")))
}

/// A tabular artifact: header comment, column names, and data rows.
struct Table {
    command: &'static str,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        Self {
            command,
            columns,
            rows: Vec::new(),
        }
    }

    fn settings_comment() -> String {
        let q = QuadratureSpec::default();
        let s = SeriesConfig::default();
        format!(
            "panels={} nodes={} tail_cutoff={} abs_tol={:e} rel_tol={:e} max_terms={}",
            q.panels, q.nodes_per_panel, q.tail_cutoff, q.abs_tol, s.rel_tol, s.max_terms
        )
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# fracevo {} {VERSION} {}",
            self.command,
            Self::settings_comment()
        );
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| match v {
                    Value::Number(n) if n.is_f64() => fmt_f(n.as_f64().unwrap()),
                    other => other.to_string(),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    fn to_json(&self) -> String {
        let doc = json!({
            "tool": "fracevo",
            "command": self.command,
            "version": VERSION,
            "settings": Self::settings_comment(),
            "columns": self.columns,
            "rows": self.rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }
}

fn emit(table: &Table, format: Format, out: Option<&str>) -> Result<(), CliError> {
    let text = match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    write_artifact(&text, out)
}

fn write_artifact(text: &str, out: Option<&str>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {path}: {e}"))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}"))),
    }
}

fn resolve_format(flag: Option<Format>, cfg: &Map<String, Value>) -> Result<Format, CliError> {
    if let Some(f) = flag {
        return Ok(f);
    }
    match cfg_str(cfg, "format")?.as_deref() {
        None => Ok(Format::Csv),
        Some("csv") => Ok(Format::Csv),
        Some("json") => Ok(Format::Json),
        Some(other) => Err(args_err(format!("unknown format {other:?}"))),
    }
}

fn resolve_out(flag: Option<&str>, cfg: &Map<String, Value>) -> Result<Option<String>, CliError> {
    match flag {
        Some(p) => Ok(Some(p.to_owned())),
        None => cfg_str(cfg, "out"),
    }
}

fn run_ml_eval(a: &MlEvalArgs) -> Result<(), CliError> {
    let cfg = load_config(a.common.config.as_deref())?;
    let alpha = require("alpha", a.alpha.or(cfg_f64(&cfg, "alpha")?))?;
    let beta = a.beta.or(cfg_f64(&cfg, "beta")?).unwrap_or(1.0);
    let grid = resolve_grid("z", a.z, a.z_grid.as_deref(), &cfg)?;
    let params = MLParams::new(alpha, beta)
        .map_err(|_| args_err("invalid (alpha, beta): need 0 < alpha <= 1 and beta >= alpha"))?;
    let series = SeriesConfig::default();
    let mut table = Table::new("ml-eval", vec!["alpha", "beta", "z", "value", "terms", "converged"]);
    for &z in &grid {
        if z < 0.0 {
            return Err(args_err("z must be nonnegative (the function argument is -z)"));
        }
        let r = ml_generalized(params, z, &series);
        if !r.value.is_finite() {
            return Err(CliError::Numerical(format!("evaluation failed at z = {z}")));
        }
        table.rows.push(vec![
            json!(alpha),
            json!(beta),
            json!(z),
            json!(r.value),
            json!(r.terms_used),
            json!(r.converged),
        ]);
    }
    emit(&table, resolve_format(a.common.format, &cfg)?, resolve_out(a.common.out.as_deref(), &cfg)?.as_deref())
}

fn run_density(a: &DensityArgs) -> Result<(), CliError> {
    let cfg = load_config(a.common.config.as_deref())?;
    let alpha = require("alpha", a.alpha.or(cfg_f64(&cfg, "alpha")?))?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(args_err(
            "density requires 0 < alpha < 1 (at alpha = 1 the density is a Dirac mass at z = 1)",
        ));
    }
    let grid = resolve_grid("z", a.z, a.z_grid.as_deref(), &cfg)?;
    let series = SeriesConfig::default();
    let mut table = Table::new("density", vec!["alpha", "z", "value", "terms", "converged"]);
    for &z in &grid {
        if z < 0.0 {
            return Err(args_err("z must be nonnegative"));
        }
        let r = ml_density(alpha, z, &series);
        if !r.value.is_finite() {
            return Err(CliError::Numerical(format!("evaluation failed at z = {z}")));
        }
        table.rows.push(vec![
            json!(alpha),
            json!(z),
            json!(r.value),
            json!(r.terms_used),
            json!(r.converged),
        ]);
    }
    emit(&table, resolve_format(a.common.format, &cfg)?, resolve_out(a.common.out.as_deref(), &cfg)?.as_deref())
}

fn run_subordinate(a: &SubordinateArgs) -> Result<(), CliError> {
    let cfg = load_config(a.common.config.as_deref())?;
    let alpha = require("alpha", a.alpha.or(cfg_f64(&cfg, "alpha")?))?;
    let lambda = a.lambda.or(cfg_f64(&cfg, "lambda")?).unwrap_or(1.0);
    if lambda < 0.0 {
        return Err(args_err("lambda must be nonnegative"));
    }
    let grid = resolve_grid("t", a.t, a.t_grid.as_deref(), &cfg)?;
    if grid.iter().any(|&t| t < 0.0) {
        return Err(args_err("t must be nonnegative"));
    }
    let u = TimeFunction::new("exp(-lambda t)", f64::MAX, move |t| (-lambda * t).exp());
    let quad = QuadratureSpec::default();
    let mut table = Table::new(
        "subordinate",
        vec!["alpha", "lambda", "t", "value", "mass_used"],
    );
    for &t in &grid {
        let r = subordinate(&SubordinationRequest {
            solution: &u,
            alpha,
            t,
            quad,
            form: Form::ScaledSolution,
        })
        .map_err(|e| match e {
            fracevo_core::subordination::SubordinationError::InvalidAlpha => {
                args_err("alpha must lie in (0, 1]")
            }
            other => CliError::Numerical(format!("subordination failed at t = {t}: {other}")),
        })?;
        table.rows.push(vec![
            json!(alpha),
            json!(lambda),
            json!(t),
            json!(r.value),
            json!(r.density_mass_used),
        ]);
    }
    emit(&table, resolve_format(a.common.format, &cfg)?, resolve_out(a.common.out.as_deref(), &cfg)?.as_deref())
}

fn run_diffusion(a: &DiffusionArgs) -> Result<(), CliError> {
    let cfg = load_config(a.common.config.as_deref())?;
    let alpha = require("alpha", a.alpha.or(cfg_f64(&cfg, "alpha")?))?;
    let n = match a.n {
        Some(n) => n,
        None => cfg_f64(&cfg, "n")?.map(|v| v as u32).unwrap_or(1),
    };
    let t = a.t.or(cfg_f64(&cfg, "t")?).unwrap_or(1.0);
    let grid = resolve_grid("r", a.r, a.r_grid.as_deref(), &cfg)?;
    let quad = QuadratureSpec::default();
    let mut table = Table::new(
        "diffusion",
        vec!["r", "t", "n", "alpha", "value", "mass_used"],
    );
    for &r in &grid {
        let q = KernelQuery { r, t, n, alpha };
        let res = frac_heat_kernel(&q, &quad).map_err(|e| match e {
            fracevo_core::diffusion::DiffusionError::InvalidQuery => {
                args_err("invalid kernel query: need r >= 0, t > 0, 1 <= n <= 10, 0 < alpha <= 1")
            }
            fracevo_core::diffusion::DiffusionError::SingularOrigin => {
                args_err("r = 0 is singular for n >= 2 with alpha < 1")
            }
            other => CliError::Numerical(format!("kernel evaluation failed at r = {r}: {other:?}")),
        })?;
        table.rows.push(vec![
            json!(r),
            json!(t),
            json!(n),
            json!(alpha),
            json!(res.value),
            json!(res.density_mass_used),
        ]);
    }
    emit(&table, resolve_format(a.common.format, &cfg)?, resolve_out(a.common.out.as_deref(), &cfg)?.as_deref())
}

fn run_bs_price(a: &BsPriceArgs) -> Result<(), CliError> {
    let cfg = load_config(a.common.config.as_deref())?;
    let alpha = require("alpha", a.alpha.or(cfg_f64(&cfg, "alpha")?))?;
    let strike = require("strike", a.strike.or(cfg_f64(&cfg, "strike")?))?;
    let lambda0 = a.lambda0.or(cfg_f64(&cfg, "lambda0")?).unwrap_or(1.0);
    let tau = require("tau", a.tau.or(cfg_f64(&cfg, "tau")?))?;
    let grid = resolve_grid("s", a.s, a.s_grid.as_deref(), &cfg)?;
    let quad = QuadratureSpec::default();
    let mut table = Table::new(
        "bs-price",
        vec!["s", "e", "tau", "alpha", "lambda0", "value", "mass_used"],
    );
    for &s in &grid {
        let res = frac_bs_price(s, strike, alpha, tau, lambda0, &quad).map_err(|e| match e {
            fracevo_core::blackscholes::BsError::InvalidInput => {
                args_err("invalid inputs: need S > 0, E > 0, tau > 0, lambda0 >= 0")
            }
            other => CliError::Numerical(format!("pricing failed at S = {s}: {other:?}")),
        })?;
        table.rows.push(vec![
            json!(s),
            json!(strike),
            json!(tau),
            json!(alpha),
            json!(lambda0),
            json!(res.value),
            json!(res.density_mass_used),
        ]);
    }
    emit(&table, resolve_format(a.common.format, &cfg)?, resolve_out(a.common.out.as_deref(), &cfg)?.as_deref())
}

// ---------------------------------------------------------------------------
// verify: runtime mirror of the acceptance suite. Each check records the
// observed worst deviation against its pinned threshold.
// ---------------------------------------------------------------------------

struct Check {
    name: &'static str,
    observed: f64,
    tolerance: f64,
}

impl Check {
    fn pass(&self) -> bool {
        self.observed <= self.tolerance
    }
}

fn filter_alphas(defaults: &[f64], alpha: Option<f64>) -> Vec<f64> {
    match alpha {
        Some(a) => vec![a],
        None => defaults.to_vec(),
    }
}

fn verify_normalization(alpha: Option<f64>, quad: &QuadratureSpec) -> Check {
    let series = SeriesConfig::default();
    let mut worst = 0.0_f64;
    for a in filter_alphas(&[0.3, 0.5, 0.7, 0.9], alpha) {
        let z_max = density_cutoff(a);
        let mass =
            integrate_interval(|z| ml_density(a, z, &series).value, 0.0, z_max, quad).unwrap();
        worst = worst.max((mass - 1.0).abs());
    }
    Check { name: "density normalization", observed: worst, tolerance: 1e-8 }
}

fn verify_laplace(alpha: Option<f64>, quad: &QuadratureSpec) -> Check {
    let series = SeriesConfig::default();
    let mut worst = 0.0_f64;
    for a in filter_alphas(&[0.3, 0.5, 0.7], alpha) {
        let z_max = density_cutoff(a);
        for &p in &[0.5, 1.0, 2.0, 5.0] {
            let lhs = integrate_interval(
                |z| (-p * z).exp() * ml_density(a, z, &series).value,
                0.0,
                z_max,
                quad,
            )
            .unwrap();
            let rhs = ml_generalized(MLParams::new(a, 1.0).unwrap(), p, &series).value;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Check { name: "Laplace property of f_a", observed: worst, tolerance: 1e-8 }
}

fn verify_half_order() -> Vec<Check> {
    let series = SeriesConfig::default();
    let mut worst_density = 0.0_f64;
    for i in 0..=60 {
        let z = 0.1 * i as f64;
        let want = (-z * z / 4.0).exp() / SQRT_PI;
        worst_density = worst_density.max((ml_density(0.5, z, &series).value - want).abs());
    }
    let mut worst_ml = 0.0_f64;
    let half = MLParams::new(0.5, 1.0).unwrap();
    for i in 0..=40 {
        let z = 0.1 * i as f64;
        let want = (z * z).exp() * erfc(z);
        worst_ml = worst_ml.max((ml_generalized(half, z, &series).value - want).abs());
    }
    vec![
        Check { name: "f_(1/2) closed form", observed: worst_density, tolerance: 1e-10 },
        Check { name: "E_(1/2) closed form", observed: worst_ml, tolerance: 1e-9 },
    ]
}

fn verify_oracle(alpha: Option<f64>, quad: &QuadratureSpec) -> Check {
    let series = SeriesConfig::default();
    let mut worst = 0.0_f64;
    for &lambda in &[0.5, 1.0, 2.0] {
        let u = TimeFunction::new("exp decay", f64::MAX, move |t| (-lambda * t).exp());
        for a in filter_alphas(&[0.3, 0.5, 0.7, 0.9], alpha) {
            for &t in &[0.25, 1.0, 4.0] {
                let got = subordinate(&SubordinationRequest {
                    solution: &u,
                    alpha: a,
                    t,
                    quad: *quad,
                    form: Form::ScaledSolution,
                })
                .unwrap()
                .value;
                let want =
                    ml_generalized(MLParams::new(a, 1.0).unwrap(), lambda * t.powf(a), &series)
                        .value;
                worst = worst.max((got - want).abs());
            }
        }
    }
    Check { name: "scalar evolution oracle", observed: worst, tolerance: 1e-7 }
}

fn verify_lemmas(alpha: Option<f64>, quad: &QuadratureSpec) -> Vec<Check> {
    let mut worst1 = 0.0_f64;
    let mut worst2 = 0.0_f64;
    for a in filter_alphas(&[0.5, 0.7], alpha) {
        let u = TimeFunction::new("exp decay", f64::MAX, |t| (-t).exp());
        let u_alpha = TimeFunction::new("ML decay", f64::MAX, move |t| {
            ml_generalized(MLParams::new(a, 1.0).unwrap(), t.powf(a), &SeriesConfig::default())
                .value
        });
        worst1 = worst1.max(check_lemma1(&u, &u_alpha, a, &[1.0, 2.0], quad).unwrap());
        let s_grid = default_s_grid(a);
        worst2 = worst2.max(check_lemma2(&u, &u_alpha, a, &s_grid, quad).unwrap());
    }
    vec![
        Check { name: "Lemma 1 (Laplace identity)", observed: worst1, tolerance: 1e-6 },
        Check { name: "Lemma 2 (Mellin identity)", observed: worst2, tolerance: 1e-5 },
    ]
}

fn verify_mellin(alpha: Option<f64>, quad: &QuadratureSpec) -> Check {
    let mut worst = 0.0_f64;
    for a in filter_alphas(&[0.5, 0.7], alpha) {
        for &r in &[0.5, 1.0, 2.0] {
            for &s in &[0.1, 0.2, 0.3] {
                if s >= 0.5 * a {
                    continue;
                }
                let closed = frac_kernel_mellin_closed(r, s, 1, a).unwrap();
                let numeric = frac_kernel_mellin_numeric(r, s, 1, a, quad).unwrap();
                worst = worst.max((numeric / closed - 1.0).abs());
            }
        }
    }
    Check { name: "diffusion Mellin cross-check (relative)", observed: worst, tolerance: 1e-4 }
}

fn verify_mass(alpha: Option<f64>, quad: &QuadratureSpec) -> Check {
    let mut worst = 0.0_f64;
    for &t in &[1.0, 2.0] {
        for a in filter_alphas(&[0.5, 0.7], alpha) {
            let mass = mass_check(t, 1, a, quad).unwrap();
            worst = worst.max((mass - 1.0).abs());
        }
    }
    Check { name: "kernel mass conservation", observed: worst, tolerance: 1e-6 }
}

fn bs_reference(s: f64, e: f64, r: f64, sigma: f64, ttm: f64) -> f64 {
    let sv = sigma * ttm.sqrt();
    let d1 = ((s / e).ln() + (r + 0.5 * sigma * sigma) * ttm) / sv;
    let d2 = d1 - sv;
    s * norm_cdf(d1) - e * (-r * ttm).exp() * norm_cdf(d2)
}

fn verify_bs(quad: &QuadratureSpec) -> Vec<Check> {
    let mut worst_param = 0.0_f64;
    for &sigma in &[0.1, 0.2, 0.4] {
        for &r in &[0.0, 0.02, 0.08] {
            for &ttm in &[0.25, 1.0, 2.0] {
                let o = OptionSpec { spot: 105.0, strike: 100.0, rate: r, sigma, expiry: ttm };
                let c = to_transformed(&o, 0.0);
                let got = bs_price(105.0, 100.0, &c);
                worst_param =
                    worst_param.max((got - bs_reference(105.0, 100.0, r, sigma, ttm)).abs());
            }
        }
    }
    let taus = [0.05, 0.1];
    let frac = frac_bs_residual(120.0, 100.0, 0.5, &taus, 1.0, quad).unwrap();
    let classical = frac_bs_residual(120.0, 100.0, 1.0, &taus, 1.0, quad).unwrap();
    vec![
        Check { name: "BS parameterization consistency", observed: worst_param, tolerance: 1e-10 },
        Check {
            name: "fractional BS residual (alpha = 0.5)",
            observed: frac.max_residual,
            tolerance: 1e-3,
        },
        Check {
            name: "classical BS residual (alpha = 1)",
            observed: classical.max_residual,
            tolerance: 1e-5,
        },
    ]
}

fn verify_dirac(quad: &QuadratureSpec) -> Check {
    let u = TimeFunction::new("exp decay", f64::MAX, |t| (-t).exp());
    let mut exact = true;
    for &t in &[0.25, 1.0, 2.0] {
        let got = subordinate(&SubordinationRequest {
            solution: &u,
            alpha: 1.0,
            t,
            quad: *quad,
            form: Form::ScaledSolution,
        })
        .unwrap()
        .value;
        exact &= got == (-t).exp();
    }
    for &(r, t) in &[(0.5, 1.0), (1.0, 2.0)] {
        let q = KernelQuery { r, t, n: 1, alpha: 1.0 };
        exact &= frac_heat_kernel(&q, quad).unwrap().value == heat_kernel(&q);
    }
    let coords = TransformedCoords { tau: 0.02, lambda0: 1.0 };
    exact &= frac_bs_price(100.0, 90.0, 1.0, 0.02, 1.0, quad).unwrap().value
        == bs_price(100.0, 90.0, &coords);
    Check {
        name: "Dirac branch bit-exact",
        observed: if exact { 0.0 } else { 1.0 },
        tolerance: 0.0,
    }
}

fn run_verify(a: &VerifyArgs) -> Result<(), CliError> {
    let cfg = load_config(a.common.config.as_deref())?;
    let suite = match &a.suite {
        Some(s) => s.clone(),
        None => cfg_str(&cfg, "suite")?.unwrap_or_else(|| "all".to_owned()),
    };
    let alpha = match a.alpha {
        Some(v) => Some(v),
        None => cfg_f64(&cfg, "alpha")?,
    };
    if let Some(v) = alpha {
        if !(v > 0.0 && v < 1.0) {
            return Err(args_err("--alpha for verify must lie in (0, 1)"));
        }
    }
    let quad = QuadratureSpec::default();
    let mut checks: Vec<Check> = Vec::new();
    let known = [
        "all", "normalization", "laplace", "halforder", "oracle", "lemmas", "mellin", "mass",
        "bs", "dirac",
    ];
    if !known.contains(&suite.as_str()) {
        return Err(args_err(format!(
            "unknown suite {suite:?}; expected one of {}",
            known.join(", ")
        )));
    }
    let all = suite == "all";
    if all || suite == "normalization" {
        checks.push(verify_normalization(alpha, &quad));
    }
    if all || suite == "laplace" {
        checks.push(verify_laplace(alpha, &quad));
    }
    if all || suite == "halforder" {
        checks.extend(verify_half_order());
    }
    if all || suite == "oracle" {
        checks.push(verify_oracle(alpha, &quad));
    }
    if all || suite == "lemmas" {
        checks.extend(verify_lemmas(alpha, &quad));
    }
    if all || suite == "mellin" {
        checks.push(verify_mellin(alpha, &quad));
    }
    if all || suite == "mass" {
        checks.push(verify_mass(alpha, &quad));
    }
    if all || suite == "bs" {
        checks.extend(verify_bs(&quad));
    }
    if all || suite == "dirac" {
        checks.push(verify_dirac(&quad));
    }
    let pass = checks.iter().all(Check::pass);
    let doc = json!({
        "tool": "fracevo",
        "command": "verify",
        "version": VERSION,
        "suite": suite,
        "settings": Table::settings_comment(),
        "checks": checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "observed": c.observed,
                    "tolerance": c.tolerance,
                    "pass": c.pass(),
                })
            })
            .collect::<Vec<Value>>(),
        "pass": pass,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
    text.push('\n');
    write_artifact(&text, resolve_out(a.common.out.as_deref(), &cfg)?.as_deref())?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Numerical("one or more verification checks failed".to_owned()))
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::MlEval(a) => run_ml_eval(a),
        Command::Density(a) => run_density(a),
        Command::Subordinate(a) => run_subordinate(a),
        Command::Diffusion(a) => run_diffusion(a),
        Command::BsPrice(a) => run_bs_price(a),
        Command::Verify(a) => run_verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = json!({ "error": e.message(), "exit_code": e.code() });
            eprintln!("{record}");
            ExitCode::from(e.code())
        }
    }
}
