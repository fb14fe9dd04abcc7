//! Batch driver behind the `fracspec` binary.
//!
//! Configuration is a flat TOML table; every key is optional except where a
//! command needs it, and unknown keys are rejected:
//!
//! ```toml
//! alpha = 1.5            # in (1, 2)
//! r = 0.5                # in [0, 1]
//! model = "rlc"          # rlc | rl
//! bc = "dirichlet"       # dirichlet | mixed | neumann | rl_weighted_dirichlet | rl_mixed
//! bc_a = 0.0             # datum at x = 0
//! bc_b = 0.0             # datum at x = 1
//! rhs = "one"            # zero | one | x_one_minus_x | runge | exp | sin_pi | log_series | poly | jacobi
//! rhs_coeffs = []        # power-basis (poly) or projection (jacobi) coefficients
//! n = 32                 # truncation degree
//! grid_points = 101      # rows of solution.csv
//! pin_constant = "zero"  # zero | mean_zero
//! compat_tol = 1e-10
//! quadrature_order = 64  # projection rule size (at least n + 10 is used)
//! verify_alphas = [1.2, 1.5, 1.8]
//! verify_rs = [0.0, 0.3, 0.5, 0.7, 1.0]
//! verify_n_max = 8
//! verify_fault = 1e-3    # optional c** offset on the closed-form side
//! shift_j = 1
//! probe = false
//! probe_variants = ["as_printed", "norm_convergent"]
//! probe_max_log2 = 20
//! ```
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 ill-posed or
//! incompatible data (and failed verification rows).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::diagnostics::{
    decay_rate, ill_posedness_probe_to, interior_points, residual_certificate, shift_check,
    ProbeVariant, PROBE_MIN_LOG2, PROBE_TAIL_LOG2,
};
use crate::error::Error;
use crate::operators::{Model, OracleConfig};
use crate::params::FractionalModelParams;
use crate::solver::{
    classify, project_rhs, solve, BoundaryCondition, GaugePin, RhsSpec, SolveOptions,
    SpectralSolution,
};
use crate::special::gamma_ratio;
use crate::verify::{run_identity_suite, VerifyConfig};

/// Environment variable overriding the oracle's quadrature order cap.
pub const MAX_QUAD_ORDER_ENV: &str = "FRACSPEC_MAX_QUAD_ORDER";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_ILL_POSED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "fracspec",
    version,
    about = "Spectral solver for two-sided fractional diffusion problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct CommonArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory receiving the output files.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one boundary value problem; writes solution.csv, coefficients.csv, report.json.
    Solve(CommonArgs),
    /// Certify the operator identities on a parameter grid; writes verify.csv, report.json.
    Verify(CommonArgs),
    /// Tabulate the ladder constants; writes spectrum.csv, report.json.
    Spectrum(CommonArgs),
    /// Decay, shift and residual diagnostics, plus the optional divergence probe.
    Diagnose(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModelName {
    #[default]
    Rlc,
    Rl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BcName {
    #[default]
    Dirichlet,
    Mixed,
    Neumann,
    RlWeightedDirichlet,
    RlMixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RhsName {
    Zero,
    #[default]
    One,
    XOneMinusX,
    Runge,
    Exp,
    SinPi,
    LogSeries,
    Poly,
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PinName {
    #[default]
    Zero,
    MeanZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeName {
    AsPrinted,
    NormConvergent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub alpha: f64,
    pub r: f64,
    pub model: ModelName,
    pub bc: BcName,
    pub bc_a: f64,
    pub bc_b: f64,
    pub rhs: RhsName,
    pub rhs_coeffs: Vec<f64>,
    pub n: usize,
    pub grid_points: usize,
    pub pin_constant: PinName,
    pub compat_tol: f64,
    pub quadrature_order: Option<usize>,
    pub verify_alphas: Vec<f64>,
    pub verify_rs: Vec<f64>,
    pub verify_n_max: usize,
    pub verify_fault: Option<f64>,
    pub shift_j: usize,
    pub probe: bool,
    pub probe_variants: Vec<ProbeName>,
    pub probe_max_log2: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        let v = VerifyConfig::default();
        Self {
            alpha: 1.5,
            r: 0.5,
            model: ModelName::Rlc,
            bc: BcName::Dirichlet,
            bc_a: 0.0,
            bc_b: 0.0,
            rhs: RhsName::One,
            rhs_coeffs: Vec::new(),
            n: 32,
            grid_points: 101,
            pin_constant: PinName::Zero,
            compat_tol: SolveOptions::default().compat_factor,
            quadrature_order: None,
            verify_alphas: v.alphas,
            verify_rs: v.rs,
            verify_n_max: v.n_max,
            verify_fault: None,
            shift_j: 1,
            probe: false,
            probe_variants: vec![ProbeName::AsPrinted, ProbeName::NormConvergent],
            probe_max_log2: 20,
        }
    }
}

fn key_error(key: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("key `{key}`: {msg}"))
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, Error> {
        let cfg: RunConfig = toml::from_str(text)
            .map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), Error> {
        let alpha_ok = |a: f64| a > 1.0 && a < 2.0;
        let r_ok = |r: f64| (0.0..=1.0).contains(&r);
        if !alpha_ok(self.alpha) {
            return Err(key_error(
                "alpha",
                format!("must lie in (1, 2), got {}", self.alpha),
            ));
        }
        if !r_ok(self.r) {
            return Err(key_error(
                "r",
                format!("must lie in [0, 1], got {}", self.r),
            ));
        }
        if self.n == 0 || self.n > 100_000 {
            return Err(key_error(
                "n",
                format!("must lie in 1..=100000, got {}", self.n),
            ));
        }
        if self.grid_points < 2 {
            return Err(key_error("grid_points", "need at least 2 points"));
        }
        if !(self.compat_tol > 0.0 && self.compat_tol.is_finite()) {
            return Err(key_error("compat_tol", "must be positive"));
        }
        if matches!(self.rhs, RhsName::Poly | RhsName::Jacobi) && self.rhs_coeffs.is_empty() {
            return Err(key_error(
                "rhs_coeffs",
                "required when rhs is `poly` or `jacobi`",
            ));
        }
        if self.rhs_coeffs.iter().any(|c| !c.is_finite()) {
            return Err(key_error("rhs_coeffs", "entries must be finite"));
        }
        if !self.bc_a.is_finite() || !self.bc_b.is_finite() {
            return Err(key_error("bc_a", "boundary data must be finite"));
        }
        if let Some(q) = self.quadrature_order {
            if q == 0 {
                return Err(key_error("quadrature_order", "must be positive"));
            }
        }
        if self.verify_alphas.iter().any(|&a| !alpha_ok(a)) {
            return Err(key_error("verify_alphas", "every entry must lie in (1, 2)"));
        }
        if self.verify_rs.iter().any(|&r| !r_ok(r)) {
            return Err(key_error("verify_rs", "every entry must lie in [0, 1]"));
        }
        if self.shift_j == 0 || self.shift_j >= self.n {
            return Err(key_error("shift_j", format!("must lie in 1..{}", self.n)));
        }
        if !(PROBE_TAIL_LOG2..=26).contains(&self.probe_max_log2) {
            return Err(key_error(
                "probe_max_log2",
                format!("must lie in {PROBE_TAIL_LOG2}..=26"),
            ));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<FractionalModelParams, Error> {
        FractionalModelParams::new(self.alpha, self.r)
    }

    pub fn model(&self) -> Model {
        match self.model {
            ModelName::Rlc => Model::Rlc,
            ModelName::Rl => Model::Rl,
        }
    }

    pub fn boundary_condition(&self) -> BoundaryCondition {
        let (a, b) = (self.bc_a, self.bc_b);
        match self.bc {
            BcName::Dirichlet => BoundaryCondition::Dirichlet { a, b },
            BcName::Mixed => BoundaryCondition::MixedFluxDirichlet { a, b },
            BcName::Neumann => BoundaryCondition::Neumann { a, b },
            BcName::RlWeightedDirichlet => BoundaryCondition::RlWeightedDirichlet { a, b },
            BcName::RlMixed => BoundaryCondition::RlMixed { a, b },
        }
    }

    pub fn rhs_spec(&self) -> RhsSpec {
        match self.rhs {
            RhsName::Zero => RhsSpec::Constant(0.0),
            RhsName::One => RhsSpec::Constant(1.0),
            RhsName::XOneMinusX => RhsSpec::Polynomial(vec![0.0, 1.0, -1.0]),
            RhsName::Runge => RhsSpec::callable(|x: f64| 1.0 / (1.0 + 16.0 * (x - 0.5).powi(2))),
            RhsName::Exp => RhsSpec::callable(f64::exp),
            RhsName::SinPi => RhsSpec::callable(|x: f64| (std::f64::consts::PI * x).sin()),
            RhsName::LogSeries => RhsSpec::LogSeries,
            RhsName::Poly => RhsSpec::Polynomial(self.rhs_coeffs.clone()),
            RhsName::Jacobi => RhsSpec::JacobiCoeffs(self.rhs_coeffs.clone()),
        }
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            n: self.n,
            quadrature_order: self.quadrature_order,
            pin: match self.pin_constant {
                PinName::Zero => GaugePin::Zero,
                PinName::MeanZero => GaugePin::MeanZero,
            },
            compat_factor: self.compat_tol,
        }
    }
}

/// Oracle settings with the cap taken from [`MAX_QUAD_ORDER_ENV`] when set.
pub fn oracle_config_from_env() -> Result<OracleConfig, Error> {
    let base = OracleConfig::default();
    match std::env::var(MAX_QUAD_ORDER_ENV) {
        Ok(v) => {
            let cap: usize = v.trim().parse().map_err(|_| {
                Error::Config(format!(
                    "{MAX_QUAD_ORDER_ENV} must be a positive integer, got `{v}`"
                ))
            })?;
            if cap < 2 {
                return Err(Error::Config(format!(
                    "{MAX_QUAD_ORDER_ENV} must be at least 2"
                )));
            }
            Ok(OracleConfig {
                initial_order: base.initial_order.min(cap),
                max_order: cap,
                ..base
            })
        }
        Err(_) => Ok(base),
    }
}

/// Full-precision, locale-independent number formatting for CSV cells.
pub fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.16e}")
    }
}

fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(fmt_num(v))
    }
}

fn write_file(dir: &Path, name: &str, content: &str) -> Result<(), Error> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), content)?;
    Ok(())
}

fn write_report(dir: &Path, report: &Value) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    write_file(dir, "report.json", &text)
}

fn params_json(p: &FractionalModelParams) -> Value {
    json!({
        "alpha": p.alpha(),
        "r": p.r(),
        "beta": p.beta(),
        "c_star_star": p.c_star_star(),
        "lambda_0": p.lambda(0),
        "sigma_0": p.sigma(0),
        "mu_minus_one": p.mu_minus_one(),
    })
}

/// Parse `args` (program name first) and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Solve(a) => load(a, true).and_then(|cfg| cmd_solve(&cfg, &a.out_dir)),
        Command::Verify(a) => load(a, false).and_then(|cfg| cmd_verify(&cfg, &a.out_dir)),
        Command::Spectrum(a) => load(a, false).and_then(|cfg| cmd_spectrum(&cfg, &a.out_dir)),
        Command::Diagnose(a) => load(a, true).and_then(|cfg| cmd_diagnose(&cfg, &a.out_dir)),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

fn load(args: &CommonArgs, required: bool) -> Result<RunConfig, Error> {
    match &args.config {
        Some(p) => RunConfig::load(p),
        None if required => Err(Error::Config(
            "--config <path> is required for this command".into(),
        )),
        None => Ok(RunConfig::default()),
    }
}

/// Solve the configured problem and write its files. Ill-posed or incompatible
/// problems still produce `report.json` and return [`EXIT_ILL_POSED`].
pub fn cmd_solve(cfg: &RunConfig, out_dir: &Path) -> Result<i32, Error> {
    let params = cfg.params()?;
    let model = cfg.model();
    let bc = cfg.boundary_condition();
    let mut report = json!({
        "command": "solve",
        "config": cfg,
        "params": params_json(&params),
        "model": model.name(),
        "bc": bc.name(),
    });
    let classified = classify(model, &bc, &params);
    match &classified {
        Ok(rep) => {
            report["well_posedness"] = json!({ "status": rep.status.name(), "rule": rep.rule });
        }
        Err(e @ Error::IncompatibleBoundary { .. }) => {
            report["well_posedness"] =
                json!({ "status": "IncompatibleBoundary", "rule": e.to_string() });
            report["error"] = json!(e.to_string());
            write_report(out_dir, &report)?;
            eprintln!("{e}");
            return Ok(EXIT_ILL_POSED);
        }
        Err(e) => return Err(e.clone()),
    }
    let rhs = cfg.rhs_spec();
    match solve(&params, model, &bc, &rhs, &cfg.solve_options()) {
        Ok((sol, _)) => {
            fill_solution_report(&mut report, &sol);
            write_file(
                out_dir,
                "solution.csv",
                &solution_csv(&sol, cfg.grid_points)?,
            )?;
            write_file(out_dir, "coefficients.csv", &coefficients_csv(&sol))?;
            write_report(out_dir, &report)?;
            println!(
                "solved: {} {} alpha={} r={} N={} tail ratio {:.3e}",
                model.name(),
                bc.name(),
                cfg.alpha,
                cfg.r,
                cfg.n,
                sol.tail_ratio()
            );
            Ok(EXIT_OK)
        }
        Err(
            e @ (Error::IllPosed { .. }
            | Error::Compatibility { .. }
            | Error::SeriesDivergence { .. }),
        ) => {
            if let Error::Compatibility {
                residual,
                tolerance,
            } = &e
            {
                report["compatibility_residual"] = num(*residual);
                report["compatibility_tolerance"] = num(*tolerance);
            }
            report["error"] = json!(e.to_string());
            write_report(out_dir, &report)?;
            eprintln!("{e}");
            Ok(EXIT_ILL_POSED)
        }
        Err(e) => Err(e),
    }
}

fn fill_solution_report(report: &mut Value, sol: &SpectralSolution) {
    let p = sol.params();
    let singular: Vec<Value> = sol
        .singular_terms()
        .iter()
        .map(|t| {
            let (ea, eb) = t.kind.exponents(p);
            json!({ "amplitude": num(t.amplitude), "exponent_one_minus_x": ea, "exponent_x": eb })
        })
        .collect();
    let (k0, k1) = sol.kernel_amplitudes();
    report["n"] = json!(sol.coeffs().len() - 1);
    report["compatibility_residual"] = sol.compatibility_residual().map_or(Value::Null, num);
    report["tail_ratio"] = num(sol.tail_ratio());
    report["rhs_integral"] = num(sol.rhs_integral());
    report["kernel_amplitudes"] = json!({ "k0": num(k0), "k1": num(k1) });
    report["singular_terms"] = Value::Array(singular);
    report["additive_constant"] = num(sol.additive_constant());
    report["free_direction"] = match sol.free_direction() {
        Some(d) => json!(format!("{d:?}")),
        None => Value::Null,
    };
}

fn solution_csv(sol: &SpectralSolution, points: usize) -> Result<String, Error> {
    let mut out = String::from("x,u,flux\n");
    for k in 0..points {
        let x = k as f64 / (points - 1) as f64;
        let u = sol.evaluate(x)?;
        let f = sol.evaluate_flux(x)?;
        let _ = writeln!(out, "{},{},{}", fmt_num(x), fmt_num(u), fmt_num(f));
    }
    Ok(out)
}

fn coefficients_csv(sol: &SpectralSolution) -> String {
    let mut out = String::from("i,f_i,c_i\n");
    for (i, (f, c)) in sol.rhs().coeffs().iter().zip(sol.coeffs()).enumerate() {
        let _ = writeln!(out, "{i},{},{}", fmt_num(*f), fmt_num(*c));
    }
    out
}

/// Run the identity grid; exit 0 iff every row passes.
pub fn cmd_verify(cfg: &RunConfig, out_dir: &Path) -> Result<i32, Error> {
    let oracle = oracle_config_from_env()?;
    let vcfg = VerifyConfig {
        alphas: cfg.verify_alphas.clone(),
        rs: cfg.verify_rs.clone(),
        n_max: cfg.verify_n_max,
        c_star_fault: cfg.verify_fault,
        max_quad_order: oracle.max_order,
    };
    let rows = run_identity_suite(&vcfg)?;
    let mut csv = String::from("identity,alpha,r,n,max_error,tolerance,pass\n");
    for row in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            row.identity.name(),
            fmt_num(row.alpha),
            fmt_num(row.r),
            row.n,
            fmt_num(row.max_error),
            fmt_num(row.tolerance),
            row.pass
        );
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    write_file(out_dir, "verify.csv", &csv)?;
    write_report(
        out_dir,
        &json!({
            "command": "verify",
            "config": cfg,
            "max_quad_order": oracle.max_order,
            "rows": rows.len(),
            "failed": failed,
            "all_pass": failed == 0,
        }),
    )?;
    println!("verify: {} rows, {} failed", rows.len(), failed);
    Ok(if failed == 0 { EXIT_OK } else { EXIT_ILL_POSED })
}

/// Ladder table with the cross-ladder identity residuals.
pub fn cmd_spectrum(cfg: &RunConfig, out_dir: &Path) -> Result<i32, Error> {
    let p = cfg.params()?;
    let a = p.alpha();
    let mut csv = String::from("i,lambda,mu,sigma,kappa,lambda_mu_residual,kappa_sigma_residual\n");
    let mut table = format!(
        "alpha = {a}, r = {}, beta = {}, c** = {}\nlambda_0 = {:.10}, sigma_0 = {:.10}, mu_-1 = {:.10}\n",
        p.r(),
        p.beta(),
        p.c_star_star(),
        p.lambda(0),
        p.sigma(0),
        p.mu_minus_one()
    );
    let _ = writeln!(
        table,
        "{:>5} {:>16} {:>16} {:>16} {:>16} {:>10} {:>10}",
        "i", "lambda", "mu", "sigma", "kappa", "res_lm", "res_ks"
    );
    for i in 0..=cfg.n {
        let fi = i as f64;
        let (l, m, s, k) = (p.lambda(i), p.mu(i), p.sigma(i), p.kappa(i));
        let res_lm = (l + m * (fi + a)).abs() / l.abs().max(1.0);
        let res_ks = (k + s * gamma_ratio(fi + a + 1.0, fi + a - 1.0)).abs() / k.abs().max(1.0);
        let _ = writeln!(
            csv,
            "{i},{},{},{},{},{},{}",
            fmt_num(l),
            fmt_num(m),
            fmt_num(s),
            fmt_num(k),
            fmt_num(res_lm),
            fmt_num(res_ks)
        );
        let _ = writeln!(
            table,
            "{i:>5} {l:>16.9e} {m:>16.9e} {s:>16.9e} {k:>16.9e} {res_lm:>10.2e} {res_ks:>10.2e}"
        );
    }
    // a closed pipe on stdout is not an error for a table
    let _ = std::io::stdout().write_all(table.as_bytes());
    write_file(out_dir, "spectrum.csv", &csv)?;
    write_report(
        out_dir,
        &json!({ "command": "spectrum", "config": cfg, "params": params_json(&p) }),
    )?;
    Ok(EXIT_OK)
}

/// Decay fits, shift check, residual certificate and the optional probe.
pub fn cmd_diagnose(cfg: &RunConfig, out_dir: &Path) -> Result<i32, Error> {
    let p = cfg.params()?;
    let oracle = oracle_config_from_env()?;
    let rhs = cfg.rhs_spec();
    let n = cfg.n;
    let spectral = project_rhs(&p, &rhs, n, cfg.quadrature_order)?;
    let coeffs = crate::solver::solve_regular(&spectral);
    let mut report = json!({ "command": "diagnose", "config": cfg, "params": params_json(&p) });

    let windows = [(n / 4, n / 2), (n / 2, n)];
    report["decay"] = Value::Array(
        windows
            .iter()
            .map(|&(lo, hi)| match decay_rate(&coeffs, lo, hi) {
                Ok(d) => json!({
                    "window": [lo, hi], "rate": num(d.rate), "fit_residual": num(d.residual),
                    "points": d.points, "tail_ratio": num(d.tail_ratio),
                }),
                Err(e) => json!({ "window": [lo, hi], "error": e.to_string() }),
            })
            .collect(),
    );

    report["shift"] = match shift_check(&p, &rhs, cfg.shift_j, n, None) {
        Ok(s) => json!({
            "j": s.j, "window": [s.window.0, s.window.1],
            "solution_tail": num(s.solution_tail), "rhs_tail": num(s.rhs_tail),
            "ratio": s.ratio.map_or(Value::Null, num), "bound": num(s.bound),
            "bounded": s.bounded, "inconclusive": s.inconclusive,
        }),
        Err(e) => json!({ "error": e.to_string() }),
    };

    let model = cfg.model();
    let bc = cfg.boundary_condition();
    report["residual"] = match classify(model, &bc, &p) {
        Ok(rep) if rep.status.is_solvable() => {
            match solve(&p, model, &bc, &rhs, &cfg.solve_options()) {
                Ok((sol, _)) => {
                    let f: Box<dyn Fn(f64) -> f64> = match rhs.pointwise() {
                        Some(f) => Box::new(move |x| f(x)),
                        None => {
                            let s = sol.rhs().series();
                            Box::new(move |x| s.eval(x))
                        }
                    };
                    match residual_certificate(&sol, &*f, &interior_points(9), &oracle) {
                        Ok(r) => json!({ "max_residual": num(r), "points": 9 }),
                        Err(e) => json!({ "error": e.to_string() }),
                    }
                }
                Err(e) => json!({ "error": e.to_string() }),
            }
        }
        Ok(rep) => json!({ "skipped": rep.status.name(), "rule": rep.rule }),
        Err(e) => json!({ "error": e.to_string() }),
    };

    if cfg.probe {
        let variants: Vec<ProbeVariant> = cfg
            .probe_variants
            .iter()
            .map(|v| match v {
                ProbeName::AsPrinted => ProbeVariant::AsPrinted,
                ProbeName::NormConvergent => ProbeVariant::NormConvergent,
            })
            .collect();
        let reports: Vec<_> = variants
            .par_iter()
            .map(|&v| ill_posedness_probe_to(&p, v, cfg.probe_max_log2))
            .collect();
        let mut csv = String::from("variant,n,partial_sum,norm_sum\n");
        let mut summary = Vec::new();
        for rep in &reports {
            for ((n, s), q) in rep
                .truncations
                .iter()
                .zip(&rep.partial_sums)
                .zip(&rep.norm_sums)
            {
                let _ = writeln!(
                    csv,
                    "{},{n},{},{}",
                    rep.variant.name(),
                    fmt_num(*s),
                    fmt_num(*q)
                );
            }
            summary.push(json!({
                "variant": rep.variant.name(),
                "fit_intercept": num(rep.fit_intercept),
                "fit_slope_loglog": num(rep.fit_slope),
                "norm_tail_fraction": num(rep.norm_tail_fraction),
                "tail_from": 1usize << PROBE_TAIL_LOG2,
                "first_truncation": 1usize << PROBE_MIN_LOG2,
                "monotone_growth": rep.monotone_growth,
                "cauchy_converged": rep.cauchy_converged,
            }));
        }
        write_file(out_dir, "probe.csv", &csv)?;
        report["probe"] = Value::Array(summary);
    }

    write_report(out_dir, &report)?;
    println!(
        "diagnose: report written to {}",
        out_dir.join("report.json").display()
    );
    Ok(EXIT_OK)
}
