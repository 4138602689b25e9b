//! Batch front end. Parameters come from the built-in defaults, then `--config`, then
//! flags. Exit codes: 0 success, 2 validation failure, 3 numeric failure.

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::adiabatic::{sweep_with_threads, AdiabaticError, Channel, Insertion, Profile, ScalingFamily, TestData};
use crate::fock::{commutator_check, FockError, MomentumGrid, Statistics};
use crate::induction::{
    assemble_wick, assemble_words, build_aprime_rprime, symbolic_splits, wick_step_two, InductionError,
    MAX_SYMBOLIC_ORDER,
};
use crate::qed::{Normalization, OnShellCheck, QedError, SelfEnergy, VacuumPolarization};
use crate::quad::fit_line;
use crate::splitting::{ambiguity_dimension, split, LineDistribution, SplitError, SplitSpec, SubtractionPoint};
use crate::wick::{coeff, WickPolynomial};

pub const DEFAULTS_JSON: &str = include_str!("../config/defaults.json");

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "EGQFT_THREADS";

const MAX_GRID_MODES: usize = 10;
const MAX_CUTOFF: usize = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<SplitError> for CliError {
    fn from(e: SplitError) -> Self {
        match e {
            SplitError::Quadrature(_) => CliError::Numeric(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<QedError> for CliError {
    fn from(e: QedError) -> Self {
        match e {
            QedError::OnShellImpossible(msg) => CliError::Validation(format!(
                "on-shell normalization impossible: {msg}; without it the adiabatic limit does not exist"
            )),
            QedError::Invalid(_) => CliError::Validation(e.to_string()),
            QedError::Split(s) => s.into(),
        }
    }
}

impl From<AdiabaticError> for CliError {
    fn from(e: AdiabaticError) -> Self {
        match e {
            AdiabaticError::Qed(q) => q.into(),
            AdiabaticError::Split(s) => s.into(),
            AdiabaticError::InvalidSchedule(_) | AdiabaticError::Invalid(_) | AdiabaticError::Unsupported(_) => {
                CliError::Validation(e.to_string())
            }
            AdiabaticError::Fock(_) => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<FockError> for CliError {
    fn from(e: FockError) -> Self {
        match e {
            FockError::InvalidGrid(_) | FockError::DimensionMismatch(_) | FockError::InvalidMode { .. } => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<InductionError> for CliError {
    fn from(e: InductionError) -> Self {
        match e {
            InductionError::OrderTooLarge { .. } | InductionError::Invalid(_) => CliError::Validation(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

/// Parameter block shared by all commands; every field is optional at each layer.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Version of the defaults file (informational)
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub version: Option<u32>,
    /// Electron mass [default: 1.0]
    #[arg(long)]
    pub m: Option<f64>,
    /// Photon mass regulator for the self energy [default: 0.1]
    #[arg(long)]
    pub mu: Option<f64>,
    /// `on-shell` or `custom` [default: on-shell; custom if any --cN is given]
    #[arg(long)]
    pub normalization: Option<String>,
    /// Normalization constant of order 0
    #[arg(long)]
    pub c0: Option<f64>,
    /// Normalization constant of order 1
    #[arg(long)]
    pub c1: Option<f64>,
    /// Normalization constant of order 2
    #[arg(long)]
    pub c2: Option<f64>,
    /// Largest scaling parameter [default: 2^-3]
    #[arg(long)]
    pub eps_start: Option<f64>,
    /// Smallest scaling parameter [default: 2^-14]
    #[arg(long)]
    pub eps_stop: Option<f64>,
    /// Number of geometric steps [default: 12]
    #[arg(long)]
    pub eps_steps: Option<usize>,
    /// Perturbative order for wick-expand [default: 2, at most 5]
    #[arg(long)]
    pub order: Option<usize>,
    /// Momentum modes for fock-check [default: 6]
    #[arg(long)]
    pub grid_modes: Option<usize>,
    /// Particle cutoff for fock-check [default: 3]
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Toy distribution for split: sign_exp, smooth_cubic, quartic [default: sign_exp]
    #[arg(long)]
    pub toy: Option<String>,
    /// Lower end of the sampling grid for split [default: -5]
    #[arg(long)]
    pub x_min: Option<f64>,
    /// Upper end of the sampling grid for split [default: 5]
    #[arg(long)]
    pub x_max: Option<f64>,
    /// Number of grid points for split and the Green functions [default: 40]
    #[arg(long)]
    pub points: Option<usize>,
    /// Lower end of the p^2 grid [default: -2]
    #[arg(long)]
    pub p2_min: Option<f64>,
    /// Upper end of the p^2 grid [default: 6]
    #[arg(long)]
    pub p2_max: Option<f64>,
    /// sigma_into_psi, pi_into_a or pi_into_current [default: sigma_into_psi]
    #[arg(long)]
    pub channel: Option<String>,
    /// Switching profile: gaussian, modulated, hermite [default: gaussian]
    #[arg(long)]
    pub profile: Option<String>,
    /// Pass/fail tolerance of the on-shell report [default: 1e-8]
    #[arg(long)]
    pub tolerance: Option<f64>,
}

impl RunConfig {
    /// Field-wise `other` over `self`.
    pub fn overlay(&self, other: &RunConfig) -> RunConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RunConfig { $($f: other.$f.clone().or_else(|| self.$f.clone())),* } };
        }
        pick!(
            version,
            m,
            mu,
            normalization,
            c0,
            c1,
            c2,
            eps_start,
            eps_stop,
            eps_steps,
            order,
            grid_modes,
            cutoff,
            toy,
            x_min,
            x_max,
            points,
            p2_min,
            p2_max,
            channel,
            profile,
            tolerance
        )
    }

    pub fn defaults() -> RunConfig {
        serde_json::from_str(DEFAULTS_JSON).expect("built-in defaults parse")
    }

    fn constants(&self) -> Vec<Option<f64>> {
        vec![self.c0, self.c1, self.c2]
    }

    fn custom(&self) -> Result<bool, CliError> {
        match self.normalization.as_deref() {
            Some("custom") => Ok(true),
            Some("on-shell") | None => Ok(false),
            Some(other) => Err(CliError::Validation(format!("unknown normalization {other}"))),
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return Err(CliError::Validation(format!("tolerance must be positive, got {t}")));
            }
        }
        if let (Some(a), Some(b)) = (self.x_min, self.x_max) {
            if !(a < b) {
                return Err(CliError::Validation("x_min must be below x_max".into()));
            }
        }
        if let (Some(a), Some(b)) = (self.p2_min, self.p2_max) {
            if !(a < b) {
                return Err(CliError::Validation("p2_min must be below p2_max".into()));
            }
        }
        if self.points.is_some_and(|p| p < 2) {
            return Err(CliError::Validation("points must be at least 2".into()));
        }
        Ok(())
    }

    fn get<T: Clone>(v: &Option<T>, name: &str) -> Result<T, CliError> {
        v.clone().ok_or_else(|| CliError::Validation(format!("missing parameter {name}")))
    }
}

#[derive(Debug, Parser)]
#[command(name = "egqft", version, about = "Causal perturbation theory batch runs")]
pub struct Cli {
    /// JSON file with parameters (same names as the flags)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split a toy distribution into retarded and advanced parts
    Split(RunConfig),
    /// Second-order vacuum polarization on a p^2 grid with its on-shell report
    VacuumPol(RunConfig),
    /// Second-order electron self energy on a p^2 grid with its on-shell report
    SelfEnergy(RunConfig),
    /// Smeared second-order contribution along g(eps x) with a convergence verdict
    AdiabaticSweep(RunConfig),
    /// CCR/CAR deviation of the truncated Fock grid
    FockCheck(RunConfig),
    /// Canonical term multiset of S_n
    WickExpand(RunConfig),
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(warnings) => {
            for w in warnings {
                eprintln!("warning: {w}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load_config(cli: &Cli, flags: &RunConfig) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::defaults();
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        let file: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("bad config {}: {e}", path.display())))?;
        cfg = cfg.overlay(&file);
    }
    cfg = cfg.overlay(flags);
    cfg.validate()?;
    Ok(cfg)
}

/// Runs the parsed command; returns the warnings emitted.
pub fn execute(cli: &Cli) -> Result<Vec<String>, CliError> {
    let (flags, name) = match &cli.command {
        Command::Split(c) => (c, "split"),
        Command::VacuumPol(c) => (c, "vacuum_pol"),
        Command::SelfEnergy(c) => (c, "self_energy"),
        Command::AdiabaticSweep(c) => (c, "sweep"),
        Command::FockCheck(c) => (c, "fock_check"),
        Command::WickExpand(c) => (c, "wick_expand"),
    };
    let cfg = load_config(cli, flags)?;
    fs::create_dir_all(&cli.out)
        .map_err(|e| CliError::Validation(format!("cannot create {}: {e}", cli.out.display())))?;
    let mut warnings = Vec::new();
    let out = match &cli.command {
        Command::Split(_) => cmd_split(&cfg, &mut warnings)?,
        Command::VacuumPol(_) => cmd_vacuum_pol(&cfg)?,
        Command::SelfEnergy(_) => cmd_self_energy(&cfg)?,
        Command::AdiabaticSweep(_) => cmd_sweep(&cfg)?,
        Command::FockCheck(_) => cmd_fock_check(&cfg)?,
        Command::WickExpand(_) => cmd_wick_expand(&cfg)?,
    };
    let stem = match &cli.command {
        Command::WickExpand(_) => format!("wick_order{}", cfg.order.unwrap_or(2)),
        _ => name.to_string(),
    };
    if let Some(csv) = &out.csv {
        write_file(&cli.out.join(format!("{stem}.csv")), csv)?;
    }
    let json = serde_json::to_string_pretty(&out.report).expect("report serializes") + "\n";
    write_file(&cli.out.join(format!("{stem}.json")), &json)?;
    // a closed pipe on stdout is not an error; the report is already on disk
    let _ = std::io::Write::write_all(&mut std::io::stdout(), json.as_bytes());
    Ok(warnings)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))
}

struct Output {
    csv: Option<String>,
    report: serde_json::Value,
}

/// 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_table(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| fmt_float(*v)).collect();
        let _ = writeln!(s, "{}", cells.join(","));
    }
    s
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn cplx(v: Complex64) -> serde_json::Value {
    serde_json::json!({ "re": v.re, "im": v.im })
}

fn cmd_split(cfg: &RunConfig, warnings: &mut Vec<String>) -> Result<Output, CliError> {
    let toy = RunConfig::get(&cfg.toy, "toy")?;
    let d = LineDistribution::toy(&toy).ok_or_else(|| CliError::Validation(format!("unknown toy {toy}")))?;
    let omega = d.omega;
    let needed = ambiguity_dimension(omega);
    let given: Vec<f64> = cfg.constants().into_iter().flatten().collect();
    let spec = if needed == 0 {
        if !given.is_empty() || cfg.custom()? {
            warnings.push(format!("constants ignored: omega = {omega} has a unique splitting"));
        }
        SplitSpec::unique(omega)
    } else {
        let cs = cfg.constants();
        if cs[..needed].iter().any(|c| c.is_none()) || cs[needed..].iter().any(|c| c.is_some()) {
            return Err(CliError::Validation(format!(
                "omega = {omega} needs exactly {needed} normalization constants (--c0 .. --c{})",
                needed - 1
            )));
        }
        SplitSpec::anchored(
            omega,
            SubtractionPoint::Zero,
            cs[..needed].iter().map(|c| Complex64::new(c.unwrap_or(0.0), 0.0)).collect(),
        )
    };
    let res = split(&d, &spec)?;
    let xs = grid(
        RunConfig::get(&cfg.x_min, "x_min")?,
        RunConfig::get(&cfg.x_max, "x_max")?,
        RunConfig::get(&cfg.points, "points")?,
    );
    let mut rows = Vec::new();
    let mut residual = 0.0f64;
    for (x, r, a) in res.sample(&xs)? {
        let dv = d.eval(x);
        residual = residual.max((r - a - dv).norm());
        rows.push(vec![x, dv.re, dv.im, r.re, r.im, a.re, a.im]);
    }
    // input order from the decay of |d| at large argument
    let lams: Vec<f64> = (0..12).map(|i| 10f64.powf(1.0 + 4.0 * i as f64 / 11.0)).collect();
    let (lx, ly): (Vec<f64>, Vec<f64>) = lams
        .iter()
        .filter_map(|&l| {
            let v = d.eval(l).norm();
            (v > 0.0).then(|| (l.ln(), v.ln()))
        })
        .unzip();
    let omega_estimate = fit_line(&lx, &ly).map(|f| f.slope);
    Ok(Output {
        csv: Some(csv_table(&["x", "d_re", "d_im", "ret_re", "ret_im", "adv_re", "adv_im"], &rows)),
        report: serde_json::json!({
            "command": "split",
            "toy": toy,
            "omega": omega,
            "omega_estimate": omega_estimate,
            "ambiguity_dimension": needed,
            "constants": spec.normalization.iter().map(|c| c.re).collect::<Vec<_>>(),
            "reconstruction_residual": residual,
        }),
    })
}

fn green_normalization(cfg: &RunConfig) -> Result<Normalization, CliError> {
    let given = cfg.c0.is_some() || cfg.c1.is_some();
    if cfg.c2.is_some() {
        return Err(CliError::Validation("second-order Green functions take --c0 and --c1 only".into()));
    }
    Ok(if cfg.custom()? || given {
        Normalization::Shifted(vec![cfg.c0.unwrap_or(0.0), cfg.c1.unwrap_or(0.0)])
    } else {
        Normalization::OnShell
    })
}

fn cmd_vacuum_pol(cfg: &RunConfig) -> Result<Output, CliError> {
    let m = RunConfig::get(&cfg.m, "m")?;
    let norm = green_normalization(cfg)?;
    let vp = VacuumPolarization::build(m, norm.clone())?;
    let tol = RunConfig::get(&cfg.tolerance, "tolerance")?;
    let report = vp.check_on_shell(tol)?;
    let mut rows = Vec::new();
    for s in grid(
        RunConfig::get(&cfg.p2_min, "p2_min")?,
        RunConfig::get(&cfg.p2_max, "p2_max")?,
        RunConfig::get(&cfg.points, "points")?,
    ) {
        let v = vp.pi(s)?;
        rows.push(vec![s, v.re, v.im]);
    }
    Ok(Output {
        csv: Some(csv_table(&["p2", "pi_re", "pi_im"], &rows)),
        report: serde_json::json!({
            "command": "vacuum-pol",
            "m": m,
            "normalization": norm,
            "on_shell": report,
            "all_pass": report.all_pass(),
        }),
    })
}

fn cmd_self_energy(cfg: &RunConfig) -> Result<Output, CliError> {
    let m = RunConfig::get(&cfg.m, "m")?;
    let mu = RunConfig::get(&cfg.mu, "mu")?;
    let norm = green_normalization(cfg)?;
    let se = SelfEnergy::build(m, mu, norm.clone())?;
    let tol = RunConfig::get(&cfg.tolerance, "tolerance")?;
    let report = se.check_on_shell(tol)?;
    let mut rows = Vec::new();
    for s in grid(
        RunConfig::get(&cfg.p2_min, "p2_min")?,
        RunConfig::get(&cfg.p2_max, "p2_max")?,
        RunConfig::get(&cfg.points, "points")?,
    ) {
        let a = se.a(s)?;
        let b = se.b(s)?;
        rows.push(vec![s, a.re, a.im, b.re, b.im]);
    }
    Ok(Output {
        csv: Some(csv_table(&["p2", "a_re", "a_im", "b_re", "b_im"], &rows)),
        report: serde_json::json!({
            "command": "self-energy",
            "m": m,
            "mu": mu,
            "normalization": norm,
            "on_shell": report,
            "all_pass": report.all_pass(),
        }),
    })
}

fn schedule(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    let start = RunConfig::get(&cfg.eps_start, "eps_start")?;
    let stop = RunConfig::get(&cfg.eps_stop, "eps_stop")?;
    let steps = RunConfig::get(&cfg.eps_steps, "eps_steps")?;
    if steps == 0 {
        return Err(CliError::Validation("eps_steps must be positive".into()));
    }
    if steps == 1 {
        return Ok(vec![start]);
    }
    if !(start > stop && stop > 0.0) {
        return Err(CliError::Validation(format!(
            "schedule must decrease: eps_start = {start}, eps_stop = {stop}"
        )));
    }
    let r = (stop / start).powf(1.0 / (steps - 1) as f64);
    Ok((0..steps)
        .map(|i| if i + 1 == steps { stop } else { start * r.powi(i as i32) })
        .collect())
}

/// Worker threads from the environment, else the available parallelism.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn cmd_sweep(cfg: &RunConfig) -> Result<Output, CliError> {
    let channel: Channel = RunConfig::get(&cfg.channel, "channel")?.parse()?;
    let profile: Profile = RunConfig::get(&cfg.profile, "profile")?.parse()?;
    let family = ScalingFamily::new(profile, 1.0, schedule(cfg)?)?;
    let m = RunConfig::get(&cfg.m, "m")?;
    let norm = green_normalization(cfg)?;
    let data = TestData::default();
    let threads = thread_count();
    let result = match channel {
        Channel::SigmaIntoPsi => {
            let se = SelfEnergy::build(m, RunConfig::get(&cfg.mu, "mu")?, norm.clone())?;
            sweep_with_threads(channel, Insertion::Sigma(&se), &data, &family, threads)?
        }
        _ => {
            let norm = match (m == 0.0, &norm) {
                // massless: subtract below the cut at p^2 = -1
                (true, Normalization::Shifted(cs)) => Normalization::Anchored {
                    point: -1.0,
                    constants: cs.clone(),
                },
                _ => norm.clone(),
            };
            let vp = VacuumPolarization::build(m, norm)?;
            sweep_with_threads(channel, Insertion::Pi(&vp), &data, &family, threads)?
        }
    };
    let rows: Vec<Vec<f64>> = result
        .epsilons
        .iter()
        .zip(&result.values)
        .map(|(e, v)| vec![*e, v.re, v.im, v.norm()])
        .collect();
    Ok(Output {
        csv: Some(csv_table(&["eps", "re", "im", "abs"], &rows)),
        report: serde_json::json!({
            "command": "adiabatic-sweep",
            "channel": channel,
            "profile": profile,
            "m": m,
            "normalization": norm,
            "verdict": result.verdict,
            "exponent": result.exponent,
            "limit_estimate": result.limit_estimate.map(cplx),
            "epsilon_free": result.epsilon_free.map(cplx),
        }),
    })
}

fn cmd_fock_check(cfg: &RunConfig) -> Result<Output, CliError> {
    let modes = RunConfig::get(&cfg.grid_modes, "grid_modes")?;
    let cutoff = RunConfig::get(&cfg.cutoff, "cutoff")?;
    if modes == 0 || modes > MAX_GRID_MODES || cutoff == 0 || cutoff > MAX_CUTOFF {
        return Err(CliError::Validation(format!(
            "grid_modes must be in 1..={MAX_GRID_MODES} and cutoff in 1..={MAX_CUTOFF}"
        )));
    }
    let mut devs = serde_json::Map::new();
    for (name, stats) in [("bose", Statistics::Bose), ("fermi", Statistics::Fermi)] {
        let grid = MomentumGrid::line(modes, -1.0, 1.0, stats)?;
        devs.insert(name.into(), serde_json::json!(commutator_check(&grid, cutoff)?));
    }
    Ok(Output {
        csv: None,
        report: serde_json::json!({
            "command": "fock-check",
            "grid_modes": modes,
            "cutoff": cutoff,
            "max_deviation": devs,
        }),
    })
}

/// Canonical JSON of `S_n`: Wick-expanded QED for `n <= 2`, symbolic words above.
pub fn wick_expand(order: usize) -> Result<serde_json::Value, CliError> {
    match order {
        0 => Err(CliError::Validation("order must be at least 1".into())),
        1 => Ok(WickPolynomial::qed_vertex(1).scaled(coeff(0, 1)).to_canonical_json()),
        2 => {
            let step = wick_step_two(&WickPolynomial::qed_vertex)?;
            let (via_ret, _) = assemble_wick(&step, &symbolic_splits(&step.d))?;
            Ok(via_ret.to_canonical_json())
        }
        n if n <= MAX_SYMBOLIC_ORDER => {
            let step = build_aprime_rprime(n, &[])?;
            let (via_ret, _) = assemble_words(&step, n);
            let terms: Vec<serde_json::Value> = via_ret
                .terms()
                .map(|(w, c)| {
                    serde_json::json!({
                        "coefficient": c,
                        "word": w.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
                    })
                })
                .collect();
            Ok(serde_json::json!({ "terms": terms }))
        }
        n => Err(CliError::Validation(format!(
            "order {n} exceeds the symbolic maximum {MAX_SYMBOLIC_ORDER}"
        ))),
    }
}

fn cmd_wick_expand(cfg: &RunConfig) -> Result<Output, CliError> {
    let order = RunConfig::get(&cfg.order, "order")?;
    Ok(Output {
        csv: None,
        report: serde_json::json!({
            "command": "wick-expand",
            "order": order,
            "s_n": wick_expand(order)?,
        }),
    })
}
