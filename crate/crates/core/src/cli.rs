//! Command-line front end for the `ecdlp` binary.
//!
//! Every option can also come from a flat config file (`key = value` per
//! line, `#` starts a comment) or from the `config` object of a previously
//! written manifest. Options given on the command line win.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analysis::{select_parameters, success_model};
use crate::attack::{run_attack, AttackConfig, AttackResult, IterationRecord};
use crate::curve::{find_prime_order_curve, Curve, GroupSpec, Point};
use crate::dlp_oracles::{solve_bsgs, solve_exhaustive_dlp, DlpQuery};
use crate::experiment::{
    run_experiment, wilson_interval, ExperimentConfig, ExperimentSummary, TrialRecord, CSV_SCHEMA_VERSION,
};
use crate::field::{is_prime, PrimeModulus};
use crate::fixtures::{medium_group, small_group};
use crate::problem_l::{SolverKind, DEFAULT_ENUMERATION_BUDGET};
use crate::verify::{run_suite, Suite, Verdict};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_EXHAUSTED: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Usage(String),
    Validation(String),
    Exhausted(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Exhausted(_) => EXIT_EXHAUSTED,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Exhausted(m) => write!(f, "{m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Validation(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(name = "ecdlp", version, about = "Elliptic curve discrete logs through zero patterns in kernel spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recover m with m P = Q.
    Solve(SolveArgs),
    /// Run independent single-iteration trials and tabulate the success rate.
    Experiment(ExperimentArgs),
    /// Run the invariant suites.
    Verify(VerifyArgs),
    /// Choose n' and l for a group order and print the success model.
    Params(ParamsArgs),
    /// Search for a curve of prime order in a range.
    FindCurve(FindCurveArgs),
    /// Solve a discrete log with a generic oracle.
    Dlp(DlpArgs),
}

#[derive(Debug, Args, Default)]
pub struct GroupArgs {
    /// Read options from a `key = value` file or a manifest.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Built-in group: `small` (q = 17, order 19) or `medium` (q = 887, order 907).
    #[arg(long)]
    pub fixture: Option<String>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub a: Option<u64>,
    #[arg(long)]
    pub b: Option<u64>,
    #[arg(long)]
    pub gx: Option<u64>,
    #[arg(long)]
    pub gy: Option<u64>,
    /// Prime order of the generator.
    #[arg(long)]
    pub order: Option<u64>,
}

#[derive(Debug, Args, Default)]
pub struct AttackArgs {
    #[arg(long)]
    pub nprime: Option<u32>,
    /// Defaults to 3n'.
    #[arg(long)]
    pub l: Option<u32>,
    /// alg2, exhaustive or alg2-then-exhaustive.
    #[arg(long)]
    pub solver: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub no_accident_check: bool,
    /// Largest number of subsets the exhaustive solver may visit per iteration.
    #[arg(long)]
    pub enumeration_budget: Option<u128>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[command(flatten)]
    pub attack: AttackArgs,
    #[arg(long)]
    pub qx: Option<u64>,
    #[arg(long)]
    pub qy: Option<u64>,
    #[arg(long)]
    pub max_iterations: Option<u64>,
    /// Write the run manifest (JSON) here.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Write one JSON line per iteration here.
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Include wall-clock time in the manifest.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[command(flatten)]
    pub attack: AttackArgs,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Use this logarithm in every trial.
    #[arg(long)]
    pub m: Option<u64>,
    /// Write the CSV table here instead of stdout.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Fill the elapsed_us column and wall time.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// theorem1, kernel-dim, partitions, problem-l or all.
    #[arg(long)]
    pub suite: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    /// Prime group order p.
    #[arg(long)]
    pub order: u64,
    /// Override the selected n'.
    #[arg(long)]
    pub nprime: Option<u32>,
    /// Override l (defaults to 3n').
    #[arg(long)]
    pub l: Option<u32>,
}

#[derive(Debug, Args)]
pub struct FindCurveArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub order_min: u64,
    #[arg(long)]
    pub order_max: u64,
}

#[derive(Debug, Args)]
pub struct DlpArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long)]
    pub qx: Option<u64>,
    #[arg(long)]
    pub qy: Option<u64>,
    /// bsgs or scan.
    #[arg(long, default_value = "bsgs")]
    pub method: String,
}

/// Options gathered from a config file and the command line.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

fn normalize_key(k: &str) -> String {
    k.trim().to_ascii_lowercase().replace('_', "-")
}

impl Settings {
    /// Parses flat `key = value` text.
    pub fn parse_flat(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Usage(format!("config line {}: expected `key = value`", n + 1)));
            };
            values.insert(normalize_key(k), v.trim().to_string());
        }
        Ok(Settings { values })
    }

    /// Accepts either flat text or a manifest's `config` object.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        if !text.trim_start().starts_with('{') {
            return Self::parse_flat(text);
        }
        let json: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Usage(format!("manifest is not valid JSON: {e}")))?;
        let config = json
            .get("config")
            .and_then(|c| c.as_object())
            .ok_or_else(|| CliError::Usage("manifest has no `config` object".into()))?;
        let mut values = BTreeMap::new();
        for (k, v) in config {
            let v = match v {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            values.insert(normalize_key(k), v);
        }
        Ok(Settings { values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl Display) {
        self.values.insert(normalize_key(key), value.to_string());
    }

    fn put<T: Display>(&mut self, key: &str, value: Option<T>) {
        if let Some(v) = value {
            self.set(key, v);
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        self.raw(key).map(|v| v.parse::<T>().map_err(|e| CliError::Usage(format!("--{key} `{v}`: {e}")))).transpose()
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        self.get(key)?.ok_or_else(|| CliError::Usage(format!("missing required option --{key}")))
    }

    pub fn into_map(self) -> BTreeMap<String, String> {
        self.values
    }
}

fn base_settings(g: &GroupArgs) -> Result<Settings, CliError> {
    let mut s = match &g.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    s.put("fixture", g.fixture.as_ref());
    s.put("q", g.q);
    s.put("a", g.a);
    s.put("b", g.b);
    s.put("gx", g.gx);
    s.put("gy", g.gy);
    s.put("order", g.order);
    Ok(s)
}

fn add_attack_settings(s: &mut Settings, a: &AttackArgs) {
    s.put("nprime", a.nprime);
    s.put("l", a.l);
    s.put("solver", a.solver.as_ref());
    s.put("seed", a.seed);
    s.put("enumeration-budget", a.enumeration_budget);
    if a.no_accident_check {
        s.set("accident-check", false);
    }
}

/// Builds the group and writes its defining values back into `echo`.
fn resolve_group(s: &Settings, echo: &mut Settings) -> Result<GroupSpec, CliError> {
    let fixture = match s.raw("fixture") {
        None => None,
        Some("small") => Some(small_group()),
        Some("medium") => Some(medium_group()),
        Some(other) => return Err(CliError::Usage(format!("unknown fixture `{other}` (expected small or medium)"))),
    };
    let (q, a, b, gx, gy, order) = match fixture {
        Some(g) if ["q", "a", "b", "gx", "gy", "order"].iter().all(|k| s.raw(k).is_none()) => {
            let (gx, gy) = g.generator().affine().expect("fixture generator is affine");
            let c = g.curve();
            (c.field().value(), c.a().residue(), c.b().residue(), gx, gy, g.order().value())
        }
        Some(_) => return Err(CliError::Usage("--fixture cannot be combined with explicit curve options".into())),
        None => (
            s.require::<u64>("q")?,
            s.require::<u64>("a")?,
            s.require::<u64>("b")?,
            s.require::<u64>("gx")?,
            s.require::<u64>("gy")?,
            s.require::<u64>("order")?,
        ),
    };
    let field = PrimeModulus::new(q).map_err(|e| CliError::Validation(format!("field: {e}")))?;
    let curve = Curve::new(field, a, b).map_err(|e| CliError::Validation(format!("curve: {e}")))?;
    let generator = curve.point(gx, gy).map_err(|_| {
        CliError::Validation(format!("generator P = ({gx}, {gy}) is not on the curve y^2 = x^3 + {a}x + {b} mod {q}"))
    })?;
    let group = GroupSpec::new(curve, generator, order).map_err(|e| CliError::Validation(format!("order: {e}")))?;
    for (k, v) in [("q", q), ("a", a % q), ("b", b % q), ("gx", gx % q), ("gy", gy % q), ("order", order)] {
        echo.set(k, v);
    }
    Ok(group)
}

fn resolve_target(group: &GroupSpec, s: &Settings, echo: &mut Settings) -> Result<Point, CliError> {
    let (qx, qy) = (s.require::<u64>("qx")?, s.require::<u64>("qy")?);
    let c = group.curve();
    let target = c.point(qx, qy).map_err(|_| {
        CliError::Validation(format!(
            "target Q = ({qx}, {qy}) is not on the curve y^2 = x^3 + {}x + {} mod {}",
            c.a(),
            c.b(),
            c.field().value()
        ))
    })?;
    let (x, y) = target.affine().expect("affine input");
    echo.set("qx", x);
    echo.set("qy", y);
    Ok(target)
}

struct AttackParams {
    n_prime: u32,
    l: u32,
    solver: SolverKind,
    seed: u64,
    accident_check: bool,
    enumeration_budget: u128,
}

fn resolve_attack(s: &Settings, echo: &mut Settings) -> Result<AttackParams, CliError> {
    let n_prime = s.require::<u32>("nprime")?;
    let l = s.get::<u32>("l")?.unwrap_or(3 * n_prime);
    let solver = s.get::<SolverKind>("solver")?.unwrap_or(SolverKind::Exhaustive);
    let seed = s.get::<u64>("seed")?.unwrap_or(0);
    let accident_check = s.get::<bool>("accident-check")?.unwrap_or(true);
    let enumeration_budget = s.get::<u128>("enumeration-budget")?.unwrap_or(DEFAULT_ENUMERATION_BUDGET);
    echo.set("nprime", n_prime);
    echo.set("l", l);
    echo.set("solver", solver);
    echo.set("seed", seed);
    echo.set("accident-check", accident_check);
    echo.set("enumeration-budget", enumeration_budget);
    Ok(AttackParams { n_prime, l, solver, seed, accident_check, enumeration_budget })
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest<R, S> {
    pub schema_version: u32,
    pub artifact: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub config: BTreeMap<String, String>,
    pub records: Vec<R>,
    pub summary: S,
}

impl<R: Serialize, S: Serialize> RunManifest<R, S> {
    fn new(command: &'static str, seed: u64, config: Settings, records: Vec<R>, summary: S) -> Self {
        RunManifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            artifact: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            config: config.into_map(),
            records,
            summary,
        }
    }

    fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).map_err(|e| CliError::Internal(e.to_string()))?;
        text.push('\n');
        fs::write(path, text).map_err(|e| io_error(path, e))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveSummary {
    pub success: bool,
    pub m: Option<u64>,
    pub verified: bool,
    pub iterations: u64,
    pub max_iterations: u64,
    pub accident: Option<(u64, u64)>,
    pub per_iteration_rate: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub predicted_per_iteration: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut s = base_settings(&args.group)?;
    add_attack_settings(&mut s, &args.attack);
    s.put("qx", args.qx);
    s.put("qy", args.qy);
    s.put("max-iterations", args.max_iterations);

    let mut echo = Settings::default();
    let group = resolve_group(&s, &mut echo)?;
    let target = resolve_target(&group, &s, &mut echo)?;
    let ap = resolve_attack(&s, &mut echo)?;
    let mut cfg = AttackConfig::new(group, target, ap.n_prime)
        .with_l(ap.l)
        .with_solver(ap.solver)
        .with_seed(ap.seed)
        .with_accident_check(ap.accident_check);
    cfg.enumeration_budget = ap.enumeration_budget;
    cfg.max_iterations = s.get::<u64>("max-iterations")?;
    cfg.validate().map_err(|e| CliError::Validation(e.to_string()))?;
    let max_iterations = cfg.effective_max_iterations();
    echo.set("max-iterations", max_iterations);

    let start = Instant::now();
    let outcome = run_attack(&cfg).map_err(|e| CliError::Validation(e.to_string()))?;
    let wall = start.elapsed();

    let m = outcome.logarithm();
    let verified = m.is_some_and(|m| group.scalar_mul(m) == target);
    if m.is_some() && !verified {
        return Err(CliError::Internal("recovered logarithm failed verification".into()));
    }
    let successes = outcome.log.iter().filter(|r| r.recovered.is_some()).count() as u64;
    let (ci95_low, ci95_high) = wilson_interval(successes, outcome.iterations_used, 1.96);
    let summary = SolveSummary {
        success: m.is_some(),
        m,
        verified,
        iterations: outcome.iterations_used,
        max_iterations,
        accident: outcome.accident,
        per_iteration_rate: if outcome.iterations_used == 0 {
            0.0
        } else {
            successes as f64 / outcome.iterations_used as f64
        },
        ci95_low,
        ci95_high,
        predicted_per_iteration: cfg.predicted_success(),
        wall_time_ms: args.timings.then_some(wall.as_secs_f64() * 1e3),
    };

    if let Some(path) = &args.log {
        write_json_lines(path, &outcome.log)?;
    }
    if let Some(path) = &args.manifest {
        RunManifest::new("solve", ap.seed, echo, outcome.log.clone(), summary.clone()).write(path)?;
    }

    let write_err = |e: std::io::Error| CliError::Internal(e.to_string());
    match outcome.result {
        AttackResult::Recovered { m } => {
            writeln!(out, "m = {m}").map_err(write_err)?;
            writeln!(out, "verified: {m} * P = Q").map_err(write_err)?;
            writeln!(out, "iterations = {}", outcome.iterations_used).map_err(write_err)?;
            if let Some((r, r2)) = outcome.accident {
                writeln!(out, "resolved by collision r = {r}, r' = {r2}").map_err(write_err)?;
            }
            Ok(())
        }
        AttackResult::IterationsExhausted { iterations } => {
            Err(CliError::Exhausted(format!("no logarithm found after {iterations} iterations")))
        }
    }
}

fn write_json_lines(path: &Path, records: &[IterationRecord]) -> Result<(), CliError> {
    let mut text = String::new();
    for r in records {
        text.push_str(&serde_json::to_string(r).map_err(|e| CliError::Internal(e.to_string()))?);
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| io_error(path, e))
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentManifestSummary {
    pub csv_schema_version: u32,
    #[serde(flatten)]
    pub stats: ExperimentSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

fn summary_text(sm: &ExperimentSummary) -> String {
    format!(
        "trials = {}\nsuccesses = {}\nrate = {:.4} (95% CI {:.4} .. {:.4})\npredicted = {:.4}\n\
         model: per-iteration {:.4}, heuristic conditional {} ({:.4}), combined {:.4}, \
         overall 0.6 (ln p)^2/p = {:.4}, 0.6 (log2 p)^2/p = {:.4}\n",
        sm.trials,
        sm.successes,
        sm.rate,
        sm.ci95_low,
        sm.ci95_high,
        sm.predicted,
        sm.model.per_iteration,
        sm.model.alg2_conditional,
        sm.model.alg2_conditional.value(),
        sm.model.combined,
        sm.model.overall_natural_log,
        sm.model.overall_log2,
    )
}

fn cmd_experiment(args: &ExperimentArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let mut s = base_settings(&args.group)?;
    add_attack_settings(&mut s, &args.attack);
    s.put("trials", args.trials);
    s.put("m", args.m);

    let mut echo = Settings::default();
    let group = resolve_group(&s, &mut echo)?;
    let ap = resolve_attack(&s, &mut echo)?;
    let trials = s.require::<u64>("trials")?;
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    echo.set("trials", trials);
    let fixed_m = s.get::<u64>("m")?;
    if let Some(m) = fixed_m {
        echo.set("m", m);
    }

    let mut cfg = ExperimentConfig::new(group, ap.n_prime, trials);
    cfg.l = ap.l;
    cfg.solver = ap.solver;
    cfg.seed = ap.seed;
    cfg.fixed_m = fixed_m;
    cfg.accident_check = ap.accident_check;
    cfg.enumeration_budget = ap.enumeration_budget;
    cfg.timings = args.timings;

    let start = Instant::now();
    let report = run_experiment(&cfg).map_err(|e| CliError::Validation(e.to_string()))?;
    let wall = start.elapsed();
    let csv = report.to_csv();
    let text = summary_text(&report.summary);

    let write_err = |e: std::io::Error| CliError::Internal(e.to_string());
    match &args.csv {
        Some(path) => {
            fs::write(path, &csv).map_err(|e| io_error(path, e))?;
            out.write_all(text.as_bytes()).map_err(write_err)?;
        }
        None => {
            out.write_all(csv.as_bytes()).map_err(write_err)?;
            err.write_all(text.as_bytes()).map_err(write_err)?;
        }
    }
    if let Some(path) = &args.manifest {
        let summary = ExperimentManifestSummary {
            csv_schema_version: CSV_SCHEMA_VERSION,
            stats: report.summary.clone(),
            wall_time_ms: args.timings.then_some(wall.as_secs_f64() * 1e3),
        };
        RunManifest::<TrialRecord, _>::new("experiment", ap.seed, echo, report.records, summary).write(path)?;
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let suite: Suite = args.suite.parse().map_err(CliError::Usage)?;
    let reports = run_suite(suite, args.seed);
    let write_err = |e: std::io::Error| CliError::Internal(e.to_string());
    writeln!(out, "{:<12} {:<18} {:>8} {:>9}  summary", "suite", "verdict", "checks", "failures").map_err(write_err)?;
    for r in &reports {
        writeln!(
            out,
            "{:<12} {:<18} {:>8} {:>9}  {}",
            r.suite.as_str(),
            r.verdict.to_string(),
            r.checks,
            r.failures,
            r.summary
        )
        .map_err(write_err)?;
    }
    for r in reports.iter().filter(|r| !r.details.is_empty()) {
        writeln!(out, "\n[{}]", r.suite).map_err(write_err)?;
        for d in &r.details {
            writeln!(out, "  {d}").map_err(write_err)?;
        }
    }
    let failed: Vec<&str> = reports.iter().filter(|r| r.verdict == Verdict::Fail).map(|r| r.suite.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Internal(format!("suite(s) failed: {}", failed.join(", "))))
    }
}

fn cmd_params(args: &ParamsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let p = args.order;
    if p < 5 || !is_prime(p) {
        return Err(CliError::Validation(format!("order {p} must be a prime >= 5")));
    }
    let choice = select_parameters(p);
    let n_prime = args.nprime.unwrap_or(choice.n_prime);
    let l = args.l.unwrap_or(3 * n_prime);
    if n_prime == 0 || l == 0 {
        return Err(CliError::Validation("n' and l must be positive".into()));
    }
    let model = success_model(p, n_prime, l);
    let mut text = format!("p = {p}\nn' = {n_prime}\nl = {l}\nC(3n'+l, l) = {}\n", model.subsets);
    if args.nprime.is_none() && args.l.is_none() {
        text += &format!("stirling estimate of C(6n', 3n') = {:.1}\n", choice.stirling_estimate);
    }
    text += &format!(
        "per-iteration success = {:.6}\nheuristic conditional success l^2/C = {} ({:.6})\n\
         combined = {:.6}\noverall 0.6 (ln p)^2/p = {:.6}\noverall 0.6 (log2 p)^2/p = {:.6}\n",
        model.per_iteration,
        model.alg2_conditional,
        model.alg2_conditional.value(),
        model.combined,
        model.overall_natural_log,
        model.overall_log2,
    );
    out.write_all(text.as_bytes()).map_err(|e| CliError::Internal(e.to_string()))
}

fn cmd_find_curve(args: &FindCurveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let q = PrimeModulus::new(args.q).map_err(|e| CliError::Validation(format!("field: {e}")))?;
    if args.order_min > args.order_max {
        return Err(CliError::Usage("--order-min exceeds --order-max".into()));
    }
    let g =
        find_prime_order_curve(q, args.order_min, args.order_max).map_err(|e| CliError::Validation(e.to_string()))?;
    let (gx, gy) = g.generator().affine().expect("affine generator");
    let c = g.curve();
    let text = format!(
        "q = {}\na = {}\nb = {}\ngx = {gx}\ngy = {gy}\norder = {}\n",
        c.field().value(),
        c.a(),
        c.b(),
        g.order().value()
    );
    out.write_all(text.as_bytes()).map_err(|e| CliError::Internal(e.to_string()))
}

fn cmd_dlp(args: &DlpArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut s = base_settings(&args.group)?;
    s.put("qx", args.qx);
    s.put("qy", args.qy);
    let mut echo = Settings::default();
    let group = resolve_group(&s, &mut echo)?;
    let target = resolve_target(&group, &s, &mut echo)?;
    let query = DlpQuery::new(&group, target);
    let m = match args.method.as_str() {
        "bsgs" => solve_bsgs(&query),
        "scan" => solve_exhaustive_dlp(&query),
        other => return Err(CliError::Usage(format!("unknown method `{other}` (expected bsgs or scan)"))),
    }
    .map_err(|e| CliError::Validation(e.to_string()))?;
    writeln!(out, "m = {m}").map_err(|e| CliError::Internal(e.to_string()))
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a, out),
        Command::Experiment(a) => cmd_experiment(a, out, err),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Params(a) => cmd_params(a, out),
        Command::FindCurve(a) => cmd_find_curve(a, out),
        Command::Dlp(a) => cmd_dlp(a, out),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                return EXIT_USAGE;
            }
            let _ = out.write_all(text.as_bytes());
            return EXIT_OK;
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("ecdlp").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn flat_config_parsing() {
        let s = Settings::parse_flat("# curve\nq = 17\n a=2 # trailing\n\nmax_iterations = 5\n").unwrap();
        assert_eq!(s.raw("q"), Some("17"));
        assert_eq!(s.raw("a"), Some("2"));
        assert_eq!(s.raw("max-iterations"), Some("5"));
        assert!(matches!(Settings::parse_flat("q 17"), Err(CliError::Usage(_))));
        assert!(matches!(s.get::<u32>("a"), Ok(Some(2))));
        assert!(matches!(s.require::<u64>("order"), Err(CliError::Usage(_))));
    }

    #[test]
    fn params_for_907() {
        let (code, out, _) = run_capture(&["params", "--order", "907"]);
        assert_eq!(code, 0);
        assert!(out.contains("n' = 2\n"), "{out}");
        assert!(out.contains("l = 6\n"));
        assert!(out.contains("C(3n'+l, l) = 924\n"));
        assert!(out.contains("per-iteration success = 0.639"));
    }

    #[test]
    fn find_curve_prints_a_config() {
        let (code, out, _) = run_capture(&["find-curve", "--q", "17", "--order-min", "19", "--order-max", "19"]);
        assert_eq!(code, 0);
        let s = Settings::parse_flat(&out).unwrap();
        assert_eq!(s.raw("order"), Some("19"));
        assert_eq!(s.raw("q"), Some("17"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_capture(&["solve", "--q", "17"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["bogus"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["verify", "--suite", "nope"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["params", "--order", "900"]).0, EXIT_VALIDATION);
        let (code, _, err) = run_capture(&["solve", "--fixture", "small", "--qx", "1", "--qy", "1", "--nprime", "1"]);
        assert_eq!(code, EXIT_VALIDATION);
        assert!(err.contains("target Q = (1, 1) is not on the curve"), "{err}");
    }

    #[test]
    fn fixture_conflicts_with_explicit_curve() {
        let (code, _, err) = run_capture(&["dlp", "--fixture", "small", "--q", "17", "--qx", "5", "--qy", "1"]);
        assert_eq!(code, EXIT_USAGE, "{err}");
    }
}
