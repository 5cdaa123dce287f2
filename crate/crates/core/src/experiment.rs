//! Monte Carlo harness: independent single-iteration trials and their summary.

use std::fmt::Write as _;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{success_model, ProbabilityModel};
use crate::attack::{iteration_rng, run_iteration, AttackConfig, AttackError, IterationRecord, SolverVerdict};
use crate::curve::GroupSpec;
use crate::problem_l::{SolverKind, DEFAULT_ENUMERATION_BUDGET};

pub const CSV_HEADER: &str = "trial,m,success,solver,kernel_dim,reject_reason,elapsed_us";

/// Bumped whenever the CSV columns change.
pub const CSV_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExperimentError {
    #[error("at least one trial is required")]
    NoTrials,
    #[error("fixed logarithm must lie in [1, p)")]
    LogarithmOutOfRange,
    #[error(transparent)]
    Attack(#[from] AttackError),
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub group: GroupSpec,
    pub n_prime: u32,
    pub l: u32,
    pub solver: SolverKind,
    pub trials: u64,
    pub seed: u64,
    /// Use this logarithm in every trial instead of a fresh random one.
    pub fixed_m: Option<u64>,
    pub accident_check: bool,
    pub enumeration_budget: u128,
    /// Record wall-clock time per trial. Off by default so output is reproducible.
    pub timings: bool,
}

impl ExperimentConfig {
    pub fn new(group: GroupSpec, n_prime: u32, trials: u64) -> Self {
        ExperimentConfig {
            group,
            n_prime,
            l: 3 * n_prime,
            solver: SolverKind::Exhaustive,
            trials,
            seed: 0,
            fixed_m: None,
            accident_check: true,
            enumeration_budget: DEFAULT_ENUMERATION_BUDGET,
            timings: false,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.trials == 0 {
            return Err(ExperimentError::NoTrials);
        }
        if self.fixed_m.is_some_and(|m| m == 0 || m >= self.group.order().value()) {
            return Err(ExperimentError::LogarithmOutOfRange);
        }
        self.trial_config(0).1.validate()?;
        Ok(())
    }

    /// The logarithm and single-iteration attack configuration of one trial.
    ///
    /// Each trial draws from its own stream, so a trial can be replayed alone.
    pub fn trial_config(&self, trial: u64) -> (u64, AttackConfig) {
        let mut rng = iteration_rng(self.seed, trial);
        let p = self.group.order().value();
        let drawn = rng.random_range(1..p);
        let m = self.fixed_m.unwrap_or(drawn);
        let mut cfg = AttackConfig::new(self.group, self.group.scalar_mul(m), self.n_prime)
            .with_l(self.l)
            .with_solver(self.solver)
            .with_seed(rng.random())
            .with_max_iterations(1)
            .with_accident_check(self.accident_check);
        cfg.enumeration_budget = self.enumeration_budget;
        (m, cfg)
    }

    pub fn model(&self) -> ProbabilityModel {
        success_model(self.group.order().value(), self.n_prime, self.l)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub m: u64,
    pub success: bool,
    pub solver: SolverKind,
    pub kernel_dim: usize,
    pub reject_reason: String,
    pub elapsed_us: u64,
}

fn reject_reason(rec: &IterationRecord) -> String {
    if rec.recovered.is_some() {
        return "none".into();
    }
    match rec.verdict {
        SolverVerdict::DimensionAnomaly => "kernel_dim".into(),
        SolverVerdict::NotFound => "no_candidate".into(),
        SolverVerdict::Found | SolverVerdict::Skipped => {
            rec.rejections.last().map_or("no_candidate", |r| r.as_str()).into()
        }
    }
}

pub fn run_trial(cfg: &ExperimentConfig, trial: u64) -> TrialRecord {
    let (m, attack) = cfg.trial_config(trial);
    let start = Instant::now();
    let rec = run_iteration(&attack, 0);
    let elapsed_us = if cfg.timings { start.elapsed().as_micros() as u64 } else { 0 };
    TrialRecord {
        trial,
        m,
        success: rec.recovered.is_some(),
        solver: cfg.solver,
        kernel_dim: rec.kernel_dim,
        reject_reason: reject_reason(&rec),
        elapsed_us,
    }
}

/// Wilson score interval at confidence `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub model: ProbabilityModel,
    /// The model prediction matching the solver in use.
    pub predicted: f64,
}

impl ExperimentSummary {
    pub fn from_records(cfg: &ExperimentConfig, records: &[TrialRecord]) -> Self {
        let trials = records.len() as u64;
        let successes = records.iter().filter(|r| r.success).count() as u64;
        let (ci95_low, ci95_high) = wilson_interval(successes, trials, 1.96);
        let model = cfg.model();
        let predicted = match cfg.solver {
            SolverKind::Alg2 => model.combined,
            SolverKind::Exhaustive | SolverKind::Alg2ThenExhaustive => model.per_iteration,
        };
        ExperimentSummary {
            trials,
            successes,
            rate: if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
            ci95_low,
            ci95_high,
            model,
            predicted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub records: Vec<TrialRecord>,
    pub summary: ExperimentSummary,
}

impl ExperimentReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.trial, r.m, r.success as u8, r.solver, r.kernel_dim, r.reject_reason, r.elapsed_us
            )
            .unwrap();
        }
        out
    }
}

/// Runs all trials in parallel; records come back in trial order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate()?;
    let records: Vec<TrialRecord> = (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, t)).collect();
    let summary = ExperimentSummary::from_records(cfg, &records);
    Ok(ExperimentReport { records, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{medium_group, small_group};

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(50, 100, 1.96);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3, "{lo} {hi}");
        let (lo, hi) = wilson_interval(0, 10, 1.96);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.2775).abs() < 1e-3);
    }

    #[test]
    fn zero_trials_rejected() {
        let cfg = ExperimentConfig::new(small_group(), 1, 0);
        assert_eq!(run_experiment(&cfg).unwrap_err(), ExperimentError::NoTrials);
    }

    #[test]
    fn csv_is_reproducible() {
        let mut cfg = ExperimentConfig::new(medium_group(), 2, 40);
        cfg.seed = 77;
        let a = run_experiment(&cfg).unwrap().to_csv();
        let b = run_experiment(&cfg).unwrap().to_csv();
        assert_eq!(a, b);
        assert_eq!(a.lines().count(), 41);
        assert!(a.starts_with(CSV_HEADER));
        cfg.seed = 78;
        assert_ne!(run_experiment(&cfg).unwrap().to_csv(), a);
    }

    #[test]
    fn trial_replays_alone() {
        let mut cfg = ExperimentConfig::new(medium_group(), 2, 30);
        cfg.seed = 5;
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(run_trial(&cfg, 17), report.records[17]);
    }

    #[test]
    fn fixed_logarithm() {
        let mut cfg = ExperimentConfig::new(small_group(), 1, 20);
        cfg.fixed_m = Some(4);
        let report = run_experiment(&cfg).unwrap();
        assert!(report.records.iter().all(|r| r.m == 4));
        cfg.fixed_m = Some(19);
        assert_eq!(run_experiment(&cfg).unwrap_err(), ExperimentError::LogarithmOutOfRange);
    }

    #[test]
    fn successes_carry_no_reject_reason() {
        let cfg = ExperimentConfig::new(medium_group(), 2, 30);
        for r in run_experiment(&cfg).unwrap().records {
            assert_eq!(r.success, r.reject_reason == "none");
            assert_eq!(r.kernel_dim, 6);
        }
    }
}
