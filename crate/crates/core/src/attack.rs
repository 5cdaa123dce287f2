//! The Las Vegas attack: sample multipliers, build the monomial matrix, take
//! its left kernel, search for a zero pattern, decode `m`.
//!
//! Row layout per iteration: `3n' - 1` rows for `r_i P` followed by `l + 1`
//! rows for `-r'_j Q`. A kernel vector supported on exactly `3n'` rows says
//! those points sum to the identity, i.e. `A P = B Q` where `A` and `B` are
//! the multiplier sums over the support, so `m = A / B mod p`.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{binomial, success_model};
use crate::curve::{GroupSpec, Point};
use crate::field::PrimeModulus;
use crate::linalg::{KernelBasis, MatrixFq};
use crate::problem_l::{
    alg2_trace, ExhaustiveSolver, ProblemLError, ProblemLInstance, SolverKind, ZeroPatternSolution,
    DEFAULT_ENUMERATION_BUDGET,
};
use crate::veronese::MonomialBasis;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AttackError {
    #[error("n' must be at least 1")]
    DegreeTooSmall,
    #[error("l must be at least 1")]
    NoExtraRows,
    #[error("3n' + l = {rows} rows need more than p - 1 = {available} distinct multipliers")]
    TooManyRows { rows: u64, available: u64 },
    #[error("target point is not on the curve")]
    TargetNotOnCurve,
    #[error("the exhaustive solver would visit C({n}, {k}) subsets, over the budget {budget}")]
    EnumerationBudget { n: usize, k: usize, budget: u128 },
    #[error("the subset-sum oracle needs m != 0")]
    ZeroLogarithm,
}

#[derive(Debug, Clone)]
pub struct AttackConfig {
    pub group: GroupSpec,
    pub target: Point,
    pub n_prime: u32,
    pub l: u32,
    pub solver: SolverKind,
    /// `None` selects [`AttackConfig::default_max_iterations`].
    pub max_iterations: Option<u64>,
    pub seed: u64,
    pub accident_check: bool,
    pub enumeration_budget: u128,
}

impl AttackConfig {
    /// Defaults: `l = 3n'`, exhaustive solver, seed 0, accident check on.
    pub fn new(group: GroupSpec, target: Point, n_prime: u32) -> Self {
        AttackConfig {
            group,
            target,
            n_prime,
            l: 3 * n_prime,
            solver: SolverKind::Exhaustive,
            max_iterations: None,
            seed: 0,
            accident_check: true,
            enumeration_budget: DEFAULT_ENUMERATION_BUDGET,
        }
    }

    pub fn with_l(mut self, l: u32) -> Self {
        self.l = l;
        self
    }

    pub fn with_solver(mut self, solver: SolverKind) -> Self {
        self.solver = solver;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_iterations(mut self, n: u64) -> Self {
        self.max_iterations = Some(n);
        self
    }

    pub fn with_accident_check(mut self, on: bool) -> Self {
        self.accident_check = on;
        self
    }

    pub fn p_rows(&self) -> usize {
        3 * self.n_prime as usize - 1
    }

    pub fn q_rows(&self) -> usize {
        self.l as usize + 1
    }

    pub fn total_rows(&self) -> usize {
        self.p_rows() + self.q_rows()
    }

    pub fn validate(&self) -> Result<(), AttackError> {
        if self.n_prime < 1 {
            return Err(AttackError::DegreeTooSmall);
        }
        if self.l < 1 {
            return Err(AttackError::NoExtraRows);
        }
        let available = self.group.order().value() - 1;
        let rows = self.total_rows() as u64;
        if rows > available {
            return Err(AttackError::TooManyRows { rows, available });
        }
        if !self.group.curve().contains(&self.target) {
            return Err(AttackError::TargetNotOnCurve);
        }
        if self.solver != SolverKind::Alg2 {
            let (n, k) = (self.total_rows(), self.l as usize);
            if binomial(n as u64, k as u64).is_none_or(|c| c > self.enumeration_budget) {
                return Err(AttackError::EnumerationBudget { n, k, budget: self.enumeration_budget });
            }
        }
        Ok(())
    }

    /// Modelled chance that one iteration recovers `m` with the chosen solver.
    pub fn predicted_success(&self) -> f64 {
        let model = success_model(self.group.order().value(), self.n_prime, self.l);
        match self.solver {
            SolverKind::Alg2 => model.combined,
            SolverKind::Exhaustive | SolverKind::Alg2ThenExhaustive => model.per_iteration,
        }
    }

    /// `ceil(10 / predicted per-iteration success)`
    pub fn default_max_iterations(&self) -> u64 {
        (10.0 / self.predicted_success()).ceil().max(1.0) as u64
    }

    pub fn effective_max_iterations(&self) -> u64 {
        self.max_iterations.unwrap_or_else(|| self.default_max_iterations())
    }
}

/// Generator for one iteration: a ChaCha stream keyed by `(seed, index)`, so
/// any iteration can be replayed on its own.
pub fn iteration_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone)]
pub struct IterationSample {
    /// `r_i`, one per P-row.
    pub p_multipliers: Vec<u64>,
    /// `r'_j`, one per Q-row.
    pub q_multipliers: Vec<u64>,
    /// `r_i P`
    pub p_points: Vec<Point>,
    /// `-r'_j Q`
    pub q_points: Vec<Point>,
    /// Monomial rows of `p_points` then `q_points`.
    pub matrix: MatrixFq,
}

impl IterationSample {
    /// Builds the points and the matrix for given multipliers.
    pub fn from_multipliers(
        group: &GroupSpec,
        target: &Point,
        n_prime: u32,
        p_multipliers: Vec<u64>,
        q_multipliers: Vec<u64>,
    ) -> Self {
        let curve = group.curve();
        let basis = MonomialBasis::new(n_prime);
        let p_points: Vec<Point> = p_multipliers.iter().map(|&r| group.scalar_mul(r)).collect();
        let q_points: Vec<Point> = q_multipliers.iter().map(|&r| curve.neg(&group.mul_point(target, r))).collect();
        let q = curve.field();
        let rows: Vec<Vec<u64>> = p_points
            .iter()
            .chain(&q_points)
            .map(|pt| basis.evaluate_raw(q, pt.x().residue(), pt.y().residue(), pt.z().residue()))
            .collect();
        let matrix = MatrixFq::from_rows(q, &rows, basis.len()).expect("uniform rows");
        IterationSample { p_multipliers, q_multipliers, p_points, q_points, matrix }
    }

    pub fn has_repeated_rows(&self) -> bool {
        let rows = self.matrix.row_vecs();
        rows.iter().duplicates().next().is_some()
    }
}

fn distinct_multipliers(rng: &mut ChaCha8Rng, count: usize, p: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let r = rng.random_range(1..p);
        if !out.contains(&r) {
            out.push(r);
        }
    }
    out
}

/// Draws `3n' - 1` distinct P-multipliers, then `l + 1` distinct Q-multipliers.
pub fn sample_iteration(cfg: &AttackConfig, index: u64) -> IterationSample {
    let p = cfg.group.order().value();
    let mut rng = iteration_rng(cfg.seed, index);
    let i = distinct_multipliers(&mut rng, cfg.p_rows(), p);
    let j = distinct_multipliers(&mut rng, cfg.q_rows(), p);
    IterationSample::from_multipliers(&cfg.group, &cfg.target, cfg.n_prime, i, j)
}

/// A cross-collision between the two blocks: `r P = -r' Q` or `r P = r' Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Accident {
    pub p_multiplier: u64,
    pub q_multiplier: u64,
    /// Whether `r P = r' Q` (as opposed to `r P = -r' Q`).
    pub negated: bool,
}

impl Accident {
    pub fn logarithm(&self, p: PrimeModulus) -> u64 {
        let ratio = p.mul(p.reduce(self.p_multiplier), p.inv(self.q_multiplier).expect("r' in [1, p)"));
        if self.negated {
            ratio
        } else {
            p.neg(ratio)
        }
    }
}

/// First P-row point that coincides with a Q-row point or its negative.
pub fn detect_accident(sample: &IterationSample) -> Option<Accident> {
    for (pi, pp) in sample.p_points.iter().enumerate() {
        for (qi, qp) in sample.q_points.iter().enumerate() {
            if pp.is_identity() || qp.is_identity() || pp.x() != qp.x() {
                continue;
            }
            return Some(Accident {
                p_multiplier: sample.p_multipliers[pi],
                q_multiplier: sample.q_multipliers[qi],
                negated: pp != qp,
            });
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum RejectReason {
    /// Support must be exactly `3n'` rows.
    SupportSize {
        support: usize,
        expected: usize,
    },
    MissingPBlock,
    MissingQBlock,
    /// `B = 0 mod p`
    BNotInvertible,
    /// Decoded `m` failed `m P = Q`.
    VerificationFailed,
}

impl RejectReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            RejectReason::SupportSize { .. } => "support_size",
            RejectReason::MissingPBlock => "missing_p_block",
            RejectReason::MissingQBlock => "missing_q_block",
            RejectReason::BNotInvertible => "b_not_invertible",
            RejectReason::VerificationFailed => "verification_failed",
        }
    }
}

/// `A * B^-1 mod p` from a kernel vector over rows `[P-block | Q-block]`.
pub fn decode_solution(
    v: &ZeroPatternSolution,
    p_multipliers: &[u64],
    q_multipliers: &[u64],
    p: PrimeModulus,
) -> Result<u64, RejectReason> {
    let split = p_multipliers.len();
    let expected = split + 1;
    let support = v.support();
    if support.len() != expected {
        return Err(RejectReason::SupportSize { support: support.len(), expected });
    }
    let (in_p, in_q): (Vec<usize>, Vec<usize>) = support.iter().partition(|&&i| i < split);
    if in_p.is_empty() {
        return Err(RejectReason::MissingPBlock);
    }
    if in_q.is_empty() {
        return Err(RejectReason::MissingQBlock);
    }
    let a = in_p.iter().fold(0, |acc, &i| p.add(acc, p.reduce(p_multipliers[i])));
    let b = in_q.iter().fold(0, |acc, &i| p.add(acc, p.reduce(q_multipliers[i - split])));
    let b_inv = p.inv(b).map_err(|_| RejectReason::BNotInvertible)?;
    Ok(p.mul(a, b_inv))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverVerdict {
    /// At least one zero pattern was produced (it may still have been rejected).
    Found,
    NotFound,
    /// Resolved by accident detection before the solver ran.
    Skipped,
    /// The kernel did not have dimension `l`; no solver ran.
    DimensionAnomaly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IterationRecord {
    pub iteration: u64,
    pub p_multipliers: Vec<u64>,
    pub q_multipliers: Vec<u64>,
    pub kernel_dim: usize,
    pub accident: Option<Accident>,
    pub verdict: SolverVerdict,
    pub candidates: usize,
    pub rejections: Vec<RejectReason>,
    pub recovered: Option<u64>,
}

/// Zero patterns in the order the configured solver produces them.
fn candidates<'a>(
    solver: SolverKind,
    inst: &'a ProblemLInstance,
    budget: u128,
) -> Result<Box<dyn Iterator<Item = ZeroPatternSolution> + 'a>, ProblemLError> {
    let exhaustive = ExhaustiveSolver::with_budget(budget);
    Ok(match solver {
        SolverKind::Alg2 => Box::new(alg2_trace(inst).candidates.into_iter().map(|(_, s)| s)),
        SolverKind::Exhaustive => Box::new(exhaustive.solutions(inst)?),
        SolverKind::Alg2ThenExhaustive => {
            let first = alg2_trace(inst).candidates.into_iter().map(|(_, s)| s);
            Box::new(first.chain(exhaustive.solutions(inst)?))
        }
    })
}

/// Runs one iteration of the attack with its own random stream.
pub fn run_iteration(cfg: &AttackConfig, index: u64) -> IterationRecord {
    let sample = sample_iteration(cfg, index);
    run_sample(cfg, index, &sample)
}

/// Runs the kernel, solver and decode steps on a prepared sample.
pub fn run_sample(cfg: &AttackConfig, index: u64, sample: &IterationSample) -> IterationRecord {
    let p = cfg.group.order();
    let mut record = IterationRecord {
        iteration: index,
        p_multipliers: sample.p_multipliers.clone(),
        q_multipliers: sample.q_multipliers.clone(),
        kernel_dim: 0,
        accident: None,
        verdict: SolverVerdict::NotFound,
        candidates: 0,
        rejections: Vec::new(),
        recovered: None,
    };
    let kernel = sample.matrix.left_kernel();
    record.kernel_dim = kernel.dim();

    if cfg.accident_check {
        if let Some(acc) = detect_accident(sample) {
            record.accident = Some(acc);
            let m = acc.logarithm(p);
            if cfg.group.scalar_mul(m) == cfg.target {
                record.verdict = SolverVerdict::Skipped;
                record.recovered = Some(m);
                return record;
            }
        }
    }

    let Ok(inst) = ProblemLInstance::new(kernel, cfg.l as usize) else {
        record.verdict = SolverVerdict::DimensionAnomaly;
        return record;
    };
    let stream = candidates(cfg.solver, &inst, cfg.enumeration_budget).expect("budget validated with the config");
    for v in stream {
        record.candidates += 1;
        record.verdict = SolverVerdict::Found;
        debug_assert!(inst.accepts(&v));
        match decode_solution(&v, &sample.p_multipliers, &sample.q_multipliers, p) {
            Ok(m) if cfg.group.scalar_mul(m) == cfg.target => {
                record.recovered = Some(m);
                return record;
            }
            Ok(_) => record.rejections.push(RejectReason::VerificationFailed),
            Err(reason) => record.rejections.push(reason),
        }
    }
    record
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AttackResult {
    Recovered { m: u64 },
    IterationsExhausted { iterations: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttackOutcome {
    pub result: AttackResult,
    pub iterations_used: u64,
    pub log: Vec<IterationRecord>,
    /// Multipliers `(r, r')` of the collision that solved the instance, if any.
    pub accident: Option<(u64, u64)>,
}

impl AttackOutcome {
    pub fn logarithm(&self) -> Option<u64> {
        match self.result {
            AttackResult::Recovered { m } => Some(m),
            AttackResult::IterationsExhausted { .. } => None,
        }
    }
}

/// Iterates until a decoded `m` satisfies `m P = Q` or the budget runs out.
///
/// Every returned logarithm has been checked against the target.
pub fn run_attack(cfg: &AttackConfig) -> Result<AttackOutcome, AttackError> {
    cfg.validate()?;
    if cfg.target.is_identity() {
        return Ok(AttackOutcome {
            result: AttackResult::Recovered { m: 0 },
            iterations_used: 0,
            log: Vec::new(),
            accident: None,
        });
    }
    let max = cfg.effective_max_iterations();
    let mut log = Vec::new();
    for index in 0..max {
        let record = run_iteration(cfg, index);
        let recovered = record.recovered;
        let accident = record
            .accident
            .filter(|_| record.verdict == SolverVerdict::Skipped)
            .map(|a| (a.p_multiplier, a.q_multiplier));
        log.push(record);
        if let Some(m) = recovered {
            assert_eq!(cfg.group.scalar_mul(m), cfg.target, "unverified logarithm");
            return Ok(AttackOutcome {
                result: AttackResult::Recovered { m },
                iterations_used: index + 1,
                log,
                accident,
            });
        }
    }
    Ok(AttackOutcome {
        result: AttackResult::IterationsExhausted { iterations: max },
        iterations_used: max,
        log,
        accident: None,
    })
}

/// Ground truth from the multipliers alone: a `3n'`-subset of
/// `{r_i} ∪ {-m r'_j}` summing to zero mod `p`, with at least one P-entry and
/// a nonzero Q-multiplier sum. Positions use the matrix row numbering.
pub fn subset_sum_oracle(
    p_multipliers: &[u64],
    q_multipliers: &[u64],
    m_true: u64,
    p: PrimeModulus,
    budget: u128,
) -> Result<Option<Vec<usize>>, AttackError> {
    let m = p.reduce(m_true);
    if m == 0 {
        return Err(AttackError::ZeroLogarithm);
    }
    let split = p_multipliers.len();
    let n = split + q_multipliers.len();
    let k = split + 1;
    if binomial(n as u64, k as u64).is_none_or(|c| c > budget) {
        return Err(AttackError::EnumerationBudget { n, k, budget });
    }
    let entries: Vec<u64> = p_multipliers
        .iter()
        .map(|&r| p.reduce(r))
        .chain(q_multipliers.iter().map(|&r| p.neg(p.mul(m, p.reduce(r)))))
        .collect();
    Ok((0..n).combinations(k).find(|subset| {
        if subset[0] >= split {
            return false;
        }
        let b =
            subset.iter().filter(|&&i| i >= split).fold(0, |acc, &i| p.add(acc, p.reduce(q_multipliers[i - split])));
        b != 0 && subset.iter().fold(0, |acc, &i| p.add(acc, entries[i])) == 0
    }))
}

/// The Problem L instance of an iteration, for harnesses that study solvers.
pub fn iteration_instance(cfg: &AttackConfig, index: u64) -> (IterationSample, KernelBasis) {
    let sample = sample_iteration(cfg, index);
    let kernel = sample.matrix.left_kernel();
    (sample, kernel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dlp_oracles::{solve_bsgs, DlpQuery};
    use crate::fixtures::{medium_group, small_group};

    fn config(group: GroupSpec, m: u64, n_prime: u32) -> AttackConfig {
        let target = group.scalar_mul(m);
        AttackConfig::new(group, target, n_prime)
    }

    #[test]
    fn layout_sizes() {
        let cfg = config(small_group(), 7, 1).with_seed(4);
        let s = sample_iteration(&cfg, 0);
        assert_eq!(s.p_multipliers.len(), 2);
        assert_eq!(s.q_multipliers.len(), 4);
        assert_eq!((s.matrix.rows(), s.matrix.cols()), (6, 3));

        let cfg = config(medium_group(), 7, 2);
        let s = sample_iteration(&cfg, 3);
        assert_eq!((s.p_multipliers.len(), s.q_multipliers.len()), (5, 7));
        assert_eq!((s.matrix.rows(), s.matrix.cols()), (12, 6));
        assert!(s.p_multipliers.iter().all_unique());
        assert!(s.q_multipliers.iter().all_unique());
        assert!(s.p_multipliers.iter().chain(&s.q_multipliers).all(|&r| (1..907).contains(&r)));
    }

    #[test]
    fn rows_follow_layout() {
        let g = medium_group();
        let cfg = config(g, 123, 2);
        let s = sample_iteration(&cfg, 0);
        let basis = MonomialBasis::new(2);
        for (i, &r) in s.p_multipliers.iter().enumerate() {
            let row: Vec<u64> = basis.evaluate_row(&g.scalar_mul(r)).iter().map(|e| e.residue()).collect();
            assert_eq!(s.matrix.row(i), row.as_slice());
        }
        for (j, &r) in s.q_multipliers.iter().enumerate() {
            let pt = g.curve().neg(&g.scalar_mul(123 * r));
            let row: Vec<u64> = basis.evaluate_row(&pt).iter().map(|e| e.residue()).collect();
            assert_eq!(s.matrix.row(5 + j), row.as_slice());
        }
    }

    #[test]
    fn same_seed_same_sample() {
        let cfg = config(medium_group(), 5, 2).with_seed(99);
        let (a, b) = (sample_iteration(&cfg, 7), sample_iteration(&cfg, 7));
        assert_eq!(a.p_multipliers, b.p_multipliers);
        assert_eq!(a.q_multipliers, b.q_multipliers);
        assert_ne!(sample_iteration(&cfg, 8).p_multipliers, a.p_multipliers);
    }

    #[test]
    fn validation() {
        let g = small_group();
        assert_eq!(config(g, 3, 0).validate(), Err(AttackError::DegreeTooSmall));
        assert_eq!(config(g, 3, 1).with_l(0).validate(), Err(AttackError::NoExtraRows));
        assert!(config(g, 3, 2).validate().is_ok());
        assert_eq!(config(g, 3, 4).validate(), Err(AttackError::TooManyRows { rows: 24, available: 18 }));
        let other = crate::curve::Curve::new(g.curve().field(), 2, 8).unwrap();
        let stray = (0..17).find_map(|x| (0..17).find_map(|y| other.point(x, y).ok())).unwrap();
        let mut bad = config(g, 3, 1);
        bad.target = stray;
        assert_eq!(bad.validate(), Err(AttackError::TargetNotOnCurve));
        let cfg = config(medium_group(), 3, 4);
        let mut tight = cfg.clone();
        tight.enumeration_budget = 1000;
        assert!(matches!(tight.validate(), Err(AttackError::EnumerationBudget { .. })));
        assert!(tight.with_solver(SolverKind::Alg2).validate().is_ok());
    }

    #[test]
    fn decode_rejections() {
        let p = PrimeModulus::new(19).unwrap();
        let (i, j) = ([3u64, 5], [1u64, 2, 4, 6]);
        // Support only in the Q block.
        let v = ZeroPatternSolution::from_vector(p, vec![0, 0, 1, 1, 1, 0]);
        assert_eq!(decode_solution(&v, &i, &j, p), Err(RejectReason::MissingPBlock));
        // Too many zeros.
        let v = ZeroPatternSolution::from_vector(p, vec![1, 0, 1, 0, 0, 0]);
        assert_eq!(decode_solution(&v, &i, &j, p), Err(RejectReason::SupportSize { support: 2, expected: 3 }));
        // B = 2 + 17 = 0 mod 19.
        let j0 = [2u64, 17, 4, 6];
        let v = ZeroPatternSolution::from_vector(p, vec![1, 0, 1, 1, 0, 0]);
        assert_eq!(decode_solution(&v, &i, &j0, p), Err(RejectReason::BNotInvertible));
        // A = 3, B = 1 + 4 = 5, m = 3 * 5^-1 = 3 * 4 = 12 mod 19
        let v = ZeroPatternSolution::from_vector(p, vec![7, 0, 2, 0, 5, 0]);
        assert_eq!(decode_solution(&v, &i, &j, p), Ok(12));
    }

    #[test]
    fn planted_subset_decodes_to_m() {
        let g = medium_group();
        let p = g.order();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut checked = 0;
        while checked < 40 {
            let m = rng.random_range(1..907);
            let cfg = config(g, m, 2).with_seed(rng.random());
            let base = sample_iteration(&cfg, 0);
            // Plant: P-rows {0, 1}, Q-rows {0, 1, 2, 3}; fix r_0 so that A = m B.
            let mut i = base.p_multipliers.clone();
            let j = base.q_multipliers.clone();
            let b = j[..4].iter().fold(0, |acc, &r| p.add(acc, r));
            let r0 = p.sub(p.mul(m, b), i[1]);
            if b == 0 || r0 == 0 || i[1..].contains(&r0) {
                continue;
            }
            i[0] = r0;
            let sample = IterationSample::from_multipliers(&g, &cfg.target, 2, i.clone(), j.clone());
            if detect_accident(&sample).is_some() {
                continue;
            }
            let witness = subset_sum_oracle(&i, &j, m, p, u128::MAX).unwrap().expect("planted witness");
            assert!(witness.iter().filter(|&&x| x < 5).count() >= 1);
            let inst = ProblemLInstance::new(sample.matrix.left_kernel(), 6).unwrap();
            let planted_zeros: Vec<usize> = vec![2, 3, 4, 9, 10, 11];
            let found = ExhaustiveSolver::default()
                .solutions(&inst)
                .unwrap()
                .find(|s| s.zero_positions() == planted_zeros.as_slice())
                .expect("kernel vector on the planted support");
            assert_eq!(decode_solution(&found, &i, &j, p), Ok(m));
            checked += 1;
        }
    }

    #[test]
    fn planted_accident_is_detected() {
        let g = medium_group();
        let p = g.order();
        for m in [2u64, 100, 906] {
            let cfg = config(g, m, 2);
            let base = sample_iteration(&cfg, 0);
            let mut i = base.p_multipliers.clone();
            // r_1 = m r'_2 gives r_1 P = r'_2 Q.
            i[1] = p.mul(m, base.q_multipliers[2]);
            if i[..1].contains(&i[1]) || i[2..].contains(&i[1]) {
                continue;
            }
            let s = IterationSample::from_multipliers(&g, &cfg.target, 2, i, base.q_multipliers.clone());
            let acc = detect_accident(&s).unwrap();
            assert_eq!(acc.logarithm(p), m);

            // Same thing through the full iteration, and not at all when disabled.
            let rec = run_sample(&cfg, 0, &s);
            assert_eq!(rec.verdict, SolverVerdict::Skipped);
            assert_eq!(rec.recovered, Some(m));
            let rec = run_sample(&cfg.clone().with_accident_check(false), 0, &s);
            assert!(rec.accident.is_none());
        }
    }

    #[test]
    fn opposite_accident_is_detected() {
        let g = medium_group();
        let p = g.order();
        let m = 321;
        let cfg = config(g, m, 2);
        let base = sample_iteration(&cfg, 1);
        let mut i = base.p_multipliers.clone();
        // r_0 = -m r'_0 gives r_0 P = -r'_0 Q, an identical row.
        i[0] = p.neg(p.mul(m, base.q_multipliers[0]));
        let s = IterationSample::from_multipliers(&g, &cfg.target, 2, i, base.q_multipliers.clone());
        assert!(s.has_repeated_rows());
        let acc = detect_accident(&s).unwrap();
        assert!(!acc.negated);
        assert_eq!(acc.logarithm(p), m);
    }

    #[test]
    fn random_iterations_rarely_collide() {
        let cfg = config(medium_group(), 555, 2).with_seed(1);
        let hits = (0..200).filter(|&k| detect_accident(&sample_iteration(&cfg, k)).is_some()).count();
        // expected rate is about 2 * 5 * 7 / 907
        assert!(hits < 40, "{hits}");
    }

    #[test]
    fn small_group_end_to_end() {
        let g = small_group();
        for m in 1..19 {
            for seed in 0..3 {
                let cfg = config(g, m, 1).with_seed(seed).with_max_iterations(200);
                let out = run_attack(&cfg).unwrap();
                let got = out.logarithm().expect("recovered within 200 iterations");
                assert_eq!(got, m);
                assert_eq!(solve_bsgs(&DlpQuery::new(&g, cfg.target)), Ok(got));
                assert!(out.iterations_used <= 200);
            }
        }
    }

    #[test]
    fn unit_logarithm_is_mostly_an_accident() {
        let g = small_group();
        let mut accidents = 0;
        for seed in 0..20 {
            let out = run_attack(&config(g, 1, 1).with_seed(seed)).unwrap();
            assert_eq!(out.logarithm(), Some(1));
            accidents += out.accident.is_some() as u32;
        }
        assert!(accidents >= 10, "{accidents}");
    }

    #[test]
    fn identity_target() {
        let g = small_group();
        let cfg = AttackConfig::new(g, g.curve().identity(), 1);
        assert_eq!(run_attack(&cfg).unwrap().logarithm(), Some(0));
    }

    #[test]
    fn deterministic_outcome() {
        let cfg = config(medium_group(), 444, 2).with_seed(2024).with_solver(SolverKind::Alg2ThenExhaustive);
        assert_eq!(run_attack(&cfg).unwrap(), run_attack(&cfg).unwrap());
    }

    #[test]
    fn every_solver_is_sound() {
        let g = medium_group();
        for solver in [SolverKind::Alg2, SolverKind::Exhaustive, SolverKind::Alg2ThenExhaustive] {
            let cfg = config(g, 600, 2).with_solver(solver).with_max_iterations(30).with_seed(8);
            let out = run_attack(&cfg).unwrap();
            if let Some(m) = out.logarithm() {
                assert_eq!(m, 600);
            }
            for rec in &out.log {
                assert_eq!(rec.kernel_dim, 6);
            }
        }
    }

    #[test]
    fn oracle_rejects_zero_logarithm() {
        let p = PrimeModulus::new(19).unwrap();
        assert_eq!(subset_sum_oracle(&[1, 2], &[3, 4, 5, 6], 0, p, 1000), Err(AttackError::ZeroLogarithm));
    }
}
