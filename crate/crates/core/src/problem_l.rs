//! Finding a vector with at least `l` zero coordinates in the span of an
//! `l`-dimensional subspace of `F_q^(3n'+l)`.
//!
//! Two solvers are provided: the multiple-Gaussian-elimination heuristic, which
//! diagonalizes two `l x l` column blocks in turn and inspects the basis rows
//! at four checkpoints, and an exhaustive solver that tests every `l`-subset of
//! positions with a rank computation. The exhaustive solver is complete.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{binomial, Ratio};
use crate::field::{FieldElement, PrimeModulus};
use crate::linalg::{BlockEliminator, KernelBasis};

/// Default cap on the number of position subsets the exhaustive solver visits.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemLError {
    #[error("basis has dimension {dim}, expected {required}")]
    DimensionMismatch { dim: usize, required: usize },
    #[error("ambient dimension {ambient} is smaller than the zero requirement {required}")]
    AmbientTooSmall { ambient: usize, required: usize },
    #[error("C({n}, {k}) position subsets exceed the enumeration budget {budget}")]
    BudgetExceeded { n: usize, k: usize, budget: u128 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemLInstance {
    basis: KernelBasis,
    required_zeros: usize,
}

impl ProblemLInstance {
    pub fn new(basis: KernelBasis, required_zeros: usize) -> Result<Self, ProblemLError> {
        if basis.dim() != required_zeros {
            return Err(ProblemLError::DimensionMismatch { dim: basis.dim(), required: required_zeros });
        }
        if basis.ambient() < required_zeros {
            return Err(ProblemLError::AmbientTooSmall { ambient: basis.ambient(), required: required_zeros });
        }
        Ok(ProblemLInstance { basis, required_zeros })
    }

    pub fn basis(&self) -> &KernelBasis {
        &self.basis
    }

    pub fn required_zeros(&self) -> usize {
        self.required_zeros
    }

    /// Soundness check for a claimed solution.
    pub fn accepts(&self, s: &ZeroPatternSolution) -> bool {
        s.vector.len() == self.basis.ambient()
            && !s.is_zero()
            && s.zero_positions.len() >= self.required_zeros
            && s.zero_positions.iter().all(|&i| s.vector[i] == 0)
            && self.basis.contains(&s.vector)
    }
}

/// A nonzero vector of the span together with its zero positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroPatternSolution {
    modulus: PrimeModulus,
    vector: Vec<u64>,
    zero_positions: Vec<usize>,
}

impl ZeroPatternSolution {
    pub fn from_vector(modulus: PrimeModulus, vector: Vec<u64>) -> Self {
        let zero_positions = vector.iter().positions(|&v| v == 0).collect();
        ZeroPatternSolution { modulus, vector, zero_positions }
    }

    pub fn vector(&self) -> &[u64] {
        &self.vector
    }

    pub fn entry(&self, i: usize) -> FieldElement {
        self.modulus.element(self.vector[i])
    }

    pub fn zero_positions(&self) -> &[usize] {
        &self.zero_positions
    }

    pub fn support(&self) -> Vec<usize> {
        self.vector.iter().positions(|&v| v != 0).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.zero_positions.len() == self.vector.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Alg2,
    Exhaustive,
    Alg2ThenExhaustive,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Alg2 => "alg2",
            SolverKind::Exhaustive => "exhaustive",
            SolverKind::Alg2ThenExhaustive => "alg2-then-exhaustive",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "alg2" => Ok(SolverKind::Alg2),
            "exhaustive" => Ok(SolverKind::Exhaustive),
            "alg2-then-exhaustive" => Ok(SolverKind::Alg2ThenExhaustive),
            other => Err(format!("unknown solver `{other}` (expected alg2, exhaustive or alg2-then-exhaustive)")),
        }
    }
}

/// The four inspection points of the elimination heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Checkpoint {
    FirstBlockTriangular,
    FirstBlockDiagonal,
    SecondBlockTriangular,
    SecondBlockDiagonal,
}

/// Everything the elimination heuristic saw, in checkpoint order.
#[derive(Debug, Clone, Default)]
pub struct Alg2Trace {
    /// Rows with enough zeros, deduplicated by zero pattern, in discovery order.
    pub candidates: Vec<(Checkpoint, ZeroPatternSolution)>,
    /// Blocks (0 or 1) where some diagonal position had no pivot.
    pub singular_blocks: Vec<usize>,
}

/// Runs all four checkpoints and records every qualifying row.
///
/// Blocks are the column windows `[0, l)` and `[l, 2l)`; the second is skipped
/// when the ambient space is narrower than `2l`.
pub fn alg2_trace(inst: &ProblemLInstance) -> Alg2Trace {
    let l = inst.required_zeros;
    let ambient = inst.basis.ambient();
    let q = inst.basis.modulus();
    let mut trace = Alg2Trace::default();
    let mut seen = HashSet::new();
    let mut basis = inst.basis.clone();

    let mut inspect = |stage: Checkpoint, m: &crate::linalg::MatrixFq, trace: &mut Alg2Trace| {
        for i in 0..m.rows() {
            let row = m.row(i);
            if row.iter().filter(|&&v| v == 0).count() >= l {
                let s = ZeroPatternSolution::from_vector(q, row.to_vec());
                if seen.insert(s.zero_positions.clone()) {
                    trace.candidates.push((stage, s));
                }
            }
        }
    };

    if l == 0 {
        return trace;
    }
    let stages = [
        (0, Checkpoint::FirstBlockTriangular, Checkpoint::FirstBlockDiagonal),
        (1, Checkpoint::SecondBlockTriangular, Checkpoint::SecondBlockDiagonal),
    ];
    for (block, tri, diag) in stages {
        let cols = block * l..(block + 1) * l;
        if cols.end > ambient {
            break;
        }
        let mut e = BlockEliminator::new(&basis, cols).expect("block fits and matches the dimension");
        e.lower_triangular();
        inspect(tri, e.matrix(), &mut trace);
        e.diagonalize();
        inspect(diag, e.matrix(), &mut trace);
        let r = e.finish();
        if r.singular {
            trace.singular_blocks.push(block);
        }
        basis = r.basis;
    }
    trace
}

/// First row with at least `l` zeros met at any checkpoint, or `None`.
pub fn solve_alg2(inst: &ProblemLInstance) -> Option<ZeroPatternSolution> {
    alg2_trace(inst).candidates.into_iter().next().map(|(_, s)| s)
}

/// Complete solver over all `l`-subsets of positions.
#[derive(Debug, Clone, Copy)]
pub struct ExhaustiveSolver {
    pub budget: u128,
}

impl Default for ExhaustiveSolver {
    fn default() -> Self {
        ExhaustiveSolver { budget: DEFAULT_ENUMERATION_BUDGET }
    }
}

impl ExhaustiveSolver {
    pub fn with_budget(budget: u128) -> Self {
        ExhaustiveSolver { budget }
    }

    /// Every distinct zero pattern reachable from an `l`-subset of positions.
    ///
    /// Subsets are visited in lexicographic order. For a subset `Z`, the basis
    /// restricted to the columns of `Z` is singular exactly when the span holds a
    /// nonzero vector vanishing on `Z`; that vector is yielded unless an earlier
    /// subset already produced the same zero pattern.
    pub fn solutions<'a>(
        &self,
        inst: &'a ProblemLInstance,
    ) -> Result<impl Iterator<Item = ZeroPatternSolution> + 'a, ProblemLError> {
        let n = inst.basis.ambient();
        let l = inst.required_zeros;
        let subsets = binomial(n as u64, l as u64);
        if subsets.is_none_or(|c| c > self.budget) {
            return Err(ProblemLError::BudgetExceeded { n, k: l, budget: self.budget });
        }
        let q = inst.basis.modulus();
        let mut seen = HashSet::new();
        Ok((0..n).combinations(l).filter_map(move |zeros| {
            let restricted = inst.basis.matrix().select_columns(&zeros);
            let null = restricted.left_kernel();
            if null.dim() == 0 {
                return None;
            }
            let v = inst.basis.matrix().left_mul(null.vector(0));
            let s = ZeroPatternSolution::from_vector(q, v);
            seen.insert(s.zero_positions.clone()).then_some(s)
        }))
    }

    pub fn solve(&self, inst: &ProblemLInstance) -> Result<Option<ZeroPatternSolution>, ProblemLError> {
        Ok(self.solutions(inst)?.next())
    }
}

pub fn solve_exhaustive(inst: &ProblemLInstance) -> Result<Option<ZeroPatternSolution>, ProblemLError> {
    ExhaustiveSolver::default().solve(inst)
}

/// Heuristic conditional success of the elimination solver: `l^2 / C(3n'+l, l)`.
pub fn conditional_success_estimate(n_prime: u32, l: u32) -> Ratio {
    let c = binomial(3 * n_prime as u64 + l as u64, l as u64).expect("binomial fits in u128");
    Ratio::new((l as u128) * (l as u128), c)
}
