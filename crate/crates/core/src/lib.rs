//! Las Vegas reduction of the elliptic curve discrete logarithm problem to a
//! zero-pattern search in the left kernel of a monomial matrix.
//!
//! Points `r_i P` and `-r'_j Q` are mapped to rows of degree-`n'` monomial
//! values. A left-kernel vector whose support is exactly `3n'` rows marks
//! points lying on a common degree-`n'` curve, hence summing to the identity,
//! which yields `m` as a ratio of multiplier sums.
//!
//! Modules, bottom up: [`field`], [`curve`], [`veronese`], [`linalg`],
//! [`problem_l`], [`attack`], with [`analysis`] for the probability model,
//! [`dlp_oracles`] for ground truth, and [`experiment`] / [`verify`] for the
//! desk-scale harness driven by the `ecdlp` binary.

pub mod analysis;
pub mod attack;
pub mod cli;
pub mod curve;
pub mod dlp_oracles;
pub mod experiment;
pub mod field;
pub mod fixtures;
pub mod linalg;
pub mod problem_l;
pub mod verify;
pub mod veronese;

pub use attack::{run_attack, AttackConfig, AttackOutcome};
pub use curve::{Curve, GroupSpec, Point};
pub use field::{FieldElement, PrimeModulus};
pub use linalg::{KernelBasis, MatrixFq};
pub use problem_l::{ProblemLInstance, SolverKind, ZeroPatternSolution};
