//! Counting and probability model for the attack.
//!
//! Partition counts of a residue into `k` distinct nonzero parts come in two
//! forms: the closed-form product evaluated exactly (and audited), and an
//! exhaustive subset enumeration that is treated as authoritative.

use std::fmt;

use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

use crate::field::is_prime;

pub const DEFAULT_PARTITION_BUDGET: u128 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("p = {0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("need 2 < k < p, got k = {k}, p = {p}")]
    PartsOutOfRange { k: u64, p: u64 },
    #[error("C({n}, {k}) subsets exceed the enumeration budget {budget}")]
    BudgetExceeded { n: u64, k: u64, budget: u128 },
}

/// `C(n, k)`, or `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by i + 1 at every step.
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// An exact non-negative rational kept in the form it was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Ratio {
    pub numerator: u128,
    pub denominator: u128,
}

impl Ratio {
    pub fn new(numerator: u128, denominator: u128) -> Self {
        assert!(denominator != 0, "zero denominator");
        Ratio { numerator, denominator }
    }

    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    pub fn as_integer(&self) -> Option<u128> {
        self.numerator.is_multiple_of(self.denominator).then(|| self.numerator / self.denominator)
    }

    pub fn reduced(&self) -> Ratio {
        let g = gcd(self.numerator, self.denominator).max(1);
        Ratio { numerator: self.numerator / g, denominator: self.denominator / g }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.reduced();
        if r.denominator == 1 {
            write!(f, "{}", r.numerator)
        } else {
            write!(f, "{}/{}", r.numerator, r.denominator)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionQuery {
    pub m: u64,
    pub p: u64,
    pub k: u64,
}

impl PartitionQuery {
    pub fn new(m: u64, p: u64, k: u64) -> Result<Self, AnalysisError> {
        if p == 2 || !is_prime(p) {
            return Err(AnalysisError::NotOddPrime(p));
        }
        if k <= 2 || k >= p {
            return Err(AnalysisError::PartsOutOfRange { k, p });
        }
        Ok(PartitionQuery { m: m % p, p, k })
    }
}

/// `(p-1)(p-2)...(p-k+2)(p-k) / k!`, exact and unreduced.
///
/// The value does not depend on `m` and need not be an integer; callers
/// inspect [`Ratio::as_integer`].
pub fn partition_count_formula(qy: &PartitionQuery) -> Ratio {
    let (p, k) = (qy.p as u128, qy.k as u128);
    let head: u128 = (1..=k - 2).map(|i| p - i).product();
    let factorial: u128 = (1..=k).product();
    Ratio::new(head * (p - k), factorial)
}

/// Number of `k`-subsets of `{1, ..., p-1}` summing to each residue `m`.
pub fn partition_counts_all(p: u64, k: u64, budget: u128) -> Result<Vec<u64>, AnalysisError> {
    let subsets = binomial(p - 1, k);
    if subsets.is_none_or(|c| c > budget) {
        return Err(AnalysisError::BudgetExceeded { n: p - 1, k, budget });
    }
    let mut counts = vec![0u64; p as usize];
    for parts in (1..p).combinations(k as usize) {
        let s = parts.iter().fold(0, |acc, &x| (acc + x) % p);
        counts[s as usize] += 1;
    }
    Ok(counts)
}

/// Exact count of `k` distinct nonzero residues summing to `m` modulo `p`.
pub fn partition_count_oracle(qy: &PartitionQuery) -> Result<u64, AnalysisError> {
    Ok(partition_counts_all(qy.p, qy.k, DEFAULT_PARTITION_BUDGET)?[qy.m as usize])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditRow {
    pub p: u64,
    pub k: u64,
    pub m: u64,
    pub formula: Ratio,
    pub oracle: u64,
}

impl AuditRow {
    pub fn matches(&self) -> bool {
        self.formula.as_integer() == Some(self.oracle as u128)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionAudit {
    pub rows: Vec<AuditRow>,
    /// `(p, k)` pairs whose oracle counts fail to sum to `C(p-1, k)`.
    pub inconsistent: Vec<(u64, u64)>,
}

impl PartitionAudit {
    pub fn oracle_consistent(&self) -> bool {
        self.inconsistent.is_empty()
    }

    pub fn discrepancies(&self) -> impl Iterator<Item = &AuditRow> {
        self.rows.iter().filter(|r| !r.matches())
    }

    /// `p,k,m,formula,oracle,match`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,k,m,formula,oracle,match\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{},{},{}\n", r.p, r.k, r.m, r.formula, r.oracle, r.matches()));
        }
        out
    }
}

/// Formula against oracle for every `m`, over the given primes and part counts.
///
/// Pairs with `k >= p` have no partitions into distinct nonzero parts and are skipped.
pub fn audit_partitions(primes: &[u64], parts: &[u64]) -> Result<PartitionAudit, AnalysisError> {
    let mut rows = Vec::new();
    let mut inconsistent = Vec::new();
    for &p in primes {
        for &k in parts.iter().filter(|&&k| k < p) {
            let formula = partition_count_formula(&PartitionQuery::new(0, p, k)?);
            let counts = partition_counts_all(p, k, DEFAULT_PARTITION_BUDGET)?;
            let total: u128 = counts.iter().map(|&c| c as u128).sum();
            if Some(total) != binomial(p - 1, k) {
                inconsistent.push((p, k));
            }
            rows.extend(counts.iter().enumerate().map(|(m, &oracle)| AuditRow { p, k, m: m as u64, formula, oracle }));
        }
    }
    Ok(PartitionAudit { rows, inconsistent })
}

/// `1 - (1 - 1/p)^c`, computed without cancellation.
pub fn per_iteration_success(p: u64, subsets: u128) -> f64 {
    let log_miss = (-1.0 / p as f64).ln_1p();
    -(subsets as f64 * log_miss).exp_m1()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityModel {
    pub p: u64,
    pub n_prime: u32,
    pub l: u32,
    /// `C(3n'+l, l)`
    pub subsets: u128,
    /// `1 - (1 - 1/p)^C`
    pub per_iteration: f64,
    /// `l^2 / C`
    pub alg2_conditional: Ratio,
    /// `per_iteration * l^2 / C`
    pub combined: f64,
    /// `0.6 (ln p)^2 / p`
    pub overall_natural_log: f64,
    /// `0.6 (log2 p)^2 / p`
    pub overall_log2: f64,
}

pub fn success_model(p: u64, n_prime: u32, l: u32) -> ProbabilityModel {
    let subsets = binomial(3 * n_prime as u64 + l as u64, l as u64).expect("binomial fits in u128");
    let per_iteration = per_iteration_success(p, subsets);
    let alg2_conditional = Ratio::new(l as u128 * l as u128, subsets);
    let pf = p as f64;
    ProbabilityModel {
        p,
        n_prime,
        l,
        subsets,
        per_iteration,
        alg2_conditional,
        combined: per_iteration * alg2_conditional.value(),
        overall_natural_log: 0.6 * pf.ln().powi(2) / pf,
        overall_log2: 0.6 * pf.log2().powi(2) / pf,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterChoice {
    pub n_prime: u32,
    pub l: u32,
    /// `C(6n', 3n')`
    pub subsets: u128,
    /// `4^n / sqrt(pi n)` with `n = 3n'`
    pub stirling_estimate: f64,
}

/// Smallest `n'` with `l = 3n'` and `C(6n', 3n') >= p`.
pub fn select_parameters(p: u64) -> ParameterChoice {
    let mut n_prime = 1u32;
    loop {
        let n = 3 * n_prime as u64;
        let subsets = binomial(2 * n, n).expect("central binomial fits for 64-bit p");
        if subsets >= p as u128 {
            let stirling_estimate = 4f64.powi(n as i32) / (std::f64::consts::PI * n as f64).sqrt();
            return ParameterChoice { n_prime, l: 3 * n_prime, subsets, stirling_estimate };
        }
        n_prime += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(12, 6), Some(924));
        assert_eq!(binomial(6, 3), Some(20));
        assert_eq!(binomial(18, 9), Some(48620));
        assert_eq!(binomial(4, 7), Some(0));
        assert_eq!(binomial(0, 0), Some(1));
        // Pascal's rule as an independent check
        for n in 1..40u64 {
            for k in 1..n {
                assert_eq!(binomial(n, k).unwrap(), binomial(n - 1, k - 1).unwrap() + binomial(n - 1, k).unwrap());
            }
        }
    }

    #[test]
    fn formula_examples() {
        // k = 3: (p-1)(p-3)/3!
        let r = partition_count_formula(&PartitionQuery::new(0, 7, 3).unwrap());
        assert_eq!(r, Ratio::new(24, 6));
        assert_eq!(r.as_integer(), Some(4));
        let r = partition_count_formula(&PartitionQuery::new(0, 11, 3).unwrap());
        assert_eq!(r, Ratio::new(80, 6));
        assert_eq!(r.as_integer(), None);
        assert_eq!(r.to_string(), "40/3");
        let r = partition_count_formula(&PartitionQuery::new(0, 5, 3).unwrap());
        assert_eq!(r, Ratio::new(8, 6));
        assert_eq!(r.as_integer(), None);
        // k = 4: (p-1)(p-2)(p-4)/4!
        let r = partition_count_formula(&PartitionQuery::new(0, 13, 4).unwrap());
        assert_eq!(r, Ratio::new(12 * 11 * 9, 24));
    }

    #[test]
    fn query_domain() {
        assert_eq!(PartitionQuery::new(0, 9, 3), Err(AnalysisError::NotOddPrime(9)));
        assert_eq!(PartitionQuery::new(0, 2, 3), Err(AnalysisError::NotOddPrime(2)));
        assert_eq!(PartitionQuery::new(0, 7, 2), Err(AnalysisError::PartsOutOfRange { k: 2, p: 7 }));
        assert_eq!(PartitionQuery::new(0, 5, 5), Err(AnalysisError::PartsOutOfRange { k: 5, p: 5 }));
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(partition_count_oracle(&PartitionQuery::new(0, 7, 3).unwrap()), Ok(2));
        for m in 0..5 {
            let c = partition_count_oracle(&PartitionQuery::new(m, 5, 4).unwrap()).unwrap();
            assert_eq!(c, u64::from(m == 0));
        }
        assert!(matches!(partition_counts_all(101, 20, 1000), Err(AnalysisError::BudgetExceeded { .. })));
    }

    #[test]
    fn audit_table() {
        let audit = audit_partitions(&[5, 7, 11, 13, 17], &[3, 4]).unwrap();
        assert!(audit.oracle_consistent());
        assert!(audit.discrepancies().any(|r| r.p == 7 && r.k == 3 && r.m == 0 && r.oracle == 2));
        let csv = audit.to_csv();
        assert!(csv.starts_with("p,k,m,formula,oracle,match\n"));
        assert!(csv.contains("\n7,3,0,4,2,false\n"));
    }

    #[test]
    fn model_examples() {
        let m = success_model(907, 2, 6);
        assert_eq!(m.subsets, 924);
        // Direct evaluation of 1 - (1 - 1/907)^924 by repeated multiplication.
        let direct = 1.0 - (0..924).fold(1.0f64, |acc, _| acc * (1.0 - 1.0 / 907.0));
        assert!((m.per_iteration - direct).abs() < 1e-12);
        assert!((m.per_iteration - 0.639).abs() < 0.001);
        assert_eq!(m.alg2_conditional, Ratio::new(36, 924));
        assert!((m.overall_natural_log - 0.6 * 907f64.ln().powi(2) / 907.0).abs() < 1e-15);

        // C = p drives the per-iteration success to 1 - 1/e.
        let target = 1.0 - (-1.0f64).exp();
        let big = 1_000_000_007u64;
        assert!((per_iteration_success(big, big as u128) - target).abs() < 1e-8);
    }

    #[test]
    fn per_iteration_monotone_in_subsets() {
        for p in [19u64, 907, 65537] {
            let mut prev = 0.0;
            for c in 1..2000u128 {
                let s = per_iteration_success(p, c);
                // strictly increasing until f64 rounding flattens it near 1
                assert!(s <= 1.0 && (s > prev || prev > 1.0 - 1e-12), "p={p} c={c}");
                prev = s;
            }
        }
    }

    #[test]
    fn parameter_table() {
        let table = [(1u32, 20u128), (2, 924), (3, 48620), (4, 2704156)];
        for p in [5u64, 7, 19, 20, 21, 907, 924, 925, 48620, 48621, 1_000_000] {
            let expected = table.iter().find(|(_, c)| *c >= p as u128).unwrap();
            let choice = select_parameters(p);
            assert_eq!((choice.n_prime, choice.subsets), *expected, "p = {p}");
            assert_eq!(choice.l, 3 * choice.n_prime);
        }
        let s = select_parameters(907).stirling_estimate;
        assert!((s - 4f64.powi(6) / (std::f64::consts::PI * 6.0).sqrt()).abs() < 1e-9);
    }
}
