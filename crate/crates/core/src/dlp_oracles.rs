//! Generic discrete-log solvers used to plant and check ground truth.

use std::collections::HashMap;

use thiserror::Error;

use crate::curve::{GroupSpec, Point};

pub const BSGS_ORDER_LIMIT: u64 = 1 << 32;
pub const SCAN_ORDER_LIMIT: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DlpError {
    #[error("group order {order} exceeds the oracle limit {limit}")]
    BudgetExceeded { order: u64, limit: u64 },
    #[error("target is not in the subgroup generated by P")]
    NotInGroup,
}

#[derive(Debug, Clone, Copy)]
pub struct DlpQuery<'a> {
    pub group: &'a GroupSpec,
    pub target: Point,
}

impl<'a> DlpQuery<'a> {
    pub fn new(group: &'a GroupSpec, target: Point) -> Self {
        DlpQuery { group, target }
    }
}

/// Baby-step giant-step: `m = i * s + j` with `s = ceil(sqrt(p))`.
pub fn solve_bsgs(qy: &DlpQuery) -> Result<u64, DlpError> {
    let g = qy.group;
    let p = g.order().value();
    if p > BSGS_ORDER_LIMIT {
        return Err(DlpError::BudgetExceeded { order: p, limit: BSGS_ORDER_LIMIT });
    }
    let c = g.curve();
    if !c.contains(&qy.target) {
        return Err(DlpError::NotInGroup);
    }
    let mut s = (p as f64).sqrt() as u64;
    while s * s < p {
        s += 1;
    }
    let mut baby = HashMap::with_capacity(s as usize);
    let mut cur = c.identity();
    for j in 0..s {
        baby.entry(cur).or_insert(j);
        cur = c.add(&cur, &g.generator());
    }
    let giant = c.neg(&g.scalar_mul(s));
    let mut gamma = qy.target;
    for i in 0..s {
        if let Some(&j) = baby.get(&gamma) {
            return Ok((i * s + j) % p);
        }
        gamma = c.add(&gamma, &giant);
    }
    Err(DlpError::NotInGroup)
}

/// Linear scan over `r * P`.
pub fn solve_exhaustive_dlp(qy: &DlpQuery) -> Result<u64, DlpError> {
    let g = qy.group;
    let p = g.order().value();
    if p > SCAN_ORDER_LIMIT {
        return Err(DlpError::BudgetExceeded { order: p, limit: SCAN_ORDER_LIMIT });
    }
    let c = g.curve();
    let mut cur = c.identity();
    for r in 0..p {
        if cur == qy.target {
            return Ok(r);
        }
        cur = c.add(&cur, &g.generator());
    }
    Err(DlpError::NotInGroup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trivial_targets() {
        let g = fixtures::small_group();
        let c = g.curve();
        assert_eq!(solve_bsgs(&DlpQuery::new(&g, c.identity())), Ok(0));
        assert_eq!(solve_bsgs(&DlpQuery::new(&g, g.generator())), Ok(1));
        assert_eq!(solve_exhaustive_dlp(&DlpQuery::new(&g, g.scalar_mul(18))), Ok(18));
        assert_eq!(solve_bsgs(&DlpQuery::new(&g, g.scalar_mul(18))), Ok(18));
    }

    #[test]
    fn bsgs_agrees_with_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for g in [fixtures::small_group(), fixtures::medium_group()] {
            let p = g.order().value();
            for _ in 0..100 {
                let m = rng.random_range(0..p);
                let q = DlpQuery::new(&g, g.scalar_mul(m));
                assert_eq!(solve_bsgs(&q), Ok(m));
                assert_eq!(solve_exhaustive_dlp(&q), Ok(m));
            }
        }
    }

    #[test]
    fn off_curve_target_is_rejected() {
        let g = fixtures::small_group();
        // (5, 2) is not on y^2 = x^3 + 2x + 2 over F_17; build it through a different curve.
        let other = crate::curve::Curve::new(g.curve().field(), 2, 8).unwrap();
        let pt = (0..17).find_map(|x| (0..17).find_map(|y| other.point(x, y).ok())).unwrap();
        assert!(!g.curve().contains(&pt));
        assert_eq!(solve_bsgs(&DlpQuery::new(&g, pt)), Err(DlpError::NotInGroup));
        assert_eq!(solve_exhaustive_dlp(&DlpQuery::new(&g, pt)), Err(DlpError::NotInGroup));
    }
}
