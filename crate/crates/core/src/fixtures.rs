//! Prime-order groups used by tests, the verification suites and the docs.

use std::sync::OnceLock;

use crate::curve::{find_prime_order_curve, Curve, GroupSpec};
use crate::field::PrimeModulus;

/// `y^2 = x^3 + 2x + 2` over `F_17`, generator `(5, 1)` of order 19.
pub fn small_group() -> GroupSpec {
    let curve = Curve::new(PrimeModulus::new(17).unwrap(), 2, 2).unwrap();
    GroupSpec::new(curve, curve.point(5, 1).unwrap(), 19).unwrap()
}

/// First curve over `F_887` (in `(a, b)` scan order) with 907 points.
pub fn medium_group() -> GroupSpec {
    static GROUP: OnceLock<GroupSpec> = OnceLock::new();
    *GROUP.get_or_init(|| {
        find_prime_order_curve(PrimeModulus::new(887).unwrap(), 907, 907).expect("a 907-point curve exists over F_887")
    })
}

/// The fixture best suited to a given `n'`: the order-19 group when the
/// `6n'`-row layout fits, otherwise the order-907 group.
pub fn group_for(n_prime: u32) -> GroupSpec {
    if 6 * n_prime as u64 <= 18 {
        small_group()
    } else {
        medium_group()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_prime_order() {
        let g = small_group();
        assert_eq!(g.curve().order().unwrap(), 19);
        let g = medium_group();
        assert_eq!(g.order().value(), 907);
        assert_eq!(g.curve().order().unwrap(), 907);
        assert_eq!(g.curve().field().value(), 887);
        assert_eq!((g.curve().a().residue(), g.curve().b().residue()), (1, 124));
    }
}
