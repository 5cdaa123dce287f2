//! Short Weierstrass curves `y^2 z = x^3 + a x z^2 + b z^3` over prime fields.
//!
//! Points are kept in one of two normal forms, `(x : y : 1)` or the identity
//! `(0 : 1 : 0)`, so that a point determines its monomial row uniquely.

use std::fmt;

use thiserror::Error;

use crate::field::{FieldElement, FieldError, PrimeModulus};

/// Largest field size accepted by the enumeration-based point counter.
pub const DEFAULT_COUNT_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("field characteristic {0} is not supported (need q >= 5)")]
    UnsupportedCharacteristic(u64),
    #[error("curve is singular: 4a^3 + 27b^2 = 0")]
    Singular,
    #[error("point ({x}, {y}) is not on the curve")]
    NotOnCurve { x: u64, y: u64 },
    #[error("generator is the identity")]
    IdentityGenerator,
    #[error("order {order} does not annihilate the generator")]
    WrongOrder { order: u64 },
    #[error("field size {q} exceeds the point-count limit {limit}")]
    CountLimit { q: u64, limit: u64 },
    #[error("no prime-order curve over F_{q} with order in [{min}, {max}]")]
    SearchExhausted { q: u64, min: u64, max: u64 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A point in normalized projective coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Point {
    x: FieldElement,
    y: FieldElement,
    z: FieldElement,
}

impl Point {
    pub fn identity(q: PrimeModulus) -> Self {
        Point { x: q.zero(), y: q.one(), z: q.zero() }
    }

    pub fn is_identity(&self) -> bool {
        self.z.is_zero()
    }

    pub fn x(&self) -> FieldElement {
        self.x
    }

    pub fn y(&self) -> FieldElement {
        self.y
    }

    pub fn z(&self) -> FieldElement {
        self.z
    }

    /// Affine coordinates, or `None` for the identity.
    pub fn affine(&self) -> Option<(u64, u64)> {
        (!self.is_identity()).then(|| (self.x.residue(), self.y.residue()))
    }

    fn affine_unchecked(x: FieldElement, y: FieldElement) -> Self {
        Point { x, y, z: x.modulus().one() }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.affine() {
            Some((x, y)) => write!(f, "({x}, {y})"),
            None => write!(f, "O"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Curve {
    a: FieldElement,
    b: FieldElement,
}

impl Curve {
    pub fn new(q: PrimeModulus, a: u64, b: u64) -> Result<Self, CurveError> {
        if q.value() < 5 {
            return Err(CurveError::UnsupportedCharacteristic(q.value()));
        }
        let (a, b) = (q.element(a), q.element(b));
        let disc = q.element(4) * a.pow(3) + q.element(27) * b * b;
        if disc.is_zero() {
            return Err(CurveError::Singular);
        }
        Ok(Curve { a, b })
    }

    pub fn field(&self) -> PrimeModulus {
        self.a.modulus()
    }

    pub fn a(&self) -> FieldElement {
        self.a
    }

    pub fn b(&self) -> FieldElement {
        self.b
    }

    pub fn identity(&self) -> Point {
        Point::identity(self.field())
    }

    fn rhs(&self, x: FieldElement) -> FieldElement {
        x * x * x + self.a * x + self.b
    }

    pub fn contains(&self, p: &Point) -> bool {
        if p.x.modulus() != self.field() {
            return false;
        }
        if p.is_identity() {
            return p.x.is_zero() && p.y == self.field().one();
        }
        p.z == self.field().one() && p.y * p.y == self.rhs(p.x)
    }

    /// Affine point `(x, y)`, validated against the curve equation.
    pub fn point(&self, x: u64, y: u64) -> Result<Point, CurveError> {
        let q = self.field();
        let p = Point::affine_unchecked(q.element(x), q.element(y));
        if self.contains(&p) {
            Ok(p)
        } else {
            Err(CurveError::NotOnCurve { x, y })
        }
    }

    /// Normalizes a projective triple `(x : y : z)`; the triple must lie on the curve.
    pub fn normalize(&self, x: u64, y: u64, z: u64) -> Result<Point, CurveError> {
        let q = self.field();
        let (x, y, z) = (q.element(x), q.element(y), q.element(z));
        if z.is_zero() {
            // On the curve, z = 0 forces x = 0 and the class of (0 : 1 : 0).
            return if x.is_zero() && !y.is_zero() {
                Ok(self.identity())
            } else {
                Err(CurveError::NotOnCurve { x: x.residue(), y: y.residue() })
            };
        }
        let zi = z.inv()?;
        self.point((x * zi).residue(), (y * zi).residue())
    }

    pub fn neg(&self, p: &Point) -> Point {
        if p.is_identity() {
            *p
        } else {
            Point::affine_unchecked(p.x, -p.y)
        }
    }

    /// Chord-tangent addition.
    pub fn add(&self, p: &Point, r: &Point) -> Point {
        if p.is_identity() {
            return *r;
        }
        if r.is_identity() {
            return *p;
        }
        let q = self.field();
        let slope = if p.x == r.x {
            if p.y != r.y || p.y.is_zero() {
                return self.identity();
            }
            (q.element(3) * p.x * p.x + self.a) / (q.element(2) * p.y)
        } else {
            (r.y - p.y) / (r.x - p.x)
        };
        let x3 = slope * slope - p.x - r.x;
        let y3 = slope * (p.x - x3) - p.y;
        Point::affine_unchecked(x3, y3)
    }

    pub fn double(&self, p: &Point) -> Point {
        self.add(p, p)
    }

    /// `k * p` by double-and-add.
    pub fn mul(&self, p: &Point, mut k: u64) -> Point {
        let mut acc = self.identity();
        let mut base = *p;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.double(&base);
            k >>= 1;
        }
        acc
    }

    /// Table of square roots: `roots[v]` is the smallest `y` with `y^2 = v`, if any.
    fn sqrt_table(&self) -> Vec<Option<u64>> {
        let q = self.field();
        let mut roots = vec![None; q.value() as usize];
        for y in (0..q.value()).rev() {
            roots[q.mul(y, y) as usize] = Some(y);
        }
        roots
    }

    /// Number of rational points including the identity, by sweeping `x`.
    pub fn order(&self) -> Result<u64, CurveError> {
        self.order_with_limit(DEFAULT_COUNT_LIMIT)
    }

    pub fn order_with_limit(&self, limit: u64) -> Result<u64, CurveError> {
        let q = self.field().value();
        if q > limit {
            return Err(CurveError::CountLimit { q, limit });
        }
        let roots = self.sqrt_table();
        let mut count = 1;
        for x in 0..q {
            let v = self.rhs(self.field().element(x)).residue();
            if v == 0 {
                count += 1;
            } else if roots[v as usize].is_some() {
                count += 2;
            }
        }
        Ok(count)
    }

    /// The affine point with smallest `x`, and smallest `y` for that `x`.
    pub fn first_point(&self) -> Option<Point> {
        let roots = self.sqrt_table();
        (0..self.field().value()).find_map(|x| {
            let v = self.rhs(self.field().element(x)).residue();
            roots[v as usize].map(|y| Point::affine_unchecked(self.field().element(x), self.field().element(y)))
        })
    }
}

/// A curve with a generator of known prime order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupSpec {
    curve: Curve,
    generator: Point,
    order: PrimeModulus,
}

impl GroupSpec {
    pub fn new(curve: Curve, generator: Point, order: u64) -> Result<Self, CurveError> {
        let order = PrimeModulus::new(order)?;
        if !curve.contains(&generator) {
            let (x, y) = generator.affine().unwrap_or((0, 1));
            return Err(CurveError::NotOnCurve { x, y });
        }
        if generator.is_identity() {
            return Err(CurveError::IdentityGenerator);
        }
        if !curve.mul(&generator, order.value()).is_identity() {
            return Err(CurveError::WrongOrder { order: order.value() });
        }
        Ok(GroupSpec { curve, generator, order })
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn generator(&self) -> Point {
        self.generator
    }

    pub fn order(&self) -> PrimeModulus {
        self.order
    }

    /// `r * P` for the generator `P`, with `r` reduced modulo the order.
    pub fn scalar_mul(&self, r: u64) -> Point {
        self.curve.mul(&self.generator, r % self.order.value())
    }

    /// `r * target` for an arbitrary point of the group.
    pub fn mul_point(&self, target: &Point, r: u64) -> Point {
        self.curve.mul(target, r % self.order.value())
    }
}

/// Scans `(a, b)` in lexicographic order for the first nonsingular curve whose
/// point count is a prime in `[min_order, max_order]`.
pub fn find_prime_order_curve(q: PrimeModulus, min_order: u64, max_order: u64) -> Result<GroupSpec, CurveError> {
    if q.value() > DEFAULT_COUNT_LIMIT {
        return Err(CurveError::CountLimit { q: q.value(), limit: DEFAULT_COUNT_LIMIT });
    }
    let exhausted = CurveError::SearchExhausted { q: q.value(), min: min_order, max: max_order };
    if (min_order..=max_order).all(|n| !crate::field::is_prime(n)) {
        return Err(exhausted);
    }
    for a in 0..q.value() {
        for b in 0..q.value() {
            let Ok(curve) = Curve::new(q, a, b) else { continue };
            let n = curve.order()?;
            if n < min_order || n > max_order || !crate::field::is_prime(n) {
                continue;
            }
            // Prime order: every affine point generates.
            let g = curve.first_point().expect("prime order > 1 implies an affine point");
            return GroupSpec::new(curve, g, n);
        }
    }
    Err(exhausted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn curve17() -> Curve {
        Curve::new(PrimeModulus::new(17).unwrap(), 2, 2).unwrap()
    }

    fn group19() -> GroupSpec {
        let c = curve17();
        GroupSpec::new(c, c.point(5, 1).unwrap(), 19).unwrap()
    }

    /// Every point by brute force over all (x, y) pairs, using plain integer arithmetic.
    fn enumerate(q: u64, a: u64, b: u64) -> Vec<(u64, u64)> {
        let mut pts = Vec::new();
        for x in 0..q {
            for y in 0..q {
                if (y * y) % q == (x * x * x + a * x + b) % q {
                    pts.push((x, y));
                }
            }
        }
        pts
    }

    #[test]
    fn doubling_matches_tangent_oracle() {
        // Oracle: the tangent at (5, 1) meets the curve again at -(2P); check the
        // three-point collinearity of (5,1), (5,1), (6,-3) with the explicit slope.
        let (q, x1, y1) = (17i64, 5i64, 1i64);
        let slope = (0..q).find(|s| (s * 2 * y1 - (3 * x1 * x1 + 2)).rem_euclid(q) == 0).unwrap();
        let x3 = (slope * slope - 2 * x1).rem_euclid(q);
        let y3 = (slope * (x1 - x3) - y1).rem_euclid(q);
        assert_eq!((x3, y3), (6, 3));

        let c = curve17();
        let p = c.point(5, 1).unwrap();
        assert_eq!(c.add(&p, &p), c.point(6, 3).unwrap());
    }

    #[test]
    fn identity_and_inverse() {
        let c = curve17();
        let p = c.point(5, 1).unwrap();
        assert_eq!(c.add(&p, &c.identity()), p);
        assert_eq!(c.add(&c.identity(), &p), p);
        assert_eq!(c.neg(&p), c.point(5, 16).unwrap());
        assert!(c.add(&p, &c.neg(&p)).is_identity());
    }

    #[test]
    fn scalar_mul_examples() {
        let g = group19();
        assert!(g.scalar_mul(0).is_identity());
        assert_eq!(g.scalar_mul(1), g.generator());
        assert!(g.scalar_mul(19).is_identity());
        assert_eq!(g.scalar_mul(20), g.generator());
    }

    #[test]
    fn order_examples_match_enumeration() {
        assert_eq!(enumerate(17, 2, 2).len() + 1, 19);
        assert_eq!(curve17().order().unwrap(), 19);
        assert_eq!(enumerate(5, 1, 0).len() + 1, 4);
        let c5 = Curve::new(PrimeModulus::new(5).unwrap(), 1, 0).unwrap();
        assert_eq!(c5.order().unwrap(), 4);
    }

    #[test]
    fn order_matches_enumeration_and_hasse() {
        for q in [5u64, 7, 11, 13, 17, 23] {
            let m = PrimeModulus::new(q).unwrap();
            for a in 0..q {
                for b in 0..q {
                    let Ok(c) = Curve::new(m, a, b) else { continue };
                    let n = c.order().unwrap();
                    assert_eq!(n, enumerate(q, a, b).len() as u64 + 1, "q={q} a={a} b={b}");
                    let dev = (n as f64 - (q + 1) as f64).abs();
                    assert!(dev <= 2.0 * (q as f64).sqrt());
                }
            }
        }
    }

    #[test]
    fn order_limit_guard() {
        let c = curve17();
        assert_eq!(c.order_with_limit(10), Err(CurveError::CountLimit { q: 17, limit: 10 }));
    }

    #[test]
    fn rejects_bad_curves_and_points() {
        let q = PrimeModulus::new(17).unwrap();
        assert_eq!(Curve::new(q, 0, 0), Err(CurveError::Singular));
        assert!(matches!(
            Curve::new(PrimeModulus::new(3).unwrap(), 1, 1),
            Err(CurveError::UnsupportedCharacteristic(3))
        ));
        assert_eq!(curve17().point(5, 2), Err(CurveError::NotOnCurve { x: 5, y: 2 }));
        let c = curve17();
        let g = c.point(5, 1).unwrap();
        assert_eq!(GroupSpec::new(c, g, 17), Err(CurveError::WrongOrder { order: 17 }));
        assert!(matches!(GroupSpec::new(c, g, 18), Err(CurveError::Field(FieldError::NotPrime(18)))));
        assert_eq!(GroupSpec::new(c, c.identity(), 19), Err(CurveError::IdentityGenerator));
    }

    #[test]
    fn normalize_projective() {
        let c = curve17();
        // (5, 1) scaled by 3.
        assert_eq!(c.normalize(15, 3, 3).unwrap(), c.point(5, 1).unwrap());
        assert!(c.normalize(0, 7, 0).unwrap().is_identity());
        assert!(c.normalize(1, 7, 0).is_err());
    }

    #[test]
    fn find_curve_examples() {
        let q = PrimeModulus::new(17).unwrap();
        let g = find_prime_order_curve(q, 19, 19).unwrap();
        assert_eq!(g.order().value(), 19);
        let key = (g.curve().a().residue(), g.curve().b().residue());
        assert!(key <= (2, 2));
        assert_eq!(g.curve().order().unwrap(), 19);

        assert!(matches!(find_prime_order_curve(q, 4, 4), Err(CurveError::SearchExhausted { .. })));

        let q = PrimeModulus::new(1009).unwrap();
        let g = find_prime_order_curve(q, 850, 1000).unwrap();
        let n = g.order().value();
        assert!((850..=1000).contains(&n));
        assert!(g.scalar_mul(n).is_identity());
    }

    #[test]
    fn chord_law_collinearity_on_small_group() {
        // Three distinct affine points sum to O iff the determinant of their
        // (x, y, 1) rows vanishes.
        let g = group19();
        let c = g.curve();
        let pts: Vec<Point> = (1..19).map(|r| g.scalar_mul(r)).collect();
        let q = c.field();
        for (i, a) in pts.iter().enumerate() {
            for (j, b) in pts.iter().enumerate().skip(i + 1) {
                for d in pts.iter().skip(j + 1) {
                    let rows = [a, b, d].map(|p| [p.x(), p.y(), p.z()]);
                    let det = rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
                        - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
                        + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0]);
                    let sum = c.add(&c.add(a, b), d);
                    assert_eq!(det == q.zero(), sum.is_identity());
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn group_axioms(r1 in 0u64..19, r2 in 0u64..19, r3 in 0u64..19) {
            let g = group19();
            let c = g.curve();
            let (a, b, d) = (g.scalar_mul(r1), g.scalar_mul(r2), g.scalar_mul(r3));
            prop_assert_eq!(c.add(&c.add(&a, &b), &d), c.add(&a, &c.add(&b, &d)));
            prop_assert_eq!(c.add(&a, &b), c.add(&b, &a));
            prop_assert_eq!(c.add(&a, &c.identity()), a);
            prop_assert!(c.add(&a, &c.neg(&a)).is_identity());
            prop_assert_eq!(c.add(&a, &b), g.scalar_mul((r1 + r2) % 19));
            for p in [a, b, d, c.add(&a, &b), c.double(&a)] {
                prop_assert!(c.contains(&p));
            }
        }
    }
}
