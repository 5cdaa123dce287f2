//! Arithmetic in prime fields `F_q` and in the scalar ring modulo a prime group order.
//!
//! Moduli are runtime values that fit in a machine word; products go through
//! 128-bit intermediates. Raw-residue helpers on [`PrimeModulus`] are used by the
//! linear-algebra kernels, while [`FieldElement`] carries its modulus and is the
//! type exposed by curve points and matrix accessors.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("operands live in different fields (mod {0} and mod {1})")]
    ModulusMismatch(u64, u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
}

/// Witnesses making Miller-Rabin deterministic for every 64-bit input.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &w in &MR_WITNESSES {
        if n == w {
            return true;
        }
        if n.is_multiple_of(w) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A prime modulus, validated at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(value: u64) -> Result<Self, FieldError> {
        if is_prime(value) {
            Ok(PrimeModulus(value))
        } else {
            Err(FieldError::NotPrime(value))
        }
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    /// Element of this field with the given (unreduced) value.
    pub fn element(self, value: u64) -> FieldElement {
        FieldElement::new(value, self)
    }

    pub fn from_i64(self, value: i64) -> FieldElement {
        FieldElement { residue: value.rem_euclid(self.0 as i64) as u64, modulus: self }
    }

    pub fn zero(self) -> FieldElement {
        FieldElement { residue: 0, modulus: self }
    }

    pub fn one(self) -> FieldElement {
        FieldElement { residue: 1, modulus: self }
    }

    // Raw residue arithmetic. Inputs must already be reduced.

    #[inline]
    pub fn reduce(self, a: u64) -> u64 {
        a % self.0
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let (s, carry) = a.overflowing_add(b);
        if carry || s >= self.0 {
            s.wrapping_sub(self.0)
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.0 - (b - a)
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.0)
    }

    pub fn pow(self, a: u64, exp: u64) -> u64 {
        pow_mod(a, exp, self.0)
    }

    /// Inverse via the extended Euclidean algorithm.
    pub fn inv(self, a: u64) -> Result<u64, FieldError> {
        if a.is_multiple_of(self.0) {
            return Err(FieldError::ZeroInverse);
        }
        let (mut r0, mut r1) = (self.0 as i128, (a % self.0) as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(t0.rem_euclid(self.0 as i128) as u64)
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A residue in canonical form `0 <= residue < modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    residue: u64,
    modulus: PrimeModulus,
}

impl FieldElement {
    pub fn new(value: u64, modulus: PrimeModulus) -> Self {
        FieldElement { residue: modulus.reduce(value), modulus }
    }

    #[inline]
    pub fn residue(self) -> u64 {
        self.residue
    }

    #[inline]
    pub fn modulus(self) -> PrimeModulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.residue == 0
    }

    fn check(self, other: Self) -> Result<PrimeModulus, FieldError> {
        if self.modulus == other.modulus {
            Ok(self.modulus)
        } else {
            Err(FieldError::ModulusMismatch(self.modulus.0, other.modulus.0))
        }
    }

    pub fn try_add(self, other: Self) -> Result<Self, FieldError> {
        let m = self.check(other)?;
        Ok(FieldElement { residue: m.add(self.residue, other.residue), modulus: m })
    }

    pub fn try_sub(self, other: Self) -> Result<Self, FieldError> {
        let m = self.check(other)?;
        Ok(FieldElement { residue: m.sub(self.residue, other.residue), modulus: m })
    }

    pub fn try_mul(self, other: Self) -> Result<Self, FieldError> {
        let m = self.check(other)?;
        Ok(FieldElement { residue: m.mul(self.residue, other.residue), modulus: m })
    }

    pub fn try_div(self, other: Self) -> Result<Self, FieldError> {
        self.check(other)?;
        self.try_mul(other.inv()?)
    }

    pub fn inv(self) -> Result<Self, FieldError> {
        Ok(FieldElement { residue: self.modulus.inv(self.residue)?, modulus: self.modulus })
    }

    pub fn pow(self, exp: u64) -> Self {
        FieldElement { residue: self.modulus.pow(self.residue, exp), modulus: self.modulus }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.residue)
    }
}

// Operator forms panic on a modulus mismatch; the `try_*` methods report it.

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: Self) -> Self {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: Self) -> Self {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Div for FieldElement {
    type Output = FieldElement;
    fn div(self, rhs: Self) -> Self {
        self.try_div(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> Self {
        FieldElement { residue: self.modulus.neg(self.residue), modulus: self.modulus }
    }
}
