//! Exact arithmetic in `Z/m` and its quotients `Z/d` for divisors `d` of `m`.
//!
//! Every residue carries the divisor it is reduced by, so values of the
//! quotient modules `O/(t)` are first-class: mixing residues with different
//! divisors is a bug and panics. All values are canonical representatives in
//! `[0, d)`, so equality of values is equality of representations.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),
    #[error("divisor must be nonzero")]
    ZeroDivisor,
}

/// The coefficient ring `O = Z/m`, `m >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Modulus(u64);

impl Modulus {
    pub fn new(m: u64) -> Result<Self, RingError> {
        if m < 2 {
            return Err(RingError::InvalidModulus(m));
        }
        Ok(Modulus(m))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// The content of the ideal `(t)` in `Z/m`: `(t) = (gcd(t, m))`, so
    /// `O/(t)` is canonically `Z/gcd(t, m)`.
    pub fn ideal_content(self, t: u64) -> u64 {
        debug_assert!(t >= 1);
        gcd(t, self.0)
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}", self.0)
    }
}

/// An element of `Z/d`, stored as its canonical representative in `[0, d)`
/// together with the divisor `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Residue {
    value: u64,
    divisor: u64,
}

/// Canonical representative of `x` modulo `d`, in `[0, d)`.
pub fn reduce(x: i128, d: u64) -> Result<Residue, RingError> {
    if d == 0 {
        return Err(RingError::ZeroDivisor);
    }
    Ok(Residue::new(x, d))
}

impl Residue {
    /// Reduces `x` into `[0, d)`. Panics if `d = 0`; use [`reduce`] for a
    /// fallible version.
    pub fn new(x: i128, d: u64) -> Self {
        assert!(d > 0, "residue divisor must be nonzero");
        let d128 = d as i128;
        let value = x.rem_euclid(d128) as u64;
        Residue { value, divisor: d }
    }

    pub fn zero(d: u64) -> Self {
        Residue::new(0, d)
    }

    pub fn one(d: u64) -> Self {
        Residue::new(1, d)
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn divisor(self) -> u64 {
        self.divisor
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    /// Re-reduces this value into `Z/d'` for a (typically smaller) divisor.
    pub fn retract(self, d: u64) -> Self {
        Residue::new(self.value as i128, d)
    }

    fn assert_compatible(self, other: Residue) {
        assert_eq!(
            self.divisor, other.divisor,
            "mismatched residue divisors: {} vs {}",
            self.divisor, other.divisor
        );
    }
}

impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        self.assert_compatible(rhs);
        Residue::new(self.value as i128 + rhs.value as i128, self.divisor)
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        self.assert_compatible(rhs);
        Residue::new(self.value as i128 - rhs.value as i128, self.divisor)
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        self.assert_compatible(rhs);
        Residue::new(self.value as i128 * rhs.value as i128, self.divisor)
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue::new(-(self.value as i128), self.divisor)
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.divisor)
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Extended gcd: returns `(g, s, t)` with `s*a + t*b = g = gcd(a, b)`.
pub fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// A unit `w` of `Z/n` with `w * a = gcd(a, n) (mod n)`. Every element of
/// `Z/n` is a unit multiple of the canonical divisor `gcd(a, n)`.
pub fn unit_associate(a: u64, n: u64) -> u64 {
    assert!(n > 0);
    let a = a % n;
    if a == 0 {
        return 1;
    }
    let g = gcd(a, n);
    let a1 = a / g;
    let n1 = n / g;
    // a1 is invertible mod n1 (gcd(a/g, n/g) = 1); lift the inverse to a
    // unit mod n by stepping through its congruence class.
    let (_, s, _) = xgcd(a1 as i128, n1 as i128);
    let mut w = (s.rem_euclid(n1 as i128)) as u64;
    while gcd(w, n) != 1 {
        w += n1;
    }
    debug_assert_eq!((w as u128 * a as u128 % n as u128) as u64, g % n);
    w % n
}
