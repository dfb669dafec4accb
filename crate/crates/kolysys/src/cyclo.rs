//! The cyclotomic instantiation: sites are primes `ℓ ≡ 1 (mod p^k)`, the
//! module `H` is spanned by prime rationals inside `Q^×/(Q^×)^M`, and the
//! local data comes from valuations, Teichmüller discrete logs, and
//! Frobenius discrete logs.
//!
//! For the multiplicative group the local polynomial is `1 - ℓx`, so the
//! correction polynomial `Q(x) = (P(x) - P(1))/(x - 1)` reduces to the
//! constant `-1 (mod M)`; the transverse functional `v_ℓ` reads off the
//! `ℓ`-adic valuation and the unramified functional `u_ℓ` the discrete log
//! of the unit part raised to `(ℓ-1)/M`, in base a fixed primitive root.
//! Everything is brute force: the primes involved are tiny.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::graded::{GradedElement, Site, SiteSet};
use crate::instance::{InstanceError, SevenTuple};
use crate::modring::{gcd, Residue};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("p must be an odd prime, got {0}")]
    BadP(u64),
    #[error("exponent k must be at least 1")]
    BadK,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} does not satisfy ℓ ≡ 1 (mod {1})")]
    BadSigmaPrime(u64, u64),
    #[error("no primitive root given for {0}")]
    MissingRoot(u64),
    #[error("{0} is not a primitive root modulo {1}")]
    NotPrimitiveRoot(u64, u64),
    #[error("generators must be distinct primes, got {0}")]
    BadGenerator(String),
    #[error("zero is not a valid argument")]
    ZeroArgument,
    #[error("{0} is divisible by {1}")]
    DivisibleBy(u64, u64),
    #[error("discrete log of {0} in base {1} modulo {2} does not exist")]
    NoDiscreteLog(u64, u64, u64),
    #[error("polynomial does not vanish at 1 modulo {0}")]
    NonvanishingAtOne(u64),
    #[error("invalid rational {0}")]
    BadRational(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// A nonzero rational with a positive denominator; kept unreduced, since
/// valuations and unit parts are computed factor by factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    num: i64,
    den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Result<Self, CycloError> {
        if num == 0 || den == 0 {
            return Err(CycloError::ZeroArgument);
        }
        let sign = den.signum();
        Ok(Rational {
            num: num * sign,
            den: den * sign,
        })
    }

    pub fn integer(n: i64) -> Result<Self, CycloError> {
        Rational::new(n, 1)
    }

    /// Parses `"a"` or `"a/b"`.
    pub fn parse(s: &str) -> Result<Self, CycloError> {
        let bad = || CycloError::BadRational(s.to_string());
        match s.split_once('/') {
            None => Rational::new(s.trim().parse().map_err(|_| bad())?, 1),
            Some((a, b)) => Rational::new(
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            ),
        }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn mul(&self, other: &Rational) -> Rational {
        Rational {
            num: self.num * other.num,
            den: self.den * other.den,
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Trial division; the primes here are all tiny.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The largest power of `p` dividing `n`.
pub fn p_part(n: u64, p: u64) -> u64 {
    let mut out = 1;
    let mut n = n;
    while n.is_multiple_of(p) {
        out *= p;
        n /= p;
    }
    out
}

pub fn mod_pow(base: u64, exp: u64, modulus: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut b: u128 = (base % modulus) as u128;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % modulus as u128;
        }
        b = b * b % modulus as u128;
        e >>= 1;
    }
    acc as u64
}

/// Brute-force order check: `g` generates the full multiplicative group
/// modulo the prime `ell`.
pub fn is_primitive_root(g: u64, ell: u64) -> bool {
    if g.is_multiple_of(ell) {
        return false;
    }
    let mut x = 1u64;
    for k in 1..ell {
        x = x * (g % ell) % ell;
        if x == 1 {
            return k == ell - 1;
        }
    }
    false
}

/// All primes `ℓ ≤ bound` with `ℓ ≡ 1 (mod p^k)` and `ℓ ≠ p`.
pub fn sigma_primes(p: u64, k: u32, bound: u64) -> Vec<u64> {
    let m = p.pow(k);
    (2..=bound)
        .filter(|&ell| ell != p && ell % m == 1 && is_prime(ell))
        .collect()
}

/// The `ℓ`-adic valuation of a nonzero rational.
pub fn valuation(a: &Rational, ell: u64) -> i64 {
    let count = |mut n: u64| {
        let mut v = 0i64;
        while n.is_multiple_of(ell) {
            v += 1;
            n /= ell;
        }
        v
    };
    count(a.num.unsigned_abs()) - count(a.den.unsigned_abs())
}

/// The transverse functional: the `ℓ`-adic valuation reduced mod `M`.
pub fn v_ell(a: &Rational, ell: u64, m_cap: u64) -> Residue {
    Residue::new(valuation(a, ell) as i128, m_cap)
}

/// The unit part `a / ℓ^{val(a)}` reduced modulo `ℓ`.
pub fn unit_part_mod_ell(a: &Rational, ell: u64) -> u64 {
    let strip = |mut n: u64| {
        while n.is_multiple_of(ell) {
            n /= ell;
        }
        n % ell
    };
    let num_sign = a.num.signum();
    let num_unit = strip(a.num.unsigned_abs());
    let den_unit = strip(a.den.unsigned_abs());
    // sign折 into the numerator, inverse of the denominator mod ℓ
    let den_inv = mod_pow(den_unit, ell - 2, ell);
    let mut w = num_unit as u128 * den_inv as u128 % ell as u128;
    if num_sign < 0 {
        w = (ell as u128 - w) % ell as u128;
    }
    w as u64
}

/// Brute-force discrete log in the cyclic group generated by `base`
/// modulo the prime `ell`, searched up to the given order.
pub fn dlog(base: u64, target: u64, ell: u64, order: u64) -> Option<u64> {
    let mut x = 1u64;
    for e in 0..order {
        if x == target % ell {
            return Some(e);
        }
        x = x * (base % ell) % ell;
    }
    None
}

/// The unramified functional: with `w` the unit part of `a` at `ℓ`, the
/// discrete log of `w^{(ℓ-1)/M}` in base `ζ = g^{(ℓ-1)/M}`, an element of
/// `Z/M`.
pub fn u_ell(a: &Rational, ell: u64, m_cap: u64, g: u64) -> Result<Residue, CycloError> {
    if !(ell - 1).is_multiple_of(m_cap) {
        return Err(CycloError::BadSigmaPrime(ell, m_cap));
    }
    let w = unit_part_mod_ell(a, ell);
    let zeta = mod_pow(g, (ell - 1) / m_cap, ell);
    let target = mod_pow(w, (ell - 1) / m_cap, ell);
    let e = dlog(zeta, target, ell, m_cap).ok_or(CycloError::NoDiscreteLog(target, zeta, ell))?;
    Ok(Residue::new(e as i128, m_cap))
}

/// The image of the Frobenius at `ℓ` in the order-`t_q` quotient of
/// `(Z/q)^×`: the discrete log of `ℓ` in base `g_q`, reduced mod
/// `t_q = p`-part of `q - 1`.
pub fn frobenius_dlog(ell: u64, q: u64, g_q: u64, p: u64) -> Result<Residue, CycloError> {
    if ell.is_multiple_of(q) {
        return Err(CycloError::DivisibleBy(ell, q));
    }
    let e = dlog(g_q, ell % q, q, q - 1).ok_or(CycloError::NoDiscreteLog(ell % q, g_q, q))?;
    let t_q = p_part(q - 1, p);
    Ok(Residue::new(e as i128, t_q))
}

/// The quotient `(P(x) - P(1)) / (x - 1)` modulo `M`: coefficient `i` of
/// the quotient is the tail sum of the coefficients of `P` above `i`.
/// Errors unless `P(1) ≡ 0 (mod M)`.
pub fn compute_q(p_coeffs: &[i64], m_cap: u64) -> Result<Vec<u64>, CycloError> {
    let at_one: i128 = p_coeffs.iter().map(|&c| c as i128).sum();
    if at_one.rem_euclid(m_cap as i128) != 0 {
        return Err(CycloError::NonvanishingAtOne(m_cap));
    }
    let deg = p_coeffs.len().saturating_sub(1);
    let mut out = Vec::with_capacity(deg.max(1));
    for i in 0..deg.max(1) {
        let tail: i128 = p_coeffs.iter().skip(i + 1).map(|&c| c as i128).sum();
        out.push(tail.rem_euclid(m_cap as i128) as u64);
    }
    Ok(out)
}

/// Configuration of a cyclotomic instance: the prime power `M = p^k`, the
/// chosen sites, a primitive root per site, and the prime rationals
/// spanning `H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycloConfig {
    pub p: u64,
    pub k: u32,
    pub sigma: Vec<u64>,
    pub roots: BTreeMap<u64, u64>,
    pub generators: Vec<Rational>,
}

impl CycloConfig {
    pub fn modulus(&self) -> u64 {
        self.p.pow(self.k)
    }

    pub fn validate(&self) -> Result<(), CycloError> {
        if self.p == 2 || !is_prime(self.p) {
            return Err(CycloError::BadP(self.p));
        }
        if self.k == 0 {
            return Err(CycloError::BadK);
        }
        let m = self.modulus();
        for &ell in &self.sigma {
            if !is_prime(ell) {
                return Err(CycloError::NotPrime(ell));
            }
            if ell == self.p || ell % m != 1 {
                return Err(CycloError::BadSigmaPrime(ell, m));
            }
            let g = *self.roots.get(&ell).ok_or(CycloError::MissingRoot(ell))?;
            if !is_primitive_root(g, ell) {
                return Err(CycloError::NotPrimitiveRoot(g, ell));
            }
        }
        for (i, g) in self.generators.iter().enumerate() {
            let ok = g.den == 1
                && g.num > 0
                && is_prime(g.num as u64)
                && self.generators[..i].iter().all(|h| h != g);
            if !ok {
                return Err(CycloError::BadGenerator(g.to_string()));
            }
        }
        Ok(())
    }

    /// The degree-one element at `ℓ`: coefficient `-ℓ · frobenius_dlog(ℓ, q')`
    /// at each `x_{q'}`, `q' ≠ ℓ`. Since `ℓ ≡ 1 (mod M)` this is `-a_{q'}`.
    pub fn p_element(&self, sites: &Arc<SiteSet>, ell: u64) -> Result<GradedElement, CycloError> {
        let mut acc = GradedElement::zero(sites);
        for (idx, site) in sites.sites().iter().enumerate() {
            let q: u64 = site.label.parse().expect("cyclotomic labels are primes");
            if q == ell {
                continue;
            }
            let g_q = *self.roots.get(&q).ok_or(CycloError::MissingRoot(q))?;
            let a = frobenius_dlog(ell, q, g_q, self.p)?;
            let coeff = -(ell as i128) * a.value() as i128;
            acc = &acc + &GradedElement::variable(sites, idx).scale(coeff);
        }
        Ok(acc)
    }

    /// Assembles the full seven-tuple: `O = Z/M`, sites the sigma primes
    /// with `t_ℓ` the `p`-part of `ℓ - 1`, `v`/`u` rows the functional
    /// values on the generator rationals, `P` the Frobenius elements.
    pub fn build_instance(&self) -> Result<SevenTuple, CycloError> {
        self.validate()?;
        let m = self.modulus();
        let sites_vec: Vec<Site> = self
            .sigma
            .iter()
            .map(|&ell| Site::new(ell.to_string(), p_part(ell - 1, self.p)))
            .collect();
        let sites = SiteSet::new(m, sites_vec).map_err(InstanceError::Ring)?;
        let h = self.generators.len();
        let mut v = Vec::new();
        let mut u = Vec::new();
        let mut p_fam = Vec::new();
        for &ell in &self.sigma {
            let g = self.roots[&ell];
            let mut v_row = Vec::with_capacity(h);
            let mut u_row = Vec::with_capacity(h);
            for gen in &self.generators {
                v_row.push(v_ell(gen, ell, m).value());
                let d = gcd(m, p_part(ell - 1, self.p));
                u_row.push(u_ell(gen, ell, m, g)?.retract(d).value());
            }
            v.push(v_row);
            u.push(u_row);
            p_fam.push(self.p_element(&sites, ell)?);
        }
        Ok(SevenTuple::new(sites, h, v, u, p_fam)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_examples() {
        assert_eq!(sigma_primes(3, 1, 20), vec![7, 13, 19]);
        assert_eq!(sigma_primes(3, 2, 20), vec![19]);
        assert_eq!(sigma_primes(5, 1, 10), Vec::<u64>::new());
    }

    #[test]
    fn valuation_examples() {
        let r = |n, d| Rational::new(n, d).unwrap();
        assert_eq!(v_ell(&r(63, 1), 7, 3).value(), 1);
        assert_eq!(v_ell(&r(2, 1), 7, 3).value(), 0);
        // 1/49 has valuation -2, i.e. 1 mod 3
        assert_eq!(v_ell(&r(1, 49), 7, 3).value(), 1);
    }

    #[test]
    fn u_ell_examples() {
        let r = |n, d| Rational::new(n, d).unwrap();
        // 2^2 = 4 mod 7, zeta = 3^2 = 2, and 4 = 2^2
        assert_eq!(u_ell(&r(2, 1), 7, 3, 3).unwrap().value(), 2);
        // unit part of 7 at 7 is 1
        assert_eq!(u_ell(&r(7, 1), 7, 3, 3).unwrap().value(), 0);
    }

    #[test]
    fn u_ell_brute_force_against_all_residues() {
        // independent oracle: u_ell(a) must be the unique e with
        // unit(a)^{(l-1)/M} = (g^{(l-1)/M})^e
        for a in [2i64, 3, 4, 5, 6, 10, 12, -2, -5] {
            let rat = Rational::new(a, 1).unwrap();
            let got = u_ell(&rat, 7, 3, 3).unwrap().value();
            let w = unit_part_mod_ell(&rat, 7);
            let target = mod_pow(w, 2, 7);
            let zeta = mod_pow(3, 2, 7);
            let expect = (0..3).find(|&e| mod_pow(zeta, e, 7) == target).unwrap();
            assert_eq!(got, expect, "a = {a}");
        }
    }

    #[test]
    fn u_and_v_are_homomorphisms() {
        let prods = [
            (Rational::new(2, 1).unwrap(), Rational::new(5, 1).unwrap()),
            (Rational::new(6, 1).unwrap(), Rational::new(35, 2).unwrap()),
            (Rational::new(14, 3).unwrap(), Rational::new(7, 5).unwrap()),
            (Rational::new(-4, 9).unwrap(), Rational::new(63, 1).unwrap()),
        ];
        for (a, b) in prods {
            let ab = a.mul(&b);
            assert_eq!(
                v_ell(&ab, 7, 3),
                v_ell(&a, 7, 3) + v_ell(&b, 7, 3),
                "v not additive on {a} * {b}"
            );
            assert_eq!(
                u_ell(&ab, 7, 3, 3).unwrap(),
                u_ell(&a, 7, 3, 3).unwrap() + u_ell(&b, 7, 3, 3).unwrap(),
                "u not additive on {a} * {b}"
            );
        }
    }

    #[test]
    fn m_th_powers_die() {
        // cubes have valuation and unit class divisible by 3
        for base in [2i64, 5, 10, -3] {
            let cube = Rational::new(base.pow(3), 1).unwrap();
            assert!(v_ell(&cube, 7, 3).is_zero() || valuation(&cube, 7) % 3 == 0);
            assert!(u_ell(&cube, 7, 3, 3).unwrap().is_zero());
        }
    }

    #[test]
    fn frobenius_examples() {
        // dlog_3(13 mod 7 = 6) = 3, and 3 mod t_7 = 3 gives 0
        assert_eq!(frobenius_dlog(13, 7, 3, 3).unwrap().value(), 0);
        // dlog_3(31 mod 7 = 3) = 1
        assert_eq!(frobenius_dlog(31, 7, 3, 3).unwrap().value(), 1);
        // l = q + 1 pattern: 13 ≡ 1 mod 3 (q = 3 is not in sigma, use a
        // direct instance): dlog of 1 is 0
        assert_eq!(frobenius_dlog(8, 7, 3, 3).unwrap().value(), 0);
        assert!(frobenius_dlog(14, 7, 3, 3).is_err());
    }

    #[test]
    fn compute_q_examples() {
        // P = 1 - 7x: Q = -7 = -1 mod 3
        assert_eq!(compute_q(&[1, -7], 3).unwrap(), vec![2]);
        assert_eq!(compute_q(&[1, -13], 3).unwrap(), vec![2]);
        assert_eq!(compute_q(&[1, -31], 3).unwrap(), vec![2]);
        // P(1) not divisible: error
        assert!(compute_q(&[1, -3], 3).is_err());
    }

    #[test]
    fn compute_q_multiplies_back() {
        // (x - 1) Q(x) = P(x) mod M for quadratics vanishing at 1 mod M
        let samples: [(i64, i64, i64); 4] = [(1, -7, 9), (4, -1, 0), (2, 3, 4), (-5, 0, 2)];
        for (c0, c1, c2) in samples {
            let m = 3u64;
            let at_one = c0 + c1 + c2;
            if at_one.rem_euclid(3) != 0 {
                continue;
            }
            let q = compute_q(&[c0, c1, c2], m).unwrap();
            // multiply (x - 1) * q and compare with p mod m, constant term
            // apart: (x-1)Q = P - P(1) and P(1) = 0 mod m
            let mut lhs = vec![0i128; q.len() + 1];
            for (i, &qc) in q.iter().enumerate() {
                lhs[i + 1] += qc as i128;
                lhs[i] -= qc as i128;
            }
            let p_coeffs = [c0, c1, c2];
            for (i, l) in lhs.iter().enumerate() {
                let expect = p_coeffs.get(i).copied().unwrap_or(0) as i128;
                assert_eq!(
                    l.rem_euclid(m as i128),
                    expect.rem_euclid(m as i128),
                    "coefficient {i} of ({c0}) + ({c1})x + ({c2})x^2"
                );
            }
        }
    }

    fn test_config() -> CycloConfig {
        CycloConfig {
            p: 3,
            k: 1,
            sigma: vec![7, 13, 31],
            roots: [(7, 3), (13, 2), (31, 3)].into_iter().collect(),
            generators: vec![Rational::integer(2).unwrap(), Rational::integer(5).unwrap()],
        }
    }

    #[test]
    fn config_validation() {
        assert!(test_config().validate().is_ok());
        let mut bad = test_config();
        bad.roots.insert(13, 3); // 3 has order 3 mod 13
        assert!(matches!(
            bad.validate(),
            Err(CycloError::NotPrimitiveRoot(3, 13))
        ));
        let mut bad = test_config();
        bad.sigma.push(11); // 11 ≢ 1 mod 3
        bad.roots.insert(11, 2);
        assert!(matches!(
            bad.validate(),
            Err(CycloError::BadSigmaPrime(11, 3))
        ));
        let mut bad = test_config();
        bad.generators.push(Rational::integer(4).unwrap());
        assert!(matches!(bad.validate(), Err(CycloError::BadGenerator(_))));
    }

    #[test]
    fn built_instance_shape() {
        let inst = test_config().build_instance().unwrap();
        assert_eq!(inst.modulus(), 3);
        assert_eq!(inst.h_rank(), 2);
        // v row for 7 on generators {2, 5}: both units at 7
        let i7 = inst.sites().index_of("7").unwrap();
        assert_eq!(inst.v_row(i7), &[0, 0]);
        // every P is supported away from its own site, u rows reduced
        for q in 0..inst.sites().len() {
            assert!(inst
                .p_at(q)
                .project(crate::graded::SiteSubset::singleton(q))
                .is_zero());
            let d = inst.sites().site_divisor(q);
            assert!(inst.u_row(q).iter().all(|&x| x < d));
        }
        // P_31 has x_7 coefficient -31 * dlog_3(31 mod 7) = -31 ≡ 2 mod 3
        let i31 = inst.sites().index_of("31").unwrap();
        let mut mono = vec![0u32; 3];
        mono[i7] = 1;
        assert_eq!(inst.p_at(i31).coeff(&mono), 2);
        // P_13 projected to x_7 vanishes (dlog is 0 mod 3)
        let i13 = inst.sites().index_of("13").unwrap();
        mono = vec![0u32; 3];
        mono[i7] = 1;
        assert_eq!(inst.p_at(i13).coeff(&mono), 0);
    }

    #[test]
    fn phi_matches_raw_functional_values() {
        // the assembled phi agrees with -u x - v P computed from rationals
        let cfg = test_config();
        let inst = Arc::new(cfg.build_instance().unwrap());
        let m = inst.modulus();
        for (i, gen) in cfg.generators.iter().enumerate() {
            let mut e = vec![0u64; cfg.generators.len()];
            e[i] = 1;
            for (q, &ell) in cfg.sigma.iter().enumerate() {
                let g = cfg.roots[&ell];
                let u_val = u_ell(gen, ell, m, g).unwrap();
                let v_val = v_ell(gen, ell, m);
                let expect = &crate::graded::GradedElement::variable(inst.sites(), q)
                    .scale(-(u_val.value() as i128))
                    + &inst.p_at(q).scale(-(v_val.value() as i128));
                assert_eq!(inst.phi(q, &e), expect);
            }
        }
    }
}
