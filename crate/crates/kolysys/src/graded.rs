//! The graded algebra `G(Σ')` of the augmentation filtration, modeled as the
//! polynomial ring `O[x_q : q ∈ Σ]` subject to `t_q · x_q = 0`, truncated
//! above a degree cap.
//!
//! The degree-one piece is `∏ O/(t_q)` with `x_q` the distinguished
//! generator at the site `q`; a monomial touching the sites `S` has its
//! coefficient reduced modulo `gcd(m, {t_q : q ∈ S})`, which makes the
//! stored form canonical: equality of elements is equality of
//! representations. Projections `(·)|_Σ''` keep exactly the monomials
//! supported inside `Σ''`, and the alternating operator `s_{m,n}` isolates
//! the part divisible by every `x_q`, `q ∈ n`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rand::Rng;

use crate::modring::{gcd, Modulus, Residue, RingError};

/// An index `q ∈ Σ` together with the order `t_q` of its cyclic factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Site {
    pub label: String,
    pub t: u64,
}

impl Site {
    pub fn new(label: impl Into<String>, t: u64) -> Self {
        assert!(t >= 1, "site order t must be positive");
        Site {
            label: label.into(),
            t,
        }
    }
}

/// The finite truncation of `Σ`: an ordered list of distinct sites, the
/// coefficient modulus, and a degree cap for the graded algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteSet {
    sites: Vec<Site>,
    modulus: Modulus,
    degree_cap: usize,
}

impl SiteSet {
    /// Degree cap defaults to the number of sites, the largest degree any of
    /// the implemented formulas produces.
    pub fn new(m: u64, sites: Vec<Site>) -> Result<Arc<Self>, RingError> {
        let cap = sites.len();
        SiteSet::with_degree_cap(m, sites, cap)
    }

    pub fn with_degree_cap(
        m: u64,
        sites: Vec<Site>,
        degree_cap: usize,
    ) -> Result<Arc<Self>, RingError> {
        let modulus = Modulus::new(m)?;
        assert!(sites.len() <= 32, "site sets are desk scale");
        assert!(
            degree_cap >= sites.len(),
            "degree cap below the number of sites"
        );
        for (i, s) in sites.iter().enumerate() {
            assert!(s.t >= 1, "site order t must be positive");
            assert!(
                sites[..i].iter().all(|other| other.label != s.label),
                "duplicate site label {:?}",
                s.label
            );
        }
        Ok(Arc::new(SiteSet {
            sites,
            modulus,
            degree_cap,
        }))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus.get()
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    pub fn site(&self, idx: usize) -> &Site {
        &self.sites[idx]
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.sites.iter().position(|s| s.label == label)
    }

    /// `gcd(m, t_q)`: the effective divisor of `O/(t_q)`-valued data at `q`.
    pub fn site_divisor(&self, idx: usize) -> u64 {
        self.modulus.ideal_content(self.sites[idx].t)
    }

    pub fn full(&self) -> SiteSubset {
        SiteSubset::full(self.sites.len())
    }

    /// The coefficient divisor of a monomial touching `support`:
    /// `gcd(cap, {t_q : q ∈ support})`.
    pub fn support_divisor(&self, support: SiteSubset, cap: u64) -> u64 {
        let mut g = cap;
        for q in support.iter() {
            g = gcd(g, self.sites[q].t);
        }
        g
    }

    pub fn subset_of_labels(&self, labels: &[String]) -> Option<SiteSubset> {
        let mut s = SiteSubset::empty();
        for l in labels {
            s = s.insert(self.index_of(l)?);
        }
        Some(s)
    }

    pub fn labels_of_subset(&self, subset: SiteSubset) -> Vec<String> {
        subset.iter().map(|q| self.sites[q].label.clone()).collect()
    }
}

/// A subset of the sites of a [`SiteSet`], as a bitmask over site indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SiteSubset(u32);

impl SiteSubset {
    pub fn empty() -> Self {
        SiteSubset(0)
    }

    pub fn full(n: usize) -> Self {
        assert!(n <= 32);
        if n == 32 {
            SiteSubset(u32::MAX)
        } else {
            SiteSubset((1u32 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        SiteSubset(1 << i)
    }

    pub fn from_indices(idx: &[usize]) -> Self {
        idx.iter().fold(SiteSubset::empty(), |s, &i| s.insert(i))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn insert(self, i: usize) -> Self {
        SiteSubset(self.0 | (1 << i))
    }

    pub fn remove(self, i: usize) -> Self {
        SiteSubset(self.0 & !(1 << i))
    }

    pub fn union(self, other: Self) -> Self {
        SiteSubset(self.0 | other.0)
    }

    pub fn intersect(self, other: Self) -> Self {
        SiteSubset(self.0 & other.0)
    }

    /// Set difference.
    pub fn minus(self, other: Self) -> Self {
        SiteSubset(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// `ν`: the number of sites in the subset.
    pub fn count(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }

    /// All subsets `d ⊆ self`, the empty set first and `self` last.
    pub fn subsets(self) -> Vec<SiteSubset> {
        let mask = self.0;
        let mut out = Vec::with_capacity(1 << self.count());
        let mut s = 0u32;
        loop {
            out.push(SiteSubset(s));
            if s == mask {
                break;
            }
            s = (s.wrapping_sub(mask)) & mask;
        }
        out
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn from_bits(bits: u32) -> Self {
        SiteSubset(bits)
    }
}

/// Exponent vector over the ambient sites.
pub type Monomial = Vec<u32>;

/// The set of sites a monomial touches.
pub fn monomial_support_of(mono: &Monomial) -> SiteSubset {
    let mut s = SiteSubset::empty();
    for (i, &e) in mono.iter().enumerate() {
        if e > 0 {
            s = s.insert(i);
        }
    }
    s
}

fn monomial_support(mono: &Monomial) -> SiteSubset {
    monomial_support_of(mono)
}

fn monomial_degree(mono: &Monomial) -> usize {
    mono.iter().map(|&e| e as usize).sum()
}

/// An element of the truncated graded algebra.
///
/// `cap` is the effective coefficient modulus: `m` for plain elements of
/// `G`, a proper divisor after the element has been multiplied into a
/// quotient `G ⊗ O/(d)` (this happens when an `O/(t_q)`-valued functional is
/// contracted through a wedge). Zero coefficients are absent, and each
/// stored coefficient is reduced by the divisor of its monomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedElement {
    ambient: Arc<SiteSet>,
    cap: u64,
    terms: BTreeMap<Monomial, u64>,
}

impl GradedElement {
    pub fn zero(ambient: &Arc<SiteSet>) -> Self {
        GradedElement {
            ambient: Arc::clone(ambient),
            cap: ambient.modulus(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ambient: &Arc<SiteSet>, c: i128) -> Self {
        let mut g = GradedElement::zero(ambient);
        g.add_term(vec![0; ambient.len()], c);
        g
    }

    pub fn one(ambient: &Arc<SiteSet>) -> Self {
        GradedElement::constant(ambient, 1)
    }

    /// The distinguished generator `x_q` of `G(q)_1`.
    pub fn variable(ambient: &Arc<SiteSet>, site: usize) -> Self {
        let mut mono = vec![0; ambient.len()];
        mono[site] = 1;
        let mut g = GradedElement::zero(ambient);
        g.add_term(mono, 1);
        g
    }

    pub fn from_terms(
        ambient: &Arc<SiteSet>,
        terms: impl IntoIterator<Item = (Monomial, i128)>,
    ) -> Self {
        let mut g = GradedElement::zero(ambient);
        for (mono, c) in terms {
            g.add_term(mono, c);
        }
        g
    }

    pub fn ambient(&self) -> &Arc<SiteSet> {
        &self.ambient
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mono: &Monomial) -> u64 {
        self.terms.get(mono).copied().unwrap_or(0)
    }

    /// Union of the variable supports of all monomials.
    pub fn support(&self) -> SiteSubset {
        self.terms
            .keys()
            .fold(SiteSubset::empty(), |s, m| s.union(monomial_support(m)))
    }

    /// `Some(d)` if every monomial has total degree `d` (zero passes any
    /// degree and returns `None`).
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut degs = self.terms.keys().map(monomial_degree);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous_of(&self, degree: usize) -> bool {
        self.terms.keys().all(|m| monomial_degree(m) == degree)
    }

    fn add_term(&mut self, mono: Monomial, c: i128) {
        assert_eq!(mono.len(), self.ambient.len(), "monomial arity mismatch");
        if monomial_degree(&mono) > self.ambient.degree_cap() {
            return;
        }
        let div = self
            .ambient
            .support_divisor(monomial_support(&mono), self.cap);
        let cur = self.terms.get(&mono).copied().unwrap_or(0) as i128;
        let v = (cur + c).rem_euclid(div as i128) as u64;
        if v == 0 {
            self.terms.remove(&mono);
        } else {
            self.terms.insert(mono, v);
        }
    }

    fn assert_same_ambient(&self, other: &GradedElement) {
        assert!(
            Arc::ptr_eq(&self.ambient, &other.ambient) || self.ambient == other.ambient,
            "mismatched ambient site sets"
        );
    }

    /// Multiplication by a residue whose divisor is `m` or the divisor of a
    /// quotient `O/(d)`; in the latter case the result lives in `G ⊗ O/(d)`
    /// and the cap records it.
    pub fn scalar_mul(&self, c: Residue) -> GradedElement {
        let new_cap = gcd(self.cap, c.divisor());
        let mut out = GradedElement {
            ambient: Arc::clone(&self.ambient),
            cap: new_cap,
            terms: BTreeMap::new(),
        };
        for (mono, &a) in &self.terms {
            out.add_term(mono.clone(), a as i128 * c.value() as i128);
        }
        out
    }

    pub fn scale(&self, c: i128) -> GradedElement {
        self.scalar_mul(Residue::new(c, self.cap))
    }

    /// The projection `(·)|_Σ''`: keeps monomials supported inside `keep`.
    pub fn project(&self, keep: SiteSubset) -> GradedElement {
        let mut out = GradedElement {
            ambient: Arc::clone(&self.ambient),
            cap: self.cap,
            terms: BTreeMap::new(),
        };
        for (mono, &c) in &self.terms {
            if monomial_support(mono).is_subset_of(keep) {
                out.terms.insert(mono.clone(), c);
            }
        }
        out
    }

    /// The homogeneous degree-`i` component.
    pub fn graded_piece(&self, i: usize) -> GradedElement {
        let mut out = GradedElement {
            ambient: Arc::clone(&self.ambient),
            cap: self.cap,
            terms: BTreeMap::new(),
        };
        for (mono, &c) in &self.terms {
            if monomial_degree(mono) == i {
                out.terms.insert(mono.clone(), c);
            }
        }
        out
    }

    /// The operator `s_{m,n}(g) = Σ_{d ⊆ n} (-1)^{ν(d)} g|_{m∖d}`, which
    /// keeps exactly the monomials divisible by every `x_q`, `q ∈ n`.
    pub fn s_operator(&self, m_set: SiteSubset, n_set: SiteSubset) -> GradedElement {
        assert!(n_set.is_subset_of(m_set), "s_{{m,n}} needs n ⊆ m");
        assert!(
            m_set.is_subset_of(self.ambient.full()),
            "m outside the ambient sites"
        );
        assert!(
            self.support().is_subset_of(m_set),
            "element not supported inside m"
        );
        let mut acc = GradedElement::zero(&self.ambient);
        acc.cap = self.cap;
        for d in n_set.subsets() {
            let term = self.project(m_set.minus(d));
            if d.count() % 2 == 0 {
                acc = &acc + &term;
            } else {
                acc = &acc - &term;
            }
        }
        acc
    }

    /// Uniform random element with monomials of exactly `degree` supported
    /// inside `support`.
    pub fn random_homogeneous(
        ambient: &Arc<SiteSet>,
        support: SiteSubset,
        degree: usize,
        rng: &mut impl Rng,
    ) -> GradedElement {
        let monos = monomials_of_degree(ambient, support, degree);
        let m = ambient.modulus();
        let mut g = GradedElement::zero(ambient);
        for mono in monos {
            g.add_term(mono, rng.random_range(0..m) as i128);
        }
        g
    }

    /// Uniform random element of all degrees up to the cap, supported
    /// inside `support`.
    pub fn random(
        ambient: &Arc<SiteSet>,
        support: SiteSubset,
        rng: &mut impl Rng,
    ) -> GradedElement {
        let m = ambient.modulus();
        let mut g = GradedElement::zero(ambient);
        for d in 0..=ambient.degree_cap() {
            for mono in monomials_of_degree(ambient, support, d) {
                g.add_term(mono, rng.random_range(0..m) as i128);
            }
        }
        g
    }
}

/// All exponent vectors of total degree `degree` supported inside `support`.
pub fn monomials_of_degree(ambient: &SiteSet, support: SiteSubset, degree: usize) -> Vec<Monomial> {
    let idx: Vec<usize> = support.iter().filter(|&i| i < ambient.len()).collect();
    let mut out = Vec::new();
    let mut cur = vec![0u32; ambient.len()];
    fn rec(idx: &[usize], pos: usize, left: usize, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if pos == idx.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if pos + 1 == idx.len() {
            cur[idx[pos]] = left as u32;
            out.push(cur.clone());
            cur[idx[pos]] = 0;
            return;
        }
        for e in 0..=left {
            cur[idx[pos]] = e as u32;
            rec(idx, pos + 1, left - e, cur, out);
        }
        cur[idx[pos]] = 0;
    }
    if degree == 0 {
        return vec![cur];
    }
    if idx.is_empty() {
        return Vec::new();
    }
    rec(&idx, 0, degree, &mut cur, &mut out);
    out
}

impl Add for &GradedElement {
    type Output = GradedElement;
    fn add(self, rhs: &GradedElement) -> GradedElement {
        self.assert_same_ambient(rhs);
        assert_eq!(self.cap, rhs.cap, "mismatched coefficient caps");
        let mut out = self.clone();
        for (mono, &c) in &rhs.terms {
            out.add_term(mono.clone(), c as i128);
        }
        out
    }
}

impl Sub for &GradedElement {
    type Output = GradedElement;
    fn sub(self, rhs: &GradedElement) -> GradedElement {
        self.assert_same_ambient(rhs);
        assert_eq!(self.cap, rhs.cap, "mismatched coefficient caps");
        let mut out = self.clone();
        for (mono, &c) in &rhs.terms {
            out.add_term(mono.clone(), -(c as i128));
        }
        out
    }
}

impl Neg for &GradedElement {
    type Output = GradedElement;
    fn neg(self) -> GradedElement {
        let mut out = GradedElement {
            ambient: Arc::clone(&self.ambient),
            cap: self.cap,
            terms: BTreeMap::new(),
        };
        for (mono, &c) in &self.terms {
            out.add_term(mono.clone(), -(c as i128));
        }
        out
    }
}

impl Mul for &GradedElement {
    type Output = GradedElement;
    fn mul(self, rhs: &GradedElement) -> GradedElement {
        self.assert_same_ambient(rhs);
        let mut out = GradedElement {
            ambient: Arc::clone(&self.ambient),
            cap: gcd(self.cap, rhs.cap),
            terms: BTreeMap::new(),
        };
        let cap_deg = self.ambient.degree_cap();
        for (ma, &ca) in &self.terms {
            let da = monomial_degree(ma);
            for (mb, &cb) in &rhs.terms {
                if da + monomial_degree(mb) > cap_deg {
                    continue;
                }
                let mono: Monomial = ma.iter().zip(mb).map(|(&x, &y)| x + y).collect();
                out.add_term(mono, ca as i128 * cb as i128);
            }
        }
        out
    }
}

impl fmt::Display for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (mono, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if monomial_degree(mono) == 0 {
                write!(f, "{c}")?;
                continue;
            }
            if *c != 1 {
                write!(f, "{c}*")?;
            }
            let vars: Vec<String> = mono
                .iter()
                .enumerate()
                .filter(|&(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("x_{}", self.ambient.site(i).label)
                    } else {
                        format!("x_{}^{}", self.ambient.site(i).label, e)
                    }
                })
                .collect();
            write!(f, "{}", vars.join("*"))?;
        }
        Ok(())
    }
}

/// The determinant element `D_{n,d}` built from the degree-one family `P`:
/// diagonal entries `-P_{q_i}|_{n∖d}`, off-diagonal `-P_{q_i}|_{q_j}`, by
/// cofactor expansion; `D_{n,∅} = 1`.
pub fn det_d(
    ambient: &Arc<SiteSet>,
    n_set: SiteSubset,
    d_set: SiteSubset,
    p: &[GradedElement],
) -> GradedElement {
    assert!(d_set.is_subset_of(n_set), "D_{{n,d}} needs d ⊆ n");
    let d_sites: Vec<usize> = d_set.iter().collect();
    for &q in &d_sites {
        let pq = &p[q];
        assert!(
            pq.is_homogeneous_of(1),
            "P_{} must be homogeneous of degree 1",
            ambient.site(q).label
        );
        assert!(
            pq.project(SiteSubset::singleton(q)).is_zero(),
            "P_{} must be supported away from its own site",
            ambient.site(q).label
        );
    }
    let nu = d_sites.len();
    if nu == 0 {
        return GradedElement::one(ambient);
    }
    let outside = n_set.minus(d_set);
    let entries: Vec<Vec<GradedElement>> = d_sites
        .iter()
        .map(|&qi| {
            d_sites
                .iter()
                .map(|&qj| {
                    let keep = if qi == qj {
                        outside
                    } else {
                        SiteSubset::singleton(qj)
                    };
                    -&p[qi].project(keep)
                })
                .collect()
        })
        .collect();
    graded_det(ambient, &entries)
}

/// `D_d = D_{n,d}|_d`, which is independent of `n`.
pub fn det_d_full(ambient: &Arc<SiteSet>, d_set: SiteSubset, p: &[GradedElement]) -> GradedElement {
    det_d(ambient, d_set, d_set, p).project(d_set)
}

/// Determinant of a square matrix of graded elements by cofactor expansion.
pub fn graded_det(ambient: &Arc<SiteSet>, entries: &[Vec<GradedElement>]) -> GradedElement {
    let n = entries.len();
    if n == 0 {
        return GradedElement::one(ambient);
    }
    for row in entries {
        assert_eq!(row.len(), n, "determinant needs a square matrix");
    }
    if n == 1 {
        return entries[0][0].clone();
    }
    let mut acc = GradedElement::zero(ambient);
    for j in 0..n {
        if entries[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<GradedElement>> = entries[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let term = &entries[0][j] * &graded_det(ambient, &minor);
        if j % 2 == 0 {
            acc = &acc + &term;
        } else {
            acc = &acc - &term;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn sites_ab(m: u64, ta: u64, tb: u64) -> Arc<SiteSet> {
        SiteSet::new(m, vec![Site::new("a", ta), Site::new("b", tb)]).unwrap()
    }

    #[test]
    fn coefficient_normalization() {
        // x_a * x_a over {a: t=3}, m=9: coefficient reduced mod gcd(9,3)=3
        let s = SiteSet::with_degree_cap(9, vec![Site::new("a", 3)], 2).unwrap();
        let xa = GradedElement::variable(&s, 0);
        let sq = &xa * &xa;
        assert_eq!(sq.coeff(&vec![2]), 1);
        // 4 * x_a^2 = 1 * x_a^2 since 4 = 1 mod 3
        assert_eq!(sq.scale(4), sq);
    }

    #[test]
    fn addition_cancels_mod_m() {
        // (2 + x_a) + (1 + 2 x_a) = 0 over m = 3, t_a = 3
        let s = SiteSet::new(3, vec![Site::new("a", 3)]).unwrap();
        let xa = GradedElement::variable(&s, 0);
        let g1 = &GradedElement::constant(&s, 2) + &xa;
        let g2 = &GradedElement::constant(&s, 1) + &xa.scale(2);
        assert!((&g1 + &g2).is_zero());
    }

    #[test]
    fn unit_law() {
        let s = sites_ab(9, 3, 9);
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for _ in 0..20 {
            let g = GradedElement::random(&s, s.full(), &mut rng);
            assert_eq!(&g * &GradedElement::one(&s), g);
        }
    }

    #[test]
    fn project_examples() {
        let s = sites_ab(9, 3, 9);
        let a = SiteSubset::singleton(0);
        let xa = GradedElement::variable(&s, 0);
        let xb = GradedElement::variable(&s, 1);
        // 2 + x_a + x_a x_b
        let g = &(&GradedElement::constant(&s, 2) + &xa) + &(&xa * &xb);
        assert_eq!(g.project(a), &GradedElement::constant(&s, 2) + &xa);
        assert_eq!(
            g.project(SiteSubset::empty()),
            GradedElement::constant(&s, 2)
        );
        // graded pieces
        assert_eq!(g.graded_piece(1), xa);
        assert_eq!(g.graded_piece(0), GradedElement::constant(&s, 2));
    }

    #[test]
    fn project_composition_and_recomposition() {
        let s = sites_ab(9, 3, 9);
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..50 {
            let g = GradedElement::random(&s, s.full(), &mut rng);
            let a = SiteSubset(rng.random_range(0..4));
            let b = SiteSubset(rng.random_range(0..4));
            assert_eq!(g.project(a).project(b), g.project(a.intersect(b)));
            // sum of graded pieces recomposes
            let mut sum = GradedElement::zero(&s);
            for i in 0..=s.degree_cap() {
                sum = &sum + &g.graded_piece(i);
            }
            assert_eq!(sum, g);
        }
    }

    #[test]
    fn project_is_ring_homomorphism() {
        let s = sites_ab(9, 3, 9);
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = GradedElement::random(&s, s.full(), &mut rng);
            let b = GradedElement::random(&s, s.full(), &mut rng);
            let keep = SiteSubset(rng.random_range(0..4));
            assert_eq!((&a * &b).project(keep), &a.project(keep) * &b.project(keep));
            assert_eq!((&a + &b).project(keep), &a.project(keep) + &b.project(keep));
        }
    }

    #[test]
    fn s_operator_examples() {
        let s = sites_ab(9, 3, 9);
        let a = SiteSubset::singleton(0);
        let xa = GradedElement::variable(&s, 0);
        // s_{a,a}(2 + x_a) = x_a
        let g = &GradedElement::constant(&s, 2) + &xa;
        assert_eq!(g.s_operator(a, a), xa);
        // n = empty: identity
        let full = s.full();
        let xb = GradedElement::variable(&s, 1);
        let g2 = &xa * &xb;
        assert_eq!(g2.s_operator(full, SiteSubset::empty()), g2);
        // s_{ab,ab}(x_a x_b) = x_a x_b
        assert_eq!(g2.s_operator(full, full), g2);
    }

    #[test]
    fn s_operator_lands_in_product_ideal() {
        // every surviving monomial must be divisible by every x_q, q in n,
        // so all projections pi_{n/q} kill the result
        let s = SiteSet::new(
            9,
            vec![Site::new("a", 3), Site::new("b", 9), Site::new("c", 6)],
        )
        .unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let full = s.full();
        for _ in 0..60 {
            let g = GradedElement::random(&s, full, &mut rng);
            let n = SiteSubset(rng.random_range(0..8));
            let sg = g.s_operator(full, n);
            for (mono, _) in sg.terms() {
                for q in n.iter() {
                    assert!(mono[q] >= 1, "monomial not divisible by x_{q}");
                }
            }
            for q in n.iter() {
                assert!(sg.project(full.minus(SiteSubset::singleton(q))).is_zero());
            }
        }
    }

    #[test]
    fn det_d_examples() {
        // n = d = {q1, q2}, P_q1 = x_q2, P_q2 = x_q1:
        // det [[0, -x_q2], [-x_q1, 0]] = -x_q1 x_q2
        let s = sites_ab(9, 3, 3);
        let p = vec![
            GradedElement::variable(&s, 1),
            GradedElement::variable(&s, 0),
        ];
        let full = s.full();
        let d = det_d(&s, full, full, &p);
        let expect = -&(&p[1] * &p[0]);
        assert_eq!(d, expect);

        // 1x1: D_{n,{q1}} = -P_q1|_{n∖q1}
        let d1 = det_d(&s, full, SiteSubset::singleton(0), &p);
        assert_eq!(d1, -&p[0].project(SiteSubset::singleton(1)));

        // D_{q1} = pi_{q1}(D_{n,{q1}}) = 0 since P_q1 avoids q1
        assert!(det_d_full(&s, SiteSubset::singleton(0), &p).is_zero());

        // empty d: the unit
        assert_eq!(
            det_d(&s, full, SiteSubset::empty(), &p),
            GradedElement::one(&s)
        );
    }

    #[test]
    fn det_d_order_invariant() {
        // the determinant does not depend on the listed order of d: build
        // the matrix with an explicitly permuted site order and compare
        let s = SiteSet::new(
            9,
            vec![Site::new("a", 3), Site::new("b", 9), Site::new("c", 6)],
        )
        .unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(29);
        for _ in 0..25 {
            let p: Vec<GradedElement> = (0..3)
                .map(|q| {
                    let mut acc = GradedElement::zero(&s);
                    for q2 in 0..3 {
                        if q2 != q {
                            acc = &acc
                                + &GradedElement::variable(&s, q2)
                                    .scale(rng.random_range(0..9) as i128);
                        }
                    }
                    acc
                })
                .collect();
            let n = s.full();
            let d = SiteSubset::from_indices(&[0, 1, 2]);
            let canonical = det_d(&s, n, d, &p);
            for order in [[0usize, 1, 2], [1, 0, 2], [2, 1, 0], [1, 2, 0]] {
                let entries: Vec<Vec<GradedElement>> = order
                    .iter()
                    .map(|&qi| {
                        order
                            .iter()
                            .map(|&qj| {
                                let keep = if qi == qj {
                                    n.minus(d)
                                } else {
                                    SiteSubset::singleton(qj)
                                };
                                -&p[qi].project(keep)
                            })
                            .collect()
                    })
                    .collect();
                assert_eq!(graded_det(&s, &entries), canonical, "order {order:?}");
            }
        }
    }

    #[test]
    fn capped_scalar_multiplication() {
        let s = sites_ab(9, 3, 9);
        let g = &GradedElement::constant(&s, 5) + &GradedElement::variable(&s, 1);
        // multiplying by a value of O/(3) caps the whole element
        let c = Residue::new(2, 3);
        let gc = g.scalar_mul(c);
        assert_eq!(gc.cap(), 3);
        assert_eq!(gc.coeff(&vec![0, 0]), (5 * 2) % 3);
        assert_eq!(gc.coeff(&vec![0, 1]), 2);
    }

    #[test]
    fn monomial_enumeration() {
        let s = sites_ab(9, 3, 9);
        assert_eq!(monomials_of_degree(&s, s.full(), 0), vec![vec![0, 0]]);
        let deg2 = monomials_of_degree(&s, s.full(), 2);
        assert_eq!(deg2.len(), 3);
        assert_eq!(
            monomials_of_degree(&s, SiteSubset::empty(), 1),
            Vec::<Monomial>::new()
        );
    }
}
