//! Exterior powers `Λ^r H` of a free `O`-module with a fixed basis, tensored
//! with the graded algebra, and contraction by functionals.
//!
//! Contraction sends `m_1 ∧ ⋯ ∧ m_r` to `Σ_i (-1)^{i-1} m_1 ∧ ⋯ m̂_i ⋯ ∧ m_r
//! ⊗ f(m_i)`; a functional into `O` multiplies the graded factor by a
//! scalar, one into `O/(t_q)` additionally caps the coefficients, and one
//! into the degree-one graded piece raises the graded degree. A sequence
//! `f_1 ∧ ⋯ ∧ f_s` applies `f_s` first, then `f_{s-1}`, and so on.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::graded::{GradedElement, Monomial, SiteSet, SiteSubset};
use crate::linalg::{self, MatrixZm};
use crate::modring::Residue;

/// A functional on `H`, stored by its values on the fixed basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Functional {
    /// Values in `O` or in a quotient `O/(d)`; all residues share one
    /// divisor.
    Scalar(Vec<Residue>),
    /// Values in the degree-one graded piece.
    Graded(Vec<GradedElement>),
}

impl Functional {
    pub fn into_o(m: u64, values: &[u64]) -> Self {
        Functional::Scalar(values.iter().map(|&v| Residue::new(v as i128, m)).collect())
    }

    pub fn into_quotient(d: u64, values: &[u64]) -> Self {
        Functional::Scalar(values.iter().map(|&v| Residue::new(v as i128, d)).collect())
    }

    pub fn into_graded(values: Vec<GradedElement>) -> Self {
        for v in &values {
            assert!(
                v.is_homogeneous_of(1),
                "graded functional values must be homogeneous of degree 1"
            );
        }
        Functional::Graded(values)
    }

    pub fn h_rank(&self) -> usize {
        match self {
            Functional::Scalar(v) => v.len(),
            Functional::Graded(v) => v.len(),
        }
    }

    pub fn negated(&self) -> Functional {
        match self {
            Functional::Scalar(v) => Functional::Scalar(v.iter().map(|&r| -r).collect()),
            Functional::Graded(v) => Functional::Graded(v.iter().map(|g| -g).collect()),
        }
    }

    /// Value on a coordinate vector, for scalar functionals.
    pub fn eval(&self, a: &[u64]) -> Residue {
        match self {
            Functional::Scalar(v) => {
                assert_eq!(v.len(), a.len());
                let d = v.first().map_or(1, |r| r.divisor());
                let mut acc: i128 = 0;
                for (r, &x) in v.iter().zip(a) {
                    acc += r.value() as i128 * x as i128;
                }
                Residue::new(acc, d)
            }
            Functional::Graded(_) => panic!("eval on a graded-valued functional"),
        }
    }
}

/// An element of `Λ^r H ⊗ G`: graded coefficients indexed by strictly
/// increasing basis tuples, stored as bitmasks with `r` set bits. Absent
/// entries are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WedgeTensor {
    rank: usize,
    h_rank: usize,
    ambient: Arc<SiteSet>,
    coeffs: BTreeMap<u32, GradedElement>,
}

impl WedgeTensor {
    pub fn zero(ambient: &Arc<SiteSet>, rank: usize, h_rank: usize) -> Self {
        assert!(h_rank <= 32);
        WedgeTensor {
            rank,
            h_rank,
            ambient: Arc::clone(ambient),
            coeffs: BTreeMap::new(),
        }
    }

    /// The alternating expansion of `v_1 ∧ ⋯ ∧ v_r` onto increasing basis
    /// tuples: the coefficient at a tuple is the determinant of the
    /// corresponding minor.
    pub fn wedge(ambient: &Arc<SiteSet>, vectors: &[Vec<u64>]) -> Self {
        let r = vectors.len();
        let h = vectors.first().map_or(0, Vec::len);
        for v in vectors {
            assert_eq!(v.len(), h, "wedge vectors must share a length");
        }
        let m = ambient.modulus();
        let mut out = WedgeTensor::zero(ambient, r, h);
        if r == 0 {
            out.set(0, GradedElement::one(ambient));
            return out;
        }
        for mask in masks_of_weight(h, r) {
            let idx: Vec<usize> = bits(mask).collect();
            let mut minor = MatrixZm::new(m, r, r);
            for (i, v) in vectors.iter().enumerate() {
                for (j, &b) in idx.iter().enumerate() {
                    minor.set(i, j, v[b]);
                }
            }
            let det = minor.det();
            if det != 0 {
                out.set(mask, GradedElement::constant(ambient, det as i128));
            }
        }
        out
    }

    pub fn single(ambient: &Arc<SiteSet>, h_rank: usize, mask: u32, value: GradedElement) -> Self {
        let mut out = WedgeTensor::zero(ambient, mask.count_ones() as usize, h_rank);
        out.set(mask, value);
        out
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn h_rank(&self) -> usize {
        self.h_rank
    }

    pub fn ambient(&self) -> &Arc<SiteSet> {
        &self.ambient
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, mask: u32) -> GradedElement {
        self.coeffs
            .get(&mask)
            .cloned()
            .unwrap_or_else(|| GradedElement::zero(&self.ambient))
    }

    pub fn entries(&self) -> impl Iterator<Item = (u32, &GradedElement)> {
        self.coeffs.iter().map(|(&k, v)| (k, v))
    }

    fn set(&mut self, mask: u32, value: GradedElement) {
        assert_eq!(
            mask.count_ones() as usize,
            self.rank,
            "tuple arity mismatch"
        );
        assert!(
            self.h_rank == 32 || mask < (1u32 << self.h_rank),
            "basis index out of range"
        );
        if value.is_zero() {
            self.coeffs.remove(&mask);
        } else {
            self.coeffs.insert(mask, value);
        }
    }

    fn accumulate(&mut self, mask: u32, value: &GradedElement) {
        let cur = self.coeffs.get(&mask);
        let next = match cur {
            Some(g) => g + value,
            None => value.clone(),
        };
        self.set(mask, next);
    }

    fn assert_compatible(&self, other: &WedgeTensor) {
        assert_eq!(self.rank, other.rank, "wedge rank mismatch");
        assert_eq!(self.h_rank, other.h_rank, "H rank mismatch");
    }

    pub fn add(&self, other: &WedgeTensor) -> WedgeTensor {
        self.assert_compatible(other);
        let mut out = self.clone();
        for (mask, g) in other.entries() {
            out.accumulate(mask, g);
        }
        out
    }

    pub fn sub(&self, other: &WedgeTensor) -> WedgeTensor {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> WedgeTensor {
        let mut out = WedgeTensor::zero(&self.ambient, self.rank, self.h_rank);
        for (mask, g) in self.entries() {
            out.set(mask, -g);
        }
        out
    }

    /// Multiplies every graded coefficient by `g` (the module action of the
    /// graded algebra on `Λ^r H ⊗ G`).
    pub fn mul_graded(&self, g: &GradedElement) -> WedgeTensor {
        let mut out = WedgeTensor::zero(&self.ambient, self.rank, self.h_rank);
        for (mask, c) in self.entries() {
            out.set(mask, c * g);
        }
        out
    }

    pub fn scalar_mul(&self, c: Residue) -> WedgeTensor {
        let mut out = WedgeTensor::zero(&self.ambient, self.rank, self.h_rank);
        for (mask, g) in self.entries() {
            out.set(mask, g.scalar_mul(c));
        }
        out
    }

    /// Applies the graded projection `(·)|_keep` to every coefficient.
    pub fn project(&self, keep: SiteSubset) -> WedgeTensor {
        let mut out = WedgeTensor::zero(&self.ambient, self.rank, self.h_rank);
        for (mask, g) in self.entries() {
            out.set(mask, g.project(keep));
        }
        out
    }

    /// Applies `s_{m,n}` to every coefficient.
    pub fn s_operator(&self, m_set: SiteSubset, n_set: SiteSubset) -> WedgeTensor {
        let mut out = WedgeTensor::zero(&self.ambient, self.rank, self.h_rank);
        for (mask, g) in self.entries() {
            out.set(mask, g.s_operator(m_set, n_set));
        }
        out
    }

    pub fn graded_piece(&self, i: usize) -> WedgeTensor {
        let mut out = WedgeTensor::zero(&self.ambient, self.rank, self.h_rank);
        for (mask, g) in self.entries() {
            out.set(mask, g.graded_piece(i));
        }
        out
    }

    /// Union of the supports of all coefficients.
    pub fn support(&self) -> SiteSubset {
        self.coeffs
            .values()
            .fold(SiteSubset::empty(), |s, g| s.union(g.support()))
    }

    /// True if every coefficient is homogeneous of the given graded degree.
    pub fn is_homogeneous_of(&self, degree: usize) -> bool {
        self.coeffs.values().all(|g| g.is_homogeneous_of(degree))
    }

    /// Contraction by a single functional: rank drops by one, the graded
    /// factor absorbs the functional's codomain.
    pub fn contract(&self, f: &Functional) -> WedgeTensor {
        assert!(self.rank >= 1, "cannot contract a rank-0 wedge");
        assert_eq!(f.h_rank(), self.h_rank, "functional arity mismatch");
        let mut out = WedgeTensor::zero(&self.ambient, self.rank - 1, self.h_rank);
        for (mask, g) in self.entries() {
            for i in bits(mask) {
                let below = (mask & ((1u32 << i) - 1)).count_ones();
                let sign = below.is_multiple_of(2);
                let contrib = match f {
                    Functional::Scalar(vals) => {
                        let r = vals[i];
                        if r.is_zero() {
                            continue;
                        }
                        g.scalar_mul(r)
                    }
                    Functional::Graded(vals) => {
                        if vals[i].is_zero() {
                            continue;
                        }
                        g * &vals[i]
                    }
                };
                let signed = if sign { contrib } else { -&contrib };
                out.accumulate(mask & !(1u32 << i), &signed);
            }
        }
        out
    }

    /// `(f_1 ∧ ⋯ ∧ f_s)`: applies `f_s` first, then `f_{s-1}`, and so on.
    pub fn contract_seq(&self, fs: &[Functional]) -> WedgeTensor {
        assert!(fs.len() <= self.rank, "more functionals than the rank");
        let mut acc = self.clone();
        for f in fs.iter().rev() {
            acc = acc.contract(f);
        }
        acc
    }

    /// Coordinates over the wedge basis when every coefficient is a
    /// constant; `None` if any coefficient has positive degree.
    pub fn scalar_coords(&self) -> Option<Vec<u64>> {
        let masks = masks_of_weight(self.h_rank, self.rank);
        let empty_mono: Monomial = vec![0; self.ambient.len()];
        let mut out = Vec::with_capacity(masks.len());
        for mask in masks {
            match self.coeffs.get(&mask) {
                None => out.push(0),
                Some(g) => {
                    if !g.is_homogeneous_of(0) {
                        return None;
                    }
                    out.push(g.coeff(&empty_mono));
                }
            }
        }
        Some(out)
    }

    /// Rebuilds a scalar-coefficient tensor from coordinates over the wedge
    /// basis.
    pub fn from_scalar_coords(
        ambient: &Arc<SiteSet>,
        rank: usize,
        h_rank: usize,
        coords: &[u64],
    ) -> WedgeTensor {
        let masks = masks_of_weight(h_rank, rank);
        assert_eq!(coords.len(), masks.len());
        let mut out = WedgeTensor::zero(ambient, rank, h_rank);
        for (mask, &c) in masks.into_iter().zip(coords) {
            if c % ambient.modulus() != 0 {
                out.set(mask, GradedElement::constant(ambient, c as i128));
            }
        }
        out
    }

    /// Collects the `(tuple, monomial)` coordinates this tensor touches.
    pub fn collect_keys(&self, keys: &mut BTreeSet<(u32, Monomial)>) {
        for (mask, g) in self.entries() {
            for (mono, _) in g.terms() {
                keys.insert((mask, mono.clone()));
            }
        }
    }

    /// Flattens onto the given coordinate list as a `Z/m` vector, embedding
    /// each `Z/d` coefficient through `c ↦ c · (m/d)`. The embedding is an
    /// injective module map, so span membership over the flattened vectors
    /// agrees with membership in `Λ^r H ⊗ G`.
    pub fn flatten(&self, keys: &[(u32, Monomial)]) -> Vec<u64> {
        let m = self.ambient.modulus();
        keys.iter()
            .map(|(mask, mono)| match self.coeffs.get(mask) {
                None => 0,
                Some(g) => {
                    assert_eq!(g.cap(), m, "flatten expects uncapped coefficients");
                    let c = g.coeff(mono);
                    if c == 0 {
                        0
                    } else {
                        let div = self
                            .ambient
                            .support_divisor(crate::graded::monomial_support_of(mono), m);
                        (c as u128 * (m / div) as u128 % m as u128) as u64
                    }
                }
            })
            .collect()
    }
}

impl fmt::Display for WedgeTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (mask, g) in self.entries() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let idx: Vec<String> = bits(mask).map(|i| format!("e{}", i + 1)).collect();
            if idx.is_empty() {
                write!(f, "({g})")?;
            } else {
                write!(f, "{} ⊗ ({g})", idx.join("∧"))?;
            }
        }
        Ok(())
    }
}

/// Membership of `target` in the `O`-span of `gens`, all living in the same
/// `Λ^r H ⊗ G`; returns combining coefficients when solvable.
pub fn wedge_in_span(gens: &[WedgeTensor], target: &WedgeTensor) -> Option<Vec<u64>> {
    let mut keys = BTreeSet::new();
    target.collect_keys(&mut keys);
    WedgeSpan::over_keys(target.ambient().modulus(), gens, keys).solve(target)
}

/// A prepared span of wedge tensors: one reduction answers membership for
/// any number of targets.
pub struct WedgeSpan {
    m: u64,
    keys: Vec<(u32, Monomial)>,
    solver: linalg::SpanSolver,
}

impl WedgeSpan {
    pub fn new(m: u64, gens: &[WedgeTensor]) -> Self {
        WedgeSpan::over_keys(m, gens, BTreeSet::new())
    }

    fn over_keys(m: u64, gens: &[WedgeTensor], mut keys: BTreeSet<(u32, Monomial)>) -> Self {
        for g in gens {
            g.collect_keys(&mut keys);
        }
        let keys: Vec<(u32, Monomial)> = keys.into_iter().collect();
        let flat: Vec<Vec<u64>> = gens.iter().map(|g| g.flatten(&keys)).collect();
        let solver = linalg::SpanSolver::new(m, &flat, keys.len());
        WedgeSpan { m, keys, solver }
    }

    pub fn solve(&self, target: &WedgeTensor) -> Option<Vec<u64>> {
        // a coordinate outside the span's key set cannot be matched: a
        // canonical nonzero coefficient embeds to a nonzero value
        let mut target_keys = BTreeSet::new();
        target.collect_keys(&mut target_keys);
        if !target_keys
            .iter()
            .all(|k| self.keys.binary_search(k).is_ok())
        {
            return None;
        }
        let _ = self.m;
        self.solver.solve(&target.flatten(&self.keys))
    }
}

/// Indices of the set bits, ascending.
pub fn bits(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |&i| mask & (1 << i) != 0)
}

/// All bitmasks over `n` bits with exactly `k` bits set, ascending.
pub fn masks_of_weight(n: usize, k: usize) -> Vec<u32> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let limit: u64 = 1u64 << n;
    for mask in 0..limit {
        if (mask as u32).count_ones() as usize == k {
            out.push(mask as u32);
        }
    }
    out
}
