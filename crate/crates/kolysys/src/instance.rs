//! The seven-tuple `(O, Σ, H, t, v, u, P)`: a coefficient ring `Z/m`, a
//! finite site set with cyclic orders `t_q`, a free module `H` with a fixed
//! basis, per-site functionals `v_q` into `O` and `u_q` into `O/(t_q)`, and
//! degree-one elements `P_q` supported away from their own site.
//!
//! From these the reciprocity-style map `φ_q(a) = -u_q(a)·x_q - v_q(a)·P_q`
//! and the modified Selmer submodules `S^n = {a : v_q(a) = 0 for q ∉ n}`
//! are built.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::exterior::Functional;
use crate::graded::{GradedElement, Site, SiteSet, SiteSubset};
use crate::linalg::{self, MatrixZm};
use crate::modring::{Residue, RingError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("functional row for site {0} has length {1}, expected {2}")]
    RowLength(String, usize, usize),
    #[error("u value {0} at site {1} not reduced modulo gcd(m, t)")]
    UnreducedU(u64, String),
    #[error("P at site {0} must be homogeneous of degree 1")]
    BadPDegree(String),
    #[error("P at site {0} must be supported away from its own site")]
    BadPSupport(String),
    #[error("unknown site label {0}")]
    UnknownSite(String),
    #[error("invalid parameters: {0}")]
    BadParams(String),
}

/// One instance of the framework; immutable after construction, all
/// invariants checked up front.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SevenTuple {
    sites: Arc<SiteSet>,
    h_rank: usize,
    /// `v[q][i] = v_q(e_i)`, reduced mod m.
    v: Vec<Vec<u64>>,
    /// `u[q][i] = u_q(e_i)`, reduced mod gcd(m, t_q).
    u: Vec<Vec<u64>>,
    /// `P_q`, degree-one and supported in `Σ∖{q}`.
    p: Vec<GradedElement>,
}

impl SevenTuple {
    pub fn new(
        sites: Arc<SiteSet>,
        h_rank: usize,
        v: Vec<Vec<u64>>,
        u: Vec<Vec<u64>>,
        p: Vec<GradedElement>,
    ) -> Result<Self, InstanceError> {
        let n = sites.len();
        let m = sites.modulus();
        if v.len() != n || u.len() != n || p.len() != n {
            return Err(InstanceError::BadParams(format!(
                "expected {n} per-site rows, got v:{} u:{} P:{}",
                v.len(),
                u.len(),
                p.len()
            )));
        }
        let mut v = v;
        for (q, row) in v.iter_mut().enumerate() {
            if row.len() != h_rank {
                return Err(InstanceError::RowLength(
                    sites.site(q).label.clone(),
                    row.len(),
                    h_rank,
                ));
            }
            for x in row.iter_mut() {
                *x %= m;
            }
        }
        for (q, row) in u.iter().enumerate() {
            if row.len() != h_rank {
                return Err(InstanceError::RowLength(
                    sites.site(q).label.clone(),
                    row.len(),
                    h_rank,
                ));
            }
            let d = sites.site_divisor(q);
            for &x in row {
                if x >= d {
                    return Err(InstanceError::UnreducedU(x, sites.site(q).label.clone()));
                }
            }
        }
        for (q, pq) in p.iter().enumerate() {
            if !pq.is_homogeneous_of(1) {
                return Err(InstanceError::BadPDegree(sites.site(q).label.clone()));
            }
            if !pq.project(SiteSubset::singleton(q)).is_zero() {
                return Err(InstanceError::BadPSupport(sites.site(q).label.clone()));
            }
        }
        Ok(SevenTuple {
            sites,
            h_rank,
            v,
            u,
            p,
        })
    }

    pub fn sites(&self) -> &Arc<SiteSet> {
        &self.sites
    }

    pub fn modulus(&self) -> u64 {
        self.sites.modulus()
    }

    pub fn h_rank(&self) -> usize {
        self.h_rank
    }

    pub fn v_row(&self, q: usize) -> &[u64] {
        &self.v[q]
    }

    pub fn u_row(&self, q: usize) -> &[u64] {
        &self.u[q]
    }

    pub fn p_at(&self, q: usize) -> &GradedElement {
        &self.p[q]
    }

    pub fn p_family(&self) -> &[GradedElement] {
        &self.p
    }

    /// `v_q` as a contraction functional into `O`.
    pub fn v_functional(&self, q: usize) -> Functional {
        Functional::into_o(self.modulus(), &self.v[q])
    }

    /// `u_q` as a contraction functional into `O/(t_q)`.
    pub fn u_functional(&self, q: usize) -> Functional {
        Functional::into_quotient(self.sites.site_divisor(q), &self.u[q])
    }

    /// `v_q(a)` on a coordinate vector.
    pub fn v_value(&self, q: usize, a: &[u64]) -> Residue {
        self.v_functional(q).eval(a)
    }

    /// `u_q(a)` on a coordinate vector.
    pub fn u_value(&self, q: usize, a: &[u64]) -> Residue {
        self.u_functional(q).eval(a)
    }

    /// `φ_q(a) = -u_q(a)·x_q - v_q(a)·P_q`, a degree-one element of the
    /// full graded algebra.
    pub fn phi(&self, q: usize, a: &[u64]) -> GradedElement {
        assert_eq!(a.len(), self.h_rank, "vector length mismatch");
        let uq = self.u_value(q, a);
        let vq = self.v_value(q, a);
        let xq_part = GradedElement::variable(&self.sites, q).scale(-(uq.value() as i128));
        let p_part = self.p[q].scale(-(vq.value() as i128));
        &xq_part + &p_part
    }

    /// `φ_q^n = π_n ∘ φ_q`.
    pub fn phi_n(&self, q: usize, n: SiteSubset, a: &[u64]) -> GradedElement {
        self.phi(q, a).project(n)
    }

    /// `φ_q` as a contraction functional into the degree-one graded piece.
    pub fn phi_functional(&self, q: usize) -> Functional {
        let values = (0..self.h_rank)
            .map(|i| {
                let mut e = vec![0u64; self.h_rank];
                e[i] = 1;
                self.phi(q, &e)
            })
            .collect();
        Functional::into_graded(values)
    }

    /// `φ_q^n` as a contraction functional.
    pub fn phi_n_functional(&self, q: usize, n: SiteSubset) -> Functional {
        let values = (0..self.h_rank)
            .map(|i| {
                let mut e = vec![0u64; self.h_rank];
                e[i] = 1;
                self.phi_n(q, n, &e)
            })
            .collect();
        Functional::into_graded(values)
    }

    /// The stacked constraint matrix of `S^n`: rows `v_q` for `q ∈ Σ∖n`.
    pub fn selmer_matrix(&self, n: SiteSubset) -> MatrixZm {
        let outside: Vec<usize> = self.sites.full().minus(n).iter().collect();
        let mut mat = MatrixZm::new(self.modulus(), outside.len(), self.h_rank);
        for (row, &q) in outside.iter().enumerate() {
            for (col, &x) in self.v[q].iter().enumerate() {
                mat.set(row, col, x);
            }
        }
        mat
    }

    /// Generators of the `n`-modified Selmer submodule
    /// `S^n = {a ∈ H : v_q(a) = 0 for every q ∈ Σ∖n}`.
    pub fn selmer_generators(&self, n: SiteSubset) -> Vec<Vec<u64>> {
        linalg::kernel_generators(&self.selmer_matrix(n))
    }
}

/// Parameters for [`random_instance`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceParams {
    pub m: u64,
    pub t_values: Vec<u64>,
    pub h_rank: usize,
}

impl InstanceParams {
    pub fn new(m: u64, t_values: Vec<u64>, h_rank: usize) -> Self {
        InstanceParams {
            m,
            t_values,
            h_rank,
        }
    }
}

/// Deterministic-from-seed random instance satisfying every invariant:
/// random `v` rows mod `m`, `u` rows already reduced mod `gcd(m, t_q)`, and
/// each `P_q` a random combination of the variables away from `q`.
pub fn random_instance(seed: u64, params: &InstanceParams) -> Result<SevenTuple, InstanceError> {
    if params.t_values.is_empty() {
        return Err(InstanceError::BadParams("no sites".into()));
    }
    if params.h_rank == 0 {
        return Err(InstanceError::BadParams("H must have positive rank".into()));
    }
    for &t in &params.t_values {
        if t == 0 {
            return Err(InstanceError::BadParams(
                "site order t must be positive".into(),
            ));
        }
    }
    let sites: Vec<Site> = params
        .t_values
        .iter()
        .enumerate()
        .map(|(i, &t)| Site::new(format!("q{}", i + 1), t))
        .collect();
    let sites = SiteSet::new(params.m, sites)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Ok(random_instance_on(&sites, params.h_rank, &mut rng))
}

/// Random instance over an existing site set, drawing from the given rng.
pub fn random_instance_on(sites: &Arc<SiteSet>, h_rank: usize, rng: &mut impl Rng) -> SevenTuple {
    let m = sites.modulus();
    let n = sites.len();
    let v: Vec<Vec<u64>> = (0..n)
        .map(|_| (0..h_rank).map(|_| rng.random_range(0..m)).collect())
        .collect();
    let u: Vec<Vec<u64>> = (0..n)
        .map(|q| {
            let d = sites.site_divisor(q);
            (0..h_rank).map(|_| rng.random_range(0..d)).collect()
        })
        .collect();
    let p: Vec<GradedElement> = (0..n)
        .map(|q| {
            let mut acc = GradedElement::zero(sites);
            for q2 in 0..n {
                if q2 == q {
                    continue;
                }
                let c = rng.random_range(0..m);
                acc = &acc + &GradedElement::variable(sites, q2).scale(c as i128);
            }
            acc
        })
        .collect();
    SevenTuple::new(Arc::clone(sites), h_rank, v, u, p).expect("construction preserves invariants")
}
