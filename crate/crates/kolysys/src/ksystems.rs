//! The four system flavors and the maps between them.
//!
//! A collection assigns to every subset `n ⊆ Σ` an element of
//! `Λ^r H ⊗ G(n)_{ν(n)}` (or `Λ^r H ⊗ G(Σ)_{ν(n)}` for the pre flavor).
//! Plain systems satisfy the local axioms K1-K4; the theta, pre, and
//! derived flavors satisfy the reformulations TK1-TK4, PK1-PK5, and
//! DK1-DK4 that match theta elements, their lifts, and derivative classes.
//! The five forward transforms and the three recursive inverses realize the
//! isomorphisms between the flavors; the ordered-partition determinant
//! identity is the combinatorial engine behind the triangle
//! `F_TK ∘ F_PT = F_PK`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::exterior::{masks_of_weight, WedgeTensor};
use crate::graded::{det_d, det_d_full, GradedElement, SiteSubset};
use crate::instance::SevenTuple;
use crate::linalg::MatrixZm;
use crate::report::Report;

/// Which axiom family a collection claims to satisfy. `Raw` carries
/// arbitrary elements of the ambient product module and has no axioms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Ks,
    Tks,
    Pks,
    Dks,
    Raw,
}

impl SystemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SystemKind::Ks => "KS",
            SystemKind::Tks => "TKS",
            SystemKind::Pks => "PKS",
            SystemKind::Dks => "DKS",
            SystemKind::Raw => "RAW",
        }
    }

    pub fn parse(s: &str) -> Option<SystemKind> {
        match s {
            "KS" => Some(SystemKind::Ks),
            "TKS" => Some(SystemKind::Tks),
            "PKS" => Some(SystemKind::Pks),
            "DKS" => Some(SystemKind::Dks),
            "RAW" => Some(SystemKind::Raw),
            _ => None,
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A family `{κ_n}` indexed by the subsets of `Σ`, tagged with its flavor.
/// Every subset has an entry; absent means zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemCollection {
    instance: Arc<SevenTuple>,
    rank: usize,
    kind: SystemKind,
    entries: BTreeMap<u32, WedgeTensor>,
}

impl SystemCollection {
    pub fn zero(instance: &Arc<SevenTuple>, rank: usize, kind: SystemKind) -> Self {
        let mut entries = BTreeMap::new();
        for n in instance.sites().full().subsets() {
            entries.insert(
                n.bits(),
                WedgeTensor::zero(instance.sites(), rank, instance.h_rank()),
            );
        }
        SystemCollection {
            instance: Arc::clone(instance),
            rank,
            kind,
            entries,
        }
    }

    pub fn from_entries(
        instance: &Arc<SevenTuple>,
        rank: usize,
        kind: SystemKind,
        entries: impl IntoIterator<Item = (SiteSubset, WedgeTensor)>,
    ) -> Self {
        let mut out = SystemCollection::zero(instance, rank, kind);
        for (n, w) in entries {
            assert!(
                n.is_subset_of(instance.sites().full()),
                "entry subset outside the ambient sites"
            );
            assert_eq!(w.rank(), rank, "entry rank mismatch");
            assert_eq!(w.h_rank(), instance.h_rank(), "entry H-rank mismatch");
            out.entries.insert(n.bits(), w);
        }
        out
    }

    pub fn instance(&self) -> &Arc<SevenTuple> {
        &self.instance
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: SystemKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn entry(&self, n: SiteSubset) -> &WedgeTensor {
        self.entries
            .get(&n.bits())
            .expect("every subset has an entry")
    }

    pub fn entries(&self) -> impl Iterator<Item = (SiteSubset, &WedgeTensor)> {
        self.entries
            .iter()
            .map(|(&b, w)| (SiteSubset::from_bits(b), w))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(WedgeTensor::is_zero)
    }

    pub fn sub(&self, other: &SystemCollection) -> SystemCollection {
        assert_eq!(self.rank, other.rank);
        let entries: Vec<(SiteSubset, WedgeTensor)> = self
            .entries()
            .map(|(n, w)| (n, w.sub(other.entry(n))))
            .collect();
        SystemCollection::from_entries(&self.instance, self.rank, SystemKind::Raw, entries)
    }

    /// Uniform random collection in the product module
    /// `∏ Λ^r H ⊗ G(n)_{ν(n)}`; tagged `Raw`.
    pub fn random_in_product(
        instance: &Arc<SevenTuple>,
        rank: usize,
        rng: &mut impl Rng,
    ) -> SystemCollection {
        let sites = instance.sites();
        let entries: Vec<(SiteSubset, WedgeTensor)> = sites
            .full()
            .subsets()
            .into_iter()
            .map(|n| {
                let mut w = WedgeTensor::zero(sites, rank, instance.h_rank());
                for mask in masks_of_weight(instance.h_rank(), rank) {
                    let g = GradedElement::random_homogeneous(sites, n, n.count(), rng);
                    w = w.add(&WedgeTensor::single(sites, instance.h_rank(), mask, g));
                }
                (n, w)
            })
            .collect();
        SystemCollection::from_entries(instance, rank, SystemKind::Raw, entries)
    }

    /// Uniform random collection shaped like the pre flavor:
    /// `∏ Λ^r H ⊗ G(Σ)_{ν(n)}`; tagged `Raw`.
    pub fn random_pre_shaped(
        instance: &Arc<SevenTuple>,
        rank: usize,
        rng: &mut impl Rng,
    ) -> SystemCollection {
        let sites = instance.sites();
        let full = sites.full();
        let entries: Vec<(SiteSubset, WedgeTensor)> = full
            .subsets()
            .into_iter()
            .map(|n| {
                let mut w = WedgeTensor::zero(sites, rank, instance.h_rank());
                for mask in masks_of_weight(instance.h_rank(), rank) {
                    let g = GradedElement::random_homogeneous(sites, full, n.count(), rng);
                    w = w.add(&WedgeTensor::single(sites, instance.h_rank(), mask, g));
                }
                (n, w)
            })
            .collect();
        SystemCollection::from_entries(instance, rank, SystemKind::Raw, entries)
    }

    fn label(&self, q: usize) -> String {
        self.instance.sites().site(q).label.clone()
    }

    fn labels(&self, n: SiteSubset) -> Vec<String> {
        self.instance.sites().labels_of_subset(n)
    }

    /// Per-axiom, per-subset exact verification of the axioms of this
    /// collection's flavor. Panics on `Raw` (no axioms are defined for it).
    pub fn check_axioms(&self) -> Report {
        match self.kind {
            SystemKind::Ks => self.check_ks(),
            SystemKind::Tks => self.check_tks(),
            SystemKind::Pks => self.check_pks(),
            SystemKind::Dks => self.check_dks(),
            SystemKind::Raw => panic!("no axioms are defined for a RAW collection"),
        }
    }

    /// Shape invariant: each entry homogeneous of degree `ν(n)`, supported
    /// inside `n` (anywhere for the pre flavor).
    fn check_shape(&self, report: &mut Report) {
        for (n, w) in self.entries() {
            let deg_ok = w.is_homogeneous_of(n.count());
            let support_ok = match self.kind {
                SystemKind::Pks => true,
                _ => w.support().is_subset_of(n),
            };
            report.record(
                "shape",
                Some(self.labels(n)),
                None,
                deg_ok && support_ok,
                || {
                    format!(
                        "expected degree {} (support ok: {support_ok}): {w}",
                        n.count()
                    )
                },
            );
        }
    }

    fn check_ks(&self) -> Report {
        let mut report = Report::new();
        self.check_shape(&mut report);
        for (n, kappa) in self.entries() {
            self.axiom_v_outside("K1", n, kappa, &mut report);
            for q in n.iter() {
                let uq = kappa.contract(&self.instance.u_functional(q));
                report.record(
                    "K2",
                    Some(self.labels(n)),
                    Some(self.label(q)),
                    uq.is_zero(),
                    || format!("u_q(kappa_n) = {uq}"),
                );
                let lhs = kappa.contract(&self.instance.v_functional(q));
                let rhs = self
                    .entry(n.remove(q))
                    .contract(&self.instance.phi_functional(q));
                report.record(
                    "K3",
                    Some(self.labels(n)),
                    Some(self.label(q)),
                    lhs == rhs,
                    || format!("v_q(kappa_n) = {lhs} but phi_q(kappa_(n/q)) = {rhs}"),
                );
                let proj = kappa.project(n.remove(q));
                report.record(
                    "K4",
                    Some(self.labels(n)),
                    Some(self.label(q)),
                    proj.is_zero(),
                    || format!("pi_(n/q)(kappa_n) = {proj}"),
                );
            }
        }
        report
    }

    fn check_tks(&self) -> Report {
        let mut report = Report::new();
        self.check_shape(&mut report);
        for (n, theta) in self.entries() {
            self.axiom_v_outside("TK1", n, theta, &mut report);
            let tk2_sum = self.tk_determinant_sum(n);
            for q in n.iter() {
                let uq = tk2_sum.contract(&self.instance.u_functional(q));
                report.record(
                    "TK2",
                    Some(self.labels(n)),
                    Some(self.label(q)),
                    uq.is_zero(),
                    || format!("u_q(sum theta_d D_(n,n/d)) = {uq}"),
                );

                let lhs = self
                    .alternating_projections(theta, n)
                    .contract(&self.instance.v_functional(q));
                let nq = n.remove(q);
                let rhs = self
                    .alternating_projections(self.entry(nq), nq)
                    .contract(&self.instance.phi_functional(q));
                report.record(
                    "TK3",
                    Some(self.labels(n)),
                    Some(self.label(q)),
                    lhs == rhs,
                    || format!("lhs = {lhs} but rhs = {rhs}"),
                );

                let lhs4 = theta.project(nq);
                let rhs4 = self
                    .entry(nq)
                    .mul_graded(&self.instance.p_at(q).project(nq));
                report.record(
                    "TK4",
                    Some(self.labels(n)),
                    Some(self.label(q)),
                    lhs4 == rhs4,
                    || {
                        format!(
                            "pi_(n/q)(theta_n) = {lhs4} but theta_(n/q) * pi_(n/q)(P_q) = {rhs4}"
                        )
                    },
                );
            }
        }
        report
    }

    /// `Σ_{d ⊆ n} (-1)^{ν(n/d)} π_d(w)`, the alternating sum TK3 applies on
    /// both of its sides.
    fn alternating_projections(&self, w: &WedgeTensor, n: SiteSubset) -> WedgeTensor {
        let mut acc = WedgeTensor::zero(self.instance.sites(), self.rank, self.instance.h_rank());
        for d in n.subsets() {
            let term = w.project(d);
            acc = if n.minus(d).count().is_multiple_of(2) {
                acc.add(&term)
            } else {
                acc.sub(&term)
            };
        }
        acc
    }

    fn check_pks(&self) -> Report {
        let mut report = Report::new();
        self.check_shape(&mut report);
        let sites = self.instance.sites();
        let full = sites.full();
        for (n, pk) in self.entries() {
            self.axiom_v_outside("PK1", n, pk, &mut report);
            let fpk_n = self.f_pk_at(n);
            for q in n.iter() {
                let uq = fpk_n.contract(&self.instance.u_functional(q));
                report.record(
                    "PK2",
                    Some(self.labels(n)),
                    Some(self.label(q)),
                    uq.is_zero(),
                    || format!("u_q(alternating P-weighted sum) = {uq}"),
                );
                let lhs = pk.contract(&self.instance.v_functional(q));
                let rhs = self
                    .entry(n.remove(q))
                    .contract(&self.instance.phi_functional(q));
                report.record(
                    "PK3",
                    Some(self.labels(n)),
                    Some(self.label(q)),
                    lhs == rhs,
                    || format!("v_q = {lhs} but phi_q of the smaller level = {rhs}"),
                );
                let away = full.remove(q);
                let lhs4 = pk.project(away);
                let rhs4 = self
                    .entry(n.remove(q))
                    .project(away)
                    .mul_graded(self.instance.p_at(q));
                report.record(
                    "PK4",
                    Some(self.labels(n)),
                    Some(self.label(q)),
                    lhs4 == rhs4,
                    || format!("restriction = {lhs4} but P-multiple = {rhs4}"),
                );
            }
            // PK5: reconstruction from the projected lower levels
            let mut rhs5 = WedgeTensor::zero(sites, self.rank, self.instance.h_rank());
            for d in n.subsets() {
                let mut term = self.entry(d).project(n);
                for q in n.minus(d).iter() {
                    term = term.mul_graded(&self.instance.p_at(q).project(full.minus(n)));
                }
                rhs5 = rhs5.add(&term);
            }
            report.record("PK5", Some(self.labels(n)), None, *pk == rhs5, || {
                format!("entry = {pk} but reconstruction = {rhs5}")
            });
        }
        report
    }

    fn check_dks(&self) -> Report {
        let mut report = Report::new();
        self.check_shape(&mut report);
        for (n, dk) in self.entries() {
            self.axiom_v_outside("DK1", n, dk, &mut report);
            let dk2_sum = self.dk_determinant_sum(n);
            for q in n.iter() {
                let uq = dk2_sum.contract(&self.instance.u_functional(q));
                report.record(
                    "DK2",
                    Some(self.labels(n)),
                    Some(self.label(q)),
                    uq.is_zero(),
                    || format!("u_q(sum kappa'_d D_(n/d)) = {uq}"),
                );
                let lhs = dk.contract(&self.instance.v_functional(q));
                let rhs = self
                    .entry(n.remove(q))
                    .contract(&self.instance.phi_functional(q));
                report.record(
                    "DK3",
                    Some(self.labels(n)),
                    Some(self.label(q)),
                    lhs == rhs,
                    || format!("v_q = {lhs} but phi_q of the smaller level = {rhs}"),
                );
                let proj = dk.project(n.remove(q));
                report.record(
                    "DK4",
                    Some(self.labels(n)),
                    Some(self.label(q)),
                    proj.is_zero(),
                    || format!("pi_(n/q) = {proj}"),
                );
            }
        }
        report
    }

    /// The first axiom of every flavor: `v_q` kills the entry at `n` for
    /// every site outside `n`.
    fn axiom_v_outside(&self, name: &str, n: SiteSubset, w: &WedgeTensor, report: &mut Report) {
        let full = self.instance.sites().full();
        for q in full.minus(n).iter() {
            let vq = w.contract(&self.instance.v_functional(q));
            report.record(
                name,
                Some(self.labels(n)),
                Some(self.label(q)),
                vq.is_zero(),
                || format!("v_q(entry at n) = {vq}"),
            );
        }
    }

    /// `Σ_{d ⊆ n} a_d · D_{n, n/d}`, shared by TK2, `f_tk`, and the
    /// diagram checks.
    fn tk_determinant_sum(&self, n: SiteSubset) -> WedgeTensor {
        let sites = self.instance.sites();
        let mut acc = WedgeTensor::zero(sites, self.rank, self.instance.h_rank());
        for d in n.subsets() {
            let det = det_d(sites, n, n.minus(d), self.instance.p_family());
            acc = acc.add(&self.entry(d).mul_graded(&det));
        }
        acc
    }

    /// `Σ_{d ⊆ n} a_d · D_{n/d}`, shared by DK2 and `f_dk`.
    fn dk_determinant_sum(&self, n: SiteSubset) -> WedgeTensor {
        let sites = self.instance.sites();
        let mut acc = WedgeTensor::zero(sites, self.rank, self.instance.h_rank());
        for d in n.subsets() {
            let det = det_d_full(sites, n.minus(d), self.instance.p_family());
            acc = acc.add(&self.entry(d).mul_graded(&det));
        }
        acc
    }

    /// The value of `F_PK` at one subset:
    /// `Σ_{d⊆n} (-1)^{ν(n/d)} π_n(a_d) ∏_{q∈n/d} π_{n/q}(P_q)`.
    fn f_pk_at(&self, n: SiteSubset) -> WedgeTensor {
        let mut acc = WedgeTensor::zero(self.instance.sites(), self.rank, self.instance.h_rank());
        for d in n.subsets() {
            let mut term = self.entry(d).project(n);
            for q in n.minus(d).iter() {
                term = term.mul_graded(&self.instance.p_at(q).project(n.remove(q)));
            }
            acc = if n.minus(d).count().is_multiple_of(2) {
                acc.add(&term)
            } else {
                acc.sub(&term)
            };
        }
        acc
    }

    fn map_entries(
        &self,
        kind: SystemKind,
        f: impl Fn(SiteSubset) -> WedgeTensor,
    ) -> SystemCollection {
        let entries: Vec<(SiteSubset, WedgeTensor)> = self
            .instance
            .sites()
            .full()
            .subsets()
            .into_iter()
            .map(|n| (n, f(n)))
            .collect();
        SystemCollection::from_entries(&self.instance, self.rank, kind, entries)
    }

    fn forward_kind(&self, from: SystemKind, to: SystemKind) -> SystemKind {
        if self.kind == from {
            to
        } else {
            SystemKind::Raw
        }
    }

    /// `F_PT(a)_n = π_n(a_n)`.
    pub fn f_pt(&self) -> SystemCollection {
        let kind = self.forward_kind(SystemKind::Pks, SystemKind::Tks);
        self.map_entries(kind, |n| self.entry(n).project(n))
    }

    /// `F_PK(a)_n = Σ_{d⊆n} (-1)^{ν(n/d)} π_n(a_d) ∏_{q∈n/d} π_{n/q}(P_q)`.
    pub fn f_pk(&self) -> SystemCollection {
        let kind = self.forward_kind(SystemKind::Pks, SystemKind::Ks);
        self.map_entries(kind, |n| self.f_pk_at(n))
    }

    /// `F_TK(a)_n = Σ_{d⊆n} a_d · D_{n,n/d}`.
    pub fn f_tk(&self) -> SystemCollection {
        let kind = self.forward_kind(SystemKind::Tks, SystemKind::Ks);
        self.map_entries(kind, |n| self.tk_determinant_sum(n))
    }

    /// `F_TD(a)_n = Σ_{d⊆n} (-1)^{ν(n/d)} a_d ∏_{q∈n/d} π_d(P_q)`.
    pub fn f_td(&self) -> SystemCollection {
        let kind = self.forward_kind(SystemKind::Tks, SystemKind::Dks);
        self.map_entries(kind, |n| {
            let mut acc =
                WedgeTensor::zero(self.instance.sites(), self.rank, self.instance.h_rank());
            for d in n.subsets() {
                let mut term = self.entry(d).clone();
                for q in n.minus(d).iter() {
                    term = term.mul_graded(&self.instance.p_at(q).project(d));
                }
                acc = if n.minus(d).count() % 2 == 0 {
                    acc.add(&term)
                } else {
                    acc.sub(&term)
                };
            }
            acc
        })
    }

    /// `F_DK(a)_n = Σ_{d⊆n} a_d · D_{n/d}`.
    pub fn f_dk(&self) -> SystemCollection {
        let kind = self.forward_kind(SystemKind::Dks, SystemKind::Ks);
        self.map_entries(kind, |n| self.dk_determinant_sum(n))
    }

    /// The recursive inverse of `F_PK`, level by level on `ν(n)`:
    /// `κ̃_n = κ_n + Σ_{d⊊n} π_n(κ̃_d)·(∏_{q∈n/d} P_q|_{Σ∖n} - (-1)^{ν(n/d)} ∏_{q∈n/d} π_{n/q}(P_q))`.
    pub fn g_pk(&self) -> SystemCollection {
        let kind = self.forward_kind(SystemKind::Ks, SystemKind::Pks);
        let full = self.instance.sites().full();
        self.recursive_inverse(kind, |built, n| {
            let mut acc = self.entry(n).clone();
            for d in n.subsets() {
                if d == n {
                    continue;
                }
                let prev = &built[&d.bits()];
                let mut outer = prev.project(n);
                let mut inner = prev.project(n);
                for q in n.minus(d).iter() {
                    outer = outer.mul_graded(&self.instance.p_at(q).project(full.minus(n)));
                    inner = inner.mul_graded(&self.instance.p_at(q).project(n.remove(q)));
                }
                let bracket = if n.minus(d).count() % 2 == 0 {
                    outer.sub(&inner)
                } else {
                    outer.add(&inner)
                };
                acc = acc.add(&bracket);
            }
            acc
        })
    }

    /// The recursive inverse of `F_TD`, mirroring the theta recursion:
    /// `θ_n = κ'_n - Σ_{d⊊n} (-1)^{ν(n/d)} θ_d ∏_{q∈n/d} π_d(P_q)`.
    pub fn g_td(&self) -> SystemCollection {
        let kind = self.forward_kind(SystemKind::Dks, SystemKind::Tks);
        self.recursive_inverse(kind, |built, n| {
            let mut acc = self.entry(n).clone();
            for d in n.subsets() {
                if d == n {
                    continue;
                }
                let mut term = built[&d.bits()].clone();
                for q in n.minus(d).iter() {
                    term = term.mul_graded(&self.instance.p_at(q).project(d));
                }
                acc = if n.minus(d).count() % 2 == 0 {
                    acc.sub(&term)
                } else {
                    acc.add(&term)
                };
            }
            acc
        })
    }

    /// The recursive inverse of `F_TK`, forced by `D_{n,∅} = 1`:
    /// `θ_n = a_n - Σ_{d⊊n} θ_d · D_{n,n/d}`.
    pub fn g_tk(&self) -> SystemCollection {
        let kind = self.forward_kind(SystemKind::Ks, SystemKind::Tks);
        let sites = Arc::clone(self.instance.sites());
        self.recursive_inverse(kind, move |built, n| {
            let mut acc = self.entry(n).clone();
            for d in n.subsets() {
                if d == n {
                    continue;
                }
                let det = det_d(&sites, n, n.minus(d), self.instance.p_family());
                acc = acc.sub(&built[&d.bits()].mul_graded(&det));
            }
            acc
        })
    }

    /// Builds entries bottom-up in `ν(n)` so each level can use the ones
    /// already constructed.
    fn recursive_inverse(
        &self,
        kind: SystemKind,
        step: impl Fn(&BTreeMap<u32, WedgeTensor>, SiteSubset) -> WedgeTensor,
    ) -> SystemCollection {
        let mut order: Vec<SiteSubset> = self.instance.sites().full().subsets();
        order.sort_by_key(|s| s.count());
        let mut built: BTreeMap<u32, WedgeTensor> = BTreeMap::new();
        for n in order {
            let w = step(&built, n);
            built.insert(n.bits(), w);
        }
        SystemCollection::from_entries(
            &self.instance,
            self.rank,
            kind,
            built
                .into_iter()
                .map(|(b, w)| (SiteSubset::from_bits(b), w)),
        )
    }
}

/// All ordered partitions of the bitmask into nonempty disjoint blocks; the
/// empty set has exactly one (the empty tuple). Counts are the ordered Bell
/// numbers 1, 1, 3, 13, 75, ...
pub fn ordered_partitions(set: u32) -> Vec<Vec<u32>> {
    if set == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    // choose the first block as any nonempty submask, then recurse
    let mut first = set;
    loop {
        for mut rest in ordered_partitions(set & !first) {
            let mut part = Vec::with_capacity(rest.len() + 1);
            part.push(first);
            part.append(&mut rest);
            out.push(part);
        }
        first = (first - 1) & set;
        if first == 0 {
            break;
        }
    }
    out
}

/// Both sides of the ordered-partition determinant identity
/// `(-1)^ν |A| = Σ_{(C_1..C_k)} (-1)^{|C_k|} ∏_{i∈C_k}(Σ_j a_ij) ∏_{i∈C_{k-1}}(Σ_{j∈C_k} a_ij) ⋯ ∏_{i∈C_1}(Σ_{j∈C_2} a_ij)`,
/// evaluated exactly over `Z/m`.
pub fn partition_det_identity(a: &MatrixZm) -> (u64, u64, bool) {
    let nu = a.rows();
    assert_eq!(nu, a.cols(), "square matrix required");
    assert!(nu >= 1, "the identity is stated for ν ≥ 1");
    let m = a.modulus();
    let full: u32 = (1 << nu) - 1;

    let det = a.det();
    let lhs = if nu.is_multiple_of(2) {
        det
    } else {
        (m - det) % m
    };

    let mut rhs: u128 = 0;
    for part in ordered_partitions(full) {
        let k = part.len();
        let mut term: u128 = 1;
        for (b, &block) in part.iter().enumerate() {
            // the block C_b draws its column sums from the next block;
            // the last block sums over all columns
            let cols = if b + 1 == k { full } else { part[b + 1] };
            for i in crate::exterior::bits(block) {
                let mut s: u128 = 0;
                for j in crate::exterior::bits(cols) {
                    s += a.get(i, j) as u128;
                }
                term = term * (s % m as u128) % m as u128;
            }
        }
        let sign_neg = part.last().is_some_and(|c| c.count_ones() % 2 == 1);
        if sign_neg {
            rhs = (rhs + m as u128 - term % m as u128) % m as u128;
        } else {
            rhs = (rhs + term) % m as u128;
        }
    }
    let rhs = rhs as u64;
    (lhs, rhs, lhs == rhs)
}
