//! Unit systems along a chain of modified Selmer submodules, and the three
//! regulator maps into the system flavors.
//!
//! A chain fixes an ordering `q_1, ..., q_N` of the sites and a tower of
//! initial segments ending at `Σ`. A unit system is a top exterior element
//! `ε_Σ ∈ Λ^{N+r} H` lying in the image of `Λ^{N+r} S^Σ`, together with its
//! contractions `(-v)`-down the chain, each required to lie in the image of
//! the corresponding `Λ^{ν+r} S^{n_i}`. Exterior powers of the submodules
//! are always represented by their images inside `Λ H`, so the whole
//! construction is a linear solve over `Z/m`.
//!
//! Regulators evaluate wedges of `φ`-functionals (and `-v` at the unused
//! chain positions) on a unit system: the `P` flavor uses the full `φ_q`,
//! the `T` flavor its projection to `G(n)`, and the `K` flavor the single
//! site projection `φ_q^{q}`.

use std::sync::Arc;

use thiserror::Error;

use crate::exterior::{wedge_in_span, Functional, WedgeTensor};
use crate::graded::SiteSubset;
use crate::instance::SevenTuple;
use crate::ksystems::{SystemCollection, SystemKind};
use crate::linalg::{self, MatrixZm};
use crate::report::Report;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("ordering must be a permutation of the sites")]
    BadOrdering,
    #[error("levels must be strictly increasing initial segments ending at the full set")]
    BadLevels,
}

/// An ordering of all sites with a tower of initial segments
/// `n_1 ⊂ n_2 ⊂ ⋯ ⊂ n_K = Σ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    ordering: Vec<usize>,
    level_sizes: Vec<usize>,
}

impl Chain {
    pub fn new(ordering: Vec<usize>, level_sizes: Vec<usize>) -> Result<Self, ChainError> {
        let n = ordering.len();
        let mut seen = vec![false; n];
        for &q in &ordering {
            if q >= n || seen[q] {
                return Err(ChainError::BadOrdering);
            }
            seen[q] = true;
        }
        if level_sizes.is_empty()
            || level_sizes.last() != Some(&n)
            || level_sizes.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(ChainError::BadLevels);
        }
        Ok(Chain {
            ordering,
            level_sizes,
        })
    }

    /// The identity ordering with every prefix as a level, the empty set
    /// included.
    pub fn full_prefix(n_sites: usize) -> Self {
        Chain {
            ordering: (0..n_sites).collect(),
            level_sizes: (0..=n_sites).collect(),
        }
    }

    pub fn ordering(&self) -> &[usize] {
        &self.ordering
    }

    pub fn level_sizes(&self) -> &[usize] {
        &self.level_sizes
    }

    pub fn level_count(&self) -> usize {
        self.level_sizes.len()
    }

    /// The subset at level `i`: the first `level_sizes[i]` sites of the
    /// ordering.
    pub fn level_mask(&self, i: usize) -> SiteSubset {
        SiteSubset::from_indices(&self.ordering[..self.level_sizes[i]])
    }

    /// The smallest level whose subset contains `n`; the top always does.
    pub fn level_containing(&self, n: SiteSubset) -> usize {
        (0..self.level_count())
            .find(|&i| n.is_subset_of(self.level_mask(i)))
            .expect("the top level is the full site set")
    }
}

/// Which functional is evaluated at the sites inside `n`: the full `φ_q`
/// (P), its projection `φ_q^n` (T), or the single-site `φ_q^{q}` (K).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegulatorFlavor {
    P,
    T,
    K,
}

impl RegulatorFlavor {
    pub fn as_str(self) -> &'static str {
        match self {
            RegulatorFlavor::P => "P",
            RegulatorFlavor::T => "T",
            RegulatorFlavor::K => "K",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "P" | "p" => Some(RegulatorFlavor::P),
            "T" | "t" => Some(RegulatorFlavor::T),
            "K" | "k" => Some(RegulatorFlavor::K),
            _ => None,
        }
    }
}

/// A contraction-compatible family of exterior elements down a chain; the
/// top element determines every level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitSystem {
    instance: Arc<SevenTuple>,
    chain: Chain,
    rank: usize,
    /// `eps[i]` at chain level `i`, in `Λ^{ν(n_i)+r} H`.
    eps: Vec<WedgeTensor>,
}

impl UnitSystem {
    /// Builds the whole tower from a top element by contracting `-v`
    /// functionals down the chain.
    pub fn from_top(
        instance: &Arc<SevenTuple>,
        chain: Chain,
        rank: usize,
        top: WedgeTensor,
    ) -> Self {
        let n_sites = instance.sites().len();
        assert_eq!(
            chain.ordering.len(),
            n_sites,
            "chain over the wrong site set"
        );
        assert_eq!(
            top.rank(),
            n_sites + rank,
            "top element must live in degree N + r"
        );
        let eps = (0..chain.level_count())
            .map(|i| contract_to_level(instance, &chain, &top, i))
            .collect();
        UnitSystem {
            instance: Arc::clone(instance),
            chain,
            rank,
            eps,
        }
    }

    /// Wraps an externally supplied tower without recomputing it, so that
    /// [`UnitSystem::check_compatibility`] can audit the claimed levels.
    pub fn from_levels(
        instance: &Arc<SevenTuple>,
        chain: Chain,
        rank: usize,
        eps: Vec<WedgeTensor>,
    ) -> Self {
        assert_eq!(eps.len(), chain.level_count(), "one element per level");
        UnitSystem {
            instance: Arc::clone(instance),
            chain,
            rank,
            eps,
        }
    }

    pub fn instance(&self) -> &Arc<SevenTuple> {
        &self.instance
    }

    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn top(&self) -> &WedgeTensor {
        self.eps.last().expect("chains are nonempty")
    }

    pub fn level(&self, i: usize) -> &WedgeTensor {
        &self.eps[i]
    }

    pub fn is_zero(&self) -> bool {
        self.top().is_zero()
    }

    /// The regulator at `n`, evaluated at the smallest chain level
    /// containing `n`.
    pub fn regulator(&self, n: SiteSubset, flavor: RegulatorFlavor) -> WedgeTensor {
        self.regulator_at_level(n, self.chain.level_containing(n), flavor)
    }

    /// The regulator evaluated at an explicit chain level; the result does
    /// not depend on the level, which the verification suites assert.
    pub fn regulator_at_level(
        &self,
        n: SiteSubset,
        level: usize,
        flavor: RegulatorFlavor,
    ) -> WedgeTensor {
        let mask = self.chain.level_mask(level);
        assert!(n.is_subset_of(mask), "level does not contain n");
        let fs: Vec<Functional> = self.chain.ordering[..self.chain.level_sizes[level]]
            .iter()
            .map(|&q| {
                if n.contains(q) {
                    match flavor {
                        RegulatorFlavor::P => self.instance.phi_functional(q),
                        RegulatorFlavor::T => self.instance.phi_n_functional(q, n),
                        RegulatorFlavor::K => {
                            self.instance.phi_n_functional(q, SiteSubset::singleton(q))
                        }
                    }
                } else {
                    self.instance.v_functional(q).negated()
                }
            })
            .collect();
        self.eps[level].contract_seq(&fs)
    }

    /// The full collection `{R(ε)_n}_n`, tagged with the flavor it maps
    /// into.
    pub fn regulator_collection(&self, flavor: RegulatorFlavor) -> SystemCollection {
        let kind = match flavor {
            RegulatorFlavor::P => SystemKind::Pks,
            RegulatorFlavor::T => SystemKind::Tks,
            RegulatorFlavor::K => SystemKind::Ks,
        };
        let entries: Vec<(SiteSubset, WedgeTensor)> = self
            .instance
            .sites()
            .full()
            .subsets()
            .into_iter()
            .map(|n| (n, self.regulator(n, flavor)))
            .collect();
        SystemCollection::from_entries(&self.instance, self.rank, kind, entries)
    }

    /// Verifies the two defining invariants exactly: every level is the
    /// `(-v)`-contraction of the top, and every level lies in the image of
    /// the exterior power of its Selmer submodule. The report lists levels
    /// bottom-up, so the first failure is the lowest broken level.
    pub fn check_compatibility(&self) -> Report {
        let mut report = Report::new();
        for i in 0..self.chain.level_count() {
            let mask = self.chain.level_mask(i);
            let labels = self.instance.sites().labels_of_subset(mask);
            let expect = contract_to_level(&self.instance, &self.chain, self.top(), i);
            report.record(
                "transition",
                Some(labels.clone()),
                None,
                self.eps[i] == expect,
                || format!("stored = {} but contraction gives {}", self.eps[i], expect),
            );
            let gens = selmer_wedge_generators(
                &self.instance,
                mask,
                self.chain.level_sizes[i] + self.rank,
            );
            let member = wedge_in_span(&gens, &self.eps[i]).is_some();
            report.record("membership", Some(labels), None, member, || {
                format!(
                    "level element {} is outside the image of the Selmer wedge",
                    self.eps[i]
                )
            });
        }
        report
    }
}

/// Contraction of the top element down to chain level `i`: applies
/// `-v_{q_j}` for every ordering position `j` beyond the level size,
/// highest position first.
fn contract_to_level(
    instance: &Arc<SevenTuple>,
    chain: &Chain,
    top: &WedgeTensor,
    i: usize,
) -> WedgeTensor {
    let fs: Vec<Functional> = chain.ordering[chain.level_sizes[i]..]
        .iter()
        .map(|&q| instance.v_functional(q).negated())
        .collect();
    top.contract_seq(&fs)
}

/// A spanning set of the image of `Λ^k S^n` inside `Λ^k H`: all `k`-fold
/// wedges of the Selmer generators. Empty when `k` exceeds the generator
/// count (dependent vectors wedge to zero), a single scalar `1` when
/// `k = 0`.
pub fn selmer_wedge_generators(
    instance: &Arc<SevenTuple>,
    n: SiteSubset,
    k: usize,
) -> Vec<WedgeTensor> {
    let gens = instance.selmer_generators(n);
    let sites = instance.sites();
    if k == 0 {
        return vec![WedgeTensor::wedge(sites, &[])];
    }
    if k > gens.len() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for choice in combinations(gens.len(), k) {
        let vectors: Vec<Vec<u64>> = choice.iter().map(|&i| gens[i].clone()).collect();
        let w = WedgeTensor::wedge(sites, &vectors);
        if !w.is_zero() {
            out.push(w);
        }
    }
    out
}

/// All k-subsets of `{0..n}` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut choice: Vec<usize> = (0..k).collect();
    loop {
        out.push(choice.clone());
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if choice[pos] < n - (k - pos) {
                choice[pos] += 1;
                for later in pos + 1..k {
                    choice[later] = choice[later - 1] + 1;
                }
                break;
            }
        }
    }
}

/// A generating set of the module of all unit systems over the chain:
/// parametrizes the top element inside the image of `Λ^{N+r} S^Σ` and
/// solves the membership constraints at every lower level, all as one
/// kernel computation over `Z/m`.
pub fn build_unit_systems(
    instance: &Arc<SevenTuple>,
    chain: &Chain,
    rank: usize,
) -> Vec<UnitSystem> {
    let sites = instance.sites();
    let n_sites = sites.len();
    let m = sites.modulus();
    let h = instance.h_rank();
    let top_rank = n_sites + rank;

    let top_gens = selmer_wedge_generators(instance, sites.full(), top_rank);
    if top_gens.is_empty() {
        // the top exterior power is zero, for instance when N + r > hRank
        let zero = WedgeTensor::zero(sites, top_rank, h);
        return vec![UnitSystem::from_top(instance, chain.clone(), rank, zero)];
    }
    let top_coords: Vec<Vec<u64>> = top_gens
        .iter()
        .map(|w| w.scalar_coords().expect("selmer wedges are scalar"))
        .collect();

    // unknowns: coefficients on the top generators, then per-level
    // auxiliary coefficients expressing membership in the level span
    let k_top = top_gens.len();
    let mut level_gen_coords: Vec<Vec<Vec<u64>>> = Vec::new();
    let mut level_contracted: Vec<Vec<Vec<u64>>> = Vec::new();
    for i in 0..chain.level_count() - 1 {
        let mask = chain.level_mask(i);
        let k = chain.level_sizes()[i] + rank;
        let gens = selmer_wedge_generators(instance, mask, k);
        level_gen_coords.push(
            gens.iter()
                .map(|w| w.scalar_coords().expect("selmer wedges are scalar"))
                .collect(),
        );
        level_contracted.push(
            top_gens
                .iter()
                .map(|w| {
                    contract_to_level(instance, chain, w, i)
                        .scalar_coords()
                        .expect("contractions of scalar wedges are scalar")
                })
                .collect(),
        );
    }

    let total_aux: usize = level_gen_coords.iter().map(Vec::len).sum();
    let total_rows: usize = level_contracted
        .iter()
        .map(|c| c.first().map_or(0, Vec::len))
        .sum();
    let mut mat = MatrixZm::new(m, total_rows.max(1), k_top + total_aux);
    let mut row0 = 0;
    let mut aux0 = k_top;
    for (contracted, gens) in level_contracted.iter().zip(&level_gen_coords) {
        let coords_len = contracted.first().map_or(0, Vec::len);
        for (j, c) in contracted.iter().enumerate() {
            for (r, &x) in c.iter().enumerate() {
                mat.set(row0 + r, j, x);
            }
        }
        for (t, g) in gens.iter().enumerate() {
            for (r, &x) in g.iter().enumerate() {
                // minus: the contraction must equal an auxiliary combination
                mat.set(row0 + r, aux0 + t, (m - x % m) % m);
            }
        }
        row0 += coords_len;
        aux0 += gens.len();
    }

    let kernel = linalg::kernel_generators(&mat);
    let tops: Vec<Vec<u64>> = kernel
        .iter()
        .map(|sol| linalg::combine(m, &top_coords, &sol[..k_top]))
        .collect();
    // the kernel usually over-generates; reduce to a same-span list
    let mut out = Vec::new();
    for top_coord in linalg::reduce_span(m, &tops) {
        let top = WedgeTensor::from_scalar_coords(sites, top_rank, h, &top_coord);
        if top.is_zero() {
            continue;
        }
        out.push(UnitSystem::from_top(instance, chain.clone(), rank, top));
    }
    if out.is_empty() {
        let zero = WedgeTensor::zero(sites, top_rank, h);
        out.push(UnitSystem::from_top(instance, chain.clone(), rank, zero));
    }
    out
}

/// A spanning set of the regulator module at `n`: the contractions
/// `(φ_{q_1}^n ∧ ⋯ ∧ φ_{q_ν}^n)(w)` over the Selmer wedge generators `w`
/// of `Λ^{ν+r} S^n`.
pub fn regulator_module(
    instance: &Arc<SevenTuple>,
    n: SiteSubset,
    rank: usize,
) -> Vec<WedgeTensor> {
    let nu = n.count();
    let fs: Vec<Functional> = n.iter().map(|q| instance.phi_n_functional(q, n)).collect();
    selmer_wedge_generators(instance, n, nu + rank)
        .into_iter()
        .map(|w| w.contract_seq(&fs))
        .collect()
}
