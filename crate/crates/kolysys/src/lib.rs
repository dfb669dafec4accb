//! Exact verification engine for the algebra of Kolyvagin systems.
//!
//! Everything here computes over `Z/m` with no floating point and no
//! approximation: residue arithmetic ([`modring`]), canonical linear algebra
//! ([`linalg`]), the truncated graded augmentation algebra ([`graded`]),
//! exterior powers with contraction by functionals ([`exterior`]), the
//! seven-tuple framework ([`instance`]), the four system flavors with their
//! transforms ([`ksystems`]), unit systems with regulator maps ([`unitsys`]),
//! and a concrete cyclotomic instantiation ([`cyclo`]).
//!
//! The [`verify`] module packages the identity suites that the `kolysys`
//! CLI exposes; [`json`] holds the interchange formats.

pub mod cyclo;
pub mod exterior;
pub mod graded;
pub mod instance;
pub mod json;
pub mod ksystems;
pub mod linalg;
pub mod modring;
pub mod report;
pub mod unitsys;
pub mod verify;

mod book;

pub use exterior::{Functional, WedgeTensor};
pub use graded::{GradedElement, Site, SiteSet, SiteSubset};
pub use instance::SevenTuple;
pub use ksystems::{SystemCollection, SystemKind};
pub use modring::{Modulus, Residue};
pub use report::{Check, Report};
