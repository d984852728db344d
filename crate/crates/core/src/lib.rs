//! Exact computation in power monoids of numerical monoids.
//!
//! For a numerical monoid S, the power monoid P_fin(S) is the set of all
//! finite nonempty subsets of S under set addition; the restricted power
//! monoid P_fin,0(S) keeps only the sets containing 0. This crate provides:
//!
//! * bit-vector set arithmetic (sumsets, dilations, reversion, distances),
//! * numerical-monoid data (atoms, Frobenius numbers, genus, maximal
//!   submonoids),
//! * the structure theory of iterated sumsets nA (threshold n*, closed
//!   forms, constructive divisor witnesses, cancellation refuters),
//! * divisibility, factorization into irreducible sets, sets of lengths,
//!   catenary degrees, ω-invariant lower bounds, and constructive
//!   non-primality witnesses,
//! * the classification of divisor-closed submonoids by triples (d, S, T),
//!   maximal-submonoid trees and their fingerprints, and
//! * exact and Monte Carlo atom-density counts among subsets of [0, N].
//!
//! All searches are exact and verified: constructions re-check their own
//! output and report failure loudly rather than returning an unverified
//! witness. Enumerations are budgeted; exceeding the node budget is an
//! explicit error, never a silent truncation.

pub mod budget;
pub mod density;
pub mod error;
pub mod factor;
pub mod monoid;
pub mod set;
pub mod spectrum;
pub mod structure;

pub use budget::{Budget, DEFAULT_BUDGET};
pub use error::{Error, Result};
pub use factor::{Ambient, AtomCheck, Factorization, LengthSet};
pub use monoid::Submonoid;
pub use set::{FiniteSet, Normalized};
pub use spectrum::DcsDescriptor;
