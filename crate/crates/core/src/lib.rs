//! Exact computations with the Hecke algebra of an almost normal subgroup
//! pair `Γ ⊂ G`: coset canonicalization, double-coset decomposition, Hecke
//! products and module actions, and operator-level verification of the
//! coset-algebra relations on `ℓ²(G)` for finite pairs.

pub mod coset;
pub mod error;
pub mod group;
pub mod hecke;
pub mod modular;
pub mod phi;
pub mod rep;
pub mod report;
pub mod runner;
pub mod scalar;

pub use error::{Error, Result};
pub use group::{GroupElement, GroupPair};
