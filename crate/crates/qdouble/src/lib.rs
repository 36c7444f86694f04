//! Hybrid lattice surgery between quantum double codes `D(G)` of finite,
//! possibly non-Abelian groups.
//!
//! The crate has three layers:
//!
//! - [`group`] and [`irreps`]: finite groups by multiplication table, plus
//!   closed-form unitary irreps for the supported families;
//! - [`logical`] and [`protocols`]: exact states and operators on tensor
//!   products of group algebras `C[G1] (x) ... (x) C[Gk]`, and the
//!   magic-state / gate-teleportation protocols that run on them;
//! - [`lattice`] and [`syndrome`]: exact state-vector simulation of small
//!   `D(G)` code patches, rough merge and split between patches of *different*
//!   groups, ribbon operators, and the `D(D4)` non-commuting stabilizer code.
//!
//! [`center`] provides the Drinfeld-center side: anyons `([g], R)` with
//! quantum dimensions and topological spins, the modular S-matrix, and
//! condensable/Lagrangian algebra checks for interface data.
//!
//! Every runnable capability has an example under `examples/`; the `qdouble`
//! binary exposes the same machinery as batch subcommands (`run-protocol`,
//! `verify`, `cross-check`, `syndrome-table`, `anyons`).

pub mod center;
pub mod cli;
pub mod error;
pub mod group;
pub mod irreps;
pub mod lattice;
pub mod logical;
pub mod protocols;
pub mod report;
pub mod syndrome;

pub use error::{Error, Result};

/// Numerical tolerances used across the crate.
pub mod tol {
    /// Exact constructions up to roundoff of roots of unity.
    pub const EXACT: f64 = 1e-10;
    /// Protocol-level state and unitary comparisons.
    pub const PROTOCOL: f64 = 1e-9;
    /// S-matrix unitarity and commutator norms.
    pub const STRICT: f64 = 1e-12;
    /// Probability cutoff below which a branch counts as impossible.
    pub const PROB_FLOOR: f64 = 1e-12;
}
