//! Stabilizer-rank decompositions of qubit and qutrit magic states.
//!
//! The crate covers exact cyclotomic and finite-field arithmetic, canonical
//! stabilizer states and their catalogs, decomposition verification and
//! search, exhaustive rank certificates, the qutrit Clifford group, magic
//! state injection sweeps and the asymptotic lower-bound helpers.

pub mod algebra;
pub mod anneal;
pub mod asymptotics;
pub mod certify;
pub mod cli;
pub mod clifford;
pub mod decomposition;
pub mod error;
pub mod gadget;
pub mod linalg;
pub mod stabilizer;

pub use algebra::{Conductor, CycloNumber, FpMatrix, FpVector, QuadraticForm};

pub use decomposition::{Decomposition, Term};
pub use error::{Error, Result};
pub use stabilizer::{CanonicalStabilizer, MagicId, MagicTarget, StabilizerCatalog};

/// Default tolerance for numeric fixture verification.
pub const VERIFY_TOL: f64 = 1e-13;
/// Residual at or below which a tuple counts as a decomposition witness.
pub const WITNESS_TOL: f64 = 1e-10;
/// Tolerance for proportionality to a unitary.
pub const UNITARY_TOL: f64 = 1e-8;
/// Tolerance for Clifford equivalence of phases and gates.
pub const CLIFFORD_TOL: f64 = 1e-5;
