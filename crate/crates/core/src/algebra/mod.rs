//! Exact arithmetic: F_p linear algebra, quadratic forms and cyclotomic numbers.

pub mod cyclo;
pub mod fp;
pub mod quadratic;

pub use cyclo::{Conductor, CycloNumber};
pub use fp::{FpMatrix, FpVector};
pub use quadratic::QuadraticForm;
