//! Qutrit Heisenberg–Weyl and Clifford machinery.

pub mod gates;
pub mod group;
pub mod pauli;
pub mod symplectic;

pub use gates::{gate_matrix, CMatrix, Gate, GateWord};
pub use group::{clifford_group_1q, orbit_closure, projective_key, Orbit};
pub use pauli::PauliLabel;
pub use symplectic::{
    enumerate_symplectic, synthesize, CliffordUnitary, SymplecticElement, SynthesisTable,
};

use crate::error::{Error, Result};

/// Full-register matrix of a named gate (`X`, `Z`, `S`, `H`, `SUM`) on
/// zero-based wires.
pub fn gate(name: &str, wires: &[usize], n: usize) -> Result<CliffordUnitary> {
    let one = |w: &[usize]| -> Result<usize> {
        match w {
            [a] if *a < n => Ok(*a),
            _ => Err(Error::InvalidInput(format!(
                "{name} needs one wire below {n}"
            ))),
        }
    };
    let g = match name.to_ascii_uppercase().as_str() {
        "X" => Gate::X(one(wires)?),
        "Z" => Gate::Z(one(wires)?),
        "S" => Gate::S(one(wires)?),
        "H" => Gate::H(one(wires)?),
        "SUM" => match wires {
            [c, t] if c != t && *c < n && *t < n => Gate::Sum(*c, *t),
            _ => return Err(Error::InvalidInput("SUM needs two distinct wires".into())),
        },
        _ => return Err(Error::InvalidInput(format!("unknown gate {name:?}"))),
    };
    CliffordUnitary::from_word(GateWord(vec![g]), n)
}
