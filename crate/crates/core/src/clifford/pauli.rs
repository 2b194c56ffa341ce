use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gates::{gate_matrix, CMatrix, Gate};
use crate::algebra::FpVector;
use crate::error::{Error, Result};

/// `ω^phase · ⊗_i X^{x_i} Z^{z_i}` on `n` qutrits.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliLabel {
    pub p: u8,
    pub n: usize,
    pub x: FpVector,
    pub z: FpVector,
    pub phase: u8,
}

impl PauliLabel {
    pub fn new(x: FpVector, z: FpVector, phase: u8) -> Result<Self> {
        if x.len() != z.len() || x.p != 3 || z.p != 3 {
            return Err(Error::DimensionMismatch(
                "Pauli labels need equal-length qutrit exponent vectors".into(),
            ));
        }
        Ok(Self {
            p: 3,
            n: x.len(),
            x,
            z,
            phase: phase % 3,
        })
    }

    /// The Weyl operator with symplectic vector `v = (x | z)` and phase 0.
    pub fn from_symplectic(v: &[u8]) -> Self {
        let n = v.len() / 2;
        Self {
            p: 3,
            n,
            x: FpVector {
                p: 3,
                entries: v[..n].to_vec(),
            },
            z: FpVector {
                p: 3,
                entries: v[n..].to_vec(),
            },
            phase: 0,
        }
    }

    pub fn symplectic(&self) -> Vec<u8> {
        let mut v = self.x.entries.clone();
        v.extend_from_slice(&self.z.entries);
        v
    }

    /// Group law, using `Z^b X^c = ω^{bc} X^c Z^b`.
    pub fn mul(&self, other: &Self) -> Self {
        let extra: u32 = self
            .z
            .entries
            .iter()
            .zip(&other.x.entries)
            .map(|(&b, &c)| b as u32 * c as u32)
            .sum();
        Self {
            p: 3,
            n: self.n,
            x: self.x.add(&other.x),
            z: self.z.add(&other.z),
            phase: ((self.phase as u32 + other.phase as u32 + extra) % 3) as u8,
        }
    }

    pub fn matrix(&self) -> CMatrix {
        let d = 3usize.pow(self.n as u32);
        let mut m = CMatrix::identity(d, d);
        for w in 0..self.n {
            for _ in 0..self.x.entries[w] {
                m = gate_matrix(Gate::X(w), self.n) * m;
            }
        }
        // X^x Z^z: apply Z first, then X
        let mut zpart = CMatrix::identity(d, d);
        for w in 0..self.n {
            for _ in 0..self.z.entries[w] {
                zpart = gate_matrix(Gate::Z(w), self.n) * zpart;
            }
        }
        m * zpart * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * self.phase as f64 / 3.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_labels(n: usize) -> Vec<PauliLabel> {
        (0..3usize.pow(2 * n as u32) * 3)
            .map(|mut i| {
                let phase = (i % 3) as u8;
                i /= 3;
                let v: Vec<u8> = (0..2 * n)
                    .map(|_| {
                        let d = (i % 3) as u8;
                        i /= 3;
                        d
                    })
                    .collect();
                let mut l = PauliLabel::from_symplectic(&v);
                l.phase = phase;
                l
            })
            .collect()
    }

    #[test]
    fn group_law_matches_matrices() {
        let labels = all_labels(1);
        for a in &labels {
            for b in &labels {
                let lhs = a.mul(b).matrix();
                let rhs = a.matrix() * b.matrix();
                assert!((lhs - rhs).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn two_qutrit_sample() {
        let labels = all_labels(2);
        for (i, a) in labels.iter().enumerate().step_by(17) {
            let b = &labels[(i * 31 + 5) % labels.len()];
            assert!((a.mul(b).matrix() - a.matrix() * b.matrix()).norm() < 1e-11);
        }
    }
}
