//! Tensor powers of the qutrit and qubit magic states.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::algebra::{Conductor, CycloNumber};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MagicId {
    /// Strange state (|1⟩ − |2⟩)/√2.
    S,
    /// Norrell state (|0⟩ + |1⟩ − 2|2⟩)/√6.
    N,
    /// Qutrit Hadamard eigenstate (|0⟩ + c|1⟩ + c|2⟩)/N, c = (√3 − 1)/2.
    H3,
    /// Qutrit T state (|0⟩ + ω₉|1⟩ + ω₉²|2⟩)/√3.
    T3,
    /// Qubit H state cos(π/8)|0⟩ + sin(π/8)|1⟩.
    H,
    /// Qubit T state cos β|0⟩ + e^{iπ/4} sin β|1⟩, cos 2β = 1/√3.
    T,
}

impl MagicId {
    pub const ALL: [MagicId; 6] = [
        MagicId::S,
        MagicId::N,
        MagicId::H3,
        MagicId::T3,
        MagicId::H,
        MagicId::T,
    ];
    pub const QUTRIT: [MagicId; 4] = [MagicId::S, MagicId::N, MagicId::H3, MagicId::T3];

    pub fn p(self) -> u8 {
        match self {
            MagicId::H | MagicId::T => 2,
            _ => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MagicId::S => "S",
            MagicId::N => "N",
            MagicId::H3 => "H3",
            MagicId::T3 => "T3",
            MagicId::H => "H",
            MagicId::T => "T",
        }
    }

    /// Single-copy amplitudes in double precision.
    pub fn amplitudes(self) -> Vec<Complex64> {
        let r = Complex64::new;
        match self {
            MagicId::S => {
                let a = 0.5f64.sqrt();
                vec![r(0.0, 0.0), r(a, 0.0), r(-a, 0.0)]
            }
            MagicId::N => {
                let a = 1.0 / 6f64.sqrt();
                vec![r(a, 0.0), r(a, 0.0), r(-2.0 * a, 0.0)]
            }
            MagicId::H3 => {
                let c = (3f64.sqrt() - 1.0) / 2.0;
                let nn = h3_norm();
                vec![r(1.0 / nn, 0.0), r(c / nn, 0.0), r(c / nn, 0.0)]
            }
            MagicId::T3 => {
                let a = 1.0 / 3f64.sqrt();
                (0..3)
                    .map(|j| Complex64::from_polar(a, 2.0 * PI * j as f64 / 9.0))
                    .collect()
            }
            MagicId::H => vec![r((PI / 8.0).cos(), 0.0), r((PI / 8.0).sin(), 0.0)],
            MagicId::T => {
                let beta = (1.0 / 3f64.sqrt()).acos() / 2.0;
                vec![
                    r(beta.cos(), 0.0),
                    Complex64::from_polar(beta.sin(), PI / 4.0),
                ]
            }
        }
    }
}

/// `N = √(3 − √3)`, the H₃ normalization.
pub fn h3_norm() -> f64 {
    (3.0 - 3f64.sqrt()).sqrt()
}

impl FromStr for MagicId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "S" | "STRANGE" => Ok(MagicId::S),
            "N" | "NORRELL" => Ok(MagicId::N),
            "H3" => Ok(MagicId::H3),
            "T3" => Ok(MagicId::T3),
            "H" => Ok(MagicId::H),
            "T" => Ok(MagicId::T),
            _ => Err(Error::UnknownTarget(s.to_string())),
        }
    }
}

impl fmt::Display for MagicId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An exact amplitude `value / N^n_power`; `n_power` is nonzero only for H₃.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactAmplitude {
    pub value: CycloNumber,
    pub n_power: u32,
}

impl ExactAmplitude {
    pub fn to_complex(&self) -> Complex64 {
        self.value.to_complex() / h3_norm().powi(self.n_power as i32)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MagicTarget {
    pub id: MagicId,
    pub m: usize,
}

fn ratio(n: i64, d: i64) -> CycloNumber {
    CycloNumber::from_ratio(Conductor::N24, n, d)
}

impl MagicTarget {
    pub fn new(id: MagicId, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput(
                "tensor power must be at least 1".into(),
            ));
        }
        Ok(Self { id, m })
    }

    pub fn p(&self) -> u8 {
        self.id.p()
    }

    pub fn dim(&self) -> usize {
        (self.p() as usize).pow(self.m as u32)
    }

    /// Whether exact amplitudes are available at this power.
    pub fn is_exact(&self) -> bool {
        match self.id {
            MagicId::H | MagicId::T => self.m.is_multiple_of(2),
            _ => true,
        }
    }

    fn digits(&self, index: usize) -> Vec<u8> {
        let p = self.p() as usize;
        let mut x = vec![0u8; self.m];
        let mut t = index;
        for d in x.iter_mut().rev() {
            *d = (t % p) as u8;
            t /= p;
        }
        x
    }

    pub fn vector_complex(&self) -> Vec<Complex64> {
        let single = self.id.amplitudes();
        (0..self.dim())
            .map(|i| self.digits(i).iter().map(|&d| single[d as usize]).product())
            .collect()
    }

    /// Exact amplitude at the basis point `x` (entry 0 is the first tensor factor).
    pub fn amplitude_exact(&self, x: &[u8]) -> Result<ExactAmplitude> {
        if x.len() != self.m || x.iter().any(|&d| d >= self.p()) {
            return Err(Error::DimensionMismatch(format!(
                "point {x:?} for {}^{}",
                self.id, self.m
            )));
        }
        let m = self.m as u32;
        let count = |v: u8| x.iter().filter(|&&d| d == v).count() as u32;
        let value = match self.id {
            MagicId::S => {
                if count(0) > 0 {
                    CycloNumber::zero(Conductor::N24)
                } else {
                    let sign = if count(2) % 2 == 0 { 1 } else { -1 };
                    CycloNumber::inv_sqrt_power(Conductor::N24, 2, m) * ratio(sign, 1)
                }
            }
            MagicId::N => {
                let n2 = count(2);
                let num = (-2i64).pow(n2);
                CycloNumber::inv_sqrt_power(Conductor::N24, 2, m)
                    * CycloNumber::inv_sqrt_power(Conductor::N24, 3, m)
                    * ratio(num, 1)
            }
            MagicId::H3 => {
                let c = (CycloNumber::sqrt3() - ratio(1, 1)) * ratio(1, 2);
                return Ok(ExactAmplitude {
                    value: c.pow(m - count(0)),
                    n_power: m,
                });
            }
            MagicId::T3 => {
                let e: i64 = x.iter().map(|&d| d as i64).sum();
                CycloNumber::zeta_pow(Conductor::N72, 8 * e)
                    * CycloNumber::inv_sqrt_power(Conductor::N24, 3, m).lift(Conductor::N72)?
            }
            MagicId::H | MagicId::T => {
                if !self.is_exact() {
                    return Err(Error::InvalidInput(format!(
                        "{} amplitudes are exact only at even m",
                        self.id
                    )));
                }
                let w = count(1);
                let (cc, ss, cs) = if self.id == MagicId::H {
                    // cos²(π/8), sin²(π/8), cos·sin
                    (
                        (ratio(2, 1) + CycloNumber::sqrt2()) * ratio(1, 4),
                        (ratio(2, 1) - CycloNumber::sqrt2()) * ratio(1, 4),
                        CycloNumber::sqrt2() * ratio(1, 4),
                    )
                } else {
                    (
                        (ratio(3, 1) + CycloNumber::sqrt3()) * ratio(1, 6),
                        (ratio(3, 1) - CycloNumber::sqrt3()) * ratio(1, 6),
                        CycloNumber::sqrt6() * ratio(1, 6),
                    )
                };
                let magnitude = if w % 2 == 0 {
                    cc.pow((m - w) / 2) * ss.pow(w / 2)
                } else {
                    cs * cc.pow((m - w - 1) / 2) * ss.pow((w - 1) / 2)
                };
                if self.id == MagicId::T {
                    magnitude * CycloNumber::zeta_pow(Conductor::N24, 3 * w as i64)
                } else {
                    magnitude
                }
            }
        };
        Ok(ExactAmplitude { value, n_power: 0 })
    }

    pub fn vector_exact(&self) -> Result<Vec<ExactAmplitude>> {
        (0..self.dim())
            .map(|i| self.amplitude_exact(&self.digits(i)))
            .collect()
    }

    /// Support bitmask over basis indices (`dim <= 128`).
    pub fn support_mask(&self) -> u128 {
        self.vector_complex()
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > 1e-12)
            .fold(0u128, |acc, (i, _)| acc | (1u128 << i))
    }

    /// SHA-256 over the identifier and the double-precision amplitudes.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("{}:{}\n", self.id, self.m).as_bytes());
        for z in self.vector_complex() {
            h.update(z.re.to_le_bytes());
            h.update(z.im.to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

impl fmt::Display for MagicTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.id, self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-14
    }

    #[test]
    fn single_copies_are_unit_norm() {
        for id in MagicId::ALL {
            let n: f64 = id.amplitudes().iter().map(|z| z.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-15, "{id}");
        }
    }

    #[test]
    fn strange_square() {
        let t = MagicTarget::new(MagicId::S, 2).unwrap();
        let v = t.vector_exact().unwrap();
        let half = ratio(1, 2);
        // index = 3 x0 + x1
        assert_eq!(v[4].value, half);
        assert_eq!(v[5].value, -half.clone());
        assert_eq!(v[7].value, -half.clone());
        assert_eq!(v[8].value, half);
        assert!(v
            .iter()
            .enumerate()
            .filter(|(i, _)| ![4, 5, 7, 8].contains(i))
            .all(|(_, a)| a.value.is_zero()));
    }

    #[test]
    fn norrell_single() {
        let v = MagicTarget::new(MagicId::N, 1)
            .unwrap()
            .vector_exact()
            .unwrap();
        let r6 = CycloNumber::sqrt6() * ratio(1, 6);
        assert_eq!(v[0].value, r6);
        assert_eq!(v[1].value, r6);
        assert_eq!(v[2].value, r6 * ratio(-2, 1));
    }

    #[test]
    fn qubit_t_weight_table() {
        let t = MagicTarget::new(MagicId::T, 4).unwrap();
        let s3 = CycloNumber::sqrt3();
        let i = CycloNumber::imag_unit();
        let one = ratio(1, 1);
        let table = [
            (&ratio(2, 1) + &s3) * ratio(1, 6),
            (&s3 + &one) * (&one + &i) * ratio(1, 12),
            &i * &ratio(1, 6),
            (&s3 - &one) * (&i - &one) * ratio(1, 12),
            (&s3 - &ratio(2, 1)) * ratio(1, 6),
        ];
        for idx in 0..16usize {
            let x: Vec<u8> = (0..4).map(|b| ((idx >> (3 - b)) & 1) as u8).collect();
            let w = x.iter().filter(|&&d| d == 1).count();
            assert_eq!(t.amplitude_exact(&x).unwrap().value, table[w]);
        }
    }

    #[test]
    fn exact_and_complex_agree() {
        for id in MagicId::ALL {
            for m in 1..=4usize {
                let t = MagicTarget::new(id, m).unwrap();
                if !t.is_exact() {
                    assert!(t.amplitude_exact(&vec![0; m]).is_err());
                    continue;
                }
                let ex = t.vector_exact().unwrap();
                for (a, b) in ex.iter().zip(t.vector_complex()) {
                    assert!(close(a.to_complex(), b), "{id}^{m}");
                }
            }
        }
    }

    #[test]
    fn amplitudes_factor_over_copies() {
        for id in MagicId::QUTRIT {
            let single = MagicTarget::new(id, 1).unwrap().vector_exact().unwrap();
            for m in 2..=3usize {
                let t = MagicTarget::new(id, m).unwrap();
                for idx in 0..t.dim() {
                    let x = t.digits(idx);
                    let mut prod = ExactAmplitude {
                        value: CycloNumber::one(Conductor::N24),
                        n_power: 0,
                    };
                    for &d in &x {
                        let a = &single[d as usize];
                        prod = ExactAmplitude {
                            value: &prod.value * &a.value,
                            n_power: prod.n_power + a.n_power,
                        };
                    }
                    assert_eq!(t.amplitude_exact(&x).unwrap(), prod, "{id}^{m} at {x:?}");
                }
            }
        }
    }

    #[test]
    fn parse_ids() {
        assert_eq!("h3".parse::<MagicId>().unwrap(), MagicId::H3);
        assert!("Q".parse::<MagicId>().is_err());
    }
}
