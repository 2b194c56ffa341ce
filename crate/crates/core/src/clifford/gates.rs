//! Qutrit gate library and gate words.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::algebra::{Conductor, CycloNumber};
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// One gate of the alphabet `{X, Z, S, H, SUM}` on a register of qutrits.
/// Wires are zero-based here and one-based in the textual word syntax.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    X(usize),
    Z(usize),
    S(usize),
    H(usize),
    /// `H†`, equal to `H³`.
    Hdg(usize),
    /// `|a, b⟩ ↦ |a, a + b⟩` with the first wire as control.
    Sum(usize, usize),
}

impl Gate {
    pub fn max_wire(&self) -> usize {
        match *self {
            Gate::X(w) | Gate::Z(w) | Gate::S(w) | Gate::H(w) | Gate::Hdg(w) => w,
            Gate::Sum(a, b) => a.max(b),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::X(w) => write!(f, "X{}", w + 1),
            Gate::Z(w) => write!(f, "Z{}", w + 1),
            Gate::S(w) => write!(f, "S{}", w + 1),
            Gate::H(w) => write!(f, "H{}", w + 1),
            Gate::Hdg(w) => write!(f, "H{}dg", w + 1),
            Gate::Sum(0, 1) => write!(f, "SUM"),
            Gate::Sum(a, b) => write!(f, "SUM{}{}", a + 1, b + 1),
        }
    }
}

/// A gate word, applied left to right: the leftmost gate acts first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateWord(pub Vec<Gate>);

impl GateWord {
    pub fn unitary(&self, n: usize) -> Result<CMatrix> {
        let d = 3usize.pow(n as u32);
        let mut u = CMatrix::identity(d, d);
        for g in &self.0 {
            if g.max_wire() >= n {
                return Err(Error::InvalidInput(format!(
                    "gate {g} outside a {n}-qutrit register"
                )));
            }
            u = gate_matrix(*g, n) * u;
        }
        Ok(u)
    }
}

impl fmt::Display for GateWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|g| g.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for GateWord {
    type Err = Error;

    /// Tokens separated by whitespace: `X1`, `Z2`, `S1`, `H2`, `H1†` (or
    /// `H1dg`), powers `H2²` (or `H2^2`), `SUM` (control 1, target 2) and
    /// `SUM21`.
    fn from_str(s: &str) -> Result<Self> {
        let mut out = Vec::new();
        for tok in s.split_whitespace() {
            let bad = || Error::Parse(format!("malformed gate token {tok:?}"));
            if let Some(rest) = tok.strip_prefix("SUM") {
                let (a, b) = match rest {
                    "" | "12" => (0, 1),
                    "21" => (1, 0),
                    _ => return Err(bad()),
                };
                out.push(Gate::Sum(a, b));
                continue;
            }
            let mut chars = tok.chars();
            let head = chars.next().ok_or_else(bad)?;
            let rest: String = chars.collect();
            let (body, power, dagger) = if let Some(b) =
                rest.strip_suffix('†').or_else(|| rest.strip_suffix("dg"))
            {
                (b.to_string(), 1, true)
            } else if let Some(b) = rest.strip_suffix('²').or_else(|| rest.strip_suffix("^2")) {
                (b.to_string(), 2, false)
            } else if let Some(b) = rest.strip_suffix('³').or_else(|| rest.strip_suffix("^3")) {
                (b.to_string(), 3, false)
            } else {
                (rest, 1, false)
            };
            let wire: usize = body.parse().map_err(|_| bad())?;
            if wire == 0 {
                return Err(bad());
            }
            let w = wire - 1;
            let g = match (head, dagger) {
                ('X', false) => Gate::X(w),
                ('Z', false) => Gate::Z(w),
                ('S', false) => Gate::S(w),
                ('H', false) => Gate::H(w),
                ('H', true) => Gate::Hdg(w),
                _ => return Err(bad()),
            };
            for _ in 0..power {
                out.push(g);
            }
        }
        Ok(GateWord(out))
    }
}

fn omega_pow(e: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (e % 3) as f64 / 3.0)
}

/// Single-qutrit matrix of a one-wire gate.
pub fn single_qutrit(g: Gate) -> CMatrix {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut m = CMatrix::from_element(3, 3, z);
    let inv = 1.0 / 3f64.sqrt();
    match g {
        Gate::X(_) => {
            for j in 0..3 {
                m[((j + 1) % 3, j)] = one;
            }
        }
        Gate::Z(_) => {
            for j in 0..3 {
                m[(j, j)] = omega_pow(j);
            }
        }
        Gate::S(_) => {
            m[(0, 0)] = one;
            m[(1, 1)] = one;
            m[(2, 2)] = omega_pow(1);
        }
        Gate::H(_) => {
            for j in 0..3 {
                for k in 0..3 {
                    m[(j, k)] = omega_pow(j * k) * inv;
                }
            }
        }
        Gate::Hdg(_) => {
            for j in 0..3 {
                for k in 0..3 {
                    m[(j, k)] = omega_pow(2 * j * k) * inv;
                }
            }
        }
        Gate::Sum(..) => panic!("SUM is a two-wire gate"),
    }
    m
}

/// Exact single-qutrit matrix, row-major.
pub fn single_qutrit_exact(g: Gate) -> Vec<Vec<CycloNumber>> {
    let zeta = |e: i64| CycloNumber::zeta_pow(Conductor::N24, e);
    let zero = CycloNumber::zero(Conductor::N24);
    let inv = CycloNumber::inv_sqrt_power(Conductor::N24, 3, 1);
    (0..3)
        .map(|j| {
            (0..3)
                .map(|k| match g {
                    Gate::X(_) if j == (k + 1) % 3 => zeta(0),
                    Gate::Z(_) if j == k => zeta(8 * j as i64),
                    Gate::S(_) if j == k => zeta(if j == 2 { 8 } else { 0 }),
                    Gate::H(_) => &inv * &zeta(8 * (j * k) as i64),
                    Gate::Hdg(_) => &inv * &zeta(16 * (j * k) as i64),
                    _ => zero.clone(),
                })
                .collect()
        })
        .collect()
}

/// Full `3^n × 3^n` matrix of a gate. Wire 0 is the most significant digit.
pub fn gate_matrix(g: Gate, n: usize) -> CMatrix {
    let d = 3usize.pow(n as u32);
    let digit = |idx: usize, w: usize| (idx / 3usize.pow((n - 1 - w) as u32)) % 3;
    let with_digit = |idx: usize, w: usize, v: usize| {
        let s = 3usize.pow((n - 1 - w) as u32);
        idx - digit(idx, w) * s + v * s
    };
    let mut m = CMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    match g {
        Gate::Sum(c, t) => {
            for col in 0..d {
                let row = with_digit(col, t, (digit(col, t) + digit(col, c)) % 3);
                m[(row, col)] = Complex64::new(1.0, 0.0);
            }
        }
        _ => {
            let w = g.max_wire();
            let s = single_qutrit(g);
            for col in 0..d {
                let a = digit(col, w);
                for b in 0..3 {
                    let v = s[(b, a)];
                    if v.norm() > 0.0 {
                        m[(with_digit(col, w, b), col)] = v;
                    }
                }
            }
        }
    }
    m
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}
