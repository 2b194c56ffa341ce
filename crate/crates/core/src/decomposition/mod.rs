//! Stabilizer decompositions: exact and numeric verification, least-squares
//! fitting, exact coefficient recovery and tensor products.

pub mod fixtures;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{Conductor, CycloNumber, FpMatrix, FpVector, QuadraticForm};
use crate::error::{Error, Result};
use crate::linalg;
use crate::stabilizer::magic::h3_norm;
use crate::stabilizer::{CanonicalStabilizer, ExactAmplitude, MagicTarget};

pub const DECOMPOSITION_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: CycloNumber,
    pub state: CanonicalStabilizer,
}

/// `Σ_i (coeff_i / N^n_power) |state_i⟩`, claimed equal to `target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub target: MagicTarget,
    pub n_power: u32,
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactReport {
    pub ok: bool,
    /// Basis indices where the two sides differ.
    pub mismatches: Vec<usize>,
}

/// `(3 − √3)^e`, the value of `N^{2e}`.
fn n_squared_pow(e: u32) -> CycloNumber {
    (CycloNumber::from_integer(Conductor::N24, 3) - CycloNumber::sqrt3()).pow(e)
}

impl Decomposition {
    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    pub fn check_shape(&self) -> Result<()> {
        let (p, m) = (self.target.p(), self.target.m);
        for (i, t) in self.terms.iter().enumerate() {
            if t.state.p != p || t.state.n != m {
                return Err(Error::DimensionMismatch(format!(
                    "term {i} lives on (p={}, n={}), target on (p={p}, n={m})",
                    t.state.p, t.state.n
                )));
            }
        }
        Ok(())
    }

    pub fn coefficients_complex(&self) -> Vec<Complex64> {
        let scale = h3_norm().powi(-(self.n_power as i32));
        self.terms
            .iter()
            .map(|t| t.coeff.to_complex() * scale)
            .collect()
    }

    /// Exact comparison at every basis point after clearing powers of `N`.
    pub fn verify_exact(&self) -> Result<ExactReport> {
        self.check_shape()?;
        let target = self.target.vector_exact()?;
        let states: Vec<Vec<CycloNumber>> = self
            .terms
            .iter()
            .map(|t| t.state.state_vector())
            .collect::<Result<_>>()?;
        let tp = target.iter().map(|a| a.n_power).max().unwrap_or(0);
        let d = tp.max(self.n_power);
        let clear = |a: &ExactAmplitude| -> Result<CycloNumber> {
            let gap = d - a.n_power;
            if !gap.is_multiple_of(2) {
                return Err(Error::IncompatibleFields(format!(
                    "odd power N^{gap} does not clear into Q(ζ_24)"
                )));
            }
            Ok(&a.value * &n_squared_pow(gap / 2))
        };
        let mut mismatches = Vec::new();
        for (idx, t) in target.iter().enumerate() {
            let mut lhs = CycloNumber::zero(Conductor::N24);
            for (term, vec) in self.terms.iter().zip(&states) {
                if !vec[idx].is_zero() {
                    lhs = lhs + &term.coeff * &vec[idx];
                }
            }
            let lhs = clear(&ExactAmplitude {
                value: lhs,
                n_power: self.n_power,
            })?;
            if lhs != clear(t)? {
                mismatches.push(idx);
            }
        }
        Ok(ExactReport {
            ok: mismatches.is_empty(),
            mismatches,
        })
    }

    /// `‖Σ c_i |σ_i⟩ − ψ‖₂` in double precision.
    pub fn verify_numeric(&self) -> Result<f64> {
        self.check_shape()?;
        let mut acc = self.target.vector_complex();
        for z in acc.iter_mut() {
            *z = -*z;
        }
        for (c, t) in self.coefficients_complex().into_iter().zip(&self.terms) {
            for (a, s) in acc.iter_mut().zip(t.state.state_vector_complex()) {
                *a += c * s;
            }
        }
        Ok(linalg::norm(&acc))
    }

    /// Decomposition of `ψ ⊗ φ` from decompositions of `ψ` and `φ`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.target.id != other.target.id {
            return Err(Error::InvalidInput(
                "tensor factors must share the magic state".into(),
            ));
        }
        let target = MagicTarget::new(self.target.id, self.target.m + other.target.m)?;
        let mut terms = Vec::with_capacity(self.rank() * other.rank());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(Term {
                    coeff: &a.coeff * &b.coeff,
                    state: tensor_states(&a.state, &b.state)?,
                });
            }
        }
        Ok(Self {
            target,
            n_power: self.n_power + other.n_power,
            terms,
        })
    }
}

/// `|σ⟩ ⊗ |τ⟩` in canonical form: concatenated offsets, block-diagonal
/// `W`, direct-sum quadratic form.
pub fn tensor_states(
    a: &CanonicalStabilizer,
    b: &CanonicalStabilizer,
) -> Result<CanonicalStabilizer> {
    if a.p != b.p {
        return Err(Error::DimensionMismatch(
            "tensor factors over different primes".into(),
        ));
    }
    let p = a.p;
    let (n, k) = (a.n + b.n, a.k + b.k);
    let mut x0 = a.x0.entries.clone();
    x0.extend_from_slice(&b.x0.entries);
    let mut w = FpMatrix::zeros(p, n, k);
    for i in 0..a.n {
        for j in 0..a.k {
            w.set(i, j, a.w.get(i, j));
        }
    }
    for i in 0..b.n {
        for j in 0..b.k {
            w.set(a.n + i, a.k + j, b.w.get(i, j));
        }
    }
    let mut q = QuadraticForm::zero(p, k);
    for i in 0..a.k {
        for j in i..a.k {
            q.a[i * k + j] = a.q.quad(i, j);
        }
        q.b[i] = a.q.b[i];
    }
    for i in 0..b.k {
        for j in i..b.k {
            q.a[(a.k + i) * k + a.k + j] = b.q.quad(i, j);
        }
        q.b[a.k + i] = b.q.b[i];
    }
    q.c = (a.q.c + b.q.c) % q.phase_order();
    CanonicalStabilizer::new(p, FpVector::new(p, x0)?, w, q)
}

/// Least-squares fit of `target` by `states`.
pub fn best_fit(states: &[CanonicalStabilizer], target: &MagicTarget) -> (Vec<Complex64>, f64) {
    let vecs: Vec<Vec<Complex64>> = states.iter().map(|s| s.state_vector_complex()).collect();
    let refs: Vec<&[Complex64]> = vecs.iter().map(|v| v.as_slice()).collect();
    linalg::best_fit(&refs, &target.vector_complex())
}

/// `log_p(r) / m`.
pub fn exponent_from_bound(r: u64, m: u32, p: u32) -> f64 {
    (r as f64).ln() / (m as f64 * (p as f64).ln())
}

/// Solve for exact coefficients of `target` over `states` by Gaussian
/// elimination in the cyclotomic field, then verify exactly.
///
/// Returns `None` when the target is outside the span or the solution does
/// not verify. H₃ targets are solved for the numerators with `n_power = m`.
pub fn exact_coefficients(
    states: &[CanonicalStabilizer],
    target: &MagicTarget,
) -> Result<Option<Decomposition>> {
    if !target.is_exact() {
        return Ok(None);
    }
    let amps = target.vector_exact()?;
    let n_power = amps.iter().map(|a| a.n_power).max().unwrap_or(0);
    let rhs: Vec<CycloNumber> = amps.iter().map(|a| a.value.clone()).collect();
    let cols: Vec<Vec<CycloNumber>> = states
        .iter()
        .map(|s| s.state_vector())
        .collect::<Result<_>>()?;
    let r = states.len();
    let d = rhs.len();
    let conductor = rhs
        .iter()
        .map(|z| z.conductor())
        .max()
        .unwrap_or(Conductor::N24);
    let zero = CycloNumber::zero(conductor);
    // augmented rows [A | b]
    let mut rows: Vec<Vec<CycloNumber>> = (0..d)
        .map(|i| {
            let mut row: Vec<CycloNumber> = cols
                .iter()
                .map(|c| c[i].lift(conductor).expect("24 lifts"))
                .collect();
            row.push(rhs[i].lift(conductor).expect("same field"));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..r {
        let Some(pr) = (rank..d).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, pr);
        let inv = rows[rank][c].inv().expect("nonzero pivot");
        for v in rows[rank].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    if !pv.is_zero() {
                        *v = &*v - &(&f * pv);
                    }
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    if rows[rank..].iter().any(|row| !row[r].is_zero()) {
        return Ok(None);
    }
    let mut coeffs = vec![zero; r];
    for (i, &c) in pivots.iter().enumerate() {
        coeffs[c] = rows[i][r].clone();
    }
    let terms = states
        .iter()
        .zip(coeffs)
        .map(|(s, coeff)| Term {
            coeff,
            state: s.clone(),
        })
        .collect();
    let dec = Decomposition {
        target: *target,
        n_power,
        terms,
    };
    Ok(dec.verify_exact()?.ok.then_some(dec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stabilizer::MagicId;

    #[test]
    fn exponents() {
        assert!((exponent_from_bound(2, 2, 3) - 0.3155).abs() < 1e-4);
        assert!((exponent_from_bound(4, 3, 3) - 0.4206).abs() < 1e-4);
        assert!((exponent_from_bound(3, 4, 2) - 0.3962).abs() < 1e-4);
        assert!((exponent_from_bound(3, 2, 3) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tensor_state_amplitudes_multiply() {
        let a = CanonicalStabilizer::plus(3, 1);
        let b = CanonicalStabilizer::basis(3, &[2]).unwrap();
        let t = tensor_states(&a, &b).unwrap();
        let v = t.state_vector_complex();
        for x0 in 0..3 {
            assert!((v[3 * x0 + 2].re - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn exact_coefficients_on_full_basis() {
        let target = MagicTarget::new(MagicId::N, 1).unwrap();
        let basis: Vec<_> = (0..3)
            .map(|j| CanonicalStabilizer::basis(3, &[j]).unwrap())
            .collect();
        let dec = exact_coefficients(&basis, &target).unwrap().unwrap();
        assert_eq!(
            dec.terms[2].coeff,
            CycloNumber::sqrt6() * CycloNumber::from_ratio(Conductor::N24, -1, 3)
        );
        let h3 = MagicTarget::new(MagicId::H3, 1).unwrap();
        let dec = exact_coefficients(&basis, &h3).unwrap().unwrap();
        assert_eq!(dec.n_power, 1);
        assert!(exact_coefficients(&basis[..2], &target).unwrap().is_none());
    }
}
