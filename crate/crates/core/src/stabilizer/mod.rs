//! Canonical-form stabilizer states, catalogs and magic-state targets.
//!
//! A stabilizer state is stored as `(p, n, k, x0, W, Q)` and denotes
//! `p^{-k/2} Σ_{y ∈ F_p^k} φ(Q(y)) |x0 + W y⟩`, where `φ(e) = ω_p^e` for odd
//! `p` and `φ(e) = i^e` for qubits.

mod catalog;
pub mod magic;

pub use catalog::{CatalogMode, StabilizerCatalog, CATALOG_VERSION};
pub use magic::{ExactAmplitude, MagicId, MagicTarget};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::quadratic::phase_order;
use crate::algebra::{Conductor, CycloNumber, FpMatrix, FpVector, QuadraticForm};
use crate::error::{Error, Result};

/// Largest register handled by dense state vectors.
pub const MAX_DENSE_QUDITS: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalStabilizer {
    pub p: u8,
    pub n: usize,
    pub k: usize,
    pub x0: FpVector,
    pub w: FpMatrix,
    pub q: QuadraticForm,
}

/// `ζ_24` exponent of the phase root `φ(1)`.
pub(crate) fn phase_step(p: u8) -> i64 {
    24 / phase_order(p) as i64
}

/// Complex value of `φ(e)` for `e` in `[0, phase_order)`.
pub(crate) fn phase_table(p: u8) -> Vec<Complex64> {
    let d = phase_order(p) as f64;
    (0..phase_order(p))
        .map(|e| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * e as f64 / d))
        .collect()
}

impl CanonicalStabilizer {
    pub fn new(p: u8, x0: FpVector, w: FpMatrix, q: QuadraticForm) -> Result<Self> {
        let n = x0.len();
        let k = w.cols();
        if w.rows() != n || q.k != k || x0.p != p || w.p != p || q.p != p {
            return Err(Error::DimensionMismatch(format!(
                "x0 length {n}, W {}x{}, Q arity {}, moduli ({}, {}, {})",
                w.rows(),
                w.cols(),
                q.k,
                x0.p,
                w.p,
                q.p
            )));
        }
        if w.rank() != k {
            return Err(Error::InvalidInput("W must have full column rank".into()));
        }
        q.validate()?;
        Ok(Self { p, n, k, x0, w, q })
    }

    /// Convenience constructor from raw digit lists; `w_cols` lists columns.
    pub fn from_parts(p: u8, x0: &[u8], w_cols: &[Vec<u8>], q: QuadraticForm) -> Result<Self> {
        let n = x0.len();
        let x0 = FpVector::new(p, x0.to_vec())?;
        let cols = w_cols
            .iter()
            .map(|c| FpVector::new(p, c.clone()))
            .collect::<Result<Vec<_>>>()?;
        let w = FpMatrix::from_columns(p, n, &cols)?;
        Self::new(p, x0, w, q)
    }

    /// The computational basis state `|x⟩`.
    pub fn basis(p: u8, x: &[u8]) -> Result<Self> {
        Self::new(
            p,
            FpVector::new(p, x.to_vec())?,
            FpMatrix::zeros(p, x.len(), 0),
            QuadraticForm::zero(p, 0),
        )
    }

    /// `|+⟩^{⊗n}`, the uniform superposition.
    pub fn plus(p: u8, n: usize) -> Self {
        Self {
            p,
            n,
            k: n,
            x0: FpVector::zeros(p, n),
            w: FpMatrix::identity(p, n),
            q: QuadraticForm::zero(p, n),
        }
    }

    pub fn dim(&self) -> usize {
        (self.p as usize).pow(self.n as u32)
    }

    /// Calls `f(basis_index, phase_exponent)` for every support point, with
    /// `y` running through F_p^k in lexicographic order.
    pub fn for_each_point(&self, mut f: impl FnMut(usize, u8)) {
        let p = self.p;
        let mut y = vec![0u8; self.k];
        let mut x = vec![0u8; self.n];
        loop {
            for (i, xi) in x.iter_mut().enumerate() {
                let mut v = self.x0.entries[i] as u32;
                for (j, &yj) in y.iter().enumerate() {
                    v += self.w.get(i, j) as u32 * yj as u32;
                }
                *xi = (v % p as u32) as u8;
            }
            let idx = x
                .iter()
                .fold(0usize, |acc, &d| acc * p as usize + d as usize);
            f(idx, self.q.eval(&y));
            // advance y, last coordinate fastest
            let mut pos = self.k;
            loop {
                if pos == 0 {
                    return;
                }
                pos -= 1;
                y[pos] += 1;
                if y[pos] < p {
                    break;
                }
                y[pos] = 0;
            }
        }
    }

    /// Preimage `y` with `x = x0 + W y`, if `x` lies in the support.
    pub fn preimage(&self, x: &FpVector) -> Result<Option<FpVector>> {
        if x.len() != self.n || x.p != self.p {
            return Err(Error::DimensionMismatch(format!(
                "point of length {} for n = {}",
                x.len(),
                self.n
            )));
        }
        let shifted = x.sub(&self.x0);
        if self.k == 0 {
            return Ok(shifted.is_zero().then(|| FpVector::zeros(self.p, 0)));
        }
        Ok(self.w.solve_columns(&shifted))
    }

    /// `p^{-k/2}` as an exact cyclotomic number.
    pub fn scale_exact(&self) -> CycloNumber {
        CycloNumber::inv_sqrt_power(Conductor::N24, self.p, self.k as u32)
    }

    pub fn phase_exact(&self, e: u8) -> CycloNumber {
        CycloNumber::zeta_pow(Conductor::N24, e as i64 * phase_step(self.p))
    }

    /// Exact amplitude `⟨x|σ⟩`.
    pub fn amplitude(&self, x: &FpVector) -> Result<CycloNumber> {
        match self.preimage(x)? {
            None => Ok(CycloNumber::zero(Conductor::N24)),
            Some(y) => Ok(self.scale_exact() * self.phase_exact(self.q.eval(&y.entries))),
        }
    }

    /// Dense exact state vector of length `p^n`.
    pub fn state_vector(&self) -> Result<Vec<CycloNumber>> {
        if self.n > MAX_DENSE_QUDITS {
            return Err(Error::InvalidInput(format!(
                "{} qudits exceed the dense limit",
                self.n
            )));
        }
        let zero = CycloNumber::zero(Conductor::N24);
        let mut out = vec![zero; self.dim()];
        let scale = self.scale_exact();
        let phases: Vec<CycloNumber> = (0..phase_order(self.p))
            .map(|e| &scale * &self.phase_exact(e))
            .collect();
        self.for_each_point(|idx, e| out[idx] = phases[e as usize].clone());
        Ok(out)
    }

    pub fn state_vector_complex(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        self.fill_complex(&mut out);
        out
    }

    /// Writes the state into `out`, which must have length `p^n`.
    pub fn fill_complex(&self, out: &mut [Complex64]) {
        out.fill(Complex64::new(0.0, 0.0));
        let scale = (self.p as f64).powf(-(self.k as f64) / 2.0);
        let table: Vec<Complex64> = phase_table(self.p).into_iter().map(|z| z * scale).collect();
        self.for_each_point(|idx, e| out[idx] = table[e as usize]);
    }

    /// Support as a bitmask over basis indices (requires `p^n <= 128`).
    pub fn support_mask(&self) -> u128 {
        debug_assert!(self.dim() <= 128);
        let mut mask = 0u128;
        self.for_each_point(|idx, _| mask |= 1u128 << idx);
        mask
    }

    pub fn support_size(&self) -> usize {
        (self.p as usize).pow(self.k as u32)
    }

    /// Catalog form of the same projective state: `W` column-reduced,
    /// `x0` reduced modulo `col(W)` and `Q` constant-free. Returns the new
    /// tuple and the dropped global phase exponent.
    pub fn canonicalize(&self) -> Result<(Self, u8)> {
        let p = self.p;
        let (w, rank) = self.w.rref_columns();
        debug_assert_eq!(rank, self.k);
        let pivots = w.column_pivots();
        let mut x0 = self.x0.clone();
        for (j, &r) in pivots.iter().enumerate() {
            let t = x0.entries[r];
            if t != 0 {
                x0 = x0.sub(&w.column(j).scale(t));
            }
        }
        // old coordinates of the new parametrization y' ↦ x0' + W'y'
        let old_y = |y_new: &[u8]| -> Vec<u8> {
            let mut x = x0.clone();
            for (j, &v) in y_new.iter().enumerate() {
                x = x.add(&w.column(j).scale(v));
            }
            self.preimage(&x)
                .expect("dims")
                .expect("inside support")
                .entries
        };
        let k = self.k;
        let qv = |y: &[u8]| self.q.eval(&old_y(y)) as i64;
        let ord = phase_order(p) as i64;
        let unit = |i: usize, t: u8| {
            let mut y = vec![0u8; k];
            y[i] = t;
            y
        };
        let c = qv(&vec![0u8; k]);
        let mut q = QuadraticForm::zero(p, k);
        for i in 0..k {
            if p == 2 {
                q.b[i] = (qv(&unit(i, 1)) - c).rem_euclid(ord) as u8;
            } else {
                // Q(t e_i) - c = a t² + b t, solved from t = 1, 2
                let v1 = qv(&unit(i, 1)) - c;
                let v2 = qv(&unit(i, 2)) - c;
                let inv2 = (ord + 1) / 2;
                let a = ((v2 - 2 * v1) * inv2).rem_euclid(ord);
                q.a[i * k + i] = a as u8;
                q.b[i] = (v1 - a).rem_euclid(ord) as u8;
            }
        }
        for i in 0..k {
            for j in i + 1..k {
                let mut y = vec![0u8; k];
                y[i] = 1;
                y[j] = 1;
                let mixed = qv(&y) - qv(&unit(i, 1)) - qv(&unit(j, 1)) + c;
                let coeff = if p == 2 {
                    mixed.rem_euclid(4) / 2
                } else {
                    mixed.rem_euclid(ord)
                };
                q.a[i * k + j] = coeff as u8;
            }
        }
        let out = Self {
            p,
            n: self.n,
            k,
            x0: x0.clone(),
            w: w.clone(),
            q,
        };
        // guard: the reconstructed form must agree pointwise
        let mut ok = true;
        let mut y = vec![0u8; k];
        for idx in 0..(p as usize).pow(k as u32) {
            let mut t = idx;
            for slot in y.iter_mut().rev() {
                *slot = (t % p as usize) as u8;
                t /= p as usize;
            }
            if (out.q.eval(&y) as i64 + c).rem_euclid(ord) != qv(&y) {
                ok = false;
                break;
            }
        }
        if !ok {
            return Err(Error::InvalidInput(
                "phase function is not a quadratic form of the canonical class".into(),
            ));
        }
        Ok((out, c as u8))
    }
}

#[derive(Serialize, Deserialize)]
struct StabilizerRepr {
    p: u8,
    n: usize,
    k: usize,
    x0: Vec<u8>,
    #[serde(rename = "W")]
    w: Vec<Vec<u8>>,
    #[serde(rename = "Q")]
    q: QuadraticForm,
}

impl Serialize for CanonicalStabilizer {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StabilizerRepr {
            p: self.p,
            n: self.n,
            k: self.k,
            x0: self.x0.entries.clone(),
            w: self.w.to_rows(),
            q: self.q.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CanonicalStabilizer {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = StabilizerRepr::deserialize(d)?;
        let w = if r.k == 0 {
            FpMatrix::zeros(r.p, r.n, 0)
        } else {
            FpMatrix::from_rows(r.p, &r.w).map_err(D::Error::custom)?
        };
        let x0 = FpVector::new(r.p, r.x0).map_err(D::Error::custom)?;
        let s = CanonicalStabilizer::new(r.p, x0, w, r.q).map_err(D::Error::custom)?;
        if s.n != r.n || s.k != r.k {
            return Err(D::Error::custom("declared n or k disagrees with the tuple"));
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q3(k: usize, quad: &[(usize, usize, u8)], b: &[u8]) -> QuadraticForm {
        QuadraticForm::new(3, k, quad, b, 0).unwrap()
    }

    #[test]
    fn amplitude_of_strange_sigma1() {
        let s = CanonicalStabilizer::from_parts(
            3,
            &[0, 0],
            &[vec![1, 0], vec![0, 1]],
            q3(2, &[(0, 0, 1), (0, 1, 1), (1, 1, 1)], &[0, 0]),
        )
        .unwrap();
        let x = FpVector::new(3, vec![1, 1]).unwrap();
        assert_eq!(
            s.amplitude(&x).unwrap(),
            CycloNumber::from_ratio(Conductor::N24, 1, 3)
        );
    }

    #[test]
    fn amplitude_outside_support_is_zero() {
        let s = CanonicalStabilizer::from_parts(
            3,
            &[0, 2, 0],
            &[vec![1, 0, 0], vec![0, 0, 1]],
            q3(2, &[], &[0, 0]),
        )
        .unwrap();
        let x = FpVector::new(3, vec![0, 1, 0]).unwrap();
        assert!(s.amplitude(&x).unwrap().is_zero());
    }

    #[test]
    fn basis_state_amplitude_is_one() {
        let s = CanonicalStabilizer::basis(3, &[2, 2]).unwrap();
        let x = FpVector::new(3, vec![2, 2]).unwrap();
        assert_eq!(s.amplitude(&x).unwrap(), CycloNumber::one(Conductor::N24));
        let v = s.state_vector().unwrap();
        assert_eq!(v.iter().filter(|a| !a.is_zero()).count(), 1);
    }

    #[test]
    fn plus_states() {
        let v = CanonicalStabilizer::plus(3, 1).state_vector().unwrap();
        let third = CycloNumber::sqrt3() * CycloNumber::from_ratio(Conductor::N24, 1, 3);
        assert!(v.iter().all(|a| *a == third));
        let v4 = CanonicalStabilizer::plus(3, 4).state_vector().unwrap();
        assert_eq!(v4.len(), 81);
        assert!(v4
            .iter()
            .all(|a| *a == CycloNumber::from_ratio(Conductor::N24, 1, 9)));
    }

    #[test]
    fn exact_unit_norm() {
        let s = CanonicalStabilizer::from_parts(
            3,
            &[0, 1, 0],
            &[vec![1, 0, 0], vec![0, 0, 1]],
            q3(2, &[(0, 0, 2), (0, 1, 1), (1, 1, 1)], &[0, 0]),
        )
        .unwrap();
        let v = s.state_vector().unwrap();
        let norm = v.iter().fold(CycloNumber::zero(Conductor::N24), |acc, a| {
            acc + a * &a.conj()
        });
        assert_eq!(norm, CycloNumber::one(Conductor::N24));
    }

    #[test]
    fn canonicalize_preserves_state_up_to_phase() {
        // W columns (e0 + e1, e1), x0 with a pivot-row component, affine Q
        let s = CanonicalStabilizer::from_parts(
            3,
            &[1, 2, 0],
            &[vec![1, 1, 0], vec![0, 1, 0]],
            QuadraticForm::new(3, 2, &[(0, 0, 2), (0, 1, 1)], &[1, 2], 1).unwrap(),
        )
        .unwrap();
        let (c, e) = s.canonicalize().unwrap();
        assert_eq!(c.q.c, 0);
        let phase = s.phase_exact(e);
        let lhs = s.state_vector().unwrap();
        let rhs = c.state_vector().unwrap();
        for (a, b) in lhs.iter().zip(&rhs) {
            assert_eq!(*a, &phase * b);
        }
    }

    #[test]
    fn qubit_form_canonicalizes() {
        let s = CanonicalStabilizer::from_parts(
            2,
            &[0, 0, 0],
            &[vec![1, 1, 0], vec![0, 1, 1]],
            QuadraticForm::new(2, 2, &[(0, 1, 1)], &[1, 3], 2).unwrap(),
        )
        .unwrap();
        let (c, e) = s.canonicalize().unwrap();
        let phase = s.phase_exact(e);
        for (a, b) in s
            .state_vector()
            .unwrap()
            .iter()
            .zip(&c.state_vector().unwrap())
        {
            assert_eq!(*a, &phase * b);
        }
    }

    #[test]
    fn serde_roundtrip() {
        let s = CanonicalStabilizer::from_parts(
            3,
            &[0, 2, 0],
            &[vec![1, 0, 0], vec![0, 0, 1]],
            q3(2, &[(0, 1, 1)], &[0, 2]),
        )
        .unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"W\":[[1,0],[0,0],[0,1]]"));
        let back: CanonicalStabilizer = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        let b = CanonicalStabilizer::basis(3, &[1, 2]).unwrap();
        let back: CanonicalStabilizer =
            serde_json::from_str(&serde_json::to_string(&b).unwrap()).unwrap();
        assert_eq!(back, b);
    }
}
