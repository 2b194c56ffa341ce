//! The modulus-ratio lower bound `χ(ψ^{⊗m}) ≥ (m+1)/(3 log₂(m+1))`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Amplitudes below this modulus count as zero.
const ZERO: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioWitness {
    pub i_a: usize,
    pub i_b: usize,
    pub a: f64,
    pub b: f64,
    pub ratio: f64,
}

/// The index pair of nonzero amplitudes with the largest modulus ratio, if
/// that ratio is at least 2.
pub fn find_ratio_witness(state: &[Complex64]) -> Option<RatioWitness> {
    let mut best: Option<RatioWitness> = None;
    for (i_a, za) in state.iter().enumerate() {
        for (i_b, zb) in state.iter().enumerate() {
            let (a, b) = (za.norm(), zb.norm());
            if i_a == i_b || a <= ZERO || b <= ZERO {
                continue;
            }
            let ratio = a / b;
            if ratio >= 2.0 - 1e-12 && best.is_none_or(|w| ratio > w.ratio + 1e-12) {
                best = Some(RatioWitness {
                    i_a,
                    i_b,
                    a,
                    b,
                    ratio,
                });
            }
        }
    }
    best
}

/// `(m+1) / (3 log₂(m+1))`.
pub fn moulton_bound(m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidInput("the bound needs m >= 1".into()));
    }
    let l = (m + 1) as f64;
    Ok(l / (3.0 * l.log2()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsequenceEntry {
    /// `x^(k) = (i_a × k, i_b × (m−k))`.
    pub coordinate: Vec<usize>,
    /// Basis index of the coordinate, first digit most significant.
    pub index: usize,
    pub modulus: f64,
}

/// The `m + 1` coordinates of `ψ^{⊗m}` with moduli `a^k b^{m−k}`.
pub fn exp_subsequence(state: &[Complex64], m: usize) -> Result<Vec<SubsequenceEntry>> {
    let w = find_ratio_witness(state).ok_or_else(|| {
        Error::InvalidInput(
            "no amplitude pair with modulus ratio >= 2; the bound does not apply".into(),
        )
    })?;
    let d = state.len();
    Ok((0..=m)
        .map(|k| {
            let coordinate: Vec<usize> = std::iter::repeat_n(w.i_a, k)
                .chain(std::iter::repeat_n(w.i_b, m - k))
                .collect();
            let index = coordinate.iter().fold(0, |acc, &x| acc * d + x);
            SubsequenceEntry {
                coordinate,
                index,
                modulus: w.a.powi(k as i32) * w.b.powi((m - k) as i32),
            }
        })
        .collect())
}
