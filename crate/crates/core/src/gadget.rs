//! Branch operators, phase-state predicates and the two-qutrit protocol sweeps.
//!
//! Two-qutrit indices are `3·data + anc`: the data qutrit is the first tensor
//! factor. A branch operator is `E_k = (1 ⊗ ⟨k|) C (1 ⊗ |M⟩)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::clifford::gates::{gate_matrix, CMatrix, Gate, GateWord};
use crate::clifford::group::{clifford_group_1q, is_clifford_1q};
use crate::clifford::pauli::PauliLabel;
use crate::clifford::symplectic::{enumerate_symplectic, SynthesisTable};
use crate::error::{Error, Result};
use crate::stabilizer::MagicId;
use crate::{CLIFFORD_TOL, UNITARY_TOL};

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct BranchOperator {
    pub k: u8,
    pub e: CMatrix,
}

/// `E_k(C, |M⟩)` for a 9×9 two-qutrit unitary `C`.
pub fn branch_operator(c: &CMatrix, m: &[Complex64], k: u8) -> Result<BranchOperator> {
    if c.nrows() != 9 || c.ncols() != 9 || m.len() != 3 || k > 2 {
        return Err(Error::DimensionMismatch(
            "branch operators need a 9x9 unitary, a qutrit state and k < 3".into(),
        ));
    }
    let k = k as usize;
    let e = CMatrix::from_fn(3, 3, |i, j| {
        (0..3).map(|l| c[(3 * i + k, 3 * j + l)] * m[l]).sum()
    });
    Ok(BranchOperator { k: k as u8, e })
}

fn omega_pow(e: i64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * e.rem_euclid(3) as f64 / 3.0)
}

/// Checks `E_k(D C_sp) = ω^{b(k−a)} D_data E_{k−a}(C_sp)` where
/// `D = D_data ⊗ X^a Z^b`. With `with_phase = false` the `ω` factor is
/// dropped, which must break the identity for some inputs.
pub fn check_reduction(
    a: u8,
    b: u8,
    data: &PauliLabel,
    c_sp: &CMatrix,
    m: &[Complex64],
    k: u8,
    with_phase: bool,
) -> Result<bool> {
    let anc = PauliLabel::from_symplectic(&[a % 3, b % 3]).matrix();
    let dd = data.matrix();
    let c_ent = dd.kronecker(&anc) * c_sp;
    let lhs = branch_operator(&c_ent, m, k)?.e;
    let shifted = ((k as i64 - a as i64).rem_euclid(3)) as u8;
    let mut rhs = &dd * branch_operator(c_sp, m, shifted)?.e;
    if with_phase {
        rhs *= omega_pow(b as i64 * (k as i64 - a as i64));
    }
    Ok((lhs - rhs).norm() <= 1e-12)
}

/// Relative phases `(arg ψ₁/ψ₀, arg ψ₂/ψ₀)` in `[0, 2π)` if `v` has three
/// equal-modulus components (after normalization) within `atol`.
pub fn is_phase_state(v: &[Complex64], atol: f64) -> Result<Option<[f64; 2]>> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if v.len() != 3 || norm <= 1e-300 {
        return Err(Error::InvalidInput(
            "phase-state test needs a nonzero 3-vector".into(),
        ));
    }
    let target = 1.0 / 3f64.sqrt();
    if v.iter().any(|z| (z.norm() / norm - target).abs() > atol) {
        return Ok(None);
    }
    let rel = |z: Complex64| (z / v[0]).arg().rem_euclid(2.0 * PI);
    Ok(Some([rel(v[1]), rel(v[2])]))
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// True iff some phase is farther than `atol` from every multiple of 2π/3.
pub fn is_nonclifford_diagonal(phases: &[f64; 2], atol: f64) -> bool {
    phases
        .iter()
        .any(|&t| (0..3).all(|j| angle_gap(t, 2.0 * PI * j as f64 / 3.0) > atol))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    PhaseStateNonclifford,
    PhaseStateClifford,
    NotPhaseState,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub magic: MagicId,
    pub symplectic_index: Option<usize>,
    pub word: Option<String>,
    pub k: u8,
    /// Unnormalized data output `E_k |M⟩`.
    pub output: Vec<Complex64>,
    pub probability: f64,
    pub phases: Option<[f64; 2]>,
    pub classification: Classification,
}

fn classify(out: &[Complex64]) -> (Option<[f64; 2]>, Classification) {
    match is_phase_state(out, UNITARY_TOL) {
        Ok(Some(ph)) => {
            let c = if is_nonclifford_diagonal(&ph, CLIFFORD_TOL) {
                Classification::PhaseStateNonclifford
            } else {
                Classification::PhaseStateClifford
            };
            (Some(ph), c)
        }
        _ => (None, Classification::NotPhaseState),
    }
}

/// Branch-`k` data output of `C (|M⟩ ⊗ |M⟩)`.
fn two_copy_output(c: &CMatrix, m: &[Complex64], k: usize) -> Vec<Complex64> {
    (0..3)
        .map(|i| {
            (0..9)
                .map(|col| c[(3 * i + k, col)] * m[col / 3] * m[col % 3])
                .sum()
        })
        .collect()
}

fn report(
    magic: MagicId,
    c: &CMatrix,
    k: u8,
    index: Option<usize>,
    word: Option<String>,
) -> ProtocolReport {
    let m = magic.amplitudes();
    let output = two_copy_output(c, &m, k as usize);
    let probability = output.iter().map(|z| z.norm_sqr()).sum();
    let (phases, classification) = if probability > 1e-14 {
        classify(&output)
    } else {
        (None, Classification::NotPhaseState)
    };
    ProtocolReport {
        magic,
        symplectic_index: index,
        word,
        k,
        output,
        probability,
        phases,
        classification,
    }
}

/// Report for `C (|M⟩ ⊗ |M⟩)` projected on ancilla outcome `k`.
pub fn report_for(magic: MagicId, c: &CMatrix, k: u8) -> ProtocolReport {
    report(magic, c, k, None, None)
}

/// Apply a gate word to `|M⟩ ⊗ |M⟩` and project the ancilla onto `k`.
pub fn replay_protocol(word: &str, magic: MagicId, k: u8) -> Result<ProtocolReport> {
    if magic.p() != 3 || k > 2 {
        return Err(Error::InvalidInput(
            "replay needs a qutrit magic state and k < 3".into(),
        ));
    }
    let w: GateWord = word.parse()?;
    let c = w.unitary(2)?;
    Ok(report(magic, &c, k, None, Some(w.to_string())))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TwoCopySweep {
    pub version: u32,
    pub magic: MagicId,
    pub elements: usize,
    pub branches_tested: usize,
    pub phase_state_hits: usize,
    pub nonclifford_hits: usize,
    /// Largest deviation of `Σ_k p_k` from 1 over all elements.
    pub max_completeness_error: f64,
    pub hits: Vec<ProtocolReport>,
}

/// Unitaries for all of Sp(4, F_3), in enumeration order.
pub fn sp4_unitaries() -> Result<Vec<CMatrix>> {
    let elems = enumerate_symplectic(2)?;
    Ok(SynthesisTable::get(2).unitaries(&elems))
}

/// Classify `E_k(C_sp, M)|M⟩` for every symplectic representative and branch.
pub fn sweep_two_copy(magic: MagicId, unitaries: &[CMatrix]) -> Result<TwoCopySweep> {
    if !MagicId::QUTRIT.contains(&magic) {
        return Err(Error::InvalidInput(
            "two-copy sweeps need a qutrit magic state".into(),
        ));
    }
    let per: Vec<(Vec<ProtocolReport>, f64)> = unitaries
        .par_iter()
        .enumerate()
        .map(|(idx, c)| {
            let reps: Vec<ProtocolReport> = (0..3u8)
                .map(|k| report(magic, c, k, Some(idx), None))
                .collect();
            let total: f64 = reps.iter().map(|r| r.probability).sum();
            let hits = reps
                .into_iter()
                .filter(|r| r.classification != Classification::NotPhaseState)
                .collect();
            (hits, (total - 1.0).abs())
        })
        .collect();
    let max_completeness_error = per.iter().map(|p| p.1).fold(0.0, f64::max);
    let hits: Vec<ProtocolReport> = per.into_iter().flat_map(|p| p.0).collect();
    let nonclifford_hits = hits
        .iter()
        .filter(|h| h.classification == Classification::PhaseStateNonclifford)
        .count();
    Ok(TwoCopySweep {
        version: REPORT_VERSION,
        magic,
        elements: unitaries.len(),
        branches_tested: 3 * unitaries.len(),
        phase_state_hits: hits.len(),
        nonclifford_hits,
        max_completeness_error,
        hits,
    })
}

/// Whether `out` equals a phase state with the given relative phases after
/// some data-qutrit Weyl correction `X^a Z^b`.
pub fn matches_phases_up_to_pauli(out: &[Complex64], phases: [f64; 2], tol: f64) -> bool {
    for a in 0..3u8 {
        for b in 0..3u8 {
            let p = PauliLabel::from_symplectic(&[a, b]).matrix();
            let v: Vec<Complex64> = (0..3)
                .map(|i| (0..3).map(|j| p[(i, j)] * out[j]).sum())
                .collect();
            if let Ok(Some(ph)) = is_phase_state(&v, UNITARY_TOL) {
                if angle_gap(ph[0], phases[0]) <= tol && angle_gap(ph[1], phases[1]) <= tol {
                    return true;
                }
            }
        }
    }
    false
}

/// Scale `s > 0` with `E†E = s² I` within `atol` (relative), if any.
fn unitary_scale(e: &CMatrix, atol: f64) -> Option<f64> {
    let g = e.adjoint() * e;
    let s2 = g.trace().re / 3.0;
    if s2 <= 1e-14 {
        return None;
    }
    ((g / Complex64::new(s2, 0.0) - CMatrix::identity(3, 3)).norm() <= atol).then(|| s2.sqrt())
}

/// `A ∝ G` for some element `G` of the single-qutrit Clifford group, with
/// the phase-aligned distance of the normalized matrices at most `atol`.
pub fn clifford_match(a: &CMatrix, atol: f64) -> Option<usize> {
    let s = (a.adjoint() * a).trace().re / 3.0;
    if s <= 1e-14 {
        return None;
    }
    let u = a * Complex64::new(1.0 / s.sqrt(), 0.0);
    clifford_group_1q().iter().position(|g| {
        let tr: Complex64 = g.iter().zip(u.iter()).map(|(x, y)| x.conj() * y).sum();
        if tr.norm() < 1e-9 {
            return false;
        }
        let lam = tr / tr.norm();
        (&u - g * lam).norm() <= atol
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InjectionGadget {
    pub magic: MagicId,
    pub symplectic_index: usize,
    /// The branch applying the non-Clifford gate.
    pub k_star: u8,
    /// `E_{k*}` normalized to a unitary.
    pub injected: Vec<Vec<Complex64>>,
    pub success_probability: f64,
    /// For every other branch, the index of its Clifford correction in the
    /// 216-element group, or `None` for a zero branch.
    pub corrections: Vec<Option<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InjectionSweep {
    pub version: u32,
    pub magic: MagicId,
    pub elements: usize,
    /// Predicate used: `E_k ∝ G E_{k*}` with `G` in the 216-element group.
    pub correctability: String,
    pub gadgets: Vec<InjectionGadget>,
}

fn to_rows(m: &CMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Deterministic single-copy injection gadgets for `magic`.
pub fn sweep_injection(magic: MagicId, unitaries: &[CMatrix]) -> Result<InjectionSweep> {
    if !MagicId::QUTRIT.contains(&magic) {
        return Err(Error::InvalidInput(
            "injection sweeps need a qutrit magic state".into(),
        ));
    }
    let m = magic.amplitudes();
    let gadgets: Vec<InjectionGadget> = unitaries
        .par_iter()
        .enumerate()
        .filter_map(|(idx, c)| {
            let es: Vec<CMatrix> = (0..3u8)
                .map(|k| branch_operator(c, &m, k).expect("shapes").e)
                .collect();
            for (ks, e) in es.iter().enumerate() {
                let Some(scale) = unitary_scale(e, UNITARY_TOL) else {
                    continue;
                };
                let u = e * Complex64::new(1.0 / scale, 0.0);
                if clifford_match(&u, CLIFFORD_TOL).is_some() {
                    continue;
                }
                let inv = u.adjoint();
                let mut corrections = Vec::new();
                let mut ok = true;
                for (k, other) in es.iter().enumerate() {
                    if k == ks {
                        continue;
                    }
                    if other.norm() <= 1e-12 {
                        corrections.push(None);
                        continue;
                    }
                    match clifford_match(&(other * &inv), CLIFFORD_TOL) {
                        Some(g) => corrections.push(Some(g)),
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    return Some(InjectionGadget {
                        magic,
                        symplectic_index: idx,
                        k_star: ks as u8,
                        injected: to_rows(&u),
                        success_probability: scale * scale,
                        corrections,
                    });
                }
            }
            None
        })
        .collect();
    Ok(InjectionSweep {
        version: REPORT_VERSION,
        magic,
        elements: unitaries.len(),
        correctability:
            "E_k proportional to G E_k* for G in the 216-element single-qutrit Clifford group"
                .into(),
        gadgets,
    })
}

/// `diag(1, ω₉, ω₉²)`.
pub fn t3_gate() -> CMatrix {
    CMatrix::from_fn(3, 3, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, 2.0 * PI * i as f64 / 9.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Whether `u ∝ G₁ · target · G₂` for Cliffords `G₁, G₂`.
pub fn equivalent_up_to_clifford(u: &CMatrix, target: &CMatrix) -> bool {
    let tinv = target.adjoint();
    clifford_group_1q()
        .iter()
        .any(|g2| is_clifford_1q(&(u * g2.adjoint() * &tinv)))
}

/// Data register after the first data-leg Hadamard, `H|M⟩`.
pub fn hadamard_on(magic: MagicId) -> Vec<Complex64> {
    let h = gate_matrix(Gate::H(0), 1);
    let m = magic.amplitudes();
    (0..3)
        .map(|i| (0..3).map(|j| h[(i, j)] * m[j]).sum())
        .collect()
}
