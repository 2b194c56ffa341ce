//! The single-qutrit Clifford group and projective orbits.

use num_complex::Complex64;
use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

use super::gates::{single_qutrit, CMatrix, Gate};

/// Grid spacing for numeric projective keys.
pub const KEY_GRID: f64 = 1e-8;

/// Phase-normalized rounded key of a vector or matrix: the first entry with
/// modulus above `1e-6` is rotated to the positive real axis.
pub fn projective_key<'a>(entries: impl IntoIterator<Item = &'a Complex64> + Clone) -> Vec<i64> {
    let lead = entries
        .clone()
        .into_iter()
        .find(|z| z.norm() > 1e-6)
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    let rot = lead.conj() / lead.norm();
    entries
        .into_iter()
        .flat_map(|z| {
            let w = z * rot;
            [
                (w.re / KEY_GRID).round() as i64,
                (w.im / KEY_GRID).round() as i64,
            ]
        })
        .collect()
}

/// The 216 projective elements of the single-qutrit Clifford group,
/// closure of `{X, Z, S, H}` in breadth-first order from the identity.
pub fn clifford_group_1q() -> &'static [CMatrix] {
    static G: OnceLock<Vec<CMatrix>> = OnceLock::new();
    G.get_or_init(|| {
        let gens: Vec<CMatrix> = [Gate::X(0), Gate::Z(0), Gate::S(0), Gate::H(0)]
            .into_iter()
            .map(single_qutrit)
            .collect();
        let id = CMatrix::identity(3, 3);
        let mut seen = HashMap::new();
        seen.insert(projective_key(id.iter()), 0usize);
        let mut out = vec![id];
        let mut queue = VecDeque::from([0usize]);
        while let Some(cur) = queue.pop_front() {
            for g in &gens {
                let next = g * &out[cur];
                let key = projective_key(next.iter());
                if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(key) {
                    e.insert(out.len());
                    queue.push_back(out.len());
                    out.push(next);
                }
            }
        }
        out
    })
}

/// Keys of the 216 group elements, for membership tests.
pub fn clifford_group_keys() -> &'static HashMap<Vec<i64>, usize> {
    static K: OnceLock<HashMap<Vec<i64>, usize>> = OnceLock::new();
    K.get_or_init(|| {
        clifford_group_1q()
            .iter()
            .enumerate()
            .map(|(i, g)| (projective_key(g.iter()), i))
            .collect()
    })
}

/// Whether a 3×3 matrix is proportional to a single-qutrit Clifford.
pub fn is_clifford_1q(m: &CMatrix) -> bool {
    let scale = (m.adjoint() * m).trace().re / 3.0;
    if scale <= 1e-12 {
        return false;
    }
    let u = m * Complex64::new(1.0 / scale.sqrt(), 0.0);
    clifford_group_keys().contains_key(&projective_key(u.iter()))
}

#[derive(Clone, Debug)]
pub struct Orbit {
    pub elements: Vec<Vec<Complex64>>,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Projective orbit of `start` under the group generated by `gens`.
pub fn orbit_closure(start: &[Complex64], gens: &[CMatrix]) -> Orbit {
    let mut seen = std::collections::HashSet::new();
    seen.insert(projective_key(start.iter()));
    let mut elements = vec![start.to_vec()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(cur) = queue.pop_front() {
        for g in gens {
            let v = g * nalgebra::DVector::from_column_slice(&elements[cur]);
            let v: Vec<Complex64> = v.iter().copied().collect();
            if seen.insert(projective_key(v.iter())) {
                queue.push_back(elements.len());
                elements.push(v);
            }
        }
    }
    Orbit { elements }
}

/// Order of the subgroup of the 216-element group fixing `v` projectively.
pub fn stabilizer_order(v: &[Complex64]) -> usize {
    let key = projective_key(v.iter());
    let x = nalgebra::DVector::from_column_slice(v);
    clifford_group_1q()
        .iter()
        .filter(|g| {
            let y = *g * &x;
            projective_key(y.iter()) == key
        })
        .count()
}

/// The standard generators `{X, Z, S, H}` as matrices.
pub fn standard_generators() -> Vec<CMatrix> {
    [Gate::X(0), Gate::Z(0), Gate::S(0), Gate::H(0)]
        .into_iter()
        .map(single_qutrit)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stabilizer::{CatalogMode, MagicId, StabilizerCatalog};
    use rand::{Rng, SeedableRng};

    #[test]
    fn group_has_216_elements() {
        let g = clifford_group_1q();
        assert_eq!(g.len(), 216);
        assert!((&g[0] - CMatrix::identity(3, 3)).norm() < 1e-15);
    }

    #[test]
    fn closed_under_inverse() {
        let g = clifford_group_1q();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let m = &g[rng.random_range(0..g.len())];
            assert!(is_clifford_1q(&m.adjoint()));
        }
    }

    #[test]
    fn strange_orbit() {
        let s = MagicId::S.amplitudes();
        let orbit = orbit_closure(&s, &standard_generators());
        assert_eq!(orbit.len(), 9);
        assert_eq!(stabilizer_order(&s), 24);
    }

    #[test]
    fn zero_orbit_is_the_stabilizer_catalog() {
        let zero = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let orbit = orbit_closure(&zero, &standard_generators());
        assert_eq!(orbit.len(), 12);
        let cat = StabilizerCatalog::build(3, 1, CatalogMode::Raw).unwrap();
        let keys: std::collections::HashSet<_> = orbit
            .elements
            .iter()
            .map(|v| projective_key(v.iter()))
            .collect();
        for i in 0..cat.len() {
            let v = cat.get(i).state_vector_complex();
            assert!(keys.contains(&projective_key(v.iter())));
        }
    }

    #[test]
    fn strange_orbit_elements_have_the_two_level_form() {
        // every element is (|a⟩ − ω^c |b⟩)/√2 up to a global phase, a ≠ b
        let orbit = orbit_closure(&MagicId::S.amplitudes(), &standard_generators());
        let w = |c: u32| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * c as f64 / 3.0);
        let mut forms = std::collections::HashSet::new();
        for v in &orbit.elements {
            let mut hit = None;
            for a in 0..3usize {
                for b in (0..3).filter(|&b| b != a) {
                    for c in 0..3u32 {
                        let mut phi = [Complex64::new(0.0, 0.0); 3];
                        phi[a] = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
                        phi[b] = -w(c) / 2f64.sqrt();
                        let ov: Complex64 = phi.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
                        if (ov.norm() - 1.0).abs() < 1e-10 && hit.is_none() {
                            hit = Some((a.min(b), a.max(b)));
                        }
                    }
                }
            }
            forms.insert(hit.expect("element of the form (|a> - w^c |b>)/sqrt2"));
        }
        assert_eq!(forms.len(), 3);
    }
}
