//! Symplectic group over F_3 and unitary synthesis.
//!
//! Vectors are `(x_1..x_n, z_1..z_n)` and the form is
//! `⟨u, v⟩ = Σ_i (u_{x_i} v_{z_i} − u_{z_i} v_{x_i})`. A Clifford `U` maps to
//! the matrix `M` with `U W(v) U† ∝ W(M v)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

use super::gates::{gate_matrix, CMatrix, Gate, GateWord};
use super::pauli::PauliLabel;
use crate::algebra::FpMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SymplecticElement {
    pub p: u8,
    pub n: usize,
    pub m: FpMatrix,
}

pub fn form(u: &[u8], v: &[u8]) -> u8 {
    let n = u.len() / 2;
    let mut acc = 0i32;
    for i in 0..n {
        acc += u[i] as i32 * v[n + i] as i32 - u[n + i] as i32 * v[i] as i32;
    }
    acc.rem_euclid(3) as u8
}

impl SymplecticElement {
    pub fn identity(n: usize) -> Self {
        Self {
            p: 3,
            n,
            m: FpMatrix::identity(3, 2 * n),
        }
    }

    pub fn from_columns(cols: &[Vec<u8>]) -> Result<Self> {
        let n2 = cols.len();
        let vecs: Vec<_> = cols
            .iter()
            .map(|c| crate::algebra::FpVector {
                p: 3,
                entries: c.clone(),
            })
            .collect();
        let m = FpMatrix::from_columns(3, n2, &vecs)?;
        Ok(Self { p: 3, n: n2 / 2, m })
    }

    /// `Mᵀ J M = J`, checked on all basis pairs.
    pub fn is_symplectic(&self) -> bool {
        let d = 2 * self.n;
        let cols: Vec<Vec<u8>> = (0..d).map(|c| self.m.column(c).entries).collect();
        let unit = |i: usize| -> Vec<u8> { (0..d).map(|t| u8::from(t == i)).collect() };
        (0..d).all(|i| (0..d).all(|j| form(&cols[i], &cols[j]) == form(&unit(i), &unit(j))))
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            p: 3,
            n: self.n,
            m: self.m.mul(&other.m).expect("matching sizes"),
        }
    }

    pub fn apply(&self, v: &[u8]) -> Vec<u8> {
        let d = 2 * self.n;
        (0..d)
            .map(|i| {
                ((0..d)
                    .map(|j| self.m.get(i, j) as u32 * v[j] as u32)
                    .sum::<u32>()
                    % 3) as u8
            })
            .collect()
    }

    fn key(&self) -> Vec<u8> {
        let d = 2 * self.n;
        (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| self.m.get(i, j))
            .collect()
    }
}

fn all_vectors(d: usize) -> Vec<Vec<u8>> {
    (0..3usize.pow(d as u32))
        .map(|mut i| {
            let mut v = vec![0u8; d];
            for slot in v.iter_mut().rev() {
                *slot = (i % 3) as u8;
                i /= 3;
            }
            v
        })
        .collect()
}

/// All elements of Sp(2n, F_3) for `n ∈ {1, 2}`, in a fixed order: images
/// of `(e_{x1}, e_{z1}, e_{x2}, e_{z2})` chosen lexicographically as a
/// symplectic basis.
pub fn enumerate_symplectic(n: usize) -> Result<Vec<SymplecticElement>> {
    if !(n == 1 || n == 2) {
        return Err(Error::InvalidInput(format!(
            "symplectic enumeration supports n = 1, 2, got {n}"
        )));
    }
    let d = 2 * n;
    let vecs = all_vectors(d);
    let nonzero: Vec<&Vec<u8>> = vecs.iter().filter(|v| v.iter().any(|&x| x != 0)).collect();
    let mut out = Vec::new();
    let build = |imgs: &[&Vec<u8>]| -> SymplecticElement {
        // imgs = [x1, z1, x2, z2] images; column order is (x1, x2, z1, z2)
        let mut cols = vec![Vec::new(); d];
        for w in 0..n {
            cols[w] = imgs[2 * w].clone();
            cols[n + w] = imgs[2 * w + 1].clone();
        }
        SymplecticElement::from_columns(&cols).expect("square")
    };
    for a in &nonzero {
        for b in nonzero.iter().filter(|b| form(a, b) == 1) {
            if n == 1 {
                out.push(build(&[a, b]));
                continue;
            }
            for c in nonzero
                .iter()
                .filter(|c| form(a, c) == 0 && form(b, c) == 0)
            {
                for e in nonzero
                    .iter()
                    .filter(|e| form(a, e) == 0 && form(b, e) == 0 && form(c, e) == 1)
                {
                    out.push(build(&[a, b, c, e]));
                }
            }
        }
    }
    Ok(out)
}

/// `|Sp(2n, F_p)| = p^{n²} Π_{i=1}^n (p^{2i} − 1)`.
pub fn symplectic_order(p: u64, n: u32) -> u64 {
    (1..=n).fold(p.pow(n * n), |acc, i| acc * (p.pow(2 * i) - 1))
}

/// A Clifford unitary with an optional generating word.
#[derive(Clone, Debug)]
pub struct CliffordUnitary {
    pub n: usize,
    pub matrix: CMatrix,
    pub word: Option<GateWord>,
}

impl CliffordUnitary {
    pub fn from_word(word: GateWord, n: usize) -> Result<Self> {
        Ok(Self {
            n,
            matrix: word.unitary(n)?,
            word: Some(word),
        })
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let d = self.matrix.nrows();
        (self.matrix.adjoint() * &self.matrix - CMatrix::identity(d, d)).norm() <= tol
    }

    /// Image of a Weyl operator under conjugation, with its phase.
    pub fn conjugate(&self, label: &PauliLabel) -> Result<PauliLabel> {
        let img = &self.matrix * label.matrix() * self.matrix.adjoint();
        identify_weyl(&img, self.n)
            .ok_or_else(|| Error::Synthesis("conjugate is not a Weyl operator".into()))
    }

    /// Symplectic matrix of the conjugation action.
    pub fn symplectic(&self) -> Result<SymplecticElement> {
        symplectic_of(&self.matrix, self.n)
    }
}

fn weyl_table(n: usize) -> &'static [(Vec<u8>, CMatrix)] {
    static W1: OnceLock<Vec<(Vec<u8>, CMatrix)>> = OnceLock::new();
    static W2: OnceLock<Vec<(Vec<u8>, CMatrix)>> = OnceLock::new();
    let build = move || {
        all_vectors(2 * n)
            .into_iter()
            .map(|v| {
                let m = PauliLabel::from_symplectic(&v).matrix();
                (v, m)
            })
            .collect()
    };
    match n {
        1 => W1.get_or_init(build),
        2 => W2.get_or_init(build),
        _ => panic!("Weyl tables exist for n = 1, 2"),
    }
}

/// `λ W(v)` with `λ` a cube root of unity, if `a` has that form.
pub fn identify_weyl(a: &CMatrix, n: usize) -> Option<PauliLabel> {
    let d = 3usize.pow(n as u32) as f64;
    for (v, w) in weyl_table(n) {
        // tr(W† A)
        let tr: Complex64 = w.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
        if (tr.norm() - d).abs() < 1e-8 {
            let lam = tr / d;
            let e = (lam.arg() / (2.0 * std::f64::consts::PI / 3.0))
                .round()
                .rem_euclid(3.0) as u8;
            let mut l = PauliLabel::from_symplectic(v);
            l.phase = e;
            return ((a - l.matrix()).norm() < 1e-8).then_some(l);
        }
    }
    None
}

/// Symplectic action of a Clifford unitary, read off numerically.
pub fn symplectic_of(u: &CMatrix, n: usize) -> Result<SymplecticElement> {
    let d = 2 * n;
    let mut cols = Vec::with_capacity(d);
    for j in 0..d {
        let e: Vec<u8> = (0..d).map(|t| u8::from(t == j)).collect();
        let p = PauliLabel::from_symplectic(&e).matrix();
        let img = u * p * u.adjoint();
        let l = identify_weyl(&img, n)
            .ok_or_else(|| Error::Synthesis("not a Clifford unitary".into()))?;
        cols.push(l.symplectic());
    }
    let s = SymplecticElement::from_columns(&cols)?;
    debug_assert!(s.is_symplectic());
    Ok(s)
}

pub fn generators(n: usize) -> Vec<Gate> {
    match n {
        1 => vec![Gate::H(0), Gate::S(0)],
        _ => vec![
            Gate::H(0),
            Gate::H(1),
            Gate::S(0),
            Gate::S(1),
            Gate::Sum(0, 1),
        ],
    }
}

/// Breadth-first table of Sp(2n, F_3) over the generator images: every
/// element gets a shortest word in `{H_i, S_i, SUM}`.
pub struct SynthesisTable {
    pub n: usize,
    index: HashMap<Vec<u8>, usize>,
    parent: Vec<(usize, usize)>,
    gens: Vec<Gate>,
}

impl SynthesisTable {
    fn build(n: usize) -> Self {
        let gens = generators(n);
        let images: Vec<SymplecticElement> = gens
            .iter()
            .map(|&g| symplectic_of(&gate_matrix(g, n), n).expect("generator is Clifford"))
            .collect();
        let id = SymplecticElement::identity(n);
        let mut index = HashMap::new();
        let mut parent = vec![(usize::MAX, usize::MAX)];
        let mut elems = vec![id.clone()];
        index.insert(id.key(), 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(cur) = queue.pop_front() {
            for (gi, img) in images.iter().enumerate() {
                let next = img.compose(&elems[cur]);
                let key = next.key();
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(key) {
                    e.insert(elems.len());
                    parent.push((cur, gi));
                    elems.push(next);
                    queue.push_back(elems.len() - 1);
                }
            }
        }
        Self {
            n,
            index,
            parent,
            gens,
        }
    }

    pub fn get(n: usize) -> &'static SynthesisTable {
        static T1: OnceLock<SynthesisTable> = OnceLock::new();
        static T2: OnceLock<SynthesisTable> = OnceLock::new();
        match n {
            1 => T1.get_or_init(|| Self::build(1)),
            2 => T2.get_or_init(|| Self::build(2)),
            _ => panic!("synthesis tables exist for n = 1, 2"),
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    fn word_of_id(&self, mut id: usize) -> GateWord {
        let mut rev = Vec::new();
        while id != 0 {
            let (p, g) = self.parent[id];
            rev.push(self.gens[g]);
            id = p;
        }
        rev.reverse();
        GateWord(rev)
    }

    /// Shortest generator word realizing `m`.
    pub fn word(&self, m: &SymplecticElement) -> Option<GateWord> {
        self.index.get(&m.key()).map(|&id| self.word_of_id(id))
    }

    /// Unitaries for every listed element, built incrementally along the
    /// breadth-first tree.
    pub fn unitaries(&self, elems: &[SymplecticElement]) -> Vec<CMatrix> {
        let d = 3usize.pow(self.n as u32);
        let gm: Vec<CMatrix> = self.gens.iter().map(|&g| gate_matrix(g, self.n)).collect();
        let mut by_id: Vec<CMatrix> = Vec::with_capacity(self.len());
        by_id.push(DMatrix::identity(d, d));
        for id in 1..self.len() {
            let (p, g) = self.parent[id];
            let u = &gm[g] * &by_id[p];
            by_id.push(u);
        }
        elems
            .iter()
            .map(|m| by_id[self.index[&m.key()]].clone())
            .collect()
    }
}

/// A unitary realizing `m`, verified on all Weyl generators.
pub fn synthesize(m: &SymplecticElement) -> Result<CliffordUnitary> {
    if !m.is_symplectic() {
        return Err(Error::InvalidInput("matrix is not symplectic".into()));
    }
    let table = SynthesisTable::get(m.n);
    let word = table
        .word(m)
        .ok_or_else(|| Error::Synthesis("element not reached by generators".into()))?;
    let u = CliffordUnitary::from_word(word, m.n)?;
    if u.symplectic()? != *m {
        return Err(Error::Synthesis(
            "synthesized unitary realizes a different action".into(),
        ));
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::gates::single_qutrit;

    #[test]
    fn orders() {
        assert_eq!(symplectic_order(3, 1), 24);
        assert_eq!(symplectic_order(3, 2), 51_840);
        let sp2 = enumerate_symplectic(1).unwrap();
        assert_eq!(sp2.len(), 24);
        assert!(sp2.iter().all(|m| m.is_symplectic()));
    }

    #[test]
    fn sp4_enumeration() {
        let all = enumerate_symplectic(2).unwrap();
        assert_eq!(all.len(), 51_840);
        assert!(all.iter().all(|m| m.is_symplectic()));
        let distinct: std::collections::HashSet<_> = all.iter().map(|m| m.key()).collect();
        assert_eq!(distinct.len(), 51_840);
        assert_eq!(SynthesisTable::get(2).len(), 51_840);
    }

    #[test]
    fn hadamard_action() {
        // H maps X to Z and Z to X^{-1}
        let h = symplectic_of(&single_qutrit(Gate::H(0)), 1).unwrap();
        assert_eq!(h.apply(&[1, 0]), vec![0, 1]);
        assert_eq!(h.apply(&[0, 1]), vec![2, 0]);
        let u = synthesize(&h).unwrap();
        let f = single_qutrit(Gate::H(0));
        // equal up to a global phase
        let ratio = u.matrix[(0, 0)] / f[(0, 0)];
        assert!((&u.matrix - &f * ratio).norm() < 1e-10);
    }

    #[test]
    fn sum_synthesis() {
        let s = symplectic_of(&gate_matrix(Gate::Sum(0, 1), 2), 2).unwrap();
        let u = synthesize(&s).unwrap();
        assert_eq!(u.symplectic().unwrap(), s);
        assert!(u.is_unitary(1e-12));
        let id = synthesize(&SymplecticElement::identity(2)).unwrap();
        assert!((id.matrix - CMatrix::identity(9, 9)).norm() < 1e-12);
    }

    #[test]
    fn synthesis_is_projective_homomorphism() {
        use rand::{Rng, SeedableRng};
        let all = enumerate_symplectic(2).unwrap();
        let weyl: Vec<CMatrix> = (0..81u8)
            .map(|i| PauliLabel::from_symplectic(&[i % 3, i / 3 % 3, i / 9 % 3, i / 27]).matrix())
            .collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let a = &all[rng.random_range(0..all.len())];
            let b = &all[rng.random_range(0..all.len())];
            let uab = synthesize(&a.compose(b)).unwrap().matrix;
            let prod = synthesize(a).unwrap().matrix * synthesize(b).unwrap().matrix;
            // uab (ua ub)^† must be a Weyl operator times a global phase
            let q = &uab * prod.adjoint();
            let ok = weyl.iter().any(|w| {
                let lam = w
                    .iter()
                    .zip(q.iter())
                    .map(|(x, y)| x.conj() * y)
                    .sum::<Complex64>()
                    / 9.0;
                (lam.norm() - 1.0).abs() < 1e-10 && (&q - w * lam).norm() < 1e-10
            });
            assert!(ok);
        }
    }
}
