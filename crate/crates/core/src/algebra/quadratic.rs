use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A polynomial of degree at most two on F_p^k, used as a phase function.
///
/// Coefficients are stored per monomial: `a[i*k + j]` (for `i <= j`) is the
/// coefficient of `y_i y_j`, `b[i]` the coefficient of `y_i`, `c` the
/// constant. Entries below the diagonal are always zero.
///
/// For odd `p` the phase is `ω_p^{Q(y)}` with every coefficient in F_p.
/// For `p = 2` the phase is `i^{Q(y)}` with `Q` valued in Z_4: `b` and `c`
/// live in Z_4, the diagonal of `a` is zero (`y_i² = y_i` is absorbed into
/// `b`) and each cross term contributes `2 a_ij y_i y_j`, so `a_ij ∈ F_2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub p: u8,
    pub k: usize,
    pub a: Vec<u8>,
    pub b: Vec<u8>,
    pub c: u8,
}

impl QuadraticForm {
    pub fn zero(p: u8, k: usize) -> Self {
        Self {
            p,
            k,
            a: vec![0; k * k],
            b: vec![0; k],
            c: 0,
        }
    }

    /// Build from a list of `(i, j, coeff)` monomials with `i <= j`, plus the
    /// linear part. For `p = 2`, `quad` lists cross terms only.
    pub fn new(p: u8, k: usize, quad: &[(usize, usize, u8)], b: &[u8], c: u8) -> Result<Self> {
        if b.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "linear part has length {}, expected {k}",
                b.len()
            )));
        }
        let mut q = Self::zero(p, k);
        for &(i, j, v) in quad {
            let (i, j) = if i <= j { (i, j) } else { (j, i) };
            if j >= k {
                return Err(Error::DimensionMismatch(format!(
                    "monomial y{i}y{j} outside arity {k}"
                )));
            }
            if p == 2 && i == j {
                return Err(Error::InvalidInput(
                    "qubit forms carry no diagonal quadratic terms".into(),
                ));
            }
            let idx = i * k + j;
            q.a[idx] = (q.a[idx] + v) % p;
        }
        q.b = b.to_vec();
        q.c = c;
        q.validate()?;
        Ok(q)
    }

    /// Order of the root of unity the phase is a power of.
    pub fn phase_order(&self) -> u8 {
        phase_order(self.p)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.k;
        let lin = self.phase_order();
        if self.a.len() != k * k || self.b.len() != k {
            return Err(Error::DimensionMismatch("quadratic form storage".into()));
        }
        for i in 0..k {
            for j in 0..k {
                let v = self.a[i * k + j];
                let bad = v >= self.p || (j < i && v != 0) || (self.p == 2 && i == j && v != 0);
                if bad {
                    return Err(Error::InvalidInput(format!(
                        "bad quadratic coefficient at ({i},{j})"
                    )));
                }
            }
        }
        if self.b.iter().any(|&v| v >= lin) || self.c >= lin {
            return Err(Error::InvalidInput(
                "linear or constant coefficient out of range".into(),
            ));
        }
        Ok(())
    }

    pub fn quad(&self, i: usize, j: usize) -> u8 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.a[i * self.k + j]
    }

    /// Symmetric matrix `A` with `Q(y) = yᵀAy + bᵀy + c` (odd `p` only).
    pub fn symmetric(&self) -> Option<Vec<Vec<u8>>> {
        if self.p == 2 {
            return None;
        }
        let p = self.p as u16;
        let half = (p as u8).div_ceil(2);
        let mut out = vec![vec![0u8; self.k]; self.k];
        for i in 0..self.k {
            out[i][i] = self.quad(i, i);
            for j in i + 1..self.k {
                let v = (self.quad(i, j) as u16 * half as u16 % p) as u8;
                out[i][j] = v;
                out[j][i] = v;
            }
        }
        Some(out)
    }

    /// Phase exponent `Q(y)` modulo `phase_order()`.
    pub fn eval(&self, y: &[u8]) -> u8 {
        let k = self.k;
        let m = self.phase_order() as u32;
        let mut acc = self.c as u32;
        if self.p == 2 {
            for i in 0..k {
                if y[i] == 0 {
                    continue;
                }
                acc += self.b[i] as u32;
                for j in i + 1..k {
                    acc += 2 * (self.a[i * k + j] as u32) * y[j] as u32;
                }
            }
        } else {
            for i in 0..k {
                let yi = y[i] as u32;
                if yi == 0 {
                    continue;
                }
                let mut row = 0u32;
                for j in i..k {
                    row += self.a[i * k + j] as u32 * y[j] as u32;
                }
                acc += yi * (row + self.b[i] as u32);
            }
        }
        (acc % m) as u8
    }

    /// Number of constant-free forms of arity `k`.
    pub fn count(p: u8, k: usize) -> u64 {
        let (quad, lin) = form_radices(p, k);
        quad.iter().chain(lin.iter()).map(|&r| r as u64).product()
    }

    /// The `index`-th constant-free form in lexicographic coefficient order
    /// (quadratic monomials row-major first, then linear terms).
    pub fn from_index(p: u8, k: usize, mut index: u64) -> Self {
        let (quad, lin) = form_radices(p, k);
        let mut q = Self::zero(p, k);
        for (pos, &r) in lin.iter().enumerate().rev() {
            q.b[pos] = (index % r as u64) as u8;
            index /= r as u64;
        }
        let slots = quad_slots(p, k);
        for (pos, &r) in quad.iter().enumerate().rev() {
            let (i, j) = slots[pos];
            q.a[i * k + j] = (index % r as u64) as u8;
            index /= r as u64;
        }
        q
    }

    /// Inverse of [`from_index`](Self::from_index) for constant-free forms.
    pub fn index(&self) -> u64 {
        let (quad, lin) = form_radices(self.p, self.k);
        let slots = quad_slots(self.p, self.k);
        let mut idx = 0u64;
        for (pos, &r) in quad.iter().enumerate() {
            let (i, j) = slots[pos];
            idx = idx * r as u64 + self.a[i * self.k + j] as u64;
        }
        for (pos, &r) in lin.iter().enumerate() {
            idx = idx * r as u64 + self.b[pos] as u64;
        }
        idx
    }
}

pub fn phase_order(p: u8) -> u8 {
    if p == 2 {
        4
    } else {
        p
    }
}

fn quad_slots(p: u8, k: usize) -> Vec<(usize, usize)> {
    let start = usize::from(p == 2);
    (0..k)
        .flat_map(|i| (i + start..k).map(move |j| (i, j)))
        .collect()
}

fn form_radices(p: u8, k: usize) -> (Vec<u8>, Vec<u8>) {
    let quad = vec![p; quad_slots(p, k).len()];
    let lin = vec![phase_order(p); k];
    (quad, lin)
}
