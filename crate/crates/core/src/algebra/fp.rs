//! Dense vectors and matrices over a small prime field F_p.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Reduce an integer into `[0, p)`.
#[inline]
pub fn reduce(value: i64, p: u8) -> u8 {
    value.rem_euclid(p as i64) as u8
}

#[inline]
pub fn inv_mod(a: u8, p: u8) -> Option<u8> {
    let a = a % p;
    if a == 0 {
        return None;
    }
    (1..p).find(|&b| (a as u16 * b as u16) % p as u16 == 1)
}

/// A vector over F_p stored as residues.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FpVector {
    pub p: u8,
    pub entries: Vec<u8>,
}

impl FpVector {
    pub fn new(p: u8, entries: Vec<u8>) -> Result<Self> {
        check_prime(p)?;
        if let Some(&bad) = entries.iter().find(|&&e| e >= p) {
            return Err(Error::InvalidInput(format!(
                "entry {bad} not reduced mod {p}"
            )));
        }
        Ok(Self { p, entries })
    }

    pub fn zeros(p: u8, len: usize) -> Self {
        Self {
            p,
            entries: vec![0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    /// Index of the vector in the base-p expansion with entry 0 as the most
    /// significant digit, i.e. the computational-basis index of `|x_0 x_1 ...>`.
    pub fn basis_index(&self) -> usize {
        self.entries
            .iter()
            .fold(0usize, |acc, &e| acc * self.p as usize + e as usize)
    }

    pub fn from_basis_index(p: u8, len: usize, mut index: usize) -> Self {
        let mut entries = vec![0u8; len];
        for slot in entries.iter_mut().rev() {
            *slot = (index % p as usize) as u8;
            index /= p as usize;
        }
        Self { p, entries }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        let p = self.p;
        Self {
            p,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| (a + b) % p)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        let p = self.p;
        Self {
            p,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| (a + p - b) % p)
                .collect(),
        }
    }

    pub fn scale(&self, s: u8) -> Self {
        let p = self.p as u16;
        Self {
            p: self.p,
            entries: self
                .entries
                .iter()
                .map(|&a| ((a as u16 * s as u16) % p) as u8)
                .collect(),
        }
    }

    pub fn dot(&self, other: &Self) -> u8 {
        let p = self.p as u32;
        (self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| a as u32 * b as u32)
            .sum::<u32>()
            % p) as u8
    }
}

impl fmt::Display for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// A dense row-major matrix over F_p.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpMatrix {
    pub p: u8,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

fn check_prime(p: u8) -> Result<()> {
    match p {
        2 | 3 | 5 | 7 | 11 | 13 => Ok(()),
        _ => Err(Error::InvalidInput(format!("unsupported modulus {p}"))),
    }
}

impl FpMatrix {
    pub fn zeros(p: u8, rows: usize, cols: usize) -> Self {
        Self {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u8, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(p: u8, rows: &[Vec<u8>]) -> Result<Self> {
        check_prime(p)?;
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(p, r, c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::DimensionMismatch(format!("ragged row {i}")));
            }
            for (j, &v) in row.iter().enumerate() {
                if v >= p {
                    return Err(Error::InvalidInput(format!(
                        "entry {v} not reduced mod {p}"
                    )));
                }
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    /// Build an `n x k` matrix from its columns.
    pub fn from_columns(p: u8, n: usize, columns: &[FpVector]) -> Result<Self> {
        let mut m = Self::zeros(p, n, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "column {j} has length {}",
                    col.len()
                )));
            }
            for i in 0..n {
                m.set(i, j, col.entries[i] % p);
            }
        }
        Ok(m)
    }

    /// The `n x k` matrix whose columns are the standard basis vectors `e_i`.
    pub fn unit_columns(p: u8, n: usize, indices: &[usize]) -> Self {
        let mut m = Self::zeros(p, n, indices.len());
        for (j, &i) in indices.iter().enumerate() {
            m.set(i, j, 1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.data[r * self.cols + c] = v % self.p;
    }

    pub fn column(&self, c: usize) -> FpVector {
        FpVector {
            p: self.p,
            entries: (0..self.rows).map(|r| self.get(r, c)).collect(),
        }
    }

    pub fn row(&self, r: usize) -> Vec<u8> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.p, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.p as u32;
        let mut out = Self::zeros(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let s: u32 = (0..self.cols)
                    .map(|k| self.get(i, k) as u32 * other.get(k, j) as u32)
                    .sum();
                out.data[i * other.cols + j] = (s % p) as u8;
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &FpVector) -> Result<FpVector> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let p = self.p as u32;
        let entries = (0..self.rows)
            .map(|i| {
                ((0..self.cols)
                    .map(|k| self.get(i, k) as u32 * v.entries[k] as u32)
                    .sum::<u32>()
                    % p) as u8
            })
            .collect();
        Ok(FpVector { p: self.p, entries })
    }

    /// Row-reduced echelon form of the matrix, together with the pivot columns.
    pub fn rref_rows(&self) -> (Self, Vec<usize>) {
        let p = self.p;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..m.cols {
                    m.data.swap(pr * m.cols + j, r * m.cols + j);
                }
            }
            let inv = inv_mod(m.get(r, c), p).expect("nonzero pivot");
            for j in 0..m.cols {
                let v = (m.get(r, j) as u16 * inv as u16 % p as u16) as u8;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                let f = m.get(i, c);
                if i != r && f != 0 {
                    for j in 0..m.cols {
                        let v =
                            (m.get(i, j) as u16 + (p - f) as u16 * m.get(r, j) as u16) % p as u16;
                        m.set(i, j, v as u8);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref_rows().1.len()
    }

    /// Column-reduced echelon form spanning the same column space.
    ///
    /// Returns an `n x rank` matrix: each column has a leading 1 in its pivot
    /// row (topmost nonzero entry), pivots strictly increase left to right, and
    /// every pivot row is zero outside its own column.
    pub fn rref_columns(&self) -> (Self, usize) {
        let (reduced, pivots) = self.transpose().rref_rows();
        let rank = pivots.len();
        let mut out = Self::zeros(self.p, self.rows, rank);
        for j in 0..rank {
            for i in 0..self.rows {
                out.set(i, j, reduced.get(j, i));
            }
        }
        (out, rank)
    }

    /// Rows holding the leading entries of a column-echelon matrix.
    pub fn column_pivots(&self) -> Vec<usize> {
        (0..self.cols)
            .filter_map(|c| (0..self.rows).find(|&r| self.get(r, c) != 0))
            .collect()
    }

    /// Whether `v` lies in the column space of the matrix.
    pub fn column_space_contains(&self, v: &FpVector) -> bool {
        let mut cols: Vec<FpVector> = (0..self.cols).map(|c| self.column(c)).collect();
        let base = self.rank();
        cols.push(v.clone());
        FpMatrix::from_columns(self.p, self.rows, &cols)
            .map(|m| m.rank() == base)
            .unwrap_or(false)
    }

    /// Solve `self * y = v` for a full-column-rank matrix; `None` if `v` is
    /// outside the column space.
    pub fn solve_columns(&self, v: &FpVector) -> Option<FpVector> {
        let p = self.p;
        // Augment and row-reduce [A | v].
        let mut aug = Self::zeros(p, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, v.entries[i]);
        }
        let (red, pivots) = aug.rref_rows();
        if pivots.contains(&self.cols) || pivots.len() < self.cols {
            return None;
        }
        let mut y = vec![0u8; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            y[c] = red.get(r, self.cols);
        }
        Some(FpVector { p, entries: y })
    }
}

impl Serialize for FpMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl fmt::Display for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            writeln!(f, "{:?}", self.row(r))?;
        }
        Ok(())
    }
}
