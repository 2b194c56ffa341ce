//! Indexed catalogs of all n-qudit stabilizer states.
//!
//! Entries are never materialized up front: the catalog is a list of blocks,
//! one per column-echelon `W`, and an index is decoded into
//! `(W, x0, Q)` by mixed-radix arithmetic. Order is lexicographic in
//! `(k, pivot set, free entries of W, x0, Q coefficients)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::HashSet;
use std::io::{BufRead, Write};
use std::sync::OnceLock;

use super::{phase_table, CanonicalStabilizer};
use crate::algebra::quadratic::phase_order;
use crate::algebra::{FpMatrix, FpVector, QuadraticForm};
use crate::error::{Error, Result};

pub const CATALOG_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CatalogMode {
    Raw,
    Dedupe,
}

impl std::str::FromStr for CatalogMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Self::Raw),
            "dedupe" => Ok(Self::Dedupe),
            _ => Err(Error::InvalidInput(format!("unknown catalog mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
struct Block {
    k: usize,
    w: FpMatrix,
    /// rows of x0 that are free (non-pivot)
    free_rows: Vec<usize>,
    forms: u64,
    start: u64,
    count: u64,
}

#[derive(Debug)]
enum Storage {
    Virtual {
        blocks: Vec<Block>,
        keep: Option<Vec<u64>>,
    },
    Explicit(Vec<CanonicalStabilizer>),
}

#[derive(Debug)]
pub struct StabilizerCatalog {
    pub p: u8,
    pub n: usize,
    pub mode: CatalogMode,
    storage: Storage,
    len: u64,
    hash: OnceLock<String>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    version: u32,
    p: u8,
    n: usize,
    mode: CatalogMode,
    count: u64,
    hash: String,
}

/// Column-echelon matrices of rank `k` in catalog order.
fn echelon_matrices(p: u8, n: usize, k: usize) -> Vec<FpMatrix> {
    let mut out = Vec::new();
    for pivots in k_subsets(n, k) {
        // free slots: (row, col) with row below the column's pivot and not a pivot row
        let slots: Vec<(usize, usize)> = (0..k)
            .flat_map(|c| {
                let pv = pivots.clone();
                ((pivots[c] + 1)..n)
                    .filter(move |r| !pv.contains(r))
                    .map(move |r| (r, c))
            })
            .collect();
        let total = (p as u64).pow(slots.len() as u32);
        for idx in 0..total {
            let mut m = FpMatrix::zeros(p, n, k);
            for (c, &r) in pivots.iter().enumerate() {
                m.set(r, c, 1);
            }
            let mut t = idx;
            for &(r, c) in slots.iter().rev() {
                m.set(r, c, (t % p as u64) as u8);
                t /= p as u64;
            }
            out.push(m);
        }
    }
    out
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Exact projective key: support mask plus phase exponents relative to the
/// first support point, two bits per point.
type DedupeKey = (u128, [u64; 3]);

fn dedupe_key(s: &CanonicalStabilizer) -> DedupeKey {
    let mut pts: Vec<(usize, u8)> = Vec::with_capacity(s.support_size());
    s.for_each_point(|idx, e| pts.push((idx, e)));
    pts.sort_unstable();
    let ord = phase_order(s.p);
    let base = pts[0].1;
    let mut mask = 0u128;
    let mut exps = [0u64; 3];
    for (slot, &(idx, e)) in pts.iter().enumerate() {
        mask |= 1u128 << idx;
        let rel = ((e + ord - base) % ord) as u64;
        exps[slot / 32] |= rel << (2 * (slot % 32));
    }
    (mask, exps)
}

impl StabilizerCatalog {
    /// Build the catalog of all `n`-qudit stabilizer states.
    pub fn build(p: u8, n: usize, mode: CatalogMode) -> Result<Self> {
        if !(p == 2 || p == 3) || n == 0 || (p as usize).pow(n as u32) > 128 {
            return Err(Error::InvalidInput(format!(
                "catalogs support p in {{2,3}} with p^n <= 128, got p={p}, n={n}"
            )));
        }
        let mut blocks = Vec::new();
        let mut start = 0u64;
        for k in 0..=n {
            let forms = QuadraticForm::count(p, k);
            for w in echelon_matrices(p, n, k) {
                let pivots = w.column_pivots();
                let free_rows: Vec<usize> = (0..n).filter(|r| !pivots.contains(r)).collect();
                let count = (p as u64).pow(free_rows.len() as u32) * forms;
                blocks.push(Block {
                    k,
                    w,
                    free_rows,
                    forms,
                    start,
                    count,
                });
                start += count;
            }
        }
        let mut cat = Self {
            p,
            n,
            mode,
            storage: Storage::Virtual { blocks, keep: None },
            len: start,
            hash: OnceLock::new(),
        };
        if mode == CatalogMode::Dedupe {
            let mut seen: HashSet<DedupeKey> = HashSet::with_capacity(start as usize);
            let mut keep = Vec::new();
            let mut dropped = false;
            for i in 0..start {
                if seen.insert(dedupe_key(&cat.get(i))) {
                    keep.push(i);
                } else {
                    dropped = true;
                }
            }
            if dropped {
                cat.len = keep.len() as u64;
                if let Storage::Virtual { keep: slot, .. } = &mut cat.storage {
                    *slot = Some(keep);
                }
            }
        }
        Ok(cat)
    }

    /// A catalog over an explicit list of states, all on the same register.
    pub fn from_states(states: Vec<CanonicalStabilizer>, mode: CatalogMode) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::InvalidInput("empty catalog".into()))?;
        let (p, n) = (first.p, first.n);
        if states.iter().any(|s| s.p != p || s.n != n) {
            return Err(Error::DimensionMismatch(
                "catalog states must share (p, n)".into(),
            ));
        }
        Ok(Self {
            p,
            n,
            mode,
            len: states.len() as u64,
            storage: Storage::Explicit(states),
            hash: OnceLock::new(),
        })
    }

    /// Distinct projective stabilizer states: `p^n Π_{j=1}^n (p^j + 1)`.
    pub fn expected_count(p: u8, n: usize) -> u64 {
        let p = p as u64;
        (1..=n as u32).fold(p.pow(n as u32), |acc, j| acc * (p.pow(j) + 1))
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dim(&self) -> usize {
        (self.p as usize).pow(self.n as u32)
    }

    fn raw_index(&self, i: u64) -> u64 {
        match &self.storage {
            Storage::Virtual {
                keep: Some(keep), ..
            } => keep[i as usize],
            _ => i,
        }
    }

    /// The `i`-th state. Panics if `i >= len()`.
    pub fn get(&self, i: u64) -> CanonicalStabilizer {
        assert!(i < self.len, "catalog index {i} out of range");
        let blocks = match &self.storage {
            Storage::Explicit(states) => return states[i as usize].clone(),
            Storage::Virtual { blocks, .. } => blocks,
        };
        let raw = self.raw_index(i);
        let b = &blocks[blocks.partition_point(|b| b.start + b.count <= raw)];
        let local = raw - b.start;
        let (coset, form) = (local / b.forms, local % b.forms);
        let p = self.p;
        let mut x0 = vec![0u8; self.n];
        let mut t = coset;
        for &r in b.free_rows.iter().rev() {
            x0[r] = (t % p as u64) as u8;
            t /= p as u64;
        }
        CanonicalStabilizer {
            p,
            n: self.n,
            k: b.k,
            x0: FpVector { p, entries: x0 },
            w: b.w.clone(),
            q: QuadraticForm::from_index(p, b.k, form),
        }
    }

    /// Index of the catalog entry projectively equal to `s`, if present.
    pub fn index_of(&self, s: &CanonicalStabilizer) -> Result<Option<u64>> {
        if s.p != self.p || s.n != self.n {
            return Err(Error::DimensionMismatch(
                "state register differs from the catalog".into(),
            ));
        }
        let (c, _) = s.canonicalize()?;
        match &self.storage {
            Storage::Explicit(states) => {
                let key = dedupe_key(&c);
                Ok(states
                    .iter()
                    .position(|t| dedupe_key(t) == key)
                    .map(|i| i as u64))
            }
            Storage::Virtual { blocks, keep } => {
                let Some(b) = blocks.iter().find(|b| b.k == c.k && b.w == c.w) else {
                    return Ok(None);
                };
                let coset = b
                    .free_rows
                    .iter()
                    .fold(0u64, |acc, &r| acc * self.p as u64 + c.x0.entries[r] as u64);
                let raw = b.start + coset * b.forms + c.q.index();
                Ok(match keep {
                    None => Some(raw),
                    Some(keep) => keep.binary_search(&raw).ok().map(|i| i as u64),
                })
            }
        }
    }

    /// Write the normalized complex state vector of entry `i` into `out`.
    pub fn fill_vector(&self, i: u64, out: &mut [Complex64]) {
        self.get(i).fill_complex(out);
    }

    /// All state vectors, row-major `len x dim`.
    pub fn materialize(&self) -> Vec<Complex64> {
        use rayon::prelude::*;
        let d = self.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); self.len as usize * d];
        out.par_chunks_mut(d)
            .enumerate()
            .for_each(|(i, chunk)| self.fill_vector(i as u64, chunk));
        out
    }

    pub fn support_masks(&self) -> Vec<u128> {
        use rayon::prelude::*;
        (0..self.len)
            .into_par_iter()
            .map(|i| self.get(i).support_mask())
            .collect()
    }

    fn write_body(&self, mut sink: impl FnMut(&[u8]) -> Result<()>) -> Result<()> {
        let mut line = Vec::with_capacity(256);
        for i in 0..self.len {
            line.clear();
            serde_json::to_writer(&mut line, &self.get(i))?;
            line.push(b'\n');
            sink(&line)?;
        }
        Ok(())
    }

    /// SHA-256 hex digest of the serialized body (one JSON tuple per line).
    pub fn content_hash(&self) -> &str {
        self.hash.get_or_init(|| {
            let mut h = Sha256::new();
            self.write_body(|bytes| {
                h.update(bytes);
                Ok(())
            })
            .expect("hashing cannot fail");
            hex::encode(h.finalize())
        })
    }

    /// Write the catalog as JSON lines with a header line.
    pub fn write_jsonl(&self, w: &mut impl Write) -> Result<()> {
        let header = Header {
            version: CATALOG_VERSION,
            p: self.p,
            n: self.n,
            mode: self.mode,
            count: self.len,
            hash: self.content_hash().to_string(),
        };
        serde_json::to_writer(&mut *w, &header)?;
        w.write_all(b"\n")?;
        self.write_body(|bytes| Ok(w.write_all(bytes)?))
    }

    /// Read a catalog file, checking count and content hash.
    pub fn read_jsonl(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let header: Header = match lines.next() {
            Some(line) => serde_json::from_str(&line?)?,
            None => return Err(Error::Parse("empty catalog file".into())),
        };
        if header.version != CATALOG_VERSION {
            return Err(Error::Parse(format!(
                "unsupported catalog version {}",
                header.version
            )));
        }
        let mut states = Vec::with_capacity(header.count as usize);
        for line in lines {
            let line = line?;
            if !line.trim().is_empty() {
                states.push(serde_json::from_str::<CanonicalStabilizer>(&line)?);
            }
        }
        if states.len() as u64 != header.count {
            return Err(Error::Parse(format!(
                "header count {} but {} tuples",
                header.count,
                states.len()
            )));
        }
        let cat = Self::from_states(states, header.mode)?;
        if cat.p != header.p || cat.n != header.n {
            return Err(Error::Parse("header register disagrees with tuples".into()));
        }
        if cat.content_hash() != header.hash {
            return Err(Error::Parse("catalog content hash mismatch".into()));
        }
        Ok(cat)
    }

    /// Phase table used by fast vector fills.
    pub fn phases(&self) -> Vec<Complex64> {
        phase_table(self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_formula() {
        for (p, n, expect) in [(3u8, 1usize, 12u64), (3, 2, 360), (2, 1, 6), (2, 2, 60)] {
            let raw = StabilizerCatalog::build(p, n, CatalogMode::Raw).unwrap();
            let dd = StabilizerCatalog::build(p, n, CatalogMode::Dedupe).unwrap();
            assert_eq!(raw.len(), expect);
            assert_eq!(dd.len(), expect);
            assert_eq!(StabilizerCatalog::expected_count(p, n), expect);
        }
    }

    #[test]
    fn entries_are_unit_norm_with_power_support() {
        let cat = StabilizerCatalog::build(3, 2, CatalogMode::Raw).unwrap();
        for i in 0..cat.len() {
            let v = cat.get(i).state_vector_complex();
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-14);
            let support = v.iter().filter(|z| z.norm() > 0.0).count();
            assert!([1, 3, 9].contains(&support));
        }
    }

    #[test]
    fn index_of_inverts_get() {
        let cat = StabilizerCatalog::build(3, 2, CatalogMode::Raw).unwrap();
        for i in 0..cat.len() {
            assert_eq!(cat.index_of(&cat.get(i)).unwrap(), Some(i));
        }
        let q = StabilizerCatalog::build(2, 2, CatalogMode::Raw).unwrap();
        for i in 0..q.len() {
            assert_eq!(q.index_of(&q.get(i)).unwrap(), Some(i));
        }
    }

    #[test]
    fn ordering_starts_with_basis_states() {
        let cat = StabilizerCatalog::build(3, 2, CatalogMode::Raw).unwrap();
        for i in 0..9u64 {
            let s = cat.get(i);
            assert_eq!(s.k, 0);
            assert_eq!(s.x0.basis_index() as u64, i);
        }
        assert_eq!(cat.get(cat.len() - 1).k, 2);
    }

    #[test]
    fn jsonl_roundtrip_preserves_hash() {
        let cat = StabilizerCatalog::build(3, 1, CatalogMode::Raw).unwrap();
        let mut buf = Vec::new();
        cat.write_jsonl(&mut buf).unwrap();
        let back = StabilizerCatalog::read_jsonl(std::io::Cursor::new(&buf)).unwrap();
        assert_eq!(back.len(), 12);
        assert_eq!(back.content_hash(), cat.content_hash());
        for i in 0..12 {
            assert_eq!(back.get(i), cat.get(i));
        }
        let text = String::from_utf8(buf)
            .unwrap()
            .replacen("\"count\":12", "\"count\":11", 1);
        assert!(StabilizerCatalog::read_jsonl(std::io::Cursor::new(text)).is_err());
    }
}
