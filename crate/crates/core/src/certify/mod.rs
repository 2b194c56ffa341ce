//! Exhaustive non-existence certificates for rank-`r` decompositions.
//!
//! Tuples are numbered colexicographically over catalog indices. A shard is a
//! half-open rank range; it is cut into fixed chunks whose partial results
//! are folded in chunk order, so the certificate does not depend on the
//! number of threads.

pub mod colex;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::linalg::{best_fit, QrSolver};
use crate::stabilizer::{CatalogMode, MagicId, MagicTarget, StabilizerCatalog};

pub const CERTIFICATE_VERSION: u32 = 1;
/// Tuples per work unit.
pub const CHUNK: u64 = 1 << 18;
/// Default number of audit resamples.
pub const AUDIT_SAMPLES: usize = 1000;

/// Cholesky pivots below this go to the QR route.
const PIVOT_TOL: f64 = 1e-6;
/// Gram-route squared residuals below this go to the QR route.
const GRAM_CUT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardSpec {
    pub index: u64,
    pub count: u64,
    pub start: u64,
    pub end: u64,
}

impl ShardSpec {
    /// Shard `index` of `count` equal-as-possible pieces of `[0, total)`.
    pub fn new(index: u64, count: u64, total: u64) -> Result<Self> {
        if count == 0 || index >= count {
            return Err(Error::ShardRange(format!("shard {index}/{count}")));
        }
        let cut = |i: u64| (total as u128 * i as u128 / count as u128) as u64;
        Ok(Self {
            index,
            count,
            start: cut(index),
            end: cut(index + 1),
        })
    }

    pub fn full(total: u64) -> Self {
        Self {
            index: 0,
            count: 1,
            start: 0,
            end: total,
        }
    }

    /// Arbitrary range, for tests and resumed partial runs.
    pub fn range(start: u64, end: u64, total: u64) -> Result<Self> {
        if start > end || end > total {
            return Err(Error::ShardRange(format!(
                "range {start}..{end} outside 0..{total}"
            )));
        }
        Ok(Self {
            index: 0,
            count: 1,
            start,
            end,
        })
    }

    pub fn len(&self) -> u64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub rank: u64,
    pub tuple: Vec<u64>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: u32,
    pub p: u8,
    pub m: usize,
    pub target: MagicId,
    pub target_hash: String,
    pub catalog_hash: String,
    pub catalog_mode: CatalogMode,
    pub catalog_size: u64,
    pub r: usize,
    pub total_tuples: u64,
    pub shards: Vec<ShardSpec>,
    pub complete: bool,
    pub tuples_tested: u64,
    /// Tuples rejected by the support test without a least-squares solve.
    pub tuples_pruned: u64,
    pub witnesses: Vec<Witness>,
    pub min_nonwitness_residual: Option<f64>,
    pub min_residual_tuple: Option<Vec<u64>>,
    pub tol: f64,
    /// `χ > r`: set only for a complete certificate without witnesses.
    pub rules_out: bool,
    pub wall_time_s: f64,
}

impl Certificate {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
struct Accumulator {
    tested: u64,
    pruned: u64,
    witnesses: Vec<Witness>,
    min: Option<(f64, u64)>,
}

impl Accumulator {
    fn offer_min(&mut self, res: f64, rank: u64) {
        match self.min {
            Some((m, k)) if m < res || (m == res && k <= rank) => {}
            _ => self.min = Some((res, rank)),
        }
    }

    fn absorb(&mut self, other: Accumulator) {
        self.tested += other.tested;
        self.pruned += other.pruned;
        self.witnesses.extend(other.witnesses);
        if let Some((m, k)) = other.min {
            self.offer_min(m, k);
        }
    }
}

/// Precomputed data shared by all workers.
struct Prepared {
    d: usize,
    n: u64,
    r: usize,
    vecs: Vec<Complex64>,
    masks: Vec<u128>,
    overlaps: Vec<Complex64>,
    psi: Vec<Complex64>,
    psi_norm2: f64,
    tmask: u128,
    weights: Vec<f64>,
    min_weight: f64,
    tol: f64,
}

impl Prepared {
    fn new(catalog: &StabilizerCatalog, psi: Vec<Complex64>, r: usize, tol: f64) -> Self {
        let d = catalog.dim();
        let vecs = catalog.materialize();
        let masks = catalog.support_masks();
        let overlaps = vecs.par_chunks(d).map(|v| inner(v, &psi)).collect();
        let weights: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
        let tmask = (0..d)
            .filter(|&j| weights[j] > 1e-24)
            .fold(0u128, |m, j| m | 1u128 << j);
        let min_weight = (0..d)
            .filter(|&j| tmask >> j & 1 == 1)
            .map(|j| weights[j])
            .fold(f64::INFINITY, f64::min);
        Self {
            d,
            n: catalog.len(),
            r,
            vecs,
            masks,
            overlaps,
            psi_norm2: weights.iter().sum(),
            psi,
            tmask,
            weights,
            min_weight,
            tol,
        }
    }

    fn vec(&self, i: u64) -> &[Complex64] {
        &self.vecs[i as usize * self.d..(i as usize + 1) * self.d]
    }

    fn qr_residual(&self, qr: &mut QrSolver, t: &[u64]) -> f64 {
        let cols: Vec<&[Complex64]> = t.iter().map(|&i| self.vec(i)).collect();
        qr.residual(&cols, &self.psi)
    }

    fn run_chunk(&self, lo: u64, hi: u64) -> Accumulator {
        let r = self.r;
        let mut acc = Accumulator::default();
        let mut qr = QrSolver::new(self.d, r);
        let mut t: Vec<u64> = colex::unrank(lo as u128, r).into_iter().collect();
        let mut k = lo;
        // Gram-route data for the prefix t[1..]
        let q = r - 1;
        let mut chol = vec![Complex64::new(0.0, 0.0); q * q];
        let mut z = vec![Complex64::new(0.0, 0.0); q];
        let mut l = vec![Complex64::new(0.0, 0.0); q];
        while k < hi {
            let prefix_mask = t[1..]
                .iter()
                .fold(0u128, |m, &i| m | self.masks[i as usize]);
            let prefix_ok = self.factor_prefix(&t[1..], &mut chol, &mut z);
            let z2: f64 = z.iter().map(|x| x.norm_sqr()).sum();
            let upper = if r >= 2 { t[1] } else { self.n };
            let mut a = t[0];
            while a < upper && k < hi {
                t[0] = a;
                acc.tested += 1;
                let mask = prefix_mask | self.masks[a as usize];
                if mask & self.tmask != self.tmask {
                    acc.pruned += 1;
                    let cur = acc.min.map_or(f64::INFINITY, |m| m.0).max(self.tol);
                    if self.min_weight.sqrt() < cur {
                        let mut uncovered = self.tmask & !mask;
                        let mut bound = 0.0;
                        while uncovered != 0 {
                            bound += self.weights[uncovered.trailing_zeros() as usize];
                            uncovered &= uncovered - 1;
                        }
                        if bound.sqrt() <= cur {
                            let res = self.qr_residual(&mut qr, &t);
                            self.record(&mut acc, res, k, &t);
                        }
                    }
                } else {
                    let gram = if prefix_ok {
                        self.gram_residual2(&t, &chol, &z, z2, &mut l)
                    } else {
                        None
                    };
                    match gram {
                        Some(res2) if res2 >= GRAM_CUT => {
                            acc.offer_min(res2.sqrt(), k);
                        }
                        _ => {
                            let res = self.qr_residual(&mut qr, &t);
                            self.record(&mut acc, res, k, &t);
                        }
                    }
                }
                a += 1;
                k += 1;
            }
            if k >= hi {
                break;
            }
            t[0] = a;
            if !colex::advance(&mut t, self.n) {
                break;
            }
        }
        acc
    }

    fn record(&self, acc: &mut Accumulator, res: f64, k: u64, t: &[u64]) {
        if res <= self.tol {
            acc.witnesses.push(Witness {
                rank: k,
                tuple: t.to_vec(),
                residual: res,
            });
        } else {
            acc.offer_min(res, k);
        }
    }

    /// Cholesky factor of the prefix Gram matrix and `z = L⁻¹ h`.
    fn factor_prefix(&self, prefix: &[u64], chol: &mut [Complex64], z: &mut [Complex64]) -> bool {
        let q = prefix.len();
        for i in 0..q {
            for j in 0..=i {
                let mut s = inner(self.vec(prefix[i]), self.vec(prefix[j]));
                for c in 0..j {
                    s -= chol[i * q + c] * chol[j * q + c].conj();
                }
                if i == j {
                    if s.re < PIVOT_TOL {
                        return false;
                    }
                    chol[i * q + i] = Complex64::new(s.re.sqrt(), 0.0);
                } else {
                    chol[i * q + j] = s / chol[j * q + j].re;
                }
            }
        }
        for i in 0..q {
            let mut s = self.overlaps[prefix[i] as usize];
            for c in 0..i {
                s -= chol[i * q + c] * z[c];
            }
            z[i] = s / chol[i * q + i].re;
        }
        true
    }

    /// Squared residual through the bordered Cholesky update, or `None` when
    /// the new column is nearly dependent on the prefix.
    fn gram_residual2(
        &self,
        t: &[u64],
        chol: &[Complex64],
        z: &[Complex64],
        z2: f64,
        l: &mut [Complex64],
    ) -> Option<f64> {
        let q = t.len() - 1;
        let va = self.vec(t[0]);
        let mut l2 = 0.0;
        let mut lz = Complex64::new(0.0, 0.0);
        for i in 0..q {
            let mut s = inner(self.vec(t[i + 1]), va);
            for c in 0..i {
                s -= chol[i * q + c] * l[c];
            }
            l[i] = s / chol[i * q + i].re;
            l2 += l[i].norm_sqr();
            lz += l[i].conj() * z[i];
        }
        let piv = 1.0 - l2;
        if piv < PIVOT_TOL {
            return None;
        }
        let za = (self.overlaps[t[0] as usize] - lz) / piv.sqrt();
        Some(self.psi_norm2 - z2 - za.norm_sqr())
    }
}

/// `⟨a|b⟩`.
#[inline]
fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    Complex64::new(re, im)
}

pub fn total_tuples(catalog_size: u64, r: usize) -> Result<u64> {
    u64::try_from(colex::binom(catalog_size, r as u64))
        .map_err(|_| Error::InvalidInput("tuple count exceeds 64 bits".into()))
}

#[derive(Clone, Copy, Debug)]
pub struct Progress {
    pub done: u64,
    pub total: u64,
    pub elapsed_s: f64,
}

#[derive(Default)]
pub struct CertifyOptions<'a> {
    /// Checkpoint file, rewritten after every batch of chunks.
    pub checkpoint: Option<&'a Path>,
    /// Continue from an existing checkpoint.
    pub resume: bool,
    pub progress: Option<&'a (dyn Fn(Progress) + Sync)>,
    /// Stop after this many chunks (testing interrupted runs).
    pub max_chunks: Option<u64>,
    /// Tuples per work unit; `None` means [`CHUNK`].
    pub chunk: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    key: String,
    next_chunk: u64,
    acc: Accumulator,
    elapsed_s: f64,
}

fn checkpoint_key(
    catalog: &StabilizerCatalog,
    target: &MagicTarget,
    r: usize,
    shard: &ShardSpec,
    tol: f64,
    chunk: u64,
) -> String {
    let mut h = Sha256::new();
    h.update(format!(
        "{}|{}|{r}|{}|{}|{tol:e}|{chunk}",
        catalog.content_hash(),
        target.content_hash(),
        shard.start,
        shard.end
    ));
    hex::encode(h.finalize())
}

/// Test every tuple in `shard`.
pub fn certify_rank(
    target: &MagicTarget,
    r: usize,
    catalog: &StabilizerCatalog,
    shard: ShardSpec,
    tol: f64,
) -> Result<Certificate> {
    certify_rank_with(target, r, catalog, shard, tol, &CertifyOptions::default())
}

pub fn certify_rank_with(
    target: &MagicTarget,
    r: usize,
    catalog: &StabilizerCatalog,
    shard: ShardSpec,
    tol: f64,
    opts: &CertifyOptions,
) -> Result<Certificate> {
    if catalog.p != target.p() || catalog.n != target.m {
        return Err(Error::DimensionMismatch(format!(
            "catalog (p={}, n={}) does not match target {target}",
            catalog.p, catalog.n
        )));
    }
    if r == 0 || r as u64 > catalog.len() {
        return Err(Error::InvalidInput(format!(
            "rank {r} outside 1..={}",
            catalog.len()
        )));
    }
    let total = total_tuples(catalog.len(), r)?;
    if shard.start > shard.end || shard.end > total {
        return Err(Error::ShardRange(format!(
            "{}..{} outside 0..{total}",
            shard.start, shard.end
        )));
    }
    let started = Instant::now();
    let prep = Prepared::new(catalog, target.vector_complex(), r, tol);
    let chunk = opts.chunk.unwrap_or(CHUNK).max(1);
    let key = checkpoint_key(catalog, target, r, &shard, tol, chunk);
    let nchunks = shard.len().div_ceil(chunk);
    let (mut acc, mut next, prior) = match opts.checkpoint.filter(|p| opts.resume && p.exists()) {
        Some(path) => {
            let cp: Checkpoint = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            if cp.key != key {
                return Err(Error::Certificate(
                    "checkpoint belongs to a different run".into(),
                ));
            }
            (cp.acc, cp.next_chunk, cp.elapsed_s)
        }
        None => (Accumulator::default(), 0, 0.0),
    };
    let batch = (rayon::current_num_threads() as u64 * 4).max(1);
    let stop = opts.max_chunks.map_or(nchunks, |m| (next + m).min(nchunks));
    while next < stop {
        let upto = (next + batch).min(stop);
        let parts: Vec<Accumulator> = (next..upto)
            .into_par_iter()
            .map(|c| {
                let lo = shard.start + c * chunk;
                prep.run_chunk(lo, (lo + chunk).min(shard.end))
            })
            .collect();
        for part in parts {
            acc.absorb(part);
        }
        next = upto;
        let elapsed = prior + started.elapsed().as_secs_f64();
        if let Some(path) = opts.checkpoint {
            let cp = Checkpoint {
                key: key.clone(),
                next_chunk: next,
                acc: acc.clone(),
                elapsed_s: elapsed,
            };
            let tmp = path.with_extension("tmp");
            std::fs::write(&tmp, serde_json::to_vec(&cp)?)?;
            std::fs::rename(&tmp, path)?;
        }
        if let Some(cb) = opts.progress {
            cb(Progress {
                done: acc.tested,
                total: shard.len(),
                elapsed_s: elapsed,
            });
        }
    }
    if next < nchunks {
        return Err(Error::Certificate(format!(
            "stopped after {next} of {nchunks} chunks"
        )));
    }
    // the reported minimum always comes from the QR route
    let min_tuple = acc.min.map(|(_, k)| colex::unrank(k as u128, r));
    if let (Some(t), Some(m)) = (&min_tuple, acc.min.as_mut()) {
        m.0 = prep.qr_residual(&mut QrSolver::new(prep.d, r), t);
    }
    let complete = shard.start == 0 && shard.end == total;
    Ok(Certificate {
        version: CERTIFICATE_VERSION,
        p: catalog.p,
        m: target.m,
        target: target.id,
        target_hash: target.content_hash(),
        catalog_hash: catalog.content_hash().to_string(),
        catalog_mode: catalog.mode,
        catalog_size: catalog.len(),
        r,
        total_tuples: total,
        shards: vec![shard],
        complete,
        tuples_tested: acc.tested,
        tuples_pruned: acc.pruned,
        rules_out: complete && acc.witnesses.is_empty(),
        witnesses: acc.witnesses,
        min_nonwitness_residual: acc.min.map(|m| m.0),
        min_residual_tuple: min_tuple,
        tol,
        wall_time_s: prior + started.elapsed().as_secs_f64(),
    })
}

/// Union of disjoint shards of the same search.
pub fn merge_certificates(certs: &[Certificate]) -> Result<Certificate> {
    let first = certs
        .first()
        .ok_or_else(|| Error::Certificate("nothing to merge".into()))?;
    for c in &certs[1..] {
        let same = c.version == first.version
            && c.p == first.p
            && c.m == first.m
            && c.target == first.target
            && c.target_hash == first.target_hash
            && c.catalog_hash == first.catalog_hash
            && c.catalog_mode == first.catalog_mode
            && c.catalog_size == first.catalog_size
            && c.r == first.r
            && c.total_tuples == first.total_tuples
            && c.tol == first.tol;
        if !same {
            return Err(Error::Certificate(
                "certificates describe different searches".into(),
            ));
        }
    }
    let mut shards: Vec<ShardSpec> = certs
        .iter()
        .flat_map(|c| c.shards.iter().copied())
        .collect();
    shards.sort_by_key(|s| (s.start, s.end));
    for w in shards.windows(2) {
        if w[1].start < w[0].end {
            return Err(Error::Certificate(format!(
                "shards {}..{} and {}..{} overlap",
                w[0].start, w[0].end, w[1].start, w[1].end
            )));
        }
    }
    let complete = tiles(&shards, first.total_tuples);
    let mut witnesses: Vec<Witness> = certs
        .iter()
        .flat_map(|c| c.witnesses.iter().cloned())
        .collect();
    witnesses.sort_by_key(|w| w.rank);
    let best = certs
        .iter()
        .filter_map(|c| Some((c.min_nonwitness_residual?, c.min_residual_tuple.clone()?)))
        .min_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then_with(|| colex::rank(&a.1).cmp(&colex::rank(&b.1)))
        });
    Ok(Certificate {
        shards,
        complete,
        tuples_tested: certs.iter().map(|c| c.tuples_tested).sum(),
        tuples_pruned: certs.iter().map(|c| c.tuples_pruned).sum(),
        rules_out: complete && witnesses.is_empty(),
        witnesses,
        min_nonwitness_residual: best.as_ref().map(|b| b.0),
        min_residual_tuple: best.map(|b| b.1),
        wall_time_s: certs.iter().map(|c| c.wall_time_s).sum(),
        ..first.clone()
    })
}

fn tiles(sorted: &[ShardSpec], total: u64) -> bool {
    let mut at = 0;
    for s in sorted.iter().filter(|s| !s.is_empty()) {
        if s.start != at {
            return false;
        }
        at = s.end;
    }
    at == total
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AuditCheck {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AuditReport {
    pub passed: bool,
    pub first_failure: Option<String>,
    pub samples: usize,
    pub checks: Vec<AuditCheck>,
}

fn svd_residual(catalog: &StabilizerCatalog, t: &[u64], psi: &[Complex64]) -> f64 {
    let d = catalog.dim();
    let vecs: Vec<Vec<Complex64>> = t
        .iter()
        .map(|&i| {
            let mut v = vec![Complex64::new(0.0, 0.0); d];
            catalog.fill_vector(i, &mut v);
            v
        })
        .collect();
    let cols: Vec<&[Complex64]> = vecs.iter().map(|v| v.as_slice()).collect();
    best_fit(&cols, psi).1
}

/// Re-derive every contract of `cert` against `catalog` and `target`.
/// Residuals are recomputed through the SVD route.
pub fn audit(
    cert: &Certificate,
    catalog: &StabilizerCatalog,
    target: &MagicTarget,
    samples: usize,
) -> AuditReport {
    let mut checks = Vec::new();
    let mut check = |name: &str, ok: bool, detail: String| {
        checks.push(AuditCheck {
            name: name.into(),
            ok,
            detail,
        })
    };

    check(
        "version",
        cert.version == CERTIFICATE_VERSION,
        format!("version {}", cert.version),
    );
    let cat_ok = cert.p == catalog.p
        && cert.m == catalog.n
        && cert.catalog_mode == catalog.mode
        && cert.catalog_size == catalog.len()
        && cert.catalog_hash == catalog.content_hash();
    check(
        "catalog",
        cat_ok,
        format!(
            "certificate {} vs catalog {}",
            cert.catalog_hash,
            catalog.content_hash()
        ),
    );
    let tgt_ok =
        cert.target == target.id && cert.m == target.m && cert.target_hash == target.content_hash();
    check("target", tgt_ok, format!("{}^{}", cert.target, cert.m));
    if !(cat_ok && tgt_ok) {
        return finish(checks, 0);
    }

    let total = total_tuples(catalog.len(), cert.r).ok();
    let mut sorted = cert.shards.clone();
    sorted.sort_by_key(|s| (s.start, s.end));
    let disjoint = sorted.windows(2).all(|w| w[1].start >= w[0].end);
    let in_range = sorted
        .iter()
        .all(|s| s.start <= s.end && Some(s.end) <= total);
    let covered: u64 = sorted.iter().map(|s| s.len()).sum();
    let complete = total.is_some_and(|t| tiles(&sorted, t));
    let coverage_ok = total == Some(cert.total_tuples)
        && disjoint
        && in_range
        && covered == cert.tuples_tested
        && cert.tuples_pruned <= cert.tuples_tested
        && complete == cert.complete
        && cert.rules_out == (complete && cert.witnesses.is_empty());
    check(
        "coverage",
        coverage_ok,
        format!(
            "{covered} tuples in shards, {} claimed, total {}",
            cert.tuples_tested, cert.total_tuples
        ),
    );

    let psi = target.vector_complex();
    let mut bad_witness = None;
    for w in &cert.witnesses {
        let shape = w.tuple.len() == cert.r
            && w.tuple.windows(2).all(|p| p[0] < p[1])
            && w.tuple.last().is_some_and(|&x| x < catalog.len())
            && colex::rank(&w.tuple) == w.rank as u128
            && sorted.iter().any(|s| s.start <= w.rank && w.rank < s.end);
        if !shape || svd_residual(catalog, &w.tuple, &psi) > cert.tol {
            bad_witness = Some(w.rank);
            break;
        }
    }
    check(
        "witnesses",
        bad_witness.is_none(),
        format!(
            "{} witnesses, first bad {bad_witness:?}",
            cert.witnesses.len()
        ),
    );

    let mut seed = [0u8; 32];
    seed.copy_from_slice(
        &Sha256::digest(format!(
            "{}{}{}",
            cert.catalog_hash, cert.target_hash, cert.r
        ))[..],
    );
    let mut rng = rand_chacha::ChaCha8Rng::from_seed(seed);
    let witness_ranks: std::collections::HashSet<u64> =
        cert.witnesses.iter().map(|w| w.rank).collect();
    let pool: u64 = covered.saturating_sub(witness_ranks.len() as u64);
    let n = (samples as u64).min(pool) as usize;
    let mut sampled = 0;
    let mut sample_min = f64::INFINITY;
    let mut bad_sample = None;
    let nonempty: Vec<ShardSpec> = sorted.iter().copied().filter(|s| !s.is_empty()).collect();
    while sampled < n && coverage_ok {
        let mut x = rng.random_range(0..covered);
        let mut rank = 0;
        for s in &nonempty {
            if x < s.len() {
                rank = s.start + x;
                break;
            }
            x -= s.len();
        }
        if witness_ranks.contains(&rank) {
            continue;
        }
        let res = svd_residual(catalog, &colex::unrank(rank as u128, cert.r), &psi);
        sample_min = sample_min.min(res);
        if res <= cert.tol {
            bad_sample = Some(rank);
            break;
        }
        sampled += 1;
    }
    check(
        "resample",
        bad_sample.is_none(),
        format!("{sampled} tuples retested, first witness-like {bad_sample:?}"),
    );

    let gap_ok = match (cert.min_nonwitness_residual, &cert.min_residual_tuple) {
        (Some(min), Some(t)) => {
            let again = svd_residual(catalog, t, &psi);
            (again - min).abs() <= 1e-9 && min >= cert.tol * 1e3 && sample_min >= min - 1e-9
        }
        (None, None) => pool == 0,
        _ => false,
    };
    check(
        "residual-gap",
        gap_ok,
        format!(
            "min residual {:?}, smallest resampled {sample_min:.3e}",
            cert.min_nonwitness_residual
        ),
    );
    finish(checks, sampled)
}

fn finish(checks: Vec<AuditCheck>, samples: usize) -> AuditReport {
    let first_failure = checks
        .iter()
        .find(|c| !c.ok)
        .map(|c| format!("{}: {}", c.name, c.detail));
    AuditReport {
        passed: first_failure.is_none(),
        first_failure,
        samples,
        checks,
    }
}

/// `catalog` must match `(target.p, target.m)`. Convenience for callers that
/// start from a magic id.
pub fn catalog_for(target: &MagicTarget, mode: CatalogMode) -> Result<StabilizerCatalog> {
    StabilizerCatalog::build(target.p(), target.m, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::WITNESS_TOL;

    fn cat(p: u8, n: usize) -> StabilizerCatalog {
        StabilizerCatalog::build(p, n, CatalogMode::Raw).unwrap()
    }

    fn brute(catalog: &StabilizerCatalog, target: &MagicTarget, r: usize) -> (Vec<u64>, f64) {
        let psi = target.vector_complex();
        let mut t: Vec<u64> = (0..r as u64).collect();
        let mut wit = Vec::new();
        let mut min = f64::INFINITY;
        loop {
            let res = svd_residual(catalog, &t, &psi);
            if res <= WITNESS_TOL {
                wit.push(colex::rank(&t) as u64);
            } else {
                min = min.min(res);
            }
            if !colex::advance(&mut t, catalog.len()) {
                break;
            }
        }
        (wit, min)
    }

    #[test]
    fn t3_pairs_have_no_witness() {
        let c = cat(3, 1);
        let t = MagicTarget::new(MagicId::T3, 1).unwrap();
        let cert = certify_rank(&t, 2, &c, ShardSpec::full(66), WITNESS_TOL).unwrap();
        assert_eq!(cert.total_tuples, 66);
        assert_eq!(cert.tuples_tested, 66);
        assert!(cert.rules_out);
        let (wit, min) = brute(&c, &t, 2);
        assert!(wit.is_empty());
        assert!((cert.min_nonwitness_residual.unwrap() - min).abs() < 1e-12);
        assert!(audit(&cert, &c, &t, AUDIT_SAMPLES).passed);
    }

    #[test]
    fn single_state_witnesses_are_projective_matches() {
        let c = cat(3, 1);
        for idx in 0..12 {
            let psi = c.get(idx).state_vector_complex();
            let acc = Prepared::new(&c, psi.clone(), 1, WITNESS_TOL).run_chunk(0, 12);
            let ranks: Vec<u64> = acc.witnesses.iter().map(|w| w.rank).collect();
            assert_eq!(ranks, vec![idx]);
            // and with a global phase
            let rot: Vec<Complex64> = psi.iter().map(|z| z * Complex64::new(0.0, 1.0)).collect();
            assert_eq!(
                Prepared::new(&c, rot, 1, WITNESS_TOL)
                    .run_chunk(0, 12)
                    .witnesses
                    .len(),
                1
            );
        }
    }

    #[test]
    fn matches_brute_force_on_qutrit_pairs() {
        let c = cat(3, 2);
        for id in [MagicId::H3, MagicId::N, MagicId::T3] {
            let t = MagicTarget::new(id, 2).unwrap();
            let cert = certify_rank(
                &t,
                2,
                &c,
                ShardSpec::range(1000, 9000, 64_620).unwrap(),
                WITNESS_TOL,
            )
            .unwrap();
            let psi = t.vector_complex();
            let mut min = f64::INFINITY;
            for k in 1000..9000u128 {
                min = min.min(svd_residual(&c, &colex::unrank(k, 2), &psi));
            }
            assert!(cert.witnesses.is_empty());
            assert!(
                (cert.min_nonwitness_residual.unwrap() - min).abs() < 1e-10,
                "{id}"
            );
        }
    }

    #[test]
    fn strange_pairs_find_fixture_witness() {
        let c = cat(3, 2);
        let t = MagicTarget::new(MagicId::S, 2).unwrap();
        let cert = certify_rank(&t, 2, &c, ShardSpec::full(64_620), WITNESS_TOL).unwrap();
        assert!(!cert.witnesses.is_empty());
        assert!(!cert.rules_out);
        assert!(audit(&cert, &c, &t, 200).passed);
    }

    #[test]
    fn merge_and_tamper() {
        let c = cat(3, 1);
        let t = MagicTarget::new(MagicId::T3, 1).unwrap();
        let a = certify_rank(&t, 2, &c, ShardSpec::range(0, 10, 66).unwrap(), WITNESS_TOL).unwrap();
        let b = certify_rank(
            &t,
            2,
            &c,
            ShardSpec::range(10, 66, 66).unwrap(),
            WITNESS_TOL,
        )
        .unwrap();
        let full = certify_rank(&t, 2, &c, ShardSpec::full(66), WITNESS_TOL).unwrap();
        let m = merge_certificates(&[b.clone(), a.clone()]).unwrap();
        assert!(m.complete && m.rules_out);
        assert_eq!(m.tuples_tested, 66);
        assert_eq!(m.min_nonwitness_residual, full.min_nonwitness_residual);
        assert!(audit(&m, &c, &t, 100).passed);
        assert!(merge_certificates(&[a.clone(), a.clone()]).is_err());
        assert!(
            !merge_certificates(std::slice::from_ref(&a))
                .unwrap()
                .complete
        );

        let mut forged = full.clone();
        forged.tuples_tested = 60;
        let rep = audit(&forged, &c, &t, 100);
        assert!(!rep.passed);
        assert!(rep.first_failure.unwrap().starts_with("coverage"));

        let mut other = full.clone();
        other.catalog_hash = "00".repeat(32);
        assert!(!audit(&other, &c, &t, 100).passed);
    }

    #[test]
    fn shard_partition_is_exact() {
        let total = 64_620;
        let mut at = 0;
        for i in 0..7 {
            let s = ShardSpec::new(i, 7, total).unwrap();
            assert_eq!(s.start, at);
            at = s.end;
        }
        assert_eq!(at, total);
        assert!(ShardSpec::new(7, 7, total).is_err());
    }

    #[test]
    fn resume_reproduces_uninterrupted_run() {
        let c = cat(3, 2);
        let t = MagicTarget::new(MagicId::N, 2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp.json");
        let shard = ShardSpec::full(64_620);
        let opts = CertifyOptions {
            checkpoint: Some(&path),
            max_chunks: Some(3),
            chunk: Some(5000),
            ..Default::default()
        };
        assert!(certify_rank_with(&t, 2, &c, shard, WITNESS_TOL, &opts).is_err());
        assert!(path.exists());
        let opts = CertifyOptions {
            checkpoint: Some(&path),
            resume: true,
            chunk: Some(5000),
            ..Default::default()
        };
        let resumed = certify_rank_with(&t, 2, &c, shard, WITNESS_TOL, &opts).unwrap();
        let direct = certify_rank(&t, 2, &c, shard, WITNESS_TOL).unwrap();
        assert!(
            (resumed.min_nonwitness_residual.unwrap() - direct.min_nonwitness_residual.unwrap())
                .abs()
                < 1e-12
        );
        assert_eq!(resumed.tuples_tested, direct.tuples_tested);
        let wrong = CertifyOptions {
            checkpoint: Some(&path),
            resume: true,
            chunk: Some(7000),
            ..Default::default()
        };
        assert!(certify_rank_with(&t, 2, &c, shard, WITNESS_TOL, &wrong).is_err());
    }
}
