//! Simulated annealing over `r`-subsets of a stabilizer catalog.
//!
//! The energy of a subset is its least-squares residual against the target.
//! Moves replace one uniformly chosen member by a uniformly chosen
//! non-member; acceptance is Metropolis with geometric cooling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposition::{exact_coefficients, tensor_states, Decomposition};
use crate::error::{Error, Result};
use crate::linalg::{self, QrSolver};
use crate::stabilizer::{CanonicalStabilizer, CatalogMode, MagicTarget, StabilizerCatalog};
use crate::WITNESS_TOL;

/// Chains are run in fixed-size waves; with `stop_on_success` no wave starts
/// after one that succeeded.
pub const WAVE: usize = 8;
/// Catalogs with more complex entries than this are not materialized.
pub const DENSE_LIMIT: u64 = 1 << 26;
const WARMUP: usize = 100;

/// Which states the search draws from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CatalogScope {
    /// Every stabilizer state on the register.
    Full,
    /// Tensor products of single-qudit stabilizer states.
    Product,
}

impl CatalogScope {
    /// `Full` when the dense catalog fits in [`DENSE_LIMIT`] entries.
    pub fn default_for(p: u8, m: usize) -> Self {
        let dim = (p as u64).pow(m as u32);
        if StabilizerCatalog::expected_count(p, m).saturating_mul(dim) <= DENSE_LIMIT {
            CatalogScope::Full
        } else {
            CatalogScope::Product
        }
    }
}

impl std::str::FromStr for CatalogScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(CatalogScope::Full),
            "product" => Ok(CatalogScope::Product),
            _ => Err(Error::Parse(format!("unknown catalog scope {s:?}"))),
        }
    }
}

/// The catalog a search over `scope` runs on.
pub fn search_catalog(p: u8, m: usize, scope: CatalogScope) -> Result<StabilizerCatalog> {
    match scope {
        CatalogScope::Full => StabilizerCatalog::build(p, m, CatalogMode::Raw),
        CatalogScope::Product => {
            let one = StabilizerCatalog::build(p, 1, CatalogMode::Raw)?;
            let singles: Vec<CanonicalStabilizer> = (0..one.len()).map(|i| one.get(i)).collect();
            let mut states = singles.clone();
            for _ in 1..m {
                states = states
                    .iter()
                    .flat_map(|a| singles.iter().map(move |b| tensor_states(a, b)))
                    .collect::<Result<_>>()?;
            }
            StabilizerCatalog::from_states(states, CatalogMode::Raw)
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnnealConfig {
    pub r: usize,
    pub target: MagicTarget,
    pub steps: u64,
    pub chains: usize,
    /// `None` calibrates so that about half of the warmup uphill moves pass.
    pub initial_temperature: Option<f64>,
    pub cooling: f64,
    pub tol: f64,
    pub seed: u64,
    pub stop_on_success: bool,
    pub scope: CatalogScope,
}

impl AnnealConfig {
    pub fn new(target: MagicTarget, r: usize, seed: u64) -> Self {
        Self {
            r,
            target,
            steps: 20_000,
            chains: 4096,
            initial_temperature: None,
            cooling: 0.995,
            tol: WITNESS_TOL,
            seed,
            stop_on_success: true,
            scope: CatalogScope::default_for(target.p(), target.m),
        }
    }

    /// Build the catalog for `scope` and search it.
    pub fn run(&self) -> Result<AnnealResult> {
        anneal_search(
            self,
            &search_catalog(self.target.p(), self.target.m, self.scope)?,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 || self.chains == 0 || self.r == 0 {
            return Err(Error::InvalidInput(
                "steps, chains and r must be positive".into(),
            ));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(Error::InvalidInput(format!(
                "cooling factor {} outside (0, 1)",
                self.cooling
            )));
        }
        if self.initial_temperature.is_some_and(|t| !(t > 0.0)) {
            return Err(Error::InvalidInput(
                "initial temperature must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainSummary {
    pub chain: usize,
    pub initial_temperature: f64,
    pub steps_run: u64,
    pub accepted: u64,
    pub best_residual: f64,
    /// `(step, energy)` at every improvement of the chain best.
    pub best_trace: Vec<(u64, f64)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnnealResult {
    pub best_subset: Vec<u64>,
    /// Recomputed through the SVD route on `best_subset`.
    pub best_residual: f64,
    pub success: bool,
    pub coefficients: Vec<Complex64>,
    pub decomposition: Option<Decomposition>,
    pub chains: Vec<ChainSummary>,
    pub catalog_hash: String,
}

enum Vectors<'a> {
    Dense(Vec<Complex64>, usize),
    Lazy(&'a StabilizerCatalog),
}

impl Vectors<'_> {
    fn fill(&self, i: u64, out: &mut [Complex64]) {
        match self {
            Vectors::Dense(v, d) => out.copy_from_slice(&v[i as usize * d..(i as usize + 1) * d]),
            Vectors::Lazy(c) => c.fill_vector(i, out),
        }
    }
}

struct Chain<'a> {
    vectors: &'a Vectors<'a>,
    psi: &'a [Complex64],
    n: u64,
    d: usize,
    subset: Vec<u64>,
    cols: Vec<Vec<Complex64>>,
    spare: Vec<Complex64>,
    qr: QrSolver,
}

impl Chain<'_> {
    fn energy(&mut self) -> f64 {
        let refs: Vec<&[Complex64]> = self.cols.iter().map(|c| c.as_slice()).collect();
        self.qr.residual(&refs, self.psi)
    }

    /// Energy after replacing position `pos` by catalog entry `j`; the
    /// previous column is kept in `spare` so the move can be undone.
    fn try_swap(&mut self, pos: usize, j: u64) -> f64 {
        self.vectors.fill(j, &mut self.spare);
        std::mem::swap(&mut self.cols[pos], &mut self.spare);
        self.energy()
    }

    fn undo(&mut self, pos: usize) {
        std::mem::swap(&mut self.cols[pos], &mut self.spare);
    }

    fn propose(&self, rng: &mut ChaCha8Rng) -> (usize, u64) {
        let pos = rng.random_range(0..self.subset.len());
        loop {
            let j = rng.random_range(0..self.n);
            if !self.subset.contains(&j) {
                return (pos, j);
            }
        }
    }
}

fn run_chain(
    cfg: &AnnealConfig,
    vectors: &Vectors,
    psi: &[Complex64],
    n: u64,
    d: usize,
    chain: usize,
) -> (ChainSummary, Vec<u64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(chain as u64);
    let mut subset: Vec<u64> = Vec::with_capacity(cfg.r);
    while subset.len() < cfg.r {
        let j = rng.random_range(0..n);
        if !subset.contains(&j) {
            subset.push(j);
        }
    }
    let cols = subset
        .iter()
        .map(|&i| {
            let mut v = vec![Complex64::new(0.0, 0.0); d];
            vectors.fill(i, &mut v);
            v
        })
        .collect();
    let mut ch = Chain {
        vectors,
        psi,
        n,
        d,
        subset,
        cols,
        spare: vec![Complex64::new(0.0, 0.0); d],
        qr: QrSolver::new(d, cfg.r),
    };
    debug_assert_eq!(ch.d, d);
    let mut energy = ch.energy();

    let temperature = match cfg.initial_temperature {
        Some(t) => t,
        None => {
            let mut uphill = Vec::new();
            for _ in 0..WARMUP {
                let (pos, j) = ch.propose(&mut rng);
                let e = ch.try_swap(pos, j);
                ch.undo(pos);
                if e > energy {
                    uphill.push(e - energy);
                }
            }
            uphill.sort_by(f64::total_cmp);
            // exp(-median / T) = 1/2
            uphill
                .get(uphill.len() / 2)
                .map_or(1e-3, |m| (m / std::f64::consts::LN_2).max(1e-12))
        }
    };

    let mut t = temperature;
    let mut best = energy;
    let mut best_subset = ch.subset.clone();
    let mut trace = vec![(0, best)];
    let mut accepted = 0;
    let mut steps_run = 0;
    for step in 1..=cfg.steps {
        if best <= cfg.tol {
            break;
        }
        steps_run = step;
        let (pos, j) = ch.propose(&mut rng);
        let e = ch.try_swap(pos, j);
        let de = e - energy;
        if de <= 0.0 || rng.random::<f64>() < (-de / t).exp() {
            ch.subset[pos] = j;
            energy = e;
            accepted += 1;
            if e < best {
                best = e;
                best_subset = ch.subset.clone();
                trace.push((step, e));
            }
        } else {
            ch.undo(pos);
        }
        t *= cfg.cooling;
    }
    best_subset.sort_unstable();
    let summary = ChainSummary {
        chain,
        initial_temperature: temperature,
        steps_run,
        accepted,
        best_residual: best,
        best_trace: trace,
    };
    (summary, best_subset)
}

/// Run the configured chains and return the best subset found.
pub fn anneal_search(cfg: &AnnealConfig, catalog: &StabilizerCatalog) -> Result<AnnealResult> {
    cfg.validate()?;
    if catalog.p != cfg.target.p() || catalog.n != cfg.target.m {
        return Err(Error::DimensionMismatch(format!(
            "catalog does not match target {}",
            cfg.target
        )));
    }
    let n = catalog.len();
    if cfg.r as u64 >= n {
        return Err(Error::InvalidInput(format!(
            "r = {} must be below the catalog size {n}",
            cfg.r
        )));
    }
    let d = catalog.dim();
    let vectors = if n * d as u64 <= DENSE_LIMIT {
        Vectors::Dense(catalog.materialize(), d)
    } else {
        Vectors::Lazy(catalog)
    };
    let psi = cfg.target.vector_complex();

    let mut runs: Vec<(ChainSummary, Vec<u64>)> = Vec::new();
    for wave in (0..cfg.chains).step_by(WAVE) {
        let ids: Vec<usize> = (wave..(wave + WAVE).min(cfg.chains)).collect();
        let out: Vec<_> = ids
            .par_iter()
            .map(|&c| run_chain(cfg, &vectors, &psi, n, d, c))
            .collect();
        let hit = out.iter().any(|(s, _)| s.best_residual <= cfg.tol);
        runs.extend(out);
        if hit && cfg.stop_on_success {
            break;
        }
    }
    let (best_chain, _) = runs
        .iter()
        .enumerate()
        .min_by(|a, b| {
            a.1 .0
                .best_residual
                .total_cmp(&b.1 .0.best_residual)
                .then(a.0.cmp(&b.0))
        })
        .expect("at least one chain");
    let best_subset = runs[best_chain].1.clone();
    let states: Vec<CanonicalStabilizer> = best_subset.iter().map(|&i| catalog.get(i)).collect();
    let vecs: Vec<Vec<Complex64>> = states.iter().map(|s| s.state_vector_complex()).collect();
    let refs: Vec<&[Complex64]> = vecs.iter().map(|v| v.as_slice()).collect();
    let (coefficients, best_residual) = linalg::best_fit(&refs, &psi);
    let success = best_residual <= cfg.tol;
    let decomposition = if success {
        exact_coefficients(&states, &cfg.target)?
    } else {
        None
    };
    Ok(AnnealResult {
        best_subset,
        best_residual,
        success,
        coefficients,
        decomposition,
        chains: runs.into_iter().map(|r| r.0).collect(),
        catalog_hash: catalog.content_hash().to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stabilizer::{CatalogMode, MagicId};

    fn cat2() -> StabilizerCatalog {
        StabilizerCatalog::build(3, 2, CatalogMode::Raw).unwrap()
    }

    #[test]
    fn strange_pair_is_found_and_snaps() {
        let t = MagicTarget::new(MagicId::S, 2).unwrap();
        let res = anneal_search(&AnnealConfig::new(t, 2, 7), &cat2()).unwrap();
        assert!(res.success, "{}", res.best_residual);
        let dec = res.decomposition.unwrap();
        assert!(dec.verify_exact().unwrap().ok);
        assert!(dec.verify_numeric().unwrap() <= WITNESS_TOL);
    }

    #[test]
    fn deterministic_given_seed() {
        let t = MagicTarget::new(MagicId::H3, 2).unwrap();
        let mut cfg = AnnealConfig::new(t, 3, 99);
        cfg.chains = 4;
        cfg.steps = 500;
        cfg.stop_on_success = false;
        let a = anneal_search(&cfg, &cat2()).unwrap();
        let b = anneal_search(&cfg, &cat2()).unwrap();
        assert_eq!(a.best_subset, b.best_subset);
        assert_eq!(a.best_residual, b.best_residual);
        for (x, y) in a.chains.iter().zip(&b.chains) {
            assert_eq!(x.best_trace, y.best_trace);
        }
    }

    #[test]
    fn traces_are_non_increasing() {
        let t = MagicTarget::new(MagicId::N, 2).unwrap();
        let mut cfg = AnnealConfig::new(t, 2, 3);
        cfg.chains = 3;
        cfg.steps = 2000;
        let res = anneal_search(&cfg, &cat2()).unwrap();
        assert!(!res.success);
        for c in &res.chains {
            assert!(c.best_trace.windows(2).all(|w| w[1].1 <= w[0].1));
        }
    }

    #[test]
    fn scopes() {
        assert_eq!(CatalogScope::default_for(3, 3), CatalogScope::Full);
        assert_eq!(CatalogScope::default_for(3, 4), CatalogScope::Product);
        assert_eq!(CatalogScope::default_for(2, 4), CatalogScope::Full);
        let prod = search_catalog(3, 2, CatalogScope::Product).unwrap();
        assert_eq!(prod.len(), 144);
        let full = cat2();
        for i in (0..144).step_by(7) {
            assert!(full.index_of(&prod.get(i)).unwrap().is_some());
        }
    }

    #[test]
    fn rejects_bad_config() {
        let t = MagicTarget::new(MagicId::N, 2).unwrap();
        let mut cfg = AnnealConfig::new(t, 2, 3);
        cfg.cooling = 1.0;
        assert!(anneal_search(&cfg, &cat2()).is_err());
        let wrong = StabilizerCatalog::build(3, 1, CatalogMode::Raw).unwrap();
        assert!(anneal_search(&AnnealConfig::new(t, 2, 3), &wrong).is_err());
    }
}
