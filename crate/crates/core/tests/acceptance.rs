//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Run with `cargo test -p magicrank-core --test acceptance`.

use std::f64::consts::PI;
use std::time::Instant;

use magicrank_core::anneal::AnnealConfig;
use magicrank_core::asymptotics::find_ratio_witness;
use magicrank_core::certify::{
    audit, catalog_for, certify_rank, merge_certificates, total_tuples, Certificate, ShardSpec,
    AUDIT_SAMPLES,
};
use magicrank_core::clifford::gates::CMatrix;
use magicrank_core::clifford::group::{orbit_closure, stabilizer_order, standard_generators};
use magicrank_core::clifford::pauli::PauliLabel;
use magicrank_core::decomposition::{exponent_from_bound, fixtures};
use magicrank_core::gadget::*;
use magicrank_core::stabilizer::{CatalogMode, MagicId, MagicTarget, StabilizerCatalog};
use magicrank_core::WITNESS_TOL;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seed used for every search in criterion 8.
const SEARCH_SEED: u64 = 1;
/// Shard counts giving a first shard of at least 10^8 tuples.
const QUTRIT_SHARDS: u64 = 40_000;
const QUBIT_SHARDS: u64 = 80_000;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let mut worst = 0f64;
    let mut failed = Vec::new();
    let all = match fixtures::all() {
        Ok(a) => a,
        Err(e) => return outcome(false, e.to_string()),
    };
    for (name, d) in &all {
        let exact = d.verify_exact().map(|r| r.ok).unwrap_or(false);
        let res = d.verify_numeric().unwrap_or(f64::INFINITY);
        worst = worst.max(res);
        if !exact || res > 1e-13 {
            failed.push(*name);
        }
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        all.len() == 8 && failed.is_empty() && secs < 5.0,
        format!(
            "{} fixtures exact, max residual {worst:.2e}, {secs:.2}s, failures {failed:?}",
            all.len()
        ),
    )
}

struct SmallCerts {
    certs: Vec<(MagicTarget, Certificate, StabilizerCatalog)>,
}

fn small_certificates() -> magicrank_core::Result<SmallCerts> {
    let mut certs = Vec::new();
    for (id, m, r) in [
        (MagicId::T3, 1, 2),
        (MagicId::S, 2, 1),
        (MagicId::H3, 2, 2),
        (MagicId::N, 2, 2),
    ] {
        let t = MagicTarget::new(id, m)?;
        let cat = catalog_for(&t, CatalogMode::Raw)?;
        let cert = certify_rank(
            &t,
            r,
            &cat,
            ShardSpec::full(total_tuples(cat.len(), r)?),
            WITNESS_TOL,
        )?;
        certs.push((t, cert, cat));
    }
    Ok(SmallCerts { certs })
}

fn criterion_2(small: &SmallCerts) -> Outcome {
    let expect = [(12u64, 66u64), (360, 360), (360, 64_620), (360, 64_620)];
    let mut ok = true;
    let mut parts = Vec::new();
    for ((t, c, _), (size, tuples)) in small.certs.iter().zip(expect) {
        let good = c.catalog_size == size
            && c.total_tuples == tuples
            && c.tuples_tested == tuples
            && c.complete
            && c.witnesses.is_empty()
            && c.rules_out;
        ok &= good;
        parts.push(format!(
            "{t} r={}: {}/{} tuples, {} witnesses",
            c.r,
            c.tuples_tested,
            c.total_tuples,
            c.witnesses.len()
        ));
    }
    let s2 =
        fixtures::load("strange_m2").map(|d| d.rank() == 2 && d.verify_exact().is_ok_and(|r| r.ok));
    ok &= s2.unwrap_or(false);
    parts.push("S^2 rank-2 fixture verified".into());
    outcome(ok, parts.join("; "))
}

fn criterion_3() -> Outcome {
    let cases = [
        (2, 2, 3, 0.3155),
        (4, 3, 3, 0.4206),
        (3, 4, 2, 0.3962),
        (3, 2, 3, 0.5),
    ];
    let got: Vec<f64> = cases
        .iter()
        .map(|&(r, m, p, _)| exponent_from_bound(r, m, p))
        .collect();
    let ok = cases.iter().zip(&got).all(|(c, g)| (g - c.3).abs() <= 1e-4);
    outcome(
        ok,
        format!(
            "{:?}",
            got.iter().map(|g| format!("{g:.4}")).collect::<Vec<_>>()
        ),
    )
}

fn criterion_4(us: &[CMatrix]) -> Outcome {
    let t = Instant::now();
    let h = sweep_two_copy(MagicId::H3, us);
    let n = sweep_two_copy(MagicId::N, us);
    let s = sweep_two_copy(MagicId::S, us);
    let (Ok(h), Ok(n), Ok(s)) = (h, n, s) else {
        return outcome(false, "sweep error");
    };
    let full = |x: &TwoCopySweep| x.elements == 51_840 && x.branches_tested == 3 * 51_840;
    let h_hit = h.hits.iter().any(|r| {
        r.classification == Classification::PhaseStateNonclifford
            && (r.probability - 3.0 / 8.0).abs() <= 1e-10
            && matches_phases_up_to_pauli(&r.output, [PI / 2.0, PI / 3.0], 1e-8)
    });
    let n_hit = n.hits.iter().any(|r| {
        (r.probability - 0.25).abs() <= 1e-10
            && r.phases
                .is_some_and(|p| gap(p[0], PI) <= 1e-8 && gap(p[1], PI) <= 1e-8)
    });
    let secs = t.elapsed().as_secs_f64();
    outcome(
        full(&h) && full(&n) && full(&s) && h_hit && n_hit && s.nonclifford_hits == 0 && secs <= 3600.0,
        format!(
            "H3 3/8 (pi/2, pi/3) hit {h_hit}, N 1/4 (pi, pi) hit {n_hit}, S non-Clifford hits {}, {secs:.1}s",
            s.nonclifford_hits
        ),
    )
}

fn criterion_5(us: &[CMatrix]) -> Outcome {
    let t = Instant::now();
    let target = t3_gate();
    let Ok(t3) = sweep_injection(MagicId::T3, us) else {
        return outcome(false, "sweep error");
    };
    let found = t3.gadgets.iter().any(|g| {
        let u = CMatrix::from_fn(3, 3, |i, j| g.injected[i][j]);
        equivalent_up_to_clifford(&u, &target)
    });
    let mut others = Vec::new();
    for m in [MagicId::S, MagicId::H3, MagicId::N] {
        others.push(
            sweep_injection(m, us)
                .map(|s| s.gadgets.len())
                .unwrap_or(usize::MAX),
        );
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        found && others.iter().all(|&n| n == 0) && secs <= 3600.0,
        format!("T3 gadget found {found}, gadgets for S/H3/N {others:?}, {secs:.1}s"),
    )
}

fn criterion_6() -> Outcome {
    let s = MagicId::S.amplitudes();
    let orbit = orbit_closure(&s, &standard_generators());
    let shape = orbit.elements.iter().all(|v| {
        let nz: Vec<f64> = v.iter().map(|z| z.norm()).filter(|&a| a > 1e-12).collect();
        nz.len() == 2 && (nz[0] - nz[1]).abs() < 1e-12
    });
    let none = orbit
        .elements
        .iter()
        .all(|v| find_ratio_witness(v).is_none());
    let stab = stabilizer_order(&s);
    outcome(
        orbit.len() == 9 && stab == 24 && shape && none,
        format!("orbit {} elements, stabilizer order {stab}, support-2 equal moduli {shape}, no ratio witness {none}", orbit.len()),
    )
}

fn criterion_7(us: &[CMatrix]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let trials = 200;
    let mut passed = 0;
    for _ in 0..trials {
        let c = &us[rng.random_range(0..us.len())];
        let (a, b) = (rng.random_range(0..3u8), rng.random_range(0..3u8));
        let data =
            PauliLabel::from_symplectic(&[rng.random_range(0..3u8), rng.random_range(0..3u8)]);
        let mut m: Vec<Complex64> = (0..3)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        m.iter_mut().for_each(|z| *z /= norm);
        let k = rng.random_range(0..3u8);
        if check_reduction(a, b, &data, c, &m, k, true).unwrap_or(false) {
            passed += 1;
        }
    }
    outcome(
        passed == trials,
        format!("{passed}/{trials} random (D, C_sp, k, M) at 1e-12"),
    )
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let cases = [
        (MagicId::S, 2, 2),
        (MagicId::H3, 2, 3),
        (MagicId::N, 2, 3),
        (MagicId::S, 3, 4),
        (MagicId::H3, 3, 4),
        (MagicId::N, 3, 4),
        (MagicId::N, 4, 7),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (id, m, r) in cases {
        let s = Instant::now();
        let res = MagicTarget::new(id, m).and_then(|t| AnnealConfig::new(t, r, SEARCH_SEED).run());
        let (good, note) = match res {
            Ok(res) => {
                let replay = res
                    .decomposition
                    .as_ref()
                    .and_then(|d| d.verify_numeric().ok());
                let good = res.success && replay.is_some_and(|x| x <= 1e-10);
                (good, format!("{} chains", res.chains.len()))
            }
            Err(e) => (false, e.to_string()),
        };
        ok &= good;
        parts.push(format!(
            "{id}^{m} r={r} {} ({note}, {:.1}s)",
            if good { "ok" } else { "missed" },
            s.elapsed().as_secs_f64()
        ));
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        ok && secs <= 1800.0,
        format!("seed {SEARCH_SEED}: {}; total {secs:.1}s", parts.join(", ")),
    )
}

fn criterion_9(small: &SmallCerts) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (t, c, cat) in &small.certs {
        let rep = audit(c, cat, t, AUDIT_SAMPLES);
        let min = c.min_nonwitness_residual.unwrap_or(0.0);
        let good = rep.passed && c.tol == 1e-10 && min >= 1e-7;
        ok &= good;
        parts.push(format!(
            "{t} r={}: audit {}, min residual {min:.4}",
            c.r,
            if rep.passed { "clean" } else { "FAILED" }
        ));
    }
    outcome(ok, parts.join("; "))
}

fn shard_zero(
    id: MagicId,
    m: usize,
    r: usize,
    shards: u64,
) -> magicrank_core::Result<(bool, String)> {
    let t = MagicTarget::new(id, m)?;
    let cat = catalog_for(&t, CatalogMode::Raw)?;
    let total = total_tuples(cat.len(), r)?;
    let spec = ShardSpec::new(0, shards, total)?;
    let s = Instant::now();
    let cert = certify_rank(&t, r, &cat, spec, WITNESS_TOL)?;
    let rep = audit(&cert, &cat, &t, AUDIT_SAMPLES);
    let good = cert.tuples_tested >= 100_000_000 && cert.witnesses.is_empty() && rep.passed;
    Ok((
        good,
        format!(
            "{t} r={r} shard 0/{shards}: {} of {total} tuples, {} witnesses, audit {}, {:.1}s",
            cert.tuples_tested,
            cert.witnesses.len(),
            if rep.passed { "clean" } else { "FAILED" },
            s.elapsed().as_secs_f64()
        ),
    ))
}

fn merge_check(small: &SmallCerts) -> magicrank_core::Result<(bool, String)> {
    let mut ok = true;
    for (t, full, cat) in &small.certs {
        let n = 7;
        let shards: Vec<Certificate> = (0..n)
            .map(|i| {
                certify_rank(
                    t,
                    full.r,
                    cat,
                    ShardSpec::new(i, n, full.total_tuples)?,
                    WITNESS_TOL,
                )
            })
            .collect::<magicrank_core::Result<_>>()?;
        let merged = merge_certificates(&shards)?;
        ok &= merged.complete
            && merged.tuples_tested == full.tuples_tested
            && merged.witnesses.len() == full.witnesses.len()
            && merged.rules_out == full.rules_out
            && match (merged.min_nonwitness_residual, full.min_nonwitness_residual) {
                (Some(a), Some(b)) => (a - b).abs() <= 1e-12,
                (a, b) => a == b,
            };
        ok &= merge_certificates(&shards[..n as usize - 1]).is_ok_and(|c| !c.complete);
        ok &= audit(&merged, cat, t, AUDIT_SAMPLES).passed;
    }
    Ok((
        ok,
        "7-way shard merges reproduce the criterion 2 certificates".into(),
    ))
}

fn criterion_10() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let totals = [
        (total_tuples(30_240, 3).ok(), 4_608_409_085_280u64),
        (total_tuples(36_720, 3).ok(), 8_251_279_241_040),
    ];
    for (got, want) in totals {
        ok &= got == Some(want);
    }
    parts.push(format!(
        "full triple counts {:?}",
        totals.iter().map(|t| t.0).collect::<Vec<_>>()
    ));
    let runs = [
        (MagicId::S, 3, QUTRIT_SHARDS),
        (MagicId::H3, 3, QUTRIT_SHARDS),
        (MagicId::N, 3, QUTRIT_SHARDS),
        (MagicId::T, 4, QUBIT_SHARDS),
    ];
    for (id, m, shards) in runs {
        match shard_zero(id, m, 3, shards) {
            Ok((good, s)) => {
                ok &= good;
                parts.push(s);
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{id}^{m}: {e}"));
            }
        }
    }
    match small_certificates().and_then(|s| merge_check(&s)) {
        Ok((good, s)) => {
            ok &= good;
            parts.push(s);
        }
        Err(e) => {
            ok = false;
            parts.push(e.to_string());
        }
    }
    outcome(ok, parts.join("; "))
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let mut results: Vec<(u32, Outcome)> = Vec::new();
    let mut report = |n: u32, o: Outcome| {
        println!(
            "criterion {n:>2}: {} | {}",
            if o.ok { "PASS" } else { "FAIL" },
            o.detail
        );
        results.push((n, o));
    };
    report(1, criterion_1());
    let small = small_certificates();
    match &small {
        Ok(s) => report(2, criterion_2(s)),
        Err(e) => report(2, outcome(false, e.to_string())),
    }
    report(3, criterion_3());
    let us = sp4_unitaries().expect("symplectic unitaries");
    report(4, criterion_4(&us));
    report(5, criterion_5(&us));
    report(6, criterion_6());
    report(7, criterion_7(&us));
    drop(us);
    report(8, criterion_8());
    match &small {
        Ok(s) => report(9, criterion_9(s)),
        Err(e) => report(9, outcome(false, e.to_string())),
    }
    report(10, criterion_10());
    let failed: Vec<u32> = results
        .iter()
        .filter(|(_, o)| !o.ok)
        .map(|(n, _)| *n)
        .collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", results.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
