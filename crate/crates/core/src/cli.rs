//! The `magicrank` command line.
//!
//! Exit codes: 0 success, 1 a verification, audit or search failure, 2 a
//! usage error. Every command writes one JSON artifact into the output
//! directory (`--out`, else `$MAGICRANK_OUT`, else `.`) and a short summary
//! to standard output.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use crate::anneal::{AnnealConfig, CatalogScope};
use crate::asymptotics::{exp_subsequence, find_ratio_witness, moulton_bound};
use crate::certify::{
    audit, certify_rank_with, merge_certificates, total_tuples, Certificate, CertifyOptions,
    Progress, ShardSpec, AUDIT_SAMPLES,
};
use crate::clifford::group::{orbit_closure, stabilizer_order, standard_generators};
use crate::decomposition::{exponent_from_bound, fixtures, Decomposition, DECOMPOSITION_VERSION};
use crate::error::{Error, Result};
use crate::gadget::{
    equivalent_up_to_clifford, sp4_unitaries, sweep_injection, sweep_two_copy, t3_gate,
};
use crate::stabilizer::{CatalogMode, MagicId, MagicTarget, StabilizerCatalog, CATALOG_VERSION};
use crate::{VERIFY_TOL, WITNESS_TOL};

pub const OUT_ENV: &str = "MAGICRANK_OUT";

#[derive(Parser, Debug)]
#[command(
    name = "magicrank",
    version,
    about = "Stabilizer-rank decompositions, certificates and injection sweeps"
)]
struct Cli {
    /// Output directory for JSON artifacts.
    #[arg(long, global = true, env = OUT_ENV)]
    out: Option<PathBuf>,
    /// Worker threads for certify and sweep.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone)]
struct TargetArgs {
    /// Magic state: S, N, H3, T3, H or T.
    #[arg(long)]
    target: MagicId,
    /// Number of copies.
    #[arg(long)]
    m: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a stabilizer catalog and write it as JSON lines.
    Catalog {
        #[arg(long)]
        p: u8,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "raw")]
        mode: CatalogMode,
    },
    /// Verify fixture or file decompositions.
    Verify {
        #[arg(long, conflicts_with_all = ["all_fixtures", "file"])]
        fixture: Option<String>,
        #[arg(long, conflicts_with = "file")]
        all_fixtures: bool,
        #[arg(long)]
        file: Option<PathBuf>,
        /// Also verify in exact cyclotomic arithmetic.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = VERIFY_TOL)]
        tol: f64,
    },
    /// Simulated-annealing search for a rank-r decomposition.
    Search {
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        chains: Option<usize>,
        #[arg(long)]
        steps: Option<u64>,
        #[arg(long)]
        cooling: Option<f64>,
        #[arg(long)]
        initial_temperature: Option<f64>,
        #[arg(long, default_value_t = WITNESS_TOL)]
        tol: f64,
        /// `full` or `product`; defaults by catalog size.
        #[arg(long)]
        scope: Option<CatalogScope>,
    },
    /// Exhaustively rule out rank-r decompositions over a shard of tuples.
    Certify {
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long)]
        r: usize,
        /// `i/N`.
        #[arg(long, default_value = "0/1")]
        shard: String,
        #[arg(long, default_value = "raw")]
        mode: CatalogMode,
        /// Catalog JSON lines to use instead of building one.
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long, default_value_t = WITNESS_TOL)]
        tol: f64,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        resume: bool,
    },
    /// Merge shard certificates.
    Merge {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Audit a certificate.
    Audit {
        file: PathBuf,
        #[arg(long, default_value_t = AUDIT_SAMPLES)]
        samples: usize,
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Exhaustive two-qutrit protocol sweeps.
    Sweep {
        kind: SweepKind,
        #[arg(long)]
        state: MagicId,
        /// Fail unless the injection gadget for this state is recovered.
        #[arg(long)]
        positive_control: Option<MagicId>,
    },
    /// Projective Clifford orbit of a single-qutrit magic state.
    Orbit {
        #[arg(long)]
        state: MagicId,
    },
    /// Modulus-ratio lower bound.
    Bound {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        state: Option<MagicId>,
    },
    /// `log_p(r) / m`.
    Exponent {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 3)]
        p: u32,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SweepKind {
    Twocopy,
    Injection,
}

impl clap::ValueEnum for MagicId {
    fn value_variants<'a>() -> &'a [Self] {
        &MagicId::ALL
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(self.name()))
    }

    fn from_str(input: &str, _ignore_case: bool) -> std::result::Result<Self, String> {
        input.parse().map_err(|e: Error| e.to_string())
    }
}

impl clap::ValueEnum for CatalogMode {
    fn value_variants<'a>() -> &'a [Self] {
        &[CatalogMode::Raw, CatalogMode::Dedupe]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            CatalogMode::Raw => "raw",
            CatalogMode::Dedupe => "dedupe",
        }))
    }
}

impl clap::ValueEnum for CatalogScope {
    fn value_variants<'a>() -> &'a [Self] {
        &[CatalogScope::Full, CatalogScope::Product]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            CatalogScope::Full => "full",
            CatalogScope::Product => "product",
        }))
    }
}

/// Outcome of a command that ran to completion.
struct Outcome {
    ok: bool,
    summary: String,
}

struct Ctx {
    out: PathBuf,
}

impl Ctx {
    /// Write `payload` as `<out>/<name>.json`, adding `kind` and a schema
    /// `version` unless the payload carries its own.
    fn write(
        &self,
        name: &str,
        kind: &str,
        version: u32,
        payload: &impl Serialize,
    ) -> Result<PathBuf> {
        let mut v = serde_json::to_value(payload)?;
        let v = match v {
            Value::Object(ref mut map) => {
                let mut out = serde_json::Map::new();
                out.insert("kind".into(), Value::String(kind.into()));
                if !map.contains_key("version") {
                    out.insert("version".into(), Value::from(version));
                }
                out.append(map);
                Value::Object(out)
            }
            other => serde_json::json!({ "kind": kind, "version": version, "items": other }),
        };
        std::fs::create_dir_all(&self.out)?;
        let path = self.out.join(format!("{name}.json"));
        std::fs::write(&path, serde_json::to_string_pretty(&v)? + "\n")?;
        Ok(path)
    }
}

/// Parse `argv` (including the program name) and run; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let ctx = Ctx {
        out: cli.out.clone().unwrap_or_else(|| PathBuf::from(".")),
    };
    let result = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
        {
            Ok(pool) => pool.install(|| dispatch(&ctx, cli.cmd)),
            Err(e) => Err(Error::InvalidInput(e.to_string())),
        },
        None => dispatch(&ctx, cli.cmd),
    };
    match result {
        Ok(o) => {
            println!("{}", o.summary);
            if o.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidInput(_)
                | Error::Parse(_)
                | Error::UnknownTarget(_)
                | Error::ShardRange(_)
                | Error::DimensionMismatch(_) => 2,
                _ => 1,
            }
        }
    }
}

fn parse_shard(s: &str, total: u64) -> Result<ShardSpec> {
    let (i, n) = s
        .split_once('/')
        .ok_or_else(|| Error::Parse(format!("shard {s:?} is not i/N")))?;
    let i: u64 = i
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad shard index in {s:?}")))?;
    let n: u64 = n
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad shard count in {s:?}")))?;
    ShardSpec::new(i, n, total)
}

fn load_catalog(
    path: Option<&Path>,
    p: u8,
    n: usize,
    mode: CatalogMode,
) -> Result<StabilizerCatalog> {
    match path {
        Some(path) => {
            let f = std::io::BufReader::new(std::fs::File::open(path)?);
            StabilizerCatalog::read_jsonl(f)
        }
        None => StabilizerCatalog::build(p, n, mode),
    }
}

#[derive(Serialize)]
struct VerifyEntry {
    name: String,
    target: String,
    rank: usize,
    numeric_residual: f64,
    exact: Option<bool>,
    ok: bool,
}

fn verify_one(name: &str, d: &Decomposition, exact: bool, tol: f64) -> Result<VerifyEntry> {
    d.check_shape()?;
    let numeric_residual = d.verify_numeric()?;
    let exact_ok = if exact {
        Some(d.verify_exact()?.ok)
    } else {
        None
    };
    Ok(VerifyEntry {
        name: name.into(),
        target: d.target.to_string(),
        rank: d.rank(),
        numeric_residual,
        ok: numeric_residual <= tol && exact_ok != Some(false),
        exact: exact_ok,
    })
}

fn dispatch(ctx: &Ctx, cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Catalog { p, n, mode } => {
            let cat = StabilizerCatalog::build(p, n, mode)?;
            std::fs::create_dir_all(&ctx.out)?;
            let path = ctx
                .out
                .join(format!("catalog_p{p}_n{n}_{}.jsonl", mode_name(mode)));
            let mut w = std::io::BufWriter::new(std::fs::File::create(&path)?);
            cat.write_jsonl(&mut w)?;
            let summary = serde_json::json!({
                "p": p, "n": n, "mode": mode, "count": cat.len(),
                "hash": cat.content_hash(), "path": path,
            });
            ctx.write(
                &format!("catalog_p{p}_n{n}_{}", mode_name(mode)),
                "catalog-summary",
                CATALOG_VERSION,
                &summary,
            )?;
            Ok(Outcome {
                ok: true,
                summary: format!(
                    "catalog p={p} n={n} {}: {} states, sha256 {}",
                    mode_name(mode),
                    cat.len(),
                    cat.content_hash()
                ),
            })
        }
        Command::Verify {
            fixture,
            all_fixtures,
            file,
            exact,
            tol,
        } => {
            let items: Vec<(String, Decomposition)> = if all_fixtures {
                fixtures::all()?
                    .into_iter()
                    .map(|(n, d)| (n.to_string(), d))
                    .collect()
            } else if let Some(name) = fixture {
                vec![(name.clone(), fixtures::load(&name)?)]
            } else if let Some(path) = file {
                let text = std::fs::read_to_string(&path)?;
                let d: Decomposition = serde_json::from_str(&text).or_else(|_| {
                    serde_json::from_value::<Value>(serde_json::from_str(&text)?).and_then(|v| {
                        serde_json::from_value(
                            v.get("decomposition").cloned().unwrap_or(Value::Null),
                        )
                    })
                })?;
                vec![(path.display().to_string(), d)]
            } else {
                return Err(Error::InvalidInput(
                    "give --fixture, --all-fixtures or --file".into(),
                ));
            };
            let entries: Vec<VerifyEntry> = items
                .iter()
                .map(|(n, d)| verify_one(n, d, exact, tol))
                .collect::<Result<_>>()?;
            let ok = entries.iter().all(|e| e.ok);
            let lines: Vec<String> = entries
                .iter()
                .map(|e| {
                    let ex = match e.exact {
                        Some(true) => ", exact ok",
                        Some(false) => ", exact FAILED",
                        None => "",
                    };
                    format!(
                        "{} {}: rank {}, residual {:.2e}{ex}",
                        if e.ok { "PASS" } else { "FAIL" },
                        e.name,
                        e.rank,
                        e.numeric_residual
                    )
                })
                .collect();
            ctx.write(
                "verify",
                "verify-report",
                DECOMPOSITION_VERSION,
                &serde_json::json!({ "ok": ok, "entries": entries }),
            )?;
            Ok(Outcome {
                ok,
                summary: lines.join("\n"),
            })
        }
        Command::Search {
            target,
            r,
            seed,
            chains,
            steps,
            cooling,
            initial_temperature,
            tol,
            scope,
        } => {
            let t = MagicTarget::new(target.target, target.m)?;
            let mut cfg = AnnealConfig::new(t, r, seed);
            cfg.tol = tol;
            if let Some(c) = chains {
                cfg.chains = c;
            }
            if let Some(s) = steps {
                cfg.steps = s;
            }
            if let Some(c) = cooling {
                cfg.cooling = c;
            }
            cfg.initial_temperature = initial_temperature;
            if let Some(s) = scope {
                cfg.scope = s;
            }
            let res = cfg.run()?;
            let replay = match &res.decomposition {
                Some(d) => Some(d.verify_numeric()?),
                None => None,
            };
            let name = format!("search_{}_m{}_r{r}", t.id.name(), t.m);
            ctx.write(&name, "search-result", DECOMPOSITION_VERSION, &serde_json::json!({
                "config": cfg, "result": res, "decomposition": res.decomposition, "replay_residual": replay,
            }))?;
            let summary = format!(
                "{t} r={r}: {} after {} chains, best residual {:.3e}{}",
                if res.success {
                    "witness found"
                } else {
                    "no witness"
                },
                res.chains.len(),
                res.best_residual,
                if res.decomposition.is_some() {
                    ", exact snap verified"
                } else {
                    ""
                }
            );
            Ok(Outcome {
                ok: res.success,
                summary,
            })
        }
        Command::Certify {
            target,
            r,
            shard,
            mode,
            catalog,
            tol,
            checkpoint,
            resume,
        } => {
            let t = MagicTarget::new(target.target, target.m)?;
            let cat = load_catalog(catalog.as_deref(), t.p(), t.m, mode)?;
            let total = total_tuples(cat.len(), r)?;
            let spec = parse_shard(&shard, total)?;
            let progress = |p: Progress| {
                let rate = p.done as f64 / p.elapsed_s.max(1e-9);
                let eta = (p.total - p.done) as f64 / rate.max(1e-9);
                eprintln!(
                    "{}/{} tuples, {:.3e}/s, eta {:.0}s",
                    p.done, p.total, rate, eta
                );
            };
            let opts = CertifyOptions {
                checkpoint: checkpoint.as_deref(),
                resume,
                progress: Some(&progress),
                ..Default::default()
            };
            let cert = certify_rank_with(&t, r, &cat, spec, tol, &opts)?;
            let name = format!(
                "cert_{}_m{}_r{r}_{}of{}",
                t.id.name(),
                t.m,
                spec.index,
                spec.count
            );
            let path = ctx.write(&name, "certificate", cert.version, &cert)?;
            Ok(Outcome {
                ok: true,
                summary: cert_summary(&cert, &path),
            })
        }
        Command::Merge { files } => {
            let certs: Vec<Certificate> = files.iter().map(read_cert).collect::<Result<_>>()?;
            let merged = merge_certificates(&certs)?;
            let name = format!(
                "cert_{}_m{}_r{}_merged",
                merged.target.name(),
                merged.m,
                merged.r
            );
            let path = ctx.write(&name, "certificate", merged.version, &merged)?;
            Ok(Outcome {
                ok: true,
                summary: cert_summary(&merged, &path),
            })
        }
        Command::Audit {
            file,
            samples,
            catalog,
        } => {
            let cert = read_cert(&file)?;
            let t = MagicTarget::new(cert.target, cert.m)?;
            let cat = load_catalog(catalog.as_deref(), cert.p, cert.m, cert.catalog_mode)?;
            let rep = audit(&cert, &cat, &t, samples);
            ctx.write("audit", "audit-report", cert.version, &rep)?;
            let summary = match &rep.first_failure {
                None => format!("audit PASS ({} resampled tuples)", rep.samples),
                Some(f) => format!("audit FAIL: {f}"),
            };
            Ok(Outcome {
                ok: rep.passed,
                summary,
            })
        }
        Command::Sweep {
            kind,
            state,
            positive_control,
        } => {
            let us = sp4_unitaries()?;
            match kind {
                SweepKind::Twocopy => {
                    let rep = sweep_two_copy(state, &us)?;
                    ctx.write(
                        &format!("sweep_twocopy_{}", state.name()),
                        "two-copy-sweep",
                        rep.version,
                        &rep,
                    )?;
                    Ok(Outcome {
                        ok: true,
                        summary: format!(
                            "two-copy {state}: {} branches, {} phase-state hits, {} non-Clifford",
                            rep.branches_tested, rep.phase_state_hits, rep.nonclifford_hits
                        ),
                    })
                }
                SweepKind::Injection => {
                    let rep = sweep_injection(state, &us)?;
                    ctx.write(
                        &format!("sweep_injection_{}", state.name()),
                        "injection-sweep",
                        rep.version,
                        &rep,
                    )?;
                    let mut ok = true;
                    let mut summary = format!(
                        "injection {state}: {} deterministic gadgets",
                        rep.gadgets.len()
                    );
                    if let Some(pc) = positive_control {
                        if pc != MagicId::T3 || state != MagicId::T3 {
                            return Err(Error::InvalidInput(
                                "the positive control is defined for --state T3 only".into(),
                            ));
                        }
                        let t = t3_gate();
                        let found = rep.gadgets.iter().any(|g| {
                            let u =
                                crate::clifford::CMatrix::from_fn(3, 3, |i, j| g.injected[i][j]);
                            equivalent_up_to_clifford(&u, &t)
                        });
                        ok = found;
                        summary += if found {
                            "; positive control recovered"
                        } else {
                            "; positive control MISSING"
                        };
                    }
                    Ok(Outcome { ok, summary })
                }
            }
        }
        Command::Orbit { state } => {
            if state.p() != 3 {
                return Err(Error::InvalidInput(
                    "orbits are computed for qutrit states".into(),
                ));
            }
            let orbit = orbit_closure(&state.amplitudes(), &standard_generators());
            let stab = stabilizer_order(&state.amplitudes());
            let witnesses = orbit
                .elements
                .iter()
                .filter(|v| find_ratio_witness(v).is_some())
                .count();
            ctx.write(
                &format!("orbit_{}", state.name()),
                "orbit",
                1,
                &serde_json::json!({
                    "state": state, "size": orbit.len(), "stabilizer_order": stab,
                    "ratio_witnesses": witnesses, "elements": orbit.elements,
                }),
            )?;
            Ok(Outcome {
                ok: true,
                summary: format!("{state}: orbit size {}, stabilizer order {stab}, {witnesses} elements with a ratio witness", orbit.len()),
            })
        }
        Command::Bound { m, state } => {
            let bound = moulton_bound(m)?;
            let (witness, seq, applies) = match state {
                Some(s) => {
                    let w = find_ratio_witness(&s.amplitudes());
                    let seq = exp_subsequence(&s.amplitudes(), m as usize).ok();
                    (w, seq, w.is_some())
                }
                None => (None, None, true),
            };
            ctx.write(
                "bound",
                "bound",
                1,
                &serde_json::json!({
                    "m": m, "state": state, "bound": bound, "applies": applies,
                    "witness": witness, "subsequence": seq,
                }),
            )?;
            let summary = if applies {
                format!("chi >= {bound:.4} at m={m}")
            } else {
                format!(
                    "no modulus-ratio witness for {}: bound does not apply",
                    state.map_or("?", |s| s.name())
                )
            };
            Ok(Outcome { ok: true, summary })
        }
        Command::Exponent { r, m, p } => {
            if r == 0 || m == 0 || p < 2 {
                return Err(Error::InvalidInput("need r >= 1, m >= 1, p >= 2".into()));
            }
            let e = exponent_from_bound(r, m, p);
            ctx.write(
                "exponent",
                "exponent",
                1,
                &serde_json::json!({ "r": r, "m": m, "p": p, "exponent": e }),
            )?;
            Ok(Outcome {
                ok: true,
                summary: format!("log_{p}({r})/{m} = {e:.6}"),
            })
        }
    }
}

fn mode_name(mode: CatalogMode) -> &'static str {
    match mode {
        CatalogMode::Raw => "raw",
        CatalogMode::Dedupe => "dedupe",
    }
}

fn read_cert(path: &PathBuf) -> Result<Certificate> {
    Certificate::from_json(&std::fs::read_to_string(path)?)
}

fn cert_summary(c: &Certificate, path: &Path) -> String {
    format!(
        "{}^{} r={}: {} of {} tuples, {} witnesses, min residual {}, {} -> {}",
        c.target,
        c.m,
        c.r,
        c.tuples_tested,
        c.total_tuples,
        c.witnesses.len(),
        c.min_nonwitness_residual
            .map_or("n/a".into(), |x| format!("{x:.4}")),
        if c.rules_out {
            format!("rules out rank {}", c.r)
        } else if c.complete {
            "complete".into()
        } else {
            "partial".into()
        },
        path.display()
    )
}
