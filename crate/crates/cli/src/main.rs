//! `finslerclass` command-line front end. Reports go to stdout as JSON, a
//! one-line human summary goes to stderr.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use finslerclass::coset::{space_from_json, PRESET_NAMES};
use finslerclass::curvature::{find_zero_witness, sample_flags};
use finslerclass::norms::{random_invariant_norm, random_invariant_randers, MinkowskiNorm};
use finslerclass::numeric::tol;
use finslerclass::obstruct::{classify_and_label, verify_theorem};
use finslerclass::{build_root_system, parse_preset, CosetSpace, Error, Family};

const EXIT_VALIDATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

/// Zero-curvature witness thresholds.
const WITNESS_U: f64 = 1e-7;
const WITNESS_K: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "finslerclass", version, about = "Root-system classification and flag curvature of homogeneous Finsler spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump a root system.
    Roots {
        /// A, B, C, D, E6, E7, E8, F4 or G2.
        family: String,
        rank: usize,
    },
    /// Build and validate a coset space.
    Space {
        #[command(subcommand)]
        action: SpaceAction,
    },
    /// Classify a coset space.
    Classify(SpaceArg),
    /// Sample flag curvatures under an invariant norm.
    Curvature {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long, value_enum, default_value_t = MetricKind::Quartic)]
        metric: MetricKind,
        /// JSON norm file; overrides `--metric`.
        #[arg(long)]
        norm_file: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build a root-plane flag with U(u,v) = 0 and check K = 0 under a
    /// random reversible invariant norm.
    Witness {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Re-derive a survivor list and diff it against the expected one.
    Verify {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        theorem: u8,
        #[arg(long, default_value_t = 8)]
        max_rank: usize,
    },
}

#[derive(Subcommand)]
enum SpaceAction {
    Build {
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        file: Option<PathBuf>,
        /// e.g. `sphere_un(3)`.
        #[arg(long)]
        preset: Option<String>,
    },
}

#[derive(Args)]
struct SpaceArg {
    /// `preset:NAME(ARGS)`, `file:PATH`, or a path to a space JSON file.
    #[arg(long)]
    space: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricKind {
    /// Bi-invariant (normal homogeneous) Riemannian metric.
    Normal,
    /// Random reversible invariant quartic norm.
    Quartic,
    /// Random invariant Randers norm.
    Randers,
}

enum Failure {
    Usage(String),
    Validation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

type Outcome = Result<(Value, u8, String), Failure>;

fn tolerances() -> Value {
    json!({ "exact": tol::EXACT, "solve": tol::SOLVE, "fd": tol::FD, "closure": tol::CLOSURE })
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn load_space(spec: &str) -> Result<CosetSpace, Failure> {
    if let Some(p) = spec.strip_prefix("preset:") {
        return Ok(parse_preset(p)?);
    }
    let path = spec.strip_prefix("file:").unwrap_or(spec);
    match std::fs::read_to_string(path) {
        Ok(text) => Ok(space_from_json(&text)?),
        Err(e) if spec.starts_with("file:") => Err(Failure::Validation(format!("cannot read {path}: {e}"))),
        Err(_) => Err(Failure::Usage(format!(
            "--space must be preset:NAME(ARGS), file:PATH or an existing file; known presets: {}",
            PRESET_NAMES.join(", ")
        ))),
    }
}

fn roots(family: &str, rank: usize) -> Outcome {
    let fam: Family = family.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
    let rs = build_root_system(fam, rank)?;
    let positive = rs.positive_roots();
    let simple = rs.simple_roots();
    let summary = format!("{}: {} roots, {} positive", fam.label(rank), rs.roots.len(), positive.len());
    let report = json!({
        "family": fam.label(rank),
        "rank": rank,
        "ambient_dim": rs.ambient_dim,
        "count": rs.roots.len(),
        "roots": to_value(&rs.roots),
        "positive_roots": to_value(&positive),
        "simple_roots": to_value(&simple),
    });
    Ok((report, 0, summary))
}

fn space_build(file: Option<PathBuf>, preset: Option<String>) -> Outcome {
    let mut space = match (file, preset) {
        (Some(f), None) => load_space(&format!("file:{}", f.display()))?,
        (None, Some(p)) => parse_preset(&p)?,
        _ => return Err(Failure::Usage("exactly one of --file and --preset is required".into())),
    };
    let case = classify_and_label(&mut space).ok().map(|v| v.case.to_string());
    let summary = space.summary();
    let line = format!(
        "{}: dim g={} h={} m={}, rank check {}, {}",
        summary.name,
        summary.dim_g,
        summary.dim_h,
        summary.dim_m,
        if summary.rank.passes { "passes" } else { "fails" },
        case.as_deref().unwrap_or("no case label")
    );
    Ok((json!({ "space": to_value(&summary), "tolerances": tolerances() }), 0, line))
}

fn classify_cmd(spec: &str) -> Outcome {
    let mut space = load_space(spec)?;
    let verdict = classify_and_label(&mut space)?;
    let outcome = match verdict.survivor_name() {
        Some(n) => format!("survivor {}", n.instance),
        None if verdict.is_excluded() => format!("excluded ({})", verdict.witness.as_ref().map_or("-", |w| w.label())),
        None => "unresolved".to_string(),
    };
    let line = format!("{}: {}, {outcome}", space.meta.name, verdict.case);
    let report = json!({
        "space": space.meta.name,
        "algebra": to_value(&space.algebra.spec),
        "rank": space.algebra.spec.rank(),
        "case": verdict.case.to_string(),
        "subcase": verdict.subcase,
        "citation": verdict.citation,
        "verdict": to_value(&verdict),
        "tolerances": tolerances(),
    });
    Ok((report, 0, line))
}

fn build_norm(space: &CosetSpace, metric: MetricKind, file: Option<PathBuf>, seed: u64) -> Result<MinkowskiNorm, Failure> {
    if let Some(f) = file {
        let text = std::fs::read_to_string(&f).map_err(|e| Failure::Validation(format!("cannot read {}: {e}", f.display())))?;
        let norm: MinkowskiNorm = serde_json::from_str(&text).map_err(|e| Failure::Validation(format!("norm file: {e}")))?;
        if norm.dim() != space.dim_m() {
            return Err(Error::DimensionMismatch { expected: space.dim_m(), found: norm.dim() }.into());
        }
        return Ok(norm);
    }
    Ok(match metric {
        MetricKind::Normal => MinkowskiNorm::quadratic_identity(space.dim_m()),
        MetricKind::Quartic => random_invariant_norm(space, seed),
        MetricKind::Randers => random_invariant_randers(space, seed, 0.3)?,
    })
}

fn curvature_cmd(spec: &str, metric: MetricKind, norm_file: Option<PathBuf>, samples: usize, seed: u64) -> Outcome {
    let space = load_space(spec)?;
    let norm = build_norm(&space, metric, norm_file, seed)?;
    let report = sample_flags(&space, &norm, samples, seed);
    let line = format!(
        "{}: {} flags ({} eligible), K in [{:.6e}, {:.6e}], {} zero flags",
        space.meta.name,
        report.flags,
        report.eligible_flags,
        report.k_min,
        report.k_max,
        report.zero_flags.len()
    );
    let out = json!({
        "space": space.meta.name,
        "norm": { "family": norm.family(), "reversible": norm.is_reversible() },
        "seed": seed,
        "samples": samples,
        "report": to_value(&report),
        "tolerances": tolerances(),
    });
    Ok((out, 0, line))
}

fn witness_cmd(spec: &str, seed: u64) -> Outcome {
    let space = load_space(spec)?;
    let norm = random_invariant_norm(&space, seed);
    let w = find_zero_witness(&space, &norm, WITNESS_U, WITNESS_K);
    let (code, line) = match &w {
        Some(w) => (0, format!("{}: ‖U(u,v)‖ = {:.3e}, K = {:.3e} on planes {} / {}", space.meta.name, w.u_norm, w.k, w.root_u, w.root_v)),
        None => (EXIT_VALIDATION, format!("{}: no root-plane flag with U(u,v) = 0", space.meta.name)),
    };
    let out = json!({
        "space": space.meta.name,
        "seed": seed,
        "norm": { "family": norm.family(), "reversible": norm.is_reversible() },
        "thresholds": { "u_norm": WITNESS_U, "k": WITNESS_K },
        "witness": to_value(&w),
        "verified": w.is_some(),
        "tolerances": tolerances(),
    });
    Ok((out, code, line))
}

fn verify_cmd(part: u8, max_rank: usize) -> Outcome {
    let r = verify_theorem(part, max_rank)?;
    let line = format!(
        "part {part}, rank ≤ {max_rank}: {} configurations, {} survivor families, missing {:?}, unexpected {:?}, {} unresolved: {}",
        r.configurations,
        r.found_families.len(),
        r.missing,
        r.unexpected,
        r.unresolved.len(),
        if r.pass { "PASS" } else { "MISMATCH" }
    );
    let code = if r.pass { 0 } else { EXIT_MISMATCH };
    Ok((json!({ "report": to_value(&r), "tolerances": tolerances() }), code, line))
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("FINSLERCLASS_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| Failure::Usage(format!("FINSLERCLASS_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Validation(e.to_string()))
}

fn run(cli: Cli) -> Outcome {
    configure_threads()?;
    match cli.command {
        Command::Roots { family, rank } => roots(&family, rank),
        Command::Space { action: SpaceAction::Build { file, preset } } => space_build(file, preset),
        Command::Classify(s) => classify_cmd(&s.space),
        Command::Curvature { space, metric, norm_file, samples, seed } => curvature_cmd(&space.space, metric, norm_file, samples, seed),
        Command::Witness { space, seed } => witness_cmd(&space.space, seed),
        Command::Verify { theorem, max_rank } => verify_cmd(theorem, max_rank),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok((report, code, line)) => {
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("json"));
            eprintln!("{line}");
            ExitCode::from(code)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}
