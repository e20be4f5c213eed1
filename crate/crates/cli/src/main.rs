mod certs;
mod config;
mod report;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use conefield::manifold::{analytic_check, cone_e, manifold_bounds, verify_block, AnalyticCheck, AnalyticParams, HSetBlock, ManifoldError};
use conefield::scout::{bisect_candidates_with, simulate, ScoutConfig, ScoutError, TimeScale};
use conefield::shooting::{prove_all, prove_orbit, ProofConfig, ProveOptions};
use conefield::systems::FieldId;

use certs::{Envelope, Payload, SideReport};

#[derive(Parser)]
#[command(name = "conefield", version, about = "Validated proof pipeline for connecting orbits")]
struct Cli {
    /// TOML configuration (overrides $CONEFIELD_CONFIG; defaults otherwise)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy, Default)]
struct BlockOverrides {
    /// Set both Begin radii
    #[arg(long)]
    db: Option<f64>,
    #[arg(long)]
    db1: Option<f64>,
    #[arg(long)]
    db2: Option<f64>,
    #[arg(long)]
    de1: Option<f64>,
    #[arg(long)]
    de2: Option<f64>,
}

impl BlockOverrides {
    fn apply(&self, cfg: &mut ProofConfig) {
        let b = &mut cfg.blocks;
        if let Some(d) = self.db {
            b.db1 = d;
            b.db2 = d;
        }
        b.db1 = self.db1.unwrap_or(b.db1);
        b.db2 = self.db2.unwrap_or(b.db2);
        b.de1 = self.de1.unwrap_or(b.de1);
        b.de2 = self.de2.unwrap_or(b.de2);
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Scale {
    Rho,
    R,
    Mixed,
}

impl From<Scale> for TimeScale {
    fn from(s: Scale) -> Self {
        match s {
            Scale::Rho => TimeScale::Rho,
            Scale::R => TimeScale::R,
            Scale::Mixed => TimeScale::Mixed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Verify both isolating blocks
    Blocks {
        #[command(flatten)]
        over: BlockOverrides,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cone constants of both blocks
    Cones {
        #[command(flatten)]
        over: BlockOverrides,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full manifold certificates (E, m, lip_t)
    Bounds {
        #[command(flatten)]
        over: BlockOverrides,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the shooting proof
    Prove {
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        orbit: Option<usize>,
        #[arg(long)]
        all: bool,
        /// r-slices for the refined F′ (bare flag: the configured count)
        #[arg(long, num_args = 0..=1, default_missing_value = "0")]
        refine: Option<usize>,
        /// Certificate file (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Nonrigorous bisection for a candidate r̂
    Search {
        #[arg(long)]
        orbit: usize,
        /// Bracket in r (default: ±10% around the configured r̂)
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        bracket: Option<Vec<f64>>,
        /// Write a config fragment with the suggestion
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export a nonrigorous trajectory as CSV
    Trace {
        /// Start radius (default: r̂ of --orbit)
        #[arg(long)]
        r0: Option<f64>,
        #[arg(long)]
        orbit: Option<usize>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        yb: f64,
        #[arg(long, default_value_t = 30.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Scale::Mixed)]
        scale: Scale,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a certificate file side by side with reference values
    Report { file: PathBuf },
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                so.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Depth {
    Blocks,
    Cones,
    Bounds,
}

/// Begin block over ρ ≤ ln(max r⁺) of the configured candidates.
fn begin_block(cfg: &ProofConfig) -> anyhow::Result<HSetBlock> {
    let top = cfg
        .candidates
        .iter()
        .max_by(|a, b| a.r_plus().hi().total_cmp(&b.r_plus().hi()))
        .context("the configuration has no candidates")?;
    Ok(cfg.begin_block(top)?)
}

fn side(id: FieldId, block: &HSetBlock, cfg: &ProofConfig, depth: Depth) -> anyhow::Result<SideReport> {
    let opts = &cfg.manifold;
    let q = cfg.cone()?;
    let cert = verify_block(id, block, opts)?;
    let analytic_block = (id == FieldId::Begin && block.d1 == block.d2).then(|| {
        analytic_check(AnalyticCheck::BeginBlock, &AnalyticParams { d1: block.d1, d2: block.d2, ..AnalyticParams::default() })
    });
    let mut report = SideReport { field: format!("{id:?}"), block: cert, analytic_block, cone: None, bounds: None, failure: None };
    if !report.block.verdict {
        report.failure = Some("isolating block not verified".into());
        return Ok(report);
    }
    match depth {
        Depth::Blocks => {}
        Depth::Cones => match cone_e(id, block, &q, opts) {
            Ok(e) if e.lo() > 0.0 => report.cone = Some(e),
            Ok(e) => {
                report.cone = Some(e);
                report.failure = Some(format!("cone constant not positive: {e}"));
            }
            Err(ManifoldError::PreconditionNotCertified(s)) => report.failure = Some(s),
            Err(e) => return Err(e.into()),
        },
        Depth::Bounds => match manifold_bounds(id, block, &q, opts) {
            Ok(b) => {
                report.cone = Some(b.e);
                report.bounds = Some(b);
            }
            Err(ManifoldError::PreconditionNotCertified(s)) => report.failure = Some(s),
            Err(e) => return Err(e.into()),
        },
    }
    Ok(report)
}

fn manifold_cmd(cfg: &ProofConfig, depth: Depth, out: Option<&Path>) -> anyhow::Result<u8> {
    let sides = vec![
        side(FieldId::Begin, &begin_block(cfg)?, cfg, depth)?,
        side(FieldId::End, &cfg.end_block()?, cfg, depth)?,
    ];
    let ok = sides.iter().all(|s| s.analytic_block.is_none_or(|a| a.holds) && s.failure.is_none());
    for s in &sides {
        if !s.block.verdict {
            eprintln!("{}Block failure: face signs {:?}", s.field, s.block.face_bounds.map(|x| x.to_string()));
        }
        if s.analytic_block.is_some_and(|a| !a.holds) {
            eprintln!("{}Block failure: closed-form condition d < 1/2 violated", s.field);
        }
        if let Some(f) = &s.failure {
            eprintln!("{} failure: {f}", s.field);
        }
    }
    emit(out, &Envelope::new(config::digest(cfg), Payload::Manifold { sides }).to_json())?;
    Ok(if ok { 0 } else { 1 })
}

fn prove_cmd(cfg: &ProofConfig, orbit: Option<usize>, refine: Option<usize>, out: Option<&Path>) -> anyhow::Result<u8> {
    let refine = refine.map(|k| if k == 0 { cfg.subdivisions.refine_count } else { k });
    let opts = ProveOptions { refine };
    let t = Instant::now();
    let certs = match orbit {
        Some(n) => vec![prove_orbit(&config::require_candidate(cfg, n)?, cfg, opts)?],
        None => prove_all(cfg, opts)?,
    };
    for c in &certs {
        eprintln!("n = {}: {:?}  F′ = {}", c.candidate.n, c.verdict, c.f_prime.map_or("—".into(), |f| f.to_string()));
    }
    eprintln!("{} orbit(s) in {:.1} s", certs.len(), t.elapsed().as_secs_f64());
    let code = certs::exit_code(certs.iter().map(|c| &c.verdict));
    emit(out, &Envelope::new(config::digest(cfg), Payload::OrbitProofs { refine, certificates: certs }).to_json())?;
    Ok(code)
}

fn scout_config(cfg: &ProofConfig) -> ScoutConfig {
    ScoutConfig { db1: cfg.blocks.db1, de1: cfg.blocks.de1, de2: cfg.blocks.de2, ..ScoutConfig::default() }
}

fn search_cmd(cfg: &ProofConfig, n: usize, bracket: Option<Vec<f64>>, out: Option<&Path>) -> anyhow::Result<u8> {
    let bracket = match bracket.as_deref() {
        Some(&[lo, hi]) => (lo, hi),
        Some(_) => bail!("--bracket takes two values"),
        None => {
            let c = config::require_candidate(cfg, n).context("give --bracket for candidates outside the configuration")?;
            (0.9 * c.r_hat, 1.1 * c.r_hat)
        }
    };
    match bisect_candidates_with(n, bracket, &scout_config(cfg), 1e-9) {
        Ok(s) => {
            println!("{}", serde_json::to_string_pretty(&s)?);
            if let Some(p) = out {
                // Full config with the suggestion swapped in, usable via --config.
                let mut next = cfg.clone();
                next.candidates.retain(|c| c.n != n);
                next.candidates.push(s.candidate);
                next.candidates.sort_by_key(|c| c.n);
                let frag = format!("# NONRIGOROUS bisection suggestion for n = {n}; prove before relying on it.\n{}", config::to_toml(&next)?);
                std::fs::write(p, frag).with_context(|| format!("writing {}", p.display()))?;
            }
            Ok(0)
        }
        Err(e @ ScoutError::NoSignChange { .. }) => {
            eprintln!("{e}");
            Ok(1)
        }
        Err(e) => Err(e.into()),
    }
}

#[allow(clippy::too_many_arguments)]
fn trace_cmd(cfg: &ProofConfig, r0: Option<f64>, orbit: Option<usize>, yb: f64, t_end: f64, tol: f64, scale: Scale, out: Option<&Path>) -> anyhow::Result<u8> {
    let r0 = match (r0, orbit) {
        (Some(r), _) => r,
        (None, Some(n)) => config::require_candidate(cfg, n)?.r_hat,
        (None, None) => bail!("give --r0 or --orbit"),
    };
    let tr = simulate(r0, yb, t_end, tol)?.with_scale(scale.into());
    let mut buf = Vec::new();
    tr.write_csv(&mut buf)?;
    emit(out, std::str::from_utf8(&buf)?)?;
    Ok(0)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    if let Command::Report { file } = &cli.command {
        print!("{}", report::render(&Envelope::read(file)?));
        return Ok(0);
    }
    let mut cfg = config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Blocks { over, out } => {
            over.apply(&mut cfg);
            manifold_cmd(&cfg, Depth::Blocks, out.as_deref())
        }
        Command::Cones { over, out } => {
            over.apply(&mut cfg);
            manifold_cmd(&cfg, Depth::Cones, out.as_deref())
        }
        Command::Bounds { over, out } => {
            over.apply(&mut cfg);
            manifold_cmd(&cfg, Depth::Bounds, out.as_deref())
        }
        Command::Prove { orbit, all: _, refine, out } => prove_cmd(&cfg, orbit, refine, out.as_deref()),
        Command::Search { orbit, bracket, out } => search_cmd(&cfg, orbit, bracket, out.as_deref()),
        Command::Trace { r0, orbit, yb, t_end, tol, scale, out } => trace_cmd(&cfg, r0, orbit, yb, t_end, tol, scale, out.as_deref()),
        Command::Report { .. } => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(3),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
