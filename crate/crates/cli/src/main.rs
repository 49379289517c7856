mod commands;
mod figures;
mod settings;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value as Json};
use sha2::{Digest, Sha256};

use commands::Artifact;
use settings::{Overrides, Settings};

#[derive(Parser)]
#[command(name = "ptwalk", version, about = "PT-symmetric three-step quantum walk analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat TOML config; `[<subcommand>]` tables override top-level keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV artifacts and manifest.json.
    #[arg(long, global = true, default_value = "ptwalk-out")]
    out: PathBuf,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long = "k-res", global = true)]
    k_res: Option<usize>,
    #[arg(long, global = true)]
    sites: Option<usize>,
    #[arg(long, global = true)]
    steps: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Bloch dispersion of the homogeneous walk.
    Dispersion,
    /// Shifted winding number over a (theta1, theta2) grid.
    PhaseDiagram,
    /// Finite-system spectrum with state classification.
    Spectrum,
    /// Edge-state counts over a grid of outer coin angles.
    EdgeMap,
    /// Tracked edge eigenvalues over a grid of delta.
    DeltaSweep,
    /// Exceptional point by bisection in delta.
    EpFind,
    /// Spectra of a disordered ensemble.
    Disorder,
    /// Return probability p0(t) and its Fourier spectrum.
    Evolve,
    /// Edge-state count from p0(t) of a two-region walk.
    InferEdges,
    /// Runs the canned configuration behind a figure (fig2 .. fig13).
    Figure { id: String },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Dispersion => "dispersion",
            Command::PhaseDiagram => "phase-diagram",
            Command::Spectrum => "spectrum",
            Command::EdgeMap => "edge-map",
            Command::DeltaSweep => "delta-sweep",
            Command::EpFind => "ep-find",
            Command::Disorder => "disorder",
            Command::Evolve => "evolve",
            Command::InferEdges => "infer-edges",
            Command::Figure { .. } => "figure",
        }
    }
}

fn error_kind(e: &anyhow::Error) -> &'static str {
    use ptwalk_core::Error as E;
    match e.downcast_ref::<E>() {
        Some(E::Config(_)) => "config",
        Some(E::InvalidParameter(_) | E::LatticeTooSmall { .. } | E::NonFiniteAngle { .. }) => "invalid_parameter",
        Some(E::TooManySites { .. } | E::WindowCapExceeded { .. }) => "too_large",
        Some(E::Io(_)) => "io",
        Some(_) => "computation",
        None if e.downcast_ref::<std::io::Error>().is_some() => "io",
        None => "error",
    }
}

fn fail(kind: &str, message: String, code: u8) -> ExitCode {
    eprintln!("{}", json!({ "error": { "kind": kind, "message": message } }));
    ExitCode::from(code)
}

fn write_artifacts(out: &Path, artifacts: &[Artifact]) -> Result<Vec<Json>> {
    fs::create_dir_all(out).with_context(|| format!("cannot create output directory {}", out.display()))?;
    artifacts
        .iter()
        .map(|a| {
            let path = out.join(&a.name);
            fs::write(&path, &a.content).with_context(|| format!("cannot write {}", path.display()))?;
            Ok(json!({
                "file": a.name,
                "bytes": a.content.len(),
                "sha256": hex::encode(Sha256::digest(a.content.as_bytes())),
            }))
        })
        .collect()
}

fn prefixed(prefix: &str, artifacts: Vec<Artifact>) -> Vec<Artifact> {
    artifacts.into_iter().map(|a| Artifact { name: format!("{prefix}_{}", a.name), ..a }).collect()
}

fn execute(cli: &Cli) -> Result<()> {
    rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global()?;
    let text = match &cli.config {
        Some(p) => fs::read_to_string(p).with_context(|| format!("cannot read config {}", p.display()))?,
        None => String::new(),
    };
    let overrides = Overrides { seed: cli.seed, k_res: cli.k_res, sites: cli.sites, steps: cli.steps };
    // fail on an unwritable output path before any long computation
    fs::create_dir_all(&cli.out).with_context(|| format!("cannot create output directory {}", cli.out.display()))?;

    let mut manifest = json!({
        "tool": "ptwalk",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cli.command.name(),
        "threads": cli.threads,
        "float_format": "17 significant digits, scientific",
    });
    let mut artifacts = Vec::new();
    match &cli.command {
        Command::Figure { id } => {
            let mut panels = Vec::new();
            for p in figures::panels(id)? {
                let prefix = format!("{id}{}", p.name);
                log::info!("{prefix}: {}", p.subcommand);
                let mut s = Settings::new(&p.config, p.subcommand, &overrides)?;
                let out = commands::run(p.subcommand, &mut s)?;
                panels.push(json!({
                    "panel": prefix,
                    "subcommand": p.subcommand,
                    "config": s.finish()?,
                    "results": out.results,
                }));
                artifacts.extend(prefixed(&prefix, out.artifacts));
            }
            manifest["figure"] = json!(id);
            manifest["panels"] = json!(panels);
        }
        cmd => {
            let mut s = Settings::new(&text, cmd.name(), &overrides)?;
            let out = commands::run(cmd.name(), &mut s)?;
            manifest["config"] = s.finish()?;
            manifest["results"] = out.results;
            artifacts = out.artifacts;
        }
    }
    manifest["artifacts"] = json!(write_artifacts(&cli.out, &artifacts)?);
    let path = cli.out.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
        .with_context(|| format!("cannot write {}", path.display()))?;
    println!("{}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.to_string().trim().trim_start_matches("error: ").to_string(), 2),
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(error_kind(&e), format!("{e:#}"), 1),
    }
}
