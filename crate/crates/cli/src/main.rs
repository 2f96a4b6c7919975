//! `renorm`: batch front end for renorm-core. Every subcommand writes CSV and
//! JSON artifacts (SVG on request) into `--out` and prints a JSON summary.

mod commands;
mod config;
mod error;
mod output;

use clap::{Args, Parser, Subcommand};
use config::FileConfig;
use error::CliError;
use output::{Artifacts, Formats};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "renorm", version, about = "Spectra of Schreier graphs by Schur renormalization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

/// Flags shared by every subcommand. Each may also come from `--config`;
/// flags win.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// key=value file with defaults for any of the flags below
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// grigorchuk, lamplighter or hanoi
    #[arg(long, global = true)]
    pub group: Option<String>,
    /// map or model name (rg, gg, rl, rh, square, cheb, cantor, hanoi)
    #[arg(long, global = true)]
    pub map: Option<String>,
    /// blow-up surface: grigorchuk4, lamplighter2 or hanoi4
    #[arg(long, global = true)]
    pub surface: Option<String>,
    #[arg(long, global = true)]
    pub level: Option<usize>,
    #[arg(long, global = true)]
    pub iters: Option<usize>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// comma-separated subset of csv,json,svg
    #[arg(long, global = true)]
    pub format: Option<Formats>,
    /// fail with exit status 1 unless the expected values are reproduced
    #[arg(long, global = true)]
    pub check: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Eigenvalues of one level and their atoms
    Spectrum,
    /// Distances of successive densities of states to the limit
    DosCompare {
        #[arg(long)]
        min_level: Option<usize>,
    },
    /// Exact check of the determinant recursion at random rational points
    SchurVerify {
        /// also verify the contracted-curve and chart catalog
        #[arg(long)]
        contracted: bool,
    },
    /// Exact and sampled conjugacy identities
    ConjugacyVerify,
    /// Degree sequence and dynamical degree of a plane map
    Dyndeg,
    /// Action on cohomology of a blow-up surface and invariant classes
    Cohomology,
    /// Renormalization potential on a real window
    PotentialGrid {
        /// x0,x1,y0,y1
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
    },
    /// Backward orbit of the repelling fixed point of a quadratic
    Julia {
        /// full or random
        #[arg(long)]
        mode: Option<String>,
    },
    /// Model-system experiments: twist, skew or backward
    Experiment {
        kind: String,
        /// base point of the skew fiber or seed of the backward orbit
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<f64>,
    },
}

/// Common flags merged with the config file.
pub struct Settings {
    pub file: FileConfig,
    pub group: Option<String>,
    pub map: Option<String>,
    pub surface: Option<String>,
    pub level: Option<usize>,
    pub iters: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub check: bool,
}

fn settings(c: &Common) -> Result<(Settings, PathBuf, Formats), CliError> {
    let file = match &c.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let out = file.pick(c.out.clone(), "out")?.unwrap_or_else(|| PathBuf::from("renorm-out"));
    let formats = file.pick(c.format, "format")?.unwrap_or_default();
    let s = Settings {
        group: file.pick(c.group.clone(), "group")?,
        map: file.pick(c.map.clone(), "map")?,
        surface: file.pick(c.surface.clone(), "surface")?,
        level: file.pick(c.level, "level")?,
        iters: file.pick(c.iters, "iters")?,
        samples: file.pick(c.samples, "samples")?,
        seed: file.pick(c.seed, "seed")?,
        check: file.flag(c.check, "check")?,
        file,
    };
    Ok((s, out, formats))
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SPECTRAL_RENORM_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("SPECTRAL_RENORM_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let (s, out, formats) = settings(&cli.common)?;
    let mut art = Artifacts::new(&out, formats)?;
    let outcome = commands::dispatch(&cli.command, &s, &mut art)?;
    let files: Vec<String> = art.written.iter().map(|p| p.display().to_string()).collect();
    let summary = serde_json::json!({
        "command": outcome.command,
        "passed": outcome.passed,
        "summary": outcome.summary,
        "files": files,
    });
    println!("{}", serde_json::to_string(&summary).expect("serializable"));
    match outcome.passed {
        Some(false) => Err(CliError::Verification(outcome.failure.unwrap_or_else(|| "see report".into()))),
        _ => Ok(()),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            let err = CliError::Config(e.to_string());
            eprintln!("{}", err.to_json());
            std::process::exit(err.exit_code());
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("{}", e.to_json());
        std::process::exit(e.exit_code());
    }
}
