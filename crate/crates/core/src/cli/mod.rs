//! Command-line front end: `run`, `verify` and `report`.

mod config;
mod report;
mod run;
mod verify;

pub use config::{preset_names, ConfigError, RunConfig, Tolerances};
pub use report::report;
pub use run::{run_experiment, Gate, Residuals, RunError, Summary};
pub use verify::{parse_lemmas, random_modes, verify_all, Check, VerifyOptions, VerifyReport};

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::flows::FlowKind;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "G2FLOW_THREADS";

#[derive(Parser, Debug)]
#[command(name = "g2flow", version, about = "Monge-Ampere flows on flat tori and the G2 flows they generate")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evolve a potential, track the gauge diffeomorphisms and check every gate.
    Run(RunArgs),
    /// Check the Laplacian and torsion identities of the ansatz.
    Verify(VerifyArgs),
    /// Summarize the artifacts in an output directory.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FlowArg {
    Ma13,
    Kr,
    H,
}

#[derive(Args, Debug, Clone, Default)]
pub struct ConfigArgs {
    /// Named preset.
    #[arg(long)]
    pub preset: Option<String>,
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Grid points per axis.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Amplitude of the single initial mode.
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[command(flatten)]
    pub base: ConfigArgs,
    #[arg(long, value_enum)]
    pub flow: Option<FlowArg>,
    /// Exponent `p` of `H(ρ) = ρ^p/p` for `--flow h`.
    #[arg(long, default_value_t = 0.5)]
    pub power: f64,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub snapshot_stride: Option<usize>,
    #[arg(long)]
    pub track_stride: Option<usize>,
    #[arg(long)]
    pub checkpoint_stride: Option<usize>,
    /// Stop after this many steps, leaving a checkpoint.
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Continue from the checkpoint in the output directory.
    #[arg(long)]
    pub resume: bool,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub base: ConfigArgs,
    /// `all`, a lemma name, a short alias, or a comma-separated list.
    #[arg(long, default_value = "all")]
    pub lemma: String,
    /// Random single-mode potential from this seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Flip the sign of this star-table row (negative control).
    #[arg(long)]
    pub mutation: Option<usize>,
    /// Write `lemmas.json` here instead of printing it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    #[arg(long)]
    pub out: PathBuf,
}

fn base_config(a: &ConfigArgs) -> Result<Option<RunConfig>, ConfigError> {
    let mut cfg = match (&a.preset, &a.config) {
        (Some(p), _) => RunConfig::preset(p)?,
        (None, Some(path)) => RunConfig::from_file(path)?,
        (None, None) if a.n.is_none() && a.grid.is_none() && a.eps.is_none() => return Ok(None),
        (None, None) => RunConfig::default_single_mode(),
    };
    let eps = a.eps.unwrap_or(cfg.eps());
    if let Some(n) = a.n {
        cfg.flow.n = n;
        cfg.flow.size = if n == 2 { 16 } else { 8 };
    }
    if let Some(g) = a.grid {
        cfg.flow.size = g;
    }
    if a.n.is_some() || a.eps.is_some() {
        cfg.set_single_mode(eps);
    }
    Ok(Some(cfg))
}

/// Resolved configuration of `g2flow run`.
pub fn run_config(a: &RunArgs) -> Result<RunConfig, ConfigError> {
    let mut cfg = base_config(&a.base)?.unwrap_or_else(RunConfig::default_single_mode);
    if let Some(f) = a.flow {
        cfg.flow.kind = match f {
            FlowArg::Ma13 => FlowKind::Ma13,
            FlowArg::Kr => FlowKind::Kr,
            FlowArg::H => FlowKind::Power { p: a.power },
        };
    }
    if let Some(v) = a.dt {
        cfg.flow.dt = v;
    }
    if let Some(v) = a.tmax {
        cfg.flow.tmax = v;
    }
    if let Some(v) = &a.out {
        cfg.out = Some(v.clone());
    }
    if let Some(v) = a.snapshot_stride {
        cfg.snapshot_stride = v;
    }
    if let Some(v) = a.track_stride {
        cfg.track_stride = v;
    }
    if let Some(v) = a.checkpoint_stride {
        cfg.checkpoint_stride = v;
    }
    if a.max_steps.is_some() {
        cfg.max_steps = a.max_steps;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn init_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Exit status: 0 when every gate passes, 2 on a gate failure, 1 on error.
pub fn main_with(cli: Cli) -> ExitCode {
    init_threads();
    let status = match cli.command {
        Command::Run(a) => cmd_run(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Report(a) => report(&a.out).map(|(text, pass)| {
            print!("{text}");
            pass
        }),
    };
    match status {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("g2flow: {e}");
            ExitCode::from(1)
        }
    }
}

fn cmd_run(a: &RunArgs) -> Result<bool, String> {
    let cfg = run_config(a).map_err(|e| e.to_string())?;
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("g2flow-out"));
    let s = run_experiment(&cfg, &out, a.resume).map_err(|e| e.to_string())?;
    let (text, _) = report(&out)?;
    print!("{text}");
    Ok(s.complete && s.pass)
}

fn cmd_verify(a: &VerifyArgs) -> Result<bool, String> {
    let opts = VerifyOptions {
        lemmas: parse_lemmas(&a.lemma)?,
        base: base_config(&a.base).map_err(|e| e.to_string())?,
        grid: a.base.grid,
        seed: a.seed,
        mutation: a.mutation,
    };
    let r = verify_all(&opts).map_err(|e| e.to_string())?;
    let json = serde_json::to_string_pretty(&r).map_err(|e| e.to_string())?;
    match &a.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
            std::fs::write(dir.join("lemmas.json"), json).map_err(|e| e.to_string())?;
            let (text, _) = report(dir)?;
            print!("{text}");
        }
        None => println!("{json}"),
    }
    Ok(r.pass)
}
