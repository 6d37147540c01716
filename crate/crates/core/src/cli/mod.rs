//! The `meanfield-lab` command line.
//!
//! Every run writes `summary.json`, its CSV tables (unless `--no-plot-data`)
//! and the fully resolved configuration (`config.json`, plus `config.toml`
//! which can be fed back through `--config`) into the `--out` directory.
//!
//! A config file is a flat TOML table whose keys are the long flag names
//! (`omega0 = 3.0`, `grid-points = 2001`, `R = 0.25`, `no-plot-data = true`);
//! flags on the command line override it. `MEANFIELD_LAB_THREADS` sets the
//! worker count when `--threads` is absent. Outputs do not depend on the
//! number of threads.
//!
//! Exit status: 0 on success, 1 when the computation fails, 2 on usage errors.

pub mod commands;
pub mod output;
pub mod selfcheck;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};
use serde::Serialize;

use commands::{
    AnyonArgs, BathtubArgs, CoulombArgs, Context, DefinettiArgs, Gl1dArgs, JelliumArgs, LaughlinArgs, ScatlenArgs,
    TfVortexArgs,
};
use output::RunOutput;

#[derive(Debug, Parser)]
#[command(name = "meanfield-lab", version, about = "Mean-field variational problems, plasmas, jellium, de Finetti and anyons")]
pub struct Cli {
    /// TOML file of flag values; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; nothing is written outside it.
    #[arg(long, global = true, default_value = "meanfield-out")]
    pub out: PathBuf,
    /// Master seed; per-chain and per-restart seeds are derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "MEANFIELD_LAB_THREADS")]
    pub threads: Option<usize>,
    /// Write only the JSON summary and the resolved config.
    #[arg(long, global = true)]
    pub no_plot_data: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Thomas-Fermi profile, vortex cost function and limiting vortex density.
    TfVortex(TfVortexArgs),
    /// Half-line Ginzburg-Landau problems, Θ₀ and the curvature constants.
    Gl1d(Gl1dArgs),
    /// Zero-energy scattering length.
    Scatlen(ScatlenArgs),
    /// Metropolis sampling of a Coulomb gas in a power-law trap.
    CoulombMc(CoulombArgs),
    /// Plasma analogy for Laughlin and quasi-hole states.
    Laughlin(LaughlinArgs),
    /// Bath-tub energy of a radial potential under a density cap.
    Bathtub(BathtubArgs),
    /// Renormalized energy of a periodic configuration.
    Jellium(JelliumArgs),
    /// Quantitative quantum de Finetti error of a symmetric state.
    Definetti(DefinettiArgs),
    /// Minimize the average-field anyon functional.
    Anyon(AnyonArgs),
    /// Quick self-test of every module.
    Selfcheck,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::TfVortex(_) => "tf-vortex",
            Command::Gl1d(_) => "gl1d",
            Command::Scatlen(_) => "scatlen",
            Command::CoulombMc(_) => "coulomb-mc",
            Command::Laughlin(_) => "laughlin",
            Command::Bathtub(_) => "bathtub",
            Command::Jellium(_) => "jellium",
            Command::Definetti(_) => "definetti",
            Command::Anyon(_) => "anyon",
            Command::Selfcheck => "selfcheck",
        }
    }

    fn params(&self) -> serde_json::Value {
        let v = match self {
            Command::TfVortex(a) => serde_json::to_value(a),
            Command::Gl1d(a) => serde_json::to_value(a),
            Command::Scatlen(a) => serde_json::to_value(a),
            Command::CoulombMc(a) => serde_json::to_value(a),
            Command::Laughlin(a) => serde_json::to_value(a),
            Command::Bathtub(a) => serde_json::to_value(a),
            Command::Jellium(a) => serde_json::to_value(a),
            Command::Definetti(a) => serde_json::to_value(a),
            Command::Anyon(a) => serde_json::to_value(a),
            Command::Selfcheck => Ok(serde_json::json!({})),
        };
        v.expect("argument structs serialize")
    }

    fn execute(&self, ctx: &Context) -> crate::Result<RunOutput> {
        match self {
            Command::TfVortex(a) => a.run(ctx),
            Command::Gl1d(a) => a.run(ctx),
            Command::Scatlen(a) => a.run(ctx),
            Command::CoulombMc(a) => a.run(ctx),
            Command::Laughlin(a) => a.run(ctx),
            Command::Bathtub(a) => a.run(ctx),
            Command::Jellium(a) => a.run(ctx),
            Command::Definetti(a) => a.run(ctx),
            Command::Anyon(a) => a.run(ctx),
            Command::Selfcheck => Ok(RunOutput::default()),
        }
    }
}

/// Everything that determines the output of a run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub params: serde_json::Value,
    pub seed: u64,
    pub out: PathBuf,
    pub emit_plot_data: bool,
    pub threads: usize,
}

impl RunConfig {
    /// Flat TOML table accepted by `--config`.
    pub fn to_toml(&self) -> String {
        let mut table = match &self.params {
            serde_json::Value::Object(m) => m.clone(),
            _ => serde_json::Map::new(),
        };
        table.insert("seed".into(), self.seed.into());
        table.insert("no-plot-data".into(), (!self.emit_plot_data).into());
        let body = toml::to_string(&table).expect("flat table of scalars");
        format!("# meanfield-lab {}\n{body}", self.subcommand)
    }
}

fn command() -> clap::Command {
    Cli::command().mut_subcommands(|s| s.args_override_self(true).allow_negative_numbers(true))
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Flags spelled out from a config file.
fn config_flags(path: &Path) -> std::result::Result<Vec<OsString>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let table: toml::Table = text.parse().map_err(|e| format!("config {}: {e}", path.display()))?;
    let mut flags = Vec::new();
    for (key, value) in table {
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            toml::Value::Boolean(true) => flags.push(flag.into()),
            toml::Value::Boolean(false) => {}
            toml::Value::String(s) => flags.extend([flag.into(), s.into()]),
            toml::Value::Integer(i) => flags.extend([flag.into(), i.to_string().into()]),
            toml::Value::Float(x) => flags.extend([flag.into(), x.to_string().into()]),
            other => return Err(format!("config key {key:?}: unsupported value {other}")),
        }
    }
    Ok(flags)
}

/// Splices config-file flags in right after the subcommand name so that
/// later command-line flags override them.
fn merged_args(args: Vec<OsString>) -> std::result::Result<Vec<OsString>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let flags = config_flags(&path)?;
    let names: Vec<String> = command().get_subcommands().map(|s| s.get_name().to_string()).collect();
    let pos = args.iter().skip(1).position(|a| names.iter().any(|n| a.to_string_lossy() == n.as_str()));
    let Some(pos) = pos else {
        return Ok(args);
    };
    let mut out = args[..pos + 2].to_vec();
    out.extend(flags);
    out.extend_from_slice(&args[pos + 2..]);
    Ok(out)
}

/// Parses without touching the file system beyond reading `--config`.
pub fn parse(args: Vec<OsString>) -> std::result::Result<Cli, clap::Error> {
    let args = merged_args(args).map_err(|msg| command().error(clap::error::ErrorKind::Io, msg))?;
    let matches = command().try_get_matches_from(args)?;
    Cli::from_arg_matches(&matches)
}

fn resolve(cli: &mut Cli) -> crate::Result<RunConfig> {
    if let Command::Anyon(a) = &mut cli.command {
        a.resolve()?;
    }
    Ok(RunConfig {
        subcommand: cli.command.name().to_string(),
        params: cli.command.params(),
        seed: cli.seed,
        out: cli.out.clone(),
        emit_plot_data: !cli.no_plot_data,
        threads: cli.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
    })
}

/// Runs the command line `args` (program name first) and returns the exit
/// status; the summary is echoed to stdout.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_inner(args.into_iter().map(Into::into).collect(), true)
}

/// Like [`run`], but only errors are printed.
pub fn run_quiet<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_inner(args.into_iter().map(Into::into).collect(), false)
}

fn run_inner(args: Vec<OsString>, echo: bool) -> i32 {
    let mut cli = match parse(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if cli.threads == Some(0) {
        eprintln!("error: --threads must be at least 1");
        return 2;
    }
    let cfg = match resolve(&mut cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start {} threads: {e}", cfg.threads);
            return 1;
        }
    };
    if let Command::Selfcheck = cli.command {
        let report = pool.install(|| selfcheck::run_checks(&selfcheck::default_checks()));
        if echo || !report.passed() {
            println!("{report}");
        }
        return if report.passed() { 0 } else { 1 };
    }
    let ctx = Context { seed: cfg.seed, emit_plot_data: cfg.emit_plot_data };
    let result = pool.install(|| cli.command.execute(&ctx)).and_then(|mut out| {
        out.json("config.json", &cfg)?;
        out.bytes("config.toml", cfg.to_toml().into_bytes());
        let summary = out.files.first().map(|(_, b)| String::from_utf8_lossy(b).into_owned()).unwrap_or_default();
        out.write(&cfg.out)?;
        Ok(summary)
    });
    match result {
        Ok(summary) => {
            if echo {
                print!("{summary}");
                eprintln!("results in {}", cfg.out.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
