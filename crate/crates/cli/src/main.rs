//! `deltacpt` command-line front end.

mod commands;
mod config;
mod units;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{CliError, Context, Provenance};
use config::RunConfig;
use deltacpt::spectra::Backend;

#[derive(Parser)]
#[command(name = "deltacpt", version, about = "Closed-loop coherent population trapping simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Common {
    /// TOML run configuration; the fig3 preset when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    /// Worker threads for sweeps; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Analytic,
    Numeric,
}

#[derive(Subcommand)]
enum Command {
    /// One spectrum as CSV and JSON lines, metrics on stdout.
    Spectrum(Common),
    /// Spectra for every power in `power_map.powers`.
    PowerMap(Common),
    /// Centre shift over `shift_table.detunings` × `shift_table.powers`.
    ShiftTable(Common),
    /// Fit the model to an observed spectrum.
    Fit {
        #[command(flatten)]
        common: Common,
        /// Observed CSV; overrides `fit.data`.
        data: Option<PathBuf>,
    },
    /// List the built-in presets.
    Presets,
}

fn context(name: &str, common: &Common) -> Result<Context, CliError> {
    let (text, mut config) = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            let dir = path.parent().unwrap_or(Path::new("."));
            let c = RunConfig::parse(&text, dir).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            (text, c)
        }
        None => (String::new(), RunConfig::parse("", Path::new(".")).map_err(|e| CliError::Input(e.to_string()))?),
    };
    let mut overrides = Vec::new();
    if let Some(b) = common.backend {
        config.spec.backend = match b {
            BackendArg::Analytic => Backend::Analytic,
            BackendArg::Numeric => Backend::Numeric,
        };
        overrides.push(format!("backend={}", config.spec.backend.name()));
    }
    if let Some(s) = common.seed {
        config.seed = s;
    }
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(CliError::Input("--threads must be at least 1".into()));
        }
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let out_dir = common.out.clone().or_else(|| config.output_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    let provenance = Provenance::new(name, &text, &overrides, config.seed);
    Ok(Context { config, provenance, out_dir })
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Spectrum(c) => commands::cmd_spectrum(&context("spectrum", &c)?),
        Command::PowerMap(c) => commands::cmd_power_map(&context("power-map", &c)?),
        Command::ShiftTable(c) => commands::cmd_shift_table(&context("shift-table", &c)?),
        Command::Fit { common, data } => {
            let ctx = context("fit", &common)?;
            let path = data
                .or_else(|| ctx.config.fit.data.clone())
                .ok_or_else(|| CliError::Input("no data file: pass one or set fit.data".into()))?;
            commands::cmd_fit(&ctx, &path)
        }
        Command::Presets => Ok(commands::cmd_presets()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
