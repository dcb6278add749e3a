mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Outcome;
use crate::config::{Command, RunConfig, Settings};
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "qcf", version, about = "Vacuum characteristic functions of quantum observables")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Characteristic function samples on a t grid.
    Cf(Common),
    /// Engine deviation from the closed form, against a per-observable threshold.
    Compare(Common),
    /// Approximate eigenvectors, unboundedness witnesses or oscillator levels.
    Spectrum(SpectrumArgs),
    /// Density of the vacuum law on an x grid.
    Density(DensityArgs),
}

#[derive(Args, Default)]
struct Common {
    /// x, p, x+p, xp+px or harmonic.
    #[arg(long)]
    observable: Option<String>,
    /// closed, jump, spectral or all.
    #[arg(long)]
    engine: Option<String>,
    /// min:max:step
    #[arg(long, allow_hyphen_values = true)]
    t_range: Option<String>,
    /// Half-width of the boundary-jump integral.
    #[arg(long)]
    radius: Option<f64>,
    /// Comma-separated, strictly decreasing.
    #[arg(long, allow_hyphen_values = true)]
    eps_schedule: Option<String>,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    common: Common,
    /// Spectral point probed by the families.
    #[arg(long, allow_hyphen_values = true)]
    z: Option<f64>,
    /// Comma-separated family parameters (witness indices for x).
    #[arg(long)]
    params: Option<String>,
    /// Oscillator levels listed for harmonic.
    #[arg(long)]
    levels: Option<usize>,
}

#[derive(Args)]
struct DensityArgs {
    #[command(flatten)]
    common: Common,
    /// min:max:step
    #[arg(long, allow_hyphen_values = true)]
    x_range: Option<String>,
}

impl Common {
    fn settings(&self, s: &mut Settings) {
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                s.insert(k.to_string(), v);
            }
        };
        put("observable", self.observable.clone());
        put("engine", self.engine.clone());
        put("t-range", self.t_range.clone());
        put("radius", self.radius.map(|v| v.to_string()));
        put("eps-schedule", self.eps_schedule.clone());
        put("abs-tol", self.abs_tol.map(|v| v.to_string()));
        put("rel-tol", self.rel_tol.map(|v| v.to_string()));
        put("format", self.format.clone());
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
    }
}

fn configure(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut flags = Settings::new();
    let (command, common) = match &cli.command {
        Sub::Cf(c) => (Command::Cf, c),
        Sub::Compare(c) => (Command::Compare, c),
        Sub::Spectrum(a) => {
            if let Some(z) = a.z {
                flags.insert("z".into(), z.to_string());
            }
            if let Some(p) = &a.params {
                flags.insert("params".into(), p.clone());
            }
            if let Some(l) = a.levels {
                flags.insert("levels".into(), l.to_string());
            }
            (Command::Spectrum, &a.common)
        }
        Sub::Density(a) => {
            if let Some(x) = &a.x_range {
                flags.insert("x-range".into(), x.clone());
            }
            (Command::Density, &a.common)
        }
    };
    common.settings(&mut flags);
    let file = match &common.config {
        Some(path) => config::load_config_file(path)?,
        None => Settings::new(),
    };
    RunConfig::resolve(command, &config::merge(file, flags))
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("QCF_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("QCF_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    init_threads()?;
    let cfg = configure(cli)?;
    let Outcome { table, code, summary } = match cfg.command {
        Command::Cf => commands::cmd_cf(&cfg)?,
        Command::Compare => commands::cmd_compare(&cfg)?,
        Command::Spectrum => commands::cmd_spectrum(&cfg)?,
        Command::Density => commands::cmd_density(&cfg)?,
    };
    let text = table.render(cfg.format);
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?,
        None => print!("{text}"),
    }
    if let Some(s) = summary {
        eprintln!("{s}");
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("qcf: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
