use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod setup;

use commands::Output;
use config::Config;
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "ifsmeasure", version, about = "Gibbs measures, pressure and dimension estimates for parametrized IFS")]
struct Cli {
    /// Configuration file of `section.key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV artifacts; without it CSV goes to standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides `run.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides `run.depth`.
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Regularity audit of the family.
    Audit,
    /// Natural projection of `run.word` and its parameter derivative.
    Project,
    /// Lead eigendata of the transfer operator.
    Spectrum,
    /// Pressure of `t log|f'|` for each `run.t`.
    Pressure,
    /// Root of the pressure (Bowen's equation).
    Bowen,
    /// Entropy, Lyapunov exponent and their ratio for the Gibbs measure.
    Entropy,
    /// Parameter-region scans.
    Region {
        #[command(subcommand)]
        which: RegionKind,
    },
    /// Transversality certificate and Monte-Carlo probe.
    Transversality {
        #[command(subcommand)]
        which: TransversalityKind,
    },
    /// Partition sums `Z_n` with inf/sup brackets.
    Partition,
    /// α-energy level sums.
    Energy,
    /// Correlation dimension of the Gibbs measure.
    Dimcor,
    /// Chaos-game sample.
    Sample,
    /// Fourier-decay (Sobolev dimension) heuristic on a chaos-game sample.
    Sobolev,
    /// Gibbs ratio probe across parameter pairs.
    Mprobe,
    /// Partition-sum drop when the last map is removed.
    PressureDrop,
    /// Continued-fraction family checks.
    Cf {
        #[command(subcommand)]
        which: CfKind,
    },
    /// Similarity dimension of `family.ratios`.
    Simdim,
}

#[derive(Subcommand, Debug)]
enum RegionKind {
    Bernoulli,
    Blackwell,
}

#[derive(Subcommand, Debug)]
enum TransversalityKind {
    Certify,
    Probe,
}

#[derive(Subcommand, Debug)]
enum CfKind {
    Overlap,
}

fn load(cli: &Cli) -> Result<Config, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
            Config::parse(&text)?
        }
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.set("run.seed", seed);
    }
    if let Some(depth) = cli.depth {
        cfg.set("run.depth", depth);
    }
    Ok(cfg)
}

fn dispatch(command: &Command, cfg: &Config) -> Result<Output, CliError> {
    use commands::*;
    match command {
        Command::Audit => audit(cfg),
        Command::Project => project(cfg),
        Command::Spectrum => spectrum(cfg),
        Command::Pressure => pressure(cfg),
        Command::Bowen => bowen(cfg),
        Command::Entropy => entropy_cmd(cfg),
        Command::Region { which: RegionKind::Bernoulli } => region_bernoulli(cfg),
        Command::Region { which: RegionKind::Blackwell } => region_blackwell(cfg),
        Command::Transversality { which: TransversalityKind::Certify } => certify(cfg),
        Command::Transversality { which: TransversalityKind::Probe } => probe(cfg),
        Command::Partition => partition(cfg),
        Command::Energy => energy_cmd(cfg),
        Command::Dimcor => dimcor(cfg),
        Command::Sample => sample(cfg),
        Command::Sobolev => sobolev(cfg),
        Command::Mprobe => mprobe(cfg),
        Command::PressureDrop => pressure_drop(cfg),
        Command::Cf { which: CfKind::Overlap } => cf_overlap_cmd(cfg),
        Command::Simdim => simdim(cfg),
    }
}

fn stanza(cfg: &Config) -> String {
    format!(
        "# reproducibility\nconfig_sha256: {}\nseed: {}\nversion: {}\n",
        cfg.sha256(),
        cfg.raw("run.seed").unwrap_or("none"),
        env!("CARGO_PKG_VERSION")
    )
}

fn emit(out: Output, dir: Option<&Path>, cfg: &Config) -> Result<i32, CliError> {
    let mut text = out.report.into_string();
    if let Some(dir) = dir {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
    }
    for (name, content) in &out.files {
        match dir {
            Some(dir) => {
                let path = dir.join(format!("{name}.csv"));
                fs::write(&path, content).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
                text.push_str(&format!("wrote: {}\n", path.display()));
            }
            None => text.push_str(&format!("# csv: {name}\n{content}")),
        }
    }
    text.push_str(&stanza(cfg));
    // a closed pipe downstream is not an error of ours
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    Ok(out.exit)
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let cfg = load(&cli)?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let out = dispatch(&cli.command, &cfg)?;
    emit(out, cli.out.as_deref(), &cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
