use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use aumann_core::generators::{GenParams, GptCone, Layer};
use aumann_core::scenario::{self, Direction, RunOptions, ScenarioError};
use aumann_core::search::{self, Limits, Mode, SearchConfig};

/// Common knowledge and agreement checks on finite knowledge models.
#[derive(Parser)]
#[command(name = "aumann", version)]
struct Cli {
    /// Emit machine-readable JSON with full precision.
    #[arg(long, global = true)]
    json: bool,
    /// Equality tolerance; overrides the scenario's own.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Knowledge sets, per-cell conditionals, common knowledge and verdict.
    Analyze(Check),
    /// Agreement verdict for the scenario's targets.
    Agree(Check),
    /// Rewrite a quantum measure between DOVM and POVM form.
    Convert {
        /// Scenario file, or `-` for stdin.
        file: PathBuf,
        #[arg(long, value_enum)]
        direction: ConvertDirection,
        /// Write here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Verify many generated scenarios and count verdicts.
    Search {
        #[arg(long, value_enum)]
        layer: LayerArg,
        /// First seed of the sweep.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of seeds.
        #[arg(long, default_value_t = 10_000)]
        seeds: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Planted)]
        mode: ModeArg,
        #[arg(long, default_value_t = 10)]
        max_worlds: usize,
        #[arg(long, default_value_t = 4)]
        max_agents: usize,
        #[arg(long, default_value_t = 3)]
        max_dim: usize,
    },
    /// Emit a generated scenario file.
    Gen {
        #[arg(long, value_enum)]
        layer: LayerArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        worlds: usize,
        #[arg(long, default_value_t = 2)]
        agents: usize,
        /// Hilbert-space dimension, or cone dimension for polyhedral cones.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Unconstrained instead of planted.
        #[arg(long)]
        random: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Check {
    /// Scenario file, or `-` for stdin.
    file: PathBuf,
    /// Bound on the common-knowledge iteration (default: worlds + 1).
    #[arg(long)]
    max_iters: Option<usize>,
    /// Report parse and verification times.
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConvertDirection {
    Dovm2povm,
    Povm2dovm,
}

#[derive(Clone, Copy, ValueEnum)]
enum LayerArg {
    Classical,
    Quantum,
    GptSimplex,
    GptPsd,
    GptPolyhedral,
}

impl From<LayerArg> for Layer {
    fn from(l: LayerArg) -> Self {
        match l {
            LayerArg::Classical => Layer::Classical,
            LayerArg::Quantum => Layer::Quantum,
            LayerArg::GptSimplex => Layer::Gpt(GptCone::Simplex),
            LayerArg::GptPsd => Layer::Gpt(GptCone::Psd),
            LayerArg::GptPolyhedral => Layer::Gpt(GptCone::Polyhedral),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Planted,
    Random,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("{0}")]
    Usage(String),
}

fn read_input(path: &PathBuf) -> Result<String, CliError> {
    let io_err = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    if path.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text).map_err(io_err)?;
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(io_err)
    }
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    if let Some(tol) = cli.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(CliError::Usage("--tol must be positive and finite".into()));
        }
    }
    match cli.command {
        Command::Analyze(check) => report(&cli_opts(cli.tol, &check), &check, cli.json, true),
        Command::Agree(check) => report(&cli_opts(cli.tol, &check), &check, cli.json, false),
        Command::Convert {
            file,
            direction,
            output,
        } => {
            let direction = match direction {
                ConvertDirection::Dovm2povm => Direction::DovmToPovm,
                ConvertDirection::Povm2dovm => Direction::PovmToDovm,
            };
            let text = scenario::run_convert(&read_input(&file)?, direction)?;
            write_output(output.as_ref(), &text)?;
            Ok(0)
        }
        Command::Search {
            layer,
            seed,
            seeds,
            mode,
            max_worlds,
            max_agents,
            max_dim,
        } => {
            let config = SearchConfig {
                layer: layer.into(),
                mode: match mode {
                    ModeArg::Planted => Mode::Planted,
                    ModeArg::Random => Mode::Random,
                },
                seeds: seed..seed.saturating_add(seeds),
                limits: Limits {
                    max_worlds,
                    max_agents,
                    max_dim,
                },
                tol: cli.tol.unwrap_or(aumann_core::tolerance::DEFAULT_TOL),
            };
            let stats = search::run_search(&config);
            if cli.json {
                print!("{}", scenario::to_json_text(&stats));
            } else {
                print!("{}", scenario::render_stats(&stats));
            }
            Ok(u8::from(stats.violations + stats.errors > 0))
        }
        Command::Gen {
            layer,
            seed,
            worlds,
            agents,
            dim,
            random,
            output,
        } => {
            let params = GenParams {
                n_worlds: worlds,
                n_agents: agents,
                dim,
            };
            let text = scenario::run_gen(layer.into(), seed, params, random, cli.tol)?;
            write_output(output.as_ref(), &text)?;
            Ok(0)
        }
    }
}

fn cli_opts(tol: Option<f64>, check: &Check) -> RunOptions {
    RunOptions {
        tol,
        max_iters: check.max_iters,
        timings: check.timings,
    }
}

fn report(opts: &RunOptions, check: &Check, json: bool, detailed: bool) -> Result<u8, CliError> {
    let text = read_input(&check.file)?;
    let report = if detailed {
        scenario::run_analyze(&text, *opts)?
    } else {
        scenario::run_agree(&text, *opts)?
    };
    if json {
        print!("{}", scenario::to_json_text(&report));
    } else {
        print!("{}", scenario::render_report(&report));
    }
    Ok(report.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
