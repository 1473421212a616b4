use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use geophase::experiment::{run, summarize, validate, ExperimentConfig, ExperimentKind, RunError, Violation};

const EXIT_IO: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_DOMAIN: u8 = 3;

/// Pancharatnam phases, quantum-eraser fringe shifts and weak-measurement
/// pointer displacements for two-level systems.
#[derive(Debug, Parser)]
#[command(name = "geophase", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// CSV output path; overrides `output_path` in the config. Without
    /// either, the CSV goes to stdout and the summary is suppressed.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized scenarios; overrides `seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Do not print the summary.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Quantum-eraser phase ledger per scenario.
    Eraser,
    /// Pointer simulation against the weak-value prediction.
    Weak,
    /// Post-selection phase profile of the two-level example.
    #[command(name = "theta2-sweep")]
    Theta2Sweep,
    /// Bargmann phase versus geodesic solid angle on random triples.
    #[command(name = "eq14-check")]
    Eq14Check,
    /// Check a configuration without running it.
    Validate,
}

fn config_error(violations: &[Violation]) -> ExitCode {
    for v in violations {
        eprintln!("error: kind=config field={} message={}", v.field, v.message);
    }
    ExitCode::from(EXIT_CONFIG)
}

fn load(common: &Common) -> Result<ExperimentConfig, Violation> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Violation {
                field: "<document>".into(),
                message: format!("cannot read {}: {e}", path.display()),
            })?;
            ExperimentConfig::from_toml_str(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match load(&cli.common) {
        Ok(c) => c,
        Err(v) => return config_error(&[v]),
    };

    let kind = match cli.command {
        Command::Eraser => ExperimentKind::Eraser,
        Command::Weak => ExperimentKind::Weak,
        Command::Theta2Sweep => ExperimentKind::Theta2Sweep,
        Command::Eq14Check => ExperimentKind::Eq14Check,
        Command::Validate => {
            let violations = validate(&config, None);
            if violations.is_empty() {
                if !cli.common.quiet {
                    println!("ok");
                }
                return ExitCode::SUCCESS;
            }
            return config_error(&violations);
        }
    };

    let table = match run(&config, Some(kind)) {
        Ok(t) => t,
        Err(RunError::Config(v)) => return config_error(&v),
        Err(RunError::Domain { context, source }) => {
            eprintln!(
                "error: kind=domain code={} context={context} message={source}",
                source.code()
            );
            return ExitCode::from(EXIT_DOMAIN);
        }
    };

    let out = cli
        .common
        .out
        .clone()
        .or_else(|| config.output_path.as_ref().map(PathBuf::from));
    let written = match &out {
        Some(path) => fs::File::create(path)
            .map_err(|e| e.to_string())
            .and_then(|f| table.write_csv(io::BufWriter::new(f)).map_err(|e| e.to_string())),
        None => table.write_csv(io::stdout().lock()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: kind=io message={e}");
        return ExitCode::from(EXIT_IO);
    }

    if let (Some(path), false) = (&out, cli.common.quiet) {
        let mut stdout = io::stdout().lock();
        let _ = write!(stdout, "{}", summarize(kind, &table));
        let _ = writeln!(stdout, "wrote {}", path.display());
    }
    ExitCode::SUCCESS
}
