use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bilocal_cli::commands::{self, ScanFormat};

/// Bilocal (two-source network Bell) inequality toolkit: evaluate
/// measurement strategies on Werner-state pairs, maximize the violation
/// with a particle-swarm search, audit the bundled reference strategy, and
/// classify the (p, q) visibility plane.
#[derive(Parser)]
#[command(name = "bilocal", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a strategy file on werner(p) x werner(q) through all three
    /// routes (trace oracle, Bloch contraction, factored closed form).
    Eval {
        /// Strategy JSON file (keys x0, x1, y0, y1, M, N).
        #[arg(long)]
        strategy: PathBuf,
        /// Visibility of the Alice-Bob source.
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Visibility of the Bob-Charles source.
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        /// Audit mode: evaluate as-is, skipping constraint validation.
        #[arg(long)]
        no_project_audit: bool,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximize S' with the particle-swarm optimizer; writes
    /// convergence.csv and best_strategy.json.
    Optimize {
        /// Optimizer config JSON (fields mirror the defaults; all
        /// optional).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config iteration count.
        #[arg(long)]
        iterations: Option<usize>,
        /// Output directory (created if missing; default ".").
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report on the bundled reference strategy: closed-form factors,
    /// trace-oracle value, observable spectra, and the formula gap.
    Audit {
        /// Visibility of the Alice-Bob source.
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Visibility of the Bob-Charles source.
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a uniform grid over the (p, q) unit square.
    Scan {
        /// S' value defining the violation threshold (2/S')²; defaults to
        /// the scanned strategy's own closed-form S'.
        #[arg(long)]
        sprime: Option<f64>,
        /// Grid points per axis (endpoints included).
        #[arg(long, default_value_t = 101)]
        steps: usize,
        /// Strategy JSON to scan; defaults to the bundled reference
        /// strategy.
        #[arg(long)]
        strategy: Option<PathBuf>,
        /// Output format.
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Write the grid here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for ScanFormat {
    fn from(arg: FormatArg) -> Self {
        match arg {
            FormatArg::Csv => ScanFormat::Csv,
            FormatArg::Json => ScanFormat::Json,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval {
            strategy,
            p,
            q,
            no_project_audit,
            out,
        } => commands::cmd_eval(&strategy, p, q, no_project_audit, out.as_deref()),
        Command::Optimize {
            config,
            seed,
            iterations,
            out,
        } => commands::cmd_optimize(
            config.as_deref(),
            seed,
            iterations,
            &commands::resolve_out_dir(out),
        ),
        Command::Audit { p, q, out } => commands::cmd_audit(p, q, out.as_deref()),
        Command::Scan {
            sprime,
            steps,
            strategy,
            format,
            out,
        } => commands::cmd_scan(sprime, steps, strategy.as_deref(), format.into(), out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
