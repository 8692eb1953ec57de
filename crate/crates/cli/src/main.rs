//! `gks`: classify functions, run the theorem suite, evaluate local
//! fractional calculus operations and emit reports.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "gks", version, about = "Generalized s-convexity on fractal sets")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Fractal dimension in (0, 1].
    #[arg(long, global = true, default_value_t = 0.5)]
    alpha: f64,
    /// Convexity order in (0, 1].
    #[arg(long, global = true, default_value_t = 0.5)]
    s: f64,
    /// Points per u/v axis of the grid phase.
    #[arg(long, global = true, default_value_t = 64)]
    grid_n: usize,
    /// Random trials after the grid phase.
    #[arg(long, global = true, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Violation tolerance in base units.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 10.0)]
    u_max: f64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    output: OutputFormat,
    /// Shorthand for `--output json`.
    #[arg(long, global = true)]
    json: bool,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SenseArg {
    #[value(name = "1")]
    First,
    #[value(name = "2")]
    Second,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Certify membership in GK_s^1 or GK_s^2.
    Classify {
        /// Function in the DSL, or `@path` to read it from a file.
        #[arg(long = "fn")]
        function: String,
        #[arg(long, value_enum, default_value_t = SenseArg::First)]
        sense: SenseArg,
        /// Search the relaxed constraint instead of the exact one.
        #[arg(long)]
        relaxed: bool,
        /// Skip pattern rules.
        #[arg(long)]
        search_only: bool,
    },
    /// Run the theorem suite on the shipped corpus.
    Theorems {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value = "default")]
        corpus: String,
    },
    /// Local fractional calculus operations.
    Calc {
        #[command(subcommand)]
        op: CalcOp,
    },
    /// Tabulate the chain f(2^(-1/s) u) <= Phi(u^s) <= f(u).
    Sandwich {
        #[arg(long = "fn")]
        function: String,
        /// Grid points u = i * step.
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 0.04)]
        step: f64,
    },
    /// Regression matrix of the example families.
    Examples {
        #[arg(long, value_enum, default_value_t = Family::All)]
        family: Family,
        /// Convexity orders for the first family.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 0.5, 0.75])]
        orders: Vec<f64>,
        /// Dimensions for the first family.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.3, 0.5, 0.8])]
        alphas: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Ex41,
    Ex42,
    All,
}

#[derive(Debug, Subcommand)]
enum CalcOp {
    /// D^α f at a point.
    Derive {
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        at: f64,
    },
    /// Integral of f over [from, to].
    Integrate {
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
    },
    /// Numerical continuity probe at a point.
    Continuity {
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        at: f64,
    },
    /// lim f/g where both vanish, compared with the ratio of derivatives.
    RatioLimit {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        at: f64,
    },
    /// Residual of differentiating the integral of f from `from` at `at`.
    Ftc {
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        at: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
