//! `rk10`: command-line front end for tree enumeration, tableau
//! verification, the order-10 family, stability analysis and integration.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "rk10", version, about = "Exact tools for explicit Runge-Kutta methods of order 10")]
struct Cli {
    /// Work in exact arithmetic over Q(α, β) instead of high-precision floats.
    #[arg(long, global = true)]
    exact: bool,
    /// Decimal digits for numeric work and printed output.
    #[arg(long, global = true, value_name = "N")]
    digits: Option<u32>,
    /// Write the primary output here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

/// Where a tableau comes from.
#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
pub struct TableauSource {
    /// Tableau file (decimal or `s=<int> mode=exact`).
    #[arg(long, value_name = "FILE")]
    tableau: Option<PathBuf>,
    /// Use the built-in reference method of the family.
    #[arg(long)]
    reference: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Count rooted trees per order, optionally listing their statistics.
    Trees {
        #[arg(long, value_name = "N")]
        max_order: usize,
        /// List every tree with |t|, t!, σ(t) and α(t).
        #[arg(long)]
        stats: bool,
    },
    /// Check the order conditions bΦ(t) = 1/t! up to a given order.
    Verify {
        #[command(flatten)]
        source: TableauSource,
        #[arg(long, value_name = "P")]
        order: usize,
        /// Number of largest residuals to list.
        #[arg(long, default_value_t = 20)]
        show: usize,
    },
    /// Report the simplifying assumptions B(n), C(n), D(n).
    Bcd {
        #[command(flatten)]
        source: TableauSource,
    },
    /// Stage orders and node-cluster analysis.
    Clusters {
        #[command(flatten)]
        source: TableauSource,
    },
    /// Write the dual method.
    Dualize {
        #[command(flatten)]
        source: TableauSource,
    },
    /// Build a member of the order-10 family from its seven parameters.
    Derive {
        /// Use the reference parameters.
        #[arg(long, conflicts_with_all = ["c2", "c4", "c5", "b10", "b12", "b13", "b14"])]
        reference: bool,
        #[arg(long, value_name = "R", required_unless_present = "reference")]
        c2: Option<String>,
        #[arg(long, value_name = "R", required_unless_present = "reference")]
        c4: Option<String>,
        #[arg(long, value_name = "R", required_unless_present = "reference")]
        c5: Option<String>,
        #[arg(long, value_name = "R", required_unless_present = "reference")]
        b10: Option<String>,
        #[arg(long, value_name = "R", required_unless_present = "reference")]
        b12: Option<String>,
        #[arg(long, value_name = "R", required_unless_present = "reference")]
        b13: Option<String>,
        #[arg(long, value_name = "R", required_unless_present = "reference")]
        b14: Option<String>,
        /// Write the exact tableau here.
        #[arg(long, value_name = "FILE")]
        exact_out: Option<PathBuf>,
        /// Write the decimal tableau here.
        #[arg(long, value_name = "FILE")]
        decimal_out: Option<PathBuf>,
        /// Print the derived construction constants and their match against
        /// the embedded constants block.
        #[arg(long)]
        constants: bool,
    },
    /// Error coefficients, stability interval, region, zeros, Szegő curve.
    Analyze {
        #[command(flatten)]
        source: TableauSource,
        /// Stage count, smallest nonzero |b_i| and largest |a_ij|.
        #[arg(long)]
        summary: bool,
        /// Error coefficients T_p for a range such as `11..13`.
        #[arg(long, value_name = "P..Q")]
        error_coeffs: Option<String>,
        /// Left end of the real stability interval.
        #[arg(long)]
        stability_interval: bool,
        /// Sample |R| on a grid and trace |R| = 1.
        #[arg(long, num_args = 5, value_names = ["XMIN", "XMAX", "YMIN", "YMAX", "RES"], allow_negative_numbers = true)]
        region: Option<Vec<f64>>,
        /// Zeros of the stability polynomial.
        #[arg(long)]
        zeros: bool,
        /// Szegő curve scaled by a factor, with a segment count.
        #[arg(long, num_args = 2, value_names = ["FACTOR", "RES"])]
        szego: Option<Vec<f64>>,
    },
    /// Fixed-step integration of a built-in or user-defined system.
    Integrate {
        #[command(flatten)]
        source: TableauSource,
        #[arg(long, value_enum)]
        problem: Problem,
        /// State variable name (repeat for each component; `expr` only).
        #[arg(long = "var", value_name = "NAME")]
        vars: Vec<String>,
        /// Right-hand side for the matching variable, in t and the state.
        #[arg(long = "rhs", value_name = "EXPR", allow_hyphen_values = true)]
        rhs: Vec<String>,
        /// Initial value for the matching variable (rational or decimal).
        #[arg(long = "x0", value_name = "R", allow_hyphen_values = true)]
        x0: Vec<String>,
        /// Step size; an arithmetic expression that may use `pi`.
        #[arg(long, value_name = "H")]
        h: String,
        #[arg(long, value_name = "N", default_value_t = 1)]
        steps: usize,
        /// Instead of a trajectory, measure the local order by step halving.
        #[arg(long)]
        measure_order: bool,
        /// Step sizes used by `--measure-order`.
        #[arg(long, default_value_t = 5)]
        levels: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Problem {
    LinearCircle,
    NonlinearCircle,
    Expr,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    let opts = commands::Global { exact: cli.exact, digits: cli.digits };
    let result = match cli.command {
        Command::Trees { max_order, stats } => commands::trees(max_order, stats),
        Command::Verify { source, order, show } => commands::verify(&opts, &source, order, show),
        Command::Bcd { source } => commands::bcd(&opts, &source),
        Command::Clusters { source } => commands::clusters(&opts, &source),
        Command::Dualize { source } => commands::dualize(&opts, &source),
        Command::Derive { reference, c2, c4, c5, b10, b12, b13, b14, exact_out, decimal_out, constants } => {
            let params = if reference { None } else { Some([c2, c4, c5, b10, b12, b13, b14]) };
            commands::derive(&opts, params, exact_out.as_deref(), decimal_out.as_deref(), constants)
        }
        Command::Analyze { source, summary, error_coeffs, stability_interval, region, zeros, szego } => {
            let req = commands::AnalyzeRequest { summary, error_coeffs, stability_interval, region, zeros, szego };
            commands::analyze(&opts, &source, req)
        }
        Command::Integrate { source, problem, vars, rhs, x0, h, steps, measure_order, levels } => {
            let req = commands::IntegrateRequest { problem, vars, rhs, x0, h, steps, measure_order, levels };
            commands::integrate(&opts, &source, req)
        }
    };
    match result.and_then(|text| commands::emit(cli.out.as_deref(), &text)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
