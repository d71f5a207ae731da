//! Command-line front end for the `tailmax` library.
//!
//! Every command prints a single-line JSON envelope with sorted keys and
//! 17-significant-digit floats. `contour` and `regions` also write a CSV.

pub mod commands;
pub mod envelope;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use tailmax::oracle::OracleConfig;

use commands::{CliError, CmdResult, EXIT_INVALID};
use envelope::Envelope;

#[derive(Debug, Parser)]
#[command(
    name = "tailmax",
    version,
    about = "Maximal lower-tail probabilities of i.i.d. sums on [0, 1]"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact maximizer for n = 2.
    Solve {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: f64,
        #[arg(long)]
        t: f64,
    },
    /// Binary and ternary candidate extremals for any n.
    Candidates {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: f64,
        #[arg(long)]
        t: f64,
    },
    /// Fit and check a Lagrange certificate for a distribution `x:p,...`.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: f64,
        #[arg(long, allow_hyphen_values = true)]
        dist: String,
    },
    /// Markov, Hoeffding and the n = 2 closed-form bound.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: f64,
        #[arg(long)]
        t: f64,
    },
    /// Grid search over distributions with at most three atoms.
    Oracle {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 40)]
        grid: usize,
        #[arg(long = "prob-steps", default_value_t = 32)]
        prob_steps: usize,
        #[arg(long, default_value_t = 3)]
        refine: usize,
    },
    /// CSV of p_2 against the Hoeffding bound.
    Contour {
        #[arg(long)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// CSV of the n = 2 support family over (t, m).
    Regions {
        #[arg(long)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Upper confidence bound on the mean from an observed sum.
    Confbound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        alpha: f64,
    },
    /// Witness where p_2 exceeds the Bernoulli value yet stays below p0.
    Falsify {
        #[arg(long)]
        p0: f64,
    },
}

/// Runs a parsed command.
pub fn execute(cmd: &Command) -> CmdResult {
    use commands::*;
    match cmd {
        Command::Solve { n, m, t } => cmd_solve(*n, *m, *t),
        Command::Candidates { n, m, t } => cmd_candidates(*n, *m, *t),
        Command::Verify { n, t, dist } => cmd_verify(*n, *t, dist),
        Command::Bounds { n, m, t } => cmd_bounds(*n, *m, *t),
        Command::Oracle {
            n,
            m,
            t,
            grid,
            prob_steps,
            refine,
        } => cmd_oracle(
            *n,
            *m,
            *t,
            OracleConfig {
                grid_n: *grid,
                prob_steps: *prob_steps,
                refine_iters: *refine,
            },
        ),
        Command::Contour { grid, out } => cmd_contour(*grid, out),
        Command::Regions { grid, out } => cmd_regions(*grid, out),
        Command::Confbound { n, t, alpha } => cmd_confbound(*n, *t, *alpha),
        Command::Falsify { p0 } => cmd_falsify(*p0),
    }
}

/// What the binary prints and the code it exits with.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses `args` (program name first), runs the command and renders the
/// result. Errors are rendered as an envelope with an `error` result.
pub fn run<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Output {
                    stdout: text,
                    stderr: String::new(),
                    code,
                }
            } else {
                Output {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            };
        }
    };
    match execute(&cli.command) {
        Ok(out) => Output {
            stdout: out.envelope.render() + "\n",
            stderr: String::new(),
            code: out.code,
        },
        Err(e) => error_output(&cli.command, e),
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Solve { .. } => "solve",
        Command::Candidates { .. } => "candidates",
        Command::Verify { .. } => "verify",
        Command::Bounds { .. } => "bounds",
        Command::Oracle { .. } => "oracle",
        Command::Contour { .. } => "contour",
        Command::Regions { .. } => "regions",
        Command::Confbound { .. } => "confbound",
        Command::Falsify { .. } => "falsify",
    }
}

/// Flag values of `cmd`, keyed as in the success envelopes.
fn command_inputs(cmd: &Command) -> serde_json::Map<String, serde_json::Value> {
    use serde_json::json;
    let pairs = match cmd {
        Command::Solve { n, m, t }
        | Command::Candidates { n, m, t }
        | Command::Bounds { n, m, t } => {
            vec![("n", json!(n)), ("m", json!(m)), ("t", json!(t))]
        }
        Command::Verify { n, t, dist } => {
            vec![("n", json!(n)), ("t", json!(t)), ("dist", json!(dist))]
        }
        Command::Oracle {
            n,
            m,
            t,
            grid,
            prob_steps,
            refine,
        } => vec![
            ("n", json!(n)),
            ("m", json!(m)),
            ("t", json!(t)),
            ("grid", json!(grid)),
            ("prob_steps", json!(prob_steps)),
            ("refine", json!(refine)),
        ],
        Command::Contour { grid, out } | Command::Regions { grid, out } => {
            vec![
                ("grid", json!(grid)),
                ("out", json!(out.display().to_string())),
            ]
        }
        Command::Confbound { n, t, alpha } => {
            vec![("n", json!(n)), ("t", json!(t)), ("alpha", json!(alpha))]
        }
        Command::Falsify { p0 } => vec![("p0", json!(p0))],
    };
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn error_output(cmd: &Command, e: CliError) -> Output {
    let env = Envelope::new(
        command_name(cmd),
        command_inputs(cmd),
        serde_json::json!({ "error": e.message, "exit_code": e.code }),
    );
    Output {
        stdout: env.render() + "\n",
        stderr: format!("error: {}\n", e.message),
        code: e.code,
    }
}
