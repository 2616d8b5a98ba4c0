//! Command-line front end. Exit codes: 0 success, 1 runtime failure, 2
//! configuration or parse error.

mod commands;
mod config;
mod oracle;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use commands::{EvalArgs, Overrides, TranslateArgs};

/// Context marker for errors that should exit with code 2.
#[derive(Debug, Clone, Copy)]
pub struct ConfigError;

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("invalid configuration or input")
    }
}

#[derive(Parser)]
#[command(name = "ltlsynth", version, about = "Controller synthesis for LTL objectives on stochastic systems")]
struct Cli {
    /// Worker threads for rollouts and Monte-Carlo checks (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long, short)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Run directory; overrides `output` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Total episode budget; overrides `train.episodes`.
    #[arg(long)]
    episodes: Option<usize>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides { seed: self.seed, output: self.out.clone(), episodes: self.episodes }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the positive normal form and the letter interpretation of a
    /// formula, and check an automaton against it on random lassos.
    Translate {
        #[arg(long)]
        formula: Option<String>,
        /// Comma-separated propositions, in letter-bit order.
        #[arg(long, value_delimiter = ',')]
        props: Option<Vec<String>>,
        /// `builtin:<name>`, `builtin:universal`, or an automaton file.
        #[arg(long)]
        automaton: Option<String>,
        #[arg(long, short)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 2000)]
        lassos: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Train on the exact labelling.
    Train(RunArgs),
    /// Train through the configured curriculum.
    GuidedTrain(RunArgs),
    /// Monte-Carlo evaluation of a checkpoint with a Hoeffding interval.
    Evaluate {
        #[command(flatten)]
        run: RunArgs,
        /// Defaults to `<output>/checkpoints/final.ckpt`.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Evaluate a freshly initialised policy instead of a checkpoint.
        #[arg(long, conflicts_with = "checkpoint")]
        untrained: bool,
        #[arg(long)]
        trajectories: Option<usize>,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Exact and statistical oracles.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Augmented reach value of the countable chain.
    Chain {
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.9, 0.99])]
        zeta: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        n_trunc: usize,
        /// Smallest accepting chain state.
        #[arg(long, default_value_t = 2)]
        first_accepting: usize,
    },
    /// One-sided Hoeffding interval for `h` successes out of `n`.
    Hoeffding {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        h: u64,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Büchi value and augmented reach values of a finite MDP file.
    Buchi {
        #[arg(long)]
        mdp: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [0.9, 0.99, 0.999, 0.9999])]
        zeta: Vec<f64>,
    },
    /// Conditional accepting-visit estimate under the first action.
    Visits {
        #[arg(long, conflicts_with = "chain")]
        mdp: Option<PathBuf>,
        /// Use the countable chain truncated at this size.
        #[arg(long)]
        chain: Option<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [500, 1000, 2000, 4000])]
        horizon: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        trajectories: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Translate { formula, props, automaton, config, lassos, seed } => {
            commands::cmd_translate(&TranslateArgs { formula, props, automaton, config, lassos, seed })
        }
        Command::Train(r) => {
            commands::cmd_train(&commands::load_config(&r.config, &r.overrides())?)?;
            Ok(true)
        }
        Command::GuidedTrain(r) => {
            commands::cmd_guided_train(&commands::load_config(&r.config, &r.overrides())?)?;
            Ok(true)
        }
        Command::Evaluate { run, checkpoint, untrained, trajectories, horizon } => {
            let cfg = commands::load_config(&run.config, &run.overrides())?;
            commands::cmd_evaluate(&cfg, &EvalArgs { checkpoint, untrained, trajectories, horizon })?;
            Ok(true)
        }
        Command::Oracle(o) => {
            match o {
                OracleCommand::Chain { zeta, n_trunc, first_accepting } => oracle::chain(&zeta, n_trunc, first_accepting)?,
                OracleCommand::Hoeffding { n, h, eps, delta } => oracle::hoeffding(n, h, eps, delta)?,
                OracleCommand::Buchi { mdp, zeta } => oracle::buchi(&mdp, &zeta)?,
                OracleCommand::Visits { mdp, chain, horizon, trajectories, seed } => {
                    oracle::visits(mdp.as_deref(), chain, &horizon, trajectories, seed)?
                }
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --workers: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
