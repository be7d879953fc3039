//! `minerisk`: ruin probabilities and expected surplus of protocol-following
//! and block-withholding miners, as CSV or JSON data.

mod config;
mod failure;
mod manifest;
mod output;
mod scenario;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::Flags;
use crate::failure::Failure;

#[derive(Debug, Parser)]
#[command(name = "minerisk", version, about = "Miner ruin probabilities and expected surplus")]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Protocol-following ruin probability: deterministic, infinite and exponential horizons.
    HonestRuin,
    /// Protocol-following expected surplus, zero on ruin.
    HonestValue,
    /// Withholding ruin probability at an exponential horizon.
    SelfishRuin,
    /// Withholding expected surplus at an exponential horizon.
    SelfishValue,
    /// Net-profit frontiers in electricity price, swept over the hashshare.
    Frontier,
    /// Pool ruin probability and profit per member, swept over the pool size.
    Pool {
        /// Hashshare of each member.
        #[arg(long, default_value_t = 0.01)]
        member_share: f64,
        /// Initial wealth of each member, USD.
        #[arg(long, default_value_t = 10_000.0)]
        member_capital: f64,
    },
    /// Profit over two difficulty segments.
    Segments,
    /// Monte-Carlo estimate of a quantity such as `honest-ruin-det`.
    Simulate {
        /// `<honest|selfish>-<ruin|value>-<det|exp|inf>`.
        #[arg(long)]
        quantity: String,
    },
    /// Data series of a figure, fig2a to fig10b.
    Figure {
        id: String,
        /// Grid points along the x-axis.
        #[arg(long)]
        points: Option<usize>,
    },
    /// Re-run a manifest written with --manifest.
    Replay { manifest: std::path::PathBuf },
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Cmd::Replay { manifest } = &cli.command {
        return manifest::replay(manifest, cli.flags.out.as_deref());
    }
    let settings = cli.flags.resolve()?;
    let command = match cli.command {
        Cmd::HonestRuin => scenario::Command::HonestRuin,
        Cmd::HonestValue => scenario::Command::HonestValue,
        Cmd::SelfishRuin => scenario::Command::SelfishRuin { state: settings.state },
        Cmd::SelfishValue => scenario::Command::SelfishValue { state: settings.state },
        Cmd::Frontier => scenario::Command::Frontier { qs: settings.qs.clone() },
        Cmd::Pool {
            member_share,
            member_capital,
        } => scenario::Command::Pool {
            member_share,
            member_capital,
        },
        Cmd::Segments => scenario::Command::Segments,
        Cmd::Simulate { quantity } => scenario::Command::Simulate {
            quantity,
            state: settings.state,
        },
        Cmd::Figure { id, points } => scenario::Command::Figure { id, points },
        Cmd::Replay { .. } => unreachable!(),
    };
    let scenario = settings.scenario(command)?;
    manifest::execute(&scenario, settings.out.as_deref(), settings.manifest.as_deref())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
