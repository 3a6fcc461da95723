use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use rbffd_cli::{cmd_converge, cmd_nodes, cmd_price, RunConfig};

#[derive(Parser)]
#[command(name = "rbffd", version, about = "RBF-FD option pricing harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// Configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a node layout and write it in text form.
    Nodes(Io),
    /// Price one configuration and compare with the reference values.
    Price(Io),
    /// Sweep the node counts and fit the convergence order.
    Converge(Io),
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Nodes(io) => {
            let cfg = RunConfig::load(&io.config)?;
            println!("{}", cmd_nodes(&cfg, &io.out)?);
        }
        Command::Price(io) => {
            let cfg = RunConfig::load(&io.config)?;
            print!("{}", cmd_price(&cfg, &io.out)?);
        }
        Command::Converge(io) => {
            let cfg = RunConfig::load(&io.config)?;
            println!("{}", rbffd_cli::CSV_HEADER);
            let sweep = cmd_converge(&cfg, &io.out, |r| {
                println!(
                    "{},{:e},{:.3},{:.3},{:.3},{:.3},{:e}",
                    r.n, r.du_max, r.t_weights, r.t_assemble, r.t_step, r.t_total, r.cond1
                );
            })?;
            match sweep.order {
                Some(o) => println!("fitted order vs sqrt(N): {o:.3}"),
                None => eprintln!("warning: fewer than two sweep members, no order fitted"),
            }
        }
    }
    Ok(())
}
