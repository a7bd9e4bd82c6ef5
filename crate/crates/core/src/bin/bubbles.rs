use bubbles_core::harness::{execute, Command, RunConfig};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "bubbles", version, about = "Acoustic scattering by clusters of small bubbles")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Common {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory (defaults to outputs.dir, then `bubbles-out`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; BUBBLES_THREADS takes precedence
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Shape functionals and Minnaert frequencies per bubble
    Functionals(Common),
    /// Solve the point-interaction system
    Solve(Common),
    /// Solve and evaluate the far-field pattern
    Farfield(Common),
    /// Frequency sweep across the resonance
    Sweep(Common),
    /// Convergence study against an oracle
    Study(Common),
    /// Reference solution and its distance to the point-interaction model
    Oracle(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Functionals(c) => (Command::Functionals, c),
        Cmd::Solve(c) => (Command::Solve, c),
        Cmd::Farfield(c) => (Command::Farfield, c),
        Cmd::Sweep(c) => (Command::Sweep, c),
        Cmd::Study(c) => (Command::Study, c),
        Cmd::Oracle(c) => (Command::Oracle, c),
    };
    let env_threads = std::env::var("BUBBLES_THREADS").ok().and_then(|v| v.trim().parse().ok());
    if let Some(n) = env_threads.or(args.threads).filter(|n| *n > 0) {
        bubbles_core::parallel::set_threads(n);
    }
    let result = RunConfig::from_path(&args.config).and_then(|cfg| {
        let out = args
            .out
            .clone()
            .or_else(|| cfg.outputs.dir.clone())
            .unwrap_or_else(|| PathBuf::from("bubbles-out"));
        execute(command, &cfg, &out)
    });
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
