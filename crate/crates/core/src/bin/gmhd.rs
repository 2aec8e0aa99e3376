use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gmhd::cli::{cmd_diag, cmd_run, cmd_symbol, cmd_validate_kernel, EXIT_ERROR};
use gmhd::config::parse_config;

#[derive(Parser)]
#[command(name = "gmhd", version, about = "2D generalized MHD with nonlocal dissipation")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the configured kernel profile; exit 0 admissible, 1 weak-only, 2 rejected.
    ValidateKernel {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the symbol as `kappa,sigma` CSV for grid wavenumbers up to --kappa-max.
    Symbol {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        kappa_max: Option<f64>,
    },
    /// Run the simulation; exit 3 on blow-up.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute diagnostics from snapshot files.
    Diag {
        #[arg(long)]
        config: PathBuf,
        /// Write diagnostics.csv into this directory instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(required = true)]
        snapshots: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = match &args.command {
        Command::ValidateKernel { config } => {
            parse_config(config).map_err(Into::into).and_then(|c| cmd_validate_kernel(&c, &mut out))
        }
        Command::Symbol { config, kappa_max } => {
            parse_config(config).map_err(Into::into).and_then(|c| cmd_symbol(&c, *kappa_max, &mut out))
        }
        Command::Run { config, out: dir } => {
            parse_config(config).map_err(Into::into).and_then(|c| cmd_run(&c, dir.as_deref(), &mut out))
        }
        Command::Diag { config, out: dir, snapshots } => {
            parse_config(config).map_err(Into::into).and_then(|c| match dir {
                Some(d) => std::fs::create_dir_all(d)
                    .and_then(|_| std::fs::File::create(d.join(gmhd::cli::DIAGNOSTICS_FILE)))
                    .map_err(Into::into)
                    .and_then(|mut f| cmd_diag(&c, snapshots, &mut f)),
                None => cmd_diag(&c, snapshots, &mut out),
            })
        }
    };
    let _ = out.flush();
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
