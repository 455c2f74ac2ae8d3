//! `hfkgrid`: knot Floer homology of grid diagrams over F2.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hfkgrid::grid::DEFAULT_SIZE_CAP;
use hfkgrid::invariants::{symmetry_warnings, KnotInvariantSet};
use hfkgrid::obstruct::ObstructionMode;
use hfkgrid::runner::{self, ComputeOptions, RunnerError};

#[derive(Parser)]
#[command(
    name = "hfkgrid",
    version,
    about = "Knot Floer homology of grid diagrams over F2"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Invertible,
    Concordance,
    #[value(name = "doubly-slice")]
    DoublySlice,
}

impl From<ModeArg> for ObstructionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Invertible => ObstructionMode::Invertible,
            ModeArg::Concordance => ObstructionMode::Concordance,
            ModeArg::DoublySlice => ObstructionMode::DoublySlice,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the invariant document of one grid file
    Compute {
        grid: PathBuf,
        /// Write the document here as well as to stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Skip the result cache
        #[arg(long)]
        no_cache: bool,
        /// Grid-size cap for state enumeration
        #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
        cap: usize,
    },
    /// Evaluate a concordance-order obstruction between two knots
    Obstruct {
        from: PathBuf,
        /// Second input; omitted in doubly-slice mode
        to: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        no_cache: bool,
        #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
        cap: usize,
    },
    /// Print the spectral sequence page dimensions, one `r p m dim` per line
    Pages {
        grid: PathBuf,
        /// Stop the tower at this page
        #[arg(long)]
        max_page: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
        cap: usize,
    },
    /// Compute every .grd file in a directory and print a summary table
    Batch {
        dir: PathBuf,
        /// Worker threads (default: all cores)
        #[arg(long)]
        jobs: Option<usize>,
        /// Directory for the result documents
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        no_cache: bool,
        #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
        cap: usize,
    },
    /// Print the symmetrized Alexander polynomial from the state sum
    Poly {
        grid: PathBuf,
        /// Cross-check against the homology pipeline
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
        cap: usize,
    },
}

fn opts(cap: usize, no_cache: bool) -> ComputeOptions {
    ComputeOptions {
        cap,
        no_cache,
        cache_dir: None,
    }
}

fn run() -> Result<i32, RunnerError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Compute {
            grid,
            out,
            no_cache,
            cap,
        } => {
            let (bytes, cached) = runner::cmd_compute(&grid, out.as_deref(), &opts(cap, no_cache))?;
            print!("{}", String::from_utf8_lossy(&bytes));
            if cached {
                eprintln!("(cache hit)");
            }
            if let Ok(set) = serde_json::from_slice::<KnotInvariantSet>(&bytes) {
                for w in symmetry_warnings(&set) {
                    eprintln!("warning: {w}");
                }
            }
            Ok(0)
        }
        Command::Obstruct {
            from,
            to,
            mode,
            out,
            no_cache,
            cap,
        } => {
            let report =
                runner::cmd_obstruct(&from, to.as_deref(), mode.into(), &opts(cap, no_cache))?;
            let mut doc = serde_json::to_string_pretty(&report).expect("serializable");
            doc.push('\n');
            print!("{doc}");
            if let Some(out) = out {
                std::fs::write(&out, &doc).map_err(|source| RunnerError::Io {
                    path: out.display().to_string(),
                    source,
                })?;
            }
            Ok(runner::obstruct_exit_code(&report))
        }
        Command::Pages {
            grid,
            max_page,
            cap,
        } => {
            let dump = runner::cmd_pages(&grid, max_page, &opts(cap, false))?;
            print!("{dump}");
            Ok(0)
        }
        Command::Batch {
            dir,
            jobs,
            out,
            no_cache,
            cap,
        } => {
            let outcome = runner::cmd_batch(&dir, jobs, out.as_deref(), &opts(cap, no_cache))?;
            print!("{}", outcome.summary_tsv);
            for (path, err) in &outcome.errors {
                eprintln!("error: {}: {err}", path.display());
            }
            Ok(if outcome.errors.is_empty() { 0 } else { 1 })
        }
        Command::Poly { grid, check, cap } => {
            let poly = runner::cmd_poly(&grid, check, &opts(cap, false))?;
            println!("{poly}");
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
