use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod output;

use output::{Format, Outcome};

#[derive(Parser, Debug)]
#[command(name = "eala", version, about = "Extended affine root systems, characters and Lie tori")]
struct Cli {
    #[arg(long, value_enum, default_value_t = FormatArg::Json, global = true)]
    format: FormatArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invariants and axiom checks for a root system spec.
    EarsInfo {
        spec: PathBuf,
        #[arg(long, default_value_t = 2)]
        window: u32,
        /// Also run the reflectable-base search on this window.
        #[arg(long)]
        oracle_window: Option<u32>,
    },
    /// Core-character and character checks.
    CharVerify {
        spec: PathBuf,
        character: PathBuf,
        #[arg(long, default_value_t = 2)]
        window: u32,
    },
    /// Extends a character to the root lattice or prints an obstruction.
    CharExtend {
        spec: PathBuf,
        character: PathBuf,
        #[arg(long, default_value_t = 2)]
        window: u32,
    },
    /// Writes the type A1 counterexample as spec.json and char.json.
    Counterexample {
        #[arg(long, default_value_t = 6)]
        nullity: usize,
        /// JSON list of coset representatives (inline or a file).
        #[arg(long)]
        taus: Option<String>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Reflections, reflectable bases and decompositions.
    Weyl {
        spec: PathBuf,
        /// JSON list of roots (inline or a file).
        #[arg(long)]
        base: Option<String>,
        #[arg(long, default_value_t = 2)]
        window: u32,
        #[command(subcommand)]
        action: WeylAction,
    },
    /// Checks on the multiloop Lie torus of type A.
    Torus {
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        nu: usize,
        #[arg(long)]
        modulus: usize,
        #[arg(long, default_value_t = 2)]
        window: u32,
        #[command(subcommand)]
        action: TorusAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum WeylAction {
    /// Closure of the base under its reflections.
    Orbit,
    /// Whether the base is reflectable on the window.
    Check,
    /// Smallest reflectable base found by search.
    Minsize {
        #[arg(long, default_value_t = 6)]
        max_size: usize,
    },
    /// Signed sum of base roots with root prefix sums.
    Decompose {
        /// A root as JSON (inline or a file).
        #[arg(long)]
        target: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum TorusAction {
    CheckChevalley,
    CheckJacobi,
    CheckDiagonal {
        /// Exponent values on the standard basis of the root lattice.
        #[arg(long)]
        hom: String,
    },
    Extract {
        #[arg(long)]
        hom: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.format {
        FormatArg::Json => Format::Json,
        FormatArg::Text => Format::Text,
    };
    let start = Instant::now();
    let outcome = commands::run(cli.command);
    eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    match outcome {
        Ok(Outcome { output, passed }) => {
            println!("{}", output.render(format));
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
