use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

/// Exact constructions in n-angulated categories over graded vector spaces.
#[derive(Parser, Debug)]
#[command(name = "nangle", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Number of objects per sequence.
    #[arg(long, global = true)]
    pub n: Option<usize>,

    /// Prime field characteristic; input files carry their own.
    #[arg(long, global = true, env = "NANGLE_PRIME")]
    pub prime: Option<u32>,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, default_value_t = 100)]
    pub trials: usize,

    /// Largest dimension of a generated graded piece.
    #[arg(long, global = true, default_value_t = 3)]
    pub max_dim: usize,

    #[arg(long, global = true, default_value_t = -2, allow_hyphen_values = true)]
    pub degree_lo: i64,

    #[arg(long, global = true, default_value_t = 2, allow_hyphen_values = true)]
    pub degree_hi: i64,

    #[arg(long = "in", global = true)]
    pub input: Option<PathBuf>,

    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    /// One JSON record per line (reports only).
    Jsonl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// One exact sequence.
    Seq,
    /// Two exact sequences and a commuting first square.
    Pair,
    /// Input of the higher octahedral construction.
    Octa,
    /// Three spliced 4-angles and φ₂.
    Splice,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Left,
    Right,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a random instance.
    Gen {
        #[arg(long, value_enum, default_value_t = Kind::Seq)]
        kind: Kind,
        /// Trivial pieces per generated sequence.
        #[arg(long, default_value_t = 4)]
        pieces: usize,
    },
    /// Rotate every sequence in the input.
    Rotate {
        #[arg(long, value_enum, default_value_t = Direction::Left)]
        direction: Direction,
        #[arg(long, default_value_t = 1)]
        times: usize,
    },
    /// Mapping cone of the morphism in the input.
    Cone,
    /// Complete a first square between `source` and `target`.
    Complete,
    /// Higher octahedron on `a`, `b`, `c`, `phi2`.
    Octa {
        /// Run the converse construction on a `pair` file instead.
        #[arg(long)]
        converse: bool,
    },
    /// Step-by-step octahedron on spliced 4-angles.
    Cluster4,
    /// Run the axiom suite, or check the sequences of `--in`.
    Check,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nangle: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
