mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::output::CommandResult;

/// Compatible symplectic bases and transversal Clifford layers for
/// self-dual CSS codes.
///
/// Code arguments take a code file path or `builtin:NAME` for one of
/// qhamming15, c422, c622, steane7.
#[derive(Debug, Parser)]
#[command(name = "sdcss", version)]
struct Cli {
    /// Print a human-readable rendering instead of JSON.
    #[arg(long, global = true)]
    human: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether a compatible basis exists.
    Check { code: String },
    /// Build and verify a compatible basis.
    Basis {
        code: String,
        /// Write the basis file here.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Synthesize a physical S/S† layer for target logical signs.
    Phase {
        code: String,
        /// `all+`, `all-`, a `+-` string, or a comma list of ±1.
        #[arg(long, allow_hyphen_values = true)]
        signs: String,
        /// Basis file; defaults to the code file's basis, then a constructed one.
        #[arg(long)]
        basis: Option<PathBuf>,
    },
    /// Build a concatenated code from a list of codes, innermost first.
    Concat {
        spec: PathBuf,
        /// Run the multilevel checks.
        #[arg(long)]
        verify: bool,
        /// Number of sign patterns; all of them when at least 2^K.
        #[arg(long, default_value_t = 32)]
        samples: usize,
        #[arg(long, default_value_t = commands::DEFAULT_SEED)]
        seed: u64,
    },
    /// Find the global H/S word turning one logical measurement into another.
    Convert {
        /// Number of logical qubits.
        #[arg(short, long)]
        k: usize,
        #[arg(allow_hyphen_values = true)]
        source: String,
        #[arg(allow_hyphen_values = true)]
        target: String,
        #[arg(long, default_value_t = 8)]
        max_depth: usize,
    },
    /// Emit a catalog code file: a builtin name, or `hamming --m M`.
    Catalog {
        name: String,
        #[arg(long)]
        m: Option<u32>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a basis against a code, including the all-H swap.
    Verify {
        code: String,
        /// Basis file; defaults to the basis stored with the code.
        #[arg(long)]
        basis: Option<PathBuf>,
    },
}

fn run(cmd: Command) -> CommandResult {
    match cmd {
        Command::Check { code } => commands::check(&code),
        Command::Basis { code, output } => commands::basis(&code, output.as_deref()),
        Command::Phase { code, signs, basis } => commands::phase(&code, &signs, basis.as_deref()),
        Command::Concat {
            spec,
            verify,
            samples,
            seed,
        } => commands::concat(&spec, verify, samples, seed),
        Command::Convert {
            k,
            source,
            target,
            max_depth,
        } => commands::convert(k, &source, &target, max_depth),
        Command::Catalog { name, m, output } => commands::catalog(&name, m, output.as_deref()),
        Command::Verify { code, basis } => commands::verify(&code, basis.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli.command);
    let text = match cli.human {
        true => result.human().to_string(),
        false => result.to_json(),
    };
    let _ = writeln!(std::io::stdout(), "{text}");
    ExitCode::from(result.status.exit_code())
}
