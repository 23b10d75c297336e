use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hyperchow::commands::{run, Command, EXIT_USAGE};
use hyperchow_core::orbring::Which;

#[derive(Parser)]
#[command(name = "hyperchow", version, about = "Orbifold Chow rings of hypertoric Deligne-Mumford stacks")]
struct Cli {
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct FileArg {
    /// Arrangement file (TOML or JSON)
    file: PathBuf,
}

#[derive(Args)]
#[group(multiple = false)]
struct WhichArg {
    /// The orbifold Chow ring (default)
    #[arg(long)]
    orbifold: bool,
    /// The Chow ring of the coarse moduli space
    #[arg(long)]
    coarse: bool,
}

impl WhichArg {
    fn which(&self) -> Which {
        if self.coarse {
            Which::Coarse
        } else {
            Which::Orbifold
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the arrangement conditions
    Validate(FileArg),
    /// Gale dual group, map and theta
    Gale(FileArg),
    /// Hyperplanes and bounded complex
    Arrangement {
        #[command(flatten)]
        file: FileArg,
        /// Coorientation sign of the lift
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        sign: i32,
    },
    /// Cones of the multi-fan
    Multifan(FileArg),
    /// Lawrence fan, irrelevant ideal and hypertoric ideal
    Lawrence(FileArg),
    /// Box elements
    Box(FileArg),
    /// Inertia components and quotient arrangements
    Inertia(FileArg),
    /// Presentation of the Chow ring
    Chow {
        #[command(flatten)]
        file: FileArg,
        #[command(flatten)]
        which: WhichArg,
    },
    /// Hilbert series by degree
    Hilbert {
        #[command(flatten)]
        file: FileArg,
        #[command(flatten)]
        which: WhichArg,
    },
    /// Normal-form product of two elements such as "u1*y2^2"
    Multiply {
        #[command(flatten)]
        file: FileArg,
        #[arg(long, allow_hyphen_values = true)]
        left: String,
        #[arg(long, allow_hyphen_values = true)]
        right: String,
    },
    /// Golden fixtures and property suites
    Selftest {
        /// Number of random arrangements
        #[arg(long, default_value_t = 20)]
        random: usize,
        /// Random samples per property
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let (command, file) = match cli.command {
        Cmd::Validate(f) => (Command::Validate, Some(f.file)),
        Cmd::Gale(f) => (Command::Gale, Some(f.file)),
        Cmd::Arrangement { file, sign } => (Command::Arrangement { sign }, Some(file.file)),
        Cmd::Multifan(f) => (Command::Multifan, Some(f.file)),
        Cmd::Lawrence(f) => (Command::Lawrence, Some(f.file)),
        Cmd::Box(f) => (Command::Box, Some(f.file)),
        Cmd::Inertia(f) => (Command::Inertia, Some(f.file)),
        Cmd::Chow { file, which } => (Command::Chow(which.which()), Some(file.file)),
        Cmd::Hilbert { file, which } => (Command::Hilbert(which.which()), Some(file.file)),
        Cmd::Multiply { file, left, right } => (Command::Multiply { left, right }, Some(file.file)),
        Cmd::Selftest { random, samples } => (Command::Selftest { random, samples }, None),
    };
    let out = run(&command, file.as_deref());
    if cli.json {
        let text = serde_json::to_string_pretty(&out.json).expect("json serializes");
        // a closed pipe is not an error for a filter-style tool
        let _ = writeln!(std::io::stdout(), "{}", text);
    } else if out.code == EXIT_USAGE {
        eprint!("{}", out.text);
    } else {
        let _ = write!(std::io::stdout(), "{}", out.text);
    }
    ExitCode::from(out.code as u8)
}
