use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Run LISP programs, the universal machine, and the complexity toolkit.
#[derive(Debug, Parser)]
#[command(name = "aitlisp", version)]
pub struct Cli {
    /// Worker threads for enumeration verbs (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    verb: Verb,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Evaluate a source file form by form.
    Run {
        file: PathBuf,
        /// Step limit per top-level form.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Read forms from standard input and print their values.
    Repl {
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Run a bit-string program file on the universal machine.
    U {
        file: PathBuf,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Print an expression's 8-bit-per-character program bits.
    Bits {
        expr: String,
        /// Print only the number of bits.
        #[arg(long)]
        count: bool,
        /// Raw data bits to append after the expression.
        #[arg(long)]
        data: Option<String>,
    },
    /// Make a bit string self-delimiting.
    Encode {
        bits: String,
        #[command(flatten)]
        codec: CodecArgs,
    },
    /// Read one codeword from the front of a bit string.
    Decode {
        bits: String,
        #[command(flatten)]
        codec: CodecArgs,
    },
    /// Allocate codewords for "size expression" lines (file or standard input).
    Kraft { file: Option<PathBuf> },
    /// Halting-probability lower bounds and halting from side information.
    Omega(OmegaArgs),
    /// List the budget-elegant expressions up to a size.
    Elegant {
        #[arg(long, default_value_t = 6)]
        cap: usize,
        #[arg(long, default_value_t = 1000)]
        budget: u64,
        /// Atoms to build from, blank separated.
        #[arg(long)]
        vocab: Option<String>,
    },
    /// Smallest program found for a target.
    Complexity(ComplexityArgs),
    /// Pair two universal-machine programs.
    Pair {
        /// Programs as bit strings, or @path to read one from a file.
        xstar: Option<String>,
        ystar: Option<String>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Search a theory for a provably elegant expression larger than the search.
    Paradox {
        /// sound, unsound, empty, or a source file.
        #[arg(long, default_value = "unsound")]
        theory: String,
        /// Comma-separated step budgets, tried in order.
        #[arg(long, default_value = "1000,10000,100000,1000000")]
        schedule: String,
        #[arg(long, default_value_t = 60)]
        wall_secs: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    Doubling,
    Header,
    TwoHeader,
    Elegant,
}

#[derive(Debug, Args)]
pub struct CodecArgs {
    #[arg(long, value_enum, default_value = "doubling")]
    scheme: Scheme,
    /// Search cap for the elegant header, in bits.
    #[arg(long, default_value_t = 32)]
    cap: usize,
    #[arg(long, default_value_t = 1000)]
    budget: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MachineArg {
    Toy,
    Numeral,
    Lispu,
}

#[derive(Debug, Args)]
pub struct OmegaArgs {
    #[arg(long, value_enum, default_value = "toy")]
    machine: MachineArg,
    #[arg(long, default_value_t = 8)]
    max_len: usize,
    #[arg(long, default_value_t = 1000)]
    budget: u64,
    /// Print this many leading bits of Ω, if the machine's Ω is known and
    /// the bound is close enough to certify them.
    #[arg(long)]
    bits: Option<u32>,
    /// Decide halting of PROGRAMS given that exactly this many halt.
    #[arg(long, conflicts_with_all = ["oracle", "prime"], requires = "programs")]
    count: Option<usize>,
    programs: Vec<String>,
    /// Decide halting of every program up to N bits from Ω's first N bits.
    #[arg(long, conflicts_with = "prime")]
    oracle: Option<usize>,
    /// Value of Ω to use with --oracle, e.g. 1/2 (default: the machine's own).
    #[arg(long, requires = "oracle")]
    omega: Option<String>,
    /// Lower bound on Σ 2^-H(N) for N up to this value.
    #[arg(long)]
    prime: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComplexityMachine {
    Toy,
    Numeral,
    Lispu,
    /// Characters of a LISP expression rather than bits of a program.
    Lisp,
}

#[derive(Debug, Args)]
pub struct ComplexityArgs {
    /// Target expression; toy-machine targets are bit lists such as (0 0 1).
    target: String,
    #[arg(long, value_enum, default_value = "toy")]
    machine: ComplexityMachine,
    /// Largest program to try: bits, or characters with --machine lisp.
    #[arg(long, default_value_t = 16)]
    cap: usize,
    #[arg(long, default_value_t = 1000)]
    budget: u64,
    /// Atoms for --machine lisp (default: the target's atoms and a few primitives).
    #[arg(long)]
    vocab: Option<String>,
    /// Also sum the probability of all programs up to --cap that output the target.
    #[arg(long)]
    probability: bool,
    /// Report H(x), H(y), H(x,y) and H(x:y) for the target and this second target.
    #[arg(long)]
    with: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let mut out = String::new();
    let result = commands::dispatch(cli.verb, &mut out);
    print!("{out}");
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{failure}");
            ExitCode::from(failure.code())
        }
    }
}
