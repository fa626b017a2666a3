//! Command-line driver for the deformation-theory engine.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use codiff::error::Error;
use codiff::io::{
    exit_code_for, parse_input, render_dims, render_report, render_verify, run, run_check,
    run_cohomology, run_verify, AlgebraInput, Format, RunConfig,
};

#[derive(Parser)]
#[command(
    name = "codiff",
    about = "Deformation theory of Lie, associative, L-infinity and A-infinity algebras: \
             cohomology, universal infinitesimal deformations, and miniversal formal \
             deformations over exact rationals",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Input file ('-' for standard input)
    input: PathBuf,
    /// Truncation weight for the coderivation calculus (overrides the file)
    #[arg(long)]
    weight_cap: Option<usize>,
    /// Formal order of the miniversal construction (overrides the file)
    #[arg(long)]
    order: Option<usize>,
    /// Deform in the classical category: quadratic structures, linear
    /// equivalences (lie/assoc inputs only)
    #[arg(long)]
    strict: bool,
    /// Output format
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Machine,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Machine => Format::Machine,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Verify that the input structure constants define a codifferential
    /// (Jacobi / associativity / the infinity identities)
    Check(CommonArgs),
    /// Compute the cohomology dimension table
    Cohomology(CommonArgs),
    /// Construct the miniversal deformation to the requested order
    Miniversal(CommonArgs),
    /// Verify that a user-supplied formal deformation factors through the
    /// miniversal deformation
    Verify(CommonArgs),
}

fn read_input(path: &PathBuf) -> Result<AlgebraInput, Error> {
    let text = if path.as_os_str() == "-" {
        let mut buffer = String::new();
        std::io::stdin()
            .read_to_string(&mut buffer)
            .map_err(|e| Error::InvalidInput(format!("cannot read stdin: {e}")))?;
        buffer
    } else {
        std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidInput(format!("cannot read {}: {e}", path.display()))
        })?
    };
    parse_input(&text)
}

fn execute(command: &Command) -> Result<(), Error> {
    let (args, action): (&CommonArgs, u8) = match command {
        Command::Check(a) => (a, 0),
        Command::Cohomology(a) => (a, 1),
        Command::Miniversal(a) => (a, 2),
        Command::Verify(a) => (a, 3),
    };
    let input = read_input(&args.input)?;
    let config = RunConfig::resolve(&input, args.weight_cap, args.order, args.strict)?;
    let format: Format = args.format.into();
    match action {
        0 => {
            run_check(&input, config)?;
            println!("ok: the structure constants define a codifferential");
        }
        1 => {
            let dims = run_cohomology(&input, config)?;
            print!("{}", render_dims(&dims, format));
        }
        2 => {
            let report = run(&input, config)?;
            print!("{}", render_report(&report, format));
        }
        _ => {
            let verify = run_verify(&input, config)?;
            print!("{}", render_verify(&verify, format));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap's help/version are successes; usage errors exit 1.
            if err.use_stderr() {
                eprint!("{err}");
                return ExitCode::from(1);
            }
            print!("{err}");
            return ExitCode::SUCCESS;
        }
    };
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(exit_code_for(&error) as u8)
        }
    }
}
