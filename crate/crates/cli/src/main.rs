//! `carnot`: validate algebra specs, compute prolongations and check the
//! realized conformal fields.
//!
//! Exit status is 0 when every check passes, 1 on a semantic failure and
//! 2 on a parse or usage error.

mod commands;
mod report;
mod spec_file;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{CliError, Options};
use report::Format;

#[derive(Parser)]
#[command(name = "carnot", version, about = "Exact prolongation of graded nilpotent Lie algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Algebra spec in the `.alg` format.
    file: PathBuf,
    /// Highest prolongation level computed before giving up.
    #[arg(long, value_name = "N")]
    max_k: Option<usize>,
    /// Weighted degree bound of the polynomial oracle.
    #[arg(long, value_name = "D")]
    degree: Option<u32>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Build the algebra and check generation.
    Validate(Common),
    /// Compute derivations, g0 and the prolongation levels.
    Prolong(Common),
    /// Realize the prolongation as vector fields and check them.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Extra field to check: a generator name or `;`-separated frame components.
        #[arg(long, value_name = "FIELD")]
        inject_field: Option<String>,
    },
    /// Solve for polynomial conformal fields directly.
    Oracle(Common),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (run, common, inject_field): (fn(&std::path::Path, &Options) -> Result<_, CliError>, _, _) = match cli.command
    {
        Command::Validate(c) => (commands::validate, c, None),
        Command::Prolong(c) => (commands::prolong, c, None),
        Command::Verify { common, inject_field } => (commands::verify, common, inject_field),
        Command::Oracle(c) => (commands::oracle, c, None),
    };
    let opts = Options {
        max_k: common.max_k,
        degree: common.degree,
        inject_field,
    };
    match run(&common.file, &opts) {
        Ok(report) => {
            print!("{}", report.render(common.format));
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
