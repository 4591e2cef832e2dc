//! `picheck [--path DIR]... [--step-limit N] [--regularity] FILE.pi`

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use pi_check::driver::{run, DriverConfig};

#[derive(Parser, Debug)]
#[command(name = "picheck", version, about = "Type check a module and print it back")]
struct Args {
    /// Directory to search for imported modules (repeatable; defaults to the
    /// entry file's directory).
    #[arg(long = "path", value_name = "DIR")]
    paths: Vec<PathBuf>,
    /// Maximum number of reduction steps per declaration.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    step_limit: Option<u64>,
    /// Check that every inferred type is itself a type.
    #[arg(long)]
    regularity: bool,
    /// Do not load the bundled prelude.
    #[arg(long)]
    no_prelude: bool,
    /// Compare terms up to alpha-equivalence only, never unfolding definitions.
    #[arg(long, hide = true)]
    no_unfold: bool,
    /// The module to check.
    file: PathBuf,
}

const STACK_SIZE: usize = 256 * 1024 * 1024;

fn main() -> ExitCode {
    let args = Args::parse();
    let config = DriverConfig {
        search_paths: args.paths,
        step_limit: args.step_limit,
        regularity: args.regularity,
        entry_file: args.file,
        prelude: !args.no_prelude,
        unfold_definitions: !args.no_unfold,
    };
    let outcome = std::thread::Builder::new()
        .stack_size(STACK_SIZE)
        .spawn(move || run(&config))
        .expect("spawn checker thread")
        .join()
        .expect("checker thread panicked");
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(outcome.exit_code as u8)
}
