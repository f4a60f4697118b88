use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;

use config::{FileConfig, Overrides};

#[derive(Parser, Debug)]
#[command(name = "amalgamkit", version, about = "Finite-group computations behind the PSL2(8) amalgam checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    /// Cache directory for fetched generator files.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Directory holding the vendored generator files.
    #[arg(long)]
    data_root: Option<PathBuf>,
    /// Base URL substituted into manifest URL templates.
    #[arg(long)]
    base_url: Option<String>,
    /// Never open a network connection.
    #[arg(long)]
    offline: bool,
}

#[derive(Args, Debug, Clone)]
pub struct ElementArgs {
    /// Generator file, either `NAME=PATH` or a bare path named a, b, c in order.
    #[arg(short, long = "gen", required = true)]
    gens: Vec<String>,
    /// Word in the generators, such as `a b^-1 (a b)^3`.
    #[arg(short, long)]
    word: String,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Populate the cache with one manifest group, or all of them.
    Fetch {
        #[arg(long, conflicts_with = "all")]
        group: Option<String>,
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Evaluate a word, or every line of an element script, over generator files.
    Eval {
        #[arg(short, long = "gen", required = true)]
        gens: Vec<String>,
        #[arg(short, long, required_unless_present = "script", conflicts_with = "script")]
        word: Option<String>,
        /// Element script whose annotated orders are checked.
        #[arg(long)]
        script: Option<PathBuf>,
        /// Also run entries tagged monster-only.
        #[arg(long)]
        all_tags: bool,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Exact order of a word.
    Order(ElementArgs),
    /// Minimal polynomial of a word over GF(2), with its factorisation.
    Minpoly(ElementArgs),
    /// Homogeneous components of a fixed-point-free element of order 7.
    Split(ElementArgs),
    /// Orbits on the one-spaces of the natural module.
    Orbits {
        /// Matrix generator files.
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Extend GF(2) matrices to the field of this order before acting.
        #[arg(long)]
        extend_to: Option<u32>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Run claim scenarios S0 to S4 and judge them against the claim table.
    Scenario {
        /// Scenario ids such as S2 or s4.
        ids: Vec<String>,
        #[arg(long, conflicts_with = "ids")]
        all: bool,
        #[command(flatten)]
        data: DataArgs,
        /// Worker threads; 0 picks the number of cores.
        #[arg(long)]
        threads: Option<usize>,
        /// Keep per-claim timings in the JSON report.
        #[arg(long)]
        timing: bool,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
}

/// A failed command: configuration and input errors exit with 2, claim failures with 1.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Claims(usize),
}

impl DataArgs {
    fn overrides(&self, threads: Option<usize>) -> Overrides {
        Overrides {
            cache_dir: self.cache_dir.clone(),
            data_root: self.data_root.clone(),
            base_url: self.base_url.clone(),
            offline: self.offline,
            threads,
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = || FileConfig::load(&std::env::current_dir().map_err(|e| Failure::Config(e.to_string()))?).map_err(Failure::Config);
    match cli.command {
        Command::Fetch { group, all, data, format } => {
            let settings = config::resolve(&data.overrides(None), file()?);
            commands::fetch(&settings, group.as_deref(), all, format)
        }
        Command::Eval { gens, word, script, all_tags, format } => commands::eval(&gens, word.as_deref(), script.as_deref(), all_tags, format),
        Command::Order(a) => commands::order(&a.gens, &a.word, a.format),
        Command::Minpoly(a) => commands::minpoly(&a.gens, &a.word, a.format),
        Command::Split(a) => commands::split(&a.gens, &a.word, a.format),
        Command::Orbits { files, extend_to, format } => commands::orbits(&files, extend_to, format),
        Command::Scenario { ids, all, data, threads, timing, format } => {
            let settings = config::resolve(&data.overrides(threads), file()?);
            commands::scenario(&settings, &ids, all, timing, format)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Claims(n)) => {
            eprintln!("{n} claim(s) failed");
            ExitCode::from(1)
        }
    }
}
