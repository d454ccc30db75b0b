use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use modlie::Error;
use modlie_cli::cache::{write_atomic, Cache};
use modlie_cli::dump::AlgebraDump;
use modlie_cli::registry::{self, Params};
use modlie_cli::{self as cmd, WeightColumn};

#[derive(Parser)]
#[command(name = "modlie", version, about = "Prolongs and relations of modular graded Lie algebras")]
struct Cli {
    /// Directory with replacement seed files (checked against the built-in digests).
    #[arg(long, global = true)]
    seed_data_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct AlgebraArgs {
    /// Algebra name (see `modlie list`).
    name: String,
    /// Heights, comma separated.
    #[arg(long = "N", value_delimiter = ',')]
    n: Option<Vec<u32>>,
    /// Characteristic, where the family allows a choice.
    #[arg(long)]
    p: Option<u32>,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    a: i64,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    b: i64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    c: i64,
    /// Replace the algebra by its derived algebra.
    #[arg(long)]
    derived: bool,
    /// Degree cap for prolongs.
    #[arg(long, default_value_t = modlie::prolong::DEFAULT_CAP)]
    max_deg: i32,
    /// Cache directory (default from MODLIE_CACHE_DIR).
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

impl AlgebraArgs {
    fn params(&self) -> Params {
        Params { heights: self.n.clone(), p: self.p, a: self.a, b: self.b, c: self.c, derived: self.derived, cap: self.max_deg }
    }
}

#[derive(Subcommand)]
enum Command {
    /// List the known algebras.
    List,
    /// Build an algebra, print its dims and optionally write a JSON dump.
    Build {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-degree dims and weights as CSV.
    Table {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// extreme, peel or all.
        #[arg(long, default_value = "extreme")]
        weights: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimal defining relations of the positive part (br2, br3, frank).
    Relations {
        name: String,
        #[arg(long = "N", value_delimiter = ',')]
        n: Option<Vec<u32>>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        a: i64,
        /// Degree cap (default 10 for br3, 8 otherwise).
        #[arg(long)]
        max_deg: Option<i32>,
        #[arg(long)]
        json: bool,
        /// File with relations to compare against, one per line.
        #[arg(long)]
        against: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suite; exit status 1 on any failure.
    Check {
        #[command(flatten)]
        alg: AlgebraArgs,
    },
    /// Load a dump, verify its checksum and print its summary.
    Load { path: PathBuf },
}

/// Stdout writes that stop quietly when the reader goes away.
fn say(text: &str) {
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(p) => write_atomic(p, text),
        None => {
            say(text);
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32, Error> {
    if let Some(d) = &cli.seed_data_dir {
        std::env::set_var(modlie::catalog::SEED_DIR_ENV, d);
    }
    match cli.command {
        Command::List => {
            for (n, about) in registry::NAMES {
                say(&format!("{n:<8} {about}\n"));
            }
        }
        Command::Build { alg, out } => {
            let params = alg.params();
            let cache = Cache::resolve(alg.cache_dir.as_deref());
            let (a, _) = cmd::obtain(&alg.name, &params, cache.as_ref())?;
            say(&cmd::summary(&a));
            if let Some(p) = out {
                write_atomic(&p, &AlgebraDump::of(&a, params.heights.clone())?.to_json())?;
            }
        }
        Command::Table { alg, weights, out } => {
            let column: WeightColumn = weights.parse()?;
            let cache = Cache::resolve(alg.cache_dir.as_deref());
            let (a, _) = cmd::obtain(&alg.name, &alg.params(), cache.as_ref())?;
            emit(&cmd::table_csv(&a, column)?, out.as_ref())?;
        }
        Command::Relations { name, n, a, max_deg, json, against, out } => {
            let params = Params { heights: n, a, ..Params::default_cap() };
            let (rs, gens) = cmd::relations(&name, &params, max_deg.unwrap_or_else(|| registry::relation_max_degree(&name)))?;
            let text = if json { cmd::relations_json(&name, &rs, &gens) } else { cmd::relations_text(&name, &rs, &gens) };
            emit(&text, out.as_ref())?;
            if let Some(path) = against {
                eprint!("{}", cmd::compare_with_file(&rs, &path)?);
            }
        }
        Command::Check { alg } => {
            let report = cmd::check(&alg.name, &alg.params())?;
            say(&report.render());
            return Ok(if report.passed() { 0 } else { 1 });
        }
        Command::Load { path } => {
            let text = std::fs::read_to_string(&path).map_err(|e| Error::BadInput(format!("cannot read {}: {e}", path.display())))?;
            let d = AlgebraDump::from_json(&text)?;
            say(&cmd::summary(&d.algebra()?));
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cmd::exit_code(&e) as u8)
        }
    }
}
