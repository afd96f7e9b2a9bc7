//! `llab`: batch verification campaigns over ranges of moduli.
//!
//! Exit status: 0 when every assertable check passed, 1 when some check
//! failed, 2 for configuration errors, 3 for output I/O errors.

mod campaign;
mod rows;
mod table_cache;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use campaign::{CampaignError, CommandKind, Config};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Parser, Debug)]
#[command(
    name = "llab",
    about = "Verification campaigns for Liouville sign patterns, dilation exceptional sets, spectral and character identities, Pierce expansions, and discrepancy bounds",
    version
)]
struct Cli {
    /// Campaign to run.
    #[arg(value_enum)]
    command: CommandKind,

    /// First modulus of the sweep (inclusive).
    #[arg(long)]
    n_start: u64,

    /// Last modulus of the sweep (inclusive).
    #[arg(long)]
    n_end: u64,

    /// Restrict the patterns sweep to prime moduli (identity-style
    /// campaigns iterate primes regardless).
    #[arg(long)]
    primes_only: bool,

    /// Dilation indices d (repeatable); also the set index b for the
    /// discrepancy campaign.
    #[arg(long = "d", value_name = "INT")]
    d: Vec<u64>,

    /// Prime cutoffs p for the Pierce campaign (repeatable).
    #[arg(long = "p", value_name = "INT")]
    p: Vec<u64>,

    /// Largest digit r for the nu-moment sweep.
    #[arg(long = "r", value_name = "INT", default_value_t = 12)]
    r_max: u64,

    /// Friable bound T.
    #[arg(long = "T", value_name = "INT", default_value_t = 10)]
    t_bound: u64,

    /// Friability (smoothness) parameter q.
    #[arg(long = "q", value_name = "INT", default_value_t = 3)]
    q: u64,

    /// Frequency cutoffs K for discrepancy bounds (repeatable).
    #[arg(long = "K", value_name = "INT")]
    k_cutoffs: Vec<u64>,

    /// Prime window parameter P: averages run over primes in (P, 2P].
    #[arg(long = "P", value_name = "INT", default_value_t = 3)]
    p_range: u64,

    /// Output format.
    #[arg(long, value_enum)]
    format: Format,

    /// Output path.
    #[arg(long)]
    out: PathBuf,

    /// Worker threads (defaults to the rayon heuristic).
    #[arg(long)]
    threads: Option<usize>,

    /// Seed for sampled sub-selections.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = Config {
        command: cli.command,
        n_start: cli.n_start,
        n_end: cli.n_end,
        primes_only: cli.primes_only,
        d: if cli.d.is_empty() { vec![2, 3] } else { cli.d.clone() },
        p: if cli.p.is_empty() { vec![5] } else { cli.p.clone() },
        r_max: cli.r_max,
        t_bound: cli.t_bound,
        q: cli.q,
        k_cutoffs: if cli.k_cutoffs.is_empty() {
            vec![10]
        } else {
            cli.k_cutoffs.clone()
        },
        p_range: cli.p_range,
        seed: cli.seed,
    };

    let run = || campaign::run(&config);
    let outcome = if let Some(threads) = cli.threads {
        let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool,
            Err(e) => {
                eprintln!("llab: cannot build worker pool: {e}");
                return ExitCode::from(2);
            }
        };
        pool.install(run)
    } else {
        run()
    };

    let outcome = match outcome {
        Ok(o) => o,
        Err(CampaignError::Usage(msg)) => {
            eprintln!("llab: {msg}");
            return ExitCode::from(2);
        }
    };

    let payload = match cli.format {
        Format::Csv => outcome.batch.to_csv(),
        Format::Json => match outcome.batch.to_json() {
            Ok(s) => s,
            Err(e) => {
                eprintln!("llab: serialization failed: {e}");
                return ExitCode::from(3);
            }
        },
    };
    if let Err(e) = write_output(&cli.out, &payload) {
        eprintln!("llab: cannot write {}: {e}", cli.out.display());
        return ExitCode::from(3);
    }

    println!(
        "llab: {} over {}..={} -> {} rows, {} failed checks, wrote {}",
        config.command,
        config.n_start,
        config.n_end,
        outcome.batch.len(),
        outcome.failures,
        cli.out.display()
    );
    if outcome.failures > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn write_output(path: &PathBuf, payload: &str) -> std::io::Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(payload.as_bytes())?;
    file.flush()
}
