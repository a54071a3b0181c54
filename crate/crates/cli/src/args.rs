use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Ramanujan sums, coefficient spectra and expansions of the null function.
#[derive(Debug, Parser)]
#[command(name = "ramanujan-cloud", version)]
pub struct Cli {
    /// JSON config file; falls back to $RAMANUJAN_CLOUD_CONFIG, then defaults.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Exit with status 2 when a verdict or criterion is not a clear pass.
    #[arg(long, global = true)]
    pub strict: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the Ramanujan sum c_q(a).
    Csum {
        q: u64,
        a: u64,
        /// Also compute the root-of-unity and divisor-sum formulas.
        #[arg(long)]
        verify: bool,
    },
    /// Spectra, valuations and classification of a catalog entry.
    Classify {
        #[command(flatten)]
        entry: EntryArgs,
        #[arg(long = "scan-bound")]
        scan_bound: Option<u64>,
        #[arg(long)]
        kmax: Option<u32>,
    },
    /// Checkpointed partial sums of sum_q G(q) c_q(a).
    Expand {
        #[command(flatten)]
        entry: EntryArgs,
        #[arg(long = "a", default_value_t = 1)]
        a: u64,
        #[arg(long = "Q")]
        q: u64,
        /// Restrict to q coprime to M.
        #[arg(long, value_name = "M")]
        coprime: Option<u64>,
        /// Sum in exact rationals (needs an exact entry).
        #[arg(long)]
        exact: bool,
        /// Extra checkpoints, comma separated.
        #[arg(long, value_delimiter = ',')]
        checkpoints: Vec<u64>,
        /// Write x,re,im rows here.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Graded membership in the 0-cloud.
    Verdict {
        #[command(flatten)]
        entry: EntryArgs,
    },
    /// Absolute convergence diagnostics for one a.
    Absconv {
        #[command(flatten)]
        entry: EntryArgs,
        #[arg(long = "a", default_value_t = 1)]
        a: u64,
        #[arg(long = "B", default_value_t = 10_000)]
        b: u64,
        #[arg(long = "Q", default_value_t = 10_000)]
        q: u64,
    },
    /// Count squarefree q <= x with q = r mod m.
    Sfcount {
        #[arg(long)]
        x: u64,
        #[arg(long, default_value_t = 1)]
        m: u64,
        #[arg(long, default_value_t = 1)]
        r: u64,
    },
    /// Full and odd partial sums of h(q) = +-mu^2(q) q^-s.
    Lemma7 {
        #[arg(long, default_value = "0.6", allow_hyphen_values = true)]
        s: String,
        #[arg(long = "to", default_value_t = 1_000_000)]
        to: u64,
        /// Full series as x,re,im rows.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        /// Odd series as x,re,im rows.
        #[arg(long = "odd-csv", value_name = "PATH")]
        odd_csv: Option<PathBuf>,
    },
    /// Regenerate one artifact per acceptance criterion.
    #[command(name = "reproduce-all")]
    ReproduceAll {
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Criterion numbers to run, comma separated.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// Seed for the randomized rules.
        #[arg(long, default_value_t = crate::reproduce::DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct EntryArgs {
    /// Catalog name, e.g. GR, GH, indicator_prime_powers, G0.
    pub name: String,
    /// Parameters as key=value, e.g. p0=3 s=0.6.
    pub params: Vec<String>,
}
