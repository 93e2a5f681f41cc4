//! `quadcert`: command-line front end for the quadcert library.

mod commands;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use quadcert::friesen::Base;
use quadcert::SquarefreeMode;

#[derive(Parser, Debug)]
#[command(name = "quadcert", version, about = "Exact tools for real quadratic fields and universal-form certificates")]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Worker threads; 0 lets the runtime decide.
    #[arg(long, global = true, env = "QUADCERT_THREADS", default_value_t = 0)]
    pub threads: usize,

    /// Pollard rho iterations allowed per factorization.
    #[arg(long, global = true, default_value_t = 20_000_000)]
    pub factor_steps: u64,

    /// Lattice points tested per enumeration before giving up.
    #[arg(long, global = true, default_value_t = 50_000_000)]
    pub enum_budget: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Continued fraction of √D with convergents, norms and bound checks.
    Cf {
        #[arg(value_parser = parse_bigint)]
        d: BigInt,
        /// Number of convergents to list (default: one period).
        #[arg(long)]
        terms: Option<usize>,
    },
    /// Parity condition and admissible k for a symmetric sequence.
    FriesenCheck {
        /// Comma-separated, e.g. `2,8,2`; empty string for the empty sequence.
        seq: String,
    },
    /// Radicands with the prescribed symmetric period, for k in a range.
    FriesenSearch {
        seq: String,
        /// Inclusive range `a..b`.
        #[arg(long, value_parser = parse_range)]
        k: (BigInt, BigInt),
        /// `exact` or `probable:B`.
        #[arg(long, default_value = "exact", value_parser = parse_mode)]
        squarefree: SquarefreeMode,
        /// Largest number of k values to examine.
        #[arg(long, default_value_t = 1_000_000)]
        max_candidates: u64,
    },
    /// A symmetric sequence suited to excluding forms of rank ≤ M.
    Construct {
        #[arg(short = 'M', long = "rank")]
        m: usize,
        #[arg(long, default_value = "minimal")]
        base: Base,
    },
    /// Builds a certificate that no universal form of rank ≤ M exists.
    Certify {
        #[arg(short = 'M', long = "rank")]
        m: usize,
        #[arg(long, default_value = "minimal")]
        base: Base,
        /// `exact` or `probable:B` (default: exact for M = 1, probable:10000000 otherwise).
        #[arg(long, value_parser = parse_mode)]
        squarefree: Option<SquarefreeMode>,
        /// First k tried in the field search.
        #[arg(long, value_parser = parse_bigint, default_value = "1")]
        k_start: BigInt,
        /// Progression values of k scanned before giving up.
        #[arg(long, default_value_t = 100_000)]
        max_k: u64,
        /// Certify this radicand instead of searching for one.
        #[arg(short = 'D', long = "field", value_parser = parse_bigint)]
        field: Option<BigInt>,
        /// Odd witness indices, e.g. `1,3` (default: 1, 3, …, 2M+1).
        #[arg(long, value_delimiter = ',')]
        indices: Option<Vec<usize>>,
        /// Where to write the certificate.
        #[arg(short, long)]
        output: Option<std::path::PathBuf>,
    },
    /// Re-checks a certificate. Exit code 0 accepted, 1 rejected, 2 malformed.
    Verify { file: std::path::PathBuf },
    /// Primitive elements of small norm and their convergent matches.
    Smallnorm {
        #[arg(value_parser = parse_bigint)]
        d: BigInt,
        /// `half` (√D/2 over ℤ[√D]) or `eighth` (√D/8 over the ring of integers).
        #[arg(long, default_value = "half")]
        bound: String,
        #[arg(long, default_value_t = 1000)]
        y_max: u64,
    },
    /// Locates α_i^m among the convergent elements.
    PowerTrace {
        #[arg(value_parser = parse_bigint)]
        d: BigInt,
        i: usize,
        m: u32,
    },
    /// Decides whether a form represents a target.
    Represent {
        #[arg(value_parser = parse_bigint)]
        d: BigInt,
        /// e.g. `x^2 + xy + y^2` or `2 x1^2 + (1+sqrt(5)) x1 x2 + x2^2`.
        #[arg(long)]
        form: String,
        /// e.g. `3+sqrt(5)` or `(3+1*sqrt(5))/2`.
        #[arg(long)]
        target: String,
    },
    /// Totally positive integers with trace ≤ T.
    TpList {
        #[arg(value_parser = parse_bigint)]
        d: BigInt,
        #[arg(long)]
        trace: u64,
    },
}

fn parse_bigint(s: &str) -> Result<BigInt, String> {
    s.parse::<BigInt>().map_err(|e| format!("{s:?}: {e}"))
}

fn parse_range(s: &str) -> Result<(BigInt, BigInt), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    Ok((parse_bigint(a)?, parse_bigint(b)?))
}

fn parse_mode(s: &str) -> Result<SquarefreeMode, String> {
    match s.split_once(':') {
        None if s == "exact" => Ok(SquarefreeMode::Exact),
        Some(("probable", b)) => {
            let b: u64 = b.parse().map_err(|e| format!("bad trial bound {b:?}: {e}"))?;
            if b < 2 {
                return Err("trial bound must be at least 2".into());
            }
            Ok(SquarefreeMode::Probable(b))
        }
        _ => Err(format!("expected exact or probable:B, got {s:?}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
