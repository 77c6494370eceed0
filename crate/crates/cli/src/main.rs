use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use iwacert_cli::config::{OutputFormat, ResidueClass, RunConfig, Selection};

#[derive(Parser)]
#[command(name = "iwacert", version, about = "Certify 2-adic unit, class group and L-series data for primes q ≡ 7 (mod 8)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one suite (units, classgroups, hasse, iwasawa, lseries) or all of them over a range of primes.
    Verify {
        /// Suite name or `all`.
        suite: Selection,
        #[arg(long, default_value_t = 1)]
        q_min: u64,
        #[arg(long, default_value_t = 200)]
        q_max: u64,
        #[arg(long, value_enum, default_value_t = ResidueClass::SevenMod8)]
        residue: ResidueClass,
        /// 2-adic working precision in bits.
        #[arg(long, default_value_t = 192)]
        padic_prec: u32,
        /// Ball arithmetic precision in bits.
        #[arg(long, default_value_t = 128)]
        float_prec: u32,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
        /// JSON-lines cache of fundamental units.
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Report path (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Steps allowed in the chain-of-minima unit search.
        #[arg(long, default_value_t = 500_000)]
        unit_steps: usize,
        /// Expected lattice points allowed for the T2 cross-check of the unit.
        #[arg(long, default_value_t = 2.0e4)]
        t2_budget: f64,
        /// Size limit in bits for the fundamental unit of Q(√q).
        #[arg(long, default_value_t = 1 << 16)]
        pell_bits: u64,
        /// Add wall-clock milliseconds to every record.
        #[arg(long)]
        timings: bool,
    },
}

fn main() -> ExitCode {
    let Command::Verify {
        suite,
        q_min,
        q_max,
        residue,
        padic_prec,
        float_prec,
        jobs,
        format,
        cache,
        out,
        unit_steps,
        t2_budget,
        pell_bits,
        timings,
    } = Cli::parse().command;
    let cfg = RunConfig {
        q_min,
        q_max,
        residue_class: residue,
        padic_prec,
        float_prec,
        jobs,
        suites: suite.suites(),
        cache_path: cache,
        output_format: format,
        out_path: out,
        unit_steps,
        t2_budget,
        pell_bits,
        timings,
    };
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match iwacert_cli::run(&cfg) {
        Ok(o) => {
            eprintln!("{} records: {} passed, {} failed, {} skipped", o.records.len(), o.records.len() - o.failed - o.skipped, o.failed, o.skipped);
            for r in o.skipped_records() {
                eprintln!("skipped q = {}: {}", r.q, r.skips.join("; "));
            }
            for r in o.records.iter().filter(|r| !r.failures.is_empty()) {
                eprintln!("failed q = {}: {}", r.q, r.failures.join("; "));
            }
            ExitCode::from(o.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
