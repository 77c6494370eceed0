//! Verification harness: sweeps primes `q ≡ 7 (mod 8)` in a range, runs the
//! selected certification suites for each, and writes one record per prime.

pub mod cache;
pub mod config;
pub mod record;
pub mod report;
pub mod suites;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::time::Instant;

use iwacert_core::arith::primes_in_class;
use rayon::prelude::*;

use cache::UnitCache;
use config::RunConfig;
use record::{QRecord, Status};

/// Outcome of a sweep.
#[derive(Debug)]
pub struct RunOutcome {
    pub records: Vec<QRecord>,
    pub failed: usize,
    pub skipped: usize,
}

impl RunOutcome {
    /// 0 iff no record failed.
    pub fn exit_code(&self) -> i32 {
        if self.failed == 0 {
            0
        } else {
            1
        }
    }

    pub fn skipped_records(&self) -> impl Iterator<Item = &QRecord> {
        self.records.iter().filter(|r| r.status == Status::Skip)
    }
}

/// Primes in the configured range and residue class.
pub fn primes(cfg: &RunConfig) -> Vec<u64> {
    let (a, m) = cfg.residue_class.congruence();
    primes_in_class(cfg.q_min, cfg.q_max, a, m)
}

/// Compute the records, in increasing `q` regardless of `jobs`.
pub fn sweep(cfg: &RunConfig, cache: Option<&UnitCache>) -> io::Result<RunOutcome> {
    cfg.validate().map_err(io::Error::other)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build().map_err(io::Error::other)?;
    let qs = primes(cfg);
    let records: Vec<QRecord> = pool.install(|| {
        qs.par_iter()
            .map(|&q| {
                let t = Instant::now();
                let mut r = suites::run_q(q, cfg, cache);
                if cfg.timings {
                    r.millis = Some(t.elapsed().as_millis() as u64);
                }
                r
            })
            .collect()
    });
    let failed = records.iter().filter(|r| r.status == Status::Fail).count();
    let skipped = records.iter().filter(|r| r.status == Status::Skip).count();
    Ok(RunOutcome { records, failed, skipped })
}

/// Full run: open the cache and output first (so that an unwritable path is a
/// startup error), sweep, write the report.
pub fn run(cfg: &RunConfig) -> io::Result<RunOutcome> {
    cfg.validate().map_err(io::Error::other)?;
    let cache = match &cfg.cache_path {
        Some(p) => {
            let c = UnitCache::open(p).map_err(|e| io::Error::new(e.kind(), format!("cache {}: {e}", p.display())))?;
            for w in c.warnings() {
                eprintln!("warning: {w}");
            }
            Some(c)
        }
        None => None,
    };
    let mut out: Box<dyn Write> = match &cfg.out_path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| io::Error::new(e.kind(), format!("output {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let outcome = sweep(cfg, cache.as_ref())?;
    report::write_report(&outcome.records, cfg.output_format, &mut out)?;
    out.flush()?;
    Ok(outcome)
}
