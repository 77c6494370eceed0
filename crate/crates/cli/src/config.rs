//! Run configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

/// One of the per-q checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Fundamental unit of `F` and the valuations of its 2-adic logarithms.
    Units,
    /// The prime above 2 in `Q(√-q)`, `π mod 8` and the number of primes above `q`.
    Classgroups,
    /// 2-part of the class group of `Q(√-2q)`.
    Hasse,
    /// Structure of `X*(F)`, index valuations, and the chain through `Q(i, √q)`.
    Iwasawa,
    /// Simple-zero criterion bounds.
    Lseries,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Units, Suite::Classgroups, Suite::Hasse, Suite::Iwasawa, Suite::Lseries];
}

/// What to run: one suite or all of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selection {
    All,
    One(Suite),
}

impl FromStr for Selection {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "all" {
            return Ok(Selection::All);
        }
        Suite::from_str(s, true).map(Selection::One).map_err(|_| format!("unknown suite '{s}'"))
    }
}

impl Selection {
    pub fn suites(self) -> Vec<Suite> {
        match self {
            Selection::All => Suite::ALL.to_vec(),
            Selection::One(s) => vec![s],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum ResidueClass {
    #[value(name = "7mod16")]
    #[serde(rename = "7mod16")]
    SevenMod16,
    #[value(name = "15mod16")]
    #[serde(rename = "15mod16")]
    FifteenMod16,
    #[value(name = "7mod8")]
    #[serde(rename = "7mod8")]
    SevenMod8,
}

impl ResidueClass {
    /// `(a, m)` with `q ≡ a (mod m)`.
    pub fn congruence(self) -> (u64, u64) {
        match self {
            ResidueClass::SevenMod16 => (7, 16),
            ResidueClass::FifteenMod16 => (15, 16),
            ResidueClass::SevenMod8 => (7, 8),
        }
    }

    /// Class of a prime `q ≡ 7 (mod 8)` modulo 16.
    pub fn of(q: u64) -> Self {
        if q % 16 == 7 {
            ResidueClass::SevenMod16
        } else {
            ResidueClass::FifteenMod16
        }
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ResidueClass::SevenMod16 => "7mod16",
            ResidueClass::FifteenMod16 => "15mod16",
            ResidueClass::SevenMod8 => "7mod8",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Md,
}

pub const MIN_PADIC_PREC: u32 = 32;
pub const MAX_PADIC_PREC: u32 = 4096;
pub const MIN_FLOAT_PREC: u32 = 64;
pub const MAX_FLOAT_PREC: u32 = 2048;

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub q_min: u64,
    pub q_max: u64,
    pub residue_class: ResidueClass,
    pub padic_prec: u32,
    pub float_prec: u32,
    pub jobs: usize,
    pub suites: Vec<Suite>,
    pub cache_path: Option<PathBuf>,
    pub output_format: OutputFormat,
    pub out_path: Option<PathBuf>,
    /// Steps allowed in the chain-of-minima walk.
    pub unit_steps: usize,
    /// Expected number of lattice points the `T₂` cross-check may enumerate.
    pub t2_budget: f64,
    /// Largest fundamental unit of `Q(√q)` (in bits) that the chain through `Q(i, √q)` builds.
    pub pell_bits: u64,
    /// Include wall-clock timings in the records (makes reports non-reproducible).
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            q_min: 1,
            q_max: 200,
            residue_class: ResidueClass::SevenMod8,
            padic_prec: 192,
            float_prec: 128,
            jobs: 1,
            suites: Suite::ALL.to_vec(),
            cache_path: None,
            output_format: OutputFormat::Json,
            out_path: None,
            unit_steps: 500_000,
            t2_budget: 2.0e4,
            pell_bits: 1 << 16,
            timings: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.q_min > self.q_max {
            return Err(format!("q-min {} exceeds q-max {}", self.q_min, self.q_max));
        }
        if self.jobs == 0 {
            return Err("jobs must be at least 1".into());
        }
        if !(MIN_PADIC_PREC..=MAX_PADIC_PREC).contains(&self.padic_prec) {
            return Err(format!("padic-prec must lie in {MIN_PADIC_PREC}..={MAX_PADIC_PREC}"));
        }
        if !(MIN_FLOAT_PREC..=MAX_FLOAT_PREC).contains(&self.float_prec) {
            return Err(format!("float-prec must lie in {MIN_FLOAT_PREC}..={MAX_FLOAT_PREC}"));
        }
        if self.suites.is_empty() {
            return Err("no suite selected".into());
        }
        if self.q_max > 1 << 31 {
            return Err("q-max above 2^31 is not supported".into());
        }
        Ok(())
    }
}
