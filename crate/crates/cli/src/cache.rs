//! JSON-lines cache of certified fundamental units.
//!
//! One entry per line. Entries written by another tool version, or in another
//! basis, are misses. Lines that do not parse are reported and skipped.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use iwacert_core::quartic::QuarticElem;
use iwacert_core::{Int, TOOL_VERSION};
use serde::{Deserialize, Serialize};

/// Coordinates are numerators on `1, α, α², α³` over a common denominator.
pub const BASIS: &str = "power-alpha";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub version: String,
    pub basis: String,
    pub q: u64,
    pub num: [String; 4],
    pub den: String,
    pub method: String,
    pub steps: usize,
    pub certified: bool,
    pub regulator: String,
    pub odd_index_prime: Option<u64>,
}

/// A unit read back from the cache.
#[derive(Clone, Debug, PartialEq)]
pub struct CachedUnit {
    pub unit: QuarticElem,
    pub method: String,
    pub steps: usize,
    pub certified: bool,
    pub regulator: String,
    pub odd_index_prime: Option<u64>,
}

impl CacheEntry {
    pub fn new(u: &CachedUnit) -> Self {
        let n = u.unit.num();
        CacheEntry {
            version: TOOL_VERSION.to_string(),
            basis: BASIS.to_string(),
            q: u.unit.q(),
            num: [n[0].to_string(), n[1].to_string(), n[2].to_string(), n[3].to_string()],
            den: u.unit.den().to_string(),
            method: u.method.clone(),
            steps: u.steps,
            certified: u.certified,
            regulator: u.regulator.clone(),
            odd_index_prime: u.odd_index_prime,
        }
    }

    fn decode(&self) -> Option<CachedUnit> {
        let parse = |s: &String| s.parse::<Int>().ok();
        let num = [parse(&self.num[0])?, parse(&self.num[1])?, parse(&self.num[2])?, parse(&self.num[3])?];
        let den = parse(&self.den)?;
        if den == Int::from(0) {
            return None;
        }
        let unit = QuarticElem::new(self.q, num, den);
        // a corrupted entry must not be trusted as a unit
        let n = unit.norm();
        if !(n == iwacert_core::Rat::from_integer(Int::from(1)) || n == iwacert_core::Rat::from_integer(Int::from(-1))) {
            return None;
        }
        Some(CachedUnit {
            unit,
            method: self.method.clone(),
            steps: self.steps,
            certified: self.certified,
            regulator: self.regulator.clone(),
            odd_index_prime: self.odd_index_prime,
        })
    }
}

pub struct UnitCache {
    path: PathBuf,
    entries: Mutex<BTreeMap<u64, CachedUnit>>,
    writer: Mutex<File>,
    warnings: Vec<String>,
}

impl UnitCache {
    /// Open (creating if needed) the cache at `path` and load its valid entries.
    pub fn open(path: &Path) -> io::Result<Self> {
        let writer = OpenOptions::new().create(true).append(true).open(path)?;
        let mut entries = BTreeMap::new();
        let mut warnings = Vec::new();
        let reader = BufReader::new(File::open(path)?);
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<CacheEntry>(&line) {
                Ok(e) if e.version == TOOL_VERSION && e.basis == BASIS => match e.decode() {
                    Some(u) => {
                        entries.insert(e.q, u);
                    }
                    None => warnings.push(format!("{}:{}: entry for q = {} is not a unit, ignored", path.display(), i + 1, e.q)),
                },
                Ok(_) => {}
                Err(err) => warnings.push(format!("{}:{}: unreadable cache line ignored ({err})", path.display(), i + 1)),
            }
        }
        Ok(UnitCache { path: path.to_path_buf(), entries: Mutex::new(entries), writer: Mutex::new(writer), warnings })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Problems found while loading.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn lookup(&self, q: u64) -> Option<CachedUnit> {
        self.entries.lock().unwrap().get(&q).cloned()
    }

    /// Append one entry. Whole lines are written under a lock, so concurrent
    /// stores never interleave.
    pub fn store(&self, u: &CachedUnit) -> io::Result<()> {
        let mut line = serde_json::to_string(&CacheEntry::new(u)).map_err(io::Error::other)?;
        line.push('\n');
        {
            let mut w = self.writer.lock().unwrap();
            w.write_all(line.as_bytes())?;
            w.flush()?;
        }
        self.entries.lock().unwrap().insert(u.unit.q(), u.clone());
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
