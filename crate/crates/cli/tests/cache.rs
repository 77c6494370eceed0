use std::fs;
use std::io::Write;
use std::sync::Arc;
use std::thread;

use iwacert_cli::cache::{CacheEntry, CachedUnit, UnitCache};
use iwacert_core::quartic::QuarticElem;
use iwacert_core::Int;

/// `(3 - α - α² - α³)/4`, a unit of norm 1 for `q = 7`.
fn unit7() -> CachedUnit {
    CachedUnit {
        unit: QuarticElem::new(7, [3, -1, -1, -1].map(Int::from), Int::from(4)),
        method: "both".into(),
        steps: 3,
        certified: true,
        regulator: "0.743".into(),
        odd_index_prime: Some(5),
    }
}

#[test]
fn store_then_lookup_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("units.jsonl");
    let c = UnitCache::open(&path).unwrap();
    assert!(c.lookup(7).is_none());
    c.store(&unit7()).unwrap();
    assert_eq!(c.lookup(7), Some(unit7()));
    drop(c);
    let c = UnitCache::open(&path).unwrap();
    assert_eq!(c.lookup(7), Some(unit7()));
    assert!(c.warnings().is_empty());
}

#[test]
fn version_mismatch_is_a_miss() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("units.jsonl");
    let mut e = CacheEntry::new(&unit7());
    e.version = "iwacert-0.0.0-old".into();
    fs::write(&path, serde_json::to_string(&e).unwrap() + "\n").unwrap();
    let c = UnitCache::open(&path).unwrap();
    assert!(c.lookup(7).is_none());
    assert!(c.warnings().is_empty());

    let mut e = CacheEntry::new(&unit7());
    e.basis = "integral".into();
    fs::write(&path, serde_json::to_string(&e).unwrap() + "\n").unwrap();
    assert!(UnitCache::open(&path).unwrap().lookup(7).is_none());
}

#[test]
fn corrupt_lines_are_skipped_with_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("units.jsonl");
    let good = serde_json::to_string(&CacheEntry::new(&unit7())).unwrap();
    let mut not_unit = CacheEntry::new(&unit7());
    not_unit.q = 23;
    not_unit.num[0] = "5".into();
    let mut f = fs::File::create(&path).unwrap();
    writeln!(f, "{{\"version\": \"trunc").unwrap();
    writeln!(f, "{good}").unwrap();
    writeln!(f, "not json at all").unwrap();
    writeln!(f, "{}", serde_json::to_string(&not_unit).unwrap()).unwrap();
    drop(f);
    let c = UnitCache::open(&path).unwrap();
    assert_eq!(c.lookup(7), Some(unit7()));
    assert!(c.lookup(23).is_none());
    assert_eq!(c.warnings().len(), 3, "{:?}", c.warnings());
}

#[test]
fn concurrent_appends_keep_one_record_per_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("units.jsonl");
    let c = Arc::new(UnitCache::open(&path).unwrap());
    let threads: Vec<_> = (0..8)
        .map(|t| {
            let c = Arc::clone(&c);
            thread::spawn(move || {
                for i in 0..50 {
                    let mut u = unit7();
                    u.steps = t * 1000 + i;
                    c.store(&u).unwrap();
                }
            })
        })
        .collect();
    for t in threads {
        t.join().unwrap();
    }
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 400);
    let mut steps: Vec<usize> = lines.iter().map(|l| serde_json::from_str::<CacheEntry>(l).unwrap().steps).collect();
    steps.sort();
    steps.dedup();
    assert_eq!(steps.len(), 400);
    assert!(UnitCache::open(&path).unwrap().warnings().is_empty());
}

#[test]
fn unwritable_path_fails_to_open() {
    let dir = tempfile::tempdir().unwrap();
    assert!(UnitCache::open(&dir.path().join("missing/dir/units.jsonl")).is_err());
}
