use std::fs;
use std::process::Command;

use iwacert_cli::config::{OutputFormat, ResidueClass, RunConfig, Selection, Suite};
use iwacert_cli::record::{QRecord, Status};
use iwacert_cli::report::{write_report, CSV_COLUMNS};
use iwacert_cli::{primes, run, sweep};

fn cfg(q_max: u64, suites: &[Suite]) -> RunConfig {
    RunConfig { q_max, suites: suites.to_vec(), ..RunConfig::default() }
}

#[test]
fn prime_selection() {
    let mut c = cfg(200, &[Suite::Hasse]);
    c.residue_class = ResidueClass::SevenMod16;
    assert_eq!(primes(&c), [7, 23, 71, 103, 151, 167, 199]);
    c.residue_class = ResidueClass::FifteenMod16;
    c.q_max = 50;
    assert_eq!(primes(&c), [31, 47]);
    c.q_min = 10;
    c.q_max = 10;
    assert!(primes(&c).is_empty());
}

#[test]
fn config_validation() {
    let mut c = cfg(10, &[Suite::Hasse]);
    c.q_min = 20;
    assert!(c.validate().is_err());
    let mut c = cfg(10, &[Suite::Hasse]);
    c.jobs = 0;
    assert!(c.validate().is_err());
    let mut c = cfg(10, &[Suite::Hasse]);
    c.padic_prec = 8;
    assert!(c.validate().is_err());
    assert!(cfg(10, &[]).validate().is_err());
    assert_eq!("all".parse::<Selection>().unwrap().suites().len(), 5);
    assert_eq!("units".parse::<Selection>().unwrap(), Selection::One(Suite::Units));
    assert!("nope".parse::<Selection>().is_err());
}

#[test]
fn units_sweep_seven_mod_sixteen() {
    let mut c = cfg(200, &[Suite::Units]);
    c.residue_class = ResidueClass::SevenMod16;
    let out = sweep(&c, None).unwrap();
    assert_eq!(out.records.len(), 7);
    assert_eq!(out.exit_code(), 0);
    for r in &out.records {
        let u = r.units.as_ref().unwrap();
        assert_eq!((u.ord_w, u.ord_wstar.clone()), (2, vec![3]), "q = {}", r.q);
        assert_eq!(r.status, Status::Pass);
    }
}

#[test]
fn order_does_not_depend_on_jobs() {
    let mut a = cfg(400, &[Suite::Hasse, Suite::Classgroups]);
    let one = sweep(&a, None).unwrap().records;
    a.jobs = 4;
    let four = sweep(&a, None).unwrap().records;
    assert_eq!(one, four);
    let qs: Vec<u64> = one.iter().map(|r| r.q).collect();
    let mut sorted = qs.clone();
    sorted.sort();
    assert_eq!(qs, sorted);
}

#[test]
fn warm_cache_gives_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = cfg(80, &Suite::ALL);
    c.cache_path = Some(dir.path().join("u.jsonl"));
    c.output_format = OutputFormat::Json;
    c.out_path = Some(dir.path().join("cold.json"));
    let cold = run(&c).unwrap();
    assert_eq!(cold.exit_code(), 0);
    c.out_path = Some(dir.path().join("warm.json"));
    run(&c).unwrap();
    let a = fs::read(dir.path().join("cold.json")).unwrap();
    let b = fs::read(dir.path().join("warm.json")).unwrap();
    assert_eq!(a, b);
    let recs: Vec<QRecord> = serde_json::from_slice(&a).unwrap();
    assert_eq!(recs.len(), 6);
    let cache = fs::read_to_string(dir.path().join("u.jsonl")).unwrap();
    assert_eq!(cache.lines().count(), 6);
}

#[test]
fn report_formats() {
    let recs = sweep(&cfg(100, &Suite::ALL), None).unwrap().records;
    let mut csv = Vec::new();
    write_report(&recs, OutputFormat::Csv, &mut csv).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
    assert_eq!(lines.next().unwrap(), "7,7mod16,2,3,4,4,1,4,2,true,pass");
    assert!(csv.lines().any(|l| l.starts_with("31,15mod16,6,4;4,2,")));
    let mut md = Vec::new();
    write_report(&recs, OutputFormat::Md, &mut md).unwrap();
    let md = String::from_utf8(md).unwrap();
    assert!(md.contains("| q | class |"));
    assert_eq!(md.lines().filter(|l| l.starts_with("| ") && !l.starts_with("| q")).count(), recs.len());
}

#[test]
fn skip_is_not_fail() {
    let mut c = cfg(100, &[Suite::Iwasawa]);
    c.pell_bits = 4;
    let out = sweep(&c, None).unwrap();
    assert!(out.skipped > 0);
    assert_eq!(out.failed, 0);
    assert_eq!(out.exit_code(), 0);
    assert!(out.records.iter().filter(|r| r.status == Status::Skip).all(|r| !r.skips.is_empty()));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_iwacert");
    let ok = Command::new(bin).args(["verify", "hasse", "--q-max", "100", "--format", "csv"]).output().unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("q,class,"));
    let bad = Command::new(bin).args(["verify", "hasse", "--q-min", "50", "--q-max", "10"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let unwritable = dir.path().join("no/such/dir/out.json");
    let bad = Command::new(bin).args(["verify", "hasse", "--out", unwritable.to_str().unwrap()]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
