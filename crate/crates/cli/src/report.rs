//! Report writers.

use std::io::{self, Write};

use crate::config::OutputFormat;
use crate::record::{QRecord, Status, REPORT_SCHEMA};

pub const CSV_COLUMNS: [&str; 11] = [
    "q",
    "class",
    "ord_w",
    "ord_wstar(s)",
    "xstar_order_or_r",
    "hasse_2part",
    "r_q",
    "trace_ord",
    "cw_val",
    "lseries_verdict",
    "status",
];

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Skip => "skip",
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// The fixed columns of one record.
pub fn row(r: &QRecord) -> [String; 11] {
    let u = r.units.as_ref();
    let iw = r.iwasawa.as_ref();
    [
        r.q.to_string(),
        r.class.to_string(),
        opt(u.map(|u| u.ord_w)),
        u.map(|u| u.ord_wstar.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(";")).unwrap_or_default(),
        opt(iw.map(|i| i.xstar_order_or_r)),
        opt(r.hasse.as_ref().map(|h| h.two_part)),
        opt(r.classgroups.as_ref().map(|c| c.r_q)),
        opt(iw.and_then(|i| i.xd.as_ref()).map(|x| x.trace_ord)),
        opt(iw.map(|i| i.cw_f_pstar)),
        opt(r.lseries.as_ref().map(|l| l.verdict)),
        status_str(r.status).to_string(),
    ]
}

pub fn write_json<W: Write>(records: &[QRecord], mut w: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, records).map_err(io::Error::other)?;
    writeln!(w)
}

pub fn write_csv<W: Write>(records: &[QRecord], w: W) -> io::Result<()> {
    let mut c = csv::Writer::from_writer(w);
    c.write_record(CSV_COLUMNS).map_err(io::Error::other)?;
    for r in records {
        c.write_record(row(r)).map_err(io::Error::other)?;
    }
    c.flush()
}

pub fn write_md<W: Write>(records: &[QRecord], mut w: W) -> io::Result<()> {
    writeln!(w, "<!-- iwacert report schema {REPORT_SCHEMA} -->")?;
    writeln!(w, "| {} |", CSV_COLUMNS.join(" | "))?;
    writeln!(w, "|{}", "---|".repeat(CSV_COLUMNS.len()))?;
    for r in records {
        writeln!(w, "| {} |", row(r).join(" | "))?;
    }
    let notes: Vec<_> = records.iter().filter(|r| !r.failures.is_empty() || !r.skips.is_empty()).collect();
    if !notes.is_empty() {
        writeln!(w)?;
        for r in notes {
            for f in &r.failures {
                writeln!(w, "- q = {}: FAIL {f}", r.q)?;
            }
            for s in &r.skips {
                writeln!(w, "- q = {}: skip {s}", r.q)?;
            }
        }
    }
    Ok(())
}

pub fn write_report<W: Write>(records: &[QRecord], format: OutputFormat, w: W) -> io::Result<()> {
    match format {
        OutputFormat::Json => write_json(records, w),
        OutputFormat::Csv => write_csv(records, w),
        OutputFormat::Md => write_md(records, w),
    }
}
