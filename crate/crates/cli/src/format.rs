//! Report serialization: canonical JSON, CSV tables and a plain-text summary.

use anyhow::Result;
use serde_json::Value;

use crate::run::RunReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// JSON value of a report; `timings` is dropped unless requested.
pub fn report_value(r: &RunReport, include_timings: bool) -> Result<Value> {
    let mut v = serde_json::to_value(r)?;
    if !include_timings {
        if let Value::Object(m) = &mut v {
            m.remove("timings");
        }
    }
    Ok(v)
}

pub fn report_format(r: &RunReport, fmt: Format, include_timings: bool) -> Result<Vec<u8>> {
    match fmt {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(&report_value(r, include_timings)?)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            // one block per table: a header record, then its rows, each tagged with the table name
            let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
            for s in &r.suites {
                for t in &s.tables {
                    let mut head = vec![t.name.as_str()];
                    head.extend(t.header.iter().map(String::as_str));
                    w.write_record(&head)?;
                    for row in &t.rows {
                        let mut rec = vec![t.name.as_str()];
                        rec.extend(row.iter().map(String::as_str));
                        w.write_record(&rec)?;
                    }
                }
            }
            Ok(w.into_inner().map_err(|e| anyhow::anyhow!("csv flush: {e}"))?)
        }
        Format::Text => {
            let mut out = String::new();
            for s in &r.suites {
                let verdict = if s.passed() { "PASS" } else { "FAIL" };
                out.push_str(&format!("{verdict} {} ({} checks)\n", s.name, s.checks.len()));
                for c in s.failures() {
                    out.push_str(&format!("    {:?} {}: {}\n", c.status, c.name, c.detail));
                }
            }
            if include_timings {
                for (k, t) in &r.timings {
                    out.push_str(&format!("time {k}: {t:.3}s\n"));
                }
            }
            let n = r.suites.iter().map(|s| s.checks.len()).sum::<usize>();
            let f = r.failures().len();
            out.push_str(&format!("{}: {} checks, {f} not passed\n", if r.passed { "PASSED" } else { "FAILED" }, n));
            Ok(out.into_bytes())
        }
    }
}
