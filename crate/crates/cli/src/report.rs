//! Check records and their JSON-lines / CSV reports.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
        })
    }
}

/// One check. `metric` is `None` when the check could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub suite: String,
    pub check: String,
    pub anchor: String,
    pub status: Status,
    pub metric: Option<f64>,
    pub tol: Option<f64>,
    pub ms: u64,
}

impl CheckRecord {
    /// Passes iff `metric <= tol`; errors and non-finite metrics fail.
    pub fn thresholded(suite: &str, check: &str, anchor: &str, metric: opfield::Result<f64>, tol: f64) -> Self {
        let metric = metric.ok().filter(|m| m.is_finite());
        let status = match metric {
            Some(m) if m <= tol => Status::Pass,
            _ => Status::Fail,
        };
        Self { suite: suite.into(), check: check.into(), anchor: anchor.into(), status, metric, tol: Some(tol), ms: 0 }
    }

    /// Exploratory value that never gates the exit code.
    pub fn info(suite: &str, check: &str, anchor: &str, metric: Option<f64>) -> Self {
        let metric = metric.filter(|m| m.is_finite());
        Self { suite: suite.into(), check: check.into(), anchor: anchor.into(), status: Status::Info, metric, tol: None, ms: 0 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub info: usize,
}

impl Summary {
    pub fn of(records: &[CheckRecord]) -> Self {
        let mut s = Self::default();
        for r in records {
            match r.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Info => s.info += 1,
            }
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => bail!("unknown format {s:?}, expected json or csv"),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Footer {
    summary: Summary,
}

const CSV_HEADER: [&str; 7] = ["suite", "check", "anchor", "status", "metric", "tol", "ms"];

/// JSON lines: one record per line, then `{"summary": {...}}`. CSV: header,
/// one row per record, then a `# summary` line.
pub fn write_report(records: &[CheckRecord], format: Format, out: &mut impl Write) -> Result<()> {
    let summary = Summary::of(records);
    match format {
        Format::Json => {
            for r in records {
                serde_json::to_writer(&mut *out, r)?;
                out.write_all(b"\n")?;
            }
            serde_json::to_writer(&mut *out, &Footer { summary })?;
            out.write_all(b"\n")?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(CSV_HEADER)?;
            let num = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
            for r in records {
                w.write_record([
                    r.suite.as_str(),
                    &r.check,
                    &r.anchor,
                    &r.status.to_string(),
                    &num(r.metric),
                    &num(r.tol),
                    &r.ms.to_string(),
                ])?;
            }
            w.flush()?;
            drop(w);
            writeln!(out, "# summary pass={} fail={} info={}", summary.pass, summary.fail, summary.info)?;
        }
    }
    Ok(())
}

pub fn emit_report(records: &[CheckRecord], path: &std::path::Path, format: Format) -> Result<()> {
    let mut file = std::io::BufWriter::new(
        std::fs::File::create(path).with_context(|| format!("cannot write {}", path.display()))?,
    );
    write_report(records, format, &mut file)?;
    file.flush()?;
    Ok(())
}

/// Parses a JSON-lines report back into records and its summary.
pub fn parse_json_report(text: &str) -> Result<(Vec<CheckRecord>, Summary)> {
    let mut records = Vec::new();
    for (lineno, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        if let Ok(footer) = serde_json::from_str::<Footer>(line) {
            return Ok((records, footer.summary));
        }
        records.push(serde_json::from_str(line).with_context(|| format!("line {}", lineno + 1))?);
    }
    Err(anyhow!("report has no summary line"))
}

/// Parses a CSV report back into records and its summary.
pub fn parse_csv_report(text: &str) -> Result<(Vec<CheckRecord>, Summary)> {
    let (body, footer) = text.trim_end().rsplit_once('\n').ok_or_else(|| anyhow!("report has no summary line"))?;
    let mut summary = Summary::default();
    for item in footer.trim_start_matches("# summary").split_whitespace() {
        let (k, v) = item.split_once('=').ok_or_else(|| anyhow!("bad summary item {item:?}"))?;
        let v: usize = v.parse()?;
        match k {
            "pass" => summary.pass = v,
            "fail" => summary.fail = v,
            "info" => summary.info = v,
            _ => bail!("bad summary key {k:?}"),
        }
    }
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let opt = |s: &str| -> Result<Option<f64>> { Ok(if s.is_empty() { None } else { Some(s.parse()?) }) };
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row?;
        let status = match &row[3] {
            "pass" => Status::Pass,
            "fail" => Status::Fail,
            "info" => Status::Info,
            other => bail!("bad status {other:?}"),
        };
        records.push(CheckRecord {
            suite: row[0].into(),
            check: row[1].into(),
            anchor: row[2].into(),
            status,
            metric: opt(&row[4])?,
            tol: opt(&row[5])?,
            ms: row[6].parse()?,
        });
    }
    Ok((records, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<CheckRecord> {
        vec![
            CheckRecord::thresholded("poisson", "jacobi", "Poisson algebra", Ok(0.0), 1e-12),
            CheckRecord::thresholded("weyl", "adjoint, kernel", "Weyl adjoint", Ok(2.5e-3), 1e-10),
            CheckRecord::info("opfield", "arbitrary field", "derivative formula", Some(48.18)),
        ]
    }

    #[test]
    fn status_follows_threshold() {
        let r = sample();
        assert_eq!(r[0].status, Status::Pass);
        assert_eq!(r[1].status, Status::Fail);
        assert_eq!(r[2].tol, None);
        let err = CheckRecord::thresholded("a", "b", "c", Err(opfield::Error::OffGrid(2.0)), 1.0);
        assert_eq!((err.status, err.metric), (Status::Fail, None));
        let nan = CheckRecord::thresholded("a", "b", "c", Ok(f64::NAN), 1.0);
        assert_eq!(nan.status, Status::Fail);
    }

    #[test]
    fn empty_report_has_header_and_zero_summary() {
        let mut out = Vec::new();
        write_report(&[], Format::Json, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "{\"summary\":{\"pass\":0,\"fail\":0,\"info\":0}}\n");
        let mut out = Vec::new();
        write_report(&[], Format::Csv, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "suite,check,anchor,status,metric,tol,ms\n# summary pass=0 fail=0 info=0\n");
    }

    #[test]
    fn json_round_trip() {
        let mut out = Vec::new();
        write_report(&sample(), Format::Json, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("{\"suite\":\"poisson\",\"check\":\"jacobi\",\"anchor\":"));
        let (records, summary) = parse_json_report(&text).unwrap();
        assert_eq!(records, sample());
        assert_eq!(summary, Summary { pass: 1, fail: 1, info: 1 });
    }

    #[test]
    fn csv_round_trip() {
        let mut out = Vec::new();
        write_report(&sample(), Format::Csv, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 5);
        let (records, summary) = parse_csv_report(&text).unwrap();
        assert_eq!(records, sample());
        assert_eq!(summary.fail, 1);
    }
}
