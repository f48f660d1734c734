//! Report serialization: deterministic JSON, CSV tables, atomic writes.

use std::io::{self, Write};
use std::path::Path;

use serde::ser::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::derivative::FdSample;
use crate::experiment::{ComparisonRecord, ExperimentReport};

/// Pretty JSON with every float written as `{:.16e}` (17 significant
/// digits), so identical inputs give byte-identical files on any platform.
struct SciFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for SciFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Reads back floats written by [`to_json`], where NaN became `null`.
pub fn nan_if_null<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(<Option<f64> as serde::Deserialize>::deserialize(d)?.unwrap_or(f64::NAN))
}

/// Deterministic JSON text. Non-finite floats become `null`.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn csv_string(rows: Vec<Vec<String>>) -> csv::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv of UTF-8 fields"))
}

/// Comparison table; the leading columns follow the `DerivativeReport`
/// field order.
pub fn comparisons_csv(records: &[ComparisonRecord]) -> csv::Result<String> {
    let header = [
        "functional",
        "manifold",
        "field",
        "fd_value",
        "fd_error_estimate",
        "analytic_value",
        "abs_diff",
        "rel_diff",
        "verdict",
        "expected",
        "expected_abs_diff",
        "pass",
        "error",
    ];
    let mut rows = vec![header.iter().map(|s| s.to_string()).collect()];
    for c in records {
        let r = &c.report;
        rows.push(vec![
            r.functional.clone(),
            r.manifold.clone(),
            r.field.clone(),
            num(r.fd_value),
            num(r.fd_error_estimate),
            opt(r.analytic_value),
            num(r.abs_diff),
            num(r.rel_diff),
            if r.verdict.is_pass() { "pass" } else { "fail" }.into(),
            opt(c.expected),
            opt(c.expected_abs_diff),
            c.pass.to_string(),
            c.error.clone().unwrap_or_default(),
        ]);
    }
    csv_string(rows)
}

/// One row per suite case.
pub fn suites_csv(report: &ExperimentReport) -> csv::Result<String> {
    let header = [
        "suite",
        "functional",
        "manifold",
        "description",
        "measured",
        "bound",
        "relation",
        "negative_control",
        "pass",
    ];
    let mut rows = vec![header.iter().map(|s| s.to_string()).collect()];
    for s in &report.suites {
        for c in &s.cases {
            rows.push(vec![
                s.suite.clone(),
                s.functional.clone(),
                s.manifold.clone(),
                c.description.clone(),
                num(c.measured),
                num(c.bound),
                format!("{:?}", c.relation).to_lowercase(),
                c.negative_control.to_string(),
                c.pass.to_string(),
            ]);
        }
    }
    csv_string(rows)
}

/// FD convergence series of every comparison: (t, q(t), extrapolant).
pub fn plot_csv(report: &ExperimentReport) -> csv::Result<String> {
    let mut rows = vec![[
        "comparison",
        "functional",
        "manifold",
        "field",
        "t",
        "quotient",
        "extrapolant",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()];
    for (i, c) in report.comparisons.iter().enumerate() {
        for FdSample {
            t,
            quotient,
            extrapolant,
        } in &c.series
        {
            rows.push(vec![
                i.to_string(),
                c.report.functional.clone(),
                c.report.manifold.clone(),
                c.report.field.clone(),
                num(*t),
                num(*quotient),
                num(*extrapolant),
            ]);
        }
    }
    csv_string(rows)
}
