//! On-disk artifacts: record CSVs and the JSON run summary.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use fermistab::experiments::{ExperimentRecord, FitResult, RecordFailure};
use serde::Serialize;

use crate::config::RunConfig;

/// Bumped whenever a CSV column or summary field changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

pub const RECORD_COLUMNS: [&str; 13] = [
    "experiment",
    "J",
    "beta",
    "t",
    "T",
    "n_sites",
    "delta",
    "instance",
    "value_perturbed",
    "value_ideal",
    "abs_error",
    "diag_zero_modes",
    "diag_steps",
];

/// Shortest form that keeps 17 significant digits, so every `f64`
/// round-trips exactly.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// A CSV body: header plus rows of already formatted cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Records in key order.
    pub fn from_records(records: &[ExperimentRecord]) -> Self {
        let mut sorted: Vec<&ExperimentRecord> = records.iter().collect();
        sorted.sort_by(|a, b| a.key_cmp(b));
        let mut table = Table::new(&RECORD_COLUMNS);
        table.rows = sorted
            .into_iter()
            .map(|r| {
                vec![
                    r.experiment.clone(),
                    fmt_opt(r.j),
                    fmt_opt(r.beta),
                    fmt_opt(r.t),
                    fmt_opt(r.total_time),
                    r.n_sites.to_string(),
                    fmt_f64(r.delta),
                    r.instance.to_string(),
                    fmt_f64(r.value_perturbed),
                    fmt_f64(r.value_ideal),
                    fmt_f64(r.abs_error),
                    r.diag_zero_modes.to_string(),
                    r.diag_steps.to_string(),
                ]
            })
            .collect();
        table
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    AssertionFailure,
    NumericalFailure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::AssertionFailure => 2,
            Status::NumericalFailure => 3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub total_seconds: f64,
    pub phases: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub experiment: String,
    pub status: Status,
    pub config: RunConfig,
    pub records_file: String,
    pub record_count: usize,
    pub fits: BTreeMap<String, FitResult>,
    /// Experiment-specific derived quantities.
    pub results: serde_json::Value,
    pub assertions: Vec<Assertion>,
    pub failures: Vec<RecordFailure>,
    pub notes: Vec<String>,
    pub timings: Timings,
}

pub fn csv_path(dir: &Path, experiment: &str) -> PathBuf {
    dir.join(format!("{experiment}.csv"))
}

pub fn summary_path(dir: &Path, experiment: &str) -> PathBuf {
    dir.join(format!("{experiment}.summary.json"))
}

pub fn write_summary(path: &Path, summary: &Summary) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, summary)?;
    f.write_all(b"\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [
            0.1,
            1.0 / 3.0,
            -2.0 / std::f64::consts::PI,
            6.02e23,
            5e-324,
            0.0,
        ] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
            let mantissa = s
                .split('e')
                .next()
                .unwrap()
                .trim_start_matches('-')
                .replace('.', "");
            assert_eq!(mantissa.len(), 17);
        }
        assert_eq!(fmt_f64(f64::NAN), "NaN");
        assert_eq!(fmt_opt(None), "");
    }

    #[test]
    fn records_are_written_sorted() {
        let mut a = ExperimentRecord::new("x", 8, 0.1, 1, 1.0, 1.5);
        a.j = Some(1.0);
        let mut b = ExperimentRecord::new("x", 8, 0.1, 0, 1.0, 1.5);
        b.j = Some(1.0);
        let c = ExperimentRecord::new("x", 4, 0.1, 0, 1.0, 1.5);
        let t = Table::from_records(&[a, b, c]);
        assert_eq!(t.header.len(), 13);
        let keys: Vec<(String, String)> = t
            .rows
            .iter()
            .map(|r| (r[1].clone(), r[7].clone()))
            .collect();
        assert_eq!(keys[0].0, "");
        assert_eq!(
            &keys[1..],
            &[(fmt_f64(1.0), "0".into()), (fmt_f64(1.0), "1".into())]
        );
        assert_eq!(t.rows[0][10], fmt_f64(0.5));
    }

    proptest::proptest! {
        #[test]
        fn every_value_round_trips(x in proptest::num::f64::ANY) {
            let back: f64 = fmt_f64(x).parse().unwrap();
            proptest::prop_assert!(back.to_bits() == x.to_bits() || (x.is_nan() && back.is_nan()));
        }
    }
}
