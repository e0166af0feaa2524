//! Reproducible stability sweeps.
//!
//! Every sweep is a flat list of independent tasks evaluated with rayon and
//! collected in task order, so records do not depend on the thread count.
//! Instance `i` of any cell draws its coefficient errors from the ChaCha
//! stream `(seed, i)`, which makes cells that share an instance index use
//! common random numbers.

pub mod adiabatic;
pub mod anderson;
pub mod dynamics;
pub mod fit;
pub mod gibbs;
pub mod ground;
pub mod nonlocal;
pub mod proof_chain;
pub mod thermo;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use fit::{linear_fit, power_law_fit, FitModel, FitResult};

/// One row of a sweep. Column names are the on-disk CSV schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub experiment: String,
    #[serde(rename = "J")]
    pub j: Option<f64>,
    pub beta: Option<f64>,
    pub t: Option<f64>,
    #[serde(rename = "T")]
    pub total_time: Option<f64>,
    pub n_sites: usize,
    pub delta: f64,
    pub instance: u64,
    pub value_perturbed: f64,
    pub value_ideal: f64,
    pub abs_error: f64,
    pub diag_zero_modes: usize,
    pub diag_steps: usize,
}

impl ExperimentRecord {
    pub fn new(
        experiment: &str,
        n_sites: usize,
        delta: f64,
        instance: u64,
        perturbed: f64,
        ideal: f64,
    ) -> Self {
        Self {
            experiment: experiment.to_string(),
            j: None,
            beta: None,
            t: None,
            total_time: None,
            n_sites,
            delta,
            instance,
            value_perturbed: perturbed,
            value_ideal: ideal,
            abs_error: (perturbed - ideal).abs(),
            diag_zero_modes: 0,
            diag_steps: 0,
        }
    }

    pub fn cell(&self) -> CellKey {
        CellKey {
            experiment: self.experiment.clone(),
            j: self.j,
            beta: self.beta,
            t: self.t,
            total_time: self.total_time,
            n_sites: self.n_sites,
            delta: self.delta,
        }
    }

    /// Total order on (experiment, J, β, t, T, n, δ, instance).
    pub fn key_cmp(&self, other: &Self) -> Ordering {
        self.cell()
            .cmp(&other.cell())
            .then(self.instance.cmp(&other.instance))
    }
}

/// Record key without the instance index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellKey {
    pub experiment: String,
    pub j: Option<f64>,
    pub beta: Option<f64>,
    pub t: Option<f64>,
    pub total_time: Option<f64>,
    pub n_sites: usize,
    pub delta: f64,
}

fn cmp_opt(a: Option<f64>, b: Option<f64>) -> Ordering {
    match (a, b) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        (a, b) => a.is_some().cmp(&b.is_some()),
    }
}

impl Eq for CellKey {}

impl PartialOrd for CellKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CellKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.experiment
            .cmp(&other.experiment)
            .then(cmp_opt(self.j, other.j))
            .then(cmp_opt(self.beta, other.beta))
            .then(cmp_opt(self.t, other.t))
            .then(cmp_opt(self.total_time, other.total_time))
            .then(self.n_sites.cmp(&other.n_sites))
            .then(self.delta.total_cmp(&other.delta))
    }
}

/// A task that could not be evaluated; the sweep carries on without it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordFailure {
    pub key: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SweepOutput {
    pub records: Vec<ExperimentRecord>,
    pub failures: Vec<RecordFailure>,
    /// Diagnostics that do not invalidate a record.
    pub notes: Vec<String>,
}

impl SweepOutput {
    fn push(&mut self, key: String, r: crate::Result<ExperimentRecord>) {
        match r {
            Ok(rec) => self.records.push(rec),
            Err(e) => self.failures.push(RecordFailure {
                key,
                message: e.to_string(),
            }),
        }
    }

    pub fn extend(&mut self, other: SweepOutput) {
        self.records.extend(other.records);
        self.failures.extend(other.failures);
        self.notes.extend(other.notes);
    }

    pub fn sort(&mut self) {
        self.records.sort_by(|a, b| a.key_cmp(b));
    }
}

/// Evaluates `f` on every task in parallel, keeping task order.
pub(crate) fn par_map<I: Sync, R: Send>(tasks: &[I], f: impl Fn(&I) -> R + Sync + Send) -> Vec<R> {
    tasks.par_iter().map(f).collect()
}

/// Instance statistics of one cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellStats {
    pub key: CellKey,
    pub count: usize,
    pub mean_error: f64,
    pub max_error: f64,
    pub mean_perturbed: f64,
    pub value_ideal: f64,
}

/// Groups records by cell, sorted by key.
pub fn cell_stats(records: &[ExperimentRecord]) -> Vec<CellStats> {
    let mut cells: BTreeMap<CellKey, Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        cells.entry(r.cell()).or_default().push(r);
    }
    cells
        .into_iter()
        .map(|(key, rs)| {
            let count = rs.len();
            let n = count as f64;
            CellStats {
                key,
                count,
                mean_error: rs.iter().map(|r| r.abs_error).sum::<f64>() / n,
                max_error: rs.iter().map(|r| r.abs_error).fold(0.0, f64::max),
                mean_perturbed: rs.iter().map(|r| r.value_perturbed).sum::<f64>() / n,
                value_ideal: rs[0].value_ideal,
            }
        })
        .collect()
}

/// `|a − b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_change(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Plateau of a sequence ordered by system size: the value at the largest
/// size, reached at the first size whose change from its predecessor is
/// below `tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Plateau {
    pub value: f64,
    pub reached_at: Option<usize>,
}

pub fn plateau(by_size: &[(usize, f64)], tolerance: f64) -> Option<Plateau> {
    let &(_, value) = by_size.last()?;
    let reached_at = by_size
        .windows(2)
        .find(|w| relative_change(w[0].1, w[1].1) < tolerance)
        .map(|w| w[1].0);
    Some(Plateau { value, reached_at })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(n: usize, delta: f64, instance: u64, err: f64) -> ExperimentRecord {
        ExperimentRecord::new("x", n, delta, instance, err, 0.0)
    }

    #[test]
    fn stats_group_by_cell_and_ignore_order() {
        let rs = vec![
            rec(10, 0.1, 1, 3.0),
            rec(10, 0.1, 0, 1.0),
            rec(20, 0.1, 0, 5.0),
        ];
        let stats = cell_stats(&rs);
        assert_eq!(stats.len(), 2);
        assert_eq!(stats[0].count, 2);
        assert_eq!(stats[0].mean_error, 2.0);
        assert_eq!(stats[0].max_error, 3.0);
        assert_eq!(stats[1].key.n_sites, 20);
    }

    #[test]
    fn sort_is_by_key_then_instance() {
        let mut out = SweepOutput {
            records: vec![
                rec(20, 0.1, 0, 0.0),
                rec(10, 0.2, 1, 0.0),
                rec(10, 0.2, 0, 0.0),
            ],
            ..Default::default()
        };
        out.sort();
        let keys: Vec<(usize, u64)> = out
            .records
            .iter()
            .map(|r| (r.n_sites, r.instance))
            .collect();
        assert_eq!(keys, vec![(10, 0), (10, 1), (20, 0)]);
    }

    #[test]
    fn absent_parameters_sort_first() {
        let mut a = rec(10, 0.1, 0, 0.0);
        let b = a.clone();
        a.j = Some(0.5);
        assert_eq!(b.key_cmp(&a), Ordering::Less);
    }

    #[test]
    fn plateau_detection() {
        let p = plateau(&[(50, 2.0), (100, 1.2), (200, 1.1), (400, 1.08)], 0.1).unwrap();
        assert_eq!(p.value, 1.08);
        assert_eq!(p.reached_at, Some(200));
        assert_eq!(
            plateau(&[(50, 2.0), (100, 1.0)], 0.1).unwrap().reached_at,
            None
        );
        assert!(plateau(&[], 0.1).is_none());
        assert_eq!(relative_change(0.0, 0.0), 0.0);
    }
}
