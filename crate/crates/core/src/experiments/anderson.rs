//! Localization counterexample: on-site disorder makes a translationally
//! varying local observable unstable.
//!
//! Works in the one-particle sector of the number-conserving ring
//! `Σ (a†_{i+1} a_i + h.c.) + Σ ε_i a†_i a_i`, `ε_i` uniform in `[-δ, δ]`.
//! The observable is the weight of the lowest orbital on the `⌈1/δ⌉` sites
//! around its maximum.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{cell_stats, par_map, ExperimentRecord, SweepOutput};
use crate::error::{invalid, Result};
use crate::hamiltonian::{PerturbationMode, PerturbationSpec};

pub const EXPERIMENT: &str = "anderson";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AndersonSweep {
    pub n_sites: Vec<usize>,
    pub deltas: Vec<f64>,
    pub instances: u64,
    pub seed: u64,
    /// Window used for `δ = 0`, where `⌈1/δ⌉` is undefined.
    pub clean_window: usize,
}

pub fn window_size(delta: f64, clean_window: usize) -> usize {
    if delta > 0.0 {
        (1.0 / delta).ceil() as usize
    } else {
        clean_window
    }
}

/// `|ψ|²` of the lowest one-particle orbital.
pub fn ground_orbital_density(onsite: &[f64]) -> Result<Vec<f64>> {
    let n = onsite.len();
    if n < 3 {
        return Err(invalid(format!("ring needs at least 3 sites, got {n}")));
    }
    let mut h = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(onsite));
    for i in 0..n {
        let j = (i + 1) % n;
        h[(i, j)] = 1.0;
        h[(j, i)] = 1.0;
    }
    let eig = h.symmetric_eigen();
    let lowest = eig.eigenvalues.argmin().0;
    Ok(eig
        .eigenvectors
        .column(lowest)
        .iter()
        .map(|x| x * x)
        .collect())
}

/// Weight within `width` consecutive sites centred on the first maximum
/// of `density`, and whether the profile was flat.
pub fn window_weight(density: &[f64], width: usize) -> (f64, bool) {
    let n = density.len();
    let width = width.clamp(1, n);
    let (centre, &peak) =
        density.iter().enumerate().fold(
            (0, &f64::MIN),
            |best, (i, v)| if *v > *best.1 { (i, v) } else { best },
        );
    let flat = peak <= (1.0 + 1e-9) / n as f64;
    let start = centre + n - width / 2;
    ((0..width).map(|k| density[(start + k) % n]).sum(), flat)
}

fn onsite(n: usize, delta: f64, seed: u64, instance: u64) -> Vec<f64> {
    if delta == 0.0 {
        return vec![0.0; n];
    }
    let mut rng =
        PerturbationSpec::new(delta, PerturbationMode::AllLocalTerms, seed, instance).rng();
    (0..n).map(|_| rng.random_range(-delta..=delta)).collect()
}

impl AndersonSweep {
    pub fn run(&self) -> SweepOutput {
        let mut tasks = Vec::new();
        for &n in &self.n_sites {
            for &delta in &self.deltas {
                tasks.extend((0..self.instances).map(|i| (n, delta, i)));
            }
        }
        let results = par_map(
            &tasks,
            |&(n, delta, instance)| -> Result<(ExperimentRecord, bool)> {
                let width = window_size(delta, self.clean_window);
                let (value, flat) = window_weight(
                    &ground_orbital_density(&onsite(n, delta, self.seed, instance))?,
                    width,
                );
                let clean = width.min(n) as f64 / n as f64;
                Ok((
                    ExperimentRecord::new(EXPERIMENT, n, delta, instance, value, clean),
                    flat,
                ))
            },
        );
        let mut out = SweepOutput::default();
        for (&(n, delta, instance), r) in tasks.iter().zip(results) {
            let key = format!("{EXPERIMENT} n={n} delta={delta} instance={instance}");
            match r {
                Ok((rec, flat)) => {
                    if flat && delta > 0.0 {
                        out.notes.push(format!(
                            "{key}: flat orbital, localization centre undefined"
                        ));
                    }
                    out.records.push(rec);
                }
                Err(e) => out.push(key, Err(e)),
            }
        }
        out
    }
}

/// Mean disordered window weight over the clean-model weight at `(n, δ)`.
pub fn instability_ratio(records: &[ExperimentRecord], n: usize, delta: f64) -> Option<f64> {
    cell_stats(records)
        .into_iter()
        .find(|s| s.key.experiment == EXPERIMENT && s.key.n_sites == n && s.key.delta == delta)
        .map(|s| s.mean_perturbed / s.value_ideal)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_orbital_is_uniform() {
        let d = ground_orbital_density(&[0.0; 12]).unwrap();
        assert!(d.iter().all(|&x| (x - 1.0 / 12.0).abs() < 1e-12));
        let (w, flat) = window_weight(&d, 4);
        assert!(flat);
        assert!((w - 4.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn window_wraps_around_the_ring() {
        let mut d = vec![0.0; 10];
        d[0] = 0.5;
        d[9] = 0.25;
        d[1] = 0.25;
        let (w, flat) = window_weight(&d, 3);
        assert!(!flat);
        assert_eq!(w, 1.0);
        assert_eq!(window_weight(&d, 1).0, 0.5);
        assert_eq!(window_size(0.3, 7), 4);
        assert_eq!(window_size(0.0, 7), 7);
    }

    #[test]
    fn strong_disorder_localizes() {
        let sweep = AndersonSweep {
            n_sites: vec![60],
            deltas: vec![0.0, 2.0],
            instances: 4,
            seed: 9,
            clean_window: 4,
        };
        let out = sweep.run();
        assert!(out.failures.is_empty());
        let clean = instability_ratio(&out.records, 60, 0.0).unwrap();
        assert!((clean - 1.0).abs() < 1e-9);
        assert!(instability_ratio(&out.records, 60, 2.0).unwrap() > 5.0);
    }
}
