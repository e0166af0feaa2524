//! Thermal energy density of the SSH ring under coefficient errors.

use serde::{Deserialize, Serialize};

use super::{cell_stats, par_map, relative_change, ExperimentRecord, SweepOutput};
use crate::correlations::gibbs_from_spectrum;
use crate::error::Result;
use crate::hamiltonian::{build_ssh, perturb, PerturbationMode, PerturbationSpec};
use crate::observables::energy_density;

pub const EXPERIMENT: &str = "gibbs";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsSweep {
    pub coupling: f64,
    pub betas: Vec<f64>,
    pub deltas: Vec<f64>,
    pub n_sites: Vec<usize>,
    pub instances: u64,
    pub seed: u64,
    pub mode: PerturbationMode,
}

impl GibbsSweep {
    pub fn run(&self) -> SweepOutput {
        let mut tasks = Vec::new();
        for &n in &self.n_sites {
            for &delta in &self.deltas {
                tasks.extend((0..self.instances).map(|i| (n, delta, i)));
            }
        }
        let ideals: Vec<Result<Vec<f64>>> = par_map(&self.n_sites, |&n| {
            let h = build_ssh(n, self.coupling)?;
            let spectrum = h.spectrum()?;
            self.betas
                .iter()
                .map(|&b| energy_density(&h, &gibbs_from_spectrum(&spectrum, b)))
                .collect()
        });
        let results = par_map(
            &tasks,
            |&(n, delta, instance)| -> Result<Vec<ExperimentRecord>> {
                let idx = self
                    .n_sites
                    .iter()
                    .position(|&m| m == n)
                    .expect("task sizes come from the grid");
                let ideal = ideals[idx].as_ref().map_err(Clone::clone)?;
                let h = build_ssh(n, self.coupling)?;
                let spectrum = perturb(
                    &h,
                    &PerturbationSpec::new(delta, self.mode, self.seed, instance),
                )?
                .spectrum()?;
                self.betas
                    .iter()
                    .zip(ideal)
                    .map(|(&beta, &e_ideal)| {
                        let e = energy_density(&h, &gibbs_from_spectrum(&spectrum, beta))?;
                        let mut r =
                            ExperimentRecord::new(EXPERIMENT, n, delta, instance, e, e_ideal);
                        r.j = Some(self.coupling);
                        r.beta = Some(beta);
                        Ok(r)
                    })
                    .collect()
            },
        );
        let mut out = SweepOutput::default();
        for (&(n, delta, instance), r) in tasks.iter().zip(results) {
            let key = format!("{EXPERIMENT} n={n} delta={delta} instance={instance}");
            match r {
                Ok(rs) => out.records.extend(rs),
                Err(e) => out.push(key, Err(e)),
            }
        }
        out
    }
}

/// Mean error for each `δ` at fixed `(β, n)`, ascending in `δ`.
pub fn error_by_delta(records: &[ExperimentRecord], beta: f64, n: usize) -> Vec<(f64, f64)> {
    cell_stats(records)
        .into_iter()
        .filter(|s| {
            s.key.experiment == EXPERIMENT && s.key.beta == Some(beta) && s.key.n_sites == n
        })
        .map(|s| (s.key.delta, s.mean_error))
        .collect()
}

/// Whether the mean error never increases as `δ` decreases.
pub fn monotone_in_delta(by_delta: &[(f64, f64)]) -> bool {
    by_delta.windows(2).all(|w| w[0].1 <= w[1].1)
}

/// Largest relative change of the mean error between sizes `n1` and `n2`
/// over the nonzero `δ` of the grid.
pub fn size_dependence(
    records: &[ExperimentRecord],
    beta: f64,
    n1: usize,
    n2: usize,
) -> Option<f64> {
    let a = error_by_delta(records, beta, n1);
    let b = error_by_delta(records, beta, n2);
    if a.is_empty() || a.len() != b.len() {
        return None;
    }
    a.iter()
        .zip(&b)
        .filter(|(x, _)| x.0 > 0.0)
        .map(|(x, y)| relative_change(x.1, y.1))
        .reduce(f64::max)
}
