//! Adiabatic preparation of the critical SSH ground state with static
//! coefficient errors.
//!
//! The path is `H(s) = (1 − s) H_SSH[0] + s H_SSH[1] = H_SSH[J = s]` plus one
//! error sample `ΔA` per instance held fixed for all `s`. The run starts in
//! the ground state of `H(0) + ΔA`, sweeps `s` linearly over time `T`, and
//! reports the energy density of the ideal `H_SSH[1]` against the clean
//! thermodynamic limit `e*`.

use serde::{Deserialize, Serialize};

use super::thermo::{extrapolate, size_for_precision, Extrapolation};
use super::{
    cell_stats, par_map, power_law_fit, relative_change, ExperimentRecord, FitResult, SweepOutput,
};
use crate::correlations::{evolve_split_schedule, ground_state};
use crate::error::{invalid, Result};
use crate::hamiltonian::{
    build_ssh, sample_perturbation, ssh_layers, CouplingMatrix, PerturbationMode, PerturbationSpec,
};
use crate::observables::energy_density;

pub const EXPERIMENT: &str = "adiabatic";

/// `T*` is where the mean error first drops to this multiple of the floor.
pub const FLOOR_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticSweep {
    pub deltas: Vec<f64>,
    pub total_times: Vec<f64>,
    pub instances: u64,
    pub seed: u64,
    /// Integrator step; each run uses `⌈T / time_step⌉` steps.
    pub time_step: f64,
    /// Ring size per `δ` is the smallest multiple of 4 whose fitted
    /// finite-size error is at most `precision_scale · δ`.
    pub precision_scale: f64,
    /// Sizes of the clean extrapolation that provides the finite-size fit.
    pub extrapolation_sizes: Vec<usize>,
    /// Explicit ring size per `δ`, bypassing the fit.
    pub sizes: Option<Vec<usize>>,
    /// Re-run instance 0 at the largest `T` with half the step and flag
    /// changes above this tolerance.
    pub convergence_tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Floor {
    pub delta: f64,
    pub n_sites: usize,
    /// Mean error at the largest `T`.
    pub value: f64,
    /// Relative change between the two largest `T`.
    pub plateau_change: f64,
    /// Log-log interpolated time at which the mean error reaches
    /// `FLOOR_FACTOR · value`; `None` if already there at the smallest `T`.
    pub t_star: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdiabaticResult {
    pub extrapolation: Extrapolation,
    pub sizes: Vec<(f64, usize)>,
    pub floors: Vec<Floor>,
    /// `T*` as a power law in `1/ε_floor`.
    pub scaling: Option<FitResult>,
    #[serde(skip)]
    pub output: SweepOutput,
}

/// One run: final energy density of the ideal critical ring.
pub fn anneal(n: usize, spec: &PerturbationSpec, total_time: f64, steps: usize) -> Result<f64> {
    if spec.mode != PerturbationMode::ExistingTerms {
        return Err(invalid(
            "the adiabatic path only carries errors on the SSH bonds (existing-terms mode)",
        ));
    }
    let target = build_ssh(n, 1.0)?;
    let delta = sample_perturbation(&target, spec)?;
    let layers = ssh_layers(n, &delta);
    let mut a0 = nalgebra::DMatrix::zeros(2 * n, 2 * n);
    for l in &layers {
        l.accumulate(&mut a0, 0.0);
    }
    let start = CouplingMatrix::from_antisymmetric(*target.lattice(), a0, 1.0 + spec.delta)?;
    let gamma0 = ground_state(&start)?.gamma;
    let gamma = evolve_split_schedule(&gamma0, &layers, total_time, steps)?;
    energy_density(&target, &gamma)
}

impl AdiabaticSweep {
    pub fn steps(&self, total_time: f64) -> usize {
        ((total_time / self.time_step).ceil() as usize).max(1)
    }

    fn choose_sizes(&self, x: &Extrapolation) -> Result<Vec<usize>> {
        if let Some(sizes) = &self.sizes {
            if sizes.len() != self.deltas.len() {
                return Err(invalid(format!(
                    "{} sizes given for {} deltas",
                    sizes.len(),
                    self.deltas.len()
                )));
            }
            return Ok(sizes.clone());
        }
        let fit = x
            .power_law
            .as_ref()
            .ok_or_else(|| invalid("finite-size fit unavailable"))?;
        self.deltas
            .iter()
            .map(|&d| size_for_precision(fit, self.precision_scale * d, 4, 8))
            .collect()
    }

    pub fn run(&self) -> Result<AdiabaticResult> {
        if !(self.time_step > 0.0) || self.total_times.iter().any(|&t| !(t > 0.0)) {
            return Err(invalid("adiabatic times and step must be positive"));
        }
        let (extrapolation, _) = extrapolate(1.0, &self.extrapolation_sizes)?;
        let e_star = extrapolation.limit.value;
        let sizes = self.choose_sizes(&extrapolation)?;
        let mut tasks = Vec::new();
        for (k, &delta) in self.deltas.iter().enumerate() {
            for instance in 0..self.instances {
                tasks.extend(
                    self.total_times
                        .iter()
                        .map(|&t| (sizes[k], delta, instance, t)),
                );
            }
        }
        let results = par_map(&tasks, |&(n, delta, instance, t)| {
            let spec =
                PerturbationSpec::new(delta, PerturbationMode::ExistingTerms, self.seed, instance);
            let steps = self.steps(t);
            anneal(n, &spec, t, steps).map(|e| {
                let mut r = ExperimentRecord::new(EXPERIMENT, n, delta, instance, e, e_star);
                r.j = Some(1.0);
                r.total_time = Some(t);
                r.diag_steps = steps;
                r
            })
        });
        let mut output = SweepOutput::default();
        for (&(n, delta, instance, t), r) in tasks.iter().zip(results) {
            output.push(
                format!("{EXPERIMENT} n={n} delta={delta} T={t} instance={instance}"),
                r,
            );
        }
        if let Some(tol) = self.convergence_tolerance {
            output
                .notes
                .extend(self.convergence_check(&sizes, &output.records, tol));
        }
        let floors = floors(&output.records);
        let scaling = scaling_fit(&floors).ok();
        Ok(AdiabaticResult {
            extrapolation,
            sizes: self.deltas.iter().copied().zip(sizes).collect(),
            floors,
            scaling,
            output,
        })
    }

    fn convergence_check(
        &self,
        sizes: &[usize],
        records: &[ExperimentRecord],
        tol: f64,
    ) -> Vec<String> {
        let Some(&t) = self.total_times.iter().max_by(|a, b| a.total_cmp(b)) else {
            return Vec::new();
        };
        let cases: Vec<(usize, f64)> = sizes
            .iter()
            .copied()
            .zip(self.deltas.iter().copied())
            .collect();
        let refined = par_map(&cases, |&(n, delta)| {
            let spec = PerturbationSpec::new(delta, PerturbationMode::ExistingTerms, self.seed, 0);
            anneal(n, &spec, t, 2 * self.steps(t))
        });
        let mut notes = Vec::new();
        for (&(n, delta), fine) in cases.iter().zip(refined) {
            let coarse = records.iter().find(|r| {
                r.n_sites == n && r.delta == delta && r.instance == 0 && r.total_time == Some(t)
            });
            match (coarse, fine) {
                (Some(c), Ok(f)) if (c.value_perturbed - f).abs() > tol => notes.push(format!(
                    "{EXPERIMENT} n={n} delta={delta} T={t}: halving the step moved the result by {:.3e}; re-run with a smaller step",
                    (c.value_perturbed - f).abs()
                )),
                (_, Err(e)) => notes.push(format!("{EXPERIMENT} n={n} delta={delta} T={t}: convergence check failed: {e}")),
                _ => {}
            }
        }
        notes
    }
}

/// Error floor and `T*` for every `δ` in the records.
pub fn floors(records: &[ExperimentRecord]) -> Vec<Floor> {
    let stats: Vec<_> = cell_stats(records)
        .into_iter()
        .filter(|s| s.key.experiment == EXPERIMENT)
        .collect();
    let mut deltas: Vec<(f64, usize)> =
        stats.iter().map(|s| (s.key.delta, s.key.n_sites)).collect();
    deltas.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    deltas.dedup();
    deltas
        .into_iter()
        .filter_map(|(delta, n)| {
            let mut curve: Vec<(f64, f64)> = stats
                .iter()
                .filter(|s| s.key.delta == delta && s.key.n_sites == n)
                .filter_map(|s| s.key.total_time.map(|t| (t, s.mean_error)))
                .collect();
            curve.sort_by(|a, b| a.0.total_cmp(&b.0));
            let &(_, value) = curve.last()?;
            let plateau_change = match curve.len() {
                0 | 1 => f64::INFINITY,
                k => relative_change(curve[k - 2].1, value),
            };
            Some(Floor {
                delta,
                n_sites: n,
                value,
                plateau_change,
                t_star: crossing_time(&curve, FLOOR_FACTOR * value),
            })
        })
        .collect()
}

/// First time the curve reaches `level`, interpolated linearly in log-log.
pub fn crossing_time(curve: &[(f64, f64)], level: f64) -> Option<f64> {
    let k = curve.iter().position(|&(_, e)| e <= level)?;
    if k == 0 {
        return None;
    }
    let (t0, e0) = curve[k - 1];
    let (t1, e1) = curve[k];
    if e1 <= 0.0 || e0 <= e1 {
        return Some(t1);
    }
    let frac = (e0.ln() - level.ln()) / (e0.ln() - e1.ln());
    Some((t0.ln() + frac * (t1.ln() - t0.ln())).exp())
}

/// Power law of `T*` in `1/ε_floor` across `δ`.
pub fn scaling_fit(floors: &[Floor]) -> Result<FitResult> {
    let (x, y): (Vec<f64>, Vec<f64>) = floors
        .iter()
        .filter(|f| f.value > 0.0)
        .filter_map(|f| f.t_star.map(|t| (1.0 / f.value, t)))
        .unzip();
    power_law_fit(&x, &y)
}
