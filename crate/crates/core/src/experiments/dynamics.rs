//! Quench dynamics of a local observable under a perturbed hopping ring.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{
    cell_stats, par_map, power_law_fit, relative_change, ExperimentRecord, FitResult, SweepOutput,
};
use crate::correlations::CorrelationMatrix;
use crate::error::{invalid, Result};
use crate::hamiltonian::{build_ssh, perturb, CouplingMatrix, PerturbationMode, PerturbationSpec};
use crate::lattice::LatticeSpec;
use crate::linalg::propagator_rows;
use crate::observables::QuadraticObservable;

pub const EXPERIMENT: &str = "dynamics";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    /// All modes empty. Stationary under number-conserving hopping.
    Vacuum,
    /// Even sites filled, odd sites empty.
    #[default]
    ChargeDensityWave,
}

impl InitialState {
    pub fn correlation(&self, n_sites: usize) -> CorrelationMatrix<f64> {
        let occ: Vec<bool> = (0..n_sites)
            .map(|i| *self == InitialState::ChargeDensityWave && i % 2 == 0)
            .collect();
        CorrelationMatrix::product_state(&occ)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LocalObservable {
    /// Current across the bond between sites 0 and 1.
    #[default]
    BondCurrent,
    /// Occupation of site 0.
    Density,
}

impl LocalObservable {
    pub fn build(&self, lattice: LatticeSpec) -> Result<QuadraticObservable<f64>> {
        match self {
            LocalObservable::BondCurrent => {
                QuadraticObservable::bond_current(lattice, &[0], &[1], 0)
            }
            LocalObservable::Density => QuadraticObservable::number(lattice, &[0], 0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsSweep {
    pub coupling: f64,
    pub times: Vec<f64>,
    pub deltas: Vec<f64>,
    pub n_sites: Vec<usize>,
    pub instances: u64,
    pub seed: u64,
    pub mode: PerturbationMode,
    pub initial: InitialState,
    pub observable: LocalObservable,
}

/// The observable restricted to the Majoranas it touches.
struct Probe {
    modes: Vec<usize>,
    coeffs: DMatrix<f64>,
    offset: f64,
}

impl Probe {
    fn new(obs: &QuadraticObservable<f64>) -> Self {
        let p = obs.coeffs();
        let modes: Vec<usize> = (0..p.nrows())
            .filter(|&j| p.row(j).iter().any(|&v| v != 0.0))
            .collect();
        let coeffs = DMatrix::from_fn(modes.len(), modes.len(), |a, b| p[(modes[a], modes[b])]);
        Self {
            modes,
            coeffs,
            offset: obs.offset(),
        }
    }

    /// `⟨Ô⟩(t)` from only the propagator rows on the support.
    fn value(&self, eig: &(DVector<f64>, DMatrix<Complex<f64>>), g0: &DMatrix<f64>, t: f64) -> f64 {
        let r = propagator_rows(&eig.0, &eig.1, t, &self.modes);
        let g = &r * g0 * r.transpose();
        -0.25 * self.coeffs.dot(&g) + self.offset
    }
}

struct Setup {
    h: CouplingMatrix<f64>,
    g0: DMatrix<f64>,
    probe: Probe,
    ideal: Vec<f64>,
}

impl DynamicsSweep {
    fn setup(&self, n: usize) -> Result<Setup> {
        let h = build_ssh(n, self.coupling)?;
        let g0 = self.initial.correlation(n).into_antisymmetric();
        let probe = Probe::new(&self.observable.build(*h.lattice())?);
        let eig = h.spectrum()?.eigensystem();
        let ideal = self
            .times
            .iter()
            .map(|&t| probe.value(&eig, &g0, t))
            .collect();
        Ok(Setup {
            h,
            g0,
            probe,
            ideal,
        })
    }

    pub fn run(&self) -> SweepOutput {
        let setups: Vec<Result<Setup>> = par_map(&self.n_sites, |&n| self.setup(n));
        let mut tasks = Vec::new();
        for (k, &n) in self.n_sites.iter().enumerate() {
            for &delta in &self.deltas {
                tasks.extend((0..self.instances).map(|i| (k, n, delta, i)));
            }
        }
        let results = par_map(
            &tasks,
            |&(k, n, delta, instance)| -> Result<Vec<ExperimentRecord>> {
                let s = setups[k].as_ref().map_err(Clone::clone)?;
                let hp = perturb(
                    &s.h,
                    &PerturbationSpec::new(delta, self.mode, self.seed, instance),
                )?;
                let eig = hp.spectrum()?.eigensystem();
                Ok(self
                    .times
                    .iter()
                    .zip(&s.ideal)
                    .map(|(&t, &ideal)| {
                        let mut r = ExperimentRecord::new(
                            EXPERIMENT,
                            n,
                            delta,
                            instance,
                            s.probe.value(&eig, &s.g0, t),
                            ideal,
                        );
                        r.j = Some(self.coupling);
                        r.t = Some(t);
                        r
                    })
                    .collect())
            },
        );
        let mut out = SweepOutput::default();
        for (&(_, n, delta, instance), r) in tasks.iter().zip(results) {
            match r {
                Ok(rs) => out.records.extend(rs),
                Err(e) => out.push(
                    format!("{EXPERIMENT} n={n} delta={delta} instance={instance}"),
                    Err(e),
                ),
            }
        }
        out
    }
}

/// Mean error against time at fixed `(n, δ)`, ascending in `t`.
pub fn error_by_time(records: &[ExperimentRecord], n: usize, delta: f64) -> Vec<(f64, f64)> {
    cell_stats(records)
        .into_iter()
        .filter(|s| s.key.experiment == EXPERIMENT && s.key.n_sites == n && s.key.delta == delta)
        .filter_map(|s| s.key.t.map(|t| (t, s.mean_error)))
        .collect()
}

/// Log-log slope of the mean error in `t` over `t ∈ [t_min, t_max]`.
pub fn time_scaling(
    records: &[ExperimentRecord],
    n: usize,
    delta: f64,
    t_min: f64,
    t_max: f64,
) -> Result<FitResult> {
    let (x, y): (Vec<f64>, Vec<f64>) = error_by_time(records, n, delta)
        .into_iter()
        .filter(|&(t, _)| t >= t_min && t <= t_max)
        .unzip();
    if x.is_empty() {
        return Err(invalid(format!(
            "no dynamics cells for n={n}, delta={delta} in [{t_min}, {t_max}]"
        )));
    }
    power_law_fit(&x, &y)
}

/// Largest relative change of the mean error between sizes `n1` and `n2` over the time grid.
pub fn size_dependence(
    records: &[ExperimentRecord],
    delta: f64,
    n1: usize,
    n2: usize,
) -> Option<f64> {
    let a = error_by_time(records, n1, delta);
    let b = error_by_time(records, n2, delta);
    if a.is_empty() || a.len() != b.len() {
        return None;
    }
    a.iter()
        .zip(&b)
        .map(|(x, y)| relative_change(x.1, y.1))
        .reduce(f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::evolve;
    use crate::observables::expectation;

    fn sweep() -> DynamicsSweep {
        DynamicsSweep {
            coupling: 1.0,
            times: vec![0.5, 2.0],
            deltas: vec![0.0, 0.05],
            n_sites: vec![8],
            instances: 2,
            seed: 5,
            mode: PerturbationMode::ExistingTerms,
            initial: InitialState::ChargeDensityWave,
            observable: LocalObservable::BondCurrent,
        }
    }

    #[test]
    fn probe_matches_full_evolution() {
        let s = sweep();
        let setup = s.setup(8).unwrap();
        let hp = perturb(&setup.h, &PerturbationSpec::new(0.2, s.mode, 1, 0)).unwrap();
        let obs = s.observable.build(*setup.h.lattice()).unwrap();
        let eig = hp.spectrum().unwrap().eigensystem();
        for t in [0.3, 1.7] {
            let full =
                expectation(&evolve(&s.initial.correlation(8), &hp, t).unwrap(), &obs).unwrap();
            assert!((setup.probe.value(&eig, &setup.g0, t) - full).abs() < 1e-12);
        }
    }

    #[test]
    fn clean_runs_are_exact_and_the_current_flows() {
        let out = sweep().run();
        assert!(out.failures.is_empty());
        assert_eq!(out.records.len(), 2 * 2 * 2);
        for r in &out.records {
            assert!(r.value_ideal.abs() > 1e-3);
            if r.delta == 0.0 {
                assert!(r.abs_error < 1e-13);
            }
        }
    }

    #[test]
    fn vacuum_density_is_frozen() {
        let mut s = sweep();
        s.initial = InitialState::Vacuum;
        s.observable = LocalObservable::Density;
        for r in s.run().records {
            assert!(r.value_ideal.abs() < 1e-13);
        }
    }
}
