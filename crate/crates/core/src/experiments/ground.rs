//! Ground-state energy density of the SSH ring under coefficient errors.

use serde::{Deserialize, Serialize};

use super::{
    cell_stats, par_map, plateau, power_law_fit, ExperimentRecord, FitResult, Plateau, SweepOutput,
};
use crate::correlations::{ground_state, zero_mode_tolerance};
use crate::error::{invalid, Result};
use crate::hamiltonian::{
    build_ssh, perturb, spectral_gap, CouplingMatrix, PerturbationMode, PerturbationSpec,
};
use crate::observables::energy_density;

pub const EXPERIMENT: &str = "ssh-ground";

/// Relative change between consecutive sizes below which the error has plateaued.
pub const PLATEAU_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStateSweep {
    pub couplings: Vec<f64>,
    pub deltas: Vec<f64>,
    pub n_sites: Vec<usize>,
    pub instances: u64,
    pub seed: u64,
    pub mode: PerturbationMode,
}

struct Cell {
    j: f64,
    n: usize,
    h: Result<(CouplingMatrix<f64>, f64)>,
}

fn ideal(j: f64, n: usize) -> Result<(CouplingMatrix<f64>, f64)> {
    let h = build_ssh(n, j)?;
    let gs = ground_state(&h)?;
    let e = energy_density(&h, &gs.gamma)?;
    Ok((h, e))
}

impl GroundStateSweep {
    pub fn run(&self) -> SweepOutput {
        let pairs: Vec<(f64, usize)> = self
            .couplings
            .iter()
            .flat_map(|&j| self.n_sites.iter().map(move |&n| (j, n)))
            .collect();
        let cells: Vec<Cell> = par_map(&pairs, |&(j, n)| Cell {
            j,
            n,
            h: ideal(j, n),
        });
        let mut out = SweepOutput::default();
        let mut tasks = Vec::new();
        for (c, cell) in cells.iter().enumerate() {
            match &cell.h {
                Ok(_) => {
                    for &delta in &self.deltas {
                        tasks.extend((0..self.instances).map(|i| (c, delta, i)));
                    }
                }
                Err(e) => out.failures.push(super::RecordFailure {
                    key: format!("{EXPERIMENT} J={} n={}", cell.j, cell.n),
                    message: e.to_string(),
                }),
            }
        }
        let results = par_map(&tasks, |&(c, delta, instance)| {
            let cell = &cells[c];
            let (h, e_ideal) = cell.h.as_ref().expect("failed cells have no tasks");
            let spec = PerturbationSpec::new(delta, self.mode, self.seed, instance);
            let gs = ground_state(&perturb(h, &spec)?)?;
            let e = energy_density(h, &gs.gamma)?;
            let mut r = ExperimentRecord::new(EXPERIMENT, cell.n, delta, instance, e, *e_ideal);
            r.j = Some(cell.j);
            r.diag_zero_modes = gs.zero_modes;
            Ok(r)
        });
        for (&(c, delta, instance), r) in tasks.iter().zip(results) {
            out.push(
                format!(
                    "{EXPERIMENT} J={} n={} delta={delta} instance={instance}",
                    cells[c].j, cells[c].n
                ),
                r,
            );
        }
        out
    }
}

/// Mean error per system size for one `(J, δ)`, ascending in size.
pub fn error_by_size(records: &[ExperimentRecord], j: f64, delta: f64) -> Vec<(usize, f64)> {
    cell_stats(records)
        .into_iter()
        .filter(|s| s.key.experiment == EXPERIMENT && s.key.j == Some(j) && s.key.delta == delta)
        .map(|s| (s.key.n_sites, s.mean_error))
        .collect()
}

/// Panel (a): where the error stops depending on `n`.
pub fn size_plateau(records: &[ExperimentRecord], j: f64, delta: f64) -> Option<Plateau> {
    plateau(&error_by_size(records, j, delta), PLATEAU_TOLERANCE)
}

/// Panel (b): power law of the mean error at size `n` against `δ > 0`.
pub fn delta_scaling(records: &[ExperimentRecord], j: f64, n: usize) -> Result<FitResult> {
    let (x, y): (Vec<f64>, Vec<f64>) = cell_stats(records)
        .into_iter()
        .filter(|s| {
            s.key.experiment == EXPERIMENT
                && s.key.j == Some(j)
                && s.key.n_sites == n
                && s.key.delta > 0.0
        })
        .map(|s| (s.key.delta, s.mean_error))
        .unzip();
    power_law_fit(&x, &y)
}

/// Panel (c): the coupling with the largest mean error at `(n, δ)`.
pub fn peak_coupling(records: &[ExperimentRecord], n: usize, delta: f64) -> Option<(f64, f64)> {
    cell_stats(records)
        .into_iter()
        .filter(|s| s.key.experiment == EXPERIMENT && s.key.n_sites == n && s.key.delta == delta)
        .filter_map(|s| s.key.j.map(|j| (j, s.mean_error)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
}

/// Single-particle gap `min |λ|` of the clean ring per size; exact zero
/// modes give 0.
pub fn gap_scan(j: f64, n_sites: &[usize]) -> Result<Vec<(usize, f64)>> {
    par_map(n_sites, |&n| {
        let spectrum = build_ssh(n, j)?.spectrum()?;
        let gap = spectral_gap(&spectrum.eigenvalues());
        Ok((
            n,
            if gap <= zero_mode_tolerance(spectrum.spectral_radius()) {
                0.0
            } else {
                gap
            },
        ))
    })
    .into_iter()
    .collect()
}

/// Power law of the gap against `n`.
pub fn gap_fit(scan: &[(usize, f64)]) -> Result<FitResult> {
    if scan.iter().any(|&(_, g)| g <= 0.0) {
        return Err(invalid(
            "gap scan contains exact zero modes; use sizes without them",
        ));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = scan.iter().map(|&(n, g)| (n as f64, g)).unzip();
    power_law_fit(&x, &y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sweep() -> GroundStateSweep {
        GroundStateSweep {
            couplings: vec![0.5, 1.0],
            deltas: vec![0.0, 0.05, 0.1],
            n_sites: vec![8, 12],
            instances: 3,
            seed: 11,
            mode: PerturbationMode::ExistingTerms,
        }
    }

    #[test]
    fn clean_cells_have_zero_error() {
        let out = sweep().run();
        assert!(out.failures.is_empty());
        assert_eq!(out.records.len(), 2 * 2 * 3 * 3);
        for r in out.records.iter().filter(|r| r.delta == 0.0) {
            assert_eq!(r.abs_error, 0.0);
        }
        assert!(out
            .records
            .iter()
            .filter(|r| r.delta > 0.0)
            .all(|r| r.abs_error > 0.0));
    }

    #[test]
    fn perturbed_ground_state_never_lowers_the_ideal_energy() {
        // the ideal ground state minimises ⟨H⟩, so every error is an excess
        for r in sweep().run().records {
            assert!(r.value_perturbed >= r.value_ideal - 1e-13);
        }
    }

    #[test]
    fn critical_ring_gap_matches_dispersion() {
        // J = 1 is the uniform ring: λ = 2|cos k|, k = 2πm/n, so for n ≡ 2 mod 4
        // the smallest value is 2 sin(π/n)
        let scan = gap_scan(1.0, &[10, 18, 34]).unwrap();
        for (n, g) in scan {
            assert!((g - 2.0 * (PI / n as f64).sin()).abs() < 1e-12);
        }
        assert!(gap_fit(&gap_scan(1.0, &[8, 12]).unwrap()).is_err());
    }

    #[test]
    fn gapped_ring_gap_is_one_minus_j() {
        for (_, g) in gap_scan(0.5, &[8, 16]).unwrap() {
            assert!((g - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn analysis_helpers_select_the_right_cells() {
        let out = sweep().run();
        let by_size = error_by_size(&out.records, 0.5, 0.1);
        assert_eq!(by_size.iter().map(|p| p.0).collect::<Vec<_>>(), vec![8, 12]);
        assert!(size_plateau(&out.records, 0.5, 0.1).is_some());
        let fit = delta_scaling(&out.records, 0.5, 12).unwrap();
        assert_eq!(fit.points, 2);
        let (j, _) = peak_coupling(&out.records, 12, 0.1).unwrap();
        assert!(j == 0.5 || j == 1.0);
    }
}
