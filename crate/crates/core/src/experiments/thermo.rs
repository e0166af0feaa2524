//! Clean SSH energy density: finite-size values against the Brillouin-zone
//! integral.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{linear_fit, par_map, power_law_fit, ExperimentRecord, FitResult, SweepOutput};
use crate::correlations::ground_state;
use crate::error::{invalid, Result};
use crate::hamiltonian::build_ssh;
use crate::observables::energy_density;
use crate::quadrature::{integrate, uniform_breaks};

pub const EXPERIMENT: &str = "thermo";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoLimit {
    pub value: f64,
    /// Same integral on a finer partition with a tighter tolerance.
    pub refined: f64,
    pub refinement_change: f64,
    pub error_estimate: f64,
}

fn band_integral(j: f64, pieces: usize, tol: f64) -> Result<(f64, f64)> {
    // the integrand has a kink at k = π when J = 1; keep it on a breakpoint
    let mut breaks = uniform_breaks(0.0, PI, pieces);
    breaks.extend(uniform_breaks(PI, 2.0 * PI, pieces).into_iter().skip(1));
    let r = integrate(
        |k: f64| (1.0 + j * j + 2.0 * j * k.cos()).max(0.0).sqrt(),
        &breaks,
        tol,
    )?;
    Ok((-r.value / (4.0 * PI), r.error / (4.0 * PI)))
}

/// `e* = -(1/4π) ∫₀^{2π} |1 + J e^{ik}| dk`, the ground-state energy per site
/// of the infinite ring.
pub fn thermodynamic_limit(j: f64) -> Result<ThermoLimit> {
    if !(j >= 0.0) {
        return Err(invalid(format!(
            "SSH coupling J must be nonnegative, got {j}"
        )));
    }
    let (value, error_estimate) = band_integral(j, 4, 1e-13)?;
    let (refined, _) = band_integral(j, 32, 1e-14)?;
    Ok(ThermoLimit {
        value,
        refined,
        refinement_change: (value - refined).abs(),
        error_estimate,
    })
}

/// Ground-state energy per site of the clean ring.
pub fn finite_size_energy(j: f64, n: usize) -> Result<f64> {
    let h = build_ssh(n, j)?;
    energy_density(&h, &ground_state(&h)?.gamma)
}

#[derive(Debug, Clone, Serialize)]
pub struct Extrapolation {
    pub j: f64,
    pub limit: ThermoLimit,
    /// `ε(n) = |e(n) − e*|` as a power law in `n`.
    pub power_law: Option<FitResult>,
    /// `ln ε(n)` linear in `n`, the gapped-model alternative.
    pub exponential: Option<FitResult>,
}

/// Records `e(n)` against `e*` for every size and fits the convergence.
/// Sizes at which `ε(n)` is zero to machine precision are left out of the fits.
pub fn extrapolate(j: f64, n_sites: &[usize]) -> Result<(Extrapolation, SweepOutput)> {
    let limit = thermodynamic_limit(j)?;
    let energies = par_map(n_sites, |&n| finite_size_energy(j, n));
    let mut out = SweepOutput::default();
    for (&n, e) in n_sites.iter().zip(energies) {
        out.push(
            format!("{EXPERIMENT} J={j} n={n}"),
            e.map(|e| {
                let mut r = ExperimentRecord::new(EXPERIMENT, n, 0.0, 0, e, limit.value);
                r.j = Some(j);
                r
            }),
        );
    }
    let resolved = 64.0 * f64::EPSILON * limit.value.abs();
    let (x, y): (Vec<f64>, Vec<f64>) = out
        .records
        .iter()
        .filter(|r| r.abs_error > resolved)
        .map(|r| (r.n_sites as f64, r.abs_error))
        .unzip();
    let power_law = power_law_fit(&x, &y).ok();
    let logs: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let exponential = linear_fit(&x, &logs).ok();
    Ok((
        Extrapolation {
            j,
            limit,
            power_law,
            exponential,
        },
        out,
    ))
}

/// Smallest `n` that is a multiple of `multiple`, at least `min`, and whose
/// fitted finite-size error is at most `target`.
pub fn size_for_precision(
    fit: &FitResult,
    target: f64,
    multiple: usize,
    min: usize,
) -> Result<usize> {
    if !(target > 0.0) || fit.slope >= 0.0 {
        return Err(invalid(
            "size selection needs a positive target and a decaying fit",
        ));
    }
    // fit.predict is monotone decreasing: solve, then round up to the lattice of sizes
    let exact = (target / fit.intercept.exp()).powf(1.0 / fit.slope);
    let multiple = multiple.max(1);
    let mut n = ((exact / multiple as f64).ceil() as usize * multiple)
        .max(min.div_ceil(multiple) * multiple);
    while fit.predict(n as f64) > target {
        n += multiple;
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_limit_is_minus_two_over_pi() {
        let l = thermodynamic_limit(1.0).unwrap();
        assert!((l.value + 2.0 / PI).abs() < 1e-13);
        assert!(l.refinement_change < 1e-12);
    }

    #[test]
    fn dimer_limit_is_half_a_bond() {
        // J = 0: isolated dimers, energy -1 per bond, one bond per two sites
        assert!((thermodynamic_limit(0.0).unwrap().value + 0.5).abs() < 1e-14);
    }

    #[test]
    fn finite_size_corrections_at_criticality() {
        // uniform ring: e(n) = -(2/n) Σ_k |cos k|, which deviates from -2/π by
        // +2π/(3n²) for n ≡ 0 mod 4 and -π/(3n²) for n ≡ 2 mod 4
        for (n, c) in [(40usize, 2.0 * PI / 3.0), (42, -PI / 3.0)] {
            let e = finite_size_energy(1.0, n).unwrap();
            let eps = e + 2.0 / PI;
            assert!(
                (eps * (n * n) as f64 / c - 1.0).abs() < 0.01,
                "n={n}: {eps}"
            );
        }
    }

    #[test]
    fn extrapolation_fits_and_size_selection() {
        let (x, out) = extrapolate(1.0, &[16, 32, 64]).unwrap();
        assert_eq!(out.records.len(), 3);
        let fit = x.power_law.unwrap();
        assert!((fit.slope + 2.0).abs() < 0.05);
        let n = size_for_precision(&fit, 1e-4, 4, 8).unwrap();
        assert_eq!(n % 4, 0);
        assert!(fit.predict(n as f64) <= 1e-4 && fit.predict((n - 4) as f64) > 1e-4);
        assert_eq!(size_for_precision(&fit, 1.0, 4, 8).unwrap(), 8);
    }

    #[test]
    fn gapped_convergence_is_exponential() {
        let (x, _) = extrapolate(0.5, &[8, 12, 16, 20]).unwrap();
        let exp_fit = x.exponential.unwrap();
        assert!(exp_fit.r_squared > 0.99);
        // ε(n) ≈ e^{-0.4 n} at J = 0.5
        assert!(exp_fit.slope < -0.3 && exp_fit.slope > -0.6);
    }
}
