//! The matrix inequalities behind the stability bounds, checked on random
//! perturbed SSH rings.
//!
//! Every check reports the worst ratio `lhs / rhs` over its instances.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use super::par_map;
use crate::error::Result;
use crate::fourier::{matrix_series_apply, sign_coefficients};
use crate::hamiltonian::{build_ssh, sample_perturbation, PerturbationMode, PerturbationSpec};
use crate::lattice::LatticeSpec;
use crate::linalg::{max_row_nonzeros, operator_norm, trace_norm};
use crate::observables::{translation_average, QuadraticObservable};
use crate::CouplingMatrix;

/// Slack for rounding in `lhs ≤ rhs`.
const ROUNDING: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    pub instances: u64,
    pub worst_ratio: f64,
    pub worst_instance: u64,
    pub passed: bool,
}

struct Instance {
    h: CouplingMatrix<f64>,
    h_perturbed: CouplingMatrix<f64>,
    difference: DMatrix<f64>,
    delta: f64,
    rng: rand_chacha::ChaCha8Rng,
}

fn instance(seed: u64, index: u64) -> Result<Instance> {
    // a private stream for the instance shape, then the shared perturbation stream
    let mut rng =
        PerturbationSpec::new(0.0, PerturbationMode::AllLocalTerms, seed ^ 0x5eed, index).rng();
    let n = 2 * rng.random_range(2..=12usize);
    let j = rng.random_range(0.2..2.0);
    let delta = 10f64.powf(rng.random_range(-3.0..-0.5));
    let h = build_ssh(n, j)?;
    let difference = sample_perturbation(
        &h,
        &PerturbationSpec::new(delta, PerturbationMode::AllLocalTerms, seed, index),
    )?;
    let h_perturbed = h.shifted(&difference, h.coupling_bound() + delta);
    Ok(Instance {
        h,
        h_perturbed,
        difference,
        delta,
        rng,
    })
}

fn run_check(
    name: &str,
    instances: u64,
    seed: u64,
    f: impl Fn(Instance) -> Result<(f64, f64)> + Sync + Send,
) -> Result<InequalityCheck> {
    let indices: Vec<u64> = (0..instances).collect();
    let pairs = par_map(&indices, |&i| instance(seed, i).and_then(&f));
    let mut worst = (f64::NEG_INFINITY, 0);
    let mut passed = true;
    for (i, pair) in indices.into_iter().zip(pairs) {
        let (lhs, rhs) = pair?;
        passed &= lhs <= rhs * (1.0 + ROUNDING) + ROUNDING;
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if ratio > worst.0 {
            worst = (ratio, i);
        }
    }
    Ok(InequalityCheck {
        name: name.into(),
        instances,
        worst_ratio: worst.0,
        worst_instance: worst.1,
        passed,
    })
}

/// `‖ΔA‖ ≤ rδ` for the sampled error matrix with `r` nonzeros per row.
pub fn sparse_norm_bound(instances: u64, seed: u64) -> Result<InequalityCheck> {
    run_check("sparse-norm", instances, seed, |x| {
        let r = max_row_nonzeros(&x.difference) as f64;
        Ok((operator_norm(&x.difference), r * x.delta))
    })
}

/// `‖e^{imH̃} − e^{imH̃'}‖ ≤ |m| ‖H̃ − H̃'‖` for a random nonzero `|m| ≤ 20`.
pub fn unitary_difference_bound(instances: u64, seed: u64) -> Result<InequalityCheck> {
    run_check("unitary-difference", instances, seed, |mut x| {
        let sign = if x.rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let m = sign * x.rng.random_range(1..=20u32) as f64;
        // e^{imH̃} = e^{-mA} for H̃ = iA
        let u = x.h.spectrum()?.propagator(-m);
        let v = x.h_perturbed.spectrum()?.propagator(-m);
        Ok((
            operator_norm(&(u - v)),
            m.abs() * operator_norm(&x.difference),
        ))
    })
}

/// `|λ_i − λ'_i| ≤ ‖H̃ − H̃'‖` for the sorted spectra.
pub fn weyl_bound(instances: u64, seed: u64) -> Result<InequalityCheck> {
    run_check("weyl", instances, seed, |x| {
        let a = x.h.spectrum()?.eigenvalues();
        let b = x.h_perturbed.spectrum()?.eigenvalues();
        let shift = a
            .iter()
            .zip(&b)
            .fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
        Ok((shift, operator_norm(&x.difference)))
    })
}

/// `|Tr(Õᵀ Ã₀)| ≤ (4D²k/n) ‖Õ₀‖ ‖Ã₀‖₁` for `Õ` the translation average of a
/// random `k`-site term and a random dense `Ã₀`.
pub fn translation_average_bound(instances: u64, seed: u64) -> Result<InequalityCheck> {
    run_check("translation-average", instances, seed, |mut x| {
        let lattice: LatticeSpec = *x.h.lattice();
        let n_sites = lattice.n_sites();
        let dim = lattice.n_majoranas();
        let k = x.rng.random_range(1..=(n_sites / 2).min(3));
        let local = 2 * k * lattice.modes_per_site;
        let mut p0 = DMatrix::zeros(dim, dim);
        for a in 0..local {
            for b in (a + 1)..local {
                let v: f64 = x.rng.random_range(-1.0..1.0);
                p0[(a, b)] = v;
                p0[(b, a)] = -v;
            }
        }
        let averaged = translation_average(&QuadraticObservable::local(lattice, p0.clone(), 0.0)?)?;
        let mut a0 = DMatrix::zeros(dim, dim);
        for a in 0..dim {
            for b in (a + 1)..dim {
                let v: f64 = x.rng.random_range(-1.0..1.0);
                a0[(a, b)] = v;
                a0[(b, a)] = -v;
            }
        }
        let lhs = averaged.coeffs().component_mul(&a0).sum().abs();
        let d = lattice.modes_per_site as f64;
        let rhs = 4.0 * d * d * k as f64 / n_sites as f64 * operator_norm(&p0) * trace_norm(&a0);
        Ok((lhs, rhs))
    })
}

/// `‖sign_M(H̃) − sign_M(H̃')‖ ≤ (2(M+1)/π) ‖H̃ − H̃'‖` after normalizing both
/// by the perturbed model's scale, for a random `M ≤ 100`.
pub fn series_lipschitz_bound(instances: u64, seed: u64) -> Result<InequalityCheck> {
    run_check("series-lipschitz", instances, seed, |mut x| {
        let m = x.rng.random_range(1..=100usize);
        let s = crate::correlations::normalization_scale(&x.h_perturbed);
        let (h, hp) = (x.h.scaled(s), x.h_perturbed.scaled(s));
        let approx = sign_coefficients::<f64>(m)?;
        let diff = matrix_series_apply(&approx, &h)? - matrix_series_apply(&approx, &hp)?;
        let lhs = operator_norm(&diff);
        let rhs = 2.0 * (m as f64 + 1.0) / std::f64::consts::PI
            * operator_norm(&(h.antisymmetric() - hp.antisymmetric()));
        Ok((lhs, rhs))
    })
}

/// All five checks with `instances` random rings each.
pub fn run_all(instances: u64, seed: u64) -> Result<Vec<InequalityCheck>> {
    Ok(vec![
        sparse_norm_bound(instances, seed)?,
        unitary_difference_bound(instances, seed)?,
        translation_average_bound(instances, seed)?,
        weyl_bound(instances, seed)?,
        series_lipschitz_bound(instances, seed)?,
    ])
}
