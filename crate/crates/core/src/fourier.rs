//! Truncated Fourier approximants of `sign(x)` and `tanh(βx)` on `[-π, π]`
//! and grid certification of their error bounds.
//!
//! Both targets are odd, so `f_M(x) = Σ_{|n|≤M} c_n e^{inx} = Σ_{n=1}^M s_n sin(nx)`
//! with `c_{±n} = ∓ i s_n / 2`.

use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::hamiltonian::CouplingMatrix;
use crate::quadrature::{integrate, uniform_breaks};
use crate::Scalar;

/// Points on the uniform certification grid.
pub const DEFAULT_GRID: usize = 100_000;
/// Orders `M` of the default certification grid.
pub const DEFAULT_ORDERS: [usize; 7] = [1, 2, 5, 10, 50, 100, 500];
/// Inverse temperatures of the default certification grid.
pub const DEFAULT_BETAS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
/// Gap widths of the default certification grid.
pub const DEFAULT_ETAS: [f64; 3] = [0.05, 0.1, 0.3];
/// Chebyshev–Lobatto points added on top of the uniform grid.
const CLUSTER_POINTS: usize = 4_000;
const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FourierTarget {
    Sign,
    Tanh { beta: f64 },
}

impl FourierTarget {
    pub fn eval<T: Scalar>(&self, x: T) -> T {
        match *self {
            FourierTarget::Sign => {
                if x > T::zero() {
                    T::one()
                } else if x < T::zero() {
                    -T::one()
                } else {
                    T::zero()
                }
            }
            FourierTarget::Tanh { beta } => (T::lit(beta) * x).tanh(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierApprox<T: Scalar> {
    m: usize,
    target: FourierTarget,
    sine: Vec<T>,
}

impl<T: Scalar> FourierApprox<T> {
    pub fn order(&self) -> usize {
        self.m
    }

    pub fn target(&self) -> FourierTarget {
        self.target
    }

    /// `c_n` for `n ∈ [-M, M]`.
    pub fn coefficient(&self, n: isize) -> Complex<T> {
        let k = n.unsigned_abs();
        if n == 0 || k > self.m {
            return Complex::new(T::zero(), T::zero());
        }
        let half = self.sine[k - 1] * T::lit(0.5);
        if n > 0 {
            Complex::new(T::zero(), -half)
        } else {
            Complex::new(T::zero(), half)
        }
    }

    /// Sine-series coefficients `s_1, …, s_M`.
    pub fn sine_coefficients(&self) -> &[T] {
        &self.sine
    }

    /// `f_M(x)` by the sine recurrence.
    pub fn evaluate(&self, x: T) -> T {
        let c2 = T::lit(2.0) * x.cos();
        let mut prev = T::zero();
        let mut cur = x.sin();
        let mut acc = T::zero();
        for &s in &self.sine {
            acc += s * cur;
            let next = c2 * cur - prev;
            prev = cur;
            cur = next;
        }
        acc
    }

    /// `f_M(x)` as the Dirichlet-kernel convolution `(1/2π) ∫ D_M(x - y) f(y) dy`.
    pub fn evaluate_dirichlet(&self, x: T, tol: T) -> Result<T> {
        let pi = T::pi();
        let m = self.m;
        let kernel = move |u: T| {
            let s = (u * T::lit(0.5)).sin();
            if s.abs() < T::lit(1e-4) {
                (1..=m).fold(T::one(), |acc, n| {
                    acc + T::lit(2.0) * (T::from_count(n) * u).cos()
                })
            } else {
                ((T::from_count(m) + T::lit(0.5)) * u).sin() / s
            }
        };
        let target = self.target;
        let mut breaks = uniform_breaks(-pi, pi, 2 * m + 2);
        breaks.push(T::zero());
        if x > -pi && x < pi {
            breaks.push(x);
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        breaks.dedup();
        let r = integrate(
            |y| kernel(x - y) * target.eval(y),
            &breaks,
            tol * T::two_pi(),
        )?;
        Ok(r.value / T::two_pi())
    }

    /// `Σ_{|n|≤M} |n c_n|`.
    pub fn weighted_coefficient_sum(&self) -> T {
        self.sine.iter().enumerate().fold(T::zero(), |acc, (i, s)| {
            acc + T::from_count(i + 1) * s.abs()
        })
    }

    /// `Σ_{|n|≤M} |c_n|²`.
    pub fn coefficient_energy(&self) -> T {
        self.sine.iter().fold(T::zero(), |acc, &s| acc + s * s) * T::lit(0.5)
    }
}

/// `c_n = 2/(iπn)` for odd `n`, zero otherwise.
pub fn sign_coefficients<T: Scalar>(m: usize) -> Result<FourierApprox<T>> {
    if m == 0 {
        return Err(invalid("truncation order must be >= 1"));
    }
    let sine = (1..=m)
        .map(|n| {
            if n % 2 == 1 {
                T::lit(4.0) / (T::pi() * T::from_count(n))
            } else {
                T::zero()
            }
        })
        .collect();
    Ok(FourierApprox {
        m,
        target: FourierTarget::Sign,
        sine,
    })
}

/// `s_n = (2/π) ∫_0^π g(x) sin(nx) dx` by adaptive quadrature.
fn odd_sine_coefficient<T: Scalar>(g: impl Fn(T) -> T, n: usize) -> Result<T> {
    let pi = T::pi();
    let nn = T::from_count(n);
    let breaks = uniform_breaks(T::zero(), pi, n + 1);
    // the tolerance is on c_n = s_n / 2
    let r = integrate(|x| g(x) * (nn * x).sin(), &breaks, T::lit(QUAD_TOL) * pi)?;
    Ok(T::lit(2.0) * r.value / pi)
}

pub fn tanh_coefficients<T: Scalar>(m: usize, beta: f64) -> Result<FourierApprox<T>> {
    if m == 0 {
        return Err(invalid("truncation order must be >= 1"));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(invalid(format!(
            "tanh target needs finite beta > 0, got {beta}"
        )));
    }
    let b = T::lit(beta);
    let sine = (1..=m)
        .map(|n| odd_sine_coefficient(|x: T| (b * x).tanh(), n))
        .collect::<Result<Vec<_>>>()?;
    Ok(FourierApprox {
        m,
        target: FourierTarget::Tanh { beta },
        sine,
    })
}

/// Sign-function coefficients computed by quadrature rather than the closed form.
pub fn sign_coefficients_by_quadrature<T: Scalar>(m: usize) -> Result<FourierApprox<T>> {
    if m == 0 {
        return Err(invalid("truncation order must be >= 1"));
    }
    let sine = (1..=m)
        .map(|n| odd_sine_coefficient(|_x: T| T::one(), n))
        .collect::<Result<Vec<_>>>()?;
    Ok(FourierApprox {
        m,
        target: FourierTarget::Sign,
        sine,
    })
}

/// `1/M + 1/(Mη)`.
pub fn sign_error_bound(m: usize, eta: f64) -> f64 {
    1.0 / m as f64 + 1.0 / (m as f64 * eta)
}

/// Uniform bound on `|sign_M|`.
pub const SIGN_MAX_BOUND: f64 = 5.0;

/// `q(β) = 12π²β³ + 2π²β² + (2 + π²/2)β + 4√2/π + π²/2`.
pub fn tanh_error_constant(beta: f64) -> f64 {
    use std::f64::consts::{PI, SQRT_2};
    let pi2 = PI * PI;
    12.0 * pi2 * beta.powi(3)
        + 2.0 * pi2 * beta.powi(2)
        + (2.0 + pi2 / 2.0) * beta
        + (4.0 * SQRT_2 / PI + pi2 / 2.0)
}

/// `2M(β + 1)`.
pub fn tanh_coefficient_sum_bound(m: usize, beta: f64) -> f64 {
    2.0 * m as f64 * (beta + 1.0)
}

/// Outcome of one grid certification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationReport {
    pub lemma: String,
    pub m: usize,
    pub beta: Option<f64>,
    pub eta: Option<f64>,
    /// Grid maximum of the certified quantity.
    pub measured: f64,
    /// Location of that maximum.
    pub argmax: f64,
    /// Maximum on the grid refined by 2×.
    pub refined: f64,
    pub bound: f64,
    pub refinement_stable: bool,
    pub passed: bool,
}

/// Uniform points on `[a, b]` plus Chebyshev–Lobatto points clustered at both ends.
pub fn certification_grid(a: f64, b: f64, points: usize) -> Vec<f64> {
    let points = points.max(2);
    let mut grid: Vec<f64> = (0..points)
        .map(|i| a + (b - a) * i as f64 / (points - 1) as f64)
        .collect();
    let k = CLUSTER_POINTS;
    grid.extend(
        (0..=k).map(|i| {
            a + 0.5 * (b - a) * (1.0 - (std::f64::consts::PI * i as f64 / k as f64).cos())
        }),
    );
    grid
}

fn grid_max(grid: &[f64], f: impl Fn(f64) -> f64) -> (f64, f64) {
    grid.iter().fold((f64::NEG_INFINITY, 0.0), |best, &x| {
        let v = f(x);
        if v > best.0 {
            (v, x)
        } else {
            best
        }
    })
}

#[allow(clippy::too_many_arguments)]
fn certify(
    lemma: &str,
    m: usize,
    beta: Option<f64>,
    eta: Option<f64>,
    (a, b): (f64, f64),
    points: usize,
    bound: f64,
    f: impl Fn(f64) -> f64,
) -> CertificationReport {
    let (measured, argmax) = grid_max(&certification_grid(a, b, points), &f);
    let (refined, _) = grid_max(&certification_grid(a, b, 2 * points), &f);
    let refinement_stable =
        (refined - measured).abs() <= 0.01 * refined.abs().max(f64::MIN_POSITIVE);
    CertificationReport {
        lemma: lemma.to_string(),
        m,
        beta,
        eta,
        measured,
        argmax,
        refined,
        bound,
        refinement_stable,
        passed: measured.max(refined) <= bound,
    }
}

/// `max |sign(x) - sign_M(x)|` over `η ≤ |x| ≤ π - η` against `1/M + 1/(Mη)`.
/// By odd symmetry only `x > 0` is scanned.
pub fn certify_sign_error(m: usize, eta: f64, points: usize) -> Result<CertificationReport> {
    if !(eta > 0.0 && eta < std::f64::consts::FRAC_PI_2) {
        return Err(invalid(format!("eta must lie in (0, π/2), got {eta}")));
    }
    let approx = sign_coefficients::<f64>(m)?;
    Ok(certify(
        "sign-error",
        m,
        None,
        Some(eta),
        (eta, std::f64::consts::PI - eta),
        points,
        sign_error_bound(m, eta),
        |x| (1.0 - approx.evaluate(x)).abs(),
    ))
}

/// `max |sign_M(x)|` over `[0, π]` against the constant 5.
pub fn certify_sign_max(m: usize, points: usize) -> Result<CertificationReport> {
    let approx = sign_coefficients::<f64>(m)?;
    Ok(certify(
        "sign-max",
        m,
        None,
        None,
        (0.0, std::f64::consts::PI),
        points,
        SIGN_MAX_BOUND,
        |x| approx.evaluate(x).abs(),
    ))
}

/// `max |t_M(x) - tanh(βx)|` over `[0, π/2]` against `q(β)/M`.
pub fn certify_tanh_error(m: usize, beta: f64, points: usize) -> Result<CertificationReport> {
    let approx = tanh_coefficients::<f64>(m, beta)?;
    Ok(certify_tanh_with(&approx, points))
}

/// As [`certify_tanh_error`] for precomputed coefficients.
pub fn certify_tanh_with(approx: &FourierApprox<f64>, points: usize) -> CertificationReport {
    let beta = match approx.target() {
        FourierTarget::Tanh { beta } => beta,
        FourierTarget::Sign => f64::INFINITY,
    };
    let m = approx.order();
    certify(
        "tanh-error",
        m,
        Some(beta),
        None,
        (0.0, std::f64::consts::FRAC_PI_2),
        points,
        tanh_error_constant(beta) / m as f64,
        |x| (approx.evaluate(x) - (beta * x).tanh()).abs(),
    )
}

/// `Σ |n c_n|` against `2M(β + 1)`.
pub fn certify_tanh_coefficient_sum(approx: &FourierApprox<f64>) -> CertificationReport {
    let beta = match approx.target() {
        FourierTarget::Tanh { beta } => beta,
        FourierTarget::Sign => f64::INFINITY,
    };
    let m = approx.order();
    let measured = approx.weighted_coefficient_sum();
    let bound = tanh_coefficient_sum_bound(m, beta);
    CertificationReport {
        lemma: "tanh-coefficient-sum".into(),
        m,
        beta: Some(beta),
        eta: None,
        measured,
        argmax: f64::NAN,
        refined: measured,
        bound,
        refinement_stable: true,
        passed: measured <= bound,
    }
}

/// Every certification over the product grid: per `M`, the sign error at each
/// `η`, the sign maximum, and per `β` the tanh error and coefficient sum.
pub fn certify_all(
    orders: &[usize],
    betas: &[f64],
    etas: &[f64],
    points: usize,
) -> Result<Vec<CertificationReport>> {
    enum Job {
        SignError(usize, f64),
        SignMax(usize),
        Tanh(usize, f64),
    }
    let mut jobs = Vec::new();
    for &m in orders {
        jobs.extend(etas.iter().map(|&eta| Job::SignError(m, eta)));
        jobs.push(Job::SignMax(m));
        jobs.extend(betas.iter().map(|&beta| Job::Tanh(m, beta)));
    }
    let nested: Vec<Result<Vec<CertificationReport>>> = jobs
        .par_iter()
        .map(|job| match *job {
            Job::SignError(m, eta) => Ok(vec![certify_sign_error(m, eta, points)?]),
            Job::SignMax(m) => Ok(vec![certify_sign_max(m, points)?]),
            Job::Tanh(m, beta) => {
                let approx = tanh_coefficients::<f64>(m, beta)?;
                Ok(vec![
                    certify_tanh_with(&approx, points),
                    certify_tanh_coefficient_sum(&approx),
                ])
            }
        })
        .collect();
    let mut reports = Vec::new();
    for r in nested {
        reports.extend(r?);
    }
    Ok(reports)
}

/// `f_M(H̃) = Σ c_n e^{inH̃}`, returned as the real antisymmetric `R` with
/// `f_M(H̃) = iR`. Requires `‖H̃‖ ≤ π`.
pub fn matrix_series_apply<T: Scalar>(
    approx: &FourierApprox<T>,
    h: &CouplingMatrix<T>,
) -> Result<DMatrix<T>> {
    let spectrum = h.spectrum()?;
    let radius = spectrum.spectral_radius();
    if radius > T::pi() * (T::one() + T::lit(1e-12)) {
        return Err(invalid(format!(
            "series needs ‖H̃‖ <= π, got {radius}; normalize first"
        )));
    }
    Ok(spectrum.odd_function(|x| approx.evaluate(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sign_coefficients_closed_form() {
        let s = sign_coefficients::<f64>(6).unwrap();
        assert_eq!(s.coefficient(0), Complex::new(0.0, 0.0));
        assert_eq!(s.coefficient(2), Complex::new(0.0, 0.0));
        assert!((s.coefficient(1).norm() - 2.0 / PI).abs() < 1e-15);
        assert!((3.0 * s.coefficient(-3).norm() - 2.0 / PI).abs() < 1e-15);
        assert_eq!(s.coefficient(-5), s.coefficient(5).conj());
        assert!(sign_coefficients::<f64>(0).is_err());
    }

    #[test]
    fn quadrature_reproduces_sign_coefficients() {
        let exact = sign_coefficients::<f64>(20).unwrap();
        let quad = sign_coefficients_by_quadrature::<f64>(20).unwrap();
        for n in -20..=20 {
            assert!((exact.coefficient(n) - quad.coefficient(n)).norm() < 1e-12);
        }
    }

    #[test]
    fn series_is_odd() {
        let s = sign_coefficients::<f64>(25).unwrap();
        assert_eq!(s.evaluate(0.0), 0.0);
        for i in 1..50 {
            let x = i as f64 * 0.06;
            assert!((s.evaluate(x) + s.evaluate(-x)).abs() < 1e-13);
        }
    }

    #[test]
    fn dirichlet_route_matches_series() {
        let s = sign_coefficients::<f64>(8).unwrap();
        for x in [-2.9, -1.0, 0.05, 0.7, 3.0] {
            let direct = s.evaluate(x);
            let conv = s.evaluate_dirichlet(x, 1e-11).unwrap();
            assert!((direct - conv).abs() < 1e-8, "x={x}: {direct} vs {conv}");
        }
    }

    #[test]
    fn tanh_coefficients_bounds() {
        let beta = 1.0;
        let t = tanh_coefficients::<f64>(30, beta).unwrap();
        assert_eq!(t.coefficient(0).norm(), 0.0);
        for n in 1..=30 {
            assert!(t.coefficient(n).norm() <= (beta + 1.0) / n as f64);
        }
        assert!(tanh_coefficients::<f64>(3, 0.0).is_err());
    }

    #[test]
    fn q_of_one() {
        let q = tanh_error_constant(1.0);
        let expected = 12.0 * PI * PI
            + 2.0 * PI * PI
            + 2.0
            + PI * PI / 2.0
            + 4.0 * 2f64.sqrt() / PI
            + PI * PI / 2.0;
        assert!((q - expected).abs() < 1e-12);
    }

    #[test]
    fn small_certifications_pass() {
        let r = certify_sign_error(50, 0.1, 5_000).unwrap();
        assert!(r.passed, "{r:?}");
        let r = certify_sign_max(50, 5_000).unwrap();
        assert!(r.passed && r.measured < 1.2);
        assert!(certify_sign_error(10, 2.0, 100).is_err());
    }
}
