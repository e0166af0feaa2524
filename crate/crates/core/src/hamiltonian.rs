//! Quadratic Majorana Hamiltonians, the SSH family and the hardware-error ensemble.
//!
//! A [`CouplingMatrix`] stores the real antisymmetric `A` of `H̃ = iA`; the
//! many-body operator it stands for is `Ĥ = ¼ Σ_jk H̃_jk c_j c_k`. With this
//! normalization a hopping `t (a_i† a_j + h.c.)` becomes
//! `A[c¹_i, c²_j] = t`, `A[c²_i, c¹_j] = -t` and the eigenvalues of `H̃`
//! are the single-particle energies.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::correlations::PairLayer;
use crate::error::{invalid, Error, Result};
use crate::lattice::LatticeSpec;
use crate::linalg::{self, BlockSpectrum};
use crate::Scalar;

/// One independent coefficient `h c_x^α c_y^β` of a quadratic Hamiltonian.
///
/// The coefficient is the `H̃` entry and must be purely imaginary; the
/// conjugate entry at `(y, β; x, α)` is derived.
#[derive(Debug, Clone, PartialEq)]
pub struct Term<T: Scalar> {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub alpha: usize,
    pub beta: usize,
    pub coeff: Complex<T>,
}

impl<T: Scalar> Term<T> {
    /// Term with coefficient `i·a`.
    pub fn imaginary(x: Vec<usize>, y: Vec<usize>, alpha: usize, beta: usize, a: T) -> Self {
        Self {
            x,
            y,
            alpha,
            beta,
            coeff: Complex::new(T::zero(), a),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix<T: Scalar> {
    a: DMatrix<T>,
    lattice: LatticeSpec,
    coupling_bound: T,
}

impl<T: Scalar> CouplingMatrix<T> {
    /// Builds `H̃ = iA` from a real antisymmetric `A`, checking every invariant.
    pub fn from_antisymmetric(
        lattice: LatticeSpec,
        a: DMatrix<T>,
        coupling_bound: T,
    ) -> Result<Self> {
        let h = Self {
            a,
            lattice,
            coupling_bound,
        };
        h.validate()?;
        Ok(h)
    }

    pub fn zeros(lattice: LatticeSpec, coupling_bound: T) -> Self {
        let n = lattice.n_majoranas();
        Self {
            a: DMatrix::zeros(n, n),
            lattice,
            coupling_bound,
        }
    }

    /// Checks shape, exact antisymmetry, locality and the magnitude bound.
    pub fn validate(&self) -> Result<()> {
        let n = self.lattice.n_majoranas();
        if self.a.nrows() != n || self.a.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.a.nrows(),
            });
        }
        let slack = T::one() + T::lit(1e-12);
        for k in 0..n {
            for j in 0..=k {
                let v = self.a[(j, k)];
                if v != -self.a[(k, j)] {
                    return Err(Error::Convention(format!(
                        "entries ({j},{k}) and ({k},{j}) are not negatives"
                    )));
                }
                if v == T::zero() {
                    continue;
                }
                let (x, alpha) = self.lattice.mode_site(j);
                let (y, beta) = self.lattice.mode_site(k);
                let reason = if self.lattice.distance_unchecked(&x, &y) > self.lattice.range {
                    Some(format!(
                        "sites farther apart than range {}",
                        self.lattice.range
                    ))
                } else if v.abs() > self.coupling_bound * slack {
                    Some(format!("|h| = {v} exceeds J = {}", self.coupling_bound))
                } else {
                    None
                };
                if let Some(reason) = reason {
                    return Err(Error::InvalidTerm {
                        x,
                        y,
                        alpha,
                        beta,
                        reason,
                    });
                }
            }
        }
        Ok(())
    }

    /// Number of Majorana modes `n`.
    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn range(&self) -> usize {
        self.lattice.range
    }

    pub fn coupling_bound(&self) -> T {
        self.coupling_bound
    }

    /// The real antisymmetric `A` with `H̃ = iA`.
    pub fn antisymmetric(&self) -> &DMatrix<T> {
        &self.a
    }

    /// `H̃` as a complex Hermitian matrix.
    pub fn hermitian(&self) -> DMatrix<Complex<T>> {
        self.a.map(|x| Complex::new(T::zero(), x))
    }

    /// `H̃ / s`, with the coupling bound rescaled accordingly.
    pub fn scaled(&self, s: T) -> Self {
        Self {
            a: &self.a / s,
            lattice: self.lattice,
            coupling_bound: self.coupling_bound / s,
        }
    }

    /// Adds a real antisymmetric shift to `A` without re-validating.
    pub(crate) fn shifted(&self, delta: &DMatrix<T>, new_bound: T) -> Self {
        Self {
            a: &self.a + delta,
            lattice: self.lattice,
            coupling_bound: new_bound,
        }
    }

    /// Block-wise spectral decomposition of `H̃`.
    pub fn spectrum(&self) -> Result<BlockSpectrum<T>> {
        BlockSpectrum::decompose(&self.a)
    }

    /// Maximum number of nonzero couplings of any mode.
    pub fn max_row_nonzeros(&self) -> usize {
        linalg::max_row_nonzeros(&self.a)
    }

    /// Many-body operator `¼ Σ H̃_jk c_j c_k` written as `Σ_{j<k} coefficient · c_j c_k`
    /// pairs, for callers that need the operator form.
    pub fn pair_coefficients(&self) -> Vec<(usize, usize, Complex<T>)> {
        let half = T::lit(0.5);
        let n = self.n();
        let mut out = Vec::new();
        for j in 0..n {
            for k in (j + 1)..n {
                let v = self.a[(j, k)];
                if v != T::zero() {
                    out.push((j, k, Complex::new(T::zero(), half * v)));
                }
            }
        }
        out
    }
}

/// Assembles a coupling matrix from independent upper-triangle terms.
pub fn build_quadratic<T: Scalar>(
    lattice: LatticeSpec,
    coupling_bound: T,
    terms: &[Term<T>],
) -> Result<CouplingMatrix<T>> {
    let mut h = CouplingMatrix::zeros(lattice, coupling_bound);
    let slack = T::one() + T::lit(1e-12);
    for t in terms {
        let reject = |reason: String| Error::InvalidTerm {
            x: t.x.clone(),
            y: t.y.clone(),
            alpha: t.alpha,
            beta: t.beta,
            reason,
        };
        let j = lattice
            .mode_index(&t.x, t.alpha)
            .map_err(|e| reject(e.to_string()))?;
        let k = lattice
            .mode_index(&t.y, t.beta)
            .map_err(|e| reject(e.to_string()))?;
        if t.coeff.re != T::zero() {
            return Err(reject(format!(
                "coefficient {} is not purely imaginary",
                t.coeff
            )));
        }
        let a = t.coeff.im;
        if j == k {
            if a != T::zero() {
                return Err(reject(
                    "diagonal entry of a Hermitian imaginary matrix must vanish".into(),
                ));
            }
            continue;
        }
        if lattice.distance_unchecked(&t.x, &t.y) > lattice.range {
            return Err(reject(format!(
                "sites farther apart than range {}",
                lattice.range
            )));
        }
        if a.abs() > coupling_bound * slack {
            return Err(reject(format!(
                "|h| = {} exceeds J = {coupling_bound}",
                a.abs()
            )));
        }
        h.a[(j, k)] = a;
        h.a[(k, j)] = -a;
    }
    Ok(h)
}

/// Hopping amplitude of bond `(i, i+1)` for 0-based site `i`: bonds starting on
/// odd 1-based sites carry 1, the others carry `J`.
pub fn ssh_hopping<T: Scalar>(site: usize, j_coupling: T) -> T {
    if site.is_multiple_of(2) {
        T::one()
    } else {
        j_coupling
    }
}

/// Terms of `Σ_i t_i (a_i† a_{i+1} + h.c.)` on a ring.
pub fn ssh_terms<T: Scalar>(n_sites: usize, j_coupling: T) -> Vec<Term<T>> {
    let mut terms = Vec::with_capacity(2 * n_sites);
    for i in 0..n_sites {
        let t = ssh_hopping(i, j_coupling);
        if t == T::zero() {
            continue;
        }
        let next = (i + 1) % n_sites;
        terms.push(Term::imaginary(vec![i], vec![next], 1, 2, t));
        terms.push(Term::imaginary(vec![i], vec![next], 2, 1, -t));
    }
    terms
}

/// Periodic SSH chain with hoppings alternating `1, J, 1, J, …`.
pub fn build_ssh<T: Scalar>(n_sites: usize, j_coupling: T) -> Result<CouplingMatrix<T>> {
    if n_sites < 4 || !n_sites.is_multiple_of(2) {
        return Err(invalid(format!(
            "SSH ring needs an even number of sites >= 4, got {n_sites}"
        )));
    }
    if j_coupling < T::zero() {
        return Err(invalid(format!(
            "SSH coupling J must be nonnegative, got {j_coupling}"
        )));
    }
    let lattice = LatticeSpec::chain(n_sites)?;
    build_quadratic(
        lattice,
        T::one().max(j_coupling),
        &ssh_terms(n_sites, j_coupling),
    )
}

/// The path `A(s) = A_SSH[J = s] + ΔA` as two layers of disjoint Majorana
/// pairs: bonds starting on even 0-based sites (hopping 1) and the others
/// (hopping `s`). `delta` is a static error supported on the bonds.
pub fn ssh_layers<T: Scalar>(n_sites: usize, delta: &DMatrix<T>) -> Vec<PairLayer<T>> {
    let mut layers = vec![Vec::new(), Vec::new()];
    for i in 0..n_sites {
        let next = (i + 1) % n_sites;
        let (base, slope) = if i % 2 == 0 {
            (T::one(), T::zero())
        } else {
            (T::zero(), T::one())
        };
        let (c1, c2) = (2 * i, 2 * i + 1);
        let (d1, d2) = (2 * next, 2 * next + 1);
        layers[i % 2].push((c1, d2, base + delta[(c1, d2)], slope));
        layers[i % 2].push((c2, d1, -base + delta[(c2, d1)], -slope));
    }
    layers
        .into_iter()
        .map(|p| PairLayer::new(p).expect("bond pairs are disjoint within a parity class"))
        .collect()
}

/// Uniform nearest-neighbour hopping ring, `t = 1` on every bond.
pub fn build_tight_binding<T: Scalar>(n_sites: usize) -> Result<CouplingMatrix<T>> {
    build_ssh(n_sites, T::one())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbationMode {
    /// Only couplings that are already nonzero are perturbed.
    #[default]
    ExistingTerms,
    /// Every coupling allowed by the interaction range, on-site included.
    AllLocalTerms,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub delta: f64,
    pub mode: PerturbationMode,
    pub seed: u64,
    pub instance: u64,
}

impl PerturbationSpec {
    pub fn new(delta: f64, mode: PerturbationMode, seed: u64, instance: u64) -> Self {
        Self {
            delta,
            mode,
            seed,
            instance,
        }
    }

    /// Random stream for this instance; independent of evaluation order.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.instance);
        rng
    }
}

/// Samples the additive error `ΔA` that [`perturb`] would apply.
///
/// Independent coefficients are visited in row-major upper-triangle order and
/// each receives an i.i.d. uniform shift in `[-δ, δ]`.
pub fn sample_perturbation<T: Scalar>(
    h: &CouplingMatrix<T>,
    spec: &PerturbationSpec,
) -> Result<DMatrix<T>> {
    if !(spec.delta >= 0.0) || !spec.delta.is_finite() {
        return Err(invalid(format!(
            "perturbation strength must be finite and >= 0, got {}",
            spec.delta
        )));
    }
    let n = h.n();
    let mut delta = DMatrix::zeros(n, n);
    if spec.delta == 0.0 {
        return Ok(delta);
    }
    let mut rng = spec.rng();
    let lattice = h.lattice();
    let coords: Vec<Vec<usize>> = (0..lattice.n_sites())
        .map(|s| lattice.site_coords(s))
        .collect();
    let flavors = lattice.flavors();
    for j in 0..n {
        for k in (j + 1)..n {
            let included = match spec.mode {
                PerturbationMode::ExistingTerms => h.a[(j, k)] != T::zero(),
                PerturbationMode::AllLocalTerms => {
                    lattice.distance_unchecked(&coords[j / flavors], &coords[k / flavors])
                        <= lattice.range
                }
            };
            if included {
                let x: f64 = rng.random_range(-spec.delta..=spec.delta);
                delta[(j, k)] = T::lit(x);
                delta[(k, j)] = -T::lit(x);
            }
        }
    }
    Ok(delta)
}

/// `H'` with every coefficient in the perturbation support shifted by at most `δ`.
pub fn perturb<T: Scalar>(
    h: &CouplingMatrix<T>,
    spec: &PerturbationSpec,
) -> Result<CouplingMatrix<T>> {
    if spec.delta == 0.0 {
        return Ok(h.clone());
    }
    let delta = sample_perturbation(h, spec)?;
    Ok(h.shifted(&delta, h.coupling_bound + T::lit(spec.delta)))
}

/// Largest singular value.
pub fn operator_norm<T: Scalar>(m: &DMatrix<T>) -> T {
    linalg::operator_norm(m)
}

/// Ascending single-particle spectrum of `H̃` with its unitary eigenbasis.
#[derive(Debug, Clone)]
pub struct Spectrum<T: Scalar> {
    pub values: DVector<T>,
    pub vectors: DMatrix<Complex<T>>,
}

pub fn eigenfrequencies<T: Scalar>(h: &CouplingMatrix<T>) -> Result<Spectrum<T>> {
    let (values, vectors) = h.spectrum()?.eigensystem();
    Ok(Spectrum { values, vectors })
}

/// Number of eigenfrequencies in `[-η, η]`.
pub fn density_of_modes<T: Scalar>(spectrum: &[T], eta: T) -> usize {
    spectrum.iter().filter(|x| x.abs() <= eta).count()
}

/// Smallest `|λ|` over the spectrum.
pub fn spectral_gap<T: Scalar>(spectrum: &[T]) -> T {
    spectrum
        .iter()
        .fold(T::max_value().unwrap_or(T::one()), |m, x| m.min(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_terms_give_zero_matrix() {
        let lat = LatticeSpec::chain(4).unwrap();
        let h = build_quadratic::<f64>(lat, 1.0, &[]).unwrap();
        assert!(h.antisymmetric().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn single_term_is_hermitized() {
        let lat = LatticeSpec::chain(4).unwrap();
        let h = build_quadratic(lat, 1.0, &[Term::imaginary(vec![0], vec![0], 1, 2, 0.7)]).unwrap();
        let ht = h.hermitian();
        assert_eq!(ht[(0, 1)], Complex::new(0.0, 0.7));
        assert_eq!(ht[(1, 0)], Complex::new(0.0, -0.7));
        assert_eq!(ht.iter().filter(|z| z.norm() != 0.0).count(), 2);
    }

    #[test]
    fn rejects_bad_terms() {
        let lat = LatticeSpec::chain(6).unwrap();
        let far = Term::imaginary(vec![0], vec![3], 1, 1, 0.1);
        let big = Term::imaginary(vec![0], vec![1], 1, 1, 2.0);
        let real = Term {
            x: vec![0],
            y: vec![1],
            alpha: 1,
            beta: 2,
            coeff: Complex::new(0.1, 0.0),
        };
        let diag = Term::imaginary(vec![2], vec![2], 1, 1, 0.3);
        for t in [far, big, real, diag] {
            let err = build_quadratic(lat, 1.0, &[t]).unwrap_err();
            assert!(matches!(err, Error::InvalidTerm { .. }), "{err}");
        }
    }

    #[test]
    fn ssh_rejects_odd_rings() {
        assert!(build_ssh::<f64>(7, 1.0).is_err());
        assert!(build_ssh::<f64>(2, 1.0).is_err());
        assert!(build_ssh::<f64>(8, -0.1).is_err());
    }

    #[test]
    fn dimer_limit_spectrum() {
        let h = build_ssh::<f64>(8, 0.0).unwrap();
        let spec = eigenfrequencies(&h).unwrap();
        // an isolated bond t(a1†a2 + h.c.) has single-particle energies ±t, each
        // appearing once per Majorana pair
        for &x in spec.values.iter() {
            assert!((x.abs() - 1.0).abs() < 1e-14);
        }
        assert_eq!(spec.values.iter().filter(|&&x| x > 0.0).count(), 8);
    }

    #[test]
    fn perturbation_is_deterministic_and_bounded() {
        let h = build_ssh::<f64>(10, 0.5).unwrap();
        let spec = PerturbationSpec::new(0.1, PerturbationMode::ExistingTerms, 7, 3);
        let p1 = perturb(&h, &spec).unwrap();
        let p2 = perturb(&h, &spec).unwrap();
        assert_eq!(p1, p2);
        let diff = p1.antisymmetric() - h.antisymmetric();
        assert!(diff.iter().all(|x| x.abs() <= 0.1));
        // support unchanged in existing-terms mode
        for (x, y) in h.antisymmetric().iter().zip(p1.antisymmetric().iter()) {
            assert_eq!(*x == 0.0, *y == 0.0);
        }
        p1.validate().unwrap();
        let other = perturb(
            &h,
            &PerturbationSpec {
                instance: 4,
                ..spec
            },
        )
        .unwrap();
        assert_ne!(other, p1);
        assert_eq!(
            perturb(&h, &PerturbationSpec { delta: 0.0, ..spec }).unwrap(),
            h
        );
    }

    #[test]
    fn all_local_mode_fills_the_range() {
        let h = build_ssh::<f64>(6, 1.0).unwrap();
        let spec = PerturbationSpec::new(0.05, PerturbationMode::AllLocalTerms, 1, 0);
        let p = perturb(&h, &spec).unwrap();
        p.validate().unwrap();
        // each Majorana: 1 on-site partner + 2 flavors on each of 2 neighbours
        assert_eq!(p.max_row_nonzeros(), 5);
    }

    #[test]
    fn density_and_gap_helpers() {
        let spec = [-2.0, -0.5, 0.5, 2.0];
        assert_eq!(density_of_modes(&spec, 0.0), 0);
        assert_eq!(density_of_modes(&spec, 0.5), 2);
        assert_eq!(density_of_modes(&spec, 2.0), 4);
        assert_eq!(spectral_gap(&spec), 0.5);
    }
}
