//! Brute-force Fock-space reference for at most 8 Majorana modes.
//!
//! Basis states are labelled by an integer whose bit `m` is the occupation of
//! complex mode `m`. Majoranas follow Jordan–Wigner:
//! `c_{2m} = Z_0 ⋯ Z_{m-1} X_m`, `c_{2m+1} = Z_0 ⋯ Z_{m-1} Y_m`, which makes
//! `a_m = (c_{2m} + i c_{2m+1})/2 = Z ⋯ Z |0⟩⟨1|_m`.

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::Serialize;

use crate::correlations::{evolve, gibbs_correlation, ground_state_correlation, CorrelationMatrix};
use crate::error::{invalid, Error, Result};
use crate::hamiltonian::{
    perturb, ssh_hopping, CouplingMatrix, PerturbationMode, PerturbationSpec,
};
use crate::lattice::LatticeSpec;
use crate::Scalar;

pub const MAX_MAJORANAS: usize = 8;
/// Many-body gap below which the ground state is considered degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

type C<T> = Complex<T>;

#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator<T: Scalar> {
    pub matrix: DMatrix<C<T>>,
}

impl<T: Scalar> FockOperator<T> {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .all(|z| z.norm_sqr() <= tol * tol)
    }
}

fn check_size(n_majoranas: usize) -> Result<()> {
    if n_majoranas == 0 || !n_majoranas.is_multiple_of(2) || n_majoranas > MAX_MAJORANAS {
        return Err(invalid(format!(
            "oracle handles an even number of Majoranas in [2, {MAX_MAJORANAS}], got {n_majoranas}"
        )));
    }
    Ok(())
}

/// Jordan–Wigner matrices of `c_0, …, c_{n-1}`.
pub fn represent_majoranas<T: Scalar>(n_majoranas: usize) -> Result<Vec<FockOperator<T>>> {
    check_size(n_majoranas)?;
    let modes = n_majoranas / 2;
    let dim = 1usize << modes;
    let one = C::new(T::one(), T::zero());
    let i = C::new(T::zero(), T::one());
    let mut out = Vec::with_capacity(n_majoranas);
    for m in 0..modes {
        let mut x = DMatrix::zeros(dim, dim);
        let mut y = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            let string = if (b & ((1 << m) - 1)).count_ones() % 2 == 0 {
                one
            } else {
                -one
            };
            let flipped = b ^ (1 << m);
            let occupied = b & (1 << m) != 0;
            x[(flipped, b)] = string;
            // Y|0⟩ = i|1⟩, Y|1⟩ = -i|0⟩
            y[(flipped, b)] = if occupied { -i * string } else { i * string };
        }
        out.push(FockOperator { matrix: x });
        out.push(FockOperator { matrix: y });
    }
    Ok(out)
}

/// Annihilation operators `a_m = (c_{2m} + i c_{2m+1})/2`.
pub fn annihilators<T: Scalar>(n_majoranas: usize) -> Result<Vec<FockOperator<T>>> {
    let c = represent_majoranas::<T>(n_majoranas)?;
    let half_i = C::new(T::zero(), T::lit(0.5));
    let half = C::new(T::lit(0.5), T::zero());
    Ok(c.chunks(2)
        .map(|p| FockOperator {
            matrix: &p[0].matrix * half + &p[1].matrix * half_i,
        })
        .collect())
}

/// Many-body `¼ Σ H̃_jk c_j c_k`.
pub fn many_body_hamiltonian<T: Scalar>(h: &CouplingMatrix<T>) -> Result<FockOperator<T>> {
    let c = represent_majoranas::<T>(h.n())?;
    let dim = c[0].dim();
    let mut m = DMatrix::zeros(dim, dim);
    for (j, k, coeff) in h.pair_coefficients() {
        m += (&c[j].matrix * &c[k].matrix) * coeff;
    }
    Ok(FockOperator { matrix: m })
}

/// `Σ_i t_i (a_i† a_{i+1} + h.c.)` on a ring, built directly from fermion operators.
pub fn ssh_hopping_hamiltonian<T: Scalar>(
    n_sites: usize,
    j_coupling: T,
) -> Result<FockOperator<T>> {
    let a = annihilators::<T>(2 * n_sites)?;
    let dim = a[0].dim();
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..n_sites {
        let next = (i + 1) % n_sites;
        let t = C::new(ssh_hopping(i, j_coupling), T::zero());
        let hop = a[i].matrix.adjoint() * &a[next].matrix;
        m += (&hop + hop.adjoint()) * t;
    }
    Ok(FockOperator { matrix: m })
}

/// Diagonal density matrix of a product state; bit `m` of `occupations` fills mode `m`.
pub fn product_density<T: Scalar>(
    n_majoranas: usize,
    occupations: &[bool],
) -> Result<FockOperator<T>> {
    check_size(n_majoranas)?;
    if occupations.len() != n_majoranas / 2 {
        return Err(Error::DimensionMismatch {
            expected: n_majoranas / 2,
            found: occupations.len(),
        });
    }
    let dim = 1usize << occupations.len();
    let index = occupations
        .iter()
        .enumerate()
        .fold(0, |acc, (m, &o)| if o { acc | (1 << m) } else { acc });
    let mut rho = DMatrix::zeros(dim, dim);
    rho[(index, index)] = C::new(T::one(), T::zero());
    Ok(FockOperator { matrix: rho })
}

/// `Γ_jk = ½ Tr(ρ [c_j, c_k])` for a density matrix `ρ`.
pub fn correlation_of_density<T: Scalar>(
    rho: &FockOperator<T>,
    n_majoranas: usize,
) -> Result<CorrelationMatrix<T>> {
    let c = represent_majoranas::<T>(n_majoranas)?;
    if rho.dim() != c[0].dim() {
        return Err(Error::DimensionMismatch {
            expected: c[0].dim(),
            found: rho.dim(),
        });
    }
    let mut g = DMatrix::zeros(n_majoranas, n_majoranas);
    let tol = T::lit(1e-10);
    for j in 0..n_majoranas {
        for k in (j + 1)..n_majoranas {
            // [c_j, c_k] = 2 c_j c_k for j ≠ k
            let v = (&rho.matrix * &c[j].matrix * &c[k].matrix).trace();
            if v.re.abs() > tol {
                return Err(Error::Convention(format!(
                    "Γ_{j}{k} has real part {}",
                    v.re
                )));
            }
            g[(j, k)] = v.im;
            g[(k, j)] = -v.im;
        }
    }
    Ok(CorrelationMatrix::from_raw(g))
}

struct ManyBodySpectrum<T: Scalar> {
    energies: Vec<T>,
    vectors: DMatrix<C<T>>,
}

fn diagonalize<T: Scalar>(op: &FockOperator<T>) -> ManyBodySpectrum<T> {
    let eig = op.matrix.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let energies = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(op.dim(), op.dim(), |r, c| eig.eigenvectors[(r, order[c])]);
    ManyBodySpectrum { energies, vectors }
}

/// Exact ground-state correlation matrix. A many-body gap below
/// [`DEGENERACY_TOL`] is refused.
pub fn exact_ground_correlation<T: Scalar>(h: &CouplingMatrix<T>) -> Result<CorrelationMatrix<T>> {
    let op = many_body_hamiltonian(h)?;
    let spec = diagonalize(&op);
    let gap = spec.energies[1] - spec.energies[0];
    if gap < T::lit(DEGENERACY_TOL) {
        return Err(Error::Degenerate {
            gap: gap.as_f64(),
            tol: DEGENERACY_TOL,
        });
    }
    let psi = spec.vectors.column(0);
    let rho = psi * psi.adjoint();
    correlation_of_density(&FockOperator { matrix: rho }, h.n())
}

/// Exact thermal correlation matrix of `e^{-βĤ}/Z`.
pub fn exact_gibbs_correlation<T: Scalar>(
    h: &CouplingMatrix<T>,
    beta: T,
) -> Result<CorrelationMatrix<T>> {
    let op = many_body_hamiltonian(h)?;
    let spec = diagonalize(&op);
    let e0 = spec.energies[0];
    let weights: Vec<T> = spec
        .energies
        .iter()
        .map(|&e| (-(beta * (e - e0))).exp())
        .collect();
    let z = weights.iter().fold(T::zero(), |a, &w| a + w);
    let mut scaled = spec.vectors.clone();
    for (mut col, &w) in scaled.column_iter_mut().zip(&weights) {
        col *= C::new(w / z, T::zero());
    }
    let rho = scaled * spec.vectors.adjoint();
    correlation_of_density(&FockOperator { matrix: rho }, h.n())
}

/// Exact correlation matrix of `e^{-iĤt} ρ₀ e^{iĤt}`.
pub fn exact_evolved_correlation<T: Scalar>(
    rho0: &FockOperator<T>,
    h: &CouplingMatrix<T>,
    t: T,
) -> Result<CorrelationMatrix<T>> {
    let op = many_body_hamiltonian(h)?;
    if rho0.dim() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            found: rho0.dim(),
        });
    }
    let spec = diagonalize(&op);
    let mut u = spec.vectors.clone();
    for (mut col, &e) in u.column_iter_mut().zip(&spec.energies) {
        let phase = -(e * t);
        col *= C::new(phase.cos(), phase.sin());
    }
    let propagator = u * spec.vectors.adjoint();
    let rho = &propagator * &rho0.matrix * propagator.adjoint();
    correlation_of_density(&FockOperator { matrix: rho }, h.n())
}

/// Largest entrywise deviation between single-particle and Fock-space
/// correlation matrices for one random Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheck {
    pub instance: u64,
    pub n_majoranas: usize,
    pub ground: f64,
    pub gibbs: f64,
    pub dynamics: f64,
}

impl CrossCheck {
    pub fn max_deviation(&self) -> f64 {
        self.ground.max(self.gibbs).max(self.dynamics)
    }
}

/// Chain Hamiltonian on 2 to 4 sites with every nearest-neighbour and
/// on-site coupling uniform in `[-1, 1]`.
pub fn random_local_hamiltonian(seed: u64, instance: u64) -> Result<CouplingMatrix<f64>> {
    let lattice = LatticeSpec::chain(2 + (instance % 3) as usize)?;
    perturb(
        &CouplingMatrix::zeros(lattice, 0.0),
        &PerturbationSpec::new(1.0, PerturbationMode::AllLocalTerms, seed, instance),
    )
}

/// Compares ground state, Gibbs state at `beta` and the evolution of an
/// alternating product state to time `t` on `count` random Hamiltonians.
pub fn cross_check(count: u64, seed: u64, beta: f64, t: f64) -> Result<Vec<CrossCheck>> {
    let diff = |a: &CorrelationMatrix<f64>, b: &CorrelationMatrix<f64>| {
        (a.antisymmetric() - b.antisymmetric()).amax()
    };
    (0..count)
        .map(|instance| {
            let h = random_local_hamiltonian(seed, instance)?;
            let n = h.n();
            let occupations: Vec<bool> = (0..n / 2).map(|m| m % 2 == 0).collect();
            let ground = diff(
                &exact_ground_correlation(&h)?,
                &ground_state_correlation(&h)?,
            );
            let gibbs = diff(
                &exact_gibbs_correlation(&h, beta)?,
                &gibbs_correlation(&h, beta)?,
            );
            let rho0 = product_density(n, &occupations)?;
            let evolved = evolve(&CorrelationMatrix::product_state(&occupations), &h, t)?;
            let dynamics = diff(&exact_evolved_correlation(&rho0, &h, t)?, &evolved);
            Ok(CrossCheck {
                instance,
                n_majoranas: n,
                ground,
                gibbs,
                dynamics,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::build_ssh;
    use crate::lattice::LatticeSpec;

    #[test]
    fn clifford_algebra() {
        for n in [2, 4, 8] {
            let c = represent_majoranas::<f64>(n).unwrap();
            let id = DMatrix::<C<f64>>::identity(c[0].dim(), c[0].dim());
            for j in 0..n {
                for k in 0..n {
                    let anti = &c[j].matrix * &c[k].matrix + &c[k].matrix * &c[j].matrix;
                    let expected = if j == k {
                        &id * C::new(2.0, 0.0)
                    } else {
                        &id * C::new(0.0, 0.0)
                    };
                    assert!((anti - expected).iter().all(|z| z.norm() < 1e-14));
                }
                assert!(c[j].is_hermitian(1e-15));
            }
        }
    }

    #[test]
    fn parity_string_squares_to_plus_or_minus_one() {
        let c = represent_majoranas::<f64>(6).unwrap();
        let prod = c
            .iter()
            .skip(1)
            .fold(c[0].matrix.clone(), |acc, op| acc * &op.matrix);
        let sq = &prod * &prod;
        // (c_0 ⋯ c_{n-1})² = (-1)^{n(n-1)/2}, and n = 6 gives -1
        let id = DMatrix::<C<f64>>::identity(8, 8);
        assert!((sq + id).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn size_cap() {
        assert!(represent_majoranas::<f64>(10).is_err());
        assert!(represent_majoranas::<f64>(3).is_err());
    }

    #[test]
    fn zero_hamiltonian_is_degenerate() {
        let h = CouplingMatrix::<f64>::zeros(LatticeSpec::chain(2).unwrap(), 1.0);
        assert!(matches!(
            exact_ground_correlation(&h),
            Err(Error::Degenerate { .. })
        ));
    }

    #[test]
    fn ssh_mapping_matches_hopping_operators() {
        for j in [0.0, 0.5, 1.3] {
            let h = build_ssh::<f64>(4, j).unwrap();
            let quad = many_body_hamiltonian(&h).unwrap();
            let hop = ssh_hopping_hamiltonian::<f64>(4, j).unwrap();
            assert!((quad.matrix - hop.matrix).iter().all(|z| z.norm() < 1e-13));
        }
    }
}
