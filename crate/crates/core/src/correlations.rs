//! Gaussian states as Majorana correlation matrices.
//!
//! `Γ_jk = ½⟨[c_j, c_k]⟩` is Hermitian and purely imaginary, so it is stored
//! as the real antisymmetric `G` with `Γ = iG`.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::hamiltonian::CouplingMatrix;
use crate::linalg::{self, BlockSpectrum};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix<T: Scalar> {
    g: DMatrix<T>,
}

impl<T: Scalar> CorrelationMatrix<T> {
    /// Wraps a real antisymmetric `G`; checks antisymmetry and `‖Γ‖ ≤ 1`.
    pub fn from_antisymmetric(g: DMatrix<T>) -> Result<Self> {
        let n = g.nrows();
        if g.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: g.ncols(),
            });
        }
        let scale = g.amax().max(T::one());
        let tol = T::lit(1e-10).max(T::lit(64.0) * T::eps()) * scale;
        for k in 0..n {
            for j in 0..=k {
                if (g[(j, k)] + g[(k, j)]).abs() > tol {
                    return Err(Error::Convention(format!(
                        "correlation entry ({j},{k}) breaks antisymmetry"
                    )));
                }
            }
        }
        let c = Self { g };
        let norm = c.operator_norm();
        if norm > T::one() + tol {
            return Err(Error::Convention(format!(
                "correlation matrix has norm {norm} > 1"
            )));
        }
        Ok(c)
    }

    pub(crate) fn from_raw(g: DMatrix<T>) -> Self {
        Self { g }
    }

    /// `Γ = 0`, the maximally mixed state.
    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            g: DMatrix::zeros(n, n),
        }
    }

    /// Product state with the given occupation of each complex mode
    /// `a_m = (c_{2m} + i c_{2m+1})/2`.
    pub fn product_state(occupations: &[bool]) -> Self {
        let n = 2 * occupations.len();
        let mut g = DMatrix::zeros(n, n);
        for (m, &occ) in occupations.iter().enumerate() {
            // ½⟨[c_{2m}, c_{2m+1}]⟩ = i(1 - 2 n_m)
            let v = if occ { -T::one() } else { T::one() };
            g[(2 * m, 2 * m + 1)] = v;
            g[(2 * m + 1, 2 * m)] = -v;
        }
        Self { g }
    }

    /// Every complex mode empty.
    pub fn vacuum(n_majoranas: usize) -> Result<Self> {
        if !n_majoranas.is_multiple_of(2) {
            return Err(invalid(format!(
                "vacuum needs an even Majorana count, got {n_majoranas}"
            )));
        }
        Ok(Self::product_state(&vec![false; n_majoranas / 2]))
    }

    pub fn n(&self) -> usize {
        self.g.nrows()
    }

    /// The real antisymmetric `G` with `Γ = iG`.
    pub fn antisymmetric(&self) -> &DMatrix<T> {
        &self.g
    }

    pub fn into_antisymmetric(self) -> DMatrix<T> {
        self.g
    }

    pub fn hermitian(&self) -> DMatrix<Complex<T>> {
        self.g.map(|x| Complex::new(T::zero(), x))
    }

    pub fn operator_norm(&self) -> T {
        linalg::operator_norm(&self.g)
    }

    /// `‖Γ² - 1‖`, zero for pure states.
    pub fn purity_defect(&self) -> T {
        let n = self.n();
        // Γ² = -G²
        linalg::operator_norm(&(-(&self.g * &self.g) - DMatrix::identity(n, n)))
    }
}

/// Threshold below which an eigenfrequency counts as a zero mode.
pub fn zero_mode_tolerance<T: Scalar>(spectral_radius: T) -> T {
    T::lit(1e-12).max(T::lit(64.0) * T::eps()) * spectral_radius
}

/// Fixed scale `s = r·J` for which `‖H̃/s‖ ≤ 1 ≤ π/2`, from the coupling
/// pattern alone so that one `s` serves a model and all its perturbations.
pub fn normalization_scale<T: Scalar>(h: &CouplingMatrix<T>) -> T {
    T::from_count(h.max_row_nonzeros()) * h.coupling_bound()
}

/// `(H̃/s, s)` with `s` from [`normalization_scale`].
pub fn normalize<T: Scalar>(h: &CouplingMatrix<T>) -> Result<(CouplingMatrix<T>, T)> {
    let s = normalization_scale(h);
    if s == T::zero() {
        return Err(invalid("cannot normalize a zero coupling matrix"));
    }
    Ok((h.scaled(s), s))
}

/// Ground state with the number of zero modes that were mapped to `sign(0) = 0`.
#[derive(Debug, Clone)]
pub struct GroundState<T: Scalar> {
    pub gamma: CorrelationMatrix<T>,
    pub zero_modes: usize,
}

pub fn ground_state_from_spectrum<T: Scalar>(spectrum: &BlockSpectrum<T>) -> GroundState<T> {
    let tol = zero_mode_tolerance(spectrum.spectral_radius());
    let sign = move |x: T| {
        if x.abs() <= tol {
            T::zero()
        } else if x > T::zero() {
            T::one()
        } else {
            -T::one()
        }
    };
    let zero_modes = spectrum
        .eigenvalues()
        .iter()
        .filter(|x| x.abs() <= tol)
        .count();
    GroundState {
        gamma: CorrelationMatrix::from_raw(spectrum.odd_function(sign)),
        zero_modes,
    }
}

/// `Γ = sign(H̃)` with diagnostics.
pub fn ground_state<T: Scalar>(h: &CouplingMatrix<T>) -> Result<GroundState<T>> {
    Ok(ground_state_from_spectrum(&h.spectrum()?))
}

/// `Γ = sign(H̃)`.
pub fn ground_state_correlation<T: Scalar>(h: &CouplingMatrix<T>) -> Result<CorrelationMatrix<T>> {
    Ok(ground_state(h)?.gamma)
}

pub fn gibbs_from_spectrum<T: Scalar>(
    spectrum: &BlockSpectrum<T>,
    beta: T,
) -> CorrelationMatrix<T> {
    let half_beta = beta * T::lit(0.5);
    CorrelationMatrix::from_raw(spectrum.odd_function(move |x| (half_beta * x).tanh()))
}

/// Thermal state `e^{-βĤ}/Z`: `Γ = tanh(βH̃/2)`.
pub fn gibbs_correlation<T: Scalar>(
    h: &CouplingMatrix<T>,
    beta: T,
) -> Result<CorrelationMatrix<T>> {
    if !(beta >= T::zero()) {
        return Err(invalid(format!(
            "inverse temperature must be >= 0, got {beta}"
        )));
    }
    if beta == T::zero() {
        return Ok(CorrelationMatrix::maximally_mixed(h.n()));
    }
    Ok(gibbs_from_spectrum(&h.spectrum()?, beta))
}

/// `R Γ Rᵀ` for an orthogonal single-particle propagator `R`.
pub fn conjugate<T: Scalar>(
    gamma: &CorrelationMatrix<T>,
    r: &DMatrix<T>,
) -> Result<CorrelationMatrix<T>> {
    if r.nrows() != gamma.n() {
        return Err(Error::DimensionMismatch {
            expected: gamma.n(),
            found: r.nrows(),
        });
    }
    Ok(CorrelationMatrix::from_raw(r * &gamma.g * r.transpose()))
}

/// State after evolving for time `t` under `H`: `Γ(t) = R Γ₀ Rᵀ`, `R = e^{At}`.
pub fn evolve<T: Scalar>(
    gamma0: &CorrelationMatrix<T>,
    h: &CouplingMatrix<T>,
    t: T,
) -> Result<CorrelationMatrix<T>> {
    if gamma0.n() != h.n() {
        return Err(Error::DimensionMismatch {
            expected: h.n(),
            found: gamma0.n(),
        });
    }
    if t == T::zero() {
        return Ok(gamma0.clone());
    }
    conjugate(gamma0, &h.spectrum()?.propagator(t))
}

/// Piecewise-constant evolution along `path(s)`, `s ∈ [0, 1]`, for total time
/// `total_time`: step `k` applies the exact propagator of `path((k + ½)/steps)`
/// for `total_time / steps`.
pub fn evolve_schedule<T, F>(
    gamma0: &CorrelationMatrix<T>,
    path: F,
    total_time: T,
    steps: usize,
) -> Result<CorrelationMatrix<T>>
where
    T: Scalar,
    F: Fn(T) -> Result<CouplingMatrix<T>>,
{
    if steps == 0 {
        return Err(invalid("schedule needs at least one step"));
    }
    let dt = total_time / T::from_count(steps);
    let mut g = gamma0.g.clone();
    for k in 0..steps {
        let s = (T::from_count(k) + T::lit(0.5)) / T::from_count(steps);
        let h = path(s)?;
        if h.n() != g.nrows() {
            return Err(Error::DimensionMismatch {
                expected: g.nrows(),
                found: h.n(),
            });
        }
        let r = h.spectrum()?.propagator(dt);
        g = &r * g * r.transpose();
    }
    Ok(CorrelationMatrix::from_raw(g))
}

/// A set of disjoint Majorana pairs `(p, q)` with couplings affine in the
/// schedule parameter: `A_pq(s) = base + s·slope`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairLayer<T: Scalar> {
    pairs: Vec<(usize, usize, T, T)>,
}

impl<T: Scalar> PairLayer<T> {
    pub fn new(pairs: Vec<(usize, usize, T, T)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for &(p, q, _, _) in &pairs {
            if p == q || !seen.insert(p) || !seen.insert(q) {
                return Err(invalid(format!(
                    "pair ({p}, {q}) overlaps another pair of the layer"
                )));
            }
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize, T, T)] {
        &self.pairs
    }

    /// Adds the layer's couplings at parameter `s` into `a`.
    pub fn accumulate(&self, a: &mut DMatrix<T>, s: T) {
        for &(p, q, base, slope) in &self.pairs {
            let v = base + s * slope;
            a[(p, q)] += v;
            a[(q, p)] -= v;
        }
    }

    fn is_static(&self) -> bool {
        self.pairs.iter().all(|p| p.3 == T::zero())
    }

    /// Pairs restricted to the modes in `local` (global index -> local index).
    fn restrict(&self, local: &[usize]) -> Self {
        let pairs = self
            .pairs
            .iter()
            .filter(|&&(p, _, _, _)| local[p] != usize::MAX)
            .map(|&(p, q, b, sl)| (local[p], local[q], b, sl))
            .collect();
        Self { pairs }
    }

    fn rotations(&self, s: T, tau: T, out: &mut Vec<(usize, usize, T, T)>) {
        out.clear();
        out.extend(self.pairs.iter().map(|&(p, q, base, slope)| {
            let theta = (base + s * slope) * tau;
            (p, q, theta.cos(), theta.sin())
        }));
    }
}

/// `G ← R G Rᵀ` where `R` is a product of commuting plane rotations
/// `(p, q, cos θ, sin θ)` on disjoint index pairs.
fn apply_rotations<T: Scalar>(g: &mut DMatrix<T>, rot: &[(usize, usize, T, T)]) {
    let n = g.nrows();
    let data = g.as_mut_slice();
    // G Rᵀ mixes columns p and q
    for &(p, q, c, sn) in rot {
        let (lo, hi, c, sn) = if p < q { (p, q, c, sn) } else { (q, p, c, -sn) };
        let (left, right) = data.split_at_mut(hi * n);
        let col_lo = &mut left[lo * n..lo * n + n];
        let col_hi = &mut right[..n];
        for (a, b) in col_lo.iter_mut().zip(col_hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = c * x + sn * y;
            *b = c * y - sn * x;
        }
    }
    // R (G Rᵀ) mixes rows p and q of every column
    for col in data.chunks_exact_mut(n) {
        for &(p, q, c, sn) in rot {
            let (x, y) = (col[p], col[q]);
            col[p] = c * x + sn * y;
            col[q] = c * y - sn * x;
        }
    }
}

fn split_schedule_block<T: Scalar>(
    g: &mut DMatrix<T>,
    layers: &[PairLayer<T>],
    total_time: T,
    steps: usize,
) {
    let dt = total_time / T::from_count(steps);
    let half = dt * T::lit(0.5);
    let midpoint = |k: usize| (T::from_count(k) + T::lit(0.5)) / T::from_count(steps);
    let mut rot = Vec::new();
    let mut step = |g: &mut DMatrix<T>, layer: &PairLayer<T>, s: T, tau: T| {
        layer.rotations(s, tau, &mut rot);
        apply_rotations(g, &rot);
    };
    let (first, rest) = layers.split_first().expect("nonempty");
    let Some((last, middle)) = rest.split_last() else {
        for k in 0..steps {
            step(g, first, midpoint(k), dt);
        }
        return;
    };
    // a static outer layer lets consecutive half steps fuse into one
    let fused = first.is_static();
    if fused {
        step(g, first, T::zero(), half);
    }
    for k in 0..steps {
        let s = midpoint(k);
        if !fused {
            step(g, first, s, half);
        }
        for l in middle {
            step(g, l, s, half);
        }
        step(g, last, s, dt);
        for l in middle.iter().rev() {
            step(g, l, s, half);
        }
        let closing = if fused && k + 1 < steps { dt } else { half };
        step(g, first, s, closing);
    }
}

/// Symmetric (Strang) splitting of the schedule `A(s) = Σ_l A_l(s)`:
/// each step applies `L_1(dt/2) ⋯ L_{k-1}(dt/2) L_k(dt) L_{k-1}(dt/2) ⋯ L_1(dt/2)`
/// with every layer evaluated at the step midpoint. Second order in `dt`.
///
/// Modes that are coupled neither by a layer nor by `Γ₀` are evolved as
/// independent blocks.
pub fn evolve_split_schedule<T: Scalar>(
    gamma0: &CorrelationMatrix<T>,
    layers: &[PairLayer<T>],
    total_time: T,
    steps: usize,
) -> Result<CorrelationMatrix<T>> {
    if steps == 0 || layers.is_empty() {
        return Err(invalid(
            "split schedule needs at least one step and one layer",
        ));
    }
    let n = gamma0.n();
    if let Some(&(p, q, _, _)) = layers
        .iter()
        .flat_map(|l| l.pairs.iter())
        .find(|(p, q, _, _)| *p >= n || *q >= n)
    {
        return Err(invalid(format!("pair ({p}, {q}) outside {n} modes")));
    }
    let mut pattern = gamma0
        .g
        .map(|x| if x != T::zero() { T::one() } else { T::zero() });
    for &(p, q, _, _) in layers.iter().flat_map(|l| l.pairs.iter()) {
        pattern[(p, q)] = T::one();
        pattern[(q, p)] = T::one();
    }
    let mut out = gamma0.g.clone();
    for modes in linalg::coupled_components(&pattern) {
        if modes.len() == 1 {
            continue;
        }
        let mut local = vec![usize::MAX; n];
        for (i, &m) in modes.iter().enumerate() {
            local[m] = i;
        }
        let block_layers: Vec<PairLayer<T>> = layers.iter().map(|l| l.restrict(&local)).collect();
        let mut g = DMatrix::from_fn(modes.len(), modes.len(), |j, k| {
            gamma0.g[(modes[j], modes[k])]
        });
        split_schedule_block(&mut g, &block_layers, total_time, steps);
        for (jj, &j) in modes.iter().enumerate() {
            for (kk, &k) in modes.iter().enumerate() {
                out[(j, k)] = g[(jj, kk)];
            }
        }
    }
    Ok(CorrelationMatrix::from_raw(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_quadratic, build_ssh, Term};
    use crate::lattice::LatticeSpec;

    #[test]
    fn two_level_block_is_its_own_sign() {
        let lat = LatticeSpec::chain(4).unwrap();
        let h = build_quadratic(lat, 1.0, &[Term::imaginary(vec![0], vec![0], 1, 2, 1.0)]).unwrap();
        let gs = ground_state(&h).unwrap();
        // the 6 untouched Majoranas are zero modes
        assert_eq!(gs.zero_modes, 6);
        assert!((gs.gamma.antisymmetric()[(0, 1)] - 1.0f64).abs() < 1e-15);
    }

    #[test]
    fn gapped_ground_state_is_pure() {
        let h = build_ssh::<f64>(12, 0.5).unwrap();
        let gs = ground_state(&h).unwrap();
        assert_eq!(gs.zero_modes, 0);
        assert!(gs.gamma.purity_defect() < 1e-10);
        CorrelationMatrix::from_antisymmetric(gs.gamma.into_antisymmetric()).unwrap();
    }

    #[test]
    fn normalization_keeps_sign_and_bounds_norm() {
        let h = build_ssh::<f64>(20, 1.0).unwrap();
        let (hn, s) = normalize(&h).unwrap();
        assert_eq!(s, 2.0);
        assert!(linalg::operator_norm(hn.antisymmetric()) <= std::f64::consts::FRAC_PI_2);
        let g1 = ground_state_correlation(&build_ssh::<f64>(20, 0.7).unwrap()).unwrap();
        let g2 = ground_state_correlation(&build_ssh::<f64>(20, 0.7).unwrap().scaled(3.0)).unwrap();
        assert!(linalg::operator_norm(&(g1.antisymmetric() - g2.antisymmetric())) < 1e-12);
    }

    #[test]
    fn zero_beta_is_maximally_mixed() {
        let h = build_ssh::<f64>(8, 1.2).unwrap();
        let g = gibbs_correlation(&h, 0.0).unwrap();
        assert!(g.antisymmetric().iter().all(|&x| x == 0.0));
        assert!(gibbs_correlation(&h, -1.0).is_err());
    }

    #[test]
    fn stationary_states_do_not_evolve() {
        let h = build_ssh::<f64>(10, 0.6).unwrap();
        let g0 = ground_state_correlation(&h).unwrap();
        let gt = evolve(&g0, &h, 2.5).unwrap();
        assert!(linalg::operator_norm(&(gt.antisymmetric() - g0.antisymmetric())) < 1e-12);
    }

    #[test]
    fn constant_schedule_matches_evolve() {
        let h = build_ssh::<f64>(8, 0.4).unwrap();
        let g0 = CorrelationMatrix::vacuum(16).unwrap();
        let direct = evolve(&g0, &h, 1.7).unwrap();
        let stepped = evolve_schedule(&g0, |_| Ok(h.clone()), 1.7, 9).unwrap();
        assert!(linalg::operator_norm(&(direct.antisymmetric() - stepped.antisymmetric())) < 1e-10);
    }

    #[test]
    fn split_schedule_converges_to_exact() {
        use crate::hamiltonian::ssh_layers;
        let n_sites = 6;
        let lattice = LatticeSpec::chain(n_sites).unwrap();
        let layers = ssh_layers::<f64>(n_sites, &DMatrix::zeros(12, 12));
        let path = |s: f64| {
            let mut a = DMatrix::zeros(12, 12);
            for l in &layers {
                l.accumulate(&mut a, s);
            }
            CouplingMatrix::from_antisymmetric(lattice, a, 1.0)
        };
        let g0 = CorrelationMatrix::product_state(&[true, false, true, false, false, true]);
        let exact = evolve_schedule(&g0, path, 2.0, 4000).unwrap();
        let coarse = evolve_split_schedule(&g0, &layers, 2.0, 100).unwrap();
        let fine = evolve_split_schedule(&g0, &layers, 2.0, 200).unwrap();
        let e1 = (coarse.antisymmetric() - exact.antisymmetric()).amax();
        let e2 = (fine.antisymmetric() - exact.antisymmetric()).amax();
        assert!(e2 < 1e-3 && e2 < 0.3 * e1, "{e1} {e2}");
        assert!(PairLayer::new(vec![(0, 1, 1.0, 0.0), (1, 2, 1.0, 0.0)]).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        let bad = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, -2.0, 0.0]);
        assert!(CorrelationMatrix::from_antisymmetric(bad).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]);
        assert!(CorrelationMatrix::from_antisymmetric(asym).is_err());
        assert!(CorrelationMatrix::<f64>::vacuum(3).is_err());
    }
}
