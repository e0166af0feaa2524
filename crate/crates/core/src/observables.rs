//! Quadratic observables `Ô = ¼ Σ Õ_jk c_j c_k + offset` and their expectations.
//!
//! As with Hamiltonians `Õ = iP` is stored through its real antisymmetric
//! part `P`. Against `Γ = iG` the expectation is `-¼ Σ_jk P_jk G_jk + offset`.

use std::collections::BTreeSet;

use nalgebra::DMatrix;

use crate::correlations::CorrelationMatrix;
use crate::error::{invalid, Error, Result};
use crate::hamiltonian::CouplingMatrix;
use crate::lattice::LatticeSpec;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableKind {
    Local,
    TranslationAveraged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticObservable<T: Scalar> {
    coeffs: DMatrix<T>,
    offset: T,
    lattice: LatticeSpec,
    support: Vec<usize>,
    kind: ObservableKind,
    base: Option<Box<QuadraticObservable<T>>>,
}

impl<T: Scalar> QuadraticObservable<T> {
    /// Local observable from a real antisymmetric `P`; the support is the set
    /// of sites touched by nonzero entries.
    pub fn local(lattice: LatticeSpec, coeffs: DMatrix<T>, offset: T) -> Result<Self> {
        let n = lattice.n_majoranas();
        if coeffs.nrows() != n || coeffs.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: coeffs.nrows(),
            });
        }
        let flavors = lattice.flavors();
        let mut sites = BTreeSet::new();
        for k in 0..n {
            for j in 0..n {
                let v = coeffs[(j, k)];
                if v != -coeffs[(k, j)] {
                    return Err(Error::Convention(format!(
                        "observable entries ({j},{k}) are not antisymmetric"
                    )));
                }
                if v != T::zero() {
                    sites.insert(j / flavors);
                    sites.insert(k / flavors);
                }
            }
        }
        Ok(Self {
            coeffs,
            offset,
            lattice,
            support: sites.into_iter().collect(),
            kind: ObservableKind::Local,
            base: None,
        })
    }

    /// Occupation `a†a` of complex mode `m` of site `site` (flavors `2m+1`, `2m+2`).
    pub fn number(lattice: LatticeSpec, site: &[usize], mode: usize) -> Result<Self> {
        if mode >= lattice.modes_per_site {
            return Err(invalid(format!(
                "site has {} complex modes, asked for {mode}",
                lattice.modes_per_site
            )));
        }
        let j = lattice.mode_index(site, 2 * mode + 1)?;
        let n = lattice.n_majoranas();
        let mut p = DMatrix::zeros(n, n);
        // a†a - ½ = (i/2) c¹ c²
        p[(j, j + 1)] = T::one();
        p[(j + 1, j)] = -T::one();
        Self::local(lattice, p, T::lit(0.5))
    }

    /// Elementary observable `(i/2) c_j c_k` whose expectation is `-½ G_jk`.
    pub fn majorana_pair(lattice: LatticeSpec, j: usize, k: usize) -> Result<Self> {
        let n = lattice.n_majoranas();
        if j >= n || k >= n || j == k {
            return Err(invalid(format!(
                "need two distinct modes below {n}, got {j}, {k}"
            )));
        }
        let mut p = DMatrix::zeros(n, n);
        p[(j, k)] = T::one();
        p[(k, j)] = -T::one();
        Self::local(lattice, p, T::zero())
    }

    /// Particle current `i(a_x† a_y − a_y† a_x)` between complex mode `mode`
    /// of sites `x` and `y`.
    pub fn bond_current(
        lattice: LatticeSpec,
        x: &[usize],
        y: &[usize],
        mode: usize,
    ) -> Result<Self> {
        if mode >= lattice.modes_per_site {
            return Err(invalid(format!(
                "site has {} complex modes, asked for {mode}",
                lattice.modes_per_site
            )));
        }
        let jx = lattice.mode_index(x, 2 * mode + 1)?;
        let jy = lattice.mode_index(y, 2 * mode + 1)?;
        if jx == jy {
            return Err(invalid("bond current needs two distinct sites"));
        }
        let n = lattice.n_majoranas();
        let mut p = DMatrix::zeros(n, n);
        // = (i/2)(c¹_x c¹_y + c²_x c²_y)
        for f in 0..2 {
            p[(jx + f, jy + f)] = T::one();
            p[(jy + f, jx + f)] = -T::one();
        }
        Self::local(lattice, p, T::zero())
    }

    /// The Hamiltonian itself as an observable.
    pub fn from_hamiltonian(h: &CouplingMatrix<T>) -> Result<Self> {
        Self::local(*h.lattice(), h.antisymmetric().clone(), T::zero())
    }

    pub fn coeffs(&self) -> &DMatrix<T> {
        &self.coeffs
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn kind(&self) -> ObservableKind {
        self.kind
    }

    /// Generating local term of a translation average.
    pub fn base(&self) -> Option<&QuadraticObservable<T>> {
        self.base.as_deref()
    }

    /// `k = |S|`: support size of the local term.
    pub fn locality(&self) -> usize {
        match &self.base {
            Some(b) => b.support.len(),
            None => self.support.len(),
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Result<Self> {
        if self.lattice != other.lattice {
            return Err(invalid("observables live on different lattices"));
        }
        let mut out = Self::local(
            self.lattice,
            &self.coeffs * a + &other.coeffs * b,
            self.offset * a + other.offset * b,
        )?;
        if self.kind == ObservableKind::TranslationAveraged
            && other.kind == ObservableKind::TranslationAveraged
        {
            out.kind = ObservableKind::TranslationAveraged;
        }
        Ok(out)
    }
}

/// `⟨Ô⟩ = -¼ Tr(Õ Γ) + offset`.
pub fn expectation<T: Scalar>(
    gamma: &CorrelationMatrix<T>,
    obs: &QuadraticObservable<T>,
) -> Result<T> {
    let g = gamma.antisymmetric();
    if g.nrows() != obs.coeffs.nrows() {
        return Err(Error::DimensionMismatch {
            expected: obs.coeffs.nrows(),
            found: g.nrows(),
        });
    }
    Ok(-T::lit(0.25) * obs.coeffs.dot(g) + obs.offset)
}

/// `⟨Ĥ⟩ / n_sites` for the ideal Hamiltonian.
pub fn energy_density<T: Scalar>(
    h_ideal: &CouplingMatrix<T>,
    gamma: &CorrelationMatrix<T>,
) -> Result<T> {
    let g = gamma.antisymmetric();
    if g.nrows() != h_ideal.n() {
        return Err(Error::DimensionMismatch {
            expected: h_ideal.n(),
            found: g.nrows(),
        });
    }
    Ok(-T::lit(0.25) * h_ideal.antisymmetric().dot(g) / T::from_count(h_ideal.lattice().n_sites()))
}

/// `Σ|w_i| = 1` combination, expanded into a single coefficient matrix.
pub fn weighted_average<T: Scalar>(
    terms: &[(T, QuadraticObservable<T>)],
) -> Result<QuadraticObservable<T>> {
    let first = terms
        .first()
        .ok_or_else(|| invalid("weighted average of no observables"))?;
    let total = terms.iter().fold(T::zero(), |acc, (w, _)| acc + w.abs());
    if (total - T::one()).abs() > T::lit(1e-12).max(T::lit(16.0) * T::eps()) {
        return Err(invalid(format!(
            "weights must satisfy sum |w_i| = 1, got {total}"
        )));
    }
    let mut acc = first.1.clone();
    acc.coeffs *= first.0;
    acc.offset *= first.0;
    acc.base = None;
    for (w, o) in &terms[1..] {
        acc = acc.combine(T::one(), o, *w)?;
    }
    if terms
        .iter()
        .all(|(_, o)| o.kind == ObservableKind::TranslationAveraged)
    {
        acc.kind = ObservableKind::TranslationAveraged;
    }
    Ok(acc)
}

/// Shifts every site of the observable by `v` (mod `L`).
pub fn translate<T: Scalar>(
    obs: &QuadraticObservable<T>,
    v: &[usize],
) -> Result<QuadraticObservable<T>> {
    let lat = obs.lattice;
    if v.len() != lat.dim {
        return Err(invalid(format!(
            "shift {v:?} has {} axes, lattice has {}",
            v.len(),
            lat.dim
        )));
    }
    let perm = lat.shift_permutation(v);
    let n = perm.len();
    let mut p = DMatrix::zeros(n, n);
    for k in 0..n {
        for j in 0..n {
            p[(perm[j], perm[k])] = obs.coeffs[(j, k)];
        }
    }
    let support = {
        let mut s: Vec<usize> = obs
            .support
            .iter()
            .map(|&site| {
                let y = lat.translate(&lat.site_coords(site), v);
                y.iter().fold(0, |acc, &c| acc * lat.size + c)
            })
            .collect();
        s.sort_unstable();
        s
    };
    Ok(QuadraticObservable {
        coeffs: p,
        offset: obs.offset,
        lattice: lat,
        support,
        kind: obs.kind,
        base: obs.base.clone(),
    })
}

/// Largest, over axes, length of the shortest periodic arc covering the
/// support's coordinates along that axis.
fn support_extent(lat: &LatticeSpec, support: &[usize]) -> usize {
    (0..lat.dim)
        .map(|axis| {
            let mut c: Vec<usize> = support.iter().map(|&s| lat.site_coords(s)[axis]).collect();
            c.sort_unstable();
            c.dedup();
            if c.len() <= 1 {
                return 0;
            }
            let wrap_gap = c[0] + lat.size - c[c.len() - 1];
            let max_gap = c
                .windows(2)
                .map(|w| w[1] - w[0])
                .max()
                .unwrap_or(0)
                .max(wrap_gap);
            lat.size - max_gap
        })
        .max()
        .unwrap_or(0)
}

/// `(1/n_sites) Σ_x τ_x(O₀)`.
pub fn translation_average<T: Scalar>(
    base: &QuadraticObservable<T>,
) -> Result<QuadraticObservable<T>> {
    if base.kind != ObservableKind::Local {
        return Err(invalid("translation average needs a local generating term"));
    }
    let lat = base.lattice;
    let extent = support_extent(&lat, &base.support);
    if 2 * extent > lat.size {
        return Err(invalid(format!(
            "support spans {extent} sites along an axis, more than half of {}",
            lat.size
        )));
    }
    let n_sites = lat.n_sites();
    let n = lat.n_majoranas();
    let mut p = DMatrix::zeros(n, n);
    let mut offset = T::zero();
    for s in 0..n_sites {
        let shifted = translate(base, &lat.site_coords(s))?;
        p += &shifted.coeffs;
        offset += shifted.offset;
    }
    let inv = T::one() / T::from_count(n_sites);
    Ok(QuadraticObservable {
        coeffs: p * inv,
        offset: offset * inv,
        lattice: lat,
        support: (0..n_sites).collect(),
        kind: ObservableKind::TranslationAveraged,
        base: Some(Box::new(base.clone())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::{ground_state_correlation, CorrelationMatrix};
    use crate::hamiltonian::build_ssh;

    #[test]
    fn vacuum_and_filled_occupations() {
        let lat = LatticeSpec::chain(3).unwrap();
        let n1 = QuadraticObservable::<f64>::number(lat, &[1], 0).unwrap();
        let vac = CorrelationMatrix::vacuum(6).unwrap();
        assert!((expectation(&vac, &n1).unwrap()).abs() < 1e-15);
        let full = CorrelationMatrix::product_state(&[false, true, false]);
        assert!((expectation(&full, &n1).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(n1.support(), &[1]);
    }

    #[test]
    fn traceless_observables_vanish_on_mixed_state() {
        let lat = LatticeSpec::chain(4).unwrap();
        let o = QuadraticObservable::<f64>::majorana_pair(lat, 1, 6).unwrap();
        assert_eq!(
            expectation(&CorrelationMatrix::maximally_mixed(8), &o).unwrap(),
            0.0
        );
    }

    #[test]
    fn dimer_energy_density() {
        // isolated bonds with t = 1: each pair of sites has energy -1
        let h = build_ssh::<f64>(8, 0.0).unwrap();
        let g = ground_state_correlation(&h).unwrap();
        assert!((energy_density(&h, &g).unwrap() + 0.5).abs() < 1e-14);
        // half filling: one particle per dimer in the bonding orbital
        let lat = *h.lattice();
        let total: f64 = (0..8)
            .map(|s| expectation(&g, &QuadraticObservable::number(lat, &[s], 0).unwrap()).unwrap())
            .sum();
        assert!((total - 4.0).abs() < 1e-12);
    }

    #[test]
    fn translation_wraps_and_averages() {
        let lat = LatticeSpec::chain(6).unwrap();
        let n0 = QuadraticObservable::<f64>::number(lat, &[0], 0).unwrap();
        assert_eq!(translate(&n0, &[0]).unwrap(), n0);
        assert_eq!(translate(&n0, &[6]).unwrap().coeffs(), n0.coeffs());
        assert_eq!(translate(&n0, &[2]).unwrap().support(), &[2]);

        let avg = translation_average(&n0).unwrap();
        assert_eq!(avg.kind(), ObservableKind::TranslationAveraged);
        assert_eq!(avg.locality(), 1);
        let shifted = translate(&avg, &[1]).unwrap();
        assert!((shifted.coeffs() - avg.coeffs()).amax() < 1e-15);
    }

    #[test]
    fn averaged_bond_term_is_energy_density() {
        let n_sites = 8;
        let h = build_ssh::<f64>(n_sites, 1.0).unwrap();
        let lat = *h.lattice();
        let n = lat.n_majoranas();
        let mut bond = DMatrix::zeros(n, n);
        for (j, k, v) in [(0, 3, 1.0), (1, 2, -1.0)] {
            bond[(j, k)] = v;
            bond[(k, j)] = -v;
        }
        let avg =
            translation_average(&QuadraticObservable::local(lat, bond, 0.0).unwrap()).unwrap();
        let scaled = h.antisymmetric() / n_sites as f64;
        assert!((avg.coeffs() - scaled).amax() < 1e-15);
    }

    #[test]
    fn weights_must_be_normalized() {
        let lat = LatticeSpec::chain(4).unwrap();
        let a = QuadraticObservable::<f64>::number(lat, &[0], 0).unwrap();
        let b = QuadraticObservable::<f64>::number(lat, &[2], 0).unwrap();
        assert!(weighted_average(&[(0.5, a.clone()), (0.6, b.clone())]).is_err());
        let same = weighted_average(&[(1.0, a.clone())]).unwrap();
        assert_eq!(same.coeffs(), a.coeffs());
        let mix = weighted_average(&[(0.5, a), (0.5, b)]).unwrap();
        assert_eq!(mix.support(), &[0, 2]);
    }

    #[test]
    fn wide_support_cannot_be_averaged() {
        let lat = LatticeSpec::chain(6).unwrap();
        let mut p = DMatrix::zeros(12, 12);
        for (j, k) in [(0, 4), (4, 8)] {
            p[(j, k)] = 1.0;
            p[(k, j)] = -1.0;
        }
        // sites 0, 2, 4 on a ring of 6 cannot be covered by an arc of length 3
        let o = QuadraticObservable::<f64>::local(lat, p, 0.0).unwrap();
        assert!(translation_average(&o).is_err());
        let pair = QuadraticObservable::<f64>::majorana_pair(lat, 0, 4).unwrap();
        assert!(translation_average(&pair).is_ok());
    }
}
