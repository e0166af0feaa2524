//! Dense spectral calculus for Hermitian matrices of the form `iA` with `A`
//! real antisymmetric.
//!
//! Everything is carried out in real arithmetic. `A` is reduced to an
//! antisymmetric tridiagonal `T = Qᵀ A Q` by Householder reflections. With the
//! diagonal phase matrix `P = diag(i^k)` the Hermitian tridiagonal `iT` is
//! similar to the real symmetric tridiagonal `S = P† (iT) P` whose off-diagonal
//! is `-T[k, k+1]`, so `iA = (Q P) S (Q P)†`. `S = Z Λ Zᵀ` is diagonalized by
//! implicit QL. A matrix function is then `f(iA) = Q (P f(S) P†) Qᵀ` where
//! `(P W P†)[j, k] = i^(j-k) W[j, k]`.
//!
//! Matrices that split into independent blocks (no coupling between groups of
//! modes) are decomposed block by block, see [`BlockSpectrum`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::Scalar;

const MAX_QL_SWEEPS: usize = 60;

/// Eigendecomposition `iA = U diag(λ) U†` with `U = Q P Z`.
#[derive(Debug, Clone)]
pub struct AntisymmetricEigen<T: Scalar> {
    q: DMatrix<T>,
    z: DMatrix<T>,
    eigenvalues: DVector<T>,
}

impl<T: Scalar> AntisymmetricEigen<T> {
    pub fn decompose(a: &DMatrix<T>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.ncols(),
            });
        }
        let (q, offdiag) = tridiagonalize(a.clone());
        let mut diag = vec![T::zero(); n];
        let mut sub: Vec<T> = offdiag.iter().map(|&b| -b).collect();
        sub.push(T::zero());
        let mut z = DMatrix::identity(n, n);
        tql2(&mut diag, &mut sub, &mut z)?;
        Ok(Self {
            q,
            z,
            eigenvalues: DVector::from_vec(diag),
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Ascending eigenvalues of `iA`.
    pub fn eigenvalues(&self) -> &DVector<T> {
        &self.eigenvalues
    }

    /// Unitary eigenbasis `U = Q P Z`, one eigenvector per column.
    pub fn eigenvectors(&self) -> DMatrix<Complex<T>> {
        let n = self.dim();
        let mut qp = DMatrix::<Complex<T>>::zeros(n, n);
        for k in 0..n {
            let phase = phase_of(k as isize);
            for j in 0..n {
                qp[(j, k)] = phase * self.q[(j, k)];
            }
        }
        let zc = self.z.map(|x| Complex::new(x, T::zero()));
        qp * zc
    }

    /// `Z diag(f) Zᵀ`.
    fn weighted_gram(&self, f: &[T]) -> DMatrix<T> {
        let mut zf = self.z.clone();
        for (mut col, &w) in zf.column_iter_mut().zip(f) {
            col *= w;
        }
        &zf * self.z.transpose()
    }

    fn conjugate_by_q(&self, m: &DMatrix<T>) -> DMatrix<T> {
        &self.q * m * self.q.transpose()
    }

    /// For a real odd function `f`, `f(iA)` is purely imaginary; returns the
    /// real antisymmetric `R` with `f(iA) = i R`.
    pub fn odd_function(&self, f: impl Fn(T) -> T) -> DMatrix<T> {
        let vals: Vec<T> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        let w = self.weighted_gram(&vals);
        let n = self.dim();
        let twisted =
            DMatrix::from_fn(n, n, |j, k| match (j as isize - k as isize).rem_euclid(4) {
                1 => w[(j, k)],
                3 => -w[(j, k)],
                _ => T::zero(),
            });
        self.conjugate_by_q(&twisted)
    }

    /// For a real even function `f`, `f(iA)` is real; returns it.
    pub fn even_function(&self, f: impl Fn(T) -> T) -> DMatrix<T> {
        let vals: Vec<T> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        let w = self.weighted_gram(&vals);
        let n = self.dim();
        let twisted =
            DMatrix::from_fn(n, n, |j, k| match (j as isize - k as isize).rem_euclid(4) {
                0 => w[(j, k)],
                2 => -w[(j, k)],
                _ => T::zero(),
            });
        self.conjugate_by_q(&twisted)
    }

    /// `exp(-i (iA) t) = exp(A t)`, a real orthogonal matrix.
    pub fn propagator(&self, t: T) -> DMatrix<T> {
        let cos: Vec<T> = self.eigenvalues.iter().map(|&x| (x * t).cos()).collect();
        let sin: Vec<T> = self.eigenvalues.iter().map(|&x| (x * t).sin()).collect();
        let wc = self.weighted_gram(&cos);
        let ws = self.weighted_gram(&sin);
        let n = self.dim();
        // real part of i^(j-k) (W_cos - i W_sin)
        let twisted =
            DMatrix::from_fn(n, n, |j, k| match (j as isize - k as isize).rem_euclid(4) {
                0 => wc[(j, k)],
                1 => ws[(j, k)],
                2 => -wc[(j, k)],
                _ => -ws[(j, k)],
            });
        self.conjugate_by_q(&twisted)
    }
}

fn phase_of<T: Scalar>(k: isize) -> Complex<T> {
    match k.rem_euclid(4) {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    }
}

/// Householder reduction of a real antisymmetric matrix.
///
/// Returns `Q` and the superdiagonal `b` of `T = Qᵀ A Q`, `T[k, k+1] = b[k]`.
fn tridiagonalize<T: Scalar>(mut a: DMatrix<T>) -> (DMatrix<T>, Vec<T>) {
    let n = a.nrows();
    let mut reflectors: Vec<(usize, DVector<T>, T)> = Vec::new();
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let x = a.view((k + 1, k), (len, 1)).column(0).clone_owned();
        let tail: T = x.rows(1, len - 1).norm_squared();
        if tail == T::zero() {
            continue;
        }
        let x0 = x[0];
        let norm = (x0 * x0 + tail).sqrt();
        let alpha = if x0 > T::zero() { -norm } else { norm };
        let mut v = x;
        v[0] = x0 - alpha;
        let tau = T::lit(2.0) / v.norm_squared();

        {
            let mut block = a.view_mut((k + 1, k + 1), (len, len));
            let mut p = DVector::<T>::zeros(len);
            p.gemv(tau, &block, &v, T::zero());
            // H B H = B + v pᵀ - p vᵀ for antisymmetric B
            block.ger(T::one(), &v, &p, T::one());
            block.ger(-T::one(), &p, &v, T::one());
        }
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = -alpha;
        for i in (k + 2)..n {
            a[(i, k)] = T::zero();
            a[(k, i)] = T::zero();
        }
        reflectors.push((k, v, tau));
    }

    let mut q = DMatrix::<T>::identity(n, n);
    for (k, v, tau) in reflectors.into_iter().rev() {
        let len = n - k - 1;
        let mut block = q.view_mut((k + 1, k + 1), (len, len));
        let mut w = DVector::<T>::zeros(len);
        w.gemv_tr(tau, &block, &v, T::zero());
        block.ger(-T::one(), &v, &w, T::one());
    }
    let offdiag = (0..n.saturating_sub(1)).map(|k| a[(k, k + 1)]).collect();
    (q, offdiag)
}

/// Symmetric tridiagonal QL with implicit shifts (EISPACK `tql2`).
///
/// `d` holds the diagonal, `e[i] = S[i, i+1]` with `e[n-1] = 0`. On return
/// `d` holds ascending eigenvalues and the columns of `z` have been rotated
/// into the matching eigenvectors.
fn tql2<T: Scalar>(d: &mut [T], e: &mut [T], z: &mut DMatrix<T>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let two = T::lit(2.0);
    let eps = T::eps();
    let mut f = T::zero();
    let mut tst1 = T::zero();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_QL_SWEEPS {
                    return Err(Error::Numerical(format!(
                        "tridiagonal QL did not converge at index {l}"
                    )));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    rotate_columns(z, i, s, c);
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }

    // selection sort keeps the column swaps to at most n
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        for j in (i + 1)..n {
            if d[j] < d[k] {
                k = j;
            }
        }
        if k != i {
            d.swap(i, k);
            z.swap_columns(i, k);
        }
    }
    Ok(())
}

#[inline]
fn rotate_columns<T: Scalar>(z: &mut DMatrix<T>, i: usize, s: T, c: T) {
    let n = z.nrows();
    let data = z.as_mut_slice();
    let (left, right) = data.split_at_mut((i + 1) * n);
    let col_i = &mut left[i * n..];
    let col_next = &mut right[..n];
    for (a, b) in col_i.iter_mut().zip(col_next.iter_mut()) {
        let h = *b;
        *b = s * *a + c * h;
        *a = c * *a - s * h;
    }
}

/// Groups of mutually coupled modes: connected components of the graph with
/// an edge wherever `a[(j, k)] != 0`. Components are listed by smallest member.
pub fn coupled_components<T: Scalar>(a: &DMatrix<T>) -> Vec<Vec<usize>> {
    let n = a.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for k in 0..n {
        for j in 0..n {
            if j != k && a[(j, k)] != T::zero() {
                let (rj, rk) = (find(&mut parent, j), find(&mut parent, k));
                if rj != rk {
                    parent[rj.max(rk)] = rj.min(rk);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

#[derive(Debug, Clone)]
struct Block<T: Scalar> {
    modes: Vec<usize>,
    eig: AntisymmetricEigen<T>,
}

/// Eigendecomposition of `iA` assembled from independent coupled blocks.
#[derive(Debug, Clone)]
pub struct BlockSpectrum<T: Scalar> {
    dim: usize,
    blocks: Vec<Block<T>>,
}

impl<T: Scalar> BlockSpectrum<T> {
    pub fn decompose(a: &DMatrix<T>) -> Result<Self> {
        let dim = a.nrows();
        if a.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: a.ncols(),
            });
        }
        let blocks = coupled_components(a)
            .into_iter()
            .map(|modes| {
                let sub =
                    DMatrix::from_fn(modes.len(), modes.len(), |j, k| a[(modes[j], modes[k])]);
                Ok(Block {
                    eig: AntisymmetricEigen::decompose(&sub)?,
                    modes,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dim, blocks })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// All eigenvalues of `iA`, ascending.
    pub fn eigenvalues(&self) -> Vec<T> {
        let mut vals: Vec<T> = self
            .blocks
            .iter()
            .flat_map(|b| b.eig.eigenvalues().iter().copied())
            .collect();
        vals.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        vals
    }

    /// Largest `|λ|`, i.e. the operator norm of `A`.
    pub fn spectral_radius(&self) -> T {
        self.blocks
            .iter()
            .flat_map(|b| b.eig.eigenvalues().iter())
            .fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    /// Ascending eigenvalues with the matching unitary eigenbasis.
    pub fn eigensystem(&self) -> (DVector<T>, DMatrix<Complex<T>>) {
        let mut cols: Vec<(T, usize, usize)> = Vec::with_capacity(self.dim);
        for (bi, b) in self.blocks.iter().enumerate() {
            for (ci, &x) in b.eig.eigenvalues().iter().enumerate() {
                cols.push((x, bi, ci));
            }
        }
        cols.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
        let block_vectors: Vec<DMatrix<Complex<T>>> =
            self.blocks.iter().map(|b| b.eig.eigenvectors()).collect();
        let mut u = DMatrix::<Complex<T>>::zeros(self.dim, self.dim);
        for (col, &(_, bi, ci)) in cols.iter().enumerate() {
            for (r, &mode) in self.blocks[bi].modes.iter().enumerate() {
                u[(mode, col)] = block_vectors[bi][(r, ci)];
            }
        }
        (
            DVector::from_iterator(self.dim, cols.iter().map(|c| c.0)),
            u,
        )
    }

    fn assemble(
        &self,
        diag_fill: T,
        per_block: impl Fn(&AntisymmetricEigen<T>) -> DMatrix<T>,
    ) -> DMatrix<T> {
        let mut out = DMatrix::<T>::zeros(self.dim, self.dim);
        for b in &self.blocks {
            let m = per_block(&b.eig);
            for (jj, &j) in b.modes.iter().enumerate() {
                for (kk, &k) in b.modes.iter().enumerate() {
                    out[(j, k)] = m[(jj, kk)];
                }
            }
        }
        if self.blocks.is_empty() {
            out.fill_diagonal(diag_fill);
        }
        out
    }

    /// Real antisymmetric `R` with `f(iA) = i R`, for odd `f`.
    pub fn odd_function(&self, f: impl Fn(T) -> T + Copy) -> DMatrix<T> {
        self.assemble(T::zero(), |e| e.odd_function(f))
    }

    /// `f(iA)` for even `f` (real symmetric).
    pub fn even_function(&self, f: impl Fn(T) -> T + Copy) -> DMatrix<T> {
        self.assemble(T::zero(), |e| e.even_function(f))
    }

    /// `exp(A t)`.
    pub fn propagator(&self, t: T) -> DMatrix<T> {
        self.assemble(T::one(), |e| e.propagator(t))
    }
}

/// Selected rows of `exp(A t) = U e^{-iΛt} U†`, from the output of
/// [`BlockSpectrum::eigensystem`].
pub fn propagator_rows<T: Scalar>(
    values: &DVector<T>,
    vectors: &DMatrix<Complex<T>>,
    t: T,
    rows: &[usize],
) -> DMatrix<T> {
    let m = values.len();
    let phases: Vec<Complex<T>> = values
        .iter()
        .map(|&x| Complex::new((x * t).cos(), -(x * t).sin()))
        .collect();
    let mut out = DMatrix::zeros(rows.len(), m);
    for (r, &a) in rows.iter().enumerate() {
        let weighted: Vec<Complex<T>> = (0..m).map(|l| vectors[(a, l)] * phases[l]).collect();
        for k in 0..m {
            let mut acc = T::zero();
            for (l, w) in weighted.iter().enumerate() {
                let u = vectors[(k, l)];
                acc += w.re * u.re + w.im * u.im;
            }
            out[(r, k)] = acc;
        }
    }
    out
}

/// Largest singular value of a real square matrix.
pub fn operator_norm<T: Scalar>(m: &DMatrix<T>) -> T {
    if m.is_empty() {
        return T::zero();
    }
    let gram = m.transpose() * m;
    let top = gram
        .symmetric_eigenvalues()
        .iter()
        .fold(T::zero(), |acc, &x| acc.max(x));
    top.max(T::zero()).sqrt()
}

/// Largest singular value of a complex square matrix.
pub fn operator_norm_complex<T: Scalar>(m: &DMatrix<Complex<T>>) -> T {
    if m.is_empty() {
        return T::zero();
    }
    let gram = m.adjoint() * m;
    let top = gram
        .symmetric_eigenvalues()
        .iter()
        .fold(T::zero(), |acc, &x| acc.max(x));
    top.max(T::zero()).sqrt()
}

/// Sum of singular values (Schatten-1 norm).
pub fn trace_norm<T: Scalar>(m: &DMatrix<T>) -> T {
    if m.is_empty() {
        return T::zero();
    }
    m.clone()
        .singular_values()
        .iter()
        .fold(T::zero(), |acc, &s| acc + s)
}

/// Maximum number of nonzero entries in any row or column.
pub fn max_row_nonzeros<T: Scalar>(m: &DMatrix<T>) -> usize {
    let rows = (0..m.nrows()).map(|i| m.row(i).iter().filter(|&&x| x != T::zero()).count());
    let cols = (0..m.ncols()).map(|j| m.column(j).iter().filter(|&&x| x != T::zero()).count());
    rows.chain(cols).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_antisymmetric(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = DMatrix::zeros(n, n);
        for j in 0..n {
            for k in (j + 1)..n {
                let x: f64 = rng.random_range(-1.0..1.0);
                a[(j, k)] = x;
                a[(k, j)] = -x;
            }
        }
        a
    }

    fn as_hermitian(a: &DMatrix<f64>) -> DMatrix<Complex<f64>> {
        a.map(|x| Complex::new(0.0, x))
    }

    #[test]
    fn reconstructs_random_matrices() {
        for (n, seed) in [(1, 1), (2, 2), (3, 3), (6, 4), (9, 5), (24, 6)] {
            let a = random_antisymmetric(n, seed);
            let eig = AntisymmetricEigen::decompose(&a).unwrap();
            let u = eig.eigenvectors();
            let lam = eig.eigenvalues().map(|x| Complex::new(x, 0.0));
            let rebuilt = &u * DMatrix::from_diagonal(&lam) * u.adjoint();
            let err = operator_norm_complex(&(rebuilt - as_hermitian(&a)));
            assert!(err < 1e-12 * (1.0 + operator_norm(&a)), "n={n}: {err}");
            let unitarity = operator_norm_complex(&(u.adjoint() * &u - DMatrix::identity(n, n)));
            assert!(unitarity < 1e-12);
        }
    }

    #[test]
    fn spectrum_matches_nalgebra_hermitian_solver() {
        let a = random_antisymmetric(17, 11);
        let ours = AntisymmetricEigen::decompose(&a)
            .unwrap()
            .eigenvalues()
            .clone();
        let mut theirs: Vec<f64> = as_hermitian(&a)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        theirs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (x, y) in ours.iter().zip(&theirs) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn odd_even_and_propagator_agree_with_definitions() {
        let a = random_antisymmetric(10, 21);
        let spec = BlockSpectrum::decompose(&a).unwrap();
        // identity function: f(iA) = iA
        let r = spec.odd_function(|x| x);
        assert!(operator_norm(&(r - &a)) < 1e-12);
        // x^2: (iA)^2 = -A^2
        let sq = spec.even_function(|x| x * x);
        assert!(operator_norm(&(sq + &a * &a)) < 1e-12);
        // propagator is orthogonal and matches a Taylor series at small t
        let t = 0.05;
        let prop = spec.propagator(t);
        let mut taylor = DMatrix::<f64>::identity(10, 10);
        let mut term = DMatrix::<f64>::identity(10, 10);
        for k in 1..30 {
            term = &term * &a * (t / k as f64);
            taylor += &term;
        }
        assert!(operator_norm(&(&prop - taylor)) < 1e-13);
        assert!(operator_norm(&(prop.transpose() * &prop - DMatrix::identity(10, 10))) < 1e-12);
    }

    #[test]
    fn block_decomposition_matches_dense() {
        // two decoupled random blocks interleaved in the index order
        let b1 = random_antisymmetric(4, 31);
        let b2 = random_antisymmetric(3, 32);
        let idx1 = [0, 2, 4, 6];
        let idx2 = [1, 3, 5];
        let mut a = DMatrix::zeros(7, 7);
        for j in 0..4 {
            for k in 0..4 {
                a[(idx1[j], idx1[k])] = b1[(j, k)];
            }
        }
        for j in 0..3 {
            for k in 0..3 {
                a[(idx2[j], idx2[k])] = b2[(j, k)];
            }
        }
        let blocks = BlockSpectrum::decompose(&a).unwrap();
        assert_eq!(blocks.block_count(), 2);
        let dense = AntisymmetricEigen::decompose(&a).unwrap();
        let sign = |x: f64| if x.abs() < 1e-12 { 0.0 } else { x.signum() };
        assert!(operator_norm(&(blocks.odd_function(sign) - dense.odd_function(sign))) < 1e-12);
        assert!(operator_norm(&(blocks.propagator(0.7) - dense.propagator(0.7))) < 1e-12);
        let (vals, u) = blocks.eigensystem();
        let rebuilt =
            &u * DMatrix::from_diagonal(&vals.map(|x| Complex::new(x, 0.0))) * u.adjoint();
        assert!(operator_norm_complex(&(rebuilt - as_hermitian(&a))) < 1e-12);
    }

    #[test]
    fn zero_matrix_and_isolated_modes() {
        let a = DMatrix::<f64>::zeros(5, 5);
        let spec = BlockSpectrum::decompose(&a).unwrap();
        assert_eq!(spec.block_count(), 5);
        assert!(spec.eigenvalues().iter().all(|&x| x == 0.0));
        assert_eq!(spec.propagator(3.0), DMatrix::identity(5, 5));
    }

    #[test]
    fn norm_helpers() {
        let d = DMatrix::<f64>::identity(4, 4) * 0.3;
        assert!((operator_norm(&d) - 0.3).abs() < 1e-15);
        let ones = DMatrix::<f64>::from_element(2, 2, 0.3);
        assert!((operator_norm(&ones) - 0.6).abs() < 1e-15);
        assert_eq!(max_row_nonzeros(&ones), 2);
        assert!((trace_norm(&d) - 1.2).abs() < 1e-14);
    }

    #[test]
    fn works_in_single_precision() {
        let a = random_antisymmetric(8, 41).map(|x| x as f32);
        let eig = AntisymmetricEigen::decompose(&a).unwrap();
        let r = eig.odd_function(|x| x);
        assert!(operator_norm(&(r - &a)) < 1e-5);
    }

    #[test]
    fn propagator_rows_match_full_propagator() {
        let a = random_antisymmetric(10, 5);
        let spec = BlockSpectrum::decompose(&a).unwrap();
        let (values, vectors) = spec.eigensystem();
        let full = spec.propagator(1.7);
        let rows = propagator_rows(&values, &vectors, 1.7, &[3, 0, 9]);
        for (r, &a) in [3usize, 0, 9].iter().enumerate() {
            assert!((rows.row(r) - full.row(a)).amax() < 1e-12);
        }
    }
}
