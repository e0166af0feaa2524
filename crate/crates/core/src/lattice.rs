//! Periodic hypercubic lattice `Z_L^d` carrying `2D` Majorana modes per site.
//!
//! Modes are laid out row-major over the site coordinates (last axis
//! fastest) with the Majorana flavor fastest of all, so mode
//! `(x, alpha)` lives at `site_index(x) * 2D + (alpha - 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSpec {
    /// Spatial dimension `d`.
    pub dim: usize,
    /// Sites per direction `L`.
    pub size: usize,
    /// Complex-fermion modes per site `D`.
    pub modes_per_site: usize,
    /// Interaction range `R` in lattice units (Chebyshev distance on the torus).
    pub range: usize,
}

impl LatticeSpec {
    pub fn new(dim: usize, size: usize, modes_per_site: usize, range: usize) -> Result<Self> {
        if dim == 0 || size == 0 || modes_per_site == 0 {
            return Err(invalid(format!(
                "lattice needs positive d, L, D (got d={dim}, L={size}, D={modes_per_site})"
            )));
        }
        Ok(Self {
            dim,
            size,
            modes_per_site,
            range,
        })
    }

    /// A ring of `n_sites` sites with `D = 1` and nearest-neighbour range.
    pub fn chain(n_sites: usize) -> Result<Self> {
        Self::new(1, n_sites, 1, 1)
    }

    pub fn n_sites(&self) -> usize {
        self.size.pow(self.dim as u32)
    }

    /// Majorana flavors per site, `2D`.
    pub fn flavors(&self) -> usize {
        2 * self.modes_per_site
    }

    /// Total Majorana count `n = 2 D L^d`.
    pub fn n_majoranas(&self) -> usize {
        self.flavors() * self.n_sites()
    }

    fn check_coord(&self, x: &[usize]) -> Result<()> {
        if x.len() != self.dim {
            return Err(invalid(format!(
                "coordinate {x:?} has {} axes, lattice has {}",
                x.len(),
                self.dim
            )));
        }
        if let Some(bad) = x.iter().find(|&&c| c >= self.size) {
            return Err(invalid(format!(
                "coordinate component {bad} outside [0, {})",
                self.size
            )));
        }
        Ok(())
    }

    /// Row-major linear index of a site.
    pub fn site_index(&self, x: &[usize]) -> Result<usize> {
        self.check_coord(x)?;
        Ok(x.iter().fold(0, |acc, &c| acc * self.size + c))
    }

    pub fn site_coords(&self, mut index: usize) -> Vec<usize> {
        let mut x = vec![0; self.dim];
        for axis in (0..self.dim).rev() {
            x[axis] = index % self.size;
            index /= self.size;
        }
        x
    }

    /// Linear index of Majorana `(x, flavor)` with `flavor` in `1..=2D`.
    pub fn mode_index(&self, x: &[usize], flavor: usize) -> Result<usize> {
        if flavor == 0 || flavor > self.flavors() {
            return Err(invalid(format!(
                "flavor {flavor} outside [1, {}]",
                self.flavors()
            )));
        }
        Ok(self.site_index(x)? * self.flavors() + flavor - 1)
    }

    /// Inverse of [`mode_index`](Self::mode_index): `(coords, flavor)`.
    pub fn mode_site(&self, mode: usize) -> (Vec<usize>, usize) {
        (
            self.site_coords(mode / self.flavors()),
            mode % self.flavors() + 1,
        )
    }

    /// Chebyshev distance on the torus: `max_i min(|x_i - y_i|, L - |x_i - y_i|)`.
    pub fn torus_distance(&self, x: &[usize], y: &[usize]) -> Result<usize> {
        self.check_coord(x)?;
        self.check_coord(y)?;
        Ok(self.distance_unchecked(x, y))
    }

    pub(crate) fn distance_unchecked(&self, x: &[usize], y: &[usize]) -> usize {
        x.iter()
            .zip(y)
            .map(|(&a, &b)| {
                let d = a.abs_diff(b);
                d.min(self.size - d)
            })
            .max()
            .unwrap_or(0)
    }

    /// Distance between two sites given by linear index.
    pub fn site_distance(&self, a: usize, b: usize) -> usize {
        self.distance_unchecked(&self.site_coords(a), &self.site_coords(b))
    }

    /// All sites within Chebyshev distance `radius` of `x`, in ascending linear order.
    pub fn neighborhood(&self, x: &[usize], radius: usize) -> Result<Vec<Vec<usize>>> {
        self.check_coord(x)?;
        Ok((0..self.n_sites())
            .map(|i| self.site_coords(i))
            .filter(|y| self.distance_unchecked(x, y) <= radius)
            .collect())
    }

    /// `x + v (mod L)` componentwise.
    pub fn translate(&self, x: &[usize], v: &[usize]) -> Vec<usize> {
        x.iter()
            .zip(v)
            .map(|(&a, &b)| (a + b) % self.size)
            .collect()
    }

    /// Permutation of Majorana indices induced by shifting every site by `v`.
    pub fn shift_permutation(&self, v: &[usize]) -> Vec<usize> {
        let f = self.flavors();
        (0..self.n_majoranas())
            .map(|mode| {
                let (x, flavor) = self.mode_site(mode);
                let y = self.translate(&x, v);
                y.iter().fold(0, |acc, &c| acc * self.size + c) * f + flavor - 1
            })
            .collect()
    }
}
