//! Uniform periodic grid on the torus and point-sampled fields.
//!
//! A [`Field`] stores the value of a function at the points `x_j = j * h`,
//! `j = 0..n_cells`. All index arithmetic wraps modulo `n_cells`.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest accepted grid.
pub const MIN_CELLS: usize = 8;

/// Relative slack allowed when checking that a length is a whole number of cells.
const ALIGN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n_cells: usize,
    length: f64,
    h: f64,
}

impl Grid {
    pub fn new(n_cells: usize, length: f64) -> Result<Self> {
        if n_cells < MIN_CELLS {
            return Err(Error::TooFewCells(n_cells));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "length",
                reason: format!("must be positive and finite, got {length}"),
            });
        }
        Ok(Grid {
            n_cells,
            length,
            h: length / n_cells as f64,
        })
    }

    /// Unit torus with `n_cells` points.
    pub fn unit(n_cells: usize) -> Result<Self> {
        Self::new(n_cells, 1.0)
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Sample coordinate of cell `j`.
    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.h
    }

    /// Periodic index `j + offset` reduced into `0..n_cells`.
    #[inline]
    pub fn wrap(&self, j: usize, offset: isize) -> usize {
        let n = self.n_cells as isize;
        (j as isize + offset).rem_euclid(n) as usize
    }

    /// Number of cells spanned by `width`, which must be a positive whole multiple of `h`.
    pub fn cells_in(&self, width: f64) -> Result<usize> {
        let ratio = width / self.h;
        let m = ratio.round();
        if !(width > 0.0) || m < 1.0 || (ratio - m).abs() > ALIGN_TOL * m.max(1.0) {
            return Err(Error::StencilMisaligned { eps: width, h: self.h });
        }
        Ok(m as usize)
    }
}

/// Point samples of a periodic function.
#[derive(Debug, Clone, PartialEq)]
pub struct Field(Vec<f64>);

impl Field {
    pub fn from_vec(values: Vec<f64>) -> Self {
        Field(values)
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Field(vec![value; n])
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, 0.0)
    }

    /// Samples `f(x_j)` on `grid`.
    pub fn sample(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        Field((0..grid.n_cells()).map(|j| f(grid.x(j))).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    /// Cyclic shift: `result[j] = self[(j + offset) mod n]`.
    pub fn shift(&self, offset: isize) -> Field {
        let n = self.0.len();
        if n == 0 {
            return self.clone();
        }
        let s = offset.rem_euclid(n as isize) as usize;
        let mut out = Vec::with_capacity(n);
        out.extend_from_slice(&self.0[s..]);
        out.extend_from_slice(&self.0[..s]);
        Field(out)
    }

    /// Sum in index order.
    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.0.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Field {
        debug_assert_eq!(self.len(), other.len());
        Field(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &Field) {
        debug_assert_eq!(self.len(), x.len());
        for (y, &xv) in self.0.iter_mut().zip(&x.0) {
            *y += a * xv;
        }
    }
}

impl Index<usize> for Field {
    type Output = f64;

    fn index(&self, j: usize) -> &f64 {
        &self.0[j]
    }
}

impl IndexMut<usize> for Field {
    fn index_mut(&mut self, j: usize) -> &mut f64 {
        &mut self.0[j]
    }
}

impl From<Vec<f64>> for Field {
    fn from(v: Vec<f64>) -> Self {
        Field(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grid_spacing() {
        assert_eq!(Grid::new(8, 1.0).unwrap().h(), 0.125);
        assert!((Grid::new(100, 1.0).unwrap().h() - 0.01).abs() < 1e-18);
        assert!(matches!(Grid::new(7, 1.0), Err(Error::TooFewCells(7))));
        assert!(Grid::new(8, 0.0).is_err());
        assert!(Grid::new(8, -1.0).is_err());
    }

    #[test]
    fn shift_examples() {
        let f = Field::from_vec(vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(f.shift(1).values(), &[2.0, 3.0, 4.0, 1.0]);
        assert_eq!(f.shift(-1).values(), &[4.0, 1.0, 2.0, 3.0]);
        assert_eq!(f.shift(0), f);
        assert_eq!(f.shift(9).values(), &[2.0, 3.0, 4.0, 1.0]);
    }

    #[test]
    fn wrap_is_periodic() {
        let g = Grid::unit(10).unwrap();
        assert_eq!(g.wrap(0, -1), 9);
        assert_eq!(g.wrap(9, 1), 0);
        assert_eq!(g.wrap(3, -23), 0);
    }

    #[test]
    fn cells_in_alignment() {
        let g = Grid::unit(400).unwrap();
        assert_eq!(g.cells_in(0.01).unwrap(), 4);
        assert_eq!(g.cells_in(0.0025).unwrap(), 1);
        assert!(g.cells_in(0.003).is_err());
        assert!(g.cells_in(0.0).is_err());
    }

    proptest! {
        #[test]
        fn shift_composes(values in prop::collection::vec(-1e3f64..1e3, 1..64), a in -100isize..100, b in -100isize..100) {
            let f = Field::from_vec(values);
            prop_assert_eq!(f.shift(a).shift(b), f.shift(a + b));
        }

        #[test]
        fn shift_preserves_sum_exactly(values in prop::collection::vec(-1e3f64..1e3, 1..64), a in -100isize..100) {
            let f = Field::from_vec(values);
            let mut lhs: Vec<f64> = f.shift(a).into_vec();
            let mut rhs: Vec<f64> = f.values().to_vec();
            lhs.sort_by(f64::total_cmp);
            rhs.sort_by(f64::total_cmp);
            prop_assert_eq!(lhs.iter().sum::<f64>(), rhs.iter().sum::<f64>());
        }

        #[test]
        fn spacing_times_count_is_length(n in 8usize..5000, length in 1e-3f64..1e3) {
            let g = Grid::new(n, length).unwrap();
            prop_assert!((g.h() * n as f64 - length).abs() <= 4.0 * f64::EPSILON * length);
        }
    }
}
