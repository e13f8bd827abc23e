use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::math;
use crate::spline::PeriodicSpline;

/// Real samples of a periodic function on a [`Grid`].
///
/// Values are finite by construction when built through [`ScalarField::new`]
/// or [`ScalarField::from_fn`]; arithmetic between fields on different grids
/// is a programming error and panics.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::GridMismatch);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(ScalarField {
            grid: grid.clone(),
            values,
        })
    }

    /// Builds a field without the finiteness scan. Length must match.
    pub(crate) fn from_raw(grid: &Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_points());
        ScalarField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.points().map(f).collect();
        ScalarField::new(grid, values)
    }

    pub fn zeros(grid: &Grid) -> Self {
        ScalarField::constant(grid, 0.0)
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        ScalarField {
            grid: grid.clone(),
            values: vec![c; grid.n_points()],
        }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(math::abs(*v)))
    }

    /// `(min, argmin index)`.
    pub fn min_with_index(&self) -> (f64, usize) {
        self.values
            .iter()
            .enumerate()
            .fold((f64::INFINITY, 0), |(m, i), (j, &v)| if v < m { (v, j) } else { (m, i) })
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    pub fn min(&self) -> f64 {
        self.min_with_index().0
    }

    /// Rectangle rule over one period, which is the spectrally exact integral.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.spacing()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField::from_raw(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        self.assert_same_grid(other);
        ScalarField::from_raw(
            &self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> ScalarField {
        self.map(|v| s * v)
    }

    /// `self + a * other`
    pub fn axpy(&self, a: f64, other: &ScalarField) -> ScalarField {
        self.zip_map(other, |x, y| x + a * y)
    }

    /// Pointwise product without dealiasing.
    pub fn pointwise_mul(&self, other: &ScalarField) -> ScalarField {
        self.zip_map(other, |x, y| x * y)
    }

    /// Circular shift by whole grid cells: `out[j] = self[j + cells]`.
    pub fn shift_cells(&self, cells: i64) -> ScalarField {
        let n = self.len() as i64;
        let values = (0..n)
            .map(|j| self.values[(j + cells).rem_euclid(n) as usize])
            .collect();
        ScalarField::from_raw(&self.grid, values)
    }

    /// Evaluates the field off the grid through its periodic quintic spline.
    pub fn eval(&self, x: f64) -> f64 {
        PeriodicSpline::new(self).eval(x)
    }

    /// Support on the grid: indices where `|f| > rel_threshold * max|f|`,
    /// returned as a single interval `[lo, hi]` in coordinates unwrapped
    /// around the largest zero gap. `None` for a zero field.
    pub fn numerical_support(&self, rel_threshold: f64) -> Option<(f64, f64)> {
        let peak = self.sup_norm();
        if peak == 0.0 {
            return None;
        }
        let n = self.len();
        let on: Vec<bool> = self
            .values
            .iter()
            .map(|v| math::abs(*v) > rel_threshold * peak)
            .collect();
        if on.iter().all(|&b| b) {
            return Some((0.0, self.grid.length()));
        }
        // start right after the longest run of zeros
        let mut best_len = 0;
        let mut best_end = 0;
        let mut run = 0;
        for j in 0..2 * n {
            if !on[j % n] {
                run += 1;
                if run > best_len && run <= n {
                    best_len = run;
                    best_end = j;
                }
            } else {
                run = 0;
            }
        }
        let start = best_end + 1;
        let mut lo = None;
        let mut hi = 0;
        for step in 0..n {
            let j = start + step;
            if on[j % n] {
                lo.get_or_insert(j);
                hi = j;
            }
        }
        let h = self.grid.spacing();
        let lo = lo? as f64 * h;
        let hi = hi as f64 * h;
        let shift = self.grid.length() * math::floor(lo / self.grid.length());
        Some((lo - shift, hi - shift))
    }

    fn assert_same_grid(&self, other: &ScalarField) {
        assert!(
            self.grid.same_as(&other.grid),
            "arithmetic between fields on different grids"
        );
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &ScalarField {
    type Output = ScalarField;
    fn mul(self, s: f64) -> ScalarField {
        self.scale(s)
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.scale(-1.0)
    }
}
