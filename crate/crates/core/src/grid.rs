use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::error::{Error, Result};
use crate::fft::FftPlan;
use crate::math;

/// Default domain length.
pub const DEFAULT_LENGTH: f64 = 40.0;
/// Default number of grid points.
pub const DEFAULT_POINTS: usize = 2048;

/// Uniform periodic grid on `[0, length)` with samples at `x_j = j * spacing`.
///
/// Cloning is cheap: the transform plan and the wavenumber table are shared.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    n_points: usize,
    length: f64,
    spacing: f64,
    plan: FftPlan,
    /// `xi_k = 2 pi k / length` in FFT index order; the Nyquist index carries `+n/2`.
    wavenumbers: Vec<f64>,
    /// Reciprocal of the quintic spline interpolation symbol per index.
    spline_prefilter: Vec<f64>,
}

impl Grid {
    pub fn new(n_points: usize, length: f64) -> Result<Self> {
        if n_points < 4 {
            return Err(Error::param("n_points", n_points as f64, ">= 4"));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::param("length", length, "finite and > 0"));
        }
        let wavenumbers = (0..n_points)
            .map(|k| 2.0 * PI * (signed_mode(k, n_points) as f64) / length)
            .collect();
        let spline_prefilter = (0..n_points)
            .map(|k| {
                let t = 2.0 * PI * signed_mode(k, n_points) as f64 / n_points as f64;
                120.0 / (66.0 + 52.0 * math::cos(t) + 2.0 * math::cos(2.0 * t))
            })
            .collect();
        Ok(Grid {
            inner: Arc::new(GridInner {
                n_points,
                length,
                spacing: length / n_points as f64,
                plan: FftPlan::new(n_points),
                wavenumbers,
                spline_prefilter,
            }),
        })
    }

    /// The default 2048-point grid on `[0, 40)`.
    pub fn default_grid() -> Self {
        Grid::new(DEFAULT_POINTS, DEFAULT_LENGTH).expect("default grid is valid")
    }

    #[inline]
    pub fn n_points(&self) -> usize {
        self.inner.n_points
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.inner.length
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.inner.spacing
    }

    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.inner.spacing
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points()).map(move |j| self.x(j))
    }

    /// Wavenumbers `xi_k` in FFT index order.
    #[inline]
    pub fn wavenumbers(&self) -> &[f64] {
        &self.inner.wavenumbers
    }

    /// Signed integer mode for FFT index `k`.
    #[inline]
    pub fn mode(&self, k: usize) -> i64 {
        signed_mode(k, self.n_points())
    }

    /// Index of the Nyquist mode, if `n_points` is even.
    pub fn nyquist(&self) -> Option<usize> {
        let n = self.n_points();
        (n % 2 == 0).then_some(n / 2)
    }

    /// Largest `|k|` kept by the two-thirds rule.
    pub fn dealias_cutoff(&self) -> i64 {
        ((self.n_points() - 1) / 3) as i64
    }

    pub(crate) fn spline_prefilter(&self) -> &[f64] {
        &self.inner.spline_prefilter
    }

    pub(crate) fn plan(&self) -> &FftPlan {
        &self.inner.plan
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self == other
    }
}

fn signed_mode(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n_points() == other.n_points() && self.length() == other.length()
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n_points", &self.n_points())
            .field("length", &self.length())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_times_points_is_length() {
        for &(n, l) in &[(2048usize, 40.0), (100, 3.7), (4096, 40.0), (7, 1.0)] {
            let g = Grid::new(n, l).unwrap();
            let rel = (g.spacing() * n as f64 - l).abs() / l;
            assert!(rel <= f64::EPSILON);
            assert_eq!(g.wavenumbers()[0], 0.0);
        }
    }

    #[test]
    fn wavenumbers_are_symmetric() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let ks: Vec<i64> = (0..8).map(|k| g.mode(k)).collect();
        assert_eq!(ks, [0, 1, 2, 3, 4, -3, -2, -1]);
        assert_eq!(g.wavenumbers()[3], 3.0);
        assert_eq!(g.wavenumbers()[7], -1.0);
        assert_eq!(g.nyquist(), Some(4));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Grid::new(2, 1.0).is_err());
        assert!(Grid::new(64, 0.0).is_err());
        assert!(Grid::new(64, f64::NAN).is_err());
    }
}
