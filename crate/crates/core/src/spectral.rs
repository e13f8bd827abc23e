//! Fourier calculus on the periodic grid.
//!
//! Convention: `f(x) = sum_k c_k exp(i xi_k x)` with `xi_k = 2 pi k / L`, so
//! `c_k` is the unnormalized DFT divided by `n_points`. All multipliers act
//! on these coefficients.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fft::Complex;
use crate::field::ScalarField;
use crate::grid::Grid;
use crate::math;

/// Relative size of the Fourier round-off plateau dropped before
/// differentiation.
pub const CHOP_TOLERANCE: f64 = 1e-14;

/// Sobolev exponent, restricted to the range `s > 3/2` in which the
/// diffeomorphism group is a manifold of `C^1` maps.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SobolevIndex(f64);

impl SobolevIndex {
    pub fn new(s: f64) -> Result<Self> {
        if s.is_finite() && s > 1.5 {
            Ok(SobolevIndex(s))
        } else {
            Err(Error::param("s", s, "> 3/2"))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// The exponent `s - 1` used for the density.
    #[inline]
    pub fn density(self) -> f64 {
        self.0 - 1.0
    }
}

impl Default for SobolevIndex {
    fn default() -> Self {
        SobolevIndex(2.0)
    }
}

/// Fourier coefficients of a field, kept so that several multipliers can be
/// applied after a single forward transform.
#[derive(Debug, Clone)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex>,
}

impl Spectrum {
    pub fn of(f: &ScalarField) -> Self {
        let grid = f.grid().clone();
        let inv_n = 1.0 / grid.n_points() as f64;
        let mut coeffs = grid.plan().forward_real(f.values());
        for c in coeffs.iter_mut() {
            *c *= inv_n;
        }
        Spectrum { grid, coeffs }
    }

    /// Spectra of two fields on the same grid with one transform.
    pub fn of_pair(f: &ScalarField, g: &ScalarField) -> (Self, Self) {
        let grid = f.grid().clone();
        assert!(grid.same_as(g.grid()), "fields live on different grids");
        let inv_n = 1.0 / grid.n_points() as f64;
        let (mut a, mut b) = grid.plan().forward_real_pair(f.values(), g.values());
        for c in a.iter_mut().chain(b.iter_mut()) {
            *c *= inv_n;
        }
        (
            Spectrum {
                grid: grid.clone(),
                coeffs: a,
            },
            Spectrum { grid, coeffs: b },
        )
    }

    pub(crate) fn from_coeffs(grid: &Grid, coeffs: Vec<Complex>) -> Self {
        Spectrum {
            grid: grid.clone(),
            coeffs,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    /// Multiplies every coefficient by `m(k_index, xi_k)`.
    pub fn map(&self, m: impl Fn(usize, f64) -> Complex) -> Spectrum {
        let xi = self.grid.wavenumbers();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| m(k, xi[k]) * c)
            .collect();
        Spectrum::from_coeffs(&self.grid, coeffs)
    }

    /// `(i xi)^order` applied to the coefficients; odd orders drop the
    /// Nyquist mode, whose derivative is not real.
    ///
    /// Coefficients at the round-off plateau (below [`CHOP_TOLERANCE`] times
    /// the largest one) are zeroed first, since the multiplier would amplify
    /// them by up to `xi_max^order`.
    pub fn derivative(&self, order: u32) -> Spectrum {
        let nyq = self.grid.nyquist();
        let floor = CHOP_TOLERANCE * self.max_abs();
        let xi = self.grid.wavenumbers();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                if (order % 2 == 1 && Some(k) == nyq) || c.norm_sqr() <= floor * floor {
                    Complex::ZERO
                } else {
                    ipow(xi[k], order) * c
                }
            })
            .collect();
        Spectrum::from_coeffs(&self.grid, coeffs)
    }

    fn max_abs(&self) -> f64 {
        math::sqrt(self.coeffs.iter().fold(0.0, |m, c| c.norm_sqr().max(m)))
    }

    /// `(1 + xi^2)^{-1}` applied to the coefficients, with the round-off
    /// plateau zeroed as in [`Spectrum::derivative`]: a high mode shrinks by
    /// up to `1 + xi_max^2` relative to the plateau in the low modes.
    pub fn helmholtz_inverse(&self) -> Spectrum {
        let floor = CHOP_TOLERANCE * self.max_abs();
        let xi = self.grid.wavenumbers();
        let coeffs = self
            .coeffs
            .iter()
            .zip(xi)
            .map(|(&c, &x)| {
                if c.norm_sqr() <= floor * floor {
                    Complex::ZERO
                } else {
                    c.scale(1.0 / (1.0 + x * x))
                }
            })
            .collect();
        Spectrum::from_coeffs(&self.grid, coeffs)
    }

    pub fn dealias(&self) -> Spectrum {
        let cut = self.grid.dealias_cutoff();
        let grid = self.grid.clone();
        self.map(move |k, _| {
            if grid.mode(k).abs() > cut {
                Complex::ZERO
            } else {
                Complex::new(1.0, 0.0)
            }
        })
    }

    pub fn to_field(&self) -> ScalarField {
        let values = self.grid.plan().inverse_real(self.coeffs.clone());
        ScalarField::from_raw(&self.grid, values)
    }

    /// Back-transforms two spectra with one inverse transform.
    pub fn to_field_pair(a: &Spectrum, b: &Spectrum) -> (ScalarField, ScalarField) {
        let (x, y) = a.grid.plan().inverse_real_pair(&a.coeffs, &b.coeffs);
        (
            ScalarField::from_raw(&a.grid, x),
            ScalarField::from_raw(&a.grid, y),
        )
    }

    /// `( L * sum_k (1 + xi_k^2)^s |c_k|^2 )^{1/2}`
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let xi = self.grid.wavenumbers();
        let sum: f64 = self
            .coeffs
            .iter()
            .zip(xi)
            .map(|(c, &x)| {
                let w = 1.0 + x * x;
                let weight = if s == 0.0 {
                    1.0
                } else if s == 1.0 {
                    w
                } else if s == 2.0 {
                    w * w
                } else {
                    math::powf(w, s)
                };
                weight * c.norm_sqr()
            })
            .sum();
        math::sqrt(sum * self.grid.length())
    }
}

/// `(i xi)^order`
fn ipow(xi: f64, order: u32) -> Complex {
    let mut mag = 1.0;
    for _ in 0..order {
        mag *= xi;
    }
    match order % 4 {
        0 => Complex::new(mag, 0.0),
        1 => Complex::new(0.0, mag),
        2 => Complex::new(-mag, 0.0),
        _ => Complex::new(0.0, -mag),
    }
}

/// Spectral derivative of the given order (`order >= 1`).
pub fn derivative(f: &ScalarField, order: i32) -> Result<ScalarField> {
    if order <= 0 {
        return Err(Error::param("order", order as f64, ">= 1"));
    }
    Ok(Spectrum::of(f).derivative(order as u32).to_field())
}

/// Solves `(1 - d_xx) g = f`.
pub fn helmholtz_inverse(f: &ScalarField) -> ScalarField {
    Spectrum::of(f).helmholtz_inverse().to_field()
}

/// `H^s` norm with the `(1 + xi^2)^s` weight; `s = 0` gives the `L^2` norm.
pub fn sobolev_norm(f: &ScalarField, s: f64) -> Result<f64> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::param("s", s, ">= 0"));
    }
    Ok(Spectrum::of(f).sobolev_norm(s))
}

/// Removes every mode with `|k| > (n_points - 1) / 3`.
pub fn dealias(f: &ScalarField) -> ScalarField {
    Spectrum::of(f).dealias().to_field()
}

/// Pointwise product followed by two-thirds truncation.
pub fn multiply_dealiased(f: &ScalarField, g: &ScalarField) -> Result<ScalarField> {
    if !f.grid().same_as(g.grid()) {
        return Err(Error::GridMismatch);
    }
    Ok(dealias(&f.pointwise_mul(g)))
}

/// Exponential low-pass filter `exp(-alpha (|k|/k_max)^order)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralFilter {
    pub alpha: f64,
    pub order: u32,
}

impl Default for SpectralFilter {
    fn default() -> Self {
        SpectralFilter {
            alpha: 36.0,
            order: 36,
        }
    }
}

impl SpectralFilter {
    pub fn apply(&self, f: &ScalarField) -> ScalarField {
        let grid = f.grid().clone();
        let kmax = (grid.n_points() / 2) as f64;
        Spectrum::of(f)
            .map(|k, _| {
                let r = (grid.mode(k).unsigned_abs() as f64) / kmax;
                Complex::new(math::exp(-self.alpha * math::powf(r, self.order as f64)), 0.0)
            })
            .to_field()
    }
}
