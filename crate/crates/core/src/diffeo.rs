//! Orientation preserving diffeomorphisms of the periodic domain.
//!
//! A [`Diffeo`] is stored as `phi(x) = x + d(x)` with a periodic displacement
//! `d`, so `phi(x + L) = phi(x) + L`. Off-grid evaluation of fields goes
//! through the periodic quintic spline; derivatives are spectral.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::Grid;
use crate::math;
use crate::spectral::Spectrum;
use crate::spline::PeriodicSpline;

/// Lower bound on `phi_x` below which a map is no longer accepted.
pub const DEFAULT_VALIDITY_MARGIN: f64 = 1e-8;

const INVERSION_MAX_ITER: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct Diffeo {
    displacement: ScalarField,
}

/// Outcome of [`Diffeo::validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validity {
    pub valid: bool,
    pub min_phi_x: f64,
    /// Grid point where the minimum is attained.
    pub at: f64,
}

impl Diffeo {
    pub fn identity(grid: &Grid) -> Self {
        Diffeo {
            displacement: ScalarField::zeros(grid),
        }
    }

    pub fn translation(grid: &Grid, c: f64) -> Self {
        Diffeo {
            displacement: ScalarField::constant(grid, c),
        }
    }

    /// Wraps a displacement field. No validity check: call [`Diffeo::validate`].
    pub fn from_displacement(displacement: ScalarField) -> Self {
        Diffeo { displacement }
    }

    pub fn grid(&self) -> &Grid {
        self.displacement.grid()
    }

    pub fn displacement(&self) -> &ScalarField {
        &self.displacement
    }

    pub fn into_displacement(self) -> ScalarField {
        self.displacement
    }

    /// `phi_x = 1 + d'`
    pub fn phi_x(&self) -> ScalarField {
        Spectrum::of(&self.displacement)
            .derivative(1)
            .to_field()
            .map(|v| 1.0 + v)
    }

    /// `phi(x_j)` in unwrapped coordinates.
    pub fn grid_images(&self) -> Vec<f64> {
        let g = self.grid();
        self.displacement
            .values()
            .iter()
            .enumerate()
            .map(|(j, d)| g.x(j) + d)
            .collect()
    }

    /// `phi(x)` for arbitrary `x`, unwrapped.
    pub fn eval(&self, x: f64) -> f64 {
        x + self.displacement.eval(x)
    }

    pub fn validate(&self, margin: f64) -> Validity {
        validity_of(&self.phi_x(), margin)
    }

    pub(crate) fn require_valid(&self, margin: f64) -> Result<ScalarField> {
        let phi_x = self.phi_x();
        let v = validity_of(&phi_x, margin);
        if v.valid {
            Ok(phi_x)
        } else {
            Err(Error::InvalidDiffeo {
                min_phi_x: v.min_phi_x,
                at: v.at,
            })
        }
    }

    /// `self ∘ inner`, i.e. `x -> self(inner(x))`.
    pub fn after(&self, inner: &Diffeo) -> Result<Diffeo> {
        if !self.grid().same_as(inner.grid()) {
            return Err(Error::GridMismatch);
        }
        inner.require_valid(DEFAULT_VALIDITY_MARGIN)?;
        let spline = PeriodicSpline::new(&self.displacement);
        let values = inner
            .grid_images()
            .iter()
            .zip(inner.displacement.values())
            .map(|(&p, &d)| d + spline.eval(p))
            .collect();
        Ok(Diffeo::from_displacement(ScalarField::from_raw(
            self.grid(),
            values,
        )))
    }
}

pub(crate) fn validity_of(phi_x: &ScalarField, margin: f64) -> Validity {
    let (min_phi_x, idx) = phi_x.min_with_index();
    Validity {
        valid: min_phi_x > margin && phi_x.is_finite(),
        min_phi_x,
        at: phi_x.grid().x(idx),
    }
}

/// Samples `f ∘ phi` on the grid.
pub fn compose(f: &ScalarField, phi: &Diffeo) -> Result<ScalarField> {
    if !f.grid().same_as(phi.grid()) {
        return Err(Error::GridMismatch);
    }
    phi.require_valid(DEFAULT_VALIDITY_MARGIN)?;
    Ok(compose_unchecked(&PeriodicSpline::new(f), phi))
}

pub(crate) fn compose_unchecked(spline: &PeriodicSpline, phi: &Diffeo) -> ScalarField {
    let values = phi.grid_images().iter().map(|&p| spline.eval(p)).collect();
    ScalarField::from_raw(spline.grid(), values)
}

/// Inverse map, solved pointwise by bracketing on the grid images followed by
/// safeguarded Newton iteration on the spline of `phi`.
pub fn invert(phi: &Diffeo) -> Result<Diffeo> {
    phi.require_valid(DEFAULT_VALIDITY_MARGIN)?;
    invert_unchecked(phi)
}

pub(crate) fn invert_unchecked(phi: &Diffeo) -> Result<Diffeo> {
    invert_with_spline(phi, &PeriodicSpline::new(&phi.displacement))
}

/// Inversion given the spline of the displacement.
pub(crate) fn invert_with_spline(phi: &Diffeo, spline: &PeriodicSpline) -> Result<Diffeo> {
    let grid = phi.grid().clone();
    let n = grid.n_points();
    let h = grid.spacing();
    let d = phi.displacement.values();
    let tol = 1e-13 * grid.length();

    // image of extended grid index k: k h + d_{k mod n}
    let image = |k: i64| k as f64 * h + d[k.rem_euclid(n as i64) as usize];

    // targets increase with i and images are monotone, so the bracket only
    // ever moves right
    let y0 = grid.x(0);
    let mut lo = math::floor((y0 - phi.displacement.max()) / h) as i64 - 1;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let y = grid.x(i);
        while image(lo + 1) <= y {
            lo += 1;
        }
        let hi = lo + 1;
        let root = solve_in_cell(spline, y, lo as f64 * h, hi as f64 * h, image(lo), image(hi), tol)?;
        out.push(root - y);
    }
    Ok(Diffeo::from_displacement(ScalarField::from_raw(&grid, out)))
}

fn solve_in_cell(
    spline: &PeriodicSpline,
    y: f64,
    mut a: f64,
    mut b: f64,
    pa: f64,
    pb: f64,
    tol: f64,
) -> Result<f64> {
    if pa == y {
        return Ok(a);
    }
    // start from the secant through the grid images
    let mut x = a + (y - pa) * (b - a) / (pb - pa);
    for _ in 0..INVERSION_MAX_ITER {
        let (s, ds) = spline.eval_with_derivative(x);
        let g = x + s - y;
        if math::abs(g) <= tol {
            return Ok(x);
        }
        if g < 0.0 {
            a = x;
        } else {
            b = x;
        }
        let slope = 1.0 + ds;
        let newton = x - g / slope;
        if slope > 0.0 && math::abs(newton - x) <= tol {
            return Ok(newton);
        }
        x = if slope > 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if b - a <= 4.0 * f64::EPSILON * math::abs(x).max(1.0) {
            return Ok(x);
        }
    }
    Err(Error::InversionFailed {
        target: y,
        iterations: INVERSION_MAX_ITER,
    })
}

/// `d_x(w ∘ phi^{-1}) ∘ phi = w_x / phi_x`, evaluated without inverting `phi`.
pub fn conjugated_derivative(w: &ScalarField, phi: &Diffeo) -> Result<ScalarField> {
    if !w.grid().same_as(phi.grid()) {
        return Err(Error::GridMismatch);
    }
    let phi_x = phi.require_valid(DEFAULT_VALIDITY_MARGIN)?;
    let wx = Spectrum::of(w).derivative(1).to_field();
    Ok(wx.zip_map(&phi_x, |a, b| a / b))
}
