//! Analytic initial data.
//!
//! All profiles are built from two standard `C^∞` pieces:
//!
//! * `bump(y) = e * exp(-1 / (1 - y^2))` for `|y| < 1`, zero otherwise
//!   (normalized to peak value 1 at `y = 0`);
//! * `step(y) = f(y) / (f(y) + f(1 - y))` with `f(y) = exp(-1/y)` for `y > 0`,
//!   zero otherwise, rising from 0 at `y <= 0` to 1 at `y >= 1`.
//!
//! Named presets on a grid of length `L`:
//!
//! | name          | `u0(x)`                                   | `rho0(x)`                          |
//! |---------------|-------------------------------------------|------------------------------------|
//! | `bump-pair`   | `bump((x - 0.425 L) / 3)`                 | `0.5 bump((x - 0.575 L) / 3)`      |
//! | `constant`    | `1`                                       | `0`                                |
//! | `single-mode` | `0.5 sin(2 pi x / L)`                     | `0`                                |
//! | `momentum-bump` | `(1 - d_xx)^{-1} [4 bump((x - L/2) / 2)]` | `0.2 bump((x - L/2) / 2)`        |
//!
//! `momentum-bump` has positive momentum `u - u_xx` and moves fast enough
//! that the time stepping error at `dt = 5e-4` stays above round-off.

use core::f64::consts::{E, PI};
use core::fmt;
use core::str::FromStr;

use crate::error::Result;
use crate::field::ScalarField;
use crate::grid::Grid;
use crate::math;
use crate::spectral::helmholtz_inverse;

/// Peak-normalized compact bump supported on `(-1, 1)`.
pub fn bump(y: f64) -> f64 {
    if math::abs(y) < 1.0 {
        E * math::exp(-1.0 / (1.0 - y * y))
    } else {
        0.0
    }
}

fn transition(y: f64) -> f64 {
    if y > 0.0 {
        math::exp(-1.0 / y)
    } else {
        0.0
    }
}

/// Smooth monotone step from 0 (`y <= 0`) to 1 (`y >= 1`).
pub fn step(y: f64) -> f64 {
    let a = transition(y);
    let b = transition(1.0 - y);
    a / (a + b)
}

/// Smooth plateau: 0 outside `[a, b]`, 1 on `[a + ramp_left, b - ramp_right]`.
pub fn plateau(x: f64, a: f64, b: f64, ramp_left: f64, ramp_right: f64) -> f64 {
    step((x - a) / ramp_left) * step((b - x) / ramp_right)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    BumpPair,
    Constant,
    SingleMode,
    MomentumBump,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::BumpPair,
        Preset::Constant,
        Preset::SingleMode,
        Preset::MomentumBump,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::BumpPair => "bump-pair",
            Preset::Constant => "constant",
            Preset::SingleMode => "single-mode",
            Preset::MomentumBump => "momentum-bump",
        }
    }

    /// `(u0, rho0)` sampled on `grid`.
    pub fn fields(self, grid: &Grid) -> Result<(ScalarField, ScalarField)> {
        let l = grid.length();
        match self {
            Preset::BumpPair => Ok((
                ScalarField::from_fn(grid, |x| bump((x - 0.425 * l) / 3.0))?,
                ScalarField::from_fn(grid, |x| 0.5 * bump((x - 0.575 * l) / 3.0))?,
            )),
            Preset::Constant => Ok((ScalarField::constant(grid, 1.0), ScalarField::zeros(grid))),
            Preset::SingleMode => Ok((
                ScalarField::from_fn(grid, |x| 0.5 * math::sin(2.0 * PI * x / l))?,
                ScalarField::zeros(grid),
            )),
            Preset::MomentumBump => Ok((
                helmholtz_inverse(&ScalarField::from_fn(grid, |x| 4.0 * bump((x - 0.5 * l) / 2.0))?),
                ScalarField::from_fn(grid, |x| 0.2 * bump((x - 0.5 * l) / 2.0))?,
            )),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = ();

    fn from_str(s: &str) -> core::result::Result<Self, ()> {
        Preset::ALL.into_iter().find(|p| p.name() == s).ok_or(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles() {
        assert_eq!(bump(0.0), 1.0);
        assert_eq!(bump(1.0), 0.0);
        assert_eq!(step(0.0), 0.0);
        assert_eq!(step(1.0), 1.0);
        assert!((step(0.5) - 0.5).abs() < 1e-15);
        assert_eq!(plateau(5.0, 0.0, 10.0, 2.0, 3.0), 1.0);
        assert_eq!(plateau(10.5, 0.0, 10.0, 2.0, 3.0), 0.0);
    }

    #[test]
    fn preset_names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>(), Ok(p));
        }
        assert!("peakon".parse::<Preset>().is_err());
    }
}
