//! Periodic quintic B-spline interpolation on the uniform grid.
//!
//! The interpolant is `s(x) = sum_j c_j B(x/h - j)` with `B` the centered
//! cardinal quintic B-spline. The coefficients solve a circulant system whose
//! symbol is `(66 + 52 cos t + 2 cos 2t) / 120 >= 2/15`, so the prefilter is a
//! single division in Fourier space.

use alloc::vec::Vec;

use crate::field::ScalarField;
use crate::grid::Grid;
use crate::spectral::Spectrum;

const DEGREE: usize = 5;

#[derive(Debug, Clone)]
pub struct PeriodicSpline {
    grid: Grid,
    coeffs: Vec<f64>,
}

impl PeriodicSpline {
    pub fn new(f: &ScalarField) -> Self {
        let grid = f.grid().clone();
        let coeffs = prefilter(&Spectrum::of(f)).to_field().into_values();
        PeriodicSpline { grid, coeffs }
    }

    /// Splines of two fields sharing one forward and one inverse transform.
    pub fn new_pair(f: &ScalarField, g: &ScalarField) -> (Self, Self) {
        let (sf, sg) = Spectrum::of_pair(f, g);
        Self::from_spectra(&sf, &sg)
    }

    /// Splines of two fields given by their spectra, sharing one inverse
    /// transform.
    pub(crate) fn from_spectra(a: &Spectrum, b: &Spectrum) -> (Self, Self) {
        let (ca, cb) = Spectrum::to_field_pair(&prefilter(a), &prefilter(b));
        (
            PeriodicSpline {
                grid: a.grid().clone(),
                coeffs: ca.into_values(),
            },
            PeriodicSpline {
                grid: a.grid().clone(),
                coeffs: cb.into_values(),
            },
        )
    }

    /// Spline of the field whose Fourier coefficients are `s`.
    pub(crate) fn from_spectrum(s: &Spectrum) -> Self {
        PeriodicSpline {
            grid: s.grid().clone(),
            coeffs: prefilter(s).to_field().into_values(),
        }
    }

    /// Spline of the field with spectrum `s` together with the field with
    /// spectrum `other`, sharing one inverse transform.
    pub(crate) fn from_spectrum_with(s: &Spectrum, other: &Spectrum) -> (Self, ScalarField) {
        let (c, f) = Spectrum::to_field_pair(&prefilter(s), other);
        (
            PeriodicSpline {
                grid: s.grid().clone(),
                coeffs: c.into_values(),
            },
            f,
        )
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Cell index and offset `u in [0, 1)` of `x`.
    #[inline]
    fn locate(&self, x: f64) -> (usize, f64) {
        let n = self.coeffs.len() as i64;
        let t = x / self.grid.spacing();
        let mut i = t as i64;
        if (i as f64) > t {
            i -= 1;
        }
        let u = (t - i as f64).clamp(0.0, 1.0 - f64::EPSILON);
        (i.rem_euclid(n) as usize, u)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (i, u) = self.locate(x);
        self.dot(i, &basis(u))
    }

    /// Value and first derivative.
    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let (i, u) = self.locate(x);
        let (w, dw) = basis_with_derivative(u);
        (self.dot(i, &w), self.dot(i, &dw) / self.grid.spacing())
    }

    #[inline]
    fn dot(&self, i: usize, w: &[f64; DEGREE + 1]) -> f64 {
        let n = self.coeffs.len();
        // weight k multiplies the spline centered at i - 2 + k
        if i >= 2 && i + 3 < n {
            let c = &self.coeffs[i - 2..i + 4];
            w[0] * c[0] + w[1] * c[1] + w[2] * c[2] + w[3] * c[3] + w[4] * c[4] + w[5] * c[5]
        } else {
            let mut acc = 0.0;
            for (k, wk) in w.iter().enumerate() {
                acc += wk * self.coeffs[(i + n + k - 2) % n];
            }
            acc
        }
    }

    /// Samples the spline at arbitrary points.
    pub fn sample(&self, points: &[f64]) -> Vec<f64> {
        points.iter().map(|&x| self.eval(x)).collect()
    }
}

/// Samples several splines on one grid at the same points, sharing the
/// basis weights.
pub(crate) fn sample_many<const K: usize>(splines: [&PeriodicSpline; K], points: &[f64]) -> [Vec<f64>; K] {
    let mut out: [Vec<f64>; K] = core::array::from_fn(|_| Vec::with_capacity(points.len()));
    for &x in points {
        let (i, u) = splines[0].locate(x);
        let w = basis(u);
        for (o, s) in out.iter_mut().zip(&splines) {
            o.push(s.dot(i, &w));
        }
    }
    out
}

/// Divides by the interpolation symbol `(66 + 52 cos t + 2 cos 2t) / 120`.
fn prefilter(s: &Spectrum) -> Spectrum {
    let inv = s.grid().spline_prefilter();
    let coeffs = s.coeffs().iter().zip(inv).map(|(c, &m)| c.scale(m)).collect();
    Spectrum::from_coeffs(s.grid(), coeffs)
}

/// Uniform quintic B-spline weights on one cell, offset `u`.
#[inline]
fn basis(u: f64) -> [f64; DEGREE + 1] {
    const C: f64 = 1.0 / 120.0;
    let v = 1.0 - u;
    let u2 = u * u;
    let u3 = u2 * u;
    let u4 = u3 * u;
    let u5 = u4 * u;
    let v2 = v * v;
    [
        C * v2 * v2 * v,
        C * (26.0 - 50.0 * u + 20.0 * u2 + 20.0 * u3 - 20.0 * u4 + 5.0 * u5),
        C * (66.0 - 60.0 * u2 + 30.0 * u4 - 10.0 * u5),
        C * (26.0 + 50.0 * u + 20.0 * u2 - 20.0 * u3 - 20.0 * u4 + 10.0 * u5),
        C * (1.0 + 5.0 * u + 10.0 * u2 + 10.0 * u3 + 5.0 * u4 - 5.0 * u5),
        C * u5,
    ]
}

/// Weights and their `u`-derivatives.
#[inline]
fn basis_with_derivative(u: f64) -> ([f64; DEGREE + 1], [f64; DEGREE + 1]) {
    const C: f64 = 1.0 / 24.0;
    let v = 1.0 - u;
    let u2 = u * u;
    let u3 = u2 * u;
    let u4 = u3 * u;
    let v2 = v * v;
    let dw = [
        -C * v2 * v2,
        C * (-10.0 + 8.0 * u + 12.0 * u2 - 16.0 * u3 + 5.0 * u4),
        C * (-24.0 * u + 24.0 * u3 - 10.0 * u4),
        C * (10.0 + 8.0 * u - 12.0 * u2 - 16.0 * u3 + 10.0 * u4),
        C * (1.0 + 4.0 * u + 6.0 * u2 + 4.0 * u3 - 5.0 * u4),
        C * u4,
    ];
    (basis(u), dw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    /// Cox-de Boor recursion for uniform knots: `b[k] = N_{i-d+k, d}(i + u)`.
    fn cox_de_boor<const M: usize>(u: f64) -> [f64; M] {
        let mut b = [0.0; M];
        b[0] = 1.0;
        for d in 1..M {
            let mut next = [0.0; M];
            for k in 0..=d {
                let left = if k >= 1 { (u + (d - k) as f64) * b[k - 1] } else { 0.0 };
                let right = if k < d { (k as f64 + 1.0 - u) * b[k] } else { 0.0 };
                next[k] = (left + right) / d as f64;
            }
            b = next;
        }
        b
    }

    #[test]
    fn closed_form_weights_match_recursion() {
        for m in 0..=50 {
            let u = m as f64 / 50.0;
            let w = basis(u);
            let r = cox_de_boor::<6>(u);
            let lower = cox_de_boor::<5>(u);
            let (_, dw) = basis_with_derivative(u);
            for k in 0..6 {
                assert!((w[k] - r[k]).abs() < 1e-15, "u={u} k={k}");
                let a = if k >= 1 { lower[k - 1] } else { 0.0 };
                let b = if k < 5 { lower[k] } else { 0.0 };
                assert!((dw[k] - (a - b)).abs() < 1e-15, "u={u} k={k}");
            }
        }
    }

    #[test]
    fn basis_is_partition_of_unity() {
        for &u in &[0.0, 0.1, 0.5, 0.9999] {
            let w = basis(u);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            let (_, dw) = basis_with_derivative(u);
            assert!(dw.iter().sum::<f64>().abs() < 1e-14);
        }
        let w = basis(0.0);
        let expect = [1.0, 26.0, 66.0, 26.0, 1.0, 0.0].map(|v| v / 120.0);
        for (a, b) in w.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-16);
        }
    }

    #[test]
    fn interpolates_grid_values() {
        let g = Grid::new(64, 10.0).unwrap();
        let f = ScalarField::from_fn(&g, |x| (x * 0.7).sin() + 0.1 * x.cos()).unwrap();
        let s = PeriodicSpline::new(&f);
        for j in 0..64 {
            assert!((s.eval(g.x(j)) - f.values()[j]).abs() < 1e-13);
        }
    }

    #[test]
    fn sixth_order_accuracy() {
        let l = 2.0 * PI;
        let exact = |x: f64| (x).sin() + 0.3 * (3.0 * x).cos();
        let dexact = |x: f64| x.cos() - 0.9 * (3.0 * x).sin();
        let mut errs = Vec::new();
        for &n in &[32usize, 64] {
            let g = Grid::new(n, l).unwrap();
            let s = PeriodicSpline::new(&ScalarField::from_fn(&g, exact).unwrap());
            let mut e: f64 = 0.0;
            let mut de: f64 = 0.0;
            for m in 0..997 {
                let x = l * m as f64 / 997.0 + 0.0013;
                let (v, dv) = s.eval_with_derivative(x);
                e = e.max((v - exact(x)).abs());
                de = de.max((dv - dexact(x)).abs());
            }
            errs.push((e, de));
        }
        let rate = (errs[0].0 / errs[1].0).log2();
        assert!(rate > 5.5, "value rate {rate}");
        let drate = (errs[0].1 / errs[1].1).log2();
        assert!(drate > 4.5, "derivative rate {drate}");
    }

    #[test]
    fn evaluation_is_periodic() {
        let g = Grid::new(64, 10.0).unwrap();
        let s = PeriodicSpline::new(&ScalarField::from_fn(&g, |x| (x * 0.6 * PI).sin()).unwrap());
        for x in [0.0, 0.03, 4.7, 9.999] {
            for shift in [-20.0, -10.0, 10.0, 30.0] {
                assert!((s.eval(x + shift) - s.eval(x)).abs() < 1e-13, "{x} {shift}");
            }
        }
        assert!((s.eval(-1e-17) - s.eval(0.0)).abs() < 1e-14);
        assert!((s.eval(10.0) - s.eval(0.0)).abs() < 1e-14);
    }

    #[test]
    fn sample_many_matches_sample() {
        let g = Grid::new(32, 10.0).unwrap();
        let f = ScalarField::from_fn(&g, |x| (x * 0.2 * PI).cos()).unwrap();
        let h = ScalarField::from_fn(&g, |x| (x * 0.4 * PI).sin()).unwrap();
        let (sf, sh) = PeriodicSpline::new_pair(&f, &h);
        let points = [-3.1, 0.0, 0.2, 5.55, 9.99, 12.5];
        let [a, b] = sample_many([&sf, &sh], &points);
        assert_eq!(a, sf.sample(&points));
        assert_eq!(b, sh.sample(&points));
    }

    #[test]
    fn pair_matches_single() {
        let g = Grid::new(64, 10.0).unwrap();
        let f = ScalarField::from_fn(&g, |x| (x * 0.6).sin()).unwrap();
        let h = ScalarField::from_fn(&g, |x| (x * 1.2).cos()).unwrap();
        let (sf, sh) = PeriodicSpline::new_pair(&f, &h);
        for x in [0.1, 3.3, 9.99] {
            assert!((sf.eval(x) - PeriodicSpline::new(&f).eval(x)).abs() < 1e-14);
            assert!((sh.eval(x) - PeriodicSpline::new(&h).eval(x)).abs() < 1e-14);
        }
    }
}

