//! Discrete Fourier transforms for the periodic grid.
//!
//! Power-of-two lengths use an iterative radix-2 transform with precomputed
//! twiddles; any other length falls back to a direct `O(n^2)` DFT. Transforms
//! are unnormalized in both directions.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub};

use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };

    #[inline]
    pub const fn new(re: f64, im: f64) -> Self {
        Complex { re, im }
    }

    #[inline]
    pub fn conj(self) -> Self {
        Complex::new(self.re, -self.im)
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        Complex::new(self.re * s, self.im * s)
    }

    /// Multiplication by `i`.
    #[inline]
    pub fn mul_i(self) -> Self {
        Complex::new(-self.im, self.re)
    }
}

impl Add for Complex {
    type Output = Complex;
    #[inline]
    fn add(self, o: Complex) -> Complex {
        Complex::new(self.re + o.re, self.im + o.im)
    }
}

impl AddAssign for Complex {
    #[inline]
    fn add_assign(&mut self, o: Complex) {
        self.re += o.re;
        self.im += o.im;
    }
}

impl Sub for Complex {
    type Output = Complex;
    #[inline]
    fn sub(self, o: Complex) -> Complex {
        Complex::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Complex {
    type Output = Complex;
    #[inline]
    fn mul(self, o: Complex) -> Complex {
        Complex::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

impl MulAssign<f64> for Complex {
    #[inline]
    fn mul_assign(&mut self, s: f64) {
        self.re *= s;
        self.im *= s;
    }
}

impl Neg for Complex {
    type Output = Complex;
    #[inline]
    fn neg(self) -> Complex {
        Complex::new(-self.re, -self.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Inverse,
}

/// Immutable transform plan; safe to share between threads.
#[derive(Debug)]
pub struct FftPlan {
    n: usize,
    /// `exp(-2 pi i k / n)` for `k < n` (only `k < n/2` used by radix-2).
    twiddles: Vec<Complex>,
    bit_reverse: Vec<u32>,
    /// Per-stage twiddles laid out contiguously: stage with half-length `m`
    /// occupies `[m - 1, 2m - 1)`.
    stage_forward: Vec<Complex>,
    stage_inverse: Vec<Complex>,
    radix2: bool,
    /// Plan of length `n / 2` for real transforms, when `n` is an even power of two.
    half: Option<alloc::boxed::Box<FftPlan>>,
}

impl FftPlan {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "transform length must be positive");
        let twiddles: Vec<Complex> = (0..n)
            .map(|k| {
                let angle = -2.0 * PI * (k as f64) / (n as f64);
                Complex::new(math::cos(angle), math::sin(angle))
            })
            .collect();
        let radix2 = n.is_power_of_two();
        let bit_reverse = if radix2 {
            let bits = n.trailing_zeros();
            (0..n as u32)
                .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (32 - bits) })
                .collect()
        } else {
            Vec::new()
        };
        let mut stage_forward = Vec::new();
        if radix2 {
            let mut half = 1;
            while half < n {
                let stride = n / (2 * half);
                stage_forward.extend((0..half).map(|k| twiddles[k * stride]));
                half *= 2;
            }
        }
        let stage_inverse = stage_forward.iter().map(|w: &Complex| w.conj()).collect();
        FftPlan {
            n,
            twiddles,
            bit_reverse,
            stage_forward,
            stage_inverse,
            radix2,
            half: (radix2 && n >= 4).then(|| alloc::boxed::Box::new(FftPlan::new(n / 2))),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In-place `X_k = sum_j x_j exp(-2 pi i jk/n)`.
    pub fn forward(&self, data: &mut [Complex]) {
        self.transform(data, Direction::Forward);
    }

    /// In-place `x_j = sum_k X_k exp(2 pi i jk/n)` (no `1/n`).
    pub fn inverse(&self, data: &mut [Complex]) {
        self.transform(data, Direction::Inverse);
    }

    fn transform(&self, data: &mut [Complex], dir: Direction) {
        assert_eq!(data.len(), self.n, "buffer length does not match plan");
        if self.radix2 {
            self.radix2_in_place(data, dir);
        } else {
            self.direct(data, dir);
        }
    }

    fn twiddle(&self, k: usize, dir: Direction) -> Complex {
        let w = self.twiddles[k];
        match dir {
            Direction::Forward => w,
            Direction::Inverse => w.conj(),
        }
    }

    fn radix2_in_place(&self, data: &mut [Complex], dir: Direction) {
        let n = self.n;
        for i in 0..n {
            let j = self.bit_reverse[i] as usize;
            if j > i {
                data.swap(i, j);
            }
        }
        let table = match dir {
            Direction::Forward => &self.stage_forward,
            Direction::Inverse => &self.stage_inverse,
        };
        if n >= 2 {
            for pair in data.chunks_exact_mut(2) {
                let (a, b) = (pair[0], pair[1]);
                pair[0] = a + b;
                pair[1] = a - b;
            }
        }
        let mut half = 2;
        while half < n {
            let tw = &table[half - 1..2 * half - 1];
            for block in data.chunks_exact_mut(2 * half) {
                let (lo, hi) = block.split_at_mut(half);
                for ((a, b), w) in lo.iter_mut().zip(hi.iter_mut()).zip(tw) {
                    let t = *w * *b;
                    let x = *a;
                    *a = x + t;
                    *b = x - t;
                }
            }
            half *= 2;
        }
    }

    fn direct(&self, data: &mut [Complex], dir: Direction) {
        let n = self.n;
        let input = data.to_vec();
        for (k, out) in data.iter_mut().enumerate() {
            let mut acc = Complex::ZERO;
            for (j, x) in input.iter().enumerate() {
                acc += self.twiddle((j * k) % n, dir) * *x;
            }
            *out = acc;
        }
    }

    /// Forward transform of a real signal; returns the full spectrum.
    pub fn forward_real(&self, x: &[f64]) -> Vec<Complex> {
        assert_eq!(x.len(), self.n, "buffer length does not match plan");
        let Some(half) = &self.half else {
            let mut buf: Vec<Complex> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
            self.forward(&mut buf);
            return buf;
        };
        let n = self.n;
        let m = n / 2;
        let mut z: Vec<Complex> = x.chunks_exact(2).map(|p| Complex::new(p[0], p[1])).collect();
        half.forward(&mut z);
        let mut out = vec![Complex::ZERO; n];
        for k in 0..m {
            let zk = z[k];
            let zc = z[(m - k) % m].conj();
            let even = (zk + zc).scale(0.5);
            let d = zk - zc;
            // (zk - zc) / (2i)
            let odd = Complex::new(0.5 * d.im, -0.5 * d.re);
            let t = self.twiddles[k] * odd;
            out[k] = even + t;
            out[k + m] = even - t;
        }
        out
    }

    /// Forward transforms of two real signals with one complex transform.
    pub fn forward_real_pair(&self, a: &[f64], b: &[f64]) -> (Vec<Complex>, Vec<Complex>) {
        let n = self.n;
        let mut z: Vec<Complex> = a
            .iter()
            .zip(b)
            .map(|(&x, &y)| Complex::new(x, y))
            .collect();
        self.forward(&mut z);
        let mut fa = vec![Complex::ZERO; n];
        let mut fb = vec![Complex::ZERO; n];
        for k in 0..n {
            let zk = z[k];
            let zm = z[(n - k) % n].conj();
            fa[k] = (zk + zm).scale(0.5);
            // (zk - zm) / (2i)
            let d = zk - zm;
            fb[k] = Complex::new(d.im * 0.5, -d.re * 0.5);
        }
        (fa, fb)
    }

    /// Inverse transform of a Hermitian spectrum; returns the real part.
    pub fn inverse_real(&self, mut spec: Vec<Complex>) -> Vec<f64> {
        assert_eq!(spec.len(), self.n, "buffer length does not match plan");
        let Some(half) = &self.half else {
            self.inverse(&mut spec);
            return spec.into_iter().map(|c| c.re).collect();
        };
        let n = self.n;
        let m = n / 2;
        // even and odd samples: E_k = (X_k + X_{k+m}) / 2,
        // O_k = (X_k - X_{k+m}) exp(2 pi i k / n) / 2, z = E + i O
        let mut z: Vec<Complex> = (0..m)
            .map(|k| {
                let hi = spec[k + m];
                let e = spec[k] + hi;
                let o = (spec[k] - hi) * self.twiddles[k].conj();
                e + o.mul_i()
            })
            .collect();
        half.inverse(&mut z);
        let mut out = Vec::with_capacity(n);
        for c in z {
            out.push(c.re);
            out.push(c.im);
        }
        out
    }

    /// Inverse transforms of two Hermitian spectra with one complex transform.
    pub fn inverse_real_pair(&self, a: &[Complex], b: &[Complex]) -> (Vec<f64>, Vec<f64>) {
        let mut z: Vec<Complex> = a.iter().zip(b).map(|(&x, &y)| x + y.mul_i()).collect();
        self.inverse(&mut z);
        let re = z.iter().map(|c| c.re).collect();
        let im = z.iter().map(|c| c.im).collect();
        (re, im)
    }
}
