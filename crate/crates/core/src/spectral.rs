//! Periodic grid functions on `[0, 2pi)` and their FFT-backed calculus.
//!
//! Fourier convention: `f(a) = sum_k c_k e^{i k a}` with `k = -n/2 .. n/2-1`,
//! so `c_k = (1/n) sum_j f_j e^{-i k a_j}`. All `L^2`-type norms integrate over
//! one period, i.e. `||f||_2^2 = 2 pi sum_k |c_k|^2`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::GridError;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn forward_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

fn inverse_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// Signed wavenumber stored at FFT index `j`.
#[inline]
pub fn wavenumber(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Grid node `a_j = 2 pi j / n`.
#[inline]
pub fn node(j: usize, n: usize) -> f64 {
    2.0 * PI * j as f64 / n as f64
}

pub fn check_size(n: usize) -> Result<(), GridError> {
    if n >= 16 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(GridError::BadSize(n))
    }
}

/// A complex 2pi-periodic function sampled at `a_j = 2 pi j / n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    values: Vec<Complex64>,
}

/// Discrete Fourier coefficients of a [`GridFunction`], stored in FFT order.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(n: usize) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    fn index(&self, k: i64) -> usize {
        let n = self.n() as i64;
        assert!(k >= -n / 2 && k < n / 2, "wavenumber {k} outside grid band");
        k.rem_euclid(n) as usize
    }

    /// Coefficient `c_k`, `-n/2 <= k < n/2`.
    pub fn get(&self, k: i64) -> Complex64 {
        self.coeffs[self.index(k)]
    }

    pub fn set(&mut self, k: i64, c: Complex64) {
        let i = self.index(k);
        self.coeffs[i] = c;
    }

    /// `(k, c_k)` pairs in FFT order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n = self.n();
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(j, c)| (wavenumber(j, n), *c))
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Multiplies every coefficient by `m(k)`.
    pub fn map(mut self, m: impl Fn(i64) -> Complex64) -> Self {
        let n = self.n();
        for (j, c) in self.coeffs.iter_mut().enumerate() {
            *c *= m(wavenumber(j, n));
        }
        self
    }

    pub fn to_physical(&self) -> GridFunction {
        let n = self.n();
        let mut buf: Vec<Complex64> = self.coeffs.iter().map(|c| c * n as f64).collect();
        // inverse FFT of n*c_k gives n * f_j; rustfft is unnormalized
        inverse_plan(n).process(&mut buf);
        for v in buf.iter_mut() {
            *v /= n as f64;
        }
        GridFunction { values: buf }
    }
}

impl GridFunction {
    pub fn new(values: Vec<Complex64>) -> Result<Self, GridError> {
        check_size(values.len())?;
        Ok(Self { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self, GridError> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Samples `f` at the grid nodes. Panics on an invalid size.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> Complex64) -> Self {
        check_size(n).expect("invalid grid size");
        Self {
            values: (0..n).map(|j| f(node(j, n))).collect(),
        }
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        Self::from_fn(n, |_| c)
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, Complex64::new(0.0, 0.0))
    }

    /// Single Fourier mode `c e^{i k a}`.
    pub fn mode(n: usize, k: i64, c: Complex64) -> Self {
        Self::from_fn(n, |x| c * Complex64::from_polar(1.0, k as f64 * x))
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn spectrum(&self) -> Spectrum {
        let n = self.n();
        let mut buf = self.values.clone();
        forward_plan(n).process(&mut buf);
        for c in buf.iter_mut() {
            *c /= n as f64;
        }
        Spectrum { coeffs: buf }
    }

    /// Applies the Fourier multiplier `m(k)`.
    pub fn multiplier(&self, m: impl Fn(i64) -> Complex64) -> GridFunction {
        self.spectrum().map(m).to_physical()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> GridFunction {
        GridFunction {
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(
        &self,
        other: &GridFunction,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> GridFunction {
        assert_eq!(self.n(), other.n(), "grid size mismatch");
        GridFunction {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn conj(&self) -> GridFunction {
        self.map(|v| v.conj())
    }

    pub fn re(&self) -> GridFunction {
        self.map(|v| Complex64::new(v.re, 0.0))
    }

    pub fn im(&self) -> GridFunction {
        self.map(|v| Complex64::new(v.im, 0.0))
    }

    pub fn recip(&self) -> GridFunction {
        self.map(|v| v.inv())
    }

    pub fn abs(&self) -> GridFunction {
        self.map(|v| Complex64::new(v.norm(), 0.0))
    }

    pub fn abs_sq(&self) -> GridFunction {
        self.map(|v| Complex64::new(v.norm_sqr(), 0.0))
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> GridFunction {
        let c = c.into();
        self.map(|v| v * c)
    }

    pub fn add_const(&self, c: impl Into<Complex64>) -> GridFunction {
        let c = c.into();
        self.map(|v| v + c)
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.n() as f64
    }

    /// Periodic trapezoid rule over one period.
    pub fn integrate(&self) -> Complex64 {
        self.mean() * (2.0 * PI)
    }

    pub fn norm_l2(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (s * 2.0 * PI / self.n() as f64).sqrt()
    }

    pub fn norm_linf(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_re(&self) -> f64 {
        self.values.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_re(&self) -> f64 {
        self.values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min)
    }

    pub fn min_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_imag_abs(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// L-infinity distance to another grid function.
    pub fn dist_linf(&self, other: &GridFunction) -> f64 {
        (self - other).norm_linf()
    }

    /// Cyclic translation by `m` grid points: `g_j = f_{j+m}`.
    pub fn shift(&self, m: isize) -> GridFunction {
        let n = self.n() as isize;
        GridFunction {
            values: (0..n)
                .map(|j| self.values[(j + m).rem_euclid(n) as usize])
                .collect(),
        }
    }

    /// Trigonometric interpolant evaluated at an arbitrary point; the Nyquist
    /// mode is split symmetrically (cosine).
    pub fn eval_at(&self, x: f64) -> Complex64 {
        let spec = self.spectrum();
        eval_spectrum(&spec, x)
    }

    /// Same grid function on `n_new` nodes (zero-padding or truncation in
    /// Fourier space).
    pub fn resample(&self, n_new: usize) -> GridFunction {
        let n = self.n();
        let spec = self.spectrum();
        let mut out = Spectrum::zeros(n_new);
        let band = (n.min(n_new) / 2) as i64;
        for (k, c) in spec.iter() {
            if k.abs() < band {
                out.set(k, c);
            }
        }
        out.to_physical()
    }

    /// Zeroes every mode with `|k| > cutoff`.
    pub fn truncate(&self, cutoff: usize) -> GridFunction {
        let cut = cutoff as i64;
        let n = self.n() as i64;
        self.multiplier(|k| {
            if k.abs() > cut || k == -n / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(1.0, 0.0)
            }
        })
    }
}

/// Evaluates `sum_k c_k e^{ikx}` with the Nyquist coefficient split.
pub fn eval_spectrum(spec: &Spectrum, x: f64) -> Complex64 {
    let n = spec.n() as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, c) in spec.iter() {
        if k == -n / 2 {
            acc += c * (k as f64 * x).cos();
        } else {
            acc += c * Complex64::from_polar(1.0, k as f64 * x);
        }
    }
    acc
}

macro_rules! binop {
    ($tr:ident, $f:ident, $op:tt) => {
        impl $tr<&GridFunction> for &GridFunction {
            type Output = GridFunction;
            fn $f(self, rhs: &GridFunction) -> GridFunction {
                self.zip_map(rhs, |a, b| a $op b)
            }
        }

        impl $tr<GridFunction> for GridFunction {
            type Output = GridFunction;
            fn $f(self, rhs: GridFunction) -> GridFunction {
                self.zip_map(&rhs, |a, b| a $op b)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for &GridFunction {
    type Output = GridFunction;
    fn neg(self) -> GridFunction {
        self.map(|v| -v)
    }
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Spectral derivative; the Nyquist mode is dropped.
pub fn derivative(f: &GridFunction) -> GridFunction {
    let n = f.n() as i64;
    f.multiplier(|k| {
        if k == -n / 2 {
            zero()
        } else {
            Complex64::new(0.0, k as f64)
        }
    })
}

/// `p`-th spectral derivative.
pub fn derivative_n(f: &GridFunction, p: u32) -> GridFunction {
    let n = f.n() as i64;
    f.multiplier(|k| {
        if k == -n / 2 {
            zero()
        } else {
            Complex64::new(0.0, k as f64).powu(p)
        }
    })
}

/// Multiplier of the lower half-plane Hilbert transform: `-sgn(k)`, with the
/// mean and Nyquist modes mapped to zero.
#[inline]
pub fn hilbert_symbol(k: i64, n: usize) -> f64 {
    if k == 0 || k == -(n as i64) / 2 {
        0.0
    } else {
        -(k.signum() as f64)
    }
}

/// `H f = (1/(pi i)) pv int f(b)/(a-b) db`, periodized: multiplier `-sgn(k)`.
pub fn hilbert(f: &GridFunction) -> GridFunction {
    let n = f.n();
    f.multiplier(|k| Complex64::new(hilbert_symbol(k, n), 0.0))
}

/// `P_H = (I + H)/2`.
pub fn proj_holo(f: &GridFunction) -> GridFunction {
    let n = f.n();
    f.multiplier(|k| Complex64::new(0.5 * (1.0 + hilbert_symbol(k, n)), 0.0))
}

/// `P_A = (I - H)/2`.
pub fn proj_anti(f: &GridFunction) -> GridFunction {
    let n = f.n();
    f.multiplier(|k| Complex64::new(0.5 * (1.0 - hilbert_symbol(k, n)), 0.0))
}

/// `(I - H) f`.
pub fn i_minus_h(f: &GridFunction) -> GridFunction {
    let n = f.n();
    f.multiplier(|k| Complex64::new(1.0 - hilbert_symbol(k, n), 0.0))
}

/// `||(I - H)(f - mean f)||_2`: distance of `f` from a holomorphic trace
/// (constants included).
pub fn holo_residual(f: &GridFunction) -> f64 {
    let n = f.n();
    f.multiplier(|k| {
        if k == 0 {
            zero()
        } else {
            Complex64::new(1.0 - hilbert_symbol(k, n), 0.0)
        }
    })
    .norm_l2()
}

/// Homogeneous `H^{1/2}` seminorm `(2 pi sum |k| |c_k|^2)^{1/2}`.
pub fn hhalf_norm(f: &GridFunction) -> f64 {
    let s: f64 = f
        .spectrum()
        .iter()
        .map(|(k, c)| k.unsigned_abs() as f64 * c.norm_sqr())
        .sum();
    (2.0 * PI * s).sqrt()
}

/// `(2 pi sum (1+k^2)^s |c_k|^2)^{1/2}`.
pub fn sobolev_norm(f: &GridFunction, s: f64) -> f64 {
    let t: f64 = f
        .spectrum()
        .iter()
        .map(|(k, c)| (1.0 + (k * k) as f64).powf(s) * c.norm_sqr())
        .sum();
    (2.0 * PI * t).sqrt()
}

/// Harmonic extension to height `y < 0`: mode `k` damped by `e^{-|k||y|}`.
pub fn poisson_extend(f: &GridFunction, y: f64) -> Result<GridFunction, GridError> {
    if !(y < 0.0) {
        return Err(GridError::NonNegativeHeight(y));
    }
    Ok(f.multiplier(|k| Complex64::new((-(k.unsigned_abs() as f64) * y.abs()).exp(), 0.0)))
}

/// Applies the 2/3 rule: modes with `|k| > n/3` are removed.
pub fn dealias(f: &GridFunction) -> GridFunction {
    f.truncate(dealias_cutoff(f.n()))
}

pub fn dealias_cutoff(n: usize) -> usize {
    n / 3
}

/// Spectral antiderivative of the mean-free part (mean discarded).
pub fn antiderivative(f: &GridFunction) -> GridFunction {
    let n = f.n() as i64;
    f.multiplier(|k| {
        if k == 0 || k == -n / 2 {
            zero()
        } else {
            one() / Complex64::new(0.0, k as f64)
        }
    })
}

/// Fraction of `sum |c_k|^2` carried by the top third of the band `|k| <= cutoff`.
pub fn top_band_fraction(f: &GridFunction, cutoff: usize) -> f64 {
    let lo = (2 * cutoff) as f64 / 3.0;
    let (mut top, mut total) = (0.0, 0.0);
    for (k, c) in f.spectrum().iter() {
        let a = k.unsigned_abs() as f64;
        let e = c.norm_sqr();
        total += e;
        if a > lo {
            top += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        top / total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(GridFunction::new(vec![c(0.0, 0.0); 8]).is_err());
        assert!(GridFunction::new(vec![c(0.0, 0.0); 48]).is_err());
        assert!(GridFunction::new(vec![c(0.0, 0.0); 64]).is_ok());
    }

    #[test]
    fn derivative_of_sine_and_mode() {
        let n = 64;
        let f = GridFunction::from_fn(n, |x| c(x.sin(), 0.0));
        let g = GridFunction::from_fn(n, |x| c(x.cos(), 0.0));
        assert!(derivative(&f).dist_linf(&g) < 1e-13);
        assert!(derivative(&GridFunction::constant(n, c(3.0, -1.0))).norm_linf() < 1e-14);
        let e3 = GridFunction::mode(n, 3, c(1.0, 0.0));
        let d = derivative(&e3);
        assert!(d.dist_linf(&e3.scale(c(0.0, 3.0))) < 1e-12);
    }

    #[test]
    fn hilbert_on_modes() {
        let n = 64;
        assert!(hilbert(&GridFunction::constant(n, c(1.0, 0.0))).norm_linf() == 0.0);
        for k in 1..10 {
            let neg = GridFunction::mode(n, -k, c(1.0, 0.0));
            let pos = GridFunction::mode(n, k, c(1.0, 0.0));
            assert!(hilbert(&neg).dist_linf(&neg) < 1e-13);
            assert!(hilbert(&pos).dist_linf(&(-&pos)) < 1e-13);
        }
    }

    #[test]
    fn projections_on_modes() {
        let n = 32;
        let em = GridFunction::mode(n, -1, c(1.0, 0.0));
        let ep = GridFunction::mode(n, 1, c(1.0, 0.0));
        assert!(proj_holo(&em).dist_linf(&em) < 1e-14);
        assert!(proj_anti(&em).norm_linf() < 1e-14);
        assert!(proj_holo(&ep).norm_linf() < 1e-14);
    }

    #[test]
    fn hhalf_and_sobolev_single_mode() {
        let n = 64;
        for k in [-5i64, -1, 2, 7] {
            let f = GridFunction::mode(n, k, c(1.0, 0.0));
            let want = (2.0 * PI * k.abs() as f64).sqrt();
            assert!((hhalf_norm(&f) - want).abs() < 1e-12);
            let want1 = (2.0 * PI * (1.0 + (k * k) as f64)).sqrt();
            assert!((sobolev_norm(&f, 1.0) - want1).abs() < 1e-11);
            assert!((sobolev_norm(&f, 0.0) - f.norm_l2()).abs() < 1e-12);
        }
        assert!(hhalf_norm(&GridFunction::constant(n, c(2.0, 1.0))) < 1e-13);
    }

    #[test]
    fn poisson_extension() {
        let n = 64;
        let cst = GridFunction::constant(n, c(2.0, -1.0));
        assert!(poisson_extend(&cst, -0.7).unwrap().dist_linf(&cst) < 1e-14);
        let f = GridFunction::mode(n, 4, c(1.0, 0.0));
        let g = poisson_extend(&f, -1.0).unwrap();
        assert!(g.dist_linf(&f.scale((-4.0f64).exp())) < 1e-14);
        assert!(poisson_extend(&f, 0.0).is_err());
        assert!(poisson_extend(&f, 0.3).is_err());
    }

    #[test]
    fn spectrum_indexing_and_interpolation() {
        let n = 32;
        let f = &GridFunction::mode(n, 3, c(2.0, 0.0)) + &GridFunction::mode(n, -5, c(0.0, 1.0));
        let s = f.spectrum();
        assert!((s.get(3) - c(2.0, 0.0)).norm() < 1e-14);
        assert!((s.get(-5) - c(0.0, 1.0)).norm() < 1e-14);
        let x = 0.3;
        let want = c(2.0, 0.0) * Complex64::from_polar(1.0, 3.0 * x)
            + c(0.0, 1.0) * Complex64::from_polar(1.0, -5.0 * x);
        assert!((f.eval_at(x) - want).norm() < 1e-13);
    }

    #[test]
    fn dealias_removes_high_modes() {
        let n = 64;
        let low = GridFunction::mode(n, 5, c(1.0, 0.0));
        let high = GridFunction::mode(n, 25, c(1.0, 0.0));
        assert!(dealias(&low).dist_linf(&low) < 1e-14);
        let both = &low + &high;
        let d = dealias(&both).dist_linf(&low);
        assert!(d < 1e-13, "{d}");
    }
}
