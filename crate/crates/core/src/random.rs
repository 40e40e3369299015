//! Seeded random band-limited grid functions for test families and batteries.

use num_complex::Complex64;
use rand::Rng;

use crate::spectral::{GridFunction, Spectrum};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    /// every mode `|k| <= kmax`
    Full,
    /// modes `-kmax <= k < 0` only: the trace of a holomorphic function
    /// vanishing at depth
    Holomorphic,
    /// real-valued, `c_{-k} = conj(c_k)`
    Real,
}

#[derive(Clone, Debug)]
pub struct BandLimited {
    n: usize,
    kmax: usize,
    decay: f64,
    amplitude: f64,
    support: Support,
    mean_zero: bool,
}

impl BandLimited {
    pub fn new(n: usize, kmax: usize) -> Self {
        assert!(kmax < n / 2, "band must fit below Nyquist");
        Self {
            n,
            kmax,
            decay: 1.0,
            amplitude: 1.0,
            support: Support::Full,
            mean_zero: false,
        }
    }

    pub fn holomorphic(mut self) -> Self {
        self.support = Support::Holomorphic;
        self
    }

    pub fn real(mut self) -> Self {
        self.support = Support::Real;
        self
    }

    pub fn mean_zero(mut self) -> Self {
        self.mean_zero = true;
        self
    }

    /// Coefficient envelope `amplitude / (1+|k|)^decay`.
    pub fn decay(mut self, p: f64) -> Self {
        self.decay = p;
        self
    }

    pub fn amplitude(mut self, a: f64) -> Self {
        self.amplitude = a;
        self
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> GridFunction {
        let mut spec = Spectrum::zeros(self.n);
        let kmax = self.kmax as i64;
        let mut draw = |k: i64| {
            let env = self.amplitude / (1.0 + k.abs() as f64).powf(self.decay);
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * env
        };
        match self.support {
            Support::Full => {
                for k in -kmax..=kmax {
                    spec.set(k, draw(k));
                }
            }
            Support::Holomorphic => {
                for k in -kmax..0 {
                    spec.set(k, draw(k));
                }
            }
            Support::Real => {
                let c0 = draw(0);
                spec.set(0, Complex64::new(c0.re, 0.0));
                for k in 1..=kmax {
                    let ck = draw(k);
                    spec.set(k, ck);
                    spec.set(-k, ck.conj());
                }
            }
        }
        if self.mean_zero {
            spec.set(0, Complex64::new(0.0, 0.0));
        }
        let f = spec.to_physical();
        if self.support == Support::Real {
            f.re()
        } else {
            f
        }
    }
}
