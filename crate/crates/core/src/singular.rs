//! Commutators and multilinear singular integrals built on the Hilbert
//! transform.
//!
//! Production code uses the spectral forms (`f H g - H(f g)` and friends). The
//! `O(n^2)` quadrature forms built on [`PvKernelEval`] exist to check them.
//!
//! Periodization: the line kernel `1/(x-y)` becomes `1/(2 tan((x-y)/2))` and
//! `1/(x-y)^2` becomes `1/(4 sin^2((x-y)/2))`, the sum of its integer
//! translates. Higher powers `1/(x-y)^p` use the chord `2 sin((x-y)/2)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::spectral::{derivative, hilbert, node, GridFunction, I};

/// `[f, H] g = f H g - H(f g)`.
pub fn commutator_h(f: &GridFunction, g: &GridFunction) -> GridFunction {
    &(f * &hilbert(g)) - &hilbert(&(f * g))
}

/// Commutator with an arbitrary linear operator standing in for `H`
/// (used for negative controls).
pub fn commutator_with(
    f: &GridFunction,
    g: &GridFunction,
    op: impl Fn(&GridFunction) -> GridFunction,
) -> GridFunction {
    &(f * &op(g)) - &op(&(f * g))
}

/// `[f, H] d_a g`.
pub fn commutator_h_dg(f: &GridFunction, g: &GridFunction) -> GridFunction {
    commutator_h(f, &derivative(g))
}

/// `[f, f; h]` through the commutator identity
/// `-[f, f; h] = -2 [f, H] d(f h) + [f^2, H] d h`.
pub fn double_bracket_diag_spectral(f: &GridFunction, h: &GridFunction) -> GridFunction {
    let fh = f * h;
    let ff = f * f;
    &commutator_h_dg(f, &fh).scale(2.0) - &commutator_h_dg(&ff, h)
}

/// `[f, g; h]` spectrally, by polarization of the symmetric form in `(f, g)`.
pub fn double_bracket_spectral(f: &GridFunction, g: &GridFunction, h: &GridFunction) -> GridFunction {
    let sum = f + g;
    let diff = f - g;
    (&double_bracket_diag_spectral(&sum, h) - &double_bracket_diag_spectral(&diff, h)).scale(0.25)
}

/// Which periodized kernel a difference-quotient table uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel {
    /// `1 / (2 tan((x-y)/2))`, the periodic `1/(x-y)` of the Hilbert transform.
    Cot,
    /// `1 / (2 sin((x-y)/2))`; its square is the periodized `1/(x-y)^2`.
    Chord,
}

/// Difference-quotient table `d_jk = (f_j - f_k) K(a_j - a_k)` with the
/// removable diagonal replaced by `f'(a_j)`.
#[derive(Clone, Debug)]
pub struct PvKernelEval {
    n: usize,
    table: Vec<Complex64>,
}

impl PvKernelEval {
    pub fn new(f: &GridFunction, kernel: Kernel) -> Self {
        let n = f.n();
        let fp = derivative(f);
        let v = f.values();
        let mut table = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            for k in 0..n {
                table[j * n + k] = if j == k {
                    fp.values()[j]
                } else {
                    let u = node(j, n) - node(k, n);
                    let denom = match kernel {
                        Kernel::Cot => 2.0 * (0.5 * u).tan(),
                        Kernel::Chord => 2.0 * (0.5 * u).sin(),
                    };
                    (v[j] - v[k]) / denom
                };
            }
        }
        Self { n, table }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.table[j * self.n + k]
    }

    /// Trapezoid rule `h sum_k d_jk g_k` for every row `j`.
    pub fn apply(&self, g: &GridFunction) -> GridFunction {
        let n = self.n;
        let h = 2.0 * PI / n as f64;
        let gv = g.values();
        let out = (0..n)
            .map(|j| {
                let row = &self.table[j * n..(j + 1) * n];
                row.iter().zip(gv).map(|(d, g)| d * g).sum::<Complex64>() * h
            })
            .collect();
        GridFunction::new(out).expect("size checked on construction")
    }
}

/// `[f, g; h] = (1/(pi i)) int (f(x)-f(y))(g(x)-g(y)) / (x-y)^2 h(y) dy`,
/// evaluated by quadrature on the product of two chord difference quotients.
pub fn double_bracket(f: &GridFunction, g: &GridFunction, h: &GridFunction) -> GridFunction {
    let df = PvKernelEval::new(f, Kernel::Chord);
    let dg = PvKernelEval::new(g, Kernel::Chord);
    let n = f.n();
    let step = 2.0 * PI / n as f64;
    let hv = h.values();
    let out = (0..n)
        .map(|j| {
            (0..n)
                .map(|k| df.get(j, k) * dg.get(j, k) * hv[k])
                .sum::<Complex64>()
                * step
                / (PI * I)
        })
        .collect();
    GridFunction::new(out).expect("size checked")
}

/// Error for the multilinear oracles.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("multilinear operator needs at least one coefficient function")]
pub struct EmptyOperands;

/// `C_1(A_1..A_m, f)(x) = pv int prod (A_i(x)-A_i(y)) / (x-y)^{m+1} f(y) dy`.
///
/// Quadrature: punctured trapezoid over symmetric pairs plus the diagonal
/// limit of the even part, which cancels the `1/(x-y)` singularity exactly.
pub fn c1_operator(a_list: &[GridFunction], f: &GridFunction) -> Result<GridFunction, EmptyOperands> {
    if a_list.is_empty() {
        return Err(EmptyOperands);
    }
    let n = f.n();
    let step = 2.0 * PI / n as f64;
    let m = a_list.len() as i32;
    let d1: Vec<GridFunction> = a_list.iter().map(derivative).collect();
    let d2: Vec<GridFunction> = d1.iter().map(derivative).collect();
    let fp = derivative(f);
    let fv = f.values();
    let out = (0..n)
        .map(|j| {
            let x = node(j, n);
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                if k == j {
                    continue;
                }
                let chord = 2.0 * (0.5 * (x - node(k, n))).sin();
                let mut num = fv[k];
                for a in a_list {
                    num *= a.values()[j] - a.values()[k];
                }
                acc += num / chord.powi(m + 1);
            }
            // even-part limit: -sum_i A_i'' prod_{l != i} A_l' f - 2 prod A' f'
            let prod_a: Complex64 = d1.iter().map(|d| d.values()[j]).product();
            let mut mixed = Complex64::new(0.0, 0.0);
            for i in 0..a_list.len() {
                let mut t = d2[i].values()[j];
                for (l, d) in d1.iter().enumerate() {
                    if l != i {
                        t *= d.values()[j];
                    }
                }
                mixed += t;
            }
            let s0 = -mixed * fv[j] - prod_a * fp.values()[j] * 2.0;
            (acc + s0 * 0.5) * step
        })
        .collect();
    Ok(GridFunction::new(out).expect("size checked"))
}

/// `C_2(A, f)(x) = int prod (A_i(x)-A_i(y)) / (x-y)^m  f'(y) dy`; the kernel is
/// bounded with diagonal value `prod A_i'(x) f'(x)`.
pub fn c2_operator(a_list: &[GridFunction], f: &GridFunction) -> Result<GridFunction, EmptyOperands> {
    if a_list.is_empty() {
        return Err(EmptyOperands);
    }
    let n = f.n();
    let step = 2.0 * PI / n as f64;
    let m = a_list.len() as i32;
    let d1: Vec<GridFunction> = a_list.iter().map(derivative).collect();
    let fp = derivative(f);
    let out = (0..n)
        .map(|j| {
            let x = node(j, n);
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let kern = if k == j {
                    d1.iter().map(|d| d.values()[j]).product::<Complex64>()
                } else {
                    let chord = 2.0 * (0.5 * (x - node(k, n))).sin();
                    let mut num = Complex64::new(1.0, 0.0);
                    for a in a_list {
                        num *= a.values()[j] - a.values()[k];
                    }
                    num / chord.powi(m)
                };
                acc += kern * fp.values()[k];
            }
            acc * step
        })
        .collect();
    Ok(GridFunction::new(out).expect("size checked"))
}

/// Quadrature oracles for the spectral operators.
pub mod quadrature {
    use super::*;

    /// `H f` as a pv integral: `(1/(pi i)) int (f(y) - f(x)) / (2 tan((x-y)/2)) dy`.
    pub fn hilbert(f: &GridFunction) -> GridFunction {
        let d = PvKernelEval::new(f, Kernel::Cot);
        let ones = GridFunction::constant(f.n(), Complex64::new(1.0, 0.0));
        d.apply(&ones).scale(-1.0 / (PI * I))
    }

    /// `[f, H] g = (1/(pi i)) int (f(x)-f(y)) / (2 tan((x-y)/2)) g(y) dy`.
    pub fn commutator_h(f: &GridFunction, g: &GridFunction) -> GridFunction {
        PvKernelEval::new(f, Kernel::Cot).apply(g).scale(1.0 / (PI * I))
    }

    /// Periodized `(1/2pi) int int |f(x)-f(y)|^2/(x-y)^2 dx dy`, square-rooted.
    pub fn hhalf_norm(f: &GridFunction) -> f64 {
        let d = PvKernelEval::new(f, Kernel::Chord);
        let n = f.n();
        let step = 2.0 * PI / n as f64;
        let mut s = 0.0;
        for j in 0..n {
            for k in 0..n {
                s += d.get(j, k).norm_sqr();
            }
        }
        (s * step * step / (2.0 * PI)).sqrt()
    }

    /// `1 + (1/2pi) int |Z_t(x) - Z_t(y)|^2 / (x-y)^2 dy`, periodized.
    pub fn a1_integral(zt: &GridFunction) -> GridFunction {
        let d = PvKernelEval::new(zt, Kernel::Chord);
        let n = zt.n();
        let step = 2.0 * PI / n as f64;
        let out = (0..n)
            .map(|j| {
                let s: f64 = (0..n).map(|k| d.get(j, k).norm_sqr()).sum();
                Complex64::new(1.0 + s * step / (2.0 * PI), 0.0)
            })
            .collect();
        GridFunction::new(out).expect("size checked")
    }

    /// `sup_x | int (f(x)-f(y))^2/(x-y)^2 dy |`, periodized.
    pub fn hardy_sup(f: &GridFunction) -> f64 {
        let d = PvKernelEval::new(f, Kernel::Chord);
        let n = f.n();
        let step = 2.0 * PI / n as f64;
        (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| {
                        let q = d.get(j, k);
                        q * q
                    })
                    .sum::<Complex64>()
                    .norm()
                    * step
            })
            .fold(0.0, f64::max)
    }
}
