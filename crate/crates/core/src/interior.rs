//! Holomorphic interior fields below the interface, the pressure, the
//! interior Euler residual and the domain energy.

use std::io::Write;

use num_complex::Complex64;

use crate::dynamics::{rhs, Guards, Rhs, WaveState};
use crate::error::InteriorError;
use crate::spectral::{derivative, hhalf_norm, holo_residual, node, poisson_extend, GridFunction, I};

pub const DEFAULT_HEIGHTS: [f64; 4] = [-0.1, -0.2, -0.5, -1.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InteriorOptions {
    /// relative tolerance on `||(I - H) f||_2` for a holomorphic trace
    pub holo_tol: f64,
    /// step of the centred differences in `y`
    pub dy: f64,
}

impl Default for InteriorOptions {
    fn default() -> Self {
        Self {
            holo_tol: 1e-6,
            dy: 1e-3,
        }
    }
}

/// Multiplier of the holomorphic extension: mode `k <= 0` times `e^{-k y}`
/// (`y <= 0`), positive modes and the Nyquist mode dropped.
fn extension(f: &GridFunction, y: f64) -> GridFunction {
    let n = f.n() as i64;
    f.multiplier(|k| {
        if k <= 0 && k != -n / 2 {
            Complex64::new((-(k as f64) * y).exp(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Value at height `y <= 0` of the holomorphic function with trace `f`.
pub fn extend_boundary_field(
    f: &GridFunction,
    y: f64,
    what: &'static str,
    opts: &InteriorOptions,
) -> Result<GridFunction, InteriorError> {
    if y > 0.0 {
        return Err(crate::error::GridError::NonNegativeHeight(y).into());
    }
    let residual = holo_residual(f);
    let tol = opts.holo_tol * (1.0 + f.norm_l2());
    if residual > tol {
        return Err(InteriorError::Holomorphicity { what, residual, tol });
    }
    Ok(extension(f, y))
}

/// Boundary trace of `Psi_t / Psi_z`: `Z_t / Z_a' - b`.
pub fn psi_t_over_psi_z_trace(state: &WaveState) -> GridFunction {
    let d = state.derived();
    &(state.zt() * &d.inv_zalpha) - &d.b
}

pub fn psi_t_over_psi_z(state: &WaveState, y: f64, opts: &InteriorOptions) -> Result<GridFunction, InteriorError> {
    extend_boundary_field(&psi_t_over_psi_z_trace(state), y, "Psi_t/Psi_z", opts)
}

/// Extension of `d_t Zbar_t = Zbar_tt - b Zbar_{t,a'}`.
pub fn f_t_interior(r: &Rhs, y: f64, opts: &InteriorOptions) -> Result<GridFunction, InteriorError> {
    extend_boundary_field(&r.dzt.conj(), y, "F_t", opts)
}

/// `-|F|^2/2 - y + K_y * (|Zbar_t|^2) / 2`, real-valued.
pub fn pressure(state: &WaveState, y: f64, opts: &InteriorOptions) -> Result<GridFunction, InteriorError> {
    let zt_bar = state.zt().conj();
    let f = extend_boundary_field(&zt_bar, y, "F", opts)?;
    let smooth = if y < 0.0 {
        poisson_extend(&zt_bar.abs_sq(), y)?
    } else {
        zt_bar.abs_sq()
    };
    Ok(f.zip_map(&smooth, |fv, s| Complex64::new(-0.5 * fv.norm_sqr() - y + 0.5 * s.re, 0.0)))
}

/// All fields at one height.
#[derive(Clone, Debug)]
pub struct InteriorSlice {
    pub y: f64,
    pub f: GridFunction,
    pub f_z: GridFunction,
    pub psi_z: GridFunction,
    pub inv_psi_z: GridFunction,
    pub psi_t_over_psi_z: GridFunction,
    pub f_t: GridFunction,
    pub pressure: GridFunction,
}

impl InteriorSlice {
    pub fn new(state: &WaveState, r: &Rhs, y: f64, opts: &InteriorOptions) -> Result<Self, InteriorError> {
        let d = state.derived();
        let f = extend_boundary_field(&d.zt_bar, y, "F", opts)?;
        let psi_z = extend_boundary_field(&d.zalpha, y, "Psi_z", opts)?;
        Ok(Self {
            y,
            f_z: derivative(&f),
            f,
            inv_psi_z: psi_z.recip(),
            psi_z,
            psi_t_over_psi_z: psi_t_over_psi_z(state, y, opts)?,
            f_t: f_t_interior(r, y, opts)?,
            pressure: pressure(state, y, opts)?,
        })
    }

    pub fn psi_t(&self) -> GridFunction {
        &self.psi_z * &self.psi_t_over_psi_z
    }

    /// Writes `alpha` and the real and imaginary parts of every field.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "alpha,y,F_re,F_im,Psi_z_re,Psi_z_im,inv_Psi_z_re,inv_Psi_z_im,Psi_t_over_Psi_z_re,Psi_t_over_Psi_z_im,F_t_re,F_t_im,pressure"
        )?;
        let n = self.f.n();
        for j in 0..n {
            let vals = [
                self.f.values()[j],
                self.psi_z.values()[j],
                self.inv_psi_z.values()[j],
                self.psi_t_over_psi_z.values()[j],
                self.f_t.values()[j],
            ];
            write!(w, "{:.16e},{:.16e}", node(j, n), self.y)?;
            for v in vals {
                write!(w, ",{:.16e},{:.16e}", v.re, v.im)?;
            }
            writeln!(w, ",{:.16e}", self.pressure.values()[j].re)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EulerResidual {
    /// `(y, ||LHS - RHS||_2)` per height
    pub per_height: Vec<(f64, f64)>,
    pub max: f64,
}

/// `||Psi_z F_t - Psi_t F_z + conj(F) F_z - i Psi_z + (d_x - i d_y) P||_2` at
/// each height; `d_y` by centred differences.
pub fn euler_residual(
    state: &WaveState,
    heights: &[f64],
    guards: &Guards,
    opts: &InteriorOptions,
) -> Result<EulerResidual, InteriorError> {
    let r = rhs(state, guards)?;
    let mut per_height = Vec::with_capacity(heights.len());
    for &y in heights {
        let s = InteriorSlice::new(state, &r, y, opts)?;
        let p_up = pressure(state, y + opts.dy, opts)?;
        let p_dn = pressure(state, y - opts.dy, opts)?;
        let p_y = (&p_up - &p_dn).scale(0.5 / opts.dy);
        let p_x = derivative(&s.pressure);
        let lhs = &(&(&s.psi_z * &s.f_t) - &(&s.psi_t() * &s.f_z)) + &(&s.f.conj() * &s.f_z);
        let lhs = &lhs - &s.psi_z.scale(I);
        let res = &lhs + &(&p_x - &p_y.scale(I));
        per_height.push((y, res.norm_l2()));
    }
    let max = per_height.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(EulerResidual { per_height, max })
}

/// `||Delta P + 2 |F_z|^2||_2` at height `y`: `d_x^2` spectral, `d_y^2` by
/// centred second differences.
pub fn laplacian_residual(state: &WaveState, y: f64, opts: &InteriorOptions) -> Result<f64, InteriorError> {
    let p0 = pressure(state, y, opts)?;
    let p_up = pressure(state, y + opts.dy, opts)?;
    let p_dn = pressure(state, y - opts.dy, opts)?;
    let p_yy = (&(&p_up + &p_dn) - &p0.scale(2.0)).scale(1.0 / (opts.dy * opts.dy));
    let p_xx = derivative(&derivative(&p0));
    let f_z = derivative(&extend_boundary_field(&state.zt().conj(), y, "F", opts)?);
    let res = &(&p_xx + &p_yy) + &f_z.abs_sq().scale(2.0);
    Ok(res.norm_l2())
}

/// The seven addends of the domain energy at one height (`y = 0` is the
/// boundary trace), in the order they appear in its definition.
pub fn domain_energy_terms(state: &WaveState, y: f64, opts: &InteriorOptions) -> Result<[f64; 7], InteriorError> {
    let d = state.derived();
    let f = extend_boundary_field(&d.zt_bar, y, "F", opts)?;
    let psi_z = extend_boundary_field(&d.zalpha, y, "Psi_z", opts)?;
    let inv = psi_z.recip();
    let f_z = derivative(&f);
    let q = &inv * &f_z;
    let dq = derivative(&q);
    let d_inv = derivative(&inv);
    Ok([
        f_z.norm_l2().powi(2),
        (&inv * &dq).norm_l2().powi(2),
        d_inv.norm_l2().powi(2),
        inv.norm_linf().powi(2),
        hhalf_norm(&(&(&inv * &inv) * &dq)).powi(2),
        hhalf_norm(&q).powi(2),
        (&inv * &derivative(&(&inv * &d_inv))).norm_l2().powi(2),
    ])
}

#[derive(Clone, Debug, PartialEq)]
pub struct DomainEnergy {
    pub value: f64,
    /// termwise sup over the sampled heights and the boundary
    pub terms: [f64; 7],
    /// every addend is largest at the boundary
    pub sup_at_boundary: bool,
}

pub fn domain_energy_e1(state: &WaveState, heights: &[f64], opts: &InteriorOptions) -> Result<DomainEnergy, InteriorError> {
    let boundary = domain_energy_terms(state, 0.0, opts)?;
    let mut terms = boundary;
    for &y in heights {
        let t = domain_energy_terms(state, y, opts)?;
        for (s, v) in terms.iter_mut().zip(t) {
            *s = s.max(v);
        }
    }
    let sup_at_boundary = terms
        .iter()
        .zip(&boundary)
        .all(|(s, b)| *s <= *b * (1.0 + 1e-12) + 1e-300);
    Ok(DomainEnergy {
        value: terms.iter().sum(),
        terms,
        sup_at_boundary,
    })
}
