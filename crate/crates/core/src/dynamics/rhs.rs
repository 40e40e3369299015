use crate::error::DynamicsError;
use crate::spectral::{derivative, GridFunction};

use super::state::{Guards, WaveState};

/// Time derivatives of the evolved fields in the fixed `a'` frame.
#[derive(Clone, Debug)]
pub struct Rhs {
    /// `dP/dt = Z_t - b Z_{,a'}`
    pub dp: GridFunction,
    /// `dZ_t/dt = Z_tt - b dZ_t`
    pub dzt: GridFunction,
}

/// Semi-discrete right-hand side; the material derivative `d_t + b d_a'`
/// is written out in the fixed Riemann-mapping frame.
pub fn rhs(state: &WaveState, guards: &Guards) -> Result<Rhs, DynamicsError> {
    let d = state.checked(guards)?;
    let dp = &state.zt().clone() - &(&d.b * &d.zalpha);
    let dzt = &d.ztt - &(&d.b * &derivative(state.zt()));
    if !dp.is_finite() || !dzt.is_finite() {
        return Err(DynamicsError::NonFinite("rhs"));
    }
    Ok(Rhs { dp, dzt })
}
