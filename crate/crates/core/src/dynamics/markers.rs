use std::f64::consts::PI;

use crate::error::DynamicsError;
use crate::spectral::{eval_spectrum, GridFunction};

/// Lagrangian markers `h_i(t)` with `dh/dt = b(h, t)`, `h_i(0) = 2 pi i / m`.
///
/// Positions are kept unwrapped on the line so ordering is a plain
/// comparison; [`MarkerSet::wrapped`] reduces them to `[0, 2pi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkerSet {
    positions: Vec<f64>,
}

impl MarkerSet {
    pub fn uniform(m: usize) -> Self {
        Self {
            positions: (0..m).map(|i| 2.0 * PI * i as f64 / m as f64).collect(),
        }
    }

    pub fn from_positions(positions: Vec<f64>) -> Self {
        Self { positions }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn wrapped(&self) -> Vec<f64> {
        self.positions.iter().map(|h| h.rem_euclid(2.0 * PI)).collect()
    }

    /// Strict ordering, including the periodic wrap of the last marker.
    pub fn check_order(&self) -> Result<(), DynamicsError> {
        for (i, w) in self.positions.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(DynamicsError::MarkerCollision(i));
            }
        }
        if let (Some(first), Some(last)) = (self.positions.first(), self.positions.last()) {
            if *last >= first + 2.0 * PI {
                return Err(DynamicsError::MarkerCollision(self.positions.len() - 1));
            }
        }
        Ok(())
    }

    /// Discrete `h_a` from forward differences of neighbouring markers.
    pub fn stretch(&self) -> Vec<f64> {
        let m = self.positions.len();
        let spacing = 2.0 * PI / m as f64;
        (0..m)
            .map(|i| {
                let next = if i + 1 < m {
                    self.positions[i + 1]
                } else {
                    self.positions[0] + 2.0 * PI
                };
                (next - self.positions[i]) / spacing
            })
            .collect()
    }

    /// Samples a grid function at the markers by trigonometric interpolation.
    pub fn sample(&self, f: &GridFunction) -> Vec<num_complex::Complex64> {
        let spec = f.spectrum();
        self.positions.iter().map(|&h| eval_spectrum(&spec, h)).collect()
    }
}

/// One RK4 update of the markers, given `b` at the four stage states of the
/// matching field update (`t`, `t+dt/2`, `t+dt/2`, `t+dt`).
pub fn advance_markers(
    markers: &MarkerSet,
    b_series: &[GridFunction; 4],
    dt: f64,
) -> Result<MarkerSet, DynamicsError> {
    if !(dt > 0.0) {
        return Err(DynamicsError::BadStep(dt));
    }
    let specs: Vec<_> = b_series.iter().map(GridFunction::spectrum).collect();
    let vel = |s: usize, h: f64| eval_spectrum(&specs[s], h).re;
    let positions = markers
        .positions
        .iter()
        .map(|&h| {
            let k1 = vel(0, h);
            let k2 = vel(1, h + 0.5 * dt * k1);
            let k3 = vel(2, h + 0.5 * dt * k2);
            let k4 = vel(3, h + dt * k3);
            h + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        })
        .collect();
    let out = MarkerSet { positions };
    out.check_order()?;
    Ok(out)
}
