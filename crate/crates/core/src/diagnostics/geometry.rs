use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::WaveState;
use crate::spectral::GridFunction;

/// Pointwise `A1 / |Z_a'|`.
pub fn taylor_sign(state: &WaveState) -> GridFunction {
    let d = state.derived();
    d.a1.zip_map(&d.zalpha, |a, z| Complex64::new(a.re / z.norm(), 0.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChordArc {
    /// `min chord/arc` over grid pairs, in `[0, 1]`
    pub delta: f64,
    pub self_intersection: bool,
}

/// Chord-arc constant of the periodic curve `Z = a' + P`.
///
/// For each pair `j < k` both ways around the period are compared: the
/// forward arc against `|Z_k - Z_j|`, and the wrap-around arc `L - arc`
/// against the chord to the translated copy `Z_j + 2 pi`. Arcs are
/// cumulative trapezoid sums of `|Z_a'|`. All `n(n-1)/2` pairs are visited.
pub fn chord_arc_delta(state: &WaveState) -> ChordArc {
    let z = state.z();
    chord_arc_of(z.values(), state.derived().zalpha.values())
}

pub fn chord_arc_of(z: &[Complex64], zalpha: &[Complex64]) -> ChordArc {
    if polyline_self_intersects(z) {
        return ChordArc {
            delta: 0.0,
            self_intersection: true,
        };
    }
    let n = z.len();
    let h = 2.0 * PI / n as f64;
    let speed: Vec<f64> = zalpha.iter().map(|v| v.norm()).collect();
    let mut cum = vec![0.0; n + 1];
    for j in 0..n {
        cum[j + 1] = cum[j] + 0.5 * h * (speed[j] + speed[(j + 1) % n]);
    }
    let total = cum[n];
    let shift = Complex64::new(2.0 * PI, 0.0);
    let (delta, hit) = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut best = f64::INFINITY;
            let mut hit = false;
            for k in j + 1..n {
                let arc = cum[k] - cum[j];
                let chord = (z[k] - z[j]).norm();
                let arc_w = total - arc;
                let chord_w = (z[j] + shift - z[k]).norm();
                for (c, a) in [(chord, arc), (chord_w, arc_w)] {
                    if a > 1e-6 {
                        if c < 1e-12 {
                            hit = true;
                        }
                        best = best.min(c / a);
                    }
                }
            }
            (best, hit)
        })
        .reduce(|| (f64::INFINITY, false), |a, b| (a.0.min(b.0), a.1 || b.1));
    if hit {
        return ChordArc {
            delta: 0.0,
            self_intersection: true,
        };
    }
    ChordArc {
        delta: delta.min(1.0),
        self_intersection: false,
    }
}

fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    let (u, v) = (b - a, c - a);
    u.re * v.im - u.im * v.re
}

fn segments_cross(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let (d1, d2) = (orient(a, b, c), orient(a, b, d));
    let (d3, d4) = (orient(c, d, a), orient(c, d, b));
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Whether the closed-up periodic polyline through `Z_j` (with
/// `Z_n = Z_0 + 2 pi`) has two properly crossing segments, including
/// crossings with its translates by `+-2 pi`. Neighbouring segments are not
/// compared.
pub fn polyline_self_intersects(z: &[Complex64]) -> bool {
    let n = z.len();
    let shift = Complex64::new(2.0 * PI, 0.0);
    let end = |j: usize| if j + 1 < n { z[j + 1] } else { z[0] + shift };
    let lo = |j: usize| z[j].re.min(end(j).re);
    let hi = |j: usize| z[j].re.max(end(j).re);
    (0..n).into_par_iter().any(|j| {
        let (a, b) = (z[j], end(j));
        (0..n).any(|k| {
            [-1.0, 0.0, 1.0].iter().any(|&m| {
                if m == 0.0 && k <= j {
                    return false;
                }
                // neighbours share an endpoint, also across the seam
                let gap = k as i64 + m as i64 * n as i64 - j as i64;
                if gap.abs() <= 1 {
                    return false;
                }
                let off = shift * m;
                if hi(k) + off.re < lo(j) || lo(k) + off.re > hi(j) {
                    return false;
                }
                segments_cross(a, b, z[k] + off, end(k) + off)
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_interface() {
        let s = WaveState::flat(128);
        let c = chord_arc_delta(&s);
        assert!((c.delta - 1.0).abs() < 1e-12);
        assert!(!c.self_intersection);
        let t = taylor_sign(&s);
        assert!(t.dist_linf(&GridFunction::constant(128, Complex64::new(1.0, 0.0))) < 1e-15);
    }

    #[test]
    fn decreases_with_amplitude() {
        let n = 128;
        let mut last = 1.0 + 1e-12;
        for a in [0.05, 0.1, 0.2, 0.3] {
            let p = GridFunction::mode(n, -2, Complex64::new(a, 0.0));
            let s = WaveState::new(0.0, p, GridFunction::zeros(n));
            let d = chord_arc_delta(&s).delta;
            assert!(d < last, "{a}: {d} !< {last}");
            last = d;
        }
    }

    #[test]
    fn looped_curve_crosses_itself() {
        let n = 256;
        let p = GridFunction::mode(n, -1, Complex64::new(2.0, 0.0));
        let s = WaveState::new(0.0, p, GridFunction::zeros(n));
        assert!(polyline_self_intersects(s.z().values()));
        assert!(chord_arc_delta(&s).self_intersection);
        let p = GridFunction::mode(n, -1, Complex64::new(0.5, 0.0));
        let s = WaveState::new(0.0, p, GridFunction::zeros(n));
        assert!(!polyline_self_intersects(s.z().values()));
    }

    #[test]
    fn coincident_points_flag_intersection() {
        let n = 16;
        let mut z: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(2.0 * PI * j as f64 / n as f64, 0.0))
            .collect();
        z[8] = z[3];
        let za = vec![Complex64::new(1.0, 0.0); n];
        let c = chord_arc_of(&z, &za);
        assert!(c.self_intersection);
        assert_eq!(c.delta, 0.0);
    }

    #[test]
    fn symmetric_crest_at_seam_is_simple() {
        let n = 2048;
        let data = crate::initial::make_near_crest(n, 0.4, 0.99, 0.0).unwrap();
        let s = crate::initial::mollify(&data, 0.05).unwrap().to_state();
        assert!(s.z().values()[0].re.abs() < 1e-12);
        assert!(!polyline_self_intersects(s.z().values()));
        let z: Vec<Complex64> = (0..n)
            .map(|j| {
                let a = 2.0 * PI * j as f64 / n as f64;
                Complex64::new(a, (1.0 - a.cos()).powi(3) * 1e-3 + 1.0)
            })
            .collect();
        assert!(!polyline_self_intersects(&z));
    }
}
