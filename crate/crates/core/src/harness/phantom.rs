use crate::error::{Result, SpiralError};
use crate::signal::Signal;

struct Ellipse {
    cx: f64,
    cy: f64,
    ax: f64,
    ay: f64,
    value: f64,
}

impl Ellipse {
    fn contains(&self, x: f64, y: f64) -> bool {
        let (u, v) = ((x - self.cx) / self.ax, (y - self.cy) / self.ay);
        u * u + v * v <= 1.0
    }
}

/// Emission levels are painted in order, later ellipses overwriting earlier ones.
/// Coordinates are normalized to `[-1, 1]`, `y` pointing up.
const EMISSION: [Ellipse; 7] = [
    // Body outline.
    Ellipse {
        cx: 0.0,
        cy: 0.0,
        ax: 0.82,
        ay: 0.66,
        value: 1.0,
    },
    // Paired hot organs.
    Ellipse {
        cx: -0.38,
        cy: 0.05,
        ax: 0.2,
        ay: 0.28,
        value: 3.0,
    },
    Ellipse {
        cx: 0.38,
        cy: 0.05,
        ax: 0.2,
        ay: 0.28,
        value: 3.0,
    },
    // Cold cores inside the organs.
    Ellipse {
        cx: -0.38,
        cy: 0.05,
        ax: 0.07,
        ay: 0.1,
        value: 0.5,
    },
    Ellipse {
        cx: 0.38,
        cy: 0.05,
        ax: 0.07,
        ay: 0.1,
        value: 0.5,
    },
    // Central lesion and a bright spot.
    Ellipse {
        cx: 0.0,
        cy: -0.35,
        ax: 0.18,
        ay: 0.12,
        value: 2.0,
    },
    Ellipse {
        cx: 0.0,
        cy: 0.35,
        ax: 0.08,
        ay: 0.08,
        value: 4.0,
    },
];

/// Peak attenuation per unit pixel path length.
const MU_PEAK: f64 = 0.02;

/// Synthetic `side x side` emission map and attenuation map.
///
/// The emission is piecewise constant with levels `{0, 0.5, 1, 2, 3, 4}` on a
/// zero background and mirror-symmetric about the vertical axis. The
/// attenuation is a smooth Gaussian bump inside the body, within `[0, 0.02]`.
pub fn make_phantom(side: usize) -> Result<(Signal, Signal)> {
    if side < 2 {
        return Err(SpiralError::InvalidShape(format!(
            "phantom side {side} too small"
        )));
    }
    let coord = |i: usize| (2 * i + 1) as f64 / side as f64 - 1.0;
    let mut emission = vec![0.0; side * side];
    let mut mu = vec![0.0; side * side];
    for r in 0..side {
        let y = -coord(r);
        // The left half is computed and mirrored so symmetry is exact.
        for c in 0..side.div_ceil(2) {
            let x = coord(c);
            let mut value = 0.0;
            for e in &EMISSION {
                if e.contains(x, y) {
                    value = e.value;
                }
            }
            let body = (x / 0.9).powi(2) + (y / 0.75).powi(2);
            let m = if body <= 1.0 {
                MU_PEAK * (-1.5 * body).exp() * (1.0 - body).sqrt()
            } else {
                0.0
            };
            for cc in [c, side - 1 - c] {
                emission[r * side + cc] = value;
                mu[r * side + cc] = m;
            }
        }
    }
    Ok((
        Signal::image(side, side, emission)?,
        Signal::image(side, side, mu)?,
    ))
}
