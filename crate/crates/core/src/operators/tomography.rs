//! Parallel-beam strip-integral projector and the attenuated emission model
//! `A = diag[exp(-R mu)] R`.
//!
//! Pixels are unit squares on a grid centred at the origin (row 0 at the top).
//! Detector bins have unit width and are centred on the projection axis. The
//! system-matrix entry for (bin, pixel) is the area of the pixel inside the
//! bin's strip divided by the strip width, so at 0 degrees with one bin per
//! column the projector returns exact column sums.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpiralError};
use crate::signal::{check_len, check_nonnegative, Signal};

use super::LinearMap;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomographyGeometry {
    pub side: usize,
    pub n_angles: usize,
    pub span_degrees: f64,
    pub n_radial: usize,
}

impl TomographyGeometry {
    /// Angle of view `a`, in radians; views are spaced uniformly over the span.
    pub fn angle(&self, a: usize) -> f64 {
        (self.span_degrees * a as f64 / self.n_angles as f64).to_radians()
    }
}

/// Sparse strip-integral Radon projector `R` stored in compressed rows.
/// Row index is `angle * n_radial + bin`.
#[derive(Clone, Debug)]
pub struct StripProjector {
    geometry: TomographyGeometry,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    weights: Vec<f64>,
}

impl StripProjector {
    pub fn new(geometry: TomographyGeometry) -> Result<Self> {
        let TomographyGeometry {
            side,
            n_angles,
            n_radial,
            span_degrees,
        } = geometry;
        if side == 0 || n_angles == 0 || n_radial == 0 {
            return Err(SpiralError::InvalidParameter(
                "side, n_angles and n_radial must all be >= 1".into(),
            ));
        }
        if !span_degrees.is_finite() {
            return Err(SpiralError::InvalidParameter(
                "angle span must be finite".into(),
            ));
        }

        let center = (side as f64 - 1.0) / 2.0;
        let bin_center = (n_radial as f64 - 1.0) / 2.0;
        let mut row_ptr = Vec::with_capacity(n_angles * n_radial + 1);
        let mut col_idx = Vec::new();
        let mut weights = Vec::new();
        row_ptr.push(0);

        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n_radial];
        for a in 0..n_angles {
            let theta = geometry.angle(a);
            let (sin, cos) = theta.sin_cos();
            let footprint = Footprint::new(cos.abs(), sin.abs());
            for r in 0..side {
                let y = center - r as f64;
                for c in 0..side {
                    let x = c as f64 - center;
                    let t0 = x * cos + y * sin;
                    let lo = t0 - footprint.half_width;
                    let hi = t0 + footprint.half_width;
                    let first = (lo + bin_center - 0.5).floor().max(0.0) as usize;
                    let last = ((hi + bin_center + 0.5).ceil() as isize).min(n_radial as isize - 1);
                    if last < 0 {
                        continue;
                    }
                    let pixel = (r * side + c) as u32;
                    for j in first..=last as usize {
                        let t_lo = j as f64 - bin_center - 0.5;
                        let w = footprint.cdf(t_lo + 1.0 - lo) - footprint.cdf(t_lo - lo);
                        if w > 0.0 {
                            rows[j].push((pixel, w));
                        }
                    }
                }
            }
            for row in rows.iter_mut() {
                for &(p, w) in row.iter() {
                    col_idx.push(p);
                    weights.push(w);
                }
                row_ptr.push(col_idx.len());
                row.clear();
            }
        }

        Ok(Self {
            geometry,
            row_ptr,
            col_idx,
            weights,
        })
    }

    pub fn geometry(&self) -> TomographyGeometry {
        self.geometry
    }

    pub fn nonzeros(&self) -> usize {
        self.weights.len()
    }
}

impl LinearMap for StripProjector {
    fn rows(&self) -> usize {
        self.geometry.n_angles * self.geometry.n_radial
    }

    fn cols(&self) -> usize {
        self.geometry.side * self.geometry.side
    }

    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let span = self.row_ptr[i]..self.row_ptr[i + 1];
            *o = self.col_idx[span.clone()]
                .iter()
                .zip(&self.weights[span])
                .map(|(&j, w)| w * x[j as usize])
                .sum();
        }
    }

    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (i, &yi) in y.iter().enumerate() {
            if yi == 0.0 {
                continue;
            }
            let span = self.row_ptr[i]..self.row_ptr[i + 1];
            for (&j, w) in self.col_idx[span.clone()].iter().zip(&self.weights[span]) {
                out[j as usize] += w * yi;
            }
        }
    }
}

/// Projection of a unit pixel onto a direction: a trapezoid of unit area,
/// the convolution of two boxes of widths |cos| and |sin|.
struct Footprint {
    short: f64,
    long: f64,
    half_width: f64,
}

impl Footprint {
    fn new(a: f64, b: f64) -> Self {
        Self {
            short: a.min(b),
            long: a.max(b),
            half_width: (a + b) / 2.0,
        }
    }

    /// Area of the pixel at projected distance <= `u` from its leading edge.
    fn cdf(&self, u: f64) -> f64 {
        let (s, l) = (self.short, self.long);
        if u <= 0.0 {
            0.0
        } else if u >= s + l {
            1.0
        } else if u < s {
            u * u / (2.0 * s * l)
        } else if u <= l {
            (u - s / 2.0) / l
        } else {
            let v = s + l - u;
            1.0 - v * v / (2.0 * s * l)
        }
    }
}

/// The attenuated emission projector `A f = exp(-R mu) ⊙ R f`.
#[derive(Clone, Debug)]
pub struct TomographyModel {
    projector: Arc<StripProjector>,
    attenuation: Signal,
    survival: Vec<f64>,
}

impl TomographyModel {
    pub fn new(projector: Arc<StripProjector>, attenuation: Signal) -> Result<Self> {
        check_len(projector.cols(), attenuation.len())?;
        check_nonnegative(attenuation.values())?;
        let mut survival = projector.apply(attenuation.values())?;
        for v in survival.iter_mut() {
            *v = (-*v).exp();
        }
        Ok(Self {
            projector,
            attenuation,
            survival,
        })
    }

    pub fn projector(&self) -> &Arc<StripProjector> {
        &self.projector
    }

    pub fn attenuation(&self) -> &Signal {
        &self.attenuation
    }

    /// Per-ray attenuation weights `exp(-R mu)`, each in `(0, 1]`.
    pub fn survival(&self) -> &[f64] {
        &self.survival
    }

    pub fn geometry(&self) -> TomographyGeometry {
        self.projector.geometry()
    }
}

impl LinearMap for TomographyModel {
    fn rows(&self) -> usize {
        self.projector.rows()
    }

    fn cols(&self) -> usize {
        self.projector.cols()
    }

    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        self.projector.forward_into(x, out);
        for (o, w) in out.iter_mut().zip(&self.survival) {
            *o *= w;
        }
    }

    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        let weighted: Vec<f64> = y.iter().zip(&self.survival).map(|(a, w)| a * w).collect();
        self.projector.adjoint_into(&weighted, out);
    }
}

/// Builds the strip projector for a square `rows x cols` grid and composes it
/// with the attenuation map `mu`.
pub fn build_tomography(
    rows: usize,
    cols: usize,
    n_angles: usize,
    span_degrees: f64,
    n_radial: usize,
    mu: &Signal,
) -> Result<TomographyModel> {
    if rows != cols {
        return Err(SpiralError::InvalidShape(format!(
            "tomography needs a square image, got {rows}x{cols}"
        )));
    }
    let projector = StripProjector::new(TomographyGeometry {
        side: rows,
        n_angles,
        span_degrees,
        n_radial,
    })?;
    TomographyModel::new(Arc::new(projector), mu.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeros(side: usize) -> Signal {
        Signal::image(side, side, vec![0.0; side * side]).unwrap()
    }

    #[test]
    fn zero_degrees_gives_column_sums() {
        let side = 5;
        let model = build_tomography(side, side, 1, 180.0, side, &zeros(side)).unwrap();
        let f: Vec<f64> = (0..side * side).map(|i| (i * 7 % 11) as f64).collect();
        let proj = model.apply(&f).unwrap();
        for c in 0..side {
            let col: f64 = (0..side).map(|r| f[r * side + c]).sum();
            assert!(
                (proj[c] - col).abs() < 1e-12,
                "bin {c}: {} vs {col}",
                proj[c]
            );
        }
    }

    #[test]
    fn zero_attenuation_is_the_bare_projector() {
        let model = build_tomography(8, 8, 6, 135.0, 10, &zeros(8)).unwrap();
        assert!(model.survival().iter().all(|&w| w == 1.0));
        let f: Vec<f64> = (0..64).map(|i| i as f64).collect();
        assert_eq!(
            model.apply(&f).unwrap(),
            model.projector().apply(&f).unwrap()
        );
    }

    #[test]
    fn pixel_mass_is_conserved_when_detector_covers_image() {
        // Every pixel's footprint integrates to its area when no rays miss.
        let side = 6;
        let model = build_tomography(side, side, 7, 180.0, 12, &zeros(side)).unwrap();
        let dense = model.to_dense().unwrap();
        for j in 0..side * side {
            for a in 0..7 {
                let s: f64 = (0..12).map(|b| dense.get(a * 12 + b, j)).sum();
                assert!((s - 1.0).abs() < 1e-12, "pixel {j} angle {a}: {s}");
            }
        }
        assert!(dense.is_nonnegative());
    }

    #[test]
    fn attenuation_weights_in_unit_interval() {
        let side = 8;
        let mu = Signal::image(side, side, vec![0.05; side * side]).unwrap();
        let model = build_tomography(side, side, 4, 135.0, 8, &mu).unwrap();
        assert!(model.survival().iter().all(|&w| w > 0.0 && w <= 1.0));
        assert!(model.survival().iter().any(|&w| w < 1.0));
    }

    #[test]
    fn invalid_inputs() {
        assert!(build_tomography(4, 5, 3, 135.0, 4, &zeros(4)).is_err());
        assert!(build_tomography(4, 4, 0, 135.0, 4, &zeros(4)).is_err());
        let neg = Signal::image(4, 4, vec![-1.0; 16]).unwrap();
        assert!(build_tomography(4, 4, 3, 135.0, 4, &neg).is_err());
    }
}
