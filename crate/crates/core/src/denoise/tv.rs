//! Nonnegative anisotropic-TV denoising
//!
//! `minimize ½‖f - s‖² + κ‖Df‖₁  subject to f >= 0`
//!
//! via a monotone fast gradient projection on the dual. With dual variable
//! `w ∈ [-1, 1]^{rows(D)}` the primal point is `f(w) = [s - κDᵀw]₊` and the
//! dual objective to minimize is `q(w) = ‖f(w)‖²`. `‖D‖² <= 8` fixes the
//! step at `1/(8κ)`.

use crate::error::Result;
use crate::operators::{LinearMap, StackedDifference};
use crate::signal::Signal;
use crate::vecops::{dist_sq, norm_sq};

use super::{check_kappa, SubConfig};

/// Dual variable of the TV subproblem, reusable as a warm start.
#[derive(Clone, Debug, PartialEq)]
pub struct TvDual {
    pub side: usize,
    pub w: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct TvSolution {
    pub f: Signal,
    pub dual: TvDual,
    pub iterations: usize,
}

/// `Σ|f[k][l] - f[k+1][l]| + Σ|f[k][l] - f[k][l+1]|` for a 2D signal.
pub fn tv_seminorm(f: &Signal) -> Result<f64> {
    let (rows, cols) = f
        .shape()
        .ok_or_else(|| crate::SpiralError::InvalidShape("TV needs a 2D image".into()))?;
    let v = f.values();
    let mut total = 0.0;
    for r in 0..rows {
        for c in 0..cols {
            let x = v[r * cols + c];
            if c + 1 < cols {
                total += (x - v[r * cols + c + 1]).abs();
            }
            if r + 1 < rows {
                total += (x - v[(r + 1) * cols + c]).abs();
            }
        }
    }
    Ok(total)
}

/// `½‖f - s‖² + κ‖f‖_TV`.
pub fn tv_objective(f: &Signal, s: &Signal, kappa: f64) -> Result<f64> {
    Ok(0.5 * dist_sq(f.values(), s.values()) + kappa * tv_seminorm(f)?)
}

pub fn denoise_tv(
    s: &Signal,
    kappa: f64,
    config: &SubConfig,
    warm: Option<&TvDual>,
) -> Result<TvSolution> {
    check_kappa(kappa)?;
    config.validate()?;
    let side = s.square_side()?;
    let d = StackedDifference::new(side, side);
    let m = d.rows();
    let sv = s.values();

    let projected = s.with_values(sv.iter().map(|&v| v.max(0.0)).collect())?;
    if kappa == 0.0 || m == 0 {
        return Ok(TvSolution {
            f: projected,
            dual: TvDual {
                side,
                w: vec![0.0; m],
            },
            iterations: 0,
        });
    }

    let mut w = match warm {
        Some(prev) if prev.side == side && prev.w.len() == m => prev.w.clone(),
        _ => vec![0.0; m],
    };
    let step = 1.0 / (8.0 * kappa);
    let n = sv.len();
    let mut dtw = vec![0.0; n];
    let mut grad = vec![0.0; m];

    // f(w) = [s - κ Dᵀ w]₊ written into `out`; returns q(w) = ‖f(w)‖².
    let primal_at = |w: &[f64], out: &mut [f64], dtw: &mut [f64]| -> f64 {
        d.adjoint_into(w, dtw);
        for i in 0..n {
            out[i] = (sv[i] - kappa * dtw[i]).max(0.0);
        }
        norm_sq(out)
    };

    let mut f_prev = vec![0.0; n];
    let mut q_prev = primal_at(&w, &mut f_prev, &mut dtw);
    let mut f_cur = f_prev.clone();
    let mut w_prev = w.clone();
    let mut r = w.clone();
    let mut z = vec![0.0; m];
    let mut f_z = vec![0.0; n];
    let mut t = 1.0f64;
    let mut iterations = 0;

    while iterations < config.max_iter {
        iterations += 1;
        // Projected gradient step from the extrapolated point.
        primal_at(&r, &mut f_z, &mut dtw);
        d.forward_into(&f_z, &mut grad);
        for i in 0..m {
            z[i] = (r[i] + step * grad[i]).clamp(-1.0, 1.0);
        }
        let q_z = primal_at(&z, &mut f_z, &mut dtw);

        // Monotone acceptance on the dual objective.
        let accepted = q_z <= q_prev;
        w_prev.copy_from_slice(&w);
        if accepted {
            w.copy_from_slice(&z);
            f_cur.copy_from_slice(&f_z);
            q_prev = q_z;
        }
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        for i in 0..m {
            r[i] = w[i] + (t / t_next) * (z[i] - w[i]) + ((t - 1.0) / t_next) * (w[i] - w_prev[i]);
        }
        t = t_next;

        let change = dist_sq(&f_cur, &f_prev).sqrt();
        let scale = norm_sq(&f_cur).sqrt();
        f_prev.copy_from_slice(&f_cur);
        let rel = if scale > 0.0 { change / scale } else { change };
        if iterations >= config.min_iter && accepted && rel <= config.tol {
            break;
        }
    }

    let mut f = s.with_values(f_cur)?;
    // Never return something worse than the plain projection.
    if tv_objective(&f, s, kappa)? > tv_objective(&projected, s, kappa)? {
        f = projected;
    }
    Ok(TvSolution {
        f,
        dual: TvDual { side, w },
        iterations,
    })
}
