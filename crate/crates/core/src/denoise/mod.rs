//! Solvers for the nonnegatively constrained denoising subproblem
//!
//! `minimize ½‖f - s‖² + κ·pen(f)  subject to f >= 0`
//!
//! for the four supported penalties. Every solver returns an exactly
//! nonnegative estimate.

mod canonical;
mod l1_dual;
mod rdp;
mod tv;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpiralError};

pub use canonical::denoise_canonical_l1;
pub use l1_dual::{denoise_l1_dual, denoise_l1_dual_observed, DualSolution, DualSweep};
pub use rdp::{
    partition_csv, rdp_complexity, rdp_fit, rdp_ti_fit, rdp_tree, RdpCell, RdpDecision, RdpFit,
    RdpNode, RdpTiFit, ShiftSet,
};
pub use tv::{denoise_tv, tv_objective, tv_seminorm, TvDual, TvSolution};

/// Iteration controls for the iterative subproblem solvers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubConfig {
    pub tol: f64,
    pub min_iter: usize,
    pub max_iter: usize,
    /// Start from the previous outer iteration's dual variables.
    pub warm_start: bool,
}

impl SubConfig {
    /// Stringent inner solves: at least 10 and at most 100 iterations, tolerance 1e-8.
    pub fn tight() -> Self {
        Self {
            tol: 1e-8,
            min_iter: 10,
            max_iter: 100,
            warm_start: true,
        }
    }

    /// Relaxed inner solves: at most 10 iterations, tolerance 1e-4.
    pub fn loose() -> Self {
        Self {
            tol: 1e-4,
            min_iter: 0,
            max_iter: 10,
            warm_start: true,
        }
    }

    pub fn tv_default() -> Self {
        Self {
            tol: 1e-6,
            min_iter: 0,
            max_iter: 200,
            warm_start: true,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iter == 0 || self.min_iter > self.max_iter {
            return Err(SpiralError::InvalidParameter(format!(
                "bad subproblem settings: {self:?}"
            )));
        }
        Ok(())
    }
}

impl Default for SubConfig {
    fn default() -> Self {
        Self::tight()
    }
}

pub(crate) fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(SpiralError::InvalidParameter(format!(
            "penalty weight must be finite and >= 0, got {kappa}"
        )));
    }
    Ok(())
}
