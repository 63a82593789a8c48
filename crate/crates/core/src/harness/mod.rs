//! Simulated emission-tomography experiments: phantom, data, initialization,
//! reconstruction sweeps and file output.

mod experiment;
pub mod io;
mod phantom;
mod sampling;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpiralError};
use crate::likelihood::PoissonModel;
use crate::signal::{check_len, Signal};
use crate::vecops::{dist_sq, norm};

pub use experiment::{
    run_experiment, tau_grid, ExperimentConfig, ExperimentReport, MethodSpec, RunRecord,
    TrialRecord,
};
pub use phantom::make_phantom;
pub use sampling::sample_poisson;

/// `100·‖f̂ - f⋆‖ / ‖f⋆‖`.
pub fn rmse_percent(estimate: &Signal, truth: &Signal) -> Result<f64> {
    check_len(truth.len(), estimate.len())?;
    let t = norm(truth.values());
    if t == 0.0 {
        return Err(SpiralError::InvalidParameter(
            "RMSE against a zero truth".into(),
        ));
    }
    Ok(100.0 * dist_sq(estimate.values(), truth.values()).sqrt() / t)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitPolicy {
    /// `c·Aᵀy` with `c` chosen so that `1ᵀA f⁰ = Σy`, clipped at zero.
    #[default]
    ScaledBackprojection,
    /// Constant image with total predicted counts `Σy`.
    Flat,
}

/// Starting point `f⁰ >= 0` for the reconstruction, shaped like `template`.
pub fn initialize(model: &PoissonModel, template: &Signal, policy: InitPolicy) -> Result<Signal> {
    check_len(model.dim(), template.len())?;
    let total: f64 = model.counts().iter().sum();
    let n = model.dim();
    let base = match policy {
        InitPolicy::ScaledBackprojection => model.map().apply_adjoint(model.counts())?,
        InitPolicy::Flat => vec![1.0; n],
    };
    let predicted: f64 = model.map().apply(&base)?.iter().sum();
    let c = if total > 0.0 && predicted > 0.0 {
        total / predicted
    } else {
        0.0
    };
    template.with_values(base.iter().map(|&b| (c * b).max(0.0)).collect())
}
