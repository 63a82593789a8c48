use crate::error::Result;

use super::check_kappa;

/// Closed-form minimizer of `½‖f - s‖² + κ‖f‖₁` over `f >= 0`: `[s - κ]₊`.
pub fn denoise_canonical_l1(s: &[f64], kappa: f64) -> Result<Vec<f64>> {
    check_kappa(kappa)?;
    Ok(s.iter().map(|&v| (v - kappa).max(0.0)).collect())
}
