//! Scalar building blocks of one outer iteration.

use crate::error::Result;
use crate::likelihood::PoissonModel;
use crate::operators::LinearMap;
use crate::vecops::{dist_sq, norm};

/// Modified Barzilai–Borwein step: the Rayleigh quotient of `∇²F(f)` along
/// the last step `δ`, clamped to `[alpha_min, alpha_max]`.
///
/// `af` is `Af` at the current iterate and `a_delta` is `Aδ`. A zero step
/// yields `alpha_min`.
pub fn bb_alpha_init(
    model: &PoissonModel,
    af: &[f64],
    a_delta: &[f64],
    delta_norm_sq: f64,
    alpha_min: f64,
    alpha_max: f64,
) -> Result<f64> {
    let curvature = model.curvature_form(af, a_delta)?;
    let ratio = curvature / delta_norm_sq;
    Ok(if ratio.is_nan() {
        alpha_min
    } else {
        ratio.clamp(alpha_min, alpha_max)
    })
}

/// `s = f - ∇F(f) / α`.
pub fn gradient_step(f: &[f64], grad: &[f64], alpha: f64) -> Vec<f64> {
    f.iter().zip(grad).map(|(x, g)| x - g / alpha).collect()
}

/// `Φ_new <= window_max - (σα/2)‖f_new - f‖²`.
pub fn acceptance_check(
    phi_new: f64,
    window_max: f64,
    sigma: f64,
    alpha: f64,
    step_norm_sq: f64,
) -> bool {
    phi_new <= window_max - 0.5 * sigma * alpha * step_norm_sq
}

/// Relative iterate change `‖f_new - f‖ / ‖f‖`, or `‖f_new‖` when `f = 0`.
pub fn iterate_change(f: &[f64], f_new: &[f64]) -> f64 {
    let scale = norm(f);
    if scale > 0.0 {
        dist_sq(f, f_new).sqrt() / scale
    } else {
        norm(f_new)
    }
}

/// Relative objective change, absolute when `Φ = 0`.
pub fn objective_change(phi: f64, phi_new: f64) -> f64 {
    let diff = (phi_new - phi).abs();
    if phi != 0.0 {
        diff / phi.abs()
    } else {
        diff
    }
}

pub fn terminate_iterate_change(f: &[f64], f_new: &[f64], tol: f64) -> bool {
    iterate_change(f, f_new) <= tol
}

pub fn terminate_objective_change(phi: f64, phi_new: f64, tol: f64) -> bool {
    objective_change(phi, phi_new) <= tol
}

/// Norm of the Lagrangian gradient for the ℓ1 problem in coefficient space.
///
/// `grad_f` is `∇F(Wθ)` in the signal domain and `lambda` the multiplier of
/// `Wθ >= 0` in the scale of the full objective (subproblem multiplier times
/// `α`). With `g = Wᵀ∇F - Wᵀλ`, each coordinate contributes `g_i + τ·sign(θ_i)`
/// when `θ_i != 0` and the smallest-norm subgradient residual
/// `max(|g_i| - τ, 0)` when `θ_i = 0`.
pub fn kkt_residual(
    grad_f: &[f64],
    theta: &[f64],
    lambda: &[f64],
    tau: f64,
    basis: &dyn LinearMap,
) -> Result<f64> {
    let wt_grad = basis.apply_adjoint(grad_f)?;
    let wt_lambda = basis.apply_adjoint(lambda)?;
    let mut sum = 0.0;
    for i in 0..theta.len() {
        let g = wt_grad[i] - wt_lambda[i];
        let r = if theta[i] > 0.0 {
            g + tau
        } else if theta[i] < 0.0 {
            g - tau
        } else {
            (g.abs() - tau).max(0.0)
        };
        sum += r * r;
    }
    Ok(sum.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Identity;
    use std::sync::Arc;

    #[test]
    fn identity_rayleigh_quotient_is_one() {
        let model = PoissonModel::from_f64_counts(Arc::new(Identity::new(3)), &[1.0; 3]).unwrap();
        let af = vec![1.0 - model.beta(); 3];
        let delta = [0.3, -2.0, 1.5];
        let nsq: f64 = delta.iter().map(|d| d * d).sum();
        let a = bb_alpha_init(&model, &af, &delta, nsq, 1e-30, 1e30).unwrap();
        assert!((a - 1.0).abs() < 1e-12);
        let zero = bb_alpha_init(&model, &af, &[0.0; 3], 0.0, 1e-30, 1e30).unwrap();
        assert_eq!(zero, 1e-30);
    }

    #[test]
    fn step_arithmetic() {
        assert_eq!(
            gradient_step(&[1.0, 2.0], &[0.5, -1.0], 2.0),
            vec![0.75, 2.5]
        );
        assert_eq!(gradient_step(&[1.0, 2.0], &[0.0, 0.0], 3.0), vec![1.0, 2.0]);
    }

    #[test]
    fn acceptance_arithmetic() {
        assert!(acceptance_check(9.6, 10.0, 0.1, 2.0, 4.0));
        assert!(!acceptance_check(9.600001, 10.0, 0.1, 2.0, 4.0));
        assert!(acceptance_check(10.0, 10.0, 0.1, 2.0, 0.0));
        assert!(!acceptance_check(10.5, 10.0, 0.1, 2.0, 0.0));
    }

    #[test]
    fn termination_tests() {
        assert!(terminate_iterate_change(&[1.0, 2.0], &[1.0, 2.0], 5e-4));
        assert!(terminate_iterate_change(&[0.0], &[0.0], 5e-4));
        assert!(!terminate_iterate_change(&[0.0], &[1.0], 5e-4));
        // Exactly at tolerance.
        assert!(terminate_iterate_change(&[4.0], &[5.0], 0.25));
        assert!(terminate_objective_change(4.0, 5.0, 0.25));
        assert!(terminate_objective_change(0.0, 1e-4, 5e-4));
    }

    #[test]
    fn kkt_zero_at_stationary_point() {
        let id = Identity::new(3);
        let r = kkt_residual(&[0.0; 3], &[0.0; 3], &[0.0; 3], 0.0, &id).unwrap();
        assert_eq!(r, 0.0);
        // Zero coefficients tolerate gradients up to τ.
        let r = kkt_residual(&[0.5, -0.5, 0.0], &[0.0; 3], &[0.0; 3], 1.0, &id).unwrap();
        assert_eq!(r, 0.0);
        let r = kkt_residual(&[-1.0, 0.0, 0.0], &[2.0, 0.0, 0.0], &[0.0; 3], 1.0, &id).unwrap();
        assert_eq!(r, 0.0);
    }
}
