//! Basis-ℓ1 denoising with a nonnegativity constraint in the signal domain:
//!
//! `minimize ½‖θ - s‖² + κ‖θ‖₁  subject to Wθ >= 0`
//!
//! solved by exact block-coordinate minimization of the Lagrange dual
//! `h(γ, λ) = ½‖s + γ + Wᵀλ‖² - ½‖s‖²` over `|γ| <= κ`, `λ >= 0`.
//! After each sweep `θ = s + γ + Wᵀλ` satisfies `Wθ = [W(s + γ)]₊`, so
//! stopping early still yields a feasible point.

use crate::error::{Result, SpiralError};
use crate::operators::LinearMap;
use crate::signal::check_len;
use crate::vecops::{l1, norm_sq};

use super::{check_kappa, SubConfig};

#[derive(Clone, Debug)]
pub struct DualSolution {
    /// Coefficient estimate `θ = s + γ + Wᵀλ`.
    pub theta: Vec<f64>,
    /// Signal estimate `Wθ`, computed as `[W(s + γ)]₊` and hence exactly nonnegative.
    pub f: Vec<f64>,
    pub gamma: Vec<f64>,
    /// Multiplier for the constraint `Wθ >= 0`.
    pub lambda: Vec<f64>,
    /// `|φ(θ) + h(γ, λ)| / |φ(θ)|`.
    pub gap: f64,
    /// Primal objective `φ(θ)`.
    pub primal: f64,
    /// Dual lower bound `-h(γ, λ)`.
    pub dual: f64,
    pub sweeps: usize,
}

/// State after one `(γ, λ)` sweep, handed to observers.
#[derive(Debug)]
pub struct DualSweep<'a> {
    pub sweep: usize,
    pub theta: &'a [f64],
    pub f: &'a [f64],
    pub gamma: &'a [f64],
    pub lambda: &'a [f64],
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

/// `s` is given in coefficient space (`Wᵀ` of the gradient step). `basis`
/// must be orthonormal; its forward map is synthesis `θ -> Wθ`.
/// `warm_lambda` seeds `λ⁽⁰⁾`; `None` starts from zero.
pub fn denoise_l1_dual(
    s: &[f64],
    kappa: f64,
    basis: &dyn LinearMap,
    config: &SubConfig,
    warm_lambda: Option<&[f64]>,
) -> Result<DualSolution> {
    denoise_l1_dual_observed(s, kappa, basis, config, warm_lambda, |_| {})
}

pub fn denoise_l1_dual_observed(
    s: &[f64],
    kappa: f64,
    basis: &dyn LinearMap,
    config: &SubConfig,
    warm_lambda: Option<&[f64]>,
    mut on_sweep: impl FnMut(&DualSweep<'_>),
) -> Result<DualSolution> {
    check_kappa(kappa)?;
    config.validate()?;
    let n = s.len();
    if basis.rows() != n || basis.cols() != n {
        return Err(SpiralError::DimensionMismatch {
            expected: basis.cols(),
            got: n,
        });
    }

    let mut lambda = match warm_lambda {
        Some(l) => {
            check_len(n, l.len())?;
            l.iter().map(|&v| v.max(0.0)).collect()
        }
        None => vec![0.0; n],
    };
    let mut wt_lambda = vec![0.0; n];
    basis.adjoint_into(&lambda, &mut wt_lambda);

    let half_s_sq = 0.5 * norm_sq(s);
    let mut gamma = vec![0.0; n];
    let mut shifted = vec![0.0; n];
    let mut synth = vec![0.0; n];
    let mut f = vec![0.0; n];
    let mut theta = vec![0.0; n];
    let (mut primal, mut dual, mut gap) = (0.0, 0.0, f64::INFINITY);
    let mut sweeps = 0;

    while sweeps < config.max_iter {
        sweeps += 1;
        for i in 0..n {
            gamma[i] = (-s[i] - wt_lambda[i]).clamp(-kappa, kappa);
            shifted[i] = s[i] + gamma[i];
        }
        basis.forward_into(&shifted, &mut synth);
        for i in 0..n {
            lambda[i] = (-synth[i]).max(0.0);
            f[i] = synth[i].max(0.0);
        }
        basis.adjoint_into(&lambda, &mut wt_lambda);
        for i in 0..n {
            theta[i] = shifted[i] + wt_lambda[i];
        }

        let resid: f64 = theta.iter().zip(s).map(|(t, v)| (t - v) * (t - v)).sum();
        primal = 0.5 * resid + kappa * l1(&theta);
        dual = half_s_sq - 0.5 * norm_sq(&theta);
        gap = if primal != 0.0 {
            (primal - dual).abs() / primal.abs()
        } else {
            (primal - dual).abs()
        };

        on_sweep(&DualSweep {
            sweep: sweeps,
            theta: &theta,
            f: &f,
            gamma: &gamma,
            lambda: &lambda,
            primal,
            dual,
            gap,
        });

        if sweeps >= config.min_iter && gap <= config.tol {
            break;
        }
    }

    Ok(DualSolution {
        theta,
        f,
        gamma,
        lambda,
        gap,
        primal,
        dual,
        sweeps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denoise::denoise_canonical_l1;
    use crate::operators::{Identity, OrthoBasis, WaveletFamily};

    #[test]
    fn identity_basis_one_sweep_matches_closed_form() {
        let s = [3.0, -1.0, 0.5, 0.2, -4.0, 1.2];
        let kappa = 0.4;
        let cfg = SubConfig {
            tol: 1e-12,
            min_iter: 1,
            max_iter: 1,
            warm_start: false,
        };
        let sol = denoise_l1_dual(&s, kappa, &Identity::new(6), &cfg, None).unwrap();
        let closed = denoise_canonical_l1(&s, kappa).unwrap();
        for (a, b) in sol.theta.iter().zip(&closed) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(sol.f, closed);
        assert!(sol.gap < 1e-12);
    }

    #[test]
    fn inactive_constraints_recover_s() {
        // Ws >= 0 and κ = 0: nothing to do.
        let basis = OrthoBasis::new_1d(WaveletFamily::Haar, 8).unwrap();
        let f: Vec<f64> = (0..8).map(|i| 1.0 + i as f64).collect();
        let s = basis.analysis(&f).unwrap();
        let sol = denoise_l1_dual(&s, 0.0, &basis, &SubConfig::tight(), None).unwrap();
        assert!(sol.lambda.iter().all(|&l| l == 0.0));
        assert!(sol.gamma.iter().all(|&g| g == 0.0));
        for (a, b) in sol.theta.iter().zip(&s) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn negative_kappa_and_bad_dims() {
        let basis = Identity::new(4);
        assert!(denoise_l1_dual(&[0.0; 4], -1.0, &basis, &SubConfig::tight(), None).is_err());
        assert!(denoise_l1_dual(&[0.0; 3], 1.0, &basis, &SubConfig::tight(), None).is_err());
    }

    #[test]
    fn zero_input_has_zero_gap() {
        let basis = OrthoBasis::new_1d(WaveletFamily::Daubechies(2), 16).unwrap();
        let sol = denoise_l1_dual(&[0.0; 16], 1.0, &basis, &SubConfig::loose(), None).unwrap();
        assert_eq!(sol.gap, 0.0);
        assert!(sol.f.iter().all(|&v| v == 0.0));
    }
}
