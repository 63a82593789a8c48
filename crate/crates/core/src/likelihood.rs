//! Negative Poisson log-likelihood
//!
//! `F(f) = 1ᵀ(Af + b) - Σ y_i log(e_iᵀ(Af + b) + β)`
//!
//! with its gradient, the Hessian quadratic form used for step selection, and
//! the global Lipschitz bound on the gradient over the nonnegative orthant.

use std::sync::Arc;

use crate::error::{Result, SpiralError};
use crate::operators::LinearMap;
use crate::signal::{check_len, check_nonnegative};

pub const DEFAULT_BETA: f64 = 1e-10;

/// The data-fidelity term: forward map, observed counts, `β` and an optional
/// known background.
#[derive(Clone)]
pub struct PoissonModel {
    map: Arc<dyn LinearMap>,
    counts: Vec<f64>,
    beta: f64,
    background: Option<Vec<f64>>,
}

impl std::fmt::Debug for PoissonModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PoissonModel")
            .field("rows", &self.map.rows())
            .field("cols", &self.map.cols())
            .field("beta", &self.beta)
            .field("background", &self.background.is_some())
            .finish()
    }
}

impl PoissonModel {
    pub fn new(map: Arc<dyn LinearMap>, counts: &[u64]) -> Result<Self> {
        check_len(map.rows(), counts.len())?;
        Ok(Self {
            map,
            counts: counts.iter().map(|&c| c as f64).collect(),
            beta: DEFAULT_BETA,
            background: None,
        })
    }

    /// Accepts counts stored as floats; each must be a nonnegative integer.
    pub fn from_f64_counts(map: Arc<dyn LinearMap>, counts: &[f64]) -> Result<Self> {
        check_len(map.rows(), counts.len())?;
        if let Some(i) = counts
            .iter()
            .position(|&c| !(c >= 0.0) || c.fract() != 0.0 || !c.is_finite())
        {
            return Err(SpiralError::InvalidParameter(format!(
                "count {i} is {} (must be a nonnegative integer)",
                counts[i]
            )));
        }
        Ok(Self {
            map,
            counts: counts.to_vec(),
            beta: DEFAULT_BETA,
            background: None,
        })
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(SpiralError::InvalidParameter(format!(
                "beta must be positive, got {beta}"
            )));
        }
        self.beta = beta;
        Ok(self)
    }

    pub fn with_background(mut self, background: Vec<f64>) -> Result<Self> {
        check_len(self.map.rows(), background.len())?;
        check_nonnegative(&background)?;
        self.background = Some(background);
        Ok(self)
    }

    pub fn map(&self) -> &Arc<dyn LinearMap> {
        &self.map
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn background(&self) -> Option<&[f64]> {
        self.background.as_deref()
    }

    /// Signal dimension `n`.
    pub fn dim(&self) -> usize {
        self.map.cols()
    }

    /// Number of measurements `m`.
    pub fn measurements(&self) -> usize {
        self.map.rows()
    }

    /// `A f`, one forward application.
    pub fn forward(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.map.apply(f)
    }

    fn resolve_forward<'a>(
        &self,
        f: &[f64],
        af: Option<&'a [f64]>,
    ) -> Result<std::borrow::Cow<'a, [f64]>> {
        check_len(self.dim(), f.len())?;
        check_nonnegative(f)?;
        match af {
            Some(v) => {
                check_len(self.measurements(), v.len())?;
                Ok(std::borrow::Cow::Borrowed(v))
            }
            None => Ok(std::borrow::Cow::Owned(self.map.apply(f)?)),
        }
    }

    fn mean(&self, af: &[f64], i: usize) -> f64 {
        match &self.background {
            Some(b) => af[i] + b[i],
            None => af[i],
        }
    }

    /// `F(f)`. Pass `af = Some(Af)` to skip the forward application.
    pub fn objective(&self, f: &[f64], af: Option<&[f64]>) -> Result<f64> {
        let af = self.resolve_forward(f, af)?;
        Ok(self.objective_from_forward(&af))
    }

    /// `F` evaluated from a precomputed `Af` alone, with no feasibility check.
    pub fn objective_from_forward(&self, af: &[f64]) -> f64 {
        let mut linear = 0.0;
        let mut log_term = 0.0;
        for (i, &y) in self.counts.iter().enumerate() {
            let mu = self.mean(af, i);
            linear += mu;
            // Zero counts contribute only to the linear part.
            if y != 0.0 {
                log_term += y * (mu + self.beta).ln();
            }
        }
        linear - log_term
    }

    /// `∇F(f) = Aᵀ(1 - y ⊘ (Af + b + β))`, using exactly one adjoint application.
    pub fn gradient(&self, f: &[f64], af: Option<&[f64]>) -> Result<Vec<f64>> {
        let af = self.resolve_forward(f, af)?;
        Ok(self.gradient_from_forward(&af))
    }

    pub fn gradient_from_forward(&self, af: &[f64]) -> Vec<f64> {
        let weights: Vec<f64> = self
            .counts
            .iter()
            .enumerate()
            .map(|(i, &y)| {
                if y == 0.0 {
                    1.0
                } else {
                    1.0 - y / (self.mean(af, i) + self.beta)
                }
            })
            .collect();
        let mut grad = vec![0.0; self.dim()];
        self.map.adjoint_into(&weights, &mut grad);
        grad
    }

    /// `δᵀ∇²F(f)δ = Σ y_i (Aδ)_i² / (Af + b + β)_i²` from cached `Af` and `Aδ`.
    pub fn curvature_form(&self, af: &[f64], a_delta: &[f64]) -> Result<f64> {
        check_len(self.measurements(), af.len())?;
        check_len(self.measurements(), a_delta.len())?;
        Ok(self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &y)| y != 0.0)
            .map(|(i, &y)| {
                let r = a_delta[i] / (self.mean(af, i) + self.beta);
                y * r * r
            })
            .sum())
    }

    /// `max(y)/β² · max(Aᵀ1) · max(A1)`, an upper bound on the Lipschitz
    /// constant of `∇F` over `f >= 0`. Costs one forward and one adjoint.
    ///
    /// Far too large to use as a step size when `β` is small; diagnostic only.
    pub fn lipschitz_bound(&self) -> f64 {
        let max_y = self.counts.iter().copied().fold(0.0, f64::max);
        if max_y == 0.0 {
            return 0.0;
        }
        let row_sums = self
            .map
            .apply(&vec![1.0; self.dim()])
            .expect("dimensions fixed at construction");
        let col_sums = self
            .map
            .apply_adjoint(&vec![1.0; self.measurements()])
            .expect("dimensions fixed at construction");
        let max_of = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
        max_y / (self.beta * self.beta) * max_of(&col_sums) * max_of(&row_sums)
    }

    /// Power-iteration estimate of the largest eigenvalue of `∇²F(f)`.
    pub fn hessian_spectral_estimate(&self, f: &[f64], iterations: usize) -> Result<f64> {
        let af = self.resolve_forward(f, None)?.into_owned();
        let n = self.dim();
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i % 7) as f64 * 0.1).collect();
        let mut estimate = 0.0;
        for _ in 0..iterations {
            let nv = crate::vecops::norm(&v);
            if nv == 0.0 {
                return Ok(0.0);
            }
            v.iter_mut().for_each(|x| *x /= nv);
            let av = self.map.apply(&v)?;
            let weighted: Vec<f64> = av
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let d = self.mean(&af, i) + self.beta;
                    self.counts[i] * x / (d * d)
                })
                .collect();
            let hv = self.map.apply_adjoint(&weighted)?;
            estimate = crate::vecops::dot(&v, &hv);
            v = hv;
        }
        Ok(estimate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{DenseMatrix, Identity};

    fn identity_model(counts: &[u64]) -> PoissonModel {
        PoissonModel::new(Arc::new(Identity::new(counts.len())), counts).unwrap()
    }

    #[test]
    fn zero_data_zero_signal() {
        let m = identity_model(&[0, 0, 0]);
        assert_eq!(m.objective(&[0.0; 3], None).unwrap(), 0.0);
    }

    #[test]
    fn scalar_substitution() {
        let m = identity_model(&[2]);
        let expected = 1.0 - 2.0 * (1.0f64 + 1e-10).ln();
        assert_eq!(m.objective(&[1.0], None).unwrap(), expected);
        let g = m.gradient(&[1.0], None).unwrap();
        let m1 = identity_model(&[1]);
        let g1 = m1.gradient(&[1.0], None).unwrap();
        assert!((g1[0] - (1.0 - 1.0 / (1.0 + 1e-10))).abs() < 1e-20);
        assert!((g[0] - (1.0 - 2.0 / (1.0 + 1e-10))).abs() < 1e-15);
    }

    #[test]
    fn zero_counts_gradient_is_column_sums() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.5, 0.0], vec![3.0, 1.0]]).unwrap();
        let col_sums = a.apply_adjoint(&[1.0; 3]).unwrap();
        let m = PoissonModel::new(Arc::new(a), &[0, 0, 0]).unwrap();
        assert_eq!(m.gradient(&[0.3, 0.7], None).unwrap(), col_sums);
        assert_eq!(m.curvature_form(&[1.0; 3], &[5.0; 3]).unwrap(), 0.0);
        assert_eq!(m.lipschitz_bound(), 0.0);
    }

    #[test]
    fn rejects_infeasible_queries() {
        let m = identity_model(&[1, 2]);
        assert!(matches!(
            m.objective(&[1.0, -0.5], None),
            Err(SpiralError::Infeasible { index: 1, .. })
        ));
        assert!(m.gradient(&[-1.0, 0.5], None).is_err());
        assert!(m.objective(&[1.0], None).is_err());
    }

    #[test]
    fn lipschitz_identity() {
        let m = identity_model(&[1, 3, 2]).with_beta(0.5).unwrap();
        assert_eq!(m.lipschitz_bound(), 12.0);
    }

    #[test]
    fn background_enters_both_terms() {
        let m = identity_model(&[2]).with_background(vec![0.5]).unwrap();
        let expected = 1.5 - 2.0 * (1.5f64 + 1e-10).ln();
        assert!((m.objective(&[1.0], None).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn invalid_construction() {
        let map: Arc<dyn LinearMap> = Arc::new(Identity::new(2));
        assert!(PoissonModel::new(map.clone(), &[1]).is_err());
        assert!(PoissonModel::from_f64_counts(map.clone(), &[1.0, 0.5]).is_err());
        assert!(PoissonModel::from_f64_counts(map.clone(), &[1.0, -1.0]).is_err());
        assert!(PoissonModel::new(map.clone(), &[1, 1])
            .unwrap()
            .with_beta(0.0)
            .is_err());
        assert!(PoissonModel::new(map, &[1, 1])
            .unwrap()
            .with_background(vec![-1.0, 0.0])
            .is_err());
    }

    #[test]
    fn delta_zero_has_zero_curvature() {
        let m = identity_model(&[4, 1]);
        assert_eq!(m.curvature_form(&[1.0, 2.0], &[0.0, 0.0]).unwrap(), 0.0);
    }
}
