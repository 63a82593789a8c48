use serde::{Deserialize, Serialize};

use crate::denoise::{
    denoise_canonical_l1, denoise_l1_dual, denoise_tv, rdp_complexity, rdp_fit, rdp_ti_fit,
    tv_seminorm, ShiftSet, SubConfig, TvDual,
};
use crate::error::{Result, SpiralError};
use crate::operators::{Identity, LinearMap, OrthoBasis, WaveletFamily};
use crate::signal::Signal;
use crate::vecops::l1;

/// Regularizer `pen(f)` in `Φ(f) = F(f) + τ·pen(f)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Penalty {
    /// `‖f‖₁`.
    CanonicalL1,
    /// `‖Wᵀf‖₁` for an orthonormal wavelet basis `W`; `levels = None` is full depth.
    BasisL1 {
        family: WaveletFamily,
        #[serde(default)]
        levels: Option<usize>,
    },
    /// Anisotropic total variation.
    Tv,
    /// Number of cells of the recursive dyadic partition.
    Rdp,
    /// Cycle-spun partition estimate; the penalty is the mean cell count.
    RdpTi {
        #[serde(default)]
        shifts: ShiftSet,
    },
}

impl Penalty {
    pub fn is_l1(&self) -> bool {
        matches!(self, Penalty::CanonicalL1 | Penalty::BasisL1 { .. })
    }

    /// Default inner-solver settings for this penalty.
    pub fn default_sub(&self) -> SubConfig {
        match self {
            Penalty::Tv => SubConfig::tv_default(),
            _ => SubConfig::tight(),
        }
    }
}

/// Dual variables carried from one accepted outer iterate to the next.
#[derive(Clone, Debug, Default)]
pub(crate) enum Warm {
    #[default]
    None,
    Lambda(Vec<f64>),
    Tv(TvDual),
}

/// Quantities needed by the KKT test: coefficients and the subproblem multiplier.
#[derive(Clone, Debug)]
pub(crate) struct KktData {
    pub theta: Vec<f64>,
    pub lambda: Vec<f64>,
}

#[derive(Debug)]
pub(crate) struct Trial {
    pub f: Vec<f64>,
    pub penalty: f64,
    pub inner: usize,
    pub warm: Warm,
    pub kkt: Option<KktData>,
}

enum Kind {
    Canonical(Identity),
    Basis(OrthoBasis),
    Tv,
    Rdp,
    RdpTi(ShiftSet),
}

pub(crate) struct Driver {
    kind: Kind,
    sub: SubConfig,
}

impl Driver {
    pub fn new(penalty: &Penalty, sub: SubConfig, template: &Signal) -> Result<Self> {
        let kind = match penalty {
            Penalty::CanonicalL1 => Kind::Canonical(Identity::new(template.len())),
            Penalty::BasisL1 { family, levels } => {
                let (rows, cols) = template.shape().unwrap_or((1, template.len()));
                Kind::Basis(OrthoBasis::with_shape(*family, rows, cols, *levels)?)
            }
            Penalty::Tv => {
                template.square_side()?;
                Kind::Tv
            }
            Penalty::Rdp => Kind::Rdp,
            Penalty::RdpTi { shifts } => Kind::RdpTi(shifts.clone()),
        };
        Ok(Self { kind, sub })
    }

    /// Map for the KKT residual, `None` for non-ℓ1 penalties.
    pub fn kkt_basis(&self) -> Option<&dyn LinearMap> {
        match &self.kind {
            Kind::Canonical(id) => Some(id),
            Kind::Basis(b) => Some(b),
            _ => None,
        }
    }

    pub fn value(&self, f: &Signal) -> Result<f64> {
        Ok(match &self.kind {
            Kind::Canonical(_) => l1(f.values()),
            Kind::Basis(b) => l1(&b.analysis(f.values())?),
            Kind::Tv => tv_seminorm(f)?,
            Kind::Rdp => rdp_complexity(f)? as f64,
            Kind::RdpTi(shifts) => {
                let side = f.square_side()?;
                let v = f.values();
                let list = shifts.shifts(side);
                let mut total = 0usize;
                for &(dr, dc) in &list {
                    let shifted: Vec<f64> = (0..side * side)
                        .map(|i| {
                            let (r, c) = (i / side, i % side);
                            v[((r + dr) % side) * side + (c + dc) % side]
                        })
                        .collect();
                    total += rdp_complexity(&Signal::image(side, side, shifted)?)?;
                }
                total as f64 / list.len() as f64
            }
        })
    }

    pub fn solve(&self, s: &Signal, kappa: f64, warm: &Warm) -> Result<Trial> {
        let sub = &self.sub;
        let trial = match &self.kind {
            Kind::Canonical(_) => {
                let sv = s.values();
                let f = denoise_canonical_l1(sv, kappa)?;
                let lambda = sv
                    .iter()
                    .map(|&v| (-(v + (-v).clamp(-kappa, kappa))).max(0.0))
                    .collect();
                Trial {
                    penalty: l1(&f),
                    kkt: Some(KktData {
                        theta: f.clone(),
                        lambda,
                    }),
                    f,
                    inner: 1,
                    warm: Warm::None,
                }
            }
            Kind::Basis(basis) => {
                let coef = basis.analysis(s.values())?;
                let warm_lambda = match warm {
                    Warm::Lambda(l) if sub.warm_start => Some(l.as_slice()),
                    _ => None,
                };
                let sol = denoise_l1_dual(&coef, kappa, basis, sub, warm_lambda)?;
                Trial {
                    penalty: l1(&sol.theta),
                    f: sol.f,
                    inner: sol.sweeps,
                    warm: Warm::Lambda(sol.lambda.clone()),
                    kkt: Some(KktData {
                        theta: sol.theta,
                        lambda: sol.lambda,
                    }),
                }
            }
            Kind::Tv => {
                let warm_dual = match warm {
                    Warm::Tv(d) if sub.warm_start => Some(d),
                    _ => None,
                };
                let sol = denoise_tv(s, kappa, sub, warm_dual)?;
                Trial {
                    penalty: tv_seminorm(&sol.f)?,
                    f: sol.f.into_values(),
                    inner: sol.iterations,
                    warm: Warm::Tv(sol.dual),
                    kkt: None,
                }
            }
            Kind::Rdp => {
                let fit = rdp_fit(s, kappa)?;
                Trial {
                    penalty: rdp_complexity(&fit.estimate)? as f64,
                    f: fit.estimate.into_values(),
                    inner: 1,
                    warm: Warm::None,
                    kkt: None,
                }
            }
            Kind::RdpTi(shifts) => {
                let fit = rdp_ti_fit(s, kappa, shifts)?;
                Trial {
                    penalty: fit.mean_cells,
                    f: fit.estimate.into_values(),
                    inner: 1,
                    warm: Warm::None,
                    kkt: None,
                }
            }
        };
        if trial.f.len() != s.len() || trial.f.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(SpiralError::InfeasibleSubproblem);
        }
        Ok(trial)
    }
}
