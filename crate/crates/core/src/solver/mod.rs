//! The outer SPIRAL iteration.
//!
//! Each iteration replaces `F` by a separable quadratic with curvature `α_k`
//! around `f^k`, which turns the step into a nonnegative denoising problem on
//! `s^k = f^k - ∇F(f^k)/α_k` with weight `τ/α_k`. `α_k` starts from a modified
//! Barzilai–Borwein rule and is multiplied by `η` until the nonmonotone
//! acceptance test passes.

mod penalty;
mod steps;
mod trace;

use std::collections::VecDeque;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::denoise::SubConfig;
use crate::error::{Result, SpiralError};
use crate::harness::rmse_percent;
use crate::likelihood::PoissonModel;
use crate::signal::{check_len, Signal};
use crate::vecops::dist_sq;

pub use penalty::Penalty;
pub use steps::{
    acceptance_check, bb_alpha_init, gradient_step, iterate_change, kkt_residual, objective_change,
    terminate_iterate_change, terminate_objective_change,
};
pub use trace::{trace_csv, write_trace_csv};

use penalty::{Driver, Warm};

/// Which stopping tests are active. Active tests are OR-combined and only
/// checked once `min_iter` iterations have run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TerminationRule {
    pub iterate_change: bool,
    pub objective_change: bool,
    /// Lagrangian-gradient test, ℓ1 penalties only.
    pub kkt: bool,
}

impl Default for TerminationRule {
    fn default() -> Self {
        Self {
            iterate_change: true,
            objective_change: true,
            kkt: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub tau: f64,
    pub eta: f64,
    pub sigma: f64,
    /// Nonmonotone window `M`; the test compares against the last `M + 1` objectives.
    pub window: usize,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub tol_p: f64,
    pub min_iter: usize,
    pub max_iter: usize,
    /// `false` accepts every Barzilai–Borwein step without backtracking.
    pub acceptance_enabled: bool,
    pub termination: TerminationRule,
    pub penalty: Penalty,
    pub sub: SubConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tau: 1.0,
            eta: 2.0,
            sigma: 0.1,
            window: 10,
            alpha_min: 1e-30,
            alpha_max: 1e30,
            tol_p: 5e-4,
            min_iter: 50,
            max_iter: 1000,
            acceptance_enabled: true,
            termination: TerminationRule::default(),
            penalty: Penalty::CanonicalL1,
            sub: SubConfig::tight(),
        }
    }
}

impl SolverConfig {
    pub fn new(tau: f64, penalty: Penalty) -> Self {
        Self {
            tau,
            sub: penalty.default_sub(),
            penalty,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(SpiralError::InvalidParameter(msg.to_string()));
        if !(self.tau >= 0.0) || !self.tau.is_finite() {
            return bad("tau must be finite and >= 0");
        }
        if !(self.eta > 1.0) {
            return bad("eta must exceed 1");
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return bad("sigma must lie in (0, 1)");
        }
        if !(self.alpha_min > 0.0 && self.alpha_min <= self.alpha_max) {
            return bad("need 0 < alpha_min <= alpha_max");
        }
        if !(self.tol_p > 0.0) {
            return bad("tol_p must be positive");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive");
        }
        self.sub.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminationReason {
    IterateChange,
    ObjectiveChange,
    Kkt,
    MaxIter,
}

impl TerminationReason {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminationReason::IterateChange => "iterate-change",
            TerminationReason::ObjectiveChange => "objective-change",
            TerminationReason::Kkt => "kkt",
            TerminationReason::MaxIter => "max-iter",
        }
    }
}

/// Solver state after accepting `f^k`.
#[derive(Clone, Debug)]
pub struct IterateState {
    pub k: usize,
    pub f: Signal,
    pub af: Vec<f64>,
    pub grad: Vec<f64>,
    /// Step scalar used to produce `f^k` (the initial guess for `k = 0`).
    pub alpha: f64,
    pub objective: f64,
    pub penalty_value: f64,
    /// Last `M + 1` objective values, oldest first.
    pub window: VecDeque<f64>,
    /// `A(f^k - f^{k-1})`; empty at `k = 0`.
    pub a_delta: Vec<f64>,
    pub delta_norm_sq: f64,
}

impl IterateState {
    pub fn window_max(&self) -> f64 {
        self.window
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub objective: f64,
    pub alpha: f64,
    pub backtracks: usize,
    pub elapsed_seconds: f64,
    pub rmse: Option<f64>,
    /// `‖f^k - f^{k-1}‖ / ‖f^{k-1}‖`; zero for `k = 0`.
    pub rel_change: f64,
    pub objective_change: f64,
    /// Window maximum before `f^k` entered it.
    pub window_max: f64,
    pub step_norm_sq: f64,
    pub inner_iterations: usize,
    pub kkt: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct SolverResult {
    pub estimate: Signal,
    pub trace: Vec<IterationRecord>,
    pub termination: TerminationReason,
    pub iterations: usize,
    pub objective: f64,
}

pub fn run(
    model: &PoissonModel,
    config: &SolverConfig,
    f0: &Signal,
    truth: Option<&Signal>,
) -> Result<SolverResult> {
    run_with_observer(model, config, f0, truth, |_, _| {})
}

/// Like [`run`], calling `observe` after every accepted iterate (including `k = 0`).
pub fn run_with_observer(
    model: &PoissonModel,
    config: &SolverConfig,
    f0: &Signal,
    truth: Option<&Signal>,
    mut observe: impl FnMut(&IterateState, &IterationRecord),
) -> Result<SolverResult> {
    config.validate()?;
    check_len(model.dim(), f0.len())?;
    f0.check_feasible()?;
    if let Some(t) = truth {
        check_len(f0.len(), t.len())?;
    }
    let start = Instant::now();
    let driver = Driver::new(&config.penalty, config.sub, f0)?;
    let tau = config.tau;
    let n = f0.len();

    let af = model.forward(f0.values())?;
    let grad = model.gradient_from_forward(&af);
    let penalty_value = driver.value(f0)?;
    let objective = model.objective_from_forward(&af) + tau * penalty_value;

    // First step: Rayleigh quotient along the all-ones direction.
    let a_ones = model.forward(&vec![1.0; n])?;
    let alpha0 = (model.curvature_form(&af, &a_ones)? / n as f64)
        .max(config.alpha_min)
        .min(config.alpha_max);

    let mut state = IterateState {
        k: 0,
        f: f0.clone(),
        af,
        grad,
        alpha: alpha0,
        objective,
        penalty_value,
        window: std::iter::repeat_n(objective, config.window + 1).collect(),
        a_delta: Vec::new(),
        delta_norm_sq: 0.0,
    };
    let record0 = IterationRecord {
        k: 0,
        objective,
        alpha: alpha0,
        backtracks: 0,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        rmse: truth.map(|t| rmse_percent(f0, t)).transpose()?,
        rel_change: 0.0,
        objective_change: 0.0,
        window_max: objective,
        step_norm_sq: 0.0,
        inner_iterations: 0,
        kkt: None,
    };
    observe(&state, &record0);
    let mut trace = vec![record0];
    let mut warm = Warm::None;
    let mut termination = TerminationReason::MaxIter;

    while state.k < config.max_iter {
        let mut alpha = if state.k == 0 {
            alpha0
        } else {
            bb_alpha_init(
                model,
                &state.af,
                &state.a_delta,
                state.delta_norm_sq,
                config.alpha_min,
                config.alpha_max,
            )?
        };
        let window_max = state.window_max();
        let mut backtracks = 0;
        let (trial, af_new, phi_new, step_sq) = loop {
            let s = state
                .f
                .with_values(gradient_step(state.f.values(), &state.grad, alpha))?;
            let trial = driver.solve(&s, tau / alpha, &warm)?;
            let af_new = model.forward(&trial.f)?;
            let phi_new = model.objective_from_forward(&af_new) + tau * trial.penalty;
            let step_sq = dist_sq(&trial.f, state.f.values());
            if !config.acceptance_enabled
                || acceptance_check(phi_new, window_max, config.sigma, alpha, step_sq)
            {
                break (trial, af_new, phi_new, step_sq);
            }
            if alpha * config.eta > config.alpha_max {
                log::warn!(
                    "iteration {}: step scalar would exceed {:e}; accepting trial without sufficient decrease",
                    state.k + 1,
                    config.alpha_max
                );
                break (trial, af_new, phi_new, step_sq);
            }
            alpha *= config.eta;
            backtracks += 1;
        };

        let grad_new = model.gradient_from_forward(&af_new);
        let rel_change = iterate_change(state.f.values(), &trial.f);
        let obj_change = objective_change(state.objective, phi_new);
        let kkt = match (&trial.kkt, driver.kkt_basis()) {
            (Some(data), Some(basis)) => {
                let scaled: Vec<f64> = data.lambda.iter().map(|l| alpha * l).collect();
                Some(kkt_residual(&grad_new, &data.theta, &scaled, tau, basis)?)
            }
            _ => None,
        };

        let a_delta: Vec<f64> = af_new.iter().zip(&state.af).map(|(a, b)| a - b).collect();
        state.k += 1;
        state.f = state.f.with_values(trial.f)?;
        state.af = af_new;
        state.grad = grad_new;
        state.alpha = alpha;
        state.objective = phi_new;
        state.penalty_value = trial.penalty;
        state.window.push_back(phi_new);
        while state.window.len() > config.window + 1 {
            state.window.pop_front();
        }
        state.a_delta = a_delta;
        state.delta_norm_sq = step_sq;
        warm = trial.warm;

        let record = IterationRecord {
            k: state.k,
            objective: phi_new,
            alpha,
            backtracks,
            elapsed_seconds: start.elapsed().as_secs_f64(),
            rmse: truth.map(|t| rmse_percent(&state.f, t)).transpose()?,
            rel_change,
            objective_change: obj_change,
            window_max,
            step_norm_sq: step_sq,
            inner_iterations: trial.inner,
            kkt,
        };
        observe(&state, &record);
        trace.push(record);

        if state.k >= config.min_iter {
            let rule = &config.termination;
            let fired = if rule.iterate_change && rel_change <= config.tol_p {
                Some(TerminationReason::IterateChange)
            } else if rule.objective_change && obj_change <= config.tol_p {
                Some(TerminationReason::ObjectiveChange)
            } else if rule.kkt && kkt.is_some_and(|r| r <= config.tol_p) {
                Some(TerminationReason::Kkt)
            } else {
                None
            };
            if let Some(reason) = fired {
                termination = reason;
                break;
            }
        }
    }

    Ok(SolverResult {
        iterations: state.k,
        objective: state.objective,
        estimate: state.f,
        trace,
        termination,
    })
}
