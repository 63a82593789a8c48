use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::denoise::{ShiftSet, SubConfig};
use crate::error::{Result, SpiralError};
use crate::likelihood::PoissonModel;
use crate::operators::{build_tomography, LinearMap, WaveletFamily};
use crate::signal::Signal;
use crate::solver::{self, trace_csv, Penalty, SolverConfig, SolverResult, TerminationRule};

use super::io::write_pgm;
use super::{initialize, make_phantom, rmse_percent, sample_poisson, InitPolicy};

/// One reconstruction method of the comparison, with its `τ` search range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub name: String,
    pub penalty: Penalty,
    pub sub: SubConfig,
    pub acceptance_enabled: bool,
    pub tau_min: f64,
    pub tau_max: f64,
}

impl MethodSpec {
    pub fn l1(loose: bool, family: WaveletFamily) -> Self {
        Self {
            name: format!("l1-{}", if loose { "loose" } else { "tight" }),
            penalty: Penalty::BasisL1 {
                family,
                levels: None,
            },
            sub: if loose {
                SubConfig::loose()
            } else {
                SubConfig::tight()
            },
            acceptance_enabled: true,
            tau_min: 1e-3,
            tau_max: 3.0,
        }
    }

    pub fn tv(loose: bool, monotone: bool) -> Self {
        Self {
            name: format!(
                "tv-{}-{}",
                if loose { "loose" } else { "tight" },
                if monotone { "m" } else { "nm" }
            ),
            penalty: Penalty::Tv,
            sub: if loose {
                SubConfig::loose()
            } else {
                SubConfig::tight()
            },
            acceptance_enabled: monotone,
            tau_min: 0.01,
            tau_max: 3.0,
        }
    }

    pub fn rdp() -> Self {
        Self {
            name: "rdp".into(),
            penalty: Penalty::Rdp,
            sub: SubConfig::tight(),
            acceptance_enabled: true,
            tau_min: 0.01,
            tau_max: 10.0,
        }
    }

    pub fn rdp_ti() -> Self {
        Self {
            name: "rdp-ti".into(),
            penalty: Penalty::RdpTi {
                shifts: ShiftSet::default(),
            },
            sub: SubConfig::tight(),
            acceptance_enabled: true,
            tau_min: 0.01,
            tau_max: 10.0,
        }
    }

    /// The eight SPIRAL variants of the comparison table.
    pub fn all() -> Vec<Self> {
        vec![
            Self::l1(true, WaveletFamily::Haar),
            Self::l1(false, WaveletFamily::Haar),
            Self::tv(true, true),
            Self::tv(true, false),
            Self::tv(false, true),
            Self::tv(false, false),
            Self::rdp(),
            Self::rdp_ti(),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub side: usize,
    pub n_angles: usize,
    pub span_degrees: f64,
    pub n_radial: usize,
    /// Expected total photon count `E[Σy]`.
    pub total_counts: f64,
    pub seed: u64,
    pub trials: usize,
    /// Points in each method's log-spaced `τ` grid.
    pub tau_points: usize,
    pub min_iter: usize,
    pub max_iter: usize,
    pub tol_p: f64,
    pub termination: TerminationRule,
    pub init: InitPolicy,
    pub methods: Vec<MethodSpec>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            side: 64,
            n_angles: 60,
            span_degrees: 135.0,
            n_radial: 64,
            total_counts: 2.0e5,
            seed: 1,
            trials: 10,
            tau_points: 10,
            min_iter: 50,
            max_iter: 300,
            tol_p: 5e-4,
            termination: TerminationRule {
                iterate_change: true,
                objective_change: false,
                kkt: false,
            },
            init: InitPolicy::ScaledBackprojection,
            methods: MethodSpec::all(),
        }
    }
}

impl ExperimentConfig {
    pub fn solver_config(&self, method: &MethodSpec, tau: f64) -> SolverConfig {
        SolverConfig {
            tau,
            min_iter: self.min_iter,
            max_iter: self.max_iter,
            tol_p: self.tol_p,
            acceptance_enabled: method.acceptance_enabled,
            termination: self.termination,
            penalty: method.penalty.clone(),
            sub: method.sub,
            ..SolverConfig::default()
        }
    }
}

/// `points` values log-spaced over `[min, max]`.
pub fn tau_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max >= min && max.is_finite()) || points == 0 {
        return Err(SpiralError::InvalidParameter(format!(
            "bad tau grid [{min}, {max}] with {points} points"
        )));
    }
    if points == 1 {
        return Ok(vec![min]);
    }
    let (lo, hi) = (min.ln(), max.ln());
    Ok((0..points)
        .map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp())
        .collect())
}

/// Best-`τ` outcome of one method on one data realization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub method: String,
    pub tau: f64,
    pub rmse_percent: f64,
    pub wall_seconds: f64,
    pub iterations: usize,
    pub termination: String,
    /// Relative iterate change at the final iterate.
    pub final_rel_change: f64,
    pub error: Option<String>,
}

/// One solver run of a `τ` sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub trial: usize,
    pub method: String,
    pub tau: f64,
    pub rmse_percent: f64,
    pub wall_seconds: f64,
    pub iterations: usize,
    pub termination: String,
    pub final_rel_change: f64,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    /// Best-`τ` rows, ordered by trial, then method.
    pub records: Vec<TrialRecord>,
    /// Every successful run, ordered by trial, method, then `τ`.
    pub runs: Vec<RunRecord>,
    /// RMSE of the initialization per trial.
    pub init_rmse: Vec<f64>,
}

impl ExperimentReport {
    /// Deterministic for a fixed configuration: no timings.
    pub fn summary_csv(&self) -> String {
        let mut out =
            String::from("trial,method,tau,rmse_percent,iterations,termination,final_rel_change\n");
        for r in &self.records {
            let termination = match &r.error {
                Some(e) => format!("failed: {}", e.replace(',', ";")),
                None => r.termination.clone(),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.trial,
                r.method,
                r.tau,
                r.rmse_percent,
                r.iterations,
                termination,
                r.final_rel_change
            );
        }
        out
    }

    /// Every run of every sweep, without timings.
    pub fn runs_csv(&self) -> String {
        let mut out =
            String::from("trial,method,tau,rmse_percent,iterations,termination,final_rel_change\n");
        for r in &self.runs {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.trial,
                r.method,
                r.tau,
                r.rmse_percent,
                r.iterations,
                r.termination,
                r.final_rel_change
            );
        }
        out
    }

    pub fn timings_csv(&self) -> String {
        let mut out = String::from("trial,method,wall_seconds\n");
        for r in &self.records {
            let _ = writeln!(out, "{},{},{:.6}", r.trial, r.method, r.wall_seconds);
        }
        out
    }

    /// Mean over trials of `field` for `method`, ignoring failed rows.
    pub fn mean(&self, method: &str, field: impl Fn(&TrialRecord) -> f64) -> Option<f64> {
        let vals: Vec<f64> = self
            .records
            .iter()
            .filter(|r| r.method == method && r.error.is_none())
            .map(field)
            .collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }

    pub fn manifest_json(&self) -> Result<String> {
        let best: Vec<serde_json::Value> = self
            .records
            .iter()
            .map(|r| serde_json::json!({"trial": r.trial, "method": r.method, "tau": r.tau}))
            .collect();
        Ok(serde_json::to_string_pretty(&serde_json::json!({
            "version": env!("CARGO_PKG_VERSION"),
            "seed": self.config.seed,
            "config": self.config,
            "init_rmse_percent": self.init_rmse,
            "best_tau": best,
        }))?)
    }
}

struct TrialData {
    model: PoissonModel,
    truth: Signal,
    init: Signal,
}

struct Outcome {
    tau: f64,
    rmse: f64,
    seconds: f64,
    result: SolverResult,
    runs: Vec<RunRecord>,
}

fn sweep(
    config: &ExperimentConfig,
    method: &MethodSpec,
    trial: usize,
    data: &TrialData,
) -> std::result::Result<Outcome, String> {
    let grid =
        tau_grid(method.tau_min, method.tau_max, config.tau_points).map_err(|e| e.to_string())?;
    let mut best: Option<Outcome> = None;
    let mut runs = Vec::with_capacity(grid.len());
    let mut last_error = None;
    for tau in grid {
        let cfg = config.solver_config(method, tau);
        let start = Instant::now();
        match solver::run(&data.model, &cfg, &data.init, None) {
            Ok(result) => {
                let seconds = start.elapsed().as_secs_f64();
                let rmse =
                    rmse_percent(&result.estimate, &data.truth).map_err(|e| e.to_string())?;
                runs.push(RunRecord {
                    trial,
                    method: method.name.clone(),
                    tau,
                    rmse_percent: rmse,
                    wall_seconds: seconds,
                    iterations: result.iterations,
                    termination: result.termination.as_str().to_string(),
                    final_rel_change: result.trace.last().map_or(0.0, |r| r.rel_change),
                });
                if best.as_ref().is_none_or(|b| rmse < b.rmse) {
                    best = Some(Outcome {
                        tau,
                        rmse,
                        seconds,
                        result,
                        runs: Vec::new(),
                    });
                }
            }
            Err(e) => {
                log::warn!("{} at tau {tau}: {e}", method.name);
                last_error = Some(e.to_string());
            }
        }
    }
    let mut best = best.ok_or_else(|| last_error.unwrap_or_else(|| "no runs".into()))?;
    best.runs = runs;
    Ok(best)
}

/// Runs every method on every trial, sweeping `τ` and keeping the lowest-RMSE
/// run. With `out_dir`, writes images and traces of the best runs,
/// `summary.csv`, `runs.csv`, `timings.csv` and `manifest.json` there.
pub fn run_experiment(
    config: &ExperimentConfig,
    out_dir: Option<&Path>,
) -> Result<ExperimentReport> {
    if config.trials == 0 || config.methods.is_empty() {
        return Err(SpiralError::InvalidParameter(
            "need at least one trial and one method".into(),
        ));
    }
    let (phantom, mu) = make_phantom(config.side)?;
    let map: Arc<dyn LinearMap> = Arc::new(build_tomography(
        config.side,
        config.side,
        config.n_angles,
        config.span_degrees,
        config.n_radial,
        &mu,
    )?);

    let trials = (0..config.trials)
        .map(|t| {
            let seed = config.seed.wrapping_add(t as u64);
            let (counts, scale) =
                sample_poisson(map.as_ref(), &phantom, config.total_counts, seed)?;
            let model = PoissonModel::new(map.clone(), &counts)?;
            let truth =
                phantom.with_values(phantom.values().iter().map(|v| v * scale).collect())?;
            let init = initialize(&model, &phantom, config.init)?;
            Ok(TrialData { model, truth, init })
        })
        .collect::<Result<Vec<_>>>()?;
    let init_rmse = trials
        .iter()
        .map(|d| rmse_percent(&d.init, &d.truth))
        .collect::<Result<Vec<_>>>()?;

    let cells: Vec<(usize, usize)> = (0..config.trials)
        .flat_map(|t| (0..config.methods.len()).map(move |m| (t, m)))
        .collect();
    let outcomes: Vec<std::result::Result<Outcome, String>> = cells
        .par_iter()
        .map(|&(t, m)| sweep(config, &config.methods[m], t, &trials[t]))
        .collect();

    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir.join("images"))?;
        std::fs::create_dir_all(dir.join("traces"))?;
        write_pgm(&dir.join("truth.pgm"), &phantom)?;
        write_pgm(&dir.join("attenuation.pgm"), &mu)?;
        for (t, d) in trials.iter().enumerate() {
            write_pgm(&dir.join(format!("images/trial{t:02}_init.pgm")), &d.init)?;
        }
    }

    let mut records = Vec::with_capacity(cells.len());
    let mut runs = Vec::new();
    for (&(t, m), outcome) in cells.iter().zip(&outcomes) {
        let method = &config.methods[m];
        let record = match outcome {
            Ok(o) => {
                runs.extend(o.runs.iter().cloned());
                if let Some(dir) = out_dir {
                    let stem = format!("trial{t:02}_{}", method.name);
                    write_pgm(&dir.join(format!("images/{stem}.pgm")), &o.result.estimate)?;
                    std::fs::write(
                        dir.join(format!("traces/{stem}.csv")),
                        trace_csv(&o.result.trace),
                    )?;
                }
                TrialRecord {
                    trial: t,
                    method: method.name.clone(),
                    tau: o.tau,
                    rmse_percent: o.rmse,
                    wall_seconds: o.seconds,
                    iterations: o.result.iterations,
                    termination: o.result.termination.as_str().to_string(),
                    final_rel_change: o.result.trace.last().map_or(0.0, |r| r.rel_change),
                    error: None,
                }
            }
            Err(e) => TrialRecord {
                trial: t,
                method: method.name.clone(),
                tau: f64::NAN,
                rmse_percent: f64::NAN,
                wall_seconds: 0.0,
                iterations: 0,
                termination: "failed".into(),
                final_rel_change: f64::NAN,
                error: Some(e.clone()),
            },
        };
        records.push(record);
    }

    let report = ExperimentReport {
        config: config.clone(),
        records,
        runs,
        init_rmse,
    };
    if let Some(dir) = out_dir {
        std::fs::write(dir.join("summary.csv"), report.summary_csv())?;
        std::fs::write(dir.join("runs.csv"), report.runs_csv())?;
        std::fs::write(dir.join("timings.csv"), report.timings_csv())?;
        std::fs::write(dir.join("manifest.json"), report.manifest_json()?)?;
    }
    Ok(report)
}
