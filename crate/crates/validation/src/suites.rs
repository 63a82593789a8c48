use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spiral_core::denoise::{
    denoise_l1_dual_observed, denoise_tv, rdp_fit, tv_objective, SubConfig,
};
use spiral_core::harness::{initialize, make_phantom, sample_poisson, InitPolicy};
use spiral_core::operators::{
    build_tomography, CountingMap, DenseMatrix, LinearMap, OrthoBasis, WaveletFamily,
};
use spiral_core::solver::{self, Penalty, SolverConfig};
use spiral_core::{PoissonModel, Signal};
use spiral_oracles::{
    enumerate_rdp, fd_gradient, haar_analysis_matrix, poisson_hessian, poisson_objective,
    power_iteration, quad_form, reference_denoise, tv_difference_rows, Dense, OracleReport,
    ReferenceProblem,
};

/// Suite names accepted by [`run_suite`].
pub const SUITES: [&str; 8] = [
    "adjoint",
    "gradient",
    "curvature",
    "lipschitz",
    "dual-l1",
    "tv",
    "rdp",
    "descent",
];

pub fn run_suite(name: &str) -> Option<Vec<OracleReport>> {
    Some(match name {
        "adjoint" => adjoint(),
        "gradient" => gradient(),
        "curvature" => curvature(),
        "lipschitz" => lipschitz(),
        "dual-l1" => dual_l1(),
        "tv" => tv(),
        "rdp" => rdp(),
        "descent" => descent(),
        _ => return None,
    })
}

fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + stream)
}

fn uniform(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dense_instance(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Dense {
    (0..m).map(|_| uniform(rng, n, 0.0, 1.0)).collect()
}

fn dense_model(a: &Dense, y: &[f64], beta: f64) -> PoissonModel {
    let map = DenseMatrix::from_rows(a).expect("rectangular rows");
    PoissonModel::from_f64_counts(Arc::new(map), y)
        .and_then(|m| m.with_beta(beta))
        .expect("valid instance")
}

fn counts(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    (0..m)
        .map(|_| {
            if rng.random_bool(0.2) {
                0.0
            } else {
                rng.random_range(1..20) as f64
            }
        })
        .collect()
}

/// `⟨Ax, y⟩` against `⟨x, Aᵀy⟩` on 100 random pairs per operator, plus a
/// runtime check (all operators within 5 s).
pub fn adjoint() -> Vec<OracleReport> {
    let mut rng = rng(1);
    let start = Instant::now();
    let dense = DenseMatrix::from_rows(&dense_instance(&mut rng, 24, 40)).unwrap();
    let mu = Signal::image(16, 16, uniform(&mut rng, 256, 0.0, 0.05)).unwrap();
    let tomo = build_tomography(16, 16, 12, 135.0, 20, &mu).unwrap();
    let haar = OrthoBasis::new_2d(WaveletFamily::Haar, 16, 16).unwrap();
    let db6 = OrthoBasis::new_2d(WaveletFamily::Daubechies(6), 32, 32).unwrap();
    let db4_1d = OrthoBasis::new_1d(WaveletFamily::Daubechies(4), 64).unwrap();
    let maps: [(&str, &dyn LinearMap); 5] = [
        ("dense 24x40", &dense),
        ("tomography 16x16", &tomo),
        ("haar 16x16", &haar),
        ("db6 32x32", &db6),
        ("db4 1d 64", &db4_1d),
    ];
    let mut out = Vec::new();
    for (name, map) in maps {
        for pair in 0..100 {
            let x = uniform(&mut rng, map.cols(), -1.0, 1.0);
            let y = uniform(&mut rng, map.rows(), -1.0, 1.0);
            let lhs = dot(&map.apply(&x).unwrap(), &y);
            let rhs = dot(&x, &map.apply_adjoint(&y).unwrap());
            out.push(OracleReport::new(
                "adjoint",
                format!("{name} pair {pair}"),
                lhs,
                rhs,
                1e-10,
            ));
        }
    }
    let seconds = start.elapsed().as_secs_f64();
    out.push(OracleReport::with_verdict(
        "adjoint-runtime",
        "seconds for all operators",
        5.0,
        seconds,
        0.0,
        seconds < 5.0,
    ));
    out
}

/// Analytic gradient against central differences on 20 random instances.
pub fn gradient() -> Vec<OracleReport> {
    let mut rng = rng(2);
    let mut out = Vec::new();
    for inst in 0..20 {
        let n = rng.random_range(4..=32);
        let m = rng.random_range(n..=2 * n);
        let a = dense_instance(&mut rng, m, n);
        let y = counts(&mut rng, m);
        let f = uniform(&mut rng, n, 0.5, 2.0);
        let model = dense_model(&a, &y, 1e-10);
        let analytic = model.gradient(&f, None).unwrap();
        let numeric = fd_gradient(|x| poisson_objective(&a, &y, 1e-10, x), &f, 1e-5);
        let (i, worst) = analytic
            .iter()
            .zip(&numeric)
            .map(|(p, q)| spiral_oracles::rel_error(*q, *p))
            .enumerate()
            .fold((0, 0.0), |acc, (i, e)| if e > acc.1 { (i, e) } else { acc });
        let mut report = OracleReport::new(
            "gradient",
            format!("instance {inst} n={n} m={m} worst component {i}"),
            numeric[i],
            analytic[i],
            1e-5,
        );
        report.rel_error = worst;
        report.pass = worst <= 1e-5;
        out.push(report);
    }
    out
}

/// `Σ y (Aδ)² / (Af + β)²` against `δᵀHδ` with `H` assembled densely.
pub fn curvature() -> Vec<OracleReport> {
    let mut rng = rng(3);
    (0..20)
        .map(|inst| {
            let n = rng.random_range(4..=24);
            let m = rng.random_range(n..=2 * n);
            let a = dense_instance(&mut rng, m, n);
            let y = counts(&mut rng, m);
            let f = uniform(&mut rng, n, 0.0, 2.0);
            let delta = uniform(&mut rng, n, -1.0, 1.0);
            let model = dense_model(&a, &y, 1e-10);
            let af = model.forward(&f).unwrap();
            let ad = model.forward(&delta).unwrap();
            let candidate = model.curvature_form(&af, &ad).unwrap();
            let reference = quad_form(&poisson_hessian(&a, &y, 1e-10, &f), &delta);
            OracleReport::new(
                "curvature",
                format!("instance {inst} n={n}"),
                reference,
                candidate,
                1e-10,
            )
        })
        .collect()
}

/// Largest Hessian eigenvalue (power iteration) never exceeds the closed-form
/// Lipschitz bound, for 50 feasible points with `β = 0.1`.
pub fn lipschitz() -> Vec<OracleReport> {
    let mut rng = rng(4);
    (0..50)
        .map(|inst| {
            let n = rng.random_range(3..=16);
            let m = rng.random_range(n..=2 * n);
            let a = dense_instance(&mut rng, m, n);
            let y = counts(&mut rng, m);
            // Every fifth point sits at the origin, where the bound is tightest.
            let f = if inst % 5 == 0 {
                vec![0.0; n]
            } else {
                uniform(&mut rng, n, 0.0, 1.0)
            };
            let model = dense_model(&a, &y, 0.1);
            let bound = model.lipschitz_bound();
            let lambda = power_iteration(&poisson_hessian(&a, &y, 0.1, &f), 2000);
            OracleReport::with_verdict(
                "lipschitz",
                format!("instance {inst} n={n}"),
                bound,
                lambda,
                0.0,
                lambda <= bound * (1.0 + 1e-12),
            )
        })
        .collect()
}

/// Dual ℓ1 denoiser on 50 random 16-dim Haar instances: feasibility after every
/// sweep, gap within 100 sweeps, and primal value against the reference.
pub fn dual_l1() -> Vec<OracleReport> {
    let mut rng = rng(5);
    let n = 16;
    let basis = OrthoBasis::new_1d(WaveletFamily::Haar, n).unwrap();
    let analysis = haar_analysis_matrix(n);
    let config = SubConfig {
        tol: 1e-8,
        min_iter: 0,
        max_iter: 100,
        warm_start: false,
    };
    let mut out = Vec::new();
    for inst in 0..50 {
        let s = uniform(&mut rng, n, -2.0, 2.0);
        let kappa = rng.random_range(0.05..1.0);
        let mut min_f = f64::INFINITY;
        let mut max_mismatch: f64 = 0.0;
        let sol = denoise_l1_dual_observed(&s, kappa, &basis, &config, None, |sweep| {
            min_f = sweep.f.iter().copied().fold(min_f, f64::min);
            let w_theta = basis.apply(sweep.theta).unwrap();
            for (a, b) in w_theta.iter().zip(sweep.f) {
                max_mismatch = max_mismatch.max((a - b).abs());
            }
        })
        .unwrap();
        let tag = format!("instance {inst} kappa={kappa:.3}");
        out.push(OracleReport::with_verdict(
            "dual-l1-feasible",
            tag.clone(),
            0.0,
            min_f,
            0.0,
            min_f >= 0.0 && max_mismatch <= 1e-12,
        ));
        out.push(OracleReport::with_verdict(
            "dual-l1-gap",
            format!("{tag} sweeps={}", sol.sweeps),
            0.0,
            sol.gap,
            1e-8,
            sol.gap <= 1e-8,
        ));

        // Same problem in the signal domain: x = Wθ, data Ws, penalty ‖Wᵀx‖₁.
        let ws: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|i| analysis[i][j] * s[i]).sum())
            .collect();
        let b = analysis
            .iter()
            .map(|row| row.iter().copied().enumerate().collect())
            .collect();
        let problem = ReferenceProblem { s: ws, kappa, b };
        let x = reference_denoise(&problem, 100_000);
        out.push(OracleReport::new(
            "dual-l1-primal",
            tag,
            problem.objective(&x),
            sol.primal,
            1e-6,
        ));
    }
    out
}

/// TV denoiser against the reference solver on 20 random 8x8 images for each
/// `κ` in {0.01, 0.1, 1}; `κ = 0` must return the projection exactly.
pub fn tv() -> Vec<OracleReport> {
    let mut rng = rng(6);
    let side = 8;
    // Tighter than the solver default so the comparison measures the fixed
    // point rather than an early stop.
    let config = SubConfig {
        tol: 1e-10,
        min_iter: 0,
        max_iter: 20_000,
        warm_start: false,
    };
    let mut out = Vec::new();
    for inst in 0..20 {
        let values = uniform(&mut rng, side * side, -1.0, 3.0);
        let s = Signal::image(side, side, values.clone()).unwrap();
        for kappa in [0.01, 0.1, 1.0] {
            let sol = denoise_tv(&s, kappa, &config, None).unwrap();
            let candidate = tv_objective(&sol.f, &s, kappa).unwrap();
            let problem = ReferenceProblem {
                s: values.clone(),
                kappa,
                b: tv_difference_rows(side),
            };
            let x = reference_denoise(&problem, 100_000);
            out.push(OracleReport::new(
                "tv",
                format!(
                    "instance {inst} kappa={kappa} iterations={}",
                    sol.iterations
                ),
                problem.objective(&x),
                candidate,
                1e-4,
            ));
        }
        let zero = denoise_tv(&s, 0.0, &config, None).unwrap();
        let exact = zero
            .f
            .values()
            .iter()
            .zip(&values)
            .all(|(a, b)| *a == b.max(0.0));
        out.push(OracleReport::with_verdict(
            "tv-zero-kappa",
            format!("instance {inst}"),
            0.0,
            0.0,
            0.0,
            exact,
        ));
    }
    out
}

/// Dynamic program against exhaustive enumeration: identical cost and image.
pub fn rdp() -> Vec<OracleReport> {
    let mut rng = rng(7);
    let mut out = Vec::new();
    for (side, count) in [(4usize, 200usize), (8, 20)] {
        for inst in 0..count {
            let values = uniform(&mut rng, side * side, -1.0, 3.0);
            let kappa = rng.random_range(0.01..2.0);
            let s = Signal::image(side, side, values.clone()).unwrap();
            let fit = rdp_fit(&s, kappa).unwrap();
            let reference = enumerate_rdp(&values, side, kappa);
            let same_image = fit.estimate.values() == reference.image.as_slice();
            let mut report = OracleReport::new(
                "rdp",
                format!("{side}x{side} instance {inst} kappa={kappa:.3}"),
                reference.cost,
                fit.cost,
                0.0,
            );
            report.pass = report.reference == report.candidate && same_image;
            out.push(report);
        }
    }
    out
}

fn small_tomography(
    side: usize,
    counts: f64,
) -> (PoissonModel, Arc<CountingMap<Arc<dyn LinearMap>>>, Signal) {
    let (phantom, mu) = make_phantom(side).unwrap();
    let inner: Arc<dyn LinearMap> =
        Arc::new(build_tomography(side, side, 24, 135.0, side, &mu).unwrap());
    let counting = Arc::new(CountingMap::new(inner.clone()));
    let (y, _) = sample_poisson(inner.as_ref(), &phantom, counts, 11).unwrap();
    let model = PoissonModel::new(counting.clone(), &y).unwrap();
    let f0 = initialize(&model, &phantom, InitPolicy::ScaledBackprojection).unwrap();
    (model, counting, f0)
}

/// Solver contracts on a 32x32 tomography problem run for 500 iterations:
/// sufficient decrease with `M = 0`, nonincreasing window maximum with
/// `M = 10`, and exactly `2 + backtracks` applications of `A` per iteration.
pub fn descent() -> Vec<OracleReport> {
    let mut out = Vec::new();
    let cases = [
        (
            "l1-haar M=0",
            0usize,
            Penalty::BasisL1 {
                family: WaveletFamily::Haar,
                levels: None,
            },
            0.05,
        ),
        ("tv M=0", 0, Penalty::Tv, 0.2),
        (
            "l1-haar M=10",
            10,
            Penalty::BasisL1 {
                family: WaveletFamily::Haar,
                levels: None,
            },
            0.05,
        ),
        ("tv M=10", 10, Penalty::Tv, 0.2),
    ];
    for (name, window, penalty, tau) in cases {
        let (model, counter, f0) = small_tomography(32, 1e5);
        let mut config = SolverConfig::new(tau, penalty);
        config.window = window;
        config.min_iter = 500;
        config.max_iter = 500;
        let mut last_count = counter.total();
        let mut prev_phi = f64::NAN;
        let mut prev_window_max = f64::INFINITY;
        let mut worst_decrease: f64 = f64::NEG_INFINITY;
        let mut window_increase: f64 = 0.0;
        let mut count_mismatches = 0usize;
        let mut steps = 0usize;
        let result = solver::run_with_observer(&model, &config, &f0, None, |state, rec| {
            let count = counter.total();
            if rec.k > 0 {
                steps += 1;
                if count - last_count != 2 + rec.backtracks {
                    count_mismatches += 1;
                }
                if window == 0 {
                    let bound = prev_phi - 0.5 * config.sigma * rec.alpha * rec.step_norm_sq;
                    worst_decrease = worst_decrease.max(rec.objective - bound);
                }
                window_increase = window_increase.max(state.window_max() - prev_window_max);
            }
            last_count = count;
            prev_phi = rec.objective;
            prev_window_max = state.window_max();
        })
        .unwrap();
        out.push(OracleReport::with_verdict(
            "descent-iterations",
            name,
            500.0,
            result.iterations as f64,
            0.0,
            result.iterations == 500 && steps == 500,
        ));
        if window == 0 {
            out.push(OracleReport::with_verdict(
                "descent-sufficient",
                format!("{name}: max of Φ(k+1) - [Φ(k) - σα‖δ‖²/2]"),
                0.0,
                worst_decrease,
                0.0,
                worst_decrease <= 0.0,
            ));
        }
        out.push(OracleReport::with_verdict(
            "descent-window",
            format!("{name}: largest window-max increase"),
            0.0,
            window_increase,
            0.0,
            window_increase <= 0.0,
        ));
        out.push(OracleReport::with_verdict(
            "descent-matvecs",
            format!("{name}: iterations with count != 2 + backtracks"),
            0.0,
            count_mismatches as f64,
            0.0,
            count_mismatches == 0,
        ));
    }
    out
}
