//! One pass/fail line per acceptance criterion. Runs the full desk-scale
//! experiment, so expect several minutes.

use std::time::Instant;

use spiral_core::harness::{run_experiment, ExperimentConfig};
use spiral_validation::{experiment_criteria, run_suite, summarize, Criterion};

const SUITE_CRITERIA: [(u8, &str, &str); 8] = [
    (1, "adjoint", "adjoint consistency"),
    (2, "gradient", "gradient correctness"),
    (3, "curvature", "curvature form"),
    (4, "lipschitz", "Lipschitz bound"),
    (5, "dual-l1", "dual l1 denoiser"),
    (6, "tv", "TV denoiser"),
    (7, "rdp", "RDP exactness"),
    (8, "descent", "solver descent contracts"),
];

fn main() {
    let mut criteria: Vec<Criterion> = SUITE_CRITERIA
        .iter()
        .map(|&(id, suite, title)| {
            let reports = run_suite(suite).expect("known suite");
            let c = summarize(id, title, &reports);
            println!("{}", c.line());
            c
        })
        .collect();

    let start = Instant::now();
    let report = run_experiment(&ExperimentConfig::default(), None).expect("experiment runs");
    let seconds = start.elapsed().as_secs_f64();
    for c in experiment_criteria(&report, seconds) {
        println!("{}", c.line());
        criteria.push(c);
    }

    let failed: Vec<u8> = criteria.iter().filter(|c| !c.pass).map(|c| c.id).collect();
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed.len(),
        criteria.len()
    );
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
