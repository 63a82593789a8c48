use spiral_core::harness::ExperimentReport;

use crate::Criterion;

fn mean(
    report: &ExperimentReport,
    method: &str,
    field: fn(&spiral_core::harness::TrialRecord) -> f64,
) -> f64 {
    report.mean(method, field).unwrap_or(f64::NAN)
}

/// Criteria 9 to 11 from a finished experiment and its wall time in seconds.
pub fn experiment_criteria(report: &ExperimentReport, seconds: f64) -> Vec<Criterion> {
    let rmse = |m: &str| mean(report, m, |r| r.rmse_percent);
    let time = |m: &str| mean(report, m, |r| r.wall_seconds);
    let failures = report.records.iter().filter(|r| r.error.is_some()).count();

    let (tv, l1_loose, l1_tight) = (rmse("tv-loose-m"), rmse("l1-loose"), rmse("l1-tight"));
    let (rdp, rdp_ti) = (rmse("rdp"), rmse("rdp-ti"));
    let ordering = tv < l1_loose && rdp_ti < rdp && (l1_loose - l1_tight).abs() <= 2.0;
    let c9 = Criterion {
        id: 9,
        title: "RMSE ordering".into(),
        pass: ordering && seconds <= 1800.0 && failures == 0,
        detail: format!(
            "TV(L,M) {tv:.3} < l1(L) {l1_loose:.3}; RDP-TI {rdp_ti:.3} < RDP {rdp:.3}; \
             |l1(L) - l1(T)| = {:.3} <= 2; {} trials, {failures} failed rows, {seconds:.0} s",
            (l1_loose - l1_tight).abs(),
            report.config.trials
        ),
    };

    let (fast, slow) = (time("tv-loose-nm"), time("tv-tight-m"));
    let c10 = Criterion {
        id: 10,
        title: "nonmonotone speed ordering".into(),
        pass: fast < slow,
        detail: format!("mean wall time TV(L,NM) {fast:.4} s < TV(T,M) {slow:.4} s"),
    };

    let tol = report.config.tol_p;
    let min_iter = report.config.min_iter;
    let converged: Vec<_> = report
        .runs
        .iter()
        .filter(|r| r.termination != "max-iter")
        .collect();
    let bad = converged
        .iter()
        .filter(|r| {
            r.final_rel_change.is_nan() || r.final_rel_change > tol || r.iterations < min_iter
        })
        .count();
    let worst = converged
        .iter()
        .map(|r| r.final_rel_change)
        .fold(0.0, f64::max);
    let c11 = Criterion {
        id: 11,
        title: "termination".into(),
        pass: !converged.is_empty() && bad == 0,
        detail: format!(
            "{} of {} runs converged; {bad} violate rel change <= {tol:e} after >= {min_iter} iterations; \
             largest final rel change {worst:.3e}",
            converged.len(),
            report.runs.len()
        ),
    };
    vec![c9, c10, c11]
}
