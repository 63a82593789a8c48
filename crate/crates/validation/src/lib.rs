//! Oracle suites comparing `spiral-core` against `spiral-oracles`, and the
//! pass/fail summaries used by the acceptance run and `spiral oracle`.

mod experiment;
mod suites;

use spiral_oracles::OracleReport;

pub use experiment::experiment_criteria;
pub use suites::{
    adjoint, curvature, descent, dual_l1, gradient, lipschitz, rdp, run_suite, tv, SUITES,
};

/// Outcome of one acceptance criterion.
#[derive(Clone, Debug)]
pub struct Criterion {
    pub id: u8,
    pub title: String,
    pub pass: bool,
    pub detail: String,
}

impl Criterion {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} [{}] {}: {}",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.title,
            self.detail
        )
    }
}

/// Passes iff every report passes. The detail names the first failure, or
/// else the tolerance check with the largest relative error.
pub fn summarize(id: u8, title: &str, reports: &[OracleReport]) -> Criterion {
    let failed = reports.iter().filter(|r| !r.pass).count();
    let worst = reports.iter().find(|r| !r.pass).or_else(|| {
        reports
            .iter()
            .filter(|r| r.rel_error <= r.tolerance)
            .max_by(|a, b| a.rel_error.total_cmp(&b.rel_error))
            .or(reports.first())
    });
    let detail = match worst {
        Some(w) => format!(
            "{} checks, {} failed, worst {} on {} ({:.3e} vs tol {:.1e})",
            reports.len(),
            failed,
            w.name,
            w.instance,
            w.rel_error,
            w.tolerance
        ),
        None => "no checks ran".into(),
    };
    Criterion {
        id,
        title: title.into(),
        pass: !reports.is_empty() && failed == 0,
        detail,
    }
}
