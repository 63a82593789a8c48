use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

use super::IterationRecord;

/// Columns `k,objective,alpha,backtracks,elapsed_seconds,rmse,rel_change`;
/// `rmse` is blank when no truth was supplied.
pub fn trace_csv(trace: &[IterationRecord]) -> String {
    let mut out = String::from("k,objective,alpha,backtracks,elapsed_seconds,rmse,rel_change\n");
    for r in trace {
        let rmse = r.rmse.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6},{},{}",
            r.k, r.objective, r.alpha, r.backtracks, r.elapsed_seconds, rmse, r.rel_change
        );
    }
    out
}

pub fn write_trace_csv(path: &Path, trace: &[IterationRecord]) -> Result<()> {
    std::fs::write(path, trace_csv(trace))?;
    Ok(())
}
