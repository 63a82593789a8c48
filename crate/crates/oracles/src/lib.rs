//! Slow, independent reference computations.
//!
//! Nothing here depends on `spiral-core`; every routine is written from the
//! defining formula with plain loops over dense data so that it can serve as
//! an oracle for the fast implementations.

#![allow(clippy::needless_range_loop)]

mod denoise;
mod rdp;

pub use denoise::{
    canonical_l1_scan, reference_denoise, tv_difference_rows, tv_value, ReferenceProblem,
    SparseRows,
};
pub use rdp::{enumerate_rdp, rdp_partition_count, EnumeratedRdp};

/// `|a - b| / max(|a|, |b|, 1e-30)`.
pub fn rel_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-30)
}

/// Largest `rel_error` over paired entries.
pub fn max_rel_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "length mismatch");
    a.iter()
        .zip(b)
        .map(|(x, y)| rel_error(*x, *y))
        .fold(0.0, f64::max)
}

/// One oracle comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub name: String,
    pub instance: String,
    pub reference: f64,
    pub candidate: f64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleReport {
    pub fn new(
        name: impl Into<String>,
        instance: impl Into<String>,
        reference: f64,
        candidate: f64,
        tolerance: f64,
    ) -> Self {
        let rel = rel_error(reference, candidate);
        Self {
            name: name.into(),
            instance: instance.into(),
            reference,
            candidate,
            rel_error: rel,
            tolerance,
            pass: rel <= tolerance,
        }
    }

    /// A report whose pass flag is decided by the caller, e.g. for bounds.
    pub fn with_verdict(
        name: impl Into<String>,
        instance: impl Into<String>,
        reference: f64,
        candidate: f64,
        tolerance: f64,
        pass: bool,
    ) -> Self {
        Self {
            pass,
            ..Self::new(name, instance, reference, candidate, tolerance)
        }
    }

    pub const CSV_HEADER: &'static str =
        "name,instance,reference,candidate,rel_error,tolerance,pass";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:e},{:e},{:e},{:e},{}",
            self.name,
            self.instance.replace(',', ";"),
            self.reference,
            self.candidate,
            self.rel_error,
            self.tolerance,
            self.pass
        )
    }
}

/// Central-difference gradient with per-coordinate step `h_rel·max(|f_i|, 1)`.
///
/// The caller must keep `f_i ± h` inside the domain of `func`.
pub fn fd_gradient(func: impl Fn(&[f64]) -> f64, f: &[f64], h_rel: f64) -> Vec<f64> {
    let mut x = f.to_vec();
    (0..f.len())
        .map(|i| {
            let h = h_rel * f[i].abs().max(1.0);
            x[i] = f[i] + h;
            let up = func(&x);
            x[i] = f[i] - h;
            let down = func(&x);
            x[i] = f[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Row-major dense matrix as nested vectors.
pub type Dense = Vec<Vec<f64>>;

pub fn mat_vec(a: &Dense, x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| {
            let mut s = 0.0;
            for j in 0..x.len() {
                s += row[j] * x[j];
            }
            s
        })
        .collect()
}

pub fn mat_t_vec(a: &Dense, y: &[f64]) -> Vec<f64> {
    let n = a.first().map_or(0, |r| r.len());
    let mut out = vec![0.0; n];
    for (i, row) in a.iter().enumerate() {
        for j in 0..n {
            out[j] += row[j] * y[i];
        }
    }
    out
}

/// `Σ_i (Af)_i - Σ_{y_i > 0} y_i log((Af)_i + β)` with explicit loops.
pub fn poisson_objective(a: &Dense, y: &[f64], beta: f64, f: &[f64]) -> f64 {
    let mut total = 0.0;
    for (i, row) in a.iter().enumerate() {
        let mut mu = 0.0;
        for j in 0..f.len() {
            mu += row[j] * f[j];
        }
        total += mu;
        if y[i] > 0.0 {
            total -= y[i] * (mu + beta).ln();
        }
    }
    total
}

/// `∇²F(f) = Aᵀ diag(y / (Af + β)²) A`, assembled entry by entry.
pub fn poisson_hessian(a: &Dense, y: &[f64], beta: f64, f: &[f64]) -> Dense {
    let n = f.len();
    let af = mat_vec(a, f);
    let mut h = vec![vec![0.0; n]; n];
    for (i, row) in a.iter().enumerate() {
        let w = y[i] / ((af[i] + beta) * (af[i] + beta));
        for p in 0..n {
            for q in 0..n {
                h[p][q] += w * row[p] * row[q];
            }
        }
    }
    h
}

/// `dᵀ H d`.
pub fn quad_form(h: &Dense, d: &[f64]) -> f64 {
    let hd = mat_vec(h, d);
    d.iter().zip(&hd).map(|(x, y)| x * y).sum()
}

/// Largest eigenvalue of a symmetric positive semidefinite matrix by power
/// iteration from a fixed positive start vector.
pub fn power_iteration(h: &Dense, iterations: usize) -> f64 {
    let n = h.len();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * i as f64).collect();
    let mut lambda = 0.0;
    for _ in 0..iterations {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        let hv = mat_vec(h, &v);
        lambda = v.iter().zip(&hv).map(|(a, b)| a * b).sum();
        v = hv;
    }
    lambda
}

/// Classical Barzilai–Borwein ratio `γᵀδ / ‖δ‖²` with `γ = g - g_prev`,
/// `δ = f - f_prev`.
pub fn classical_bb(g_prev: &[f64], g: &[f64], f_prev: &[f64], f: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..f.len() {
        let d = f[i] - f_prev[i];
        num += (g[i] - g_prev[i]) * d;
        den += d * d;
    }
    num / den
}

/// Orthonormal Haar analysis matrix `H` (rows are basis vectors) for length
/// `n = 2^J`, in the layout `[a_J, d_J, d_{J-1}, ..., d_1]`. Detail rows are
/// `+1/√(2^j)` on the first half of their block and `-1/√(2^j)` on the second.
pub fn haar_analysis_matrix(n: usize) -> Dense {
    assert!(n.is_power_of_two(), "Haar matrix needs a power-of-two size");
    let levels = n.trailing_zeros();
    let mut rows = vec![vec![1.0 / (n as f64).sqrt(); n]];
    for j in (1..=levels).rev() {
        let block = 1usize << j;
        let amp = 1.0 / (block as f64).sqrt();
        for b in 0..n / block {
            let mut row = vec![0.0; n];
            for k in 0..block {
                row[b * block + k] = if k < block / 2 { amp } else { -amp };
            }
            rows.push(row);
        }
    }
    rows
}

/// Two-dimensional separable Haar analysis matrix for a `side x side` image
/// in the layout produced by transforming rows then columns of the shrinking
/// top-left block at each level.
pub fn haar_analysis_matrix_2d(side: usize) -> Dense {
    let n = side * side;
    let mut out = vec![vec![0.0; n]; n];
    for (col, unit) in (0..n).map(|j| {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        (j, e)
    }) {
        let coef = haar_2d_forward(&unit, side);
        for (row, v) in coef.into_iter().enumerate() {
            out[row][col] = v;
        }
    }
    out
}

fn haar_2d_forward(image: &[f64], side: usize) -> Vec<f64> {
    let mut x = image.to_vec();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut size = side;
    while size > 1 {
        let half = size / 2;
        for r in 0..size {
            let row: Vec<f64> = (0..size).map(|c| x[r * side + c]).collect();
            for i in 0..half {
                x[r * side + i] = s * (row[2 * i] + row[2 * i + 1]);
                x[r * side + half + i] = s * (row[2 * i] - row[2 * i + 1]);
            }
        }
        for c in 0..size {
            let col: Vec<f64> = (0..size).map(|r| x[r * side + c]).collect();
            for i in 0..half {
                x[i * side + c] = s * (col[2 * i] + col[2 * i + 1]);
                x[(half + i) * side + c] = s * (col[2 * i] - col[2 * i + 1]);
            }
        }
        size = half;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rel_error_definition() {
        assert_eq!(rel_error(2.0, 1.0), 0.5);
        assert_eq!(rel_error(0.0, 0.0), 0.0);
        assert!(rel_error(0.0, 1e-40) > 0.0);
    }

    #[test]
    fn fd_of_half_norm_squared() {
        let f = [0.3, -1.2, 2.0];
        let g = fd_gradient(|x| 0.5 * x.iter().map(|v| v * v).sum::<f64>(), &f, 1e-4);
        for (a, b) in g.iter().zip(&f) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn fd_is_second_order() {
        let func = |x: &[f64]| x[0].sin() * x[0].exp();
        let exact = 1.0f64.exp() * (1.0f64.sin() + 1.0f64.cos());
        let e1 = (fd_gradient(func, &[1.0], 1e-2)[0] - exact).abs();
        let e2 = (fd_gradient(func, &[1.0], 5e-3)[0] - exact).abs();
        let ratio = e1 / e2;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn haar_rows_orthonormal() {
        for h in [haar_analysis_matrix(16), haar_analysis_matrix_2d(4)] {
            let n = h.len();
            for p in 0..n {
                for q in 0..n {
                    let d: f64 = (0..n).map(|k| h[p][k] * h[q][k]).sum();
                    let want = if p == q { 1.0 } else { 0.0 };
                    assert!((d - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn power_iteration_diagonal() {
        let h = vec![vec![3.0, 0.0], vec![0.0, 1.0]];
        assert!((power_iteration(&h, 200) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn bb_of_identity_gradient() {
        assert_eq!(
            classical_bb(&[0.0, 0.0], &[1.0, 2.0], &[0.0, 0.0], &[1.0, 2.0]),
            1.0
        );
    }

    #[test]
    fn hessian_matches_fd_of_objective() {
        let a = vec![vec![1.0, 0.5], vec![0.2, 2.0], vec![0.7, 0.1]];
        let y = [3.0, 1.0, 0.0];
        let f = [0.8, 1.1];
        let h = poisson_hessian(&a, &y, 1e-3, &f);
        for j in 0..2 {
            let gj = |x: &[f64]| fd_gradient(|z| poisson_objective(&a, &y, 1e-3, z), x, 1e-5)[j];
            let row = fd_gradient(gj, &f, 1e-4);
            for k in 0..2 {
                assert!(rel_error(row[k], h[j][k]) < 1e-4);
            }
        }
    }
}
