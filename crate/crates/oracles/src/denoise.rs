/// Sparse matrix as a list of rows of `(column, value)` pairs.
pub type SparseRows = Vec<Vec<(usize, f64)>>;

/// `minimize ½‖x - s‖² + κ‖Bx‖₁  subject to x >= 0`.
#[derive(Clone, Debug)]
pub struct ReferenceProblem {
    pub s: Vec<f64>,
    pub kappa: f64,
    pub b: SparseRows,
}

impl ReferenceProblem {
    pub fn objective(&self, x: &[f64]) -> f64 {
        let mut fit = 0.0;
        for i in 0..x.len() {
            fit += (x[i] - self.s[i]) * (x[i] - self.s[i]);
        }
        let mut pen = 0.0;
        for row in &self.b {
            let mut v = 0.0;
            for &(j, w) in row {
                v += w * x[j];
            }
            pen += v.abs();
        }
        0.5 * fit + self.kappa * pen
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.b
            .iter()
            .map(|row| row.iter().map(|&(j, w)| w * x[j]).sum())
            .collect()
    }

    fn apply_t(&self, y: &[f64], n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (i, row) in self.b.iter().enumerate() {
            for &(j, w) in row {
                out[j] += w * y[i];
            }
        }
        out
    }

    /// Upper estimate of `‖B‖` from power iteration on `BᵀB`, padded by 1%.
    fn operator_norm(&self, n: usize) -> f64 {
        // Deterministic nonconstant start: constants lie in the kernel of a
        // difference operator.
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 13) as f64).collect();
        let mut est: f64 = 0.0;
        for _ in 0..500 {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            v = self.apply_t(&self.apply(&v), n);
            est = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        }
        1.01 * est.sqrt()
    }
}

/// Primal-dual (Chambolle–Pock) iterations with constant steps
/// `τ = σ = 1/‖B‖` on the saddle problem
/// `min_{x>=0} max_{|p|<=κ} ½‖x - s‖² + pᵀBx`, returning the feasible primal
/// iterate with the lowest objective seen.
pub fn reference_denoise(problem: &ReferenceProblem, iterations: usize) -> Vec<f64> {
    let n = problem.s.len();
    let project = |v: &[f64]| v.iter().map(|x| x.max(0.0)).collect::<Vec<f64>>();
    let mut x = project(&problem.s);
    let mut best = x.clone();
    let mut best_obj = problem.objective(&x);
    let norm = problem.operator_norm(n);
    if problem.kappa == 0.0 || norm == 0.0 {
        return best;
    }
    let mut x_bar = x.clone();
    let mut p = vec![0.0; problem.b.len()];
    let tau = 1.0 / norm;
    let sigma = 1.0 / norm;
    for _ in 0..iterations {
        let bx = problem.apply(&x_bar);
        for i in 0..p.len() {
            p[i] = (p[i] + sigma * bx[i]).clamp(-problem.kappa, problem.kappa);
        }
        let btp = problem.apply_t(&p, n);
        let x_new: Vec<f64> = (0..n)
            .map(|i| ((x[i] - tau * btp[i] + tau * problem.s[i]) / (1.0 + tau)).max(0.0))
            .collect();
        for i in 0..n {
            x_bar[i] = 2.0 * x_new[i] - x[i];
        }
        x = x_new;
        let obj = problem.objective(&x);
        if obj < best_obj {
            best_obj = obj;
            best.clone_from(&x);
        }
    }
    best
}

/// Minimizer of `½(x - s)² + κ|x|` over `x >= 0`, by bisection on the
/// derivative `x - s + κ` of the objective on `x > 0`.
pub fn canonical_l1_scan(s: f64, kappa: f64) -> f64 {
    let slope = |x: f64| x - s + kappa;
    if slope(0.0) >= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0f64, s.abs() + kappa + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Horizontal then vertical forward differences of a `side x side` image.
pub fn tv_difference_rows(side: usize) -> SparseRows {
    let mut rows = Vec::new();
    for r in 0..side {
        for c in 0..side.saturating_sub(1) {
            rows.push(vec![(r * side + c, 1.0), (r * side + c + 1, -1.0)]);
        }
    }
    for r in 0..side.saturating_sub(1) {
        for c in 0..side {
            rows.push(vec![(r * side + c, 1.0), ((r + 1) * side + c, -1.0)]);
        }
    }
    rows
}

/// Anisotropic TV `Σ |x[r][c+1] - x[r][c]| + |x[r+1][c] - x[r][c]|`.
pub fn tv_value(x: &[f64], side: usize) -> f64 {
    let mut total = 0.0;
    for r in 0..side {
        for c in 0..side {
            if c + 1 < side {
                total += (x[r * side + c + 1] - x[r * side + c]).abs();
            }
            if r + 1 < side {
                total += (x[(r + 1) * side + c] - x[r * side + c]).abs();
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_matches_soft_threshold() {
        for (s, k) in [(3.0, 1.0), (-0.5, 0.2), (0.1, 0.5), (2.0, 0.0)] {
            let want = f64::max(s - k, 0.0);
            assert!((canonical_l1_scan(s, k) - want).abs() < 1e-9);
        }
    }

    #[test]
    fn pdhg_identity_is_soft_threshold() {
        let s = vec![3.0, -1.0, 0.5, 1.2];
        let b = (0..4).map(|i| vec![(i, 1.0)]).collect();
        let x = reference_denoise(
            &ReferenceProblem {
                s: s.clone(),
                kappa: 0.7,
                b,
            },
            2_000,
        );
        for (xi, si) in x.iter().zip(&s) {
            assert!((xi - (si - 0.7f64).max(0.0)).abs() < 1e-12, "{x:?}");
        }
    }

    #[test]
    fn zero_kappa_is_projection() {
        let s = vec![-1.0, 2.0];
        let b = tv_difference_rows(1);
        let x = reference_denoise(&ReferenceProblem { s, kappa: 0.0, b }, 10);
        assert_eq!(x, vec![0.0, 2.0]);
    }

    #[test]
    fn difference_operator_norm_is_found() {
        let p = ReferenceProblem {
            s: vec![0.0; 16],
            kappa: 1.0,
            b: tv_difference_rows(4),
        };
        let norm = p.operator_norm(16);
        assert!(norm > 2.0 && norm <= 1.01 * 8f64.sqrt(), "{norm}");
    }

    #[test]
    fn tv_counts() {
        let x = [0.0, 1.0, 0.0, 1.0];
        assert_eq!(tv_value(&x, 2), 2.0);
        let p = ReferenceProblem {
            s: x.to_vec(),
            kappa: 1.0,
            b: tv_difference_rows(2),
        };
        assert_eq!(p.objective(&x), 2.0);
    }
}
