/// Result of exhaustive search over recursive dyadic partitions.
#[derive(Clone, Debug)]
pub struct EnumeratedRdp {
    pub cost: f64,
    /// Cells `(row, col, side, value)` of the first optimal partition found.
    pub cells: Vec<(usize, usize, usize, f64)>,
    pub image: Vec<f64>,
    pub partitions_visited: u64,
}

/// Number of recursive dyadic partitions of a `side x side` grid.
pub fn rdp_partition_count(side: usize) -> u64 {
    if side <= 1 {
        1
    } else {
        1 + rdp_partition_count(side / 2).pow(4)
    }
}

type Cell = (usize, usize, usize, f64);

struct Grid<'a> {
    s: &'a [f64],
    side: usize,
    kappa: f64,
}

impl Grid<'_> {
    /// Cell cost `½Σ(s - max(mean, 0))² + κ`, summing in row-major order.
    fn cell(&self, row: usize, col: usize, size: usize) -> (f64, f64) {
        let mut total = 0.0;
        for r in row..row + size {
            for c in col..col + size {
                total += self.s[r * self.side + c];
            }
        }
        let value = f64::max(total / (size * size) as f64, 0.0);
        let mut sq = 0.0;
        for r in row..row + size {
            for c in col..col + size {
                let d = self.s[r * self.side + c] - value;
                sq += d * d;
            }
        }
        (0.5 * sq + self.kappa, value)
    }

    /// Every partition of the cell with its cost, the unsplit cell first.
    fn all(&self, row: usize, col: usize, size: usize) -> Vec<(f64, Vec<Cell>)> {
        let (cost, value) = self.cell(row, col, size);
        let mut out = vec![(cost, vec![(row, col, size, value)])];
        if size == 1 {
            return out;
        }
        let h = size / 2;
        let tl = self.all(row, col, h);
        let tr = self.all(row, col + h, h);
        let bl = self.all(row + h, col, h);
        let br = self.all(row + h, col + h, h);
        for a in &tl {
            for b in &tr {
                for c in &bl {
                    for d in &br {
                        let total = 0.0 + a.0 + b.0 + c.0 + d.0;
                        let mut cells = a.1.clone();
                        cells.extend_from_slice(&b.1);
                        cells.extend_from_slice(&c.1);
                        cells.extend_from_slice(&d.1);
                        out.push((total, cells));
                    }
                }
            }
        }
        out
    }
}

/// Exhaustive minimization of `½‖s - f(P)‖² + κ|P|` over all recursive dyadic
/// partitions of a `side x side` image (`side` in {1, 2, 4, 8}). Ties keep the
/// first partition in enumeration order, which lists the unsplit cell before
/// any split. The four root quadrants are combined on the fly.
pub fn enumerate_rdp(s: &[f64], side: usize, kappa: f64) -> EnumeratedRdp {
    assert!(
        side.is_power_of_two() && side <= 8,
        "enumeration limited to 8x8"
    );
    assert_eq!(s.len(), side * side);
    let grid = Grid { s, side, kappa };
    let (root_cost, root_value) = grid.cell(0, 0, side);
    let mut best_cost = root_cost;
    let mut best: Vec<Cell> = vec![(0, 0, side, root_value)];
    let mut visited = 1u64;
    if side > 1 {
        let h = side / 2;
        let quads = [
            grid.all(0, 0, h),
            grid.all(0, h, h),
            grid.all(h, 0, h),
            grid.all(h, h, h),
        ];
        let mut pick = None;
        for (i, a) in quads[0].iter().enumerate() {
            for (j, b) in quads[1].iter().enumerate() {
                for (k, c) in quads[2].iter().enumerate() {
                    for (l, d) in quads[3].iter().enumerate() {
                        visited += 1;
                        let total = 0.0 + a.0 + b.0 + c.0 + d.0;
                        if total < best_cost {
                            best_cost = total;
                            pick = Some([i, j, k, l]);
                        }
                    }
                }
            }
        }
        if let Some(idx) = pick {
            best = Vec::new();
            for (q, &i) in idx.iter().enumerate() {
                best.extend_from_slice(&quads[q][i].1);
            }
        }
    }
    let mut image = vec![0.0; side * side];
    for &(row, col, size, value) in &best {
        for r in row..row + size {
            for c in col..col + size {
                image[r * side + c] = value;
            }
        }
    }
    EnumeratedRdp {
        cost: best_cost,
        cells: best,
        image,
        partitions_visited: visited,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts() {
        assert_eq!(rdp_partition_count(2), 2);
        assert_eq!(rdp_partition_count(4), 17);
        assert_eq!(rdp_partition_count(8), 83_522);
        let e = enumerate_rdp(&[0.0; 16], 4, 1.0);
        assert_eq!(e.partitions_visited, 17);
    }

    #[test]
    fn single_pixel() {
        let e = enumerate_rdp(&[-2.0], 1, 0.5);
        assert_eq!(e.cost, 0.5 * 4.0 + 0.5);
        assert_eq!(e.image, vec![0.0]);
    }

    #[test]
    fn zero_kappa_cost_is_projection_error() {
        let s: Vec<f64> = (0..16).map(|i| (i as f64 - 7.5) / 3.0).collect();
        let e = enumerate_rdp(&s, 4, 0.0);
        let want: f64 = s.iter().map(|v| 0.5 * (v - v.max(0.0)).powi(2)).sum();
        assert!((e.cost - want).abs() < 1e-12);
    }
}
