//! Recursive dyadic partition (quadtree) estimation
//!
//! `minimize ½‖s - f(P)‖² + κ|P|` over all recursive dyadic partitions `P` of
//! a `2^p x 2^p` image, where `f(P)` is constant on each cell with value
//! `max(mean of s over the cell, 0)`. Solved exactly by a bottom-up dynamic
//! program; ties go to the coarser (merged) cell.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpiralError};
use crate::signal::Signal;

use super::check_kappa;

/// One cell of a fitted partition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RdpCell {
    pub row: usize,
    pub col: usize,
    pub side: usize,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RdpDecision {
    Keep,
    Split,
}

/// Full decision record of one quadtree node.
#[derive(Clone, Debug)]
pub struct RdpNode {
    pub cell: RdpCell,
    pub merged_cost: f64,
    /// Sum of the four children's optimal costs; `None` for single pixels.
    pub split_cost: Option<f64>,
    pub decision: RdpDecision,
    pub children: Vec<RdpNode>,
}

impl RdpNode {
    pub fn optimal_cost(&self) -> f64 {
        match (self.decision, self.split_cost) {
            (RdpDecision::Split, Some(c)) => c,
            _ => self.merged_cost,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RdpFit {
    pub partition: Vec<RdpCell>,
    pub estimate: Signal,
    pub cost: f64,
}

#[derive(Clone, Debug)]
pub struct RdpTiFit {
    pub estimate: Signal,
    /// Mean number of cells over the per-shift partitions.
    pub mean_cells: f64,
}

/// Cyclic shifts averaged by [`rdp_ti_fit`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftSet {
    /// All `(dr, dc)` with `0 <= dr, dc < min(k, side)`.
    Grid(usize),
    /// Every cyclic shift of the image.
    Full,
    Explicit(Vec<(usize, usize)>),
}

impl Default for ShiftSet {
    fn default() -> Self {
        ShiftSet::Grid(8)
    }
}

impl ShiftSet {
    pub fn shifts(&self, side: usize) -> Vec<(usize, usize)> {
        let grid = |k: usize| {
            let k = k.min(side).max(1);
            (0..k).flat_map(|r| (0..k).map(move |c| (r, c))).collect()
        };
        match self {
            ShiftSet::Grid(k) => grid(*k),
            ShiftSet::Full => grid(side),
            ShiftSet::Explicit(v) => v.iter().map(|&(r, c)| (r % side, c % side)).collect(),
        }
    }
}

fn power_of_two_side(s: &Signal) -> Result<usize> {
    let side = s.square_side()?;
    if side == 0 || !side.is_power_of_two() {
        return Err(SpiralError::InvalidShape(format!(
            "RDP needs a power-of-two side, got {side}"
        )));
    }
    Ok(side)
}

struct Grid<'a> {
    values: &'a [f64],
    side: usize,
    kappa: f64,
}

impl Grid<'_> {
    /// Constant fit and merged cost of a cell. Sums run in row-major order.
    fn merged(&self, row: usize, col: usize, size: usize) -> (f64, f64) {
        let mut sum = 0.0;
        for r in row..row + size {
            for c in col..col + size {
                sum += self.values[r * self.side + c];
            }
        }
        let fit = (sum / (size * size) as f64).max(0.0);
        let mut sq = 0.0;
        for r in row..row + size {
            for c in col..col + size {
                let e = self.values[r * self.side + c] - fit;
                sq += e * e;
            }
        }
        (fit, 0.5 * sq + self.kappa)
    }

    fn children(row: usize, col: usize, size: usize) -> [(usize, usize); 4] {
        let h = size / 2;
        [
            (row, col),
            (row, col + h),
            (row + h, col),
            (row + h, col + h),
        ]
    }

    fn solve(&self, row: usize, col: usize, size: usize, cells: &mut Vec<RdpCell>) -> f64 {
        let (fit, merged) = self.merged(row, col, size);
        let keep = RdpCell {
            row,
            col,
            side: size,
            value: fit,
        };
        if size == 1 {
            cells.push(keep);
            return merged;
        }
        let mark = cells.len();
        let mut split = 0.0;
        for (r, c) in Self::children(row, col, size) {
            split += self.solve(r, c, size / 2, cells);
        }
        if merged <= split {
            cells.truncate(mark);
            cells.push(keep);
            merged
        } else {
            split
        }
    }

    fn tree(&self, row: usize, col: usize, size: usize) -> RdpNode {
        let (fit, merged_cost) = self.merged(row, col, size);
        let cell = RdpCell {
            row,
            col,
            side: size,
            value: fit,
        };
        if size == 1 {
            return RdpNode {
                cell,
                merged_cost,
                split_cost: None,
                decision: RdpDecision::Keep,
                children: Vec::new(),
            };
        }
        let children: Vec<RdpNode> = Self::children(row, col, size)
            .iter()
            .map(|&(r, c)| self.tree(r, c, size / 2))
            .collect();
        let mut split = 0.0;
        for ch in &children {
            split += ch.optimal_cost();
        }
        let decision = if merged_cost <= split {
            RdpDecision::Keep
        } else {
            RdpDecision::Split
        };
        RdpNode {
            cell,
            merged_cost,
            split_cost: Some(split),
            decision,
            children,
        }
    }
}

fn paint(cells: &[RdpCell], side: usize) -> Vec<f64> {
    let mut out = vec![0.0; side * side];
    for cell in cells {
        for r in cell.row..cell.row + cell.side {
            out[r * side + cell.col..r * side + cell.col + cell.side].fill(cell.value);
        }
    }
    out
}

/// Exact minimizer over recursive dyadic partitions with nonnegative constant fits.
pub fn rdp_fit(s: &Signal, kappa: f64) -> Result<RdpFit> {
    check_kappa(kappa)?;
    let side = power_of_two_side(s)?;
    let grid = Grid {
        values: s.values(),
        side,
        kappa,
    };
    let mut partition = Vec::new();
    let cost = grid.solve(0, 0, side, &mut partition);
    let estimate = Signal::image(side, side, paint(&partition, side))?;
    Ok(RdpFit {
        partition,
        estimate,
        cost,
    })
}

/// The full quadtree with merged and split costs at every node.
pub fn rdp_tree(s: &Signal, kappa: f64) -> Result<RdpNode> {
    check_kappa(kappa)?;
    let side = power_of_two_side(s)?;
    let grid = Grid {
        values: s.values(),
        side,
        kappa,
    };
    Ok(grid.tree(0, 0, side))
}

/// Cycle-spun (translation-invariant) estimate: the average over `shifts` of
/// `unshift(rdp_fit(shift(s)))`.
pub fn rdp_ti_fit(s: &Signal, kappa: f64, shifts: &ShiftSet) -> Result<RdpTiFit> {
    check_kappa(kappa)?;
    let side = power_of_two_side(s)?;
    let shifts = shifts.shifts(side);
    if shifts.is_empty() {
        return Err(SpiralError::InvalidParameter("empty shift set".into()));
    }
    let values = s.values();
    let fits: Vec<(Vec<f64>, usize)> = shifts
        .par_iter()
        .map(|&(dr, dc)| {
            let mut shifted = vec![0.0; side * side];
            for r in 0..side {
                for c in 0..side {
                    shifted[r * side + c] = values[((r + dr) % side) * side + (c + dc) % side];
                }
            }
            let grid = Grid {
                values: &shifted,
                side,
                kappa,
            };
            let mut cells = Vec::new();
            grid.solve(0, 0, side, &mut cells);
            let painted = paint(&cells, side);
            let mut unshifted = vec![0.0; side * side];
            for r in 0..side {
                for c in 0..side {
                    unshifted[((r + dr) % side) * side + (c + dc) % side] = painted[r * side + c];
                }
            }
            (unshifted, cells.len())
        })
        .collect();

    // Fixed summation order regardless of scheduling.
    let mut sum = vec![0.0; side * side];
    let mut cells = 0usize;
    for (fit, count) in &fits {
        for (acc, v) in sum.iter_mut().zip(fit) {
            *acc += v;
        }
        cells += count;
    }
    let k = fits.len() as f64;
    for v in sum.iter_mut() {
        *v /= k;
    }
    Ok(RdpTiFit {
        estimate: Signal::image(side, side, sum)?,
        mean_cells: cells as f64 / k,
    })
}

/// Smallest number of RDP cells on which `f` is piecewise constant.
pub fn rdp_complexity(f: &Signal) -> Result<usize> {
    let side = power_of_two_side(f)?;
    fn walk(v: &[f64], side: usize, row: usize, col: usize, size: usize) -> (usize, Option<f64>) {
        if size == 1 {
            return (1, Some(v[row * side + col]));
        }
        let h = size / 2;
        let parts = [
            walk(v, side, row, col, h),
            walk(v, side, row, col + h, h),
            walk(v, side, row + h, col, h),
            walk(v, side, row + h, col + h, h),
        ];
        match parts[0].1 {
            Some(x) if parts.iter().all(|p| p.1 == Some(x)) => (1, Some(x)),
            _ => (parts.iter().map(|p| p.0).sum(), None),
        }
    }
    Ok(walk(f.values(), side, 0, 0, side).0)
}

/// Partition as CSV rows `row,col,side,level,value`, with `level = log2(side)`.
pub fn partition_csv(cells: &[RdpCell]) -> String {
    let mut out = String::from("row,col,side,level,value\n");
    for c in cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            c.row,
            c.col,
            c.side,
            c.side.trailing_zeros(),
            c.value
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img(side: usize, v: Vec<f64>) -> Signal {
        Signal::image(side, side, v).unwrap()
    }

    fn pattern(side: usize) -> Vec<f64> {
        (0..side * side)
            .map(|i| ((i * 29 + 3) % 13) as f64 / 3.0 - 1.5)
            .collect()
    }

    #[test]
    fn zero_kappa_splits_to_pixels() {
        let s = img(4, pattern(4));
        let fit = rdp_fit(&s, 0.0).unwrap();
        let proj: Vec<f64> = s.values().iter().map(|v| v.max(0.0)).collect();
        assert_eq!(fit.estimate.values(), proj.as_slice());
    }

    #[test]
    fn huge_kappa_keeps_root() {
        let s = img(8, pattern(8));
        let mean = s.values().iter().sum::<f64>() / 64.0;
        let root_err: f64 = s.values().iter().map(|v| (v - mean.max(0.0)).powi(2)).sum();
        let fit = rdp_fit(&s, 0.5 * root_err).unwrap();
        assert_eq!(fit.partition.len(), 1);
        assert!(fit.estimate.values().iter().all(|&v| v == mean.max(0.0)));
    }

    #[test]
    fn tree_matches_fast_path() {
        let s = img(8, pattern(8));
        for kappa in [0.0, 0.1, 1.0, 10.0] {
            let fit = rdp_fit(&s, kappa).unwrap();
            let tree = rdp_tree(&s, kappa).unwrap();
            assert_eq!(fit.cost, tree.optimal_cost());
            fn check(node: &RdpNode) {
                if let Some(split) = node.split_cost {
                    assert_eq!(node.optimal_cost(), node.merged_cost.min(split));
                    node.children.iter().for_each(check);
                }
            }
            check(&tree);
        }
    }

    #[test]
    fn complexity_of_fit_never_exceeds_partition() {
        let s = img(8, pattern(8));
        let fit = rdp_fit(&s, 0.3).unwrap();
        assert!(rdp_complexity(&fit.estimate).unwrap() <= fit.partition.len());
        assert_eq!(rdp_complexity(&img(4, vec![1.0; 16])).unwrap(), 1);
        assert_eq!(rdp_complexity(&img(4, pattern(4))).unwrap(), 16);
    }

    #[test]
    fn ti_constant_and_single_shift() {
        let c = img(8, vec![3.0; 64]);
        let ti = rdp_ti_fit(&c, 0.5, &ShiftSet::default()).unwrap();
        assert!(ti
            .estimate
            .values()
            .iter()
            .all(|&v| (v - 3.0).abs() < 1e-12));

        let s = img(8, pattern(8));
        let single = rdp_ti_fit(&s, 0.2, &ShiftSet::Explicit(vec![(0, 0)])).unwrap();
        assert_eq!(single.estimate, rdp_fit(&s, 0.2).unwrap().estimate);
    }

    #[test]
    fn shift_sets() {
        assert_eq!(ShiftSet::Grid(8).shifts(4).len(), 16);
        assert_eq!(ShiftSet::Grid(8).shifts(64).len(), 64);
        assert_eq!(ShiftSet::Full.shifts(16).len(), 256);
    }

    #[test]
    fn bad_sides() {
        assert!(rdp_fit(&img(3, vec![0.0; 9]), 1.0).is_err());
        assert!(rdp_fit(&Signal::image(2, 4, vec![0.0; 8]).unwrap(), 1.0).is_err());
        assert!(rdp_ti_fit(&img(6, vec![0.0; 36]), 1.0, &ShiftSet::Full).is_err());
    }

    #[test]
    fn csv_export() {
        let s = img(2, vec![1.0, 2.0, 3.0, 4.0]);
        let fit = rdp_fit(&s, 0.0).unwrap();
        let csv = partition_csv(&fit.partition);
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.starts_with("row,col,side,level,value\n0,0,1,0,1\n"));
    }
}
