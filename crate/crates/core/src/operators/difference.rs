use super::LinearMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DifferenceDirection {
    /// `f[r][c] - f[r][c+1]`, producing `rows * (cols - 1)` values.
    Horizontal,
    /// `f[r][c] - f[r+1][c]`, producing `(rows - 1) * cols` values.
    Vertical,
}

/// First-order difference operator on a row-major `rows x cols` image.
#[derive(Clone, Copy, Debug)]
pub struct Difference {
    rows: usize,
    cols: usize,
    direction: DifferenceDirection,
}

impl Difference {
    pub fn horizontal(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            direction: DifferenceDirection::Horizontal,
        }
    }

    pub fn vertical(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            direction: DifferenceDirection::Vertical,
        }
    }

    pub fn direction(&self) -> DifferenceDirection {
        self.direction
    }
}

impl LinearMap for Difference {
    fn rows(&self) -> usize {
        match self.direction {
            DifferenceDirection::Horizontal => self.rows * self.cols.saturating_sub(1),
            DifferenceDirection::Vertical => self.rows.saturating_sub(1) * self.cols,
        }
    }

    fn cols(&self) -> usize {
        self.rows * self.cols
    }

    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        let (rows, cols) = (self.rows, self.cols);
        match self.direction {
            DifferenceDirection::Horizontal => {
                let w = cols.saturating_sub(1);
                for r in 0..rows {
                    for c in 0..w {
                        out[r * w + c] = x[r * cols + c] - x[r * cols + c + 1];
                    }
                }
            }
            DifferenceDirection::Vertical => {
                for r in 0..rows.saturating_sub(1) {
                    for c in 0..cols {
                        out[r * cols + c] = x[r * cols + c] - x[(r + 1) * cols + c];
                    }
                }
            }
        }
    }

    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        let (rows, cols) = (self.rows, self.cols);
        out.fill(0.0);
        match self.direction {
            DifferenceDirection::Horizontal => {
                let w = cols.saturating_sub(1);
                for r in 0..rows {
                    for c in 0..w {
                        let v = y[r * w + c];
                        out[r * cols + c] += v;
                        out[r * cols + c + 1] -= v;
                    }
                }
            }
            DifferenceDirection::Vertical => {
                for r in 0..rows.saturating_sub(1) {
                    for c in 0..cols {
                        let v = y[r * cols + c];
                        out[r * cols + c] += v;
                        out[(r + 1) * cols + c] -= v;
                    }
                }
            }
        }
    }
}

/// `D = [D1; D2]`: horizontal differences stacked above vertical ones.
#[derive(Clone, Copy, Debug)]
pub struct StackedDifference {
    horizontal: Difference,
    vertical: Difference,
}

impl StackedDifference {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            horizontal: Difference::horizontal(rows, cols),
            vertical: Difference::vertical(rows, cols),
        }
    }

    pub fn parts(&self) -> (&Difference, &Difference) {
        (&self.horizontal, &self.vertical)
    }
}

impl LinearMap for StackedDifference {
    fn rows(&self) -> usize {
        self.horizontal.rows() + self.vertical.rows()
    }

    fn cols(&self) -> usize {
        self.horizontal.cols()
    }

    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        let (top, bottom) = out.split_at_mut(self.horizontal.rows());
        self.horizontal.forward_into(x, top);
        self.vertical.forward_into(x, bottom);
    }

    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        let (top, bottom) = y.split_at(self.horizontal.rows());
        let mut tmp = vec![0.0; out.len()];
        self.horizontal.adjoint_into(top, out);
        self.vertical.adjoint_into(bottom, &mut tmp);
        for (o, t) in out.iter_mut().zip(&tmp) {
            *o += t;
        }
    }
}

/// Convenience constructor for the `(D1, D2)` pair of a square image.
pub fn tv_difference_pair(side: usize) -> (Difference, Difference) {
    (
        Difference::horizontal(side, side),
        Difference::vertical(side, side),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_row_differences() {
        // [[0, 1], [0, 1]]
        let d1 = Difference::horizontal(2, 2);
        assert_eq!(d1.apply(&[0.0, 1.0, 0.0, 1.0]).unwrap(), vec![-1.0, -1.0]);
        let d2 = Difference::vertical(2, 2);
        assert_eq!(d2.apply(&[0.0, 1.0, 0.0, 1.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn constant_image_maps_to_zero() {
        let d = StackedDifference::new(3, 5);
        assert_eq!(d.rows(), 3 * 4 + 2 * 5);
        let out = d.apply(&[2.5; 15]).unwrap();
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_pixel_has_no_differences() {
        let d = StackedDifference::new(1, 1);
        assert_eq!(d.rows(), 0);
        assert!(d.apply(&[4.0]).unwrap().is_empty());
    }
}
