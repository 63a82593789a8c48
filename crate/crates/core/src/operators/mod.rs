//! Matrix-free linear operators.
//!
//! Every operator implements [`LinearMap`]: a forward map `x -> Mx` from
//! `cols()` to `rows()` dimensions and its adjoint `y -> Mᵀy`. Operators are
//! immutable after construction and can be shared across threads.

mod counting;
mod dense;
mod difference;
mod tomography;
mod wavelet;

use std::sync::Arc;

use crate::error::{Result, SpiralError};
use crate::signal::check_len;

pub use counting::CountingMap;
pub use dense::DenseMatrix;
pub use difference::{tv_difference_pair, Difference, DifferenceDirection, StackedDifference};
pub use tomography::{build_tomography, StripProjector, TomographyGeometry, TomographyModel};
pub use wavelet::{OrthoBasis, WaveletFamily};

/// Largest `rows * cols` allowed by [`LinearMap::to_dense`].
pub const DENSE_LIMIT: usize = 1 << 22;

pub trait LinearMap: Send + Sync {
    /// Output dimension.
    fn rows(&self) -> usize;
    /// Input dimension.
    fn cols(&self) -> usize;

    /// Writes `M x` into `out`. Lengths are the caller's responsibility.
    fn forward_into(&self, x: &[f64], out: &mut [f64]);

    /// Writes `Mᵀ y` into `out`. Lengths are the caller's responsibility.
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]);

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols(), x.len())?;
        let mut out = vec![0.0; self.rows()];
        self.forward_into(x, &mut out);
        Ok(out)
    }

    fn apply_adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows(), y.len())?;
        let mut out = vec![0.0; self.cols()];
        self.adjoint_into(y, &mut out);
        Ok(out)
    }

    /// Materializes the operator column by column. Intended for tests and
    /// oracles on small instances only.
    fn to_dense(&self) -> Result<DenseMatrix> {
        let (m, n) = (self.rows(), self.cols());
        if m.saturating_mul(n) > DENSE_LIMIT {
            return Err(SpiralError::TooLargeToMaterialize { rows: m, cols: n });
        }
        let mut data = vec![0.0; m * n];
        let mut unit = vec![0.0; n];
        let mut col = vec![0.0; m];
        for j in 0..n {
            unit[j] = 1.0;
            self.forward_into(&unit, &mut col);
            unit[j] = 0.0;
            for i in 0..m {
                data[i * n + j] = col[i];
            }
        }
        DenseMatrix::new(m, n, data)
    }
}

impl<T: LinearMap + ?Sized> LinearMap for Arc<T> {
    fn rows(&self) -> usize {
        (**self).rows()
    }
    fn cols(&self) -> usize {
        (**self).cols()
    }
    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        (**self).forward_into(x, out)
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        (**self).adjoint_into(y, out)
    }
}

impl<T: LinearMap + ?Sized> LinearMap for Box<T> {
    fn rows(&self) -> usize {
        (**self).rows()
    }
    fn cols(&self) -> usize {
        (**self).cols()
    }
    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        (**self).forward_into(x, out)
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        (**self).adjoint_into(y, out)
    }
}

/// The identity on `R^n`.
#[derive(Clone, Copy, Debug)]
pub struct Identity {
    pub n: usize,
}

impl Identity {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

impl LinearMap for Identity {
    fn rows(&self) -> usize {
        self.n
    }
    fn cols(&self) -> usize {
        self.n
    }
    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        out.copy_from_slice(y);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_apply() {
        let id = Identity::new(3);
        assert_eq!(id.apply(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn apply_checks_dimensions() {
        let id = Identity::new(3);
        assert!(matches!(
            id.apply(&[1.0, 2.0]),
            Err(SpiralError::DimensionMismatch {
                expected: 3,
                got: 2
            })
        ));
        assert!(id.apply_adjoint(&[1.0; 4]).is_err());
    }

    #[test]
    fn to_dense_refuses_huge_operators() {
        let id = Identity::new(1 << 11);
        assert!(id.to_dense().is_ok());
        let big = Identity::new((1 << 11) * 3);
        assert!(matches!(
            big.to_dense(),
            Err(SpiralError::TooLargeToMaterialize { .. })
        ));
    }
}
