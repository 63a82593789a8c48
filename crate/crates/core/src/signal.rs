use crate::error::{Result, SpiralError};

/// A real-valued signal, optionally tagged with a row-major 2D shape.
///
/// Intensities, gradient steps and coefficient vectors all live in this type.
/// Feasibility (all entries `>= 0`) is not enforced at construction; callers
/// that need it check with [`Signal::check_feasible`].
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    values: Vec<f64>,
    shape: Option<(usize, usize)>,
}

impl Signal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_finite(&values)?;
        Ok(Self {
            values,
            shape: None,
        })
    }

    pub fn image(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows * cols != values.len() {
            return Err(SpiralError::InvalidShape(format!(
                "{rows}x{cols} image needs {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        check_finite(&values)?;
        Ok(Self {
            values,
            shape: Some((rows, cols)),
        })
    }

    pub fn zeros_like(other: &Signal) -> Self {
        Self {
            values: vec![0.0; other.len()],
            shape: other.shape,
        }
    }

    /// Reuses this signal's shape for new values of the same length.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        match self.shape {
            Some((r, c)) => Self::image(r, c, values),
            None => {
                if values.len() != self.len() {
                    return Err(SpiralError::DimensionMismatch {
                        expected: self.len(),
                        got: values.len(),
                    });
                }
                Self::new(values)
            }
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn shape(&self) -> Option<(usize, usize)> {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Side length of a square image, or an error for anything else.
    pub fn square_side(&self) -> Result<usize> {
        match self.shape {
            Some((r, c)) if r == c => Ok(r),
            Some((r, c)) => Err(SpiralError::InvalidShape(format!(
                "expected a square image, got {r}x{c}"
            ))),
            None => Err(SpiralError::InvalidShape(
                "expected a 2D image, got an untagged vector".into(),
            )),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn check_feasible(&self) -> Result<()> {
        check_nonnegative(&self.values)
    }

    pub fn norm(&self) -> f64 {
        crate::vecops::norm(&self.values)
    }
}

pub(crate) fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(SpiralError::NonFinite { index }),
        None => Ok(()),
    }
}

pub(crate) fn check_nonnegative(values: &[f64]) -> Result<()> {
    // NaN fails the comparison and is reported as infeasible.
    match values.iter().position(|v| !(*v >= 0.0)) {
        Some(index) => Err(SpiralError::Infeasible {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(SpiralError::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn image_shape_must_match_length() {
        assert!(Signal::image(2, 3, vec![0.0; 5]).is_err());
        let s = Signal::image(2, 2, vec![1.0; 4]).unwrap();
        assert_eq!(s.square_side().unwrap(), 2);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(
            Signal::new(vec![1.0, f64::NAN]),
            Err(SpiralError::NonFinite { index: 1 })
        ));
    }

    #[test]
    fn feasibility() {
        let s = Signal::new(vec![0.0, 2.0, -1e-300]).unwrap();
        assert!(!s.is_feasible());
        assert!(matches!(
            s.check_feasible(),
            Err(SpiralError::Infeasible { index: 2, .. })
        ));
        assert!(Signal::new(vec![0.0, 3.0]).unwrap().is_feasible());
    }
}
