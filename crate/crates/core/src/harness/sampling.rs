use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Result, SpiralError};
use crate::operators::LinearMap;
use crate::signal::Signal;

/// Draws `y ~ Poisson(A·(c f⋆))` with `c` chosen so that `E[Σy] = target_total`.
///
/// Returns the counts and `c`; RMSE is measured against `c f⋆`. Bins are
/// drawn in order from one seeded stream, so the result does not depend on
/// thread count.
pub fn sample_poisson(
    map: &dyn LinearMap,
    truth: &Signal,
    target_total: f64,
    seed: u64,
) -> Result<(Vec<u64>, f64)> {
    truth.check_feasible()?;
    if !(target_total >= 0.0) || !target_total.is_finite() {
        return Err(SpiralError::InvalidParameter(format!(
            "target count {target_total} must be finite and >= 0"
        )));
    }
    let means = map.apply(truth.values())?;
    let total: f64 = means.iter().sum();
    if total <= 0.0 {
        return Ok((vec![0; means.len()], 0.0));
    }
    let scale = target_total / total;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = means
        .iter()
        .map(|&m| {
            let lambda = scale * m;
            if lambda > 0.0 {
                let d = Poisson::new(lambda)
                    .map_err(|e| SpiralError::InvalidParameter(e.to_string()))?;
                Ok(d.sample(&mut rng) as u64)
            } else {
                Ok(0)
            }
        })
        .collect::<Result<Vec<u64>>>()?;
    Ok((counts, scale))
}
