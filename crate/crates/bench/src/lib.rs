//! Benchmarks for the hot paths of `zzb-core`; see `benches/kernels.rs`.

use zzb_core::{ScalarPrior, ZzbError};

/// Priors used across the benchmarks, labelled for report names.
pub fn priors() -> Result<Vec<(&'static str, ScalarPrior)>, ZzbError> {
    Ok(vec![
        ("gaussian", ScalarPrior::gaussian(0.0, 1.0)?),
        ("uniform", ScalarPrior::uniform(0.0, 1.0)?),
        ("bernoulli", ScalarPrior::bernoulli(0.3)?),
        (
            "mixture",
            ScalarPrior::gaussian_mixture(vec![0.5, 0.5], vec![-3.0, 3.0], vec![1.0, 1.0])?,
        ),
    ])
}
