//! Observation channels. Only the additive Gaussian channel `Y = X + N`,
//! `N ~ N(0, eta I)`, is provided.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Result, ZzbError};
use crate::special::gaussian_log_pdf;

/// Minimal channel contract.
pub trait Channel: Send + Sync {
    fn dim(&self) -> usize;

    /// The noise level parameter.
    fn noise_level(&self) -> f64;

    /// Conditional density `f(y | x)`.
    fn likelihood(&self, y: &[f64], x: &[f64]) -> Result<f64>;

    /// One draw of `Y` given `X = x`, deterministic in `seed`.
    fn observe(&self, x: &[f64], seed: u64) -> Result<Vec<f64>>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianChannel {
    eta: f64,
    dim: usize,
}

impl GaussianChannel {
    pub fn new(eta: f64, dim: usize) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(ZzbError::InvalidChannel(format!(
                "noise level must be positive and finite, got {eta}"
            )));
        }
        if dim == 0 {
            return Err(ZzbError::InvalidChannel("dimension must be at least 1".into()));
        }
        Ok(Self { eta, dim })
    }

    pub fn scalar(eta: f64) -> Result<Self> {
        Self::new(eta, 1)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    fn check(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(ZzbError::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(())
    }

    pub fn log_likelihood(&self, y: &[f64], x: &[f64]) -> Result<f64> {
        self.check(y)?;
        self.check(x)?;
        Ok(y
            .iter()
            .zip(x)
            .map(|(yi, xi)| gaussian_log_pdf(*yi, *xi, self.eta))
            .sum())
    }
}

impl Channel for GaussianChannel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn noise_level(&self) -> f64 {
        self.eta
    }

    fn likelihood(&self, y: &[f64], x: &[f64]) -> Result<f64> {
        Ok(self.log_likelihood(y, x)?.exp())
    }

    fn observe(&self, x: &[f64], seed: u64) -> Result<Vec<f64>> {
        self.check(x)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = self.eta.sqrt();
        Ok(x.iter()
            .map(|xi| {
                let z: f64 = StandardNormal.sample(&mut rng);
                xi + s * z
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn likelihood_examples() {
        let c = GaussianChannel::scalar(1.0).unwrap();
        assert!((c.likelihood(&[0.0], &[0.0]).unwrap() - 0.398_942_280_4).abs() < 1e-10);
        let a = c.likelihood(&[3.7], &[3.7]).unwrap();
        assert!((a - 0.398_942_280_4).abs() < 1e-10);
        let c2 = GaussianChannel::new(0.25, 2).unwrap();
        let v = c2.likelihood(&[0.0, 0.0], &[0.0, 0.0]).unwrap();
        assert!((v - std::f64::consts::FRAC_2_PI).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(GaussianChannel::scalar(0.0).is_err());
        assert!(GaussianChannel::scalar(-1.0).is_err());
        assert!(GaussianChannel::new(1.0, 0).is_err());
        let c = GaussianChannel::scalar(1.0).unwrap();
        assert_eq!(
            c.likelihood(&[0.0, 1.0], &[0.0]),
            Err(ZzbError::DimensionMismatch {
                expected: 1,
                got: 2
            })
        );
    }

    #[test]
    fn observe_is_deterministic() {
        let c = GaussianChannel::new(2.0, 3).unwrap();
        let x = [1.0, -2.0, 0.5];
        assert_eq!(c.observe(&x, 99).unwrap(), c.observe(&x, 99).unwrap());
        assert_ne!(c.observe(&x, 99).unwrap(), c.observe(&x, 100).unwrap());
    }

    #[test]
    fn tiny_noise() {
        let c = GaussianChannel::scalar(1e-12).unwrap();
        for (i, x) in [-5.0, 0.0, 1.25, 1e3].iter().enumerate() {
            let y = c.observe(&[*x], i as u64).unwrap()[0];
            assert!((y - x).abs() < 1e-4);
        }
    }
}
