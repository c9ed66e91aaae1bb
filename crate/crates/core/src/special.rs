//! Standard normal helpers built on `libm`'s `erfc`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// `1/sqrt(2*pi)`
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
#[inline]
pub fn normal_pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Standard normal CDF, accurate in both tails.
#[inline]
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// Gaussian tail function `Q(z) = P(Z > z)`.
#[inline]
pub fn q_function(z: f64) -> f64 {
    0.5 * libm::erfc(z * FRAC_1_SQRT_2)
}

/// Density of `N(mean, var)` at `x`.
#[inline]
pub fn gaussian_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let d = x - mean;
    (-0.5 * d * d / var).exp() / (2.0 * PI * var).sqrt()
}

#[inline]
pub fn gaussian_log_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let d = x - mean;
    -0.5 * d * d / var - 0.5 * (2.0 * PI * var).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_at_one() {
        assert!((q_function(1.0) - 0.158_655_253_931_457_05).abs() < 1e-15);
    }

    #[test]
    fn cdf_symmetry() {
        for z in [-8.0, -1.3, 0.0, 0.4, 5.0] {
            assert!((normal_cdf(z) + normal_cdf(-z) - 1.0).abs() < 1e-15);
            assert!((q_function(z) - normal_cdf(-z)).abs() < 1e-16);
        }
        assert_eq!(normal_cdf(0.0), 0.5);
    }

    #[test]
    fn deep_tail_does_not_cancel() {
        // Q(10) ~ 7.62e-24; 1 - Phi(10) would round to zero
        let q = q_function(10.0);
        assert!((q / 7.619_853_024_160_527e-24 - 1.0).abs() < 1e-12);
    }

}
