//! Ziv-Zakai lower bounds on the minimum mean squared error for scalar,
//! mixed and product priors observed through additive Gaussian noise.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod channel;
pub mod error;
pub mod hypotest;
pub mod oracle;
pub mod prior;
pub mod quad;
pub mod spec;
pub mod special;
pub mod zzb;

pub use error::{Result, ZzbError};
pub use prior::{AtomList, ContinuousLaw, Prior, ProductPrior, ScalarPrior, Table, RNG_NAME};
pub use channel::{Channel, GaussianChannel};
pub use spec::{channel_from_json, prior_from_json, prior_from_shorthand};
pub use hypotest::{
    binary_gaussian_error, high_noise_error, map_error, priors_at, HypothesisProblem,
};
pub use zzb::{h_scalar, valley_fill, zz_product, zz_scalar, BoundReport, QuadratureSpec};
pub use asymptotics::{
    bernoulli_high_noise, h_overlap, h_unimodal, high_noise_bound, low_noise_slope,
    HighNoiseReport, SlopeEntry,
};
pub use oracle::{
    check_unimodal_symmetric, check_zz_condition, mmse_linear_gaussian, mmse_monte_carlo,
    mmse_quadrature, posterior, CheckReport, PosteriorSlice,
};
