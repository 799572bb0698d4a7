//! Special functions, adaptive quadrature and reproducible random streams.

mod bessel;
mod quad;
mod rng;
pub mod stats;

pub use bessel::{bessel_i, bessel_i_scaled, laguerre_half, ln_bessel_i0};
pub use quad::{integrate, Integral, QuadratureSpec};
pub use rng::{sample_std_normal, sample_uniform, sharded, shard_sum, RngStream, SHARD_SIZE};

/// `10^(db/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `10·log10(x)`.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
