//! Numeric foundations: dense matrices with a QR least-squares solver,
//! special functions for inference, and a deterministic random source.

pub mod matrix;
pub mod rng;
pub mod special;

pub use matrix::{solve_least_squares, LeastSquaresSolution, Matrix, RANK_TOL};
pub use rng::{derive_seed, RandomSource, ALGORITHM_ID, SEED_STREAM_MIX};
pub use special::{
    chi_square_quantile, f_sf, f_sf_log10, gamma_p, ln_gamma, ln_regularized_incomplete_beta,
    mantissa_exponent, regularized_incomplete_beta, t_quantile, t_two_sided_log10_p,
    t_two_sided_p,
};
