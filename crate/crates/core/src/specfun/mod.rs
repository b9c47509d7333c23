//! Special-function kernels shared by the rest of the crate.
//!
//! Floating-point kernels (Hermite, Laguerre, spherical harmonics) live
//! next to the exact ones (factorials, binomials, terminating `2F1` at
//! `z = -1`, Gaussian rationals). Everything here is pure.

mod exact;
mod poly;
pub mod quadrature;
mod sph;

pub use exact::{
    binomial, double_factorial, factorial, gauss_2f1_neg1, rational_sqrt, split_square,
    GaussianRational, Surd,
};
pub use poly::{assoc_laguerre, hermite, HalfInteger};
pub use sph::{spherical_harmonic, spherical_harmonics_all_m};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
