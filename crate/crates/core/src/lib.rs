//! Angular-momentum eigenstates of the isotropic 3-D harmonic oscillator in
//! phase space.
//!
//! The crate computes exact expansion coefficients of angular-momentum
//! eigenstates `Ψ_klm` over products of 1-D eigenstates, the Wigner
//! distributions built from them, and the probabilities for two Gaussian
//! wave packets to coalesce into a given `(k, l)` bound state. Each closed
//! form ships next to an independent numerical route (quadrature, direct
//! transforms) that is used by the test suites and by [`selftest`].
//!
//! Modules, bottom up:
//!
//! - [`specfun`]: Hermite/Laguerre polynomials, spherical harmonics, exact
//!   rational kernels, Gauss quadrature rules.
//! - [`ho1d`]: 1-D eigenfunctions, 1-D Wigner functions and quasi-probabilities.
//! - [`expansion`]: the coefficients `C_{klm,n1n2n3}` and the m-averaged `D_kl`.
//! - [`wigner3d`]: `Ψ_klm`, `W_klm`, `W_kl`, closed forms and grid export.
//! - [`coalescence`]: `P_kl` for Gaussian wave packets.
//! - [`yields`]: ensemble pair loops and the meson channel table.
//! - [`io`]: on-disk table and grid formats.

pub mod coalescence;
pub mod error;
pub mod expansion;
pub mod figures;
pub mod ho1d;
pub mod io;
pub mod selftest;
pub mod specfun;
pub mod wigner3d;
pub mod yields;

pub use error::{Error, Result};
pub use expansion::{Ame, ExactCoeff, FeTriple};
pub use ho1d::{OscParams, Phase1D};
