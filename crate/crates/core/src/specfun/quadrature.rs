//! Gauss quadrature rules as plain `(node, weight)` vectors.
//!
//! Nodes and weights come from the `gauss-quad` crate; the wrappers here
//! only fix the shapes the rest of the crate uses.

use std::num::NonZeroUsize;

use gauss_quad::{GaussHermite, GaussLegendre};

/// Gauss–Hermite rule for `∫ f(x) e^{-x²} dx` with `n` nodes.
pub fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(n.max(1)).expect("n >= 1");
    GaussHermite::new(n).as_node_weight_pairs().to_vec()
}

/// Gauss–Legendre rule on `[-1, 1]` with `n` nodes.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(n.max(2)).expect("n >= 2");
    GaussLegendre::new(n).as_node_weight_pairs().to_vec()
}

/// Gauss–Hermite rule adapted to the weight `e^{-a (x - x0)^2}`:
/// `∫ f(x) e^{-a (x-x0)^2} dx ≈ Σ w_i f(x_i)`.
pub fn shifted_hermite(n: usize, a: f64, x0: f64) -> Vec<(f64, f64)> {
    let s = a.sqrt();
    gauss_hermite(n)
        .into_iter()
        .map(|(x, w)| (x0 + x / s, w / s))
        .collect()
}
