use num_complex::Complex64;

use super::{Ame, FeTriple};
use crate::error::{Error, Result};
use crate::ho1d::{phi_n, OscParams};
use crate::specfun::quadrature::gauss_hermite;
use crate::wigner3d::psi_klm;

/// Largest energy the quadrature oracle accepts.
pub const ORACLE_MAX_ENERGY: u32 = 8;

fn overlap(state: Ame, triple: FeTriple, nodes: usize) -> Complex64 {
    let params = OscParams::default();
    let rule = gauss_hermite(nodes);
    let mut acc = Complex64::new(0.0, 0.0);
    for &(x, wx) in &rule {
        let fx = phi_n(triple.n1, x, &params);
        for &(y, wy) in &rule {
            let fy = fx * phi_n(triple.n2, y, &params);
            for &(z, wz) in &rule {
                let r = (x * x + y * y + z * z).sqrt();
                let theta = if r == 0.0 {
                    0.0
                } else {
                    (z / r).clamp(-1.0, 1.0).acos()
                };
                let phi = y.atan2(x);
                let f = fy * phi_n(triple.n3, z, &params);
                let psi = psi_klm(state, r, theta, phi, &params);
                acc += psi * (f * wx * wy * wz * (r * r).exp());
            }
        }
    }
    acc
}

/// `∫ Φ_{n1n2n3}(r) Ψ_klm(r) d³r` by tensor-product Gauss–Hermite quadrature.
///
/// The integrand is a polynomial times `e^{-ν²r²}`, so the rule with
/// `⌈(N+l)/2⌉ + 8` nodes per axis is exact up to roundoff. The result is
/// confirmed against a rule with four more nodes; a disagreement above
/// `tol` is reported as an error.
pub fn coeff_oracle(state: Ame, triple: FeTriple, tol: f64) -> Result<Complex64> {
    let n = state.energy().max(triple.energy());
    if n > ORACLE_MAX_ENERGY {
        return Err(Error::CostGuard(format!(
            "quadrature oracle limited to N <= {ORACLE_MAX_ENERGY}, got {n}"
        )));
    }
    let nodes = ((n + state.l) as usize).div_ceil(2) + 8;
    let a = overlap(state, triple, nodes);
    let b = overlap(state, triple, nodes + 4);
    if (a - b).norm() > tol {
        return Err(Error::Domain(format!(
            "quadrature for {state} {triple} unstable: {a} vs {b}"
        )));
    }
    Ok(b)
}
