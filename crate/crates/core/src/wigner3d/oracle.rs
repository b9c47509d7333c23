//! Direct evaluation of the Wigner transform
//! `W(r, q) = ∫ d³y/(2πħ)³ e^{i y·q/ħ} ψ*(r + y/2) ψ(r - y/2)`
//! by Gauss–Hermite quadrature, independent of the expansion coefficients.

use num_complex::Complex64;

use super::{psi_kl_all_m, PhasePoint3D};
use crate::ho1d::OscParams;
use crate::specfun::quadrature::gauss_hermite;

fn to_spherical(v: [f64; 3]) -> (f64, f64, f64) {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let theta = if r == 0.0 {
        0.0
    } else {
        (v[2] / r).clamp(-1.0, 1.0).acos()
    };
    (r, theta, v[1].atan2(v[0]))
}

/// The transform for every `m` of the `(k, l)` multiplet, indexed by `m + l`.
///
/// With `y = 2s/ν` the product `ψ*ψ` carries the weight `e^{-s²}` per axis;
/// the plane wave is the only non-polynomial factor, so the rule converges
/// quickly for moderate `|q|/(ħν)`. 28 to 36 nodes give ~1e-12 for
/// `|q| <= 3ħν`.
pub fn wigner_klm_transform_all_m(
    k: u32,
    l: u32,
    pt: &PhasePoint3D,
    params: &OscParams,
    nodes: usize,
) -> Vec<Complex64> {
    let (nu, hb) = (params.nu(), params.hbar());
    let rule = gauss_hermite(nodes);
    let nm = (2 * l + 1) as usize;
    let mut acc = vec![Complex64::new(0.0, 0.0); nm];
    for &(s1, w1) in &rule {
        for &(s2, w2) in &rule {
            for &(s3, w3) in &rule {
                let s = [s1, s2, s3];
                let y = s.map(|si| 2.0 * si / nu);
                let plus = [0, 1, 2].map(|i| pt.r[i] + 0.5 * y[i]);
                let minus = [0, 1, 2].map(|i| pt.r[i] - 0.5 * y[i]);
                let (ra, ta, pa) = to_spherical(plus);
                let (rb, tb, pb) = to_spherical(minus);
                let a = psi_kl_all_m(k, l, ra, ta, pa, params);
                let b = psi_kl_all_m(k, l, rb, tb, pb, params);
                let phase = (y[0] * pt.q[0] + y[1] * pt.q[1] + y[2] * pt.q[2]) / hb;
                let wt = w1 * w2 * w3 * (s1 * s1 + s2 * s2 + s3 * s3).exp();
                let f = Complex64::from_polar(wt, phase);
                for m in 0..nm {
                    acc[m] += f * a[m].conj() * b[m];
                }
            }
        }
    }
    let jac = (2.0 / nu).powi(3) / (2.0 * std::f64::consts::PI * hb).powi(3);
    acc.into_iter().map(|v| v * jac).collect()
}

/// m-averaged `W_kl` by direct transform.
pub fn wigner_kl_transform(
    k: u32,
    l: u32,
    pt: &PhasePoint3D,
    params: &OscParams,
    nodes: usize,
) -> f64 {
    let all = wigner_klm_transform_all_m(k, l, pt, params, nodes);
    all.iter().map(|w| w.re).sum::<f64>() / all.len() as f64
}
