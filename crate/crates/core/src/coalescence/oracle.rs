//! Quadrature evaluation of the overlap integral
//! `P_kl = 8 e^{-r²/4δ² - 4δ²p²/ħ²} ∫ d³x d³k Σ_m W_klm(x, k)
//!        e^{-x²/4δ² + x·r/2δ²} e^{-4δ²k²/ħ² + 8δ²k·p/ħ²}`.

use num_complex::Complex64;

use super::RelPhasePoint;
use crate::expansion::{Ame, CoeffCache};
use crate::ho1d::{wigner_1d, OscParams, Phase1D};
use crate::specfun::quadrature::shifted_hermite;
use crate::wigner3d::{wigner_kl, PhasePoint3D};

/// Weights combining the oscillator Gaussian with the packet kernel on one
/// axis: `(a_x, x0, a_k, k0)` of `e^{-a_x(x-x0)² - a_k(k-k0)²}`.
fn axis_weight(r: f64, p: f64, params: &OscParams) -> (f64, f64, f64, f64) {
    let (nu, d, hb) = (params.nu(), params.delta(), params.hbar());
    let ax = nu * nu + 1.0 / (4.0 * d * d);
    let ak = 1.0 / (hb * hb * nu * nu) + 4.0 * d * d / (hb * hb);
    (
        ax,
        r / (4.0 * d * d) / ax,
        ak,
        4.0 * d * d * p / (hb * hb) / ak,
    )
}

fn kernel(x: f64, k: f64, r: f64, p: f64, params: &OscParams) -> f64 {
    let (d, hb) = (params.delta(), params.hbar());
    (-(x - r).powi(2) / (4.0 * d * d) - 4.0 * d * d * (k - p).powi(2) / (hb * hb)).exp()
}

/// `O[n][n'] = 2 ∫ dx dk W_{n'n}(x, k) kernel(x, k)` on one axis.
fn axis_overlaps(
    nmax: u32,
    r: f64,
    p: f64,
    params: &OscParams,
    nodes: usize,
) -> Vec<Vec<Complex64>> {
    let (ax, x0, ak, k0) = axis_weight(r, p, params);
    let xs = shifted_hermite(nodes, ax, x0);
    let ks = shifted_hermite(nodes, ak, k0);
    let n = nmax as usize;
    let mut out = vec![vec![Complex64::new(0.0, 0.0); n + 1]; n + 1];
    for &(x, wx) in &xs {
        for &(k, wk) in &ks {
            let w = 2.0
                * wx
                * wk
                * kernel(x, k, r, p, params)
                * (ax * (x - x0).powi(2) + ak * (k - k0).powi(2)).exp();
            let ph = Phase1D::new(x, k);
            for (a, row) in out.iter_mut().enumerate() {
                for (b, cell) in row.iter_mut().enumerate() {
                    *cell += wigner_1d(b as u32, a as u32, ph, params) * w;
                }
            }
        }
    }
    out
}

/// `P_klm` with each axis integrated by 2-D quadrature and assembled
/// with the expansion coefficients.
pub fn p_klm_quadrature(state: Ame, rel: &RelPhasePoint, params: &OscParams, nodes: usize) -> f64 {
    let sv = CoeffCache::global().state_vector(state);
    let o: Vec<_> = (0..3)
        .map(|i| axis_overlaps(state.energy(), rel.r[i], rel.p[i], params, nodes))
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for (t, c) in &sv.entries {
        for (tp, cp) in &sv.entries {
            acc += cp.conj()
                * c
                * o[0][t.n1 as usize][tp.n1 as usize]
                * o[1][t.n2 as usize][tp.n2 as usize]
                * o[2][t.n3 as usize][tp.n3 as usize];
        }
    }
    acc.re
}

/// `P_kl` by separable quadrature: one 2-D integral per Cartesian axis.
pub fn p_kl_quadrature(
    k: u32,
    l: u32,
    rel: &RelPhasePoint,
    params: &OscParams,
    nodes: usize,
) -> f64 {
    (-(l as i32)..=(l as i32))
        .map(|m| p_klm_quadrature(Ame { k, l, m }, rel, params, nodes))
        .sum()
}

/// `P_kl` by brute-force 6-D tensor quadrature over the m-averaged
/// `W_kl`; `nodes^6` evaluations.
pub fn p_kl_quadrature_6d(
    k: u32,
    l: u32,
    rel: &RelPhasePoint,
    params: &OscParams,
    nodes: usize,
) -> f64 {
    let rules: Vec<_> = (0..3)
        .map(|i| {
            let (ax, x0, ak, k0) = axis_weight(rel.r[i], rel.p[i], params);
            let xs = shifted_hermite(nodes, ax, x0);
            let ks = shifted_hermite(nodes, ak, k0);
            // fold the kernel and the inverse weight into the node weights
            let xs: Vec<_> = xs
                .into_iter()
                .map(|(x, w)| {
                    let (d, r) = (params.delta(), rel.r[i]);
                    (
                        x,
                        w * (-(x - r).powi(2) / (4.0 * d * d) + ax * (x - x0).powi(2)).exp(),
                    )
                })
                .collect();
            let ks: Vec<_> = ks
                .into_iter()
                .map(|(kk, w)| {
                    let (d, hb, p) = (params.delta(), params.hbar(), rel.p[i]);
                    (
                        kk,
                        w * (-4.0 * d * d * (kk - p).powi(2) / (hb * hb) + ak * (kk - k0).powi(2))
                            .exp(),
                    )
                })
                .collect();
            (xs, ks)
        })
        .collect();
    let mut acc = 0.0;
    for &(x1, a1) in &rules[0].0 {
        for &(x2, a2) in &rules[1].0 {
            for &(x3, a3) in &rules[2].0 {
                for &(k1, b1) in &rules[0].1 {
                    for &(k2, b2) in &rules[1].1 {
                        for &(k3, b3) in &rules[2].1 {
                            let pt = PhasePoint3D::new([x1, x2, x3], [k1, k2, k3]);
                            acc += a1 * a2 * a3 * b1 * b2 * b3 * wigner_kl(k, l, &pt, params);
                        }
                    }
                }
            }
        }
    }
    8.0 * f64::from(2 * l + 1) * acc
}
