//! 3-D oscillator eigenstates `Ψ_klm`, their Wigner distributions and the
//! m-averaged `W_kl`, plus grid export for plotting.
//!
//! `W_kl` is evaluated through the factorized representation
//! `W_kl = Σ D_kl(t, t') Π_i W_{t'_i t_i}(r_i, q_i)`; the polynomial closed
//! forms in [`closed`] are derived from the same sum in exact arithmetic.

pub mod closed;
mod grid;
pub mod oracle;

pub use closed::{wigner_kl_closed, ClosedTerm};
pub use grid::{export_grid, extract_nodes, GridAxes, NodePoint, WignerGrid};

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::error::Result;
use crate::expansion::{Ame, CoeffCache};
use crate::ho1d::{wigner_1d, OscParams, Phase1D};
use crate::specfun::{
    assoc_laguerre, double_factorial, factorial, spherical_harmonic, spherical_harmonics_all_m,
    HalfInteger,
};

/// A point `(r, q)` of 3-D phase space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint3D {
    pub r: [f64; 3],
    pub q: [f64; 3],
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl PhasePoint3D {
    pub fn new(r: [f64; 3], q: [f64; 3]) -> Self {
        Self { r, q }
    }

    /// `r` along x and `q` in the x-y plane at angle `theta` to `r`.
    pub fn from_polar(r: f64, q: f64, theta: f64) -> Self {
        Self {
            r: [r, 0.0, 0.0],
            q: [q * theta.cos(), q * theta.sin(), 0.0],
        }
    }

    pub fn r2(&self) -> f64 {
        dot(&self.r, &self.r)
    }

    pub fn q2(&self) -> f64 {
        dot(&self.q, &self.q)
    }

    pub fn rq(&self) -> f64 {
        dot(&self.r, &self.q)
    }

    /// Angle between `r` and `q`; zero if either vanishes.
    pub fn theta(&self) -> f64 {
        let den = (self.r2() * self.q2()).sqrt();
        if den == 0.0 {
            0.0
        } else {
            (self.rq() / den).clamp(-1.0, 1.0).acos()
        }
    }
}

/// Radial part shared by all `m`:
/// `sqrt(ν³ 2^{k+l+2} k! / (√π (2k+2l+1)!!)) (νr)^l e^{-ν²r²/2} L_k^{(l+1/2)}(ν²r²)`.
fn radial(k: u32, l: u32, r: f64, params: &OscParams) -> f64 {
    let nu = params.nu();
    let s = nu * r;
    let ratio = (factorial(k) << (k + l + 2))
        .to_f64()
        .unwrap_or(f64::INFINITY)
        / double_factorial(i64::from(2 * k + 2 * l + 1))
            .to_f64()
            .unwrap_or(f64::INFINITY);
    let norm = (nu.powi(3) * ratio / PI.sqrt()).sqrt();
    norm * s.powi(l as i32)
        * (-0.5 * s * s).exp()
        * assoc_laguerre(k, HalfInteger::from_twice(2 * l as i32 + 1), s * s)
}

/// `Ψ_klm(r, θ, φ)`, normalized to one.
pub fn psi_klm(state: Ame, r: f64, theta: f64, phi: f64, params: &OscParams) -> Complex64 {
    let y = spherical_harmonic(state.l, state.m, theta, phi).unwrap_or_default();
    y * radial(state.k, state.l, r, params)
}

/// `Ψ_klm` for all `m = -l..=l` at once, indexed by `m + l`.
pub fn psi_kl_all_m(
    k: u32,
    l: u32,
    r: f64,
    theta: f64,
    phi: f64,
    params: &OscParams,
) -> Vec<Complex64> {
    let rad = radial(k, l, r, params);
    spherical_harmonics_all_m(l, theta, phi)
        .into_iter()
        .map(|y| y * rad)
        .collect()
}

/// Per-axis tables `W_{n'n}(r_i, q_i)` for `n, n' <= nmax`.
fn axis_tables(nmax: u32, pt: &PhasePoint3D, params: &OscParams) -> [Vec<Vec<Complex64>>; 3] {
    std::array::from_fn(|i| {
        let ph = Phase1D::new(pt.r[i], pt.q[i]);
        (0..=nmax)
            .map(|np| (0..=nmax).map(|n| wigner_1d(np, n, ph, params)).collect())
            .collect()
    })
}

/// `W_klm(r, q) = Σ_{t,t'} conj(C_{t'}) C_t Π_i W_{t'_i t_i}(r_i, q_i)`.
///
/// Real for every state; the imaginary part is rounding residue.
pub fn wigner_klm(state: Ame, pt: &PhasePoint3D, params: &OscParams) -> Complex64 {
    let sv = CoeffCache::global().state_vector(state);
    let tabs = axis_tables(state.energy(), pt, params);
    let mut acc = Complex64::new(0.0, 0.0);
    for (t, c) in &sv.entries {
        for (tp, cp) in &sv.entries {
            let w = tabs[0][tp.n1 as usize][t.n1 as usize]
                * tabs[1][tp.n2 as usize][t.n2 as usize]
                * tabs[2][tp.n3 as usize][t.n3 as usize];
            acc += cp.conj() * c * w;
        }
    }
    acc
}

/// m-averaged `W_kl(r, q)` through the `D_kl` matrix.
pub fn wigner_kl(k: u32, l: u32, pt: &PhasePoint3D, params: &OscParams) -> f64 {
    let dm = CoeffCache::global().d_matrix(k, l);
    let tabs = axis_tables(2 * k + l, pt, params);
    let mut acc = Complex64::new(0.0, 0.0);
    for &(i, ip, d) in &dm.nonzero {
        let (t, tp) = (dm.triples[i], dm.triples[ip]);
        acc += d
            * tabs[0][tp.n1 as usize][t.n1 as usize]
            * tabs[1][tp.n2 as usize][t.n2 as usize]
            * tabs[2][tp.n3 as usize][t.n3 as usize];
    }
    acc.re
}

/// Validates `(k, l)` for functions taking bare quantum numbers.
pub fn check_kl(k: u32, l: u32) -> Result<()> {
    if 2 * k + l > 12 {
        return Err(crate::error::Error::QuantumNumbers(format!(
            "2k + l = {} exceeds the supported maximum 12",
            2 * k + l
        )));
    }
    Ok(())
}
