//! Probabilities for two Gaussian wave packets to coalesce into an
//! oscillator eigenstate.
//!
//! The packets have Wigner functions
//! `W_i(x, k) = e^{-(x-r_i)²/2δ² - 2δ²(k-p_i)²/ħ²}/(π³ħ³)`. In relative
//! coordinates `r = r1 - r2`, `p = (p1 - p2)/2` the m-summed probability is
//! `P_kl = (2l+1) Σ_{t,t'} D_kl(t,t') Π_i P̂_{t_i t'_i}(r_i, p_i)`.

pub mod oracle;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::{Ame, CoeffCache};
use crate::ho1d::{quasi_prob_matrix, OscParams};

type Vec3 = [f64; 3];

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm2(a: Vec3) -> f64 {
    a[0] * a[0] + a[1] * a[1] + a[2] * a[2]
}

/// An isotropic Gaussian wave packet.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WavePacket {
    pub centroid_r: Vec3,
    pub centroid_p: Vec3,
    pub delta: f64,
}

impl WavePacket {
    pub fn new(centroid_r: Vec3, centroid_p: Vec3, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::Parameter(format!(
                "packet width must be > 0, got {delta}"
            )));
        }
        if centroid_r.iter().chain(&centroid_p).any(|v| !v.is_finite()) {
            return Err(Error::Parameter("packet centroid must be finite".into()));
        }
        Ok(Self {
            centroid_r,
            centroid_p,
            delta,
        })
    }
}

/// Relative phase-space coordinates of two packet centroids.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelPhasePoint {
    /// `r1 - r2`
    pub r: Vec3,
    /// `(p1 - p2)/2`
    pub p: Vec3,
}

impl RelPhasePoint {
    pub fn new(r: Vec3, p: Vec3) -> Self {
        Self { r, p }
    }

    /// `r` along x, `p` in the x-y plane at angle `theta` to `r`.
    pub fn from_polar(r: f64, p: f64, theta: f64) -> Self {
        Self {
            r: [r, 0.0, 0.0],
            p: [p * theta.cos(), p * theta.sin(), 0.0],
        }
    }

    pub fn from_packets(a: &WavePacket, b: &WavePacket) -> Self {
        let dp = sub(a.centroid_p, b.centroid_p);
        Self {
            r: sub(a.centroid_r, b.centroid_r),
            p: dp.map(|x| 0.5 * x),
        }
    }
}

/// `v = ν²r²/2 + p²/(2ħ²ν²)` and `t = |r × p|²/ħ²`.
pub fn v_and_t(r: Vec3, p: Vec3, params: &OscParams) -> (f64, f64) {
    let (nu, hb) = (params.nu(), params.hbar());
    let v = 0.5 * nu * nu * norm2(r) + norm2(p) / (2.0 * hb * hb * nu * nu);
    let t = norm2(cross(r, p)) / (hb * hb);
    (v, t)
}

/// Total-momentum overlap `J = δ³/(π^{3/2}ħ³) e^{-δ²(P_f - P_i)²/ħ²}`,
/// normalized over `P_f`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentumOverlap {
    pub p_i: Vec3,
    pub p_f: Vec3,
    pub delta: f64,
}

impl MomentumOverlap {
    pub fn value(&self, hbar: f64) -> f64 {
        let d = self.delta;
        (d / hbar).powi(3) / PI.powf(1.5)
            * (-d * d * norm2(sub(self.p_f, self.p_i)) / (hbar * hbar)).exp()
    }

    /// Standard deviation of each Cartesian component of `P_f`, `ħ/(√2 δ)`.
    /// The full width `√2 ħ/δ` of the Gaussian is twice this.
    pub fn sigma(delta: f64, hbar: f64) -> f64 {
        hbar / (std::f64::consts::SQRT_2 * delta)
    }
}

fn axis_matrices(nmax: u32, rel: &RelPhasePoint, params: &OscParams) -> [Vec<Vec<Complex64>>; 3] {
    std::array::from_fn(|i| quasi_prob_matrix(nmax, rel.r[i], rel.p[i], params))
}

/// m-resolved probability
/// `P_klm = Σ_{t,t'} conj(C_{t'}) C_t Π_i P̂_{t_i t'_i}(r_i, p_i)`.
pub fn p_klm(state: Ame, rel: &RelPhasePoint, params: &OscParams) -> f64 {
    let sv = CoeffCache::global().state_vector(state);
    let q = axis_matrices(state.energy(), rel, params);
    let mut acc = Complex64::new(0.0, 0.0);
    for (t, c) in &sv.entries {
        for (tp, cp) in &sv.entries {
            acc += cp.conj()
                * c
                * q[0][t.n1 as usize][tp.n1 as usize]
                * q[1][t.n2 as usize][tp.n2 as usize]
                * q[2][t.n3 as usize][tp.n3 as usize];
        }
    }
    acc.re
}

/// Complex value of the m-summed sum, for inspecting the imaginary residue.
pub fn p_kl_complex(k: u32, l: u32, rel: &RelPhasePoint, params: &OscParams) -> Complex64 {
    let dm = CoeffCache::global().d_matrix(k, l);
    let q = axis_matrices(2 * k + l, rel, params);
    let mut acc = Complex64::new(0.0, 0.0);
    for &(i, ip, d) in &dm.nonzero {
        let (t, tp) = (dm.triples[i], dm.triples[ip]);
        acc += d
            * q[0][t.n1 as usize][tp.n1 as usize]
            * q[1][t.n2 as usize][tp.n2 as usize]
            * q[2][t.n3 as usize][tp.n3 as usize];
    }
    acc * f64::from(2 * l + 1)
}

/// m-summed coalescence probability `P_kl`; any `ζ > 0`.
pub fn p_kl(k: u32, l: u32, rel: &RelPhasePoint, params: &OscParams) -> f64 {
    p_kl_complex(k, l, rel, params).re
}

/// Closed forms at `ζ = 1` for `2k + l <= 3`, in terms of `v` and `t`.
pub fn p_kl_closed(k: u32, l: u32, v: f64, t: f64) -> Result<f64> {
    if !(v >= 0.0 && t >= 0.0 && t <= v * v * (1.0 + 1e-12) + 1e-15) {
        return Err(Error::Domain(format!(
            "need 0 <= t <= v², got v = {v}, t = {t}"
        )));
    }
    let e = (-v).exp();
    Ok(match (k, l) {
        (0, 0) => e,
        (0, 1) => e * v,
        (0, 2) => 0.5 * e * (2.0 / 3.0 * v * v + t / 3.0),
        (1, 0) => 0.5 * e * (v * v / 3.0 - t / 3.0),
        (0, 3) => e / 6.0 * (0.4 * v.powi(3) + 0.6 * v * t),
        (1, 1) => e / 6.0 * (0.6 * v.powi(3) - 0.6 * v * t),
        _ => {
            return Err(Error::QuantumNumbers(format!(
                "closed forms exist for 2k + l <= 3 only, got ({k}, {l})"
            )))
        }
    })
}

/// Differential probability density in the bound-state momentum,
/// `J(P_i, P_f) P_klm`, for packets of the width fixed by `params`.
pub fn p_klm_differential(
    state: Ame,
    p_f: Vec3,
    packets: (&WavePacket, &WavePacket),
    params: &OscParams,
) -> Result<f64> {
    let (a, b) = packets;
    for w in [a, b] {
        if (w.delta - params.delta()).abs() > 1e-12 * params.delta() {
            return Err(Error::Parameter(format!(
                "packet width {} differs from the configured {}",
                w.delta,
                params.delta()
            )));
        }
    }
    let p_i = [0, 1, 2].map(|i| a.centroid_p[i] + b.centroid_p[i]);
    let j = MomentumOverlap {
        p_i,
        p_f,
        delta: params.delta(),
    };
    Ok(j.value(params.hbar()) * p_klm(state, &RelPhasePoint::from_packets(a, b), params))
}

/// `e^{-v} v^N / N!`.
pub fn poisson_weight(n: u32, v: f64) -> f64 {
    let fact: f64 = (1..=n).map(f64::from).product();
    (-v).exp() * v.powi(n as i32) / fact
}

/// `Σ_{2k+l=N} P_kl`; equals [`poisson_weight`] at `ζ = 1`.
pub fn poisson_sum(n: u32, rel: &RelPhasePoint, params: &OscParams) -> Result<f64> {
    if (params.zeta() - 1.0).abs() > 1e-12 {
        return Err(Error::Parameter(format!(
            "the shell sum rule holds at zeta = 1, got {}",
            params.zeta()
        )));
    }
    Ok((0..=n / 2).map(|k| p_kl(k, n - 2 * k, rel, params)).sum())
}
