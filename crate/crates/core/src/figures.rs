//! Data behind the standard plots: `W_kl` grids, level sets of the diagonal
//! 1-D quasi-probabilities, and `P_03`, `P_11` against the angle between
//! `r` and `p`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coalescence::{p_kl, RelPhasePoint};
use crate::error::Result;
use crate::ho1d::{quasi_prob, OscParams};
use crate::wigner3d::{export_grid, GridAxes, WignerGrid};

/// States shown in the `W_kl` gallery.
pub const FIG1_STATES: [(u32, u32); 6] = [(0, 0), (0, 1), (1, 0), (0, 2), (0, 3), (1, 1)];

/// `W_kl` on `[0, 3/ν] × [0, 3ħν]` with `n` points per axis at
/// `θ ∈ {0, π/4, π/2}`.
pub fn figure1(params: &OscParams, n: usize) -> Result<Vec<WignerGrid>> {
    let mut axes = GridAxes::default_for(params, n);
    axes.theta = vec![0.0, PI / 4.0, PI / 2.0];
    FIG1_STATES
        .iter()
        .map(|&(k, l)| export_grid(k, l, &axes, params))
        .collect()
}

pub type Segment = [[f64; 2]; 2];

/// Line segments of the level set `f = level` on a rectilinear grid.
///
/// `values[i * ys.len() + j]` is `f(xs[i], ys[j])`. Saddle cells are split
/// by the cell mean. Crossing points are interpolated along each edge in the
/// direction of increasing coordinate, so transposing the grid transposes
/// the output exactly.
pub fn marching_squares(xs: &[f64], ys: &[f64], values: &[f64], level: f64) -> Vec<Segment> {
    let ny = ys.len();
    let f = |i: usize, j: usize| values[i * ny + j];
    let cross = |a: [f64; 2], fa: f64, b: [f64; 2], fb: f64| -> [f64; 2] {
        let t = (level - fa) / (fb - fa);
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    };
    let mut segs = Vec::new();
    for i in 0..xs.len().saturating_sub(1) {
        for j in 0..ny.saturating_sub(1) {
            let p = [
                [xs[i], ys[j]],
                [xs[i + 1], ys[j]],
                [xs[i + 1], ys[j + 1]],
                [xs[i], ys[j + 1]],
            ];
            let v = [f(i, j), f(i + 1, j), f(i + 1, j + 1), f(i, j + 1)];
            let inside = v.map(|x| x >= level);
            // edges as (from, to) corner pairs, each running toward larger coordinates
            let edges = [(0, 1), (1, 2), (3, 2), (0, 3)];
            let hits: Vec<[f64; 2]> = edges
                .iter()
                .filter(|&&(a, b)| inside[a] != inside[b])
                .map(|&(a, b)| cross(p[a], v[a], p[b], v[b]))
                .collect();
            match hits.len() {
                2 => segs.push([hits[0], hits[1]]),
                4 => {
                    // hits are on edges bottom, right, top, left
                    let centre_inside = (v.iter().sum::<f64>() / 4.0) >= level;
                    if centre_inside == inside[0] {
                        segs.push([hits[0], hits[1]]);
                        segs.push([hits[2], hits[3]]);
                    } else {
                        segs.push([hits[0], hits[3]]);
                        segs.push([hits[1], hits[2]]);
                    }
                }
                _ => {}
            }
        }
    }
    segs
}

/// One panel of the quasi-probability level-set figure, in dimensionless
/// coordinates `ρ = ν r` (first axis) and `π̃ = p/(ħν)` (second axis).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourPanel {
    pub n: u32,
    pub zeta: f64,
    pub level: f64,
    pub axis: Vec<f64>,
    /// `P̂_nn(axis[i], axis[j])` at `i * axis.len() + j`.
    pub values: Vec<f64>,
    pub segments: Vec<Segment>,
}

pub const FIG2_LEVEL: f64 = 0.2;
pub const FIG2_ZETAS: [f64; 3] = [0.25, 1.0, 4.0];

/// `P̂_nn` on `[-6, 6]²` with `points` per axis and its `0.2` level set.
pub fn contour_panel(n: u32, zeta: f64, points: usize) -> Result<ContourPanel> {
    let params = OscParams::with_zeta(1.0, zeta, 1.0)?;
    let axis: Vec<f64> = (0..points)
        .map(|i| -6.0 + 12.0 * i as f64 / (points - 1) as f64)
        .collect();
    let values: Vec<f64> = (0..points * points)
        .into_par_iter()
        .map(|idx| quasi_prob(n, n, axis[idx / points], axis[idx % points], &params).re)
        .collect();
    let segments = marching_squares(&axis, &axis, &values, FIG2_LEVEL);
    Ok(ContourPanel {
        n,
        zeta,
        level: FIG2_LEVEL,
        axis,
        values,
        segments,
    })
}

/// Panels for `n ∈ {0, 1, 2}` and `ζ ∈ {1/4, 1, 4}`.
pub fn figure2(points: usize) -> Result<Vec<ContourPanel>> {
    let mut out = Vec::new();
    for n in 0..=2 {
        for z in FIG2_ZETAS {
            out.push(contour_panel(n, z, points)?);
        }
    }
    Ok(out)
}

/// Largest vertex distance between `a` and the axis-swapped `b`, matching
/// each segment of `a` to its nearest counterpart. `None` when the segment
/// counts differ.
pub fn mirror_deviation(a: &[Segment], b: &[Segment]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let swap = |s: &Segment| [[s[0][1], s[0][0]], [s[1][1], s[1][0]]];
    let dist = |s: &Segment, t: &Segment| {
        let d = |p: [f64; 2], q: [f64; 2]| (p[0] - q[0]).abs().max((p[1] - q[1]).abs());
        d(s[0], t[0])
            .max(d(s[1], t[1]))
            .min(d(s[0], t[1]).max(d(s[1], t[0])))
    };
    let mirrored: Vec<Segment> = b.iter().map(swap).collect();
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for s in a {
        let (best, d) = mirrored
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, t)| (i, dist(s, t)))
            .min_by(|x, y| x.1.total_cmp(&y.1))?;
        used[best] = true;
        worst = worst.max(d);
    }
    Some(worst)
}

/// `P_03(θ)` and `P_11(θ)` at `r = 1/ν`, `p = ħν`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaCurve {
    pub r: f64,
    pub p: f64,
    pub theta: Vec<f64>,
    pub p03: Vec<f64>,
    pub p11: Vec<f64>,
}

/// `points` angles evenly spaced on `[0, π]`.
pub fn figure3(params: &OscParams, points: usize) -> ThetaCurve {
    let r = 1.0 / params.nu();
    let p = params.hbar() * params.nu();
    let theta: Vec<f64> = (0..points)
        .map(|i| PI * i as f64 / (points.max(2) - 1) as f64)
        .collect();
    let eval = |k, l| -> Vec<f64> {
        theta
            .par_iter()
            .map(|&th| p_kl(k, l, &RelPhasePoint::from_polar(r, p, th), params))
            .collect()
    };
    ThetaCurve {
        r,
        p,
        p03: eval(0, 3),
        p11: eval(1, 1),
        theta,
    }
}
