use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_kl, wigner_kl, PhasePoint3D};
use crate::error::{Error, Result};
use crate::ho1d::OscParams;

/// Sample points along `r`, `q` and the angle `θ` between them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridAxes {
    pub r: Vec<f64>,
    pub q: Vec<f64>,
    pub theta: Vec<f64>,
}

fn linspace(min: f64, max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![min],
        _ => (0..n)
            .map(|i| min + (max - min) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Parses an angle: a number, `pi`, `pi/d` or `a*pi/d`.
fn parse_angle(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::Parameter(format!("malformed angle `{s}`"));
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (s, 1.0),
    };
    let mult = match num.strip_suffix("pi") {
        Some("") => 1.0,
        Some(pre) => pre
            .trim_end_matches('*')
            .trim()
            .parse::<f64>()
            .map_err(|_| bad())?,
        None => return Err(bad()),
    };
    Ok(mult * std::f64::consts::PI / den)
}

impl GridAxes {
    pub fn new(r: Vec<f64>, q: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        let axes = Self { r, q, theta };
        axes.validate()?;
        Ok(axes)
    }

    /// `n_r × n_q` points on `[0, r_max] × [0, q_max]` at the default angles
    /// `0, π/6, π/4, π/3, π/2`.
    pub fn default_for(params: &OscParams, n: usize) -> Self {
        let pi = std::f64::consts::PI;
        Self {
            r: linspace(0.0, 3.0 / params.nu(), n),
            q: linspace(0.0, 3.0 * params.hbar() * params.nu(), n),
            theta: vec![0.0, pi / 6.0, pi / 4.0, pi / 3.0, pi / 2.0],
        }
    }

    /// `r:min:max:n,q:min:max:n,theta:a,b,...`; angle items may also be
    /// separated by `;`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parameter(format!("grid `{spec}`: {m}"));
        let (head, thetas) = spec
            .split_once("theta:")
            .ok_or_else(|| bad("missing theta:list"))?;
        let mut r = None;
        let mut q = None;
        for part in head.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let f: Vec<&str> = part.split(':').collect();
            if f.len() != 4 {
                return Err(bad(&format!("axis `{part}` is not name:min:max:n")));
            }
            let min: f64 = f[1].parse().map_err(|_| bad("bad min"))?;
            let max: f64 = f[2].parse().map_err(|_| bad("bad max"))?;
            let n: usize = f[3].parse().map_err(|_| bad("bad count"))?;
            if n == 0 {
                return Err(bad("axis with zero points"));
            }
            match f[0] {
                "r" => r = Some(linspace(min, max, n)),
                "q" | "p" => q = Some(linspace(min, max, n)),
                other => return Err(bad(&format!("unknown axis `{other}`"))),
            }
        }
        let theta = thetas
            .split([',', ';'])
            .filter(|s| !s.trim().is_empty())
            .map(parse_angle)
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            r.ok_or_else(|| bad("missing r axis"))?,
            q.ok_or_else(|| bad("missing q axis"))?,
            theta,
        )
    }

    pub fn validate(&self) -> Result<()> {
        for (name, axis) in [("r", &self.r), ("q", &self.q)] {
            if axis.is_empty() {
                return Err(Error::Parameter(format!("axis {name} is empty")));
            }
            if axis.iter().any(|v| !v.is_finite()) || axis.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Parameter(format!(
                    "axis {name} must be finite and strictly increasing"
                )));
            }
        }
        if self.theta.is_empty() || self.theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter(
                "theta list must be nonempty and finite".into(),
            ));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.r.len() * self.q.len() * self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index of `(θ_i, r_j, q_k)`; `θ` varies slowest, `q` fastest.
    pub fn index(&self, it: usize, ir: usize, iq: usize) -> usize {
        (it * self.r.len() + ir) * self.q.len() + iq
    }
}

/// A zero crossing of `W` located on a grid edge by linear interpolation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodePoint {
    pub theta: f64,
    pub r: f64,
    pub q: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    pub k: u32,
    pub l: u32,
    pub params: OscParams,
    pub axes: GridAxes,
    /// Values in [`GridAxes::index`] order.
    pub values: Vec<f64>,
    pub nodes: Vec<NodePoint>,
}

impl WignerGrid {
    pub fn value(&self, it: usize, ir: usize, iq: usize) -> f64 {
        self.values[self.axes.index(it, ir, iq)]
    }

    /// Node points of one `θ` slice.
    pub fn nodes_at(&self, theta: f64) -> impl Iterator<Item = &NodePoint> {
        self.nodes.iter().filter(move |n| n.theta == theta)
    }
}

/// Sign-change points along every grid edge of each `θ` slice.
pub fn extract_nodes(axes: &GridAxes, values: &[f64]) -> Vec<NodePoint> {
    let mut out = Vec::new();
    let crossing = |a: f64, b: f64| (a < 0.0) != (b < 0.0);
    for (it, &theta) in axes.theta.iter().enumerate() {
        for ir in 0..axes.r.len() {
            for iq in 0..axes.q.len() {
                let v = values[axes.index(it, ir, iq)];
                if ir + 1 < axes.r.len() {
                    let w = values[axes.index(it, ir + 1, iq)];
                    if crossing(v, w) {
                        let f = v / (v - w);
                        out.push(NodePoint {
                            theta,
                            r: axes.r[ir] + f * (axes.r[ir + 1] - axes.r[ir]),
                            q: axes.q[iq],
                        });
                    }
                }
                if iq + 1 < axes.q.len() {
                    let w = values[axes.index(it, ir, iq + 1)];
                    if crossing(v, w) {
                        let f = v / (v - w);
                        out.push(NodePoint {
                            theta,
                            r: axes.r[ir],
                            q: axes.q[iq] + f * (axes.q[iq + 1] - axes.q[iq]),
                        });
                    }
                }
            }
        }
    }
    out
}

/// Evaluates `W_kl` on the grid in parallel and extracts node lines.
/// The output does not depend on thread scheduling.
pub fn export_grid(k: u32, l: u32, axes: &GridAxes, params: &OscParams) -> Result<WignerGrid> {
    check_kl(k, l)?;
    axes.validate()?;
    let (nr, nq) = (axes.r.len(), axes.q.len());
    let values: Vec<f64> = (0..axes.len())
        .into_par_iter()
        .map(|idx| {
            let iq = idx % nq;
            let ir = (idx / nq) % nr;
            let it = idx / (nq * nr);
            let pt = PhasePoint3D::from_polar(axes.r[ir], axes.q[iq], axes.theta[it]);
            wigner_kl(k, l, &pt, params)
        })
        .collect();
    let nodes = extract_nodes(axes, &values);
    Ok(WignerGrid {
        k,
        l,
        params: *params,
        axes: axes.clone(),
        values,
        nodes,
    })
}
