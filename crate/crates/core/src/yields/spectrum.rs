use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use super::{Channel, ParticleRecord};
use crate::coalescence::{p_kl, RelPhasePoint};
use crate::error::{Error, Result};
use crate::ho1d::OscParams;

/// How a pair's yield is spread over final momenta.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumMode {
    /// All of it lands at the pair's total momentum `P_i = p1 + p2`.
    #[default]
    Delta,
    /// Gaussian around `P_i` with per-component deviation `ħ/(√2 δ)`.
    Smeared,
}

/// Rectilinear bins in `P_f`; `edges[a]` are the edges along axis `a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumBins {
    pub edges: [Vec<f64>; 3],
}

impl SpectrumBins {
    pub fn new(edges: [Vec<f64>; 3]) -> Result<Self> {
        let b = Self { edges };
        b.validate()?;
        Ok(b)
    }

    /// `n` equal bins per axis on `[lo, hi]³`.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        let axis: Vec<f64> = (0..=n)
            .map(|i| lo + (hi - lo) * i as f64 / n as f64)
            .collect();
        Self::new([axis.clone(), axis.clone(), axis])
    }

    pub fn validate(&self) -> Result<()> {
        for (a, e) in self.edges.iter().enumerate() {
            if e.len() < 2 {
                return Err(Error::Parameter(format!(
                    "axis {a} needs at least two bin edges"
                )));
            }
            if e.iter().any(|x| !x.is_finite()) {
                return Err(Error::Parameter(format!(
                    "axis {a} has a non-finite bin edge"
                )));
            }
            if let Some(w) = e.windows(2).position(|w| w[1] <= w[0]) {
                return Err(Error::Parameter(format!(
                    "axis {a}: bin edges must increase strictly (edge {} is {}, edge {} is {})",
                    w,
                    e[w],
                    w + 1,
                    e[w + 1]
                )));
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> [usize; 3] {
        [
            self.edges[0].len() - 1,
            self.edges[1].len() - 1,
            self.edges[2].len() - 1,
        ]
    }

    pub fn len(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index, `z` fastest.
    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        let [_, ny, nz] = self.shape();
        (ix * ny + iy) * nz + iz
    }

    pub fn volume(&self, ix: usize, iy: usize, iz: usize) -> f64 {
        let w = |a: usize, i: usize| self.edges[a][i + 1] - self.edges[a][i];
        w(0, ix) * w(1, iy) * w(2, iz)
    }

    fn locate(&self, axis: usize, x: f64) -> Option<usize> {
        let e = &self.edges[axis];
        if x < e[0] || x >= e[e.len() - 1] {
            return None;
        }
        Some(e.partition_point(|&v| v <= x) - 1)
    }
}

/// A pair reduced to what the yield needs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSample {
    pub rel: RelPhasePoint,
    /// `p1 + p2`
    pub p_total: [f64; 3],
    /// `w1 w2`, times any sampling rescale.
    pub weight: f64,
}

impl PairSample {
    pub fn from_records(a: &ParticleRecord, b: &ParticleRecord) -> Self {
        let r = [a.r[0] - b.r[0], a.r[1] - b.r[1], a.r[2] - b.r[2]];
        let p = [
            0.5 * (a.p[0] - b.p[0]),
            0.5 * (a.p[1] - b.p[1]),
            0.5 * (a.p[2] - b.p[2]),
        ];
        Self {
            rel: RelPhasePoint::new(r, p),
            p_total: [a.p[0] + b.p[0], a.p[1] + b.p[1], a.p[2] + b.p[2]],
            weight: a.weight * b.weight,
        }
    }
}

/// Binned `dN/d³P_f` for one channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub channel: String,
    pub mode: SpectrumMode,
    pub bins: SpectrumBins,
    /// Densities, flat in [`SpectrumBins::index`] order.
    pub values: Vec<f64>,
}

impl Spectrum {
    /// `Σ value · volume`, the yield captured by the binning range.
    pub fn integral(&self) -> f64 {
        let [nx, ny, nz] = self.bins.shape();
        let mut acc = Vec::with_capacity(self.values.len());
        for ix in 0..nx {
            for iy in 0..ny {
                for iz in 0..nz {
                    acc.push(
                        self.values[self.bins.index(ix, iy, iz)] * self.bins.volume(ix, iy, iz),
                    );
                }
            }
        }
        super::pairwise_sum(&acc)
    }
}

fn axis_fractions(edges: &[f64], mean: f64, scale: f64) -> Vec<f64> {
    let cdf: Vec<f64> = edges.iter().map(|&e| erf(scale * (e - mean))).collect();
    cdf.windows(2).map(|w| 0.5 * (w[1] - w[0])).collect()
}

const CHUNK: usize = 256;

/// Deposits every pair's contribution to `channel` into `bins`.
///
/// Pairs are processed in fixed chunks whose partial histograms are added in
/// chunk order, so the result does not depend on the thread count.
pub fn spectrum(
    bins: &SpectrumBins,
    pairs: &[PairSample],
    channel: &Channel,
    params: &OscParams,
    mode: SpectrumMode,
) -> Result<Spectrum> {
    bins.validate()?;
    let g = channel.stat_weight.to_f64().unwrap_or(f64::NAN);
    let n = bins.len();
    let scale = params.delta() / params.hbar();

    let partials: Vec<Vec<f64>> = pairs
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut h = vec![0.0; n];
            for s in chunk {
                let c = s.weight * g * p_kl(channel.k, channel.l, &s.rel, params);
                if c == 0.0 {
                    continue;
                }
                match mode {
                    SpectrumMode::Delta => {
                        let loc = (
                            bins.locate(0, s.p_total[0]),
                            bins.locate(1, s.p_total[1]),
                            bins.locate(2, s.p_total[2]),
                        );
                        if let (Some(ix), Some(iy), Some(iz)) = loc {
                            h[bins.index(ix, iy, iz)] += c;
                        }
                    }
                    SpectrumMode::Smeared => {
                        let f: Vec<Vec<f64>> = (0..3)
                            .map(|a| axis_fractions(&bins.edges[a], s.p_total[a], scale))
                            .collect();
                        let mut idx = 0;
                        for fx in &f[0] {
                            for fy in &f[1] {
                                let cxy = c * fx * fy;
                                for fz in &f[2] {
                                    h[idx] += cxy * fz;
                                    idx += 1;
                                }
                            }
                        }
                    }
                }
            }
            h
        })
        .collect();

    let mut values = vec![0.0; n];
    for h in &partials {
        for (v, x) in values.iter_mut().zip(h) {
            *v += x;
        }
    }
    let [nx, ny, nz] = bins.shape();
    for ix in 0..nx {
        for iy in 0..ny {
            for iz in 0..nz {
                values[bins.index(ix, iy, iz)] /= bins.volume(ix, iy, iz);
            }
        }
    }
    Ok(Spectrum {
        channel: channel.name.clone(),
        mode,
        bins: bins.clone(),
        values,
    })
}
