//! Ensemble coalescence: quark and antiquark lists in, meson yields out.
//!
//! Each particle is read as the centroid of a Gaussian wave packet. A pair
//! `(1, 2)` contributes `w1 w2 g_c P_kl(r1 - r2, (p1 - p2)/2)` to channel `c`
//! with statistical weight `g_c`.

mod particles;
mod spectrum;

pub use particles::{
    load_particles, load_particles_path, partition, ParticleParams, ParticleRecord, KNOWN_SPECIES,
};
pub use spectrum::{spectrum, PairSample, Spectrum, SpectrumBins, SpectrumMode};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coalescence::{p_kl, RelPhasePoint};
use crate::error::{Error, Result};
use crate::ho1d::OscParams;

/// Above this many possible pairs the loop samples randomly.
pub const FULL_PAIRING_LIMIT: usize = 1_000_000;

/// A meson channel: a target `(k, l)` state with a spin-color weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    pub name: String,
    pub k: u32,
    pub l: u32,
    pub stat_weight: BigRational,
}

fn channel(name: &str, k: u32, l: u32, num: i64, den: i64) -> Channel {
    Channel {
        name: name.to_string(),
        k,
        l,
        stat_weight: BigRational::new(BigInt::from(num), BigInt::from(den)),
    }
}

/// The `u dbar` meson channels of the lowest two shells, assuming
/// statistically distributed spins and colors.
pub fn channel_table() -> Vec<Channel> {
    vec![
        channel("pi+", 0, 0, 1, 36),
        channel("rho+", 0, 0, 3, 36),
        channel("b1+", 0, 1, 1, 36),
        channel("a0+", 0, 1, 3, 324),
        channel("a1+", 0, 1, 9, 324),
        channel("a2+", 0, 1, 15, 324),
        channel("pi(1300)+", 1, 0, 1, 36),
        channel("rho(1450)+", 1, 0, 3, 36),
    ]
}

/// Monte-Carlo settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub seed: u64,
    /// Number of pairs drawn when the cross product is too large.
    pub budget: usize,
    #[serde(default)]
    pub spectrum: Option<SpectrumBins>,
    #[serde(default)]
    pub spectrum_mode: SpectrumMode,
}

impl McConfig {
    pub fn new(seed: u64, budget: usize) -> Self {
        Self {
            seed,
            budget,
            spectrum: None,
            spectrum_mode: SpectrumMode::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelYield {
    pub name: String,
    #[serde(rename = "yield")]
    pub yield_: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McStats {
    pub seed: u64,
    pub pairs: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YieldReport {
    pub channels: Vec<ChannelYield>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectra: Option<Vec<Spectrum>>,
    pub mc: McStats,
}

impl YieldReport {
    pub fn get(&self, name: &str) -> Option<&ChannelYield> {
        self.channels.iter().find(|c| c.name == name)
    }
}

/// Pairwise (tree) summation; the result depends only on the input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        xs.iter().sum()
    } else {
        let (a, b) = xs.split_at(xs.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// The pair stream of a seed: pair `n` draws from its own ChaCha stream, so
/// pair selection does not depend on evaluation order.
fn sample_pair(seed: u64, n: u64, n1: usize, n2: usize) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n);
    (rng.gen_range(0..n1), rng.gen_range(0..n2))
}

/// Yields of all `channels` from pairs of `species1` × `species2`.
///
/// With at most [`FULL_PAIRING_LIMIT`] possible pairs every pair is
/// evaluated and standard errors are zero. Otherwise `mc.budget` pairs are
/// drawn uniformly with replacement and the sums are rescaled by
/// `|s1| |s2| / budget`.
pub fn pair_yields(
    species1: &[ParticleRecord],
    species2: &[ParticleRecord],
    channels: &[Channel],
    params: &OscParams,
    mc: &McConfig,
) -> Result<YieldReport> {
    if mc.budget == 0 {
        return Err(Error::Parameter("pair budget must be positive".into()));
    }
    if species1.is_empty() || species2.is_empty() {
        return Err(Error::Parameter(
            "both species lists must be nonempty".into(),
        ));
    }
    let tags1: std::collections::BTreeSet<&str> =
        species1.iter().map(|p| p.species.as_str()).collect();
    if let Some(dup) = species2.iter().find(|p| tags1.contains(p.species.as_str())) {
        return Err(Error::Parameter(format!(
            "species `{}` appears in both lists",
            dup.species
        )));
    }
    let (n1, n2) = (species1.len(), species2.len());
    let total_pairs = n1.saturating_mul(n2);
    let full = total_pairs <= FULL_PAIRING_LIMIT;
    let n_eval = if full { total_pairs } else { mc.budget };
    let scale = if full {
        1.0
    } else {
        total_pairs as f64 / mc.budget as f64
    };

    let mut states: Vec<(u32, u32)> = channels.iter().map(|c| (c.k, c.l)).collect();
    states.sort_unstable();
    states.dedup();

    let samples: Vec<(PairSample, Vec<f64>)> = (0..n_eval as u64)
        .into_par_iter()
        .map(|n| {
            let (i, j) = if full {
                ((n / n2 as u64) as usize, (n % n2 as u64) as usize)
            } else {
                sample_pair(mc.seed, n, n1, n2)
            };
            let (a, b) = (&species1[i], &species2[j]);
            let sample = PairSample::from_records(a, b);
            let probs = states
                .iter()
                .map(|&(k, l)| p_kl(k, l, &sample.rel, params))
                .collect();
            (sample, probs)
        })
        .collect();

    // Channels sharing a state are integer multiples of one unit weight, so
    // their ratios survive rounding: `rho+` is bitwise `3.0 * pi+`.
    let units: Vec<BigRational> = states
        .iter()
        .map(|&st| {
            rational_gcd(
                channels
                    .iter()
                    .filter(|c| (c.k, c.l) == st)
                    .map(|c| &c.stat_weight),
            )
        })
        .collect();
    let mut out = Vec::with_capacity(channels.len());
    for c in channels {
        let si = states.binary_search(&(c.k, c.l)).expect("state listed");
        let mult = (&c.stat_weight / &units[si])
            .to_integer()
            .to_f64()
            .unwrap_or(f64::NAN);
        let unit = units[si].to_f64().unwrap_or(f64::NAN);
        let xs: Vec<f64> = samples.iter().map(|(s, p)| s.weight * p[si]).collect();
        let sum = pairwise_sum(&xs);
        let stderr = if full || xs.len() < 2 {
            0.0
        } else {
            let mean = sum / xs.len() as f64;
            let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
            let var = pairwise_sum(&dev) / (xs.len() - 1) as f64;
            mult * (unit * scale * (var * xs.len() as f64).sqrt())
        };
        out.push(ChannelYield {
            name: c.name.clone(),
            yield_: mult * (unit * scale * sum),
            stderr,
        });
    }

    let spectra = match &mc.spectrum {
        None => None,
        Some(bins) => {
            let pairs: Vec<PairSample> = samples
                .iter()
                .map(|(s, _)| PairSample {
                    weight: s.weight * scale,
                    ..*s
                })
                .collect();
            Some(
                channels
                    .iter()
                    .map(|c| spectrum(bins, &pairs, c, params, mc.spectrum_mode))
                    .collect::<Result<Vec<_>>>()?,
            )
        }
    };

    Ok(YieldReport {
        channels: out,
        spectra,
        mc: McStats {
            seed: mc.seed,
            pairs: n_eval as u64,
        },
    })
}

/// Largest rational `u` with every weight an integer multiple of `u`.
fn rational_gcd<'a>(ws: impl Iterator<Item = &'a BigRational>) -> BigRational {
    use num_integer::Integer;
    let mut num = BigInt::from(0);
    let mut den = BigInt::from(1);
    for w in ws {
        num = num.gcd(w.numer());
        den = den.lcm(w.denom());
    }
    BigRational::new(num, den)
}

/// Convenience: evaluates one relative configuration for every channel.
pub fn channel_probabilities(
    rel: &RelPhasePoint,
    channels: &[Channel],
    params: &OscParams,
) -> Vec<f64> {
    channels
        .iter()
        .map(|c| c.stat_weight.to_f64().unwrap_or(f64::NAN) * p_kl(c.k, c.l, rel, params))
        .collect()
}

#[cfg(test)]
mod tests;
