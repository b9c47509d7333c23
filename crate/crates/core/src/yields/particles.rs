use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ho1d::OscParams;

/// Species tags accepted in particle files.
pub const KNOWN_SPECIES: [&str; 6] = ["u", "d", "s", "ubar", "dbar", "sbar"];

const COLUMNS: [&str; 7] = ["species", "rx", "ry", "rz", "px", "py", "pz"];

/// One classical particle, read as a wave-packet centroid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParticleRecord {
    pub species: String,
    pub r: [f64; 3],
    pub p: [f64; 3],
    pub weight: f64,
}

impl ParticleRecord {
    pub fn new(species: &str, r: [f64; 3], p: [f64; 3]) -> Self {
        Self {
            species: species.to_string(),
            r,
            p,
            weight: 1.0,
        }
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }
}

fn parse_err(line: u64, msg: impl Into<String>) -> Error {
    Error::Parse {
        line: line as usize,
        msg: msg.into(),
    }
}

/// Reads `species,rx,ry,rz,px,py,pz[,weight]` rows.
///
/// Line numbers in errors count the header as line 1.
pub fn load_particles<R: Read>(source: R) -> Result<Vec<ParticleRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(source);
    let mut rows = rdr.records();
    let header = match rows.next() {
        None => return Ok(Vec::new()),
        Some(h) => h?,
    };
    let names: Vec<&str> = header.iter().collect();
    let has_weight = if names[..] == COLUMNS[..] {
        false
    } else if names.len() == 8 && names[..7] == COLUMNS[..] && names[7] == "weight" {
        true
    } else {
        return Err(parse_err(
            1,
            format!(
                "expected header `species,rx,ry,rz,px,py,pz[,weight]`, got `{}`",
                names.join(",")
            ),
        ));
    };
    let width = if has_weight { 8 } else { 7 };

    let mut out = Vec::new();
    for row in rows {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != width {
            return Err(parse_err(
                line,
                format!("expected {width} fields, found {}", row.len()),
            ));
        }
        let species = &row[0];
        if !KNOWN_SPECIES.contains(&species) {
            return Err(parse_err(
                line,
                format!(
                    "unknown species `{species}`; known tags: {}",
                    KNOWN_SPECIES.join(", ")
                ),
            ));
        }
        let mut vals = [0.0; 7];
        for (i, v) in vals.iter_mut().enumerate().take(width - 1) {
            let field = &row[i + 1];
            *v = field.parse::<f64>().map_err(|_| {
                parse_err(
                    line,
                    format!("column `{}`: cannot parse `{field}`", &header[i + 1]),
                )
            })?;
            if !v.is_finite() {
                return Err(parse_err(
                    line,
                    format!("column `{}` is not finite", &header[i + 1]),
                ));
            }
        }
        let weight = if has_weight { vals[6] } else { 1.0 };
        if weight < 0.0 {
            return Err(parse_err(line, format!("negative weight {weight}")));
        }
        out.push(ParticleRecord {
            species: species.to_string(),
            r: [vals[0], vals[1], vals[2]],
            p: [vals[3], vals[4], vals[5]],
            weight,
        });
    }
    Ok(out)
}

pub fn load_particles_path(path: impl AsRef<Path>) -> Result<Vec<ParticleRecord>> {
    let f = std::fs::File::open(path)?;
    load_particles(std::io::BufReader::new(f))
}

/// Groups records by species tag, keeping file order within each group.
pub fn partition(records: Vec<ParticleRecord>) -> BTreeMap<String, Vec<ParticleRecord>> {
    let mut map: BTreeMap<String, Vec<ParticleRecord>> = BTreeMap::new();
    for r in records {
        map.entry(r.species.clone()).or_default().push(r);
    }
    map
}

/// Sidecar unit declaration for a particle file.
///
/// `zeta_override`, when present, replaces `delta` by `ζ/(2ν)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParticleParams {
    pub nu: f64,
    pub delta: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta_override: Option<f64>,
}

fn one() -> f64 {
    1.0
}

impl ParticleParams {
    pub fn osc_params(&self) -> Result<OscParams> {
        match self.zeta_override {
            Some(z) => OscParams::with_zeta(self.nu, z, self.hbar),
            None => OscParams::new(self.nu, self.delta, self.hbar),
        }
    }
}
