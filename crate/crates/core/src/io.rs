//! File formats for coefficient tables, Wigner grids, probability tables,
//! particle lists and yield reports.
//!
//! Grid and probability files are a single-line JSON header followed by a CSV
//! body. Floats in CSV bodies carry 17 significant digits, so every value
//! parses back to the same bits.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::coalescence::{p_kl, v_and_t, RelPhasePoint};
use crate::error::{Error, Result};
use crate::expansion::{coeff, degenerate_subspace, Ame, ExactCoeff};
use crate::ho1d::OscParams;
use crate::wigner3d::{extract_nodes, GridAxes, WignerGrid};
use crate::yields::{ParticleParams, ParticleRecord, YieldReport};

/// Formats with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn split_header(text: &str) -> Result<(&str, &str)> {
    match text.split_once('\n') {
        Some((h, body)) => Ok((h.trim_end_matches('\r'), body)),
        None if !text.trim().is_empty() => Ok((text, "")),
        None => Err(parse_err(1, "missing JSON header")),
    }
}

fn csv_body(body: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes())
}

fn check_columns(rdr: &mut csv::Reader<&[u8]>, expect: &[&str]) -> Result<()> {
    let h = rdr.headers()?;
    if h.iter().ne(expect.iter().copied()) {
        return Err(parse_err(
            2,
            format!(
                "expected columns `{}`, got `{}`",
                expect.join(","),
                h.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    Ok(())
}

fn field<T: std::str::FromStr>(
    rec: &csv::StringRecord,
    i: usize,
    name: &str,
    line: usize,
) -> Result<T> {
    rec.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| {
        parse_err(
            line,
            format!(
                "column `{name}`: cannot parse `{}`",
                rec.get(i).unwrap_or("")
            ),
        )
    })
}

// ---------------------------------------------------------------- coefficients

/// One coefficient `C_{klm, n1n2n3}` in exact and float form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffRow {
    pub k: u32,
    pub l: u32,
    pub m: i32,
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
    pub re: f64,
    pub im: f64,
    pub exact: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_re: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_im: Option<f64>,
}

impl CoeffRow {
    pub fn from_exact(state: Ame, n: [u32; 3], c: &ExactCoeff) -> Self {
        let z = c.to_complex();
        Self {
            k: state.k,
            l: state.l,
            m: state.m,
            n1: n[0],
            n2: n[1],
            n3: n[2],
            re: z.re,
            im: z.im,
            exact: c.to_string(),
            oracle_re: None,
            oracle_im: None,
        }
    }

    pub fn exact_value(&self) -> Result<ExactCoeff> {
        self.exact.parse()
    }
}

/// Every coefficient of `states` over its degenerate subspace, zeros
/// included, triples in lexicographic order.
pub fn coeff_rows(states: &[Ame]) -> Vec<CoeffRow> {
    let mut rows = Vec::new();
    for &s in states {
        for t in degenerate_subspace(s.energy()) {
            rows.push(CoeffRow::from_exact(s, t.as_array(), &coeff(s, t)));
        }
    }
    rows
}

pub fn coeff_json(rows: &[CoeffRow]) -> Result<String> {
    Ok(serde_json::to_string_pretty(rows)?)
}

/// Parses a coefficient array and checks each exact string against its
/// float columns.
pub fn parse_coeff_json(text: &str) -> Result<Vec<CoeffRow>> {
    let rows: Vec<CoeffRow> = serde_json::from_str(text)?;
    for (i, r) in rows.iter().enumerate() {
        let z = r.exact_value()?.to_complex();
        if (z.re - r.re).abs() > 1e-14 || (z.im - r.im).abs() > 1e-14 {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!(
                    "row {i}: exact `{}` disagrees with re/im ({}, {})",
                    r.exact, r.re, r.im
                ),
            });
        }
    }
    Ok(rows)
}

const COEFF_COLUMNS: [&str; 9] = ["k", "l", "m", "n1", "n2", "n3", "re", "im", "exact"];

pub fn coeff_csv(rows: &[CoeffRow]) -> String {
    let mut s = COEFF_COLUMNS.join(",");
    s.push('\n');
    for r in rows {
        s += &format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.k,
            r.l,
            r.m,
            r.n1,
            r.n2,
            r.n3,
            fmt17(r.re),
            fmt17(r.im),
            r.exact
        );
    }
    s
}

pub fn parse_coeff_csv(text: &str) -> Result<Vec<CoeffRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    {
        let h = rdr.headers()?;
        if h.iter().ne(COEFF_COLUMNS.iter().copied()) {
            return Err(parse_err(
                1,
                "expected columns `k,l,m,n1,n2,n3,re,im,exact`",
            ));
        }
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let row = CoeffRow {
            k: field(&rec, 0, "k", line)?,
            l: field(&rec, 1, "l", line)?,
            m: field(&rec, 2, "m", line)?,
            n1: field(&rec, 3, "n1", line)?,
            n2: field(&rec, 4, "n2", line)?,
            n3: field(&rec, 5, "n3", line)?,
            re: field(&rec, 6, "re", line)?,
            im: field(&rec, 7, "im", line)?,
            exact: rec[8].to_string(),
            oracle_re: None,
            oracle_im: None,
        };
        row.exact_value()
            .map_err(|e| parse_err(line, e.to_string()))?;
        rows.push(row);
    }
    Ok(rows)
}

// ---------------------------------------------------------------- grids

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct StateKl {
    k: u32,
    l: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct GridHeader {
    state: StateKl,
    params: OscParams,
    axes: GridAxes,
    units: String,
}

const UNITS: &str = "natural: lengths in units set by nu, momenta by hbar*nu; W per hbar^3";
const GRID_COLUMNS: [&str; 4] = ["r", "q", "theta", "W"];

pub fn write_grid<W: Write>(grid: &WignerGrid, mut out: W) -> Result<()> {
    let header = GridHeader {
        state: StateKl {
            k: grid.k,
            l: grid.l,
        },
        params: grid.params,
        axes: grid.axes.clone(),
        units: UNITS.into(),
    };
    writeln!(out, "{}", serde_json::to_string(&header)?)?;
    writeln!(out, "{}", GRID_COLUMNS.join(","))?;
    for (it, th) in grid.axes.theta.iter().enumerate() {
        for (ir, r) in grid.axes.r.iter().enumerate() {
            for (iq, q) in grid.axes.q.iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{},{}",
                    fmt17(*r),
                    fmt17(*q),
                    fmt17(*th),
                    fmt17(grid.value(it, ir, iq))
                )?;
            }
        }
    }
    Ok(())
}

pub fn grid_to_string(grid: &WignerGrid) -> Result<String> {
    let mut buf = Vec::new();
    write_grid(grid, &mut buf)?;
    Ok(String::from_utf8(buf).expect("ascii output"))
}

/// Parses a grid file. Rows must follow the axis order written by
/// [`write_grid`]: `theta` slowest, `q` fastest.
pub fn parse_grid(text: &str) -> Result<WignerGrid> {
    let (head, body) = split_header(text)?;
    let header: GridHeader = serde_json::from_str(head).map_err(|e| parse_err(1, e.to_string()))?;
    header.axes.validate()?;
    let axes = header.axes;
    let mut rdr = csv_body(body);
    check_columns(&mut rdr, &GRID_COLUMNS)?;
    let mut values = vec![0.0; axes.len()];
    let mut n = 0usize;
    for rec in rdr.records() {
        let rec = rec?;
        let line = 1 + rec.position().map_or(0, |p| p.line() as usize);
        if n >= values.len() {
            return Err(parse_err(line, "more rows than the axes describe"));
        }
        let (nq, nr) = (axes.q.len(), axes.r.len());
        let (it, ir, iq) = (n / (nq * nr), (n / nq) % nr, n % nq);
        let r: f64 = field(&rec, 0, "r", line)?;
        let q: f64 = field(&rec, 1, "q", line)?;
        let th: f64 = field(&rec, 2, "theta", line)?;
        if r != axes.r[ir] || q != axes.q[iq] || th != axes.theta[it] {
            return Err(parse_err(
                line,
                format!("row ({r}, {q}, {th}) is out of axis order"),
            ));
        }
        values[axes.index(it, ir, iq)] = field(&rec, 3, "W", line)?;
        n += 1;
    }
    if n != values.len() {
        return Err(parse_err(
            2 + n,
            format!("expected {} rows, found {n}", values.len()),
        ));
    }
    let nodes = extract_nodes(&axes, &values);
    Ok(WignerGrid {
        k: header.state.k,
        l: header.state.l,
        params: header.params,
        axes,
        values,
        nodes,
    })
}

// ---------------------------------------------------------------- probabilities

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbRow {
    pub k: u32,
    pub l: u32,
    pub r: f64,
    pub p: f64,
    pub theta: f64,
    pub v: f64,
    pub t: f64,
    #[serde(rename = "P")]
    pub prob: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbTable {
    pub params: OscParams,
    pub rows: Vec<ProbRow>,
}

#[derive(Serialize, Deserialize)]
struct ProbHeader {
    params: OscParams,
    zeta: f64,
    units: String,
}

const PROB_COLUMNS: [&str; 8] = ["k", "l", "r", "p", "theta", "v", "t", "P"];

/// `P_kl` on the product of `rs × ps × thetas` for every listed state,
/// with `r` along x and `p` at angle `theta` to it.
pub fn prob_table(
    states: &[(u32, u32)],
    rs: &[f64],
    ps: &[f64],
    thetas: &[f64],
    params: &OscParams,
) -> ProbTable {
    let mut rows = Vec::with_capacity(states.len() * rs.len() * ps.len() * thetas.len());
    for &(k, l) in states {
        for &th in thetas {
            for &r in rs {
                for &p in ps {
                    let rel = RelPhasePoint::from_polar(r, p, th);
                    let (v, t) = v_and_t(rel.r, rel.p, params);
                    rows.push(ProbRow {
                        k,
                        l,
                        r,
                        p,
                        theta: th,
                        v,
                        t,
                        prob: p_kl(k, l, &rel, params),
                    });
                }
            }
        }
    }
    ProbTable {
        params: *params,
        rows,
    }
}

pub fn prob_csv(table: &ProbTable) -> Result<String> {
    let header = ProbHeader {
        params: table.params,
        zeta: table.params.zeta(),
        units: "natural: r in length units of nu, p in hbar*nu".into(),
    };
    let mut s = serde_json::to_string(&header)?;
    s.push('\n');
    s += &PROB_COLUMNS.join(",");
    s.push('\n');
    for r in &table.rows {
        s += &format!(
            "{},{},{},{},{},{},{},{}\n",
            r.k,
            r.l,
            fmt17(r.r),
            fmt17(r.p),
            fmt17(r.theta),
            fmt17(r.v),
            fmt17(r.t),
            fmt17(r.prob)
        );
    }
    Ok(s)
}

pub fn parse_prob_csv(text: &str) -> Result<ProbTable> {
    let (head, body) = split_header(text)?;
    let header: ProbHeader = serde_json::from_str(head).map_err(|e| parse_err(1, e.to_string()))?;
    if (header.zeta - header.params.zeta()).abs() > 1e-12 * header.zeta.abs().max(1.0) {
        return Err(parse_err(
            1,
            format!(
                "zeta {} inconsistent with params (2 nu delta = {})",
                header.zeta,
                header.params.zeta()
            ),
        ));
    }
    let mut rdr = csv_body(body);
    check_columns(&mut rdr, &PROB_COLUMNS)?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = 1 + rec.position().map_or(0, |p| p.line() as usize);
        rows.push(ProbRow {
            k: field(&rec, 0, "k", line)?,
            l: field(&rec, 1, "l", line)?,
            r: field(&rec, 2, "r", line)?,
            p: field(&rec, 3, "p", line)?,
            theta: field(&rec, 4, "theta", line)?,
            v: field(&rec, 5, "v", line)?,
            t: field(&rec, 6, "t", line)?,
            prob: field(&rec, 7, "P", line)?,
        });
    }
    Ok(ProbTable {
        params: header.params,
        rows,
    })
}

#[derive(Serialize, Deserialize)]
struct ProbJson {
    params: OscParams,
    zeta: f64,
    rows: Vec<ProbRow>,
}

pub fn prob_json(table: &ProbTable) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ProbJson {
        params: table.params,
        zeta: table.params.zeta(),
        rows: table.rows.clone(),
    })?)
}

pub fn parse_prob_json(text: &str) -> Result<ProbTable> {
    let j: ProbJson = serde_json::from_str(text)?;
    if (j.zeta - j.params.zeta()).abs() > 1e-12 * j.zeta.abs().max(1.0) {
        return Err(Error::Parameter(format!(
            "zeta {} inconsistent with params",
            j.zeta
        )));
    }
    Ok(ProbTable {
        params: j.params,
        rows: j.rows,
    })
}

// ---------------------------------------------------------------- ensembles

/// Writes particles with an explicit weight column; read back with
/// [`crate::yields::load_particles`].
pub fn particles_csv(records: &[ParticleRecord]) -> String {
    let mut s = String::from("species,rx,ry,rz,px,py,pz,weight\n");
    for r in records {
        s += &r.species;
        for x in r.r.iter().chain(&r.p).chain([&r.weight]) {
            s.push(',');
            s += &fmt17(*x);
        }
        s.push('\n');
    }
    s
}

pub fn params_json(p: &ParticleParams) -> Result<String> {
    Ok(serde_json::to_string_pretty(p)?)
}

pub fn parse_params_json(text: &str) -> Result<ParticleParams> {
    let p: ParticleParams = serde_json::from_str(text)?;
    p.osc_params()?;
    Ok(p)
}

pub fn yield_report_json(r: &YieldReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(r)?)
}

pub fn parse_yield_report(text: &str) -> Result<YieldReport> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests;
