use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ho3d::coalescence::oracle::p_kl_quadrature;
use ho3d::coalescence::RelPhasePoint;
use ho3d::expansion::{coeff_oracle, Ame, FeTriple};
use ho3d::figures::{figure1, figure2, mirror_deviation, FIG2_ZETAS};
use ho3d::io;
use ho3d::selftest::{run_selftest, Fault};
use ho3d::wigner3d::oracle::wigner_kl_transform;
use ho3d::wigner3d::{check_kl, export_grid, GridAxes, PhasePoint3D};
use ho3d::yields::{
    channel_table, load_particles_path, pair_yields, partition, McConfig, SpectrumBins,
    SpectrumMode,
};
use ho3d::OscParams;

use crate::{Cli, Command, Common, Failure, Format};

type Outcome = Result<(), Failure>;

const MAX_SHELL: u32 = 12;
const ORACLE_TOL: f64 = 1e-8;

pub fn run(cli: &Cli) -> Outcome {
    let c = &cli.common;
    match &cli.command {
        Command::Coeff { k, l, m, n } => coeff(c, *k, *l, *m, *n),
        Command::Wigner { k, l } => wigner(c, *k, *l),
        Command::Prob { k, l, max_n } => prob(c, *k, *l, *max_n),
        Command::Yields {
            particles,
            params,
            species1,
            species2,
            budget,
            spectrum,
            smear,
        } => yields(
            c,
            particles,
            params.as_deref(),
            species1,
            species2,
            *budget,
            spectrum.as_deref(),
            *smear,
        ),
        Command::Figures { id, points } => figures(c, *id, *points),
        Command::Selftest { inject_fault } => selftest(c, *inject_fault),
    }
}

/// Oscillator parameters from the flags. `--zeta` fixes δ = ζ/(2ν); giving
/// both `--zeta` and `--delta` requires them to agree.
pub fn params(c: &Common) -> Result<OscParams, Failure> {
    let p = match (c.delta, c.zeta) {
        (None, None) => OscParams::with_zeta(c.nu, 1.0, c.hbar)?,
        (Some(d), None) => OscParams::new(c.nu, d, c.hbar)?,
        (None, Some(z)) => OscParams::with_zeta(c.nu, z, c.hbar)?,
        (Some(d), Some(z)) => {
            let p = OscParams::new(c.nu, d, c.hbar)?;
            if (p.zeta() - z).abs() > 1e-12 * z.abs().max(1.0) {
                return Err(Failure::Usage(format!(
                    "--zeta {z} disagrees with 2 nu delta = {}",
                    p.zeta()
                )));
            }
            p
        }
    };
    Ok(p)
}

fn emit(c: &Common, text: &str) -> Outcome {
    match &c.out {
        Some(path) => write_file(path, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Io(format!("stdout: {e}")))
        }
    }
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn check_shell(k: u32, l: u32) -> Outcome {
    if 2 * k + l > MAX_SHELL {
        return Err(usage(format!("2k + l = {} exceeds {MAX_SHELL}", 2 * k + l)));
    }
    Ok(())
}

fn coeff(c: &Common, k: Option<u32>, l: Option<u32>, m: Option<i32>, n: Option<u32>) -> Outcome {
    let states: Vec<Ame> = match (n, k, l) {
        (Some(n), _, _) => {
            if n > MAX_SHELL {
                return Err(usage(format!("--N {n} exceeds {MAX_SHELL}")));
            }
            let s: Vec<Ame> = Ame::shell(n)
                .into_iter()
                .filter(|s| {
                    k.is_none_or(|k| s.k == k)
                        && l.is_none_or(|l| s.l == l)
                        && m.is_none_or(|m| s.m == m)
                })
                .collect();
            if s.is_empty() {
                return Err(usage(format!(
                    "no state in shell N={n} matches the given k, l, m"
                )));
            }
            s
        }
        (None, Some(k), Some(l)) => {
            check_shell(k, l)?;
            match m {
                Some(m) => vec![Ame::new(k, l, m)?],
                None => (-(l as i32)..=l as i32)
                    .rev()
                    .map(|m| Ame::new(k, l, m))
                    .collect::<ho3d::Result<_>>()?,
            }
        }
        _ => return Err(usage("coeff needs --N, or both --k and --l")),
    };
    let mut rows = io::coeff_rows(&states);

    let mut worst: f64 = 0.0;
    if c.verify {
        for r in &mut rows {
            let s = Ame::new(r.k, r.l, r.m)?;
            let o = coeff_oracle(s, FeTriple::new(r.n1, r.n2, r.n3), 1e-12)?;
            worst = worst.max((o.re - r.re).hypot(o.im - r.im));
            r.oracle_re = Some(o.re);
            r.oracle_im = Some(o.im);
        }
        eprintln!(
            "max |closed - oracle| = {worst:.3e} over {} coefficients",
            rows.len()
        );
    }

    let text = match c.format.unwrap_or(Format::Json) {
        Format::Json => io::coeff_json(&rows)? + "\n",
        Format::Csv => io::coeff_csv(&rows),
    };
    emit(c, &text)?;
    if worst > ORACLE_TOL {
        return Err(Failure::Invariant(format!(
            "oracle deviation {worst:e} exceeds {ORACLE_TOL:e}"
        )));
    }
    Ok(())
}

fn grid_axes(c: &Common, params: &OscParams, default_n: usize) -> Result<GridAxes, Failure> {
    match &c.grid {
        Some(spec) => Ok(GridAxes::parse(spec)?),
        None => Ok(GridAxes::default_for(params, default_n)),
    }
}

/// A handful of grid points spread over the axes, for oracle spot checks.
fn spot_points(axes: &GridAxes) -> Vec<(f64, f64, f64)> {
    let pick = |v: &[f64]| [v[0], v[v.len() / 2], v[v.len() - 1]];
    let mut out = Vec::new();
    for th in pick(&axes.theta) {
        for (r, q) in pick(&axes.r)
            .into_iter()
            .zip(pick(&axes.q).into_iter().rev())
        {
            out.push((r, q, th));
        }
    }
    out.dedup();
    out
}

fn wigner(c: &Common, k: u32, l: u32) -> Outcome {
    if c.format == Some(Format::Json) {
        return Err(usage(
            "grid files are a JSON header with a CSV body; use --format csv or omit it",
        ));
    }
    check_kl(k, l)?;
    let p = params(c)?;
    let axes = grid_axes(c, &p, 41)?;
    let grid = export_grid(k, l, &axes, &p)?;
    emit(c, &io::grid_to_string(&grid)?)?;
    if c.verify {
        let mut worst: f64 = 0.0;
        for (r, q, th) in spot_points(&axes) {
            let pt = PhasePoint3D::from_polar(r, q, th);
            let direct = ho3d::wigner3d::wigner_kl(k, l, &pt, &p);
            worst = worst.max((wigner_kl_transform(k, l, &pt, &p, 28) - direct).abs());
        }
        eprintln!("max |W - transform| = {worst:.3e}");
        if worst > ORACLE_TOL {
            return Err(Failure::Invariant(format!(
                "transform deviation {worst:e} exceeds {ORACLE_TOL:e}"
            )));
        }
    }
    Ok(())
}

fn prob(c: &Common, k: Option<u32>, l: Option<u32>, max_n: u32) -> Outcome {
    let states: Vec<(u32, u32)> = match (k, l) {
        (Some(k), Some(l)) => {
            check_shell(k, l)?;
            vec![(k, l)]
        }
        (None, None) => {
            if max_n > MAX_SHELL {
                return Err(usage(format!("--max-N {max_n} exceeds {MAX_SHELL}")));
            }
            (0..=max_n)
                .flat_map(|n| (0..=n / 2).rev().map(move |k| (k, n - 2 * k)))
                .collect()
        }
        _ => return Err(usage("prob needs both --k and --l, or neither")),
    };
    let p = params(c)?;
    let axes = grid_axes(c, &p, 13)?;
    let table = io::prob_table(&states, &axes.r, &axes.q, &axes.theta, &p);
    let text = match c.format.unwrap_or(Format::Csv) {
        Format::Csv => io::prob_csv(&table)?,
        Format::Json => io::prob_json(&table)? + "\n",
    };
    emit(c, &text)?;
    if c.verify {
        let step = (table.rows.len() / 20).max(1);
        let mut worst: f64 = 0.0;
        for row in table.rows.iter().step_by(step) {
            let rel = RelPhasePoint::from_polar(row.r, row.p, row.theta);
            worst = worst.max((p_kl_quadrature(row.k, row.l, &rel, &p, 30) - row.prob).abs());
        }
        eprintln!("max |P - quadrature| = {worst:.3e}");
        if worst > ORACLE_TOL {
            return Err(Failure::Invariant(format!(
                "quadrature deviation {worst:e} exceeds {ORACLE_TOL:e}"
            )));
        }
    }
    Ok(())
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn parse_bins(spec: &str) -> Result<SpectrumBins, Failure> {
    let f: Vec<&str> = spec.split(':').collect();
    let bad = || usage(format!("--spectrum `{spec}` is not lo:hi:n"));
    if f.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = f[0].parse().map_err(|_| bad())?;
    let hi: f64 = f[1].parse().map_err(|_| bad())?;
    let n: usize = f[2].parse().map_err(|_| bad())?;
    if n == 0 {
        return Err(bad());
    }
    Ok(SpectrumBins::uniform(lo, hi, n)?)
}

#[allow(clippy::too_many_arguments)]
fn yields(
    c: &Common,
    particles: &Path,
    params_file: Option<&Path>,
    species1: &str,
    species2: &str,
    budget: usize,
    spectrum: Option<&str>,
    smear: bool,
) -> Outcome {
    if c.format == Some(Format::Csv) {
        return Err(usage("yield reports are JSON only"));
    }
    let p = match params_file {
        Some(path) => io::parse_params_json(&read_text(path)?)?.osc_params()?,
        None => params(c)?,
    };
    let records = load_particles_path(particles).map_err(|e| match e {
        ho3d::Error::Io(io) => Failure::Io(format!("{}: {io}", particles.display())),
        other => Failure::Io(format!("{}: {other}", particles.display())),
    })?;
    let mut groups = partition(records);
    let mut take = |s: &str| {
        groups.remove(s).ok_or_else(|| {
            usage(format!(
                "no particles of species `{s}` in {}",
                particles.display()
            ))
        })
    };
    let (a, b) = (take(species1)?, take(species2)?);
    let mut mc = McConfig::new(c.seed, budget);
    if let Some(spec) = spectrum {
        mc.spectrum = Some(parse_bins(spec)?);
        mc.spectrum_mode = if smear {
            SpectrumMode::Smeared
        } else {
            SpectrumMode::Delta
        };
    } else if smear {
        return Err(usage("--smear needs --spectrum"));
    }
    let report = pair_yields(&a, &b, &channel_table(), &p, &mc)?;
    emit(c, &(io::yield_report_json(&report)? + "\n"))
}

fn zeta_label(z: f64) -> String {
    if z == 0.25 {
        "1_4".into()
    } else {
        format!("{z}")
    }
}

fn figures(c: &Common, id: u8, points: usize) -> Outcome {
    if points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let dir: PathBuf = c.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    let p = params(c)?;
    let mut written = Vec::new();
    let mut problems = Vec::new();
    match id {
        1 => {
            for g in figure1(&p, points)? {
                if (g.k, g.l) == (0, 0) && g.values.iter().any(|&w| w <= 0.0) {
                    problems.push("W00 is not positive everywhere".to_string());
                }
                let path = dir.join(format!("fig1_W{}{}.csv", g.k, g.l));
                write_file(&path, &io::grid_to_string(&g)?)?;
                written.push(path);
            }
        }
        2 => {
            let panels = figure2(points)?;
            for pan in &panels {
                let path = dir.join(format!("fig2_n{}_zeta{}.json", pan.n, zeta_label(pan.zeta)));
                let text =
                    serde_json::to_string_pretty(pan).map_err(|e| Failure::Io(e.to_string()))?;
                write_file(&path, &(text + "\n"))?;
                written.push(path);
            }
            let (lo, hi) = (FIG2_ZETAS[0], FIG2_ZETAS[2]);
            for n in 0..=2 {
                let find = |z: f64| {
                    panels
                        .iter()
                        .find(|q| q.n == n && q.zeta == z)
                        .expect("panel")
                };
                match mirror_deviation(&find(hi).segments, &find(lo).segments) {
                    Some(0.0) => {}
                    d => problems.push(format!(
                        "n={n}: level sets for zeta=4 and 1/4 do not mirror ({d:?})"
                    )),
                }
            }
        }
        _ => {
            let thetas: Vec<f64> = (0..points)
                .map(|i| PI * i as f64 / (points - 1) as f64)
                .collect();
            let r = 1.0 / p.nu();
            let q = p.hbar() * p.nu();
            let table = io::prob_table(&[(0, 3), (1, 1)], &[r], &[q], &thetas, &p);
            let (p03, p11) = table.rows.split_at(points);
            for i in 1..points {
                if thetas[i] > PI / 2.0 + 1e-12 {
                    break;
                }
                if p03[i].prob < p03[i - 1].prob - 1e-15 || p11[i].prob > p11[i - 1].prob + 1e-15 {
                    problems.push(format!("monotonicity broken near theta = {}", thetas[i]));
                }
            }
            let path = dir.join("fig3.csv");
            write_file(&path, &io::prob_csv(&table)?)?;
            written.push(path);
        }
    }
    let listing: String = written
        .iter()
        .map(|p| format!("{}\n", p.display()))
        .collect();
    let mut out = std::io::stdout().lock();
    out.write_all(listing.as_bytes())
        .map_err(|e| Failure::Io(e.to_string()))?;
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invariant(problems.join("; ")))
    }
}

fn selftest(c: &Common, inject_fault: bool) -> Outcome {
    let report = run_selftest(inject_fault.then_some(Fault::PerturbCoefficient));
    emit(c, &format!("{report}\n"))?;
    if report.passed() {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().map(|f| f.group.as_str()).collect();
        Err(Failure::Invariant(format!(
            "failed groups: {}",
            names.join(", ")
        )))
    }
}
