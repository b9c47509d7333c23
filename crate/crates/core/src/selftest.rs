//! Runs the library's invariant checks end to end and reports each group
//! with its largest deviation.
//!
//! [`Fault`] injects a known error so callers can confirm that a broken
//! build is noticed.

use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coalescence::oracle::p_kl_quadrature;
use crate::coalescence::{p_kl, poisson_sum, poisson_weight, RelPhasePoint};
use crate::expansion::{
    coeff, coeff_k0, coeff_oracle, degenerate_subspace, inner_product_exact, reference_table, Ame,
    ExactCoeff, FeTriple,
};
use crate::figures::{contour_panel, figure3, mirror_deviation};
use crate::ho1d::{quasi_prob, wigner_1d, OscParams, Phase1D};
use crate::io;
use crate::specfun::quadrature::shifted_hermite;
use crate::wigner3d::closed::{printed_discrepancies, shipped_table_deviation, wigner_kl_closed};
use crate::wigner3d::oracle::wigner_kl_transform;
use crate::wigner3d::{export_grid, wigner_kl, GridAxes, PhasePoint3D};
use crate::yields::{channel_table, pair_yields, McConfig, ParticleRecord};

/// A deliberate error for exercising the failure path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Scales the radicand of `C_{0,1,1;1,0,0}` by `1 + 10⁻⁶`.
    PerturbCoefficient,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub group: String,
    pub passed: bool,
    pub max_dev: f64,
    pub tol: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
    /// Quoted closed-form coefficients that disagree with their derivation.
    pub flags: Vec<String>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.checks.iter().map(|c| c.group.len()).max().unwrap_or(0);
        for c in &self.checks {
            writeln!(
                f,
                "{}  {:width$}  max dev {:.3e} (tol {:.0e})  {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.group,
                c.max_dev,
                c.tol,
                c.detail
            )?;
        }
        for flag in &self.flags {
            writeln!(f, "FLAG  {flag}")?;
        }
        let n_pass = self.checks.iter().filter(|c| c.passed).count();
        write!(f, "{n_pass}/{} groups passed", self.checks.len())
    }
}

fn check(group: &str, max_dev: f64, tol: f64, detail: impl Into<String>) -> Check {
    Check {
        group: group.to_string(),
        passed: max_dev.is_finite() && max_dev <= tol,
        max_dev,
        tol,
        detail: detail.into(),
    }
}

fn failed(group: &str, err: impl fmt::Display) -> Check {
    Check {
        group: group.to_string(),
        passed: false,
        max_dev: f64::INFINITY,
        tol: 0.0,
        detail: format!("error: {err}"),
    }
}

/// Coefficients as seen by the checks, with the fault applied.
struct Coeffs {
    fault: Option<Fault>,
}

impl Coeffs {
    fn get(&self, s: Ame, t: FeTriple) -> ExactCoeff {
        let c = coeff(s, t);
        match self.fault {
            Some(Fault::PerturbCoefficient)
                if (s.k, s.l, s.m) == (0, 1, 1) && t == FeTriple::new(1, 0, 0) =>
            {
                let bump = BigRational::new(BigInt::from(1_000_001), BigInt::from(1_000_000));
                ExactCoeff::new(c.sign, &c.radicand * bump, c.s_sum.clone()).expect("nonzero")
            }
            _ => c,
        }
    }
}

fn points(seed: u64, n: usize, span: f64) -> Vec<[f64; 6]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| std::array::from_fn(|_| rng.gen_range(-span..span)))
        .collect()
}

fn reference_table_group(c: &Coeffs) -> Check {
    let table = reference_table();
    let mut bad = 0;
    let mut dev: f64 = 0.0;
    for (s, t, expected) in &table {
        let got = c.get(*s, *t);
        if got != *expected {
            bad += 1;
            dev = dev.max(
                (got.to_complex() - expected.to_complex())
                    .norm()
                    .max(f64::MIN_POSITIVE),
            );
        }
    }
    check(
        "reference table N<=2",
        dev,
        0.0,
        format!("{} entries, {bad} differ", table.len()),
    )
}

fn selection_group(c: &Coeffs) -> Check {
    let mut bad = 0;
    let mut n_checked = 0;
    for n in 0..=6 {
        for s in Ame::shell(n) {
            for t in degenerate_subspace(n) {
                if (s.l as i64 + s.m as i64 - t.n3 as i64) % 2 != 0 {
                    n_checked += 1;
                    if !c.get(s, t).is_zero() {
                        bad += 1;
                    }
                }
            }
        }
    }
    check(
        "selection rules N<=6",
        bad as f64,
        0.0,
        format!("{n_checked} forbidden entries"),
    )
}

fn unitarity_group(c: &Coeffs) -> Check {
    let mut worst = BigRational::zero();
    let mut pairs = 0;
    for n in 0..=5 {
        let states = Ame::shell(n);
        for s in &states {
            let norm: BigRational = degenerate_subspace(n)
                .into_iter()
                .map(|t| c.get(*s, t).norm_sqr())
                .sum();
            worst = worst.max((norm - BigRational::one()).abs());
        }
        for (i, a) in states.iter().enumerate() {
            for b in &states[i + 1..] {
                pairs += 1;
                match inner_product_exact(*a, *b) {
                    Ok(v) if v.is_zero() => {}
                    Ok(_) => worst = worst.max(BigRational::one()),
                    Err(e) => return failed("unitarity N<=5", e),
                }
            }
        }
    }
    let dev = num_traits::ToPrimitive::to_f64(&worst).unwrap_or(f64::INFINITY);
    let dev = if worst.is_zero() {
        0.0
    } else {
        dev.max(f64::MIN_POSITIVE)
    };
    check(
        "unitarity N<=5",
        dev,
        0.0,
        format!("exact norms, {pairs} cross products"),
    )
}

fn k0_group(c: &Coeffs) -> Check {
    let mut bad = 0;
    for l in 0..=6 {
        for m in -(l as i32)..=l as i32 {
            let s = Ame::new(0, l, m).expect("valid");
            for t in degenerate_subspace(l) {
                match coeff_k0(s, t) {
                    Ok(v) if v == c.get(s, t) => {}
                    Ok(_) => bad += 1,
                    Err(e) => return failed("k=0 closed form l<=6", e),
                }
            }
        }
    }
    check("k=0 closed form l<=6", bad as f64, 0.0, "exact comparison")
}

fn oracle_group(c: &Coeffs) -> Check {
    let mut dev: f64 = 0.0;
    let mut n_cmp = 0;
    for n in 0..=3 {
        for s in Ame::shell(n) {
            for t in degenerate_subspace(n) {
                match coeff_oracle(s, t, 1e-12) {
                    Ok(o) => dev = dev.max((o - c.get(s, t).to_complex()).norm()),
                    Err(e) => return failed("coefficient quadrature N<=3", e),
                }
                n_cmp += 1;
            }
        }
    }
    check(
        "coefficient quadrature N<=3",
        dev,
        1e-8,
        format!("{n_cmp} comparisons"),
    )
}

fn wigner_1d_group() -> Check {
    let params = OscParams::new(1.2, 0.4, 0.8).expect("valid");
    let (ax, aq) = (params.nu().powi(2), (params.hbar() * params.nu()).powi(-2));
    let xs = shifted_hermite(10, ax, 0.0);
    let qs = shifted_hermite(10, aq, 0.0);
    let mut dev: f64 = 0.0;
    for n in 0..=3 {
        let mut acc: f64 = 0.0;
        for &(x, wx) in &xs {
            for &(q, wq) in &qs {
                acc += wx
                    * wq
                    * wigner_1d(n, n, Phase1D::new(x, q), &params).re
                    * (ax * x * x + aq * q * q).exp();
            }
        }
        dev = dev.max((acc - 1.0).abs());
    }
    for p in points(3, 20, 2.0) {
        let ph = Phase1D::new(p[0], p[1]);
        for a in 0..=3 {
            for b in 0..=3 {
                let d = wigner_1d(a, b, ph, &params) - wigner_1d(b, a, ph, &params).conj();
                dev = dev.max(d.norm());
            }
        }
    }
    check("1-D Wigner norm and hermiticity", dev, 1e-12, "n<=3")
}

fn wigner_oracle_group() -> Check {
    let params = OscParams::new(1.0, 0.5, 1.0).expect("valid");
    let mut dev: f64 = 0.0;
    let pts = points(5, 3, 1.2);
    for (k, l) in [(0, 0), (0, 1), (1, 0), (0, 2)] {
        for p in &pts {
            let pt = PhasePoint3D::new([p[0], p[1], p[2]], [p[3], p[4], p[5]]);
            let o = wigner_kl_transform(k, l, &pt, &params, 24);
            dev = dev.max((o - wigner_kl(k, l, &pt, &params)).abs());
        }
    }
    check("3-D Wigner vs transform N<=2", dev, 1e-8, "12 points")
}

fn closed_form_group(flags: &mut Vec<String>) -> Check {
    let params = OscParams::new(0.9, 0.5, 1.1).expect("valid");
    let mut dev: f64 = 0.0;
    for (k, l) in [(0, 0), (0, 1), (1, 0), (0, 2), (0, 3), (1, 1)] {
        match shipped_table_deviation(k, l) {
            Ok(d) => dev = dev.max(d),
            Err(e) => return failed("W_kl closed forms N<=3", e),
        }
        for p in points(7 + k as u64 * 10 + l as u64, 20, 2.0) {
            let pt = PhasePoint3D::new([p[0], p[1], p[2]], [p[3], p[4], p[5]]);
            let w = wigner_kl(k, l, &pt, &params);
            match wigner_kl_closed(k, l, pt.r2(), pt.q2(), pt.rq(), &params) {
                Ok(c) => dev = dev.max((c - w).abs()),
                Err(e) => return failed("W_kl closed forms N<=3", e),
            }
        }
    }
    match printed_discrepancies() {
        Ok(ds) => flags.extend(
            ds.iter()
                .map(|d| format!("quoted closed form differs: {d}")),
        ),
        Err(e) => return failed("W_kl closed forms N<=3", e),
    }
    check(
        "W_kl closed forms N<=3",
        dev,
        1e-12,
        "derived tables vs factorized sum",
    )
}

fn poisson_group() -> Check {
    let params = OscParams::with_zeta(1.0, 1.0, 1.0).expect("valid");
    let mut dev: f64 = 0.0;
    for p in points(11, 30, 1.5) {
        let rel = RelPhasePoint::new([p[0], p[1], p[2]], [p[3], p[4], p[5]]);
        let (v, _) = crate::coalescence::v_and_t(rel.r, rel.p, &params);
        for n in 0..=4 {
            match poisson_sum(n, &rel, &params) {
                Ok(s) => dev = dev.max((s - poisson_weight(n, v)).abs()),
                Err(e) => return failed("Poisson shell sums N<=4", e),
            }
        }
    }
    check("Poisson shell sums N<=4", dev, 1e-10, "30 points, zeta=1")
}

fn zeta_inversion_group() -> Check {
    let mut dev: f64 = 0.0;
    for z in [0.25, 0.5, 2.0, 4.0] {
        let a = OscParams::with_zeta(1.0, z, 1.0).expect("valid");
        let b = OscParams::with_zeta(1.0, 1.0 / z, 1.0).expect("valid");
        for p in points(13, 20, 2.5) {
            for n in 0..=3 {
                let d = quasi_prob(n, n, p[0], p[1], &a) - quasi_prob(n, n, p[1], p[0], &b);
                dev = dev.max(d.norm());
            }
        }
    }
    let mut contour_dev: f64 = 0.0;
    for n in 0..=2 {
        let (hi, lo) = match (contour_panel(n, 4.0, 61), contour_panel(n, 0.25, 61)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return failed("zeta inversion n<=3", e),
        };
        contour_dev =
            contour_dev.max(mirror_deviation(&hi.segments, &lo.segments).unwrap_or(f64::INFINITY));
    }
    let mut c = check(
        "zeta inversion n<=3",
        dev,
        1e-12,
        format!("level-set mirror deviation {contour_dev:e}"),
    );
    c.passed &= contour_dev == 0.0;
    c
}

fn phase_space_group() -> Check {
    let mut dev: f64 = 0.0;
    for zeta in [0.5, 1.0, 2.0] {
        let params = OscParams::with_zeta(0.9, zeta, 1.1).expect("valid");
        let (nu, hb) = (params.nu(), params.hbar());
        let z2 = zeta * zeta;
        let ar = nu * nu / (1.0 + z2);
        let ap = z2 / ((1.0 + z2) * hb * hb * nu * nu);
        let rs = shifted_hermite(10, ar, 0.0);
        let ps = shifted_hermite(10, ap, 0.0);
        for n in 0..=3 {
            let mut acc = 0.0;
            for &(r, wr) in &rs {
                for &(p, wp) in &ps {
                    acc += wr
                        * wp
                        * quasi_prob(n, n, r, p, &params).re
                        * (ar * r * r + ap * p * p).exp();
                }
            }
            dev = dev.max((acc - 2.0 * PI * hb).abs());
        }
    }
    check(
        "phase-space integral 2 pi hbar",
        dev,
        1e-8,
        "n<=3, zeta in {1/2,1,2}",
    )
}

fn coalescence_oracle_group() -> Check {
    let params = OscParams::with_zeta(1.0, 2.0, 1.0).expect("valid");
    let mut dev: f64 = 0.0;
    for p in points(17, 4, 1.2) {
        let rel = RelPhasePoint::new([p[0], p[1], p[2]], [p[3], p[4], p[5]]);
        for (k, l) in [(0, 0), (0, 1), (1, 0), (0, 2)] {
            dev = dev
                .max((p_kl(k, l, &rel, &params) - p_kl_quadrature(k, l, &rel, &params, 30)).abs());
        }
    }
    check("P_kl vs quadrature, zeta=2", dev, 1e-8, "4 points, N<=2")
}

fn angle_group() -> Check {
    let curve = figure3(&OscParams::default(), 19);
    let half = 9;
    let mut dev: f64 = 0.0;
    for i in 0..half {
        dev = dev
            .max(curve.p03[i] - curve.p03[i + 1])
            .max(curve.p11[i + 1] - curve.p11[i]);
    }
    let shell = (-1f64).exp() / 6.0;
    for i in [0, half, 18] {
        dev = dev.max((curve.p03[i] + curve.p11[i] - shell).abs());
    }
    check(
        "angular dependence at v=1",
        dev.max(0.0),
        1e-10,
        "P03 up, P11 down on [0, pi/2]",
    )
}

fn yields_group() -> Check {
    let origin = |s: &str| ParticleRecord::new(s, [0.0; 3], [0.0; 3]);
    let params = OscParams::default();
    let rep = match pair_yields(
        &[origin("u")],
        &[origin("dbar")],
        &channel_table(),
        &params,
        &McConfig::new(1, 1),
    ) {
        Ok(r) => r,
        Err(e) => return failed("yields single pair", e),
    };
    let mut dev: f64 = 0.0;
    for c in &rep.channels {
        let expect = match c.name.as_str() {
            "pi+" => 1.0 / 36.0,
            "rho+" => 3.0 / 36.0,
            _ => 0.0,
        };
        dev = dev.max((c.yield_ - expect).abs());
    }
    check("yields single pair", dev, 1e-15, "r = p = 0")
}

fn round_trip_group() -> Check {
    let mut bad = Vec::new();
    let rows = io::coeff_rows(&Ame::shell(2));
    if io::coeff_json(&rows)
        .and_then(|t| io::parse_coeff_json(&t))
        .ok()
        != Some(rows)
    {
        bad.push("coefficients");
    }
    let params = OscParams::default();
    let grid = GridAxes::parse("r:0:2:4,q:0:2:3,theta:0;pi/2")
        .and_then(|a| export_grid(1, 1, &a, &params));
    match grid {
        Ok(g) => {
            if io::grid_to_string(&g).and_then(|t| io::parse_grid(&t)).ok() != Some(g) {
                bad.push("grid");
            }
        }
        Err(_) => bad.push("grid"),
    }
    let table = io::prob_table(&[(0, 3), (1, 1)], &[1.0], &[0.5, 1.0], &[0.0, 1.0], &params);
    if io::prob_csv(&table)
        .and_then(|t| io::parse_prob_csv(&t))
        .ok()
        != Some(table)
    {
        bad.push("probabilities");
    }
    let detail = if bad.is_empty() {
        "coefficients, grid, probabilities".to_string()
    } else {
        format!("mismatch: {}", bad.join(", "))
    };
    check("file round trips", bad.len() as f64, 0.0, detail)
}

/// Runs every group; `fault` injects a deliberate error.
pub fn run_selftest(fault: Option<Fault>) -> SelftestReport {
    let c = Coeffs { fault };
    let mut flags = Vec::new();
    let checks = vec![
        reference_table_group(&c),
        selection_group(&c),
        unitarity_group(&c),
        k0_group(&c),
        oracle_group(&c),
        wigner_1d_group(),
        wigner_oracle_group(),
        closed_form_group(&mut flags),
        poisson_group(),
        zeta_inversion_group(),
        phase_space_group(),
        coalescence_oracle_group(),
        angle_group(),
        yields_group(),
        round_trip_group(),
    ];
    SelftestReport { checks, flags }
}
