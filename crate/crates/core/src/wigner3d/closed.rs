//! Polynomial closed forms of `W_kl` for `N = 2k + l <= 3`.
//!
//! With `R = νr`, `P = q/(ħν)` and `(RP)² = (r·q)²/ħ²`,
//! `W_kl = W_00 Σ c_abc R^{2a} P^{2b} (RP)^{2c}`,
//! `W_00 = e^{-R²-P²}/(π³ħ³)`.
//!
//! The shipped coefficients come from [`derive_closed_form`], which expands
//! the factorized sum exactly. [`printed_terms`] keeps the forms as they are
//! commonly quoted in the literature; two of them carry misprints, which
//! [`printed_discrepancies`] reports.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::expansion::{d_coeff_exact, degenerate_subspace, FeTriple};
use crate::ho1d::OscParams;
use crate::specfun::{factorial, GaussianRational, Surd};

/// One term `num/den R^{2a} P^{2b} (RP)^{2c}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClosedTerm {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub num: i64,
    pub den: i64,
}

const fn ct(a: u32, b: u32, c: u32, num: i64, den: i64) -> ClosedTerm {
    ClosedTerm { a, b, c, num, den }
}

impl ClosedTerm {
    pub fn coefficient(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }

    fn eval(&self, r2: f64, p2: f64, rp2: f64) -> f64 {
        self.num as f64 / self.den as f64
            * r2.powi(self.a as i32)
            * p2.powi(self.b as i32)
            * rp2.powi(self.c as i32)
    }
}

const W00: &[ClosedTerm] = &[ct(0, 0, 0, 1, 1)];
const W01: &[ClosedTerm] = &[ct(0, 0, 0, -1, 1), ct(1, 0, 0, 2, 3), ct(0, 1, 0, 2, 3)];
const W02: &[ClosedTerm] = &[
    ct(0, 0, 0, 1, 1),
    ct(2, 0, 0, 4, 15),
    ct(1, 0, 0, -4, 3),
    ct(1, 1, 0, 16, 15),
    ct(0, 0, 1, -8, 15),
    ct(0, 1, 0, -4, 3),
    ct(0, 2, 0, 4, 15),
];
const W10: &[ClosedTerm] = &[
    ct(0, 0, 0, 1, 1),
    ct(2, 0, 0, 2, 3),
    ct(1, 0, 0, -4, 3),
    ct(1, 1, 0, -4, 3),
    ct(0, 0, 1, 8, 3),
    ct(0, 1, 0, -4, 3),
    ct(0, 2, 0, 2, 3),
];
const W03_DERIVED: &[ClosedTerm] = &[
    ct(0, 0, 0, -1, 1),
    ct(3, 0, 0, 8, 105),
    ct(2, 0, 0, -4, 5),
    ct(1, 0, 0, 2, 1),
    ct(1, 1, 0, -16, 5),
    ct(2, 1, 0, 24, 35),
    ct(1, 2, 0, 24, 35),
    ct(0, 0, 1, 8, 5),
    ct(1, 0, 1, -16, 35),
    ct(0, 1, 1, -16, 35),
    ct(0, 1, 0, 2, 1),
    ct(0, 2, 0, -4, 5),
    ct(0, 3, 0, 8, 105),
];
const W11_DERIVED: &[ClosedTerm] = &[
    ct(0, 0, 0, -1, 1),
    ct(3, 0, 0, 4, 15),
    ct(2, 0, 0, -22, 15),
    ct(1, 0, 0, 2, 1),
    ct(1, 1, 0, 4, 5),
    ct(2, 1, 0, -4, 15),
    ct(1, 2, 0, -4, 15),
    ct(0, 0, 1, -56, 15),
    ct(1, 0, 1, 16, 15),
    ct(0, 1, 1, 16, 15),
    ct(0, 1, 0, 2, 1),
    ct(0, 2, 0, -22, 15),
    ct(0, 3, 0, 4, 15),
];
// As quoted: the momentum term "-4/5 q²/(ħ⁴ν⁴)" read literally is a second P² term.
const W03_PRINTED: &[ClosedTerm] = &[
    ct(0, 0, 0, -1, 1),
    ct(3, 0, 0, 8, 105),
    ct(2, 0, 0, -4, 5),
    ct(1, 0, 0, 2, 1),
    ct(1, 1, 0, -16, 5),
    ct(2, 1, 0, 24, 35),
    ct(1, 2, 0, 24, 35),
    ct(0, 0, 1, 8, 5),
    ct(1, 0, 1, -16, 35),
    ct(0, 1, 1, -16, 35),
    ct(0, 1, 0, 2, 1),
    ct(0, 1, 0, -4, 5),
    ct(0, 3, 0, 8, 105),
];
// As quoted: the P⁴ and P⁶ coefficients are swapped relative to R⁴ and R⁶.
const W11_PRINTED: &[ClosedTerm] = &[
    ct(0, 0, 0, -1, 1),
    ct(3, 0, 0, 4, 15),
    ct(2, 0, 0, -22, 15),
    ct(1, 0, 0, 2, 1),
    ct(1, 1, 0, 4, 5),
    ct(2, 1, 0, -4, 15),
    ct(1, 2, 0, -4, 15),
    ct(0, 0, 1, -56, 15),
    ct(1, 0, 1, 16, 15),
    ct(0, 1, 1, 16, 15),
    ct(0, 1, 0, 2, 1),
    ct(0, 2, 0, -4, 15),
    ct(0, 3, 0, 22, 15),
];

fn unsupported(k: u32, l: u32) -> Error {
    Error::QuantumNumbers(format!(
        "closed forms exist for 2k + l <= 3 only, got (k, l) = ({k}, {l})"
    ))
}

/// The shipped closed form of `W_kl / W_00`.
pub fn closed_terms(k: u32, l: u32) -> Result<&'static [ClosedTerm]> {
    Ok(match (k, l) {
        (0, 0) => W00,
        (0, 1) => W01,
        (0, 2) => W02,
        (1, 0) => W10,
        (0, 3) => W03_DERIVED,
        (1, 1) => W11_DERIVED,
        _ => return Err(unsupported(k, l)),
    })
}

/// The closed form as commonly quoted, misprints included.
pub fn printed_terms(k: u32, l: u32) -> Result<&'static [ClosedTerm]> {
    Ok(match (k, l) {
        (0, 3) => W03_PRINTED,
        (1, 1) => W11_PRINTED,
        _ => closed_terms(k, l)?,
    })
}

/// `W_kl` from its closed form, given `r²`, `q²` and `r·q`.
pub fn wigner_kl_closed(
    k: u32,
    l: u32,
    r2: f64,
    q2: f64,
    rq: f64,
    params: &OscParams,
) -> Result<f64> {
    Ok(eval_terms(closed_terms(k, l)?, r2, q2, rq, params))
}

/// `W_00 Σ terms` at the invariants `r²`, `q²`, `r·q`.
pub fn eval_terms(terms: &[ClosedTerm], r2: f64, q2: f64, rq: f64, params: &OscParams) -> f64 {
    let (nu, hb) = (params.nu(), params.hbar());
    let rr = nu * nu * r2;
    let pp = q2 / (hb * hb * nu * nu);
    let rp2 = rq * rq / (hb * hb);
    let poly: f64 = terms.iter().map(|t| t.eval(rr, pp, rp2)).sum();
    poly * (-rr - pp).exp() / (PI * hb).powi(3)
}

/// Sparse polynomial in `(R, Pc, Ps)`: `r = (R, 0, 0)`, `P = (Pc, Ps, 0)`.
type Poly3 = BTreeMap<[u32; 3], GaussianRational>;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn poly_one() -> Poly3 {
    Poly3::from([([0; 3], GaussianRational::one())])
}

fn poly_mul(a: &Poly3, b: &Poly3) -> Poly3 {
    let mut out = Poly3::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
            *out.entry(e).or_insert_with(GaussianRational::zero) += &(ca * cb);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn poly_pow(a: &Poly3, n: u32) -> Poly3 {
    (0..n).fold(poly_one(), |acc, _| poly_mul(&acc, a))
}

/// `X + s i P` on Cartesian axis `axis` (only axes 0 and 1 carry variables).
fn linear(axis: usize, s: i64) -> Poly3 {
    let i = GaussianRational::new(BigRational::zero(), rat(s, 1));
    match axis {
        0 => Poly3::from([([1, 0, 0], GaussianRational::one()), ([0, 1, 0], i)]),
        1 => Poly3::from([([0, 0, 1], i)]),
        _ => Poly3::new(),
    }
}

/// `W_{n'n}` on one axis with the `√2`, `√(n!n'!)` and Gaussian factors
/// removed: `Σ_j (-1)^j (X-iP)^{n-j} (X+iP)^{n'-j} / (j! (n-j)! (n'-j)!)`.
fn axis_poly(axis: usize, n_prime: u32, n: u32) -> Poly3 {
    let mut out = Poly3::new();
    let minus = linear(axis, -1);
    let plus = linear(axis, 1);
    for j in 0..=n.min(n_prime) {
        let den = factorial(j) * factorial(n - j) * factorial(n_prime - j);
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let w = BigRational::new(BigInt::from(sign), den);
        let p = poly_mul(&poly_pow(&minus, n - j), &poly_pow(&plus, n_prime - j));
        for (e, c) in p {
            *out.entry(e).or_insert_with(GaussianRational::zero) += &c.scale(&w);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn triple_factorials(t: FeTriple) -> BigRational {
    BigRational::from_integer(t.as_array().iter().map(|&n| factorial(n)).product())
}

/// Exact expansion of `W_kl / W_00` in `R², P², (RP)²`.
///
/// Works for any shell; evaluation is restricted to the plane
/// `r = (R,0,0)`, `P = (Pc, Ps, 0)`, which loses nothing because `W_kl`
/// depends on the three invariants only. Terms are returned sorted by
/// `(a, b, c)`.
pub fn derive_closed_form(k: u32, l: u32) -> Result<Vec<(u32, u32, u32, BigRational)>> {
    let shell = degenerate_subspace(2 * k + l);
    let mut total = Poly3::new();
    for &t in &shell {
        for &tp in &shell {
            let d = d_coeff_exact(k, l, t, tp)?;
            if d.is_zero() {
                continue;
            }
            let weight = d
                .mul(&Surd::new(
                    triple_factorials(t) * triple_factorials(tp),
                    GaussianRational::one(),
                ))
                .to_rational()
                .ok_or_else(|| Error::Domain(format!("irrational weight for D{t}{tp}")))?;
            let mut term = Poly3::from([([0; 3], weight)]);
            for axis in 0..3 {
                let (n, np) = (t.as_array()[axis], tp.as_array()[axis]);
                term = poly_mul(&term, &axis_poly(axis, np, n));
            }
            for (e, c) in term {
                *total.entry(e).or_insert_with(GaussianRational::zero) += &c;
            }
        }
    }
    // restore the (√2)^degree factor
    let mut real = BTreeMap::new();
    for (e, c) in total {
        if c.is_zero() {
            continue;
        }
        let deg = e[0] + e[1] + e[2];
        if deg % 2 != 0 || !c.im.is_zero() {
            return Err(Error::Domain(format!("unexpected term {c} at {e:?}")));
        }
        real.insert(
            e,
            c.re * BigRational::from_integer(BigInt::one() << (deg / 2)),
        );
    }
    decompose(real)
}

/// Rewrites a polynomial in `(R, Pc, Ps)` over the basis
/// `R^{2a} (Pc²+Ps²)^b (R Pc)^{2c}` by peeling the highest `Ps` power.
fn decompose(mut p: BTreeMap<[u32; 3], BigRational>) -> Result<Vec<(u32, u32, u32, BigRational)>> {
    let mut out = Vec::new();
    while let Some((&e, c)) = p.iter().max_by_key(|(e, _)| (e[2], e[1], e[0])) {
        let c = c.clone();
        let [x, y, z] = e;
        if y % 2 != 0 || z % 2 != 0 || x < y || (x - y) % 2 != 0 {
            return Err(Error::Domain(format!(
                "monomial {e:?} is not rotation invariant"
            )));
        }
        let (a, b, cc) = ((x - y) / 2, z / 2, y / 2);
        // subtract c R^{2a+2cc} Pc^{2cc} (Pc² + Ps²)^b
        for j in 0..=b {
            let binom = crate::specfun::binomial(i64::from(b), i64::from(j));
            let key = [2 * a + 2 * cc, 2 * cc + 2 * (b - j), 2 * j];
            let entry = p.entry(key).or_insert_with(BigRational::zero);
            *entry -= &c * BigRational::from_integer(binom);
            if entry.is_zero() {
                p.remove(&key);
            }
        }
        out.push((a, b, cc, c));
    }
    out.sort_by_key(|t| (t.0, t.1, t.2));
    Ok(out)
}

fn merge(terms: &[ClosedTerm]) -> BTreeMap<(u32, u32, u32), BigRational> {
    let mut m = BTreeMap::new();
    for t in terms {
        *m.entry((t.a, t.b, t.c)).or_insert_with(BigRational::zero) += t.coefficient();
    }
    m.retain(|_, v| !v.is_zero());
    m
}

/// A coefficient where the quoted closed form disagrees with the derivation.
#[derive(Clone, Debug, PartialEq)]
pub struct Discrepancy {
    pub k: u32,
    pub l: u32,
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub printed: BigRational,
    pub derived: BigRational,
}

impl std::fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "W{}{}: coefficient of R^{} P^{} (RP)^{} quoted as {} but derives to {}",
            self.k,
            self.l,
            2 * self.a,
            2 * self.b,
            2 * self.c,
            self.printed,
            self.derived
        )
    }
}

/// Compares every quoted closed form with its exact derivation.
pub fn printed_discrepancies() -> Result<Vec<Discrepancy>> {
    let mut out = Vec::new();
    for (k, l) in [(0, 0), (0, 1), (0, 2), (1, 0), (0, 3), (1, 1)] {
        let printed = merge(printed_terms(k, l)?);
        let derived: BTreeMap<_, _> = derive_closed_form(k, l)?
            .into_iter()
            .map(|(a, b, c, v)| ((a, b, c), v))
            .collect();
        let keys: std::collections::BTreeSet<_> =
            printed.keys().chain(derived.keys()).copied().collect();
        for key in keys {
            let p = printed.get(&key).cloned().unwrap_or_else(BigRational::zero);
            let d = derived.get(&key).cloned().unwrap_or_else(BigRational::zero);
            if p != d {
                out.push(Discrepancy {
                    k,
                    l,
                    a: key.0,
                    b: key.1,
                    c: key.2,
                    printed: p,
                    derived: d,
                });
            }
        }
    }
    Ok(out)
}

/// Checks the shipped tables against the derivation; returns the largest
/// absolute coefficient difference.
pub fn shipped_table_deviation(k: u32, l: u32) -> Result<f64> {
    let shipped = merge(closed_terms(k, l)?);
    let derived: BTreeMap<_, _> = derive_closed_form(k, l)?
        .into_iter()
        .map(|(a, b, c, v)| ((a, b, c), v))
        .collect();
    let keys: std::collections::BTreeSet<_> =
        shipped.keys().chain(derived.keys()).copied().collect();
    Ok(keys
        .into_iter()
        .map(|key| {
            let s = shipped.get(&key).cloned().unwrap_or_else(BigRational::zero);
            let d = derived.get(&key).cloned().unwrap_or_else(BigRational::zero);
            (s - d).abs().to_f64().unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max))
}
