//! The 1-D oscillator: eigenfunctions, Wigner functions `W_{n'n}` and the
//! coalescence quasi-probabilities `P̂_{n'n}` of a Gaussian wave-packet pair.
//!
//! `W_{n'n}` follows the transform definition
//! `W_{n'n}(x,q) = ∫ dy/(2πħ) e^{iyq/ħ} φ_{n'}*(x + y/2) φ_n(x - y/2)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{assoc_laguerre, HalfInteger};

/// Oscillator and wave-packet scales.
///
/// `nu = sqrt(mω/ħ)` is the inverse oscillator length, `delta` the spatial
/// width of the wave packets. The ratio `zeta = 2 delta nu` is always derived.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct OscParams {
    nu: f64,
    delta: f64,
    hbar: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    nu: f64,
    delta: f64,
    hbar: f64,
    #[serde(default, skip_deserializing)]
    zeta: f64,
}

impl TryFrom<RawParams> for OscParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        OscParams::new(raw.nu, raw.delta, raw.hbar)
    }
}

impl From<OscParams> for RawParams {
    fn from(p: OscParams) -> Self {
        RawParams {
            nu: p.nu,
            delta: p.delta,
            hbar: p.hbar,
            zeta: p.zeta(),
        }
    }
}

impl Default for OscParams {
    /// Natural units `ħ = ν = 1` at the symmetric ratio `ζ = 1`.
    fn default() -> Self {
        Self {
            nu: 1.0,
            delta: 0.5,
            hbar: 1.0,
        }
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "{name} must be finite and > 0, got {v}"
        )))
    }
}

impl OscParams {
    pub fn new(nu: f64, delta: f64, hbar: f64) -> Result<Self> {
        check_positive("nu", nu)?;
        check_positive("delta", delta)?;
        check_positive("hbar", hbar)?;
        Ok(Self { nu, delta, hbar })
    }

    /// Parameters with a prescribed ratio `ζ`; the width becomes `ζ/(2ν)`.
    pub fn with_zeta(nu: f64, zeta: f64, hbar: f64) -> Result<Self> {
        check_positive("zeta", zeta)?;
        check_positive("nu", nu)?;
        Self::new(nu, zeta / (2.0 * nu), hbar)
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn zeta(&self) -> f64 {
        2.0 * self.delta * self.nu
    }

    /// Dimensionless position `ν x`.
    pub fn scaled_x(&self, x: f64) -> f64 {
        self.nu * x
    }

    /// Dimensionless momentum `q / (ħ ν)`.
    pub fn scaled_q(&self, q: f64) -> f64 {
        q / (self.hbar * self.nu)
    }
}

/// A point `(x, q)` of 1-D phase space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Phase1D {
    pub x: f64,
    pub q: f64,
}

impl Phase1D {
    pub fn new(x: f64, q: f64) -> Self {
        Self { x, q }
    }

    /// `u = 2 (q²/(ħ²ν²) + ν² x²)`.
    pub fn u(&self, params: &OscParams) -> f64 {
        let (xs, qs) = (params.scaled_x(self.x), params.scaled_q(self.q));
        2.0 * (xs * xs + qs * qs)
    }

    /// Polar angle of `(νx, q/(ħν))`; `tan = q/(ħν²x)`.
    pub fn zeta_angle(&self, params: &OscParams) -> f64 {
        params.scaled_q(self.q).atan2(params.scaled_x(self.x))
    }
}

/// Normalized eigenfunction `φ_n(x)`.
///
/// Evaluated through the recurrence of the normalized functions, which
/// avoids the `2^n n!` overflow of the Hermite form.
pub fn phi_n(n: u32, x: f64, params: &OscParams) -> f64 {
    let s = params.nu * x;
    let mut prev = (params.nu / PI.sqrt()).sqrt() * (-0.5 * s * s).exp();
    if n == 0 {
        return prev;
    }
    let mut cur = SQRT_2 * s * prev;
    for k in 2..=n {
        let k = f64::from(k);
        let next = (2.0 / k).sqrt() * s * cur - ((k - 1.0) / k).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// 1-D Wigner function `W_{n'n}(x, q)`.
///
/// For `n' <= n`:
/// `(-1)^{n'}/(πħ) sqrt(n'!/n!) (√2(νx - i q/(ħν)))^{n-n'} e^{-u/2} L_{n'}^{(n-n')}(u)`,
/// and `W_{n'n} = conj(W_{nn'})` otherwise. Real on the diagonal.
pub fn wigner_1d(n_prime: u32, n: u32, ph: Phase1D, params: &OscParams) -> Complex64 {
    if n_prime > n {
        return wigner_1d(n, n_prime, ph, params).conj();
    }
    let d = n - n_prime;
    let (xs, qs) = (params.scaled_x(ph.x), params.scaled_q(ph.q));
    let u = 2.0 * (xs * xs + qs * qs);
    let ratio = ((n_prime + 1)..=n).fold(1.0, |acc, j| acc / f64::from(j).sqrt());
    let sign = if n_prime.is_multiple_of(2) { 1.0 } else { -1.0 };
    let zbar = Complex64::new(SQRT_2 * xs, -SQRT_2 * qs);
    let lag = assoc_laguerre(n_prime, HalfInteger::from_int(d as i32), u);
    zbar.powu(d) * (sign * ratio * (-0.5 * u).exp() * lag / (PI * params.hbar))
}

/// Generating function
/// `G(α,β;x,q) = (1/πħ) exp(αβ - (νx - (α+β)/√2)² - (q/(ħν) + i(α-β)/√2)²)`.
///
/// `W_{n'n} = sqrt(n! n'!) [α^n β^{n'}] G`: the power of `α` carries the
/// unconjugated index. (Reading the powers the other way round produces
/// `conj(W_{n'n})`.)
pub fn wigner_1d_gen(
    alpha: Complex64,
    beta: Complex64,
    ph: Phase1D,
    params: &OscParams,
) -> Complex64 {
    let (xs, qs) = (params.scaled_x(ph.x), params.scaled_q(ph.q));
    let a = Complex64::new(xs, 0.0) - (alpha + beta) * FRAC_1_SQRT_2;
    let b = Complex64::new(qs, 0.0) + Complex64::i() * (alpha - beta) * FRAC_1_SQRT_2;
    (alpha * beta - a * a - b * b).exp() / (PI * params.hbar)
}

/// Truncated bivariate power series in `(α, β)`, `coeff[a][b]` of `α^a β^b`.
#[derive(Clone, Debug)]
pub(crate) struct Series2 {
    coeff: Vec<Vec<Complex64>>,
}

impl Series2 {
    fn one(max_a: usize, max_b: usize) -> Self {
        let mut coeff = vec![vec![Complex64::new(0.0, 0.0); max_b + 1]; max_a + 1];
        coeff[0][0] = Complex64::new(1.0, 0.0);
        Self { coeff }
    }

    fn max_a(&self) -> usize {
        self.coeff.len() - 1
    }

    fn max_b(&self) -> usize {
        self.coeff[0].len() - 1
    }

    /// `exp(c α^pa β^pb)` truncated to the same orders as `self`.
    fn exp_monomial(&self, c: Complex64, pa: usize, pb: usize) -> Self {
        let mut out = Self::one(self.max_a(), self.max_b());
        if c == Complex64::new(0.0, 0.0) {
            return out;
        }
        let mut term = Complex64::new(1.0, 0.0);
        for j in 1.. {
            let (a, b) = (j * pa, j * pb);
            if a > self.max_a() || b > self.max_b() {
                break;
            }
            term = term * c / j as f64;
            out.coeff[a][b] += term;
        }
        out
    }

    fn mul(&self, other: &Self) -> Self {
        let (ma, mb) = (self.max_a(), self.max_b());
        let mut out = vec![vec![Complex64::new(0.0, 0.0); mb + 1]; ma + 1];
        for a1 in 0..=ma {
            for b1 in 0..=mb {
                let x = self.coeff[a1][b1];
                if x == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for a2 in 0..=(ma - a1) {
                    for b2 in 0..=(mb - b1) {
                        out[a1 + a2][b1 + b2] += x * other.coeff[a2][b2];
                    }
                }
            }
        }
        Self { coeff: out }
    }

    /// `exp(q)` for the quadratic form
    /// `q = b_a α + b_b β + c_aa α² + c_ab αβ + c_bb β²`, truncated.
    pub(crate) fn exp_quadratic(max_a: usize, max_b: usize, q: &Quadratic) -> Self {
        let base = Self::one(max_a, max_b);
        [
            (q.b_a, 1, 0),
            (q.b_b, 0, 1),
            (q.c_aa, 2, 0),
            (q.c_ab, 1, 1),
            (q.c_bb, 0, 2),
        ]
        .iter()
        .fold(base.clone(), |acc, &(c, pa, pb)| {
            acc.mul(&base.exp_monomial(c, pa, pb))
        })
    }

    pub(crate) fn get(&self, a: usize, b: usize) -> Complex64 {
        self.coeff[a][b]
    }
}

/// Linear and quadratic coefficients of a quadratic form in `(α, β)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Quadratic {
    pub b_a: Complex64,
    pub b_b: Complex64,
    pub c_aa: Complex64,
    pub c_ab: Complex64,
    pub c_bb: Complex64,
}

/// The exponent of the quasi-probability generating function
/// `I(α,β; r, p) = 2ζ/(1+ζ²) exp(-v_i + quadratic(α, β))`.
///
/// With `R = νr`, `P = p/(νħ)`:
/// `v_i = (R² + ζ² P²)/(1+ζ²)`, linear terms `√2(R ∓ iζ²P)/(1+ζ²)` for `α`/`β`,
/// `α²`,`β²` terms `(ζ²-1)/(2(1+ζ²))` and no `αβ` term.
fn quasi_prob_exponent(r: f64, p: f64, params: &OscParams) -> (f64, f64, Quadratic) {
    let zeta = params.zeta();
    let z2 = zeta * zeta;
    let den = 1.0 + z2;
    let rr = params.scaled_x(r);
    let pp = params.scaled_q(p);
    let v = (rr * rr + z2 * pp * pp) / den;
    let lin_re = SQRT_2 * rr / den;
    let lin_im = SQRT_2 * z2 * pp / den;
    let quad = Complex64::new((z2 - 1.0) / (2.0 * den), 0.0);
    let q = Quadratic {
        b_a: Complex64::new(lin_re, -lin_im),
        b_b: Complex64::new(lin_re, lin_im),
        c_aa: quad,
        c_ab: Complex64::new(0.0, 0.0),
        c_bb: quad,
    };
    (2.0 * zeta / den, v, q)
}

/// `v_i = (ν²r² + ζ² p²/(ħ²ν²))/(1+ζ²)`, the exponent of `P̂_00`.
pub fn v_i(r: f64, p: f64, params: &OscParams) -> f64 {
    quasi_prob_exponent(r, p, params).1
}

/// All `P̂_{n'n}` for `n', n <= nmax` at one `(r, p)`, indexed `[n'][n]`.
pub fn quasi_prob_matrix(nmax: u32, r: f64, p: f64, params: &OscParams) -> Vec<Vec<Complex64>> {
    let (pref, v, q) = quasi_prob_exponent(r, p, params);
    let n = nmax as usize;
    let series = Series2::exp_quadratic(n, n, &q);
    let fact: Vec<f64> = (0..=n)
        .scan(1.0, |acc, j| {
            if j > 0 {
                *acc *= j as f64;
            }
            Some(*acc)
        })
        .collect();
    let scale = pref * (-v).exp();
    (0..=n)
        .map(|a| {
            (0..=n)
                .map(|b| series.get(a, b) * (fact[a] * fact[b]).sqrt() * scale)
                .collect()
        })
        .collect()
}

/// Quasi-probability `P̂_{n'n}(r_i, p_i) = sqrt(n! n'!) [α^{n'} β^n] I`.
///
/// The coefficient comes from exact truncated power-series exponentiation
/// of the quadratic exponent; no numerical differentiation is involved.
/// Any `ζ > 0` is supported. `P̂_{n'n}` is the kernel overlap of `W_{n n'}`.
pub fn quasi_prob(n_prime: u32, n: u32, r: f64, p: f64, params: &OscParams) -> Complex64 {
    let (pref, v, q) = quasi_prob_exponent(r, p, params);
    let series = Series2::exp_quadratic(n_prime as usize, n as usize, &q);
    let fact = |k: u32| (1..=k).fold(1.0, |acc, j| acc * f64::from(j));
    series.get(n_prime as usize, n as usize) * (fact(n) * fact(n_prime)).sqrt() * pref * (-v).exp()
}

/// Closed form of `P̂_{n'n}` at `ζ = 1`:
/// `e^{-v}/sqrt(n!n'!) ((νr + ip/(νħ))/√2)^n ((νr - ip/(νħ))/√2)^{n'}`.
pub fn quasi_prob_zeta1(
    n_prime: u32,
    n: u32,
    r: f64,
    p: f64,
    params: &OscParams,
) -> Result<Complex64> {
    if (params.zeta() - 1.0).abs() > 1e-12 {
        return Err(Error::Parameter(format!(
            "closed form requires zeta = 1, got {}",
            params.zeta()
        )));
    }
    let rr = params.scaled_x(r);
    let pp = params.scaled_q(p);
    let w = Complex64::new(rr, pp) * FRAC_1_SQRT_2;
    let v = 0.5 * (rr * rr + pp * pp);
    let fact = |k: u32| (1..=k).fold(1.0, |acc, j| acc * f64::from(j));
    Ok(w.powu(n) * w.conj().powu(n_prime) * (-v).exp() / (fact(n) * fact(n_prime)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::hermite;
    use crate::specfun::quadrature::{gauss_hermite, shifted_hermite};
    use proptest::prelude::*;

    fn p(nu: f64, zeta: f64, hbar: f64) -> OscParams {
        OscParams::with_zeta(nu, zeta, hbar).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(OscParams::new(0.0, 1.0, 1.0).is_err());
        assert!(OscParams::new(1.0, -1.0, 1.0).is_err());
        assert!(OscParams::new(1.0, 1.0, f64::NAN).is_err());
        let q = OscParams::with_zeta(2.0, 3.0, 1.0).unwrap();
        assert!((q.zeta() - 3.0).abs() < 1e-15);
        assert!((q.delta() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn params_json_carries_zeta_and_validates() {
        let js = serde_json::to_string(&OscParams::default()).unwrap();
        assert!(js.contains("\"zeta\":1.0"));
        let back: OscParams = serde_json::from_str(&js).unwrap();
        assert_eq!(back, OscParams::default());
        assert!(serde_json::from_str::<OscParams>(r#"{"nu":-1,"delta":1,"hbar":1}"#).is_err());
    }

    #[test]
    fn phi_examples() {
        let unit = OscParams::default();
        assert!((phi_n(0, 0.0, &unit) - 0.7511255445).abs() < 1e-10);
        assert_eq!(phi_n(1, 0.0, &p(1.7, 1.0, 1.0)), 0.0);
    }

    #[test]
    fn phi_matches_hermite_form_and_is_normalized() {
        let params = p(1.3, 1.0, 1.0);
        let nu = params.nu();
        let fact = |k: u32| (1..=k).fold(1.0, |a, j| a * f64::from(j));
        let hermite_form = |n: u32, x: f64| {
            (nu / (2f64.powi(n as i32) * fact(n) * PI.sqrt())).sqrt()
                * hermite(n, nu * x)
                * (-0.5 * nu * nu * x * x).exp()
        };
        for n in 0..=8 {
            for x in [-1.1, 0.0, 0.7, 2.3] {
                assert!((phi_n(n, x, &params) - hermite_form(n, x)).abs() < 1e-13);
            }
        }
        // ∫φ_3² = 1: φ_3² e^{+ν²x²} is a polynomial of degree 6
        let norm: f64 = gauss_hermite(10)
            .iter()
            .map(|&(s, w)| {
                let x = s / nu;
                w * phi_n(3, x, &params).powi(2) * (s * s).exp() / nu
            })
            .sum();
        assert!((norm - 1.0).abs() < 1e-13);
        let v = phi_n(3, 0.7, &params);
        assert!((v - hermite_form(3, 0.7)).abs() < 1e-14);
    }

    #[test]
    fn wigner_ground_state_peak() {
        let w = wigner_1d(0, 0, Phase1D::new(0.0, 0.0), &OscParams::default());
        assert!((w.re - std::f64::consts::FRAC_1_PI).abs() < 1e-15);
        assert_eq!(w.im, 0.0);
    }

    /// Direct numerical evaluation of the transform integral.
    fn wigner_transform_oracle(np: u32, n: u32, ph: Phase1D, params: &OscParams) -> Complex64 {
        // integrand: e^{iyq/ħ} φ_{n'}(x+y/2) φ_n(x-y/2); the product carries
        // e^{-ν²x² - ν²y²/4}; substitute y = 2s/ν and use weight e^{-s²}.
        let nu = params.nu();
        let hb = params.hbar();
        let mut acc = Complex64::new(0.0, 0.0);
        for &(s, w) in &gauss_hermite(80) {
            let y = 2.0 * s / nu;
            let f = phi_n(np, ph.x + y / 2.0, params) * phi_n(n, ph.x - y / 2.0, params);
            let phase = Complex64::from_polar(1.0, y * ph.q / hb);
            acc += phase * f * (s * s).exp() * w * 2.0 / nu;
        }
        acc / (2.0 * PI * hb)
    }

    #[test]
    fn wigner_matches_transform_integral() {
        let unit = OscParams::default();
        let ph = Phase1D::new(0.4, -0.8);
        let w = wigner_1d(2, 1, ph, &unit);
        let o = wigner_transform_oracle(2, 1, ph, &unit);
        assert!((w - o).norm() < 1e-10, "{w} vs {o}");
        let params = p(1.4, 0.7, 0.8);
        for np in 0..=4 {
            for n in 0..=4 {
                for &(x, q) in &[(0.3, 0.2), (-0.5, 0.9), (0.0, -0.4)] {
                    let ph = Phase1D::new(x, q);
                    let w = wigner_1d(np, n, ph, &params);
                    let o = wigner_transform_oracle(np, n, ph, &params);
                    assert!((w - o).norm() < 1e-10, "({np},{n}) {w} vs {o}");
                }
            }
        }
    }

    #[test]
    fn wigner_hermiticity() {
        let params = p(0.9, 1.0, 1.2);
        let ph = Phase1D::new(0.3, -1.1);
        for np in 0..=5 {
            for n in 0..=5 {
                let a = wigner_1d(np, n, ph, &params);
                let b = wigner_1d(n, np, ph, &params).conj();
                assert!((a - b).norm() < 1e-15);
            }
        }
        assert_eq!(wigner_1d(3, 3, ph, &params).im, 0.0);
    }

    #[test]
    fn wigner_normalization() {
        let params = p(1.2, 1.0, 0.7);
        let (nu, hb) = (params.nu(), params.hbar());
        let rule = gauss_hermite(12);
        for n in 0..=4 {
            let mut acc = 0.0;
            for &(s, ws) in &rule {
                for &(t, wt) in &rule {
                    let ph = Phase1D::new(s / nu, t * hb * nu);
                    let w = wigner_1d(n, n, ph, &params).re;
                    acc += ws * wt * w * (s * s + t * t).exp() * hb;
                }
            }
            assert!((acc - 1.0).abs() < 1e-10, "n={n}: {acc}");
        }
    }

    /// Taylor coefficient by the discrete Cauchy integral on |α| = |β| = ρ.
    fn cauchy_coefficient(
        a: u32,
        b: u32,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Complex64 {
        let m = 48;
        let rho = 0.5;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..m {
            for k in 0..m {
                let ta = 2.0 * PI * j as f64 / m as f64;
                let tb = 2.0 * PI * k as f64 / m as f64;
                let al = Complex64::from_polar(rho, ta);
                let be = Complex64::from_polar(rho, tb);
                acc += f(al, be) / (al.powu(a) * be.powu(b));
            }
        }
        acc / (m * m) as f64
    }

    #[test]
    fn generating_function_reproduces_wigner() {
        let params = OscParams::default();
        let ph0 = Phase1D::new(0.0, 0.0);
        let g0 = wigner_1d_gen(
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            ph0,
            &params,
        );
        assert!((g0.re - 1.0 / PI).abs() < 1e-15);
        let ph = Phase1D::new(0.4, -0.8);
        let c00 = cauchy_coefficient(0, 0, |a, b| wigner_1d_gen(a, b, ph, &params));
        assert!((c00 - wigner_1d(0, 0, ph, &params)).norm() < 1e-12);
        // W_{2,1}: α carries n = 1, β carries n' = 2
        let c = cauchy_coefficient(1, 2, |a, b| wigner_1d_gen(a, b, ph, &params));
        let w21 = c * (2.0f64).sqrt();
        assert!((w21 - wigner_1d(2, 1, ph, &params)).norm() < 1e-12, "{w21}");
        // the other reading gives the conjugate
        let c_swapped = cauchy_coefficient(2, 1, |a, b| wigner_1d_gen(a, b, ph, &params));
        assert!((c_swapped * 2f64.sqrt() - wigner_1d(2, 1, ph, &params).conj()).norm() < 1e-12);
    }

    #[test]
    fn quasi_prob_ground_state() {
        for zeta in [0.25, 0.5, 1.0, 2.0, 3.0] {
            let params = p(1.3, zeta, 0.9);
            let (r, pm) = (0.7, -1.2);
            let rr = params.scaled_x(r);
            let pp = params.scaled_q(pm);
            // corrected exponent: ζ² multiplies the momentum term
            let v = (rr * rr + zeta * zeta * pp * pp) / (1.0 + zeta * zeta);
            let expected = 2.0 * zeta / (1.0 + zeta * zeta) * (-v).exp();
            let got = quasi_prob(0, 0, r, pm, &params);
            assert!((got.re - expected).abs() < 1e-15 && got.im == 0.0);
        }
    }

    #[test]
    fn quasi_prob_p11_closed_form() {
        let params = p(1.0, 2.0, 1.0);
        let (r, pm) = (1.0, 0.5);
        let z = 2.0f64;
        let p00 = quasi_prob(0, 0, r, pm, &params).re;
        let expected = p00 * 2.0 * (pm * pm * z.powi(4) + r * r) / (1.0 + z * z).powi(2);
        let got = quasi_prob(1, 1, r, pm, &params);
        assert!((got.re - expected).abs() < 1e-15);
        // P̂_01 and P̂_10 closed forms
        let p01 = p00 * SQRT_2 / (1.0 + z * z) * Complex64::new(r, pm * z * z);
        assert!((quasi_prob(0, 1, r, pm, &params) - p01).norm() < 1e-15);
        assert!((quasi_prob(1, 0, r, pm, &params) - p01.conj()).norm() < 1e-15);
    }

    #[test]
    fn zeta1_closed_form_examples() {
        let params = OscParams::default();
        let v = |r: f64, q: f64| 0.5 * (r * r + q * q);
        let got = quasi_prob_zeta1(0, 0, 0.3, 0.4, &params).unwrap();
        assert!((got.re - (-v(0.3, 0.4)).exp()).abs() < 1e-15);
        for n in 1..=4 {
            assert_eq!(
                quasi_prob_zeta1(n, n, 0.0, 0.0, &params).unwrap().norm(),
                0.0
            );
        }
        // (2,2) at r = p = 1: e^{-v} v^2 / 2! with v = 1
        let got = quasi_prob_zeta1(2, 2, 1.0, 1.0, &params).unwrap();
        assert!((got.re - 0.1839397206).abs() < 1e-10);
        let series = quasi_prob(2, 2, 1.0, 1.0, &params);
        assert!((got - series).norm() < 1e-15);
        assert!(quasi_prob_zeta1(0, 0, 0.0, 0.0, &p(1.0, 2.0, 1.0)).is_err());
    }

    #[test]
    fn series_matches_zeta1_closed_form() {
        let params = p(0.8, 1.0, 1.3);
        for &(r, pm) in &[(0.0, 0.0), (0.4, -0.3), (1.7, 2.2), (-2.0, 0.5)] {
            for np in 0..=4 {
                for n in 0..=4 {
                    let a = quasi_prob(np, n, r, pm, &params);
                    let b = quasi_prob_zeta1(np, n, r, pm, &params).unwrap();
                    assert!((a - b).norm() < 1e-12, "({np},{n}) at ({r},{pm})");
                }
            }
        }
    }

    #[test]
    fn matrix_agrees_with_single_entries() {
        let params = p(1.1, 0.6, 1.0);
        let m = quasi_prob_matrix(3, 0.5, -0.9, &params);
        for a in 0..=3 {
            for b in 0..=3 {
                assert!(
                    (m[a as usize][b as usize] - quasi_prob(a, b, 0.5, -0.9, &params)).norm()
                        < 1e-15
                );
            }
        }
    }

    /// 2-D quadrature overlap of W_{n'n} with the wave-packet kernel
    /// `2 e^{-(x-r)²/4δ²} e^{-4δ²(k-p)²/ħ²}`.
    fn kernel_overlap(np: u32, n: u32, r: f64, pm: f64, params: &OscParams) -> Complex64 {
        let (nu, d, hb) = (params.nu(), params.delta(), params.hbar());
        // x: e^{-ν²x² - (x-r)²/4δ²};  k: e^{-k²/ħ²ν² - 4δ²(k-p)²/ħ²}
        let ax = nu * nu + 1.0 / (4.0 * d * d);
        let x0 = r / (4.0 * d * d) / ax;
        let ak = 1.0 / (hb * hb * nu * nu) + 4.0 * d * d / (hb * hb);
        let k0 = 4.0 * d * d * pm / (hb * hb) / ak;
        let xs = shifted_hermite(12, ax, x0);
        let ks = shifted_hermite(12, ak, k0);
        let mut acc = Complex64::new(0.0, 0.0);
        for &(x, wx) in &xs {
            for &(k, wk) in &ks {
                let kernel = (-(x - r).powi(2) / (4.0 * d * d)
                    - 4.0 * d * d * (k - pm).powi(2) / (hb * hb))
                    .exp();
                let weight_inv = (ax * (x - x0).powi(2) + ak * (k - k0).powi(2)).exp();
                acc += wigner_1d(np, n, Phase1D::new(x, k), params)
                    * 2.0
                    * kernel
                    * weight_inv
                    * wx
                    * wk;
            }
        }
        acc
    }

    #[test]
    fn quasi_prob_is_transposed_kernel_overlap() {
        for zeta in [0.5, 1.0, 2.0] {
            let params = p(1.2, zeta, 0.9);
            for np in 0..=3 {
                for n in 0..=3 {
                    let o = kernel_overlap(n, np, 0.6, -0.4, &params);
                    let q = quasi_prob(np, n, 0.6, -0.4, &params);
                    assert!((o - q).norm() < 1e-12, "zeta={zeta} ({np},{n}): {o} vs {q}");
                }
            }
        }
    }

    #[test]
    fn phase_space_sum_rule() {
        for zeta in [0.5, 1.0, 2.0] {
            let params = p(0.9, zeta, 1.1);
            let (nu, hb) = (params.nu(), params.hbar());
            let z2 = zeta * zeta;
            // P̂_nn ∝ e^{-R²/(1+ζ²) - ζ²P²/(1+ζ²)}
            let ar = nu * nu / (1.0 + z2);
            let ap = z2 / ((1.0 + z2) * hb * hb * nu * nu);
            let rs = shifted_hermite(10, ar, 0.0);
            let ps = shifted_hermite(10, ap, 0.0);
            for n in 0..=3 {
                let mut acc = 0.0;
                for &(r, wr) in &rs {
                    for &(pm, wp) in &ps {
                        let val = quasi_prob(n, n, r, pm, &params).re;
                        acc += wr * wp * val * (ar * r * r + ap * pm * pm).exp();
                    }
                }
                assert!(
                    (acc - 2.0 * PI * hb).abs() < 1e-8,
                    "n={n} zeta={zeta}: {acc}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn quasi_prob_hermiticity(np in 0u32..=4, n in 0u32..=4, r in -3.0f64..3.0,
                                  pm in -3.0f64..3.0, zeta in 0.2f64..5.0) {
            let params = p(1.0, zeta, 1.0);
            let a = quasi_prob(np, n, r, pm, &params);
            let b = quasi_prob(n, np, r, pm, &params).conj();
            prop_assert!((a - b).norm() <= 1e-14 * (1.0 + a.norm()));
        }

        #[test]
        fn zeta_inversion(n in 0u32..=3, rho in -2.5f64..2.5, pi_t in -2.5f64..2.5,
                          zeta in prop::sample::select(vec![0.25, 0.5, 2.0, 4.0])) {
            // dimensionless: r = ρ/ν, p = π̃ νħ with ν = ħ = 1
            let a = quasi_prob(n, n, rho, pi_t, &p(1.0, zeta, 1.0));
            let b = quasi_prob(n, n, pi_t, rho, &p(1.0, 1.0 / zeta, 1.0));
            prop_assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }
}
