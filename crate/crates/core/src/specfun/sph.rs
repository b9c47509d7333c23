use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Normalized associated Legendre values `N_lm P_l^m(cos θ)` for one `m >= 0`
/// and all `l` in `m..=lmax`, Condon–Shortley phase included.
fn normalized_legendre_column(lmax: u32, m: u32, x: f64, s: f64) -> Vec<f64> {
    // diagonal term
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for j in 1..=m {
        let j = f64::from(j);
        pmm *= -((2.0 * j + 1.0) / (2.0 * j)).sqrt() * s;
    }
    let mut out = vec![pmm];
    if lmax == m {
        return out;
    }
    let mut prev = pmm;
    let mut cur = (2.0 * f64::from(m) + 3.0).sqrt() * x * pmm;
    out.push(cur);
    let mf = f64::from(m);
    for l in (m + 2)..=lmax {
        let lf = f64::from(l);
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
        let next = a * (x * cur - b * prev);
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// Spherical harmonic `Y_l^m(θ, φ)` in the phase convention used throughout
/// this crate: Condon–Shortley sign in the Legendre factor and azimuthal
/// factor `e^{-imφ}`.
///
/// This is the complex conjugate of the textbook `e^{+imφ}` form; it is the
/// convention under which the expansion coefficients take their tabulated
/// values (e.g. `C_{0,1,1;0,1,0} = i/√2`). It still satisfies
/// `conj(Y_l^m) = (-1)^m Y_l^{-m}`.
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    if m.unsigned_abs() > l {
        return Err(Error::QuantumNumbers(format!(
            "|m| = {} > l = {l}",
            m.abs()
        )));
    }
    let am = m.unsigned_abs();
    let col = normalized_legendre_column(l, am, theta.cos(), theta.sin());
    let p = col[(l - am) as usize];
    let sign = if m < 0 && am % 2 == 1 { -1.0 } else { 1.0 };
    Ok(Complex64::from_polar(sign * p, -f64::from(m) * phi))
}

/// All `Y_l^m` for `m = -l..=l`, index `m + l`.
pub fn spherical_harmonics_all_m(l: u32, theta: f64, phi: f64) -> Vec<Complex64> {
    let (x, s) = (theta.cos(), theta.sin());
    let li = l as i32;
    let mut out = vec![Complex64::new(0.0, 0.0); (2 * l + 1) as usize];
    for am in 0..=l {
        let p = normalized_legendre_column(l, am, x, s)[(l - am) as usize];
        let ym = Complex64::from_polar(p, -f64::from(am) * phi);
        out[(li + am as i32) as usize] = ym;
        if am > 0 {
            let sign = if am % 2 == 1 { -1.0 } else { 1.0 };
            out[(li - am as i32) as usize] = ym.conj() * sign;
        }
    }
    out
}
