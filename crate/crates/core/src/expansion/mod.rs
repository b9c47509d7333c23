//! Expansion of angular-momentum eigenstates `Ψ_klm` over factorized
//! eigenstates `Φ_{n1 n2 n3}`:
//! `Ψ_klm = Σ C_{klm,n1n2n3} Φ_{n1n2n3}` within one energy shell.
//!
//! Coefficients are computed exactly. With `a = n1-2j1`, `b = n2-2j2`,
//! `c = n3-2j3` and `κ = (l+m-n3)/2`:
//!
//! ```text
//! C = (-1)^k sqrt(R) S
//! R = (2l+1) 2^{k-l-N} n1! n2! n3! k! (l-m)! (l+m)! / (2k+2l+1)!!
//! S = Σ_{j1+j2+j3=k} 2^c i^b / (j1! j2! j3! a! b! c!)
//!       Σ_ρ (-1)^ρ binom(a, ρ) binom(b, κ+j3-ρ)
//! ```

mod cache;
mod oracle;
mod table;
mod types;

pub use cache::{CoeffCache, DMatrix, StateVector};
pub use oracle::coeff_oracle;
pub use table::reference_table;
pub use types::{degenerate_subspace, Ame, ExactCoeff, FeTriple};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::specfun::{
    binomial, double_factorial, factorial, gauss_2f1_neg1, GaussianRational, Surd,
};

fn pow2(e: i64) -> BigRational {
    let p = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

fn int(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

/// The selection rules: equal energy and even `l + m - n3`.
pub fn selection_allows(state: Ame, triple: FeTriple) -> bool {
    state.energy() == triple.energy()
        && (i64::from(state.l) + i64::from(state.m) - i64::from(triple.n3)) % 2 == 0
}

/// Exact `C_{klm,n1n2n3}`; zero when a selection rule fails.
pub fn coeff(state: Ame, triple: FeTriple) -> ExactCoeff {
    if !selection_allows(state, triple) {
        return ExactCoeff::zero();
    }
    let (k, l, m) = (i64::from(state.k), i64::from(state.l), i64::from(state.m));
    let [n1, n2, n3] = triple.as_array().map(i64::from);
    let n = n1 + n2 + n3;
    let kappa = (l + m - n3) / 2;
    let f = |x: i64| factorial(x as u32);

    let radicand = int(BigInt::from(2 * l + 1))
        * pow2(k - l - n)
        * int(f(n1) * f(n2) * f(n3) * f(k) * f(l - m) * f(l + m))
        / int(double_factorial(2 * k + 2 * l + 1));

    let mut s = GaussianRational::zero();
    for j1 in 0..=k.min(n1 / 2) {
        for j2 in 0..=(k - j1).min(n2 / 2) {
            let j3 = k - j1 - j2;
            if 2 * j3 > n3 {
                continue;
            }
            let (a, b, c) = (n1 - 2 * j1, n2 - 2 * j2, n3 - 2 * j3);
            let top = kappa + j3;
            if top < 0 {
                continue;
            }
            let inner: BigInt = (0..=top)
                .map(|rho| {
                    let t = binomial(a, rho) * binomial(b, top - rho);
                    if rho % 2 == 0 {
                        t
                    } else {
                        -t
                    }
                })
                .sum();
            if inner.is_zero() {
                continue;
            }
            let weight = pow2(c) * int(inner) / int(f(j1) * f(j2) * f(j3) * f(a) * f(b) * f(c));
            s += &GaussianRational::i_pow(b).scale(&weight);
        }
    }
    let sign = if k % 2 == 0 { 1 } else { -1 };
    ExactCoeff::new(sign, radicand, s).unwrap_or_else(|_| ExactCoeff::zero())
}

/// Closed form for `k = 0`:
/// `sqrt((l+m)!(l-m)! / (2^{2l} n1!n2!n3! (2l-1)!!)) 2^{n3} i^{n2}
///  binom(n2, κ) 2F1(-κ, -n1; 1-κ+n2; -1)`.
///
/// When `κ > n2` the product `binom(n2, κ) 2F1` is `0 × pole`; its limit is the
/// terminating sum `Σ_ρ (-1)^ρ binom(n1, ρ) binom(n2, κ-ρ)`, used in that case.
pub fn coeff_k0(state: Ame, triple: FeTriple) -> Result<ExactCoeff> {
    if state.k != 0 {
        return Err(Error::QuantumNumbers(format!(
            "closed k = 0 form called with k = {}",
            state.k
        )));
    }
    if !selection_allows(state, triple) {
        return Ok(ExactCoeff::zero());
    }
    let (l, m) = (i64::from(state.l), i64::from(state.m));
    let [n1, n2, n3] = triple.as_array().map(i64::from);
    let kappa = (l + m - n3) / 2;
    if kappa < 0 {
        return Ok(ExactCoeff::zero());
    }
    let f = |x: i64| factorial(x as u32);
    let radicand = int(f(l + m) * f(l - m))
        / (pow2(2 * l) * int(f(n1) * f(n2) * f(n3) * double_factorial(2 * l - 1)));
    let hyper = if kappa <= n2 {
        int(binomial(n2, kappa)) * gauss_2f1_neg1(-kappa, -n1, &int(BigInt::from(1 - kappa + n2)))?
    } else {
        int((0..=kappa)
            .map(|rho| {
                let t = binomial(n1, rho) * binomial(n2, kappa - rho);
                if rho % 2 == 0 {
                    t
                } else {
                    -t
                }
            })
            .sum())
    };
    let s = GaussianRational::i_pow(n2).scale(&(pow2(n3) * hyper));
    ExactCoeff::new(1, radicand, s)
}

/// Exact m-averaged bilinear
/// `D_kl(t, t') = 1/(2l+1) Σ_m conj(C_{klm,t'}) C_{klm,t}`.
pub fn d_coeff_exact(k: u32, l: u32, t: FeTriple, t_prime: FeTriple) -> Result<Surd> {
    let mut acc = Surd::zero();
    for m in -(l as i32)..=(l as i32) {
        let state = Ame { k, l, m };
        let term = coeff(state, t_prime)
            .to_surd()
            .conj()
            .mul(&coeff(state, t).to_surd());
        acc = acc.checked_add(&term).ok_or_else(|| {
            Error::Domain(format!(
                "incommensurate radicands summing D_{k}{l}{t}{t_prime}"
            ))
        })?;
    }
    let inv = BigRational::new(BigInt::one(), BigInt::from(2 * l + 1));
    Ok(Surd::new(acc.radicand.clone(), acc.value.scale(&inv)))
}

/// `D_kl(t, t')` in floating point, served from the global cache.
pub fn d_coeff(k: u32, l: u32, t: FeTriple, t_prime: FeTriple) -> Complex64 {
    CoeffCache::global().d_matrix(k, l).get(t, t_prime)
}

/// Exact inner product `Σ_t conj(C_{a,t}) C_{b,t}` over the shell of `a`.
pub fn inner_product_exact(a: Ame, b: Ame) -> Result<Surd> {
    let mut acc = Surd::zero();
    if a.energy() != b.energy() {
        return Ok(acc);
    }
    for t in degenerate_subspace(a.energy()) {
        let term = coeff(a, t).to_surd().conj().mul(&coeff(b, t).to_surd());
        acc = acc
            .checked_add(&term)
            .ok_or_else(|| Error::Domain(format!("incommensurate radicands in <{a}|{b}>")))?;
    }
    Ok(acc)
}
