use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{split_square, GaussianRational, Surd};

/// Angular-momentum eigenstate label `(k, l, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ame {
    pub k: u32,
    pub l: u32,
    pub m: i32,
}

impl Ame {
    pub fn new(k: u32, l: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > l {
            return Err(Error::QuantumNumbers(format!(
                "|m| = {} exceeds l = {l}",
                m.abs()
            )));
        }
        Ok(Self { k, l, m })
    }

    /// Energy quantum number `N = 2k + l`.
    pub fn energy(&self) -> u32 {
        2 * self.k + self.l
    }

    /// All `(k, l, m)` with `2k + l = n`, ordered by `k` then `m` descending.
    pub fn shell(n: u32) -> Vec<Ame> {
        let mut out = Vec::new();
        for k in 0..=n / 2 {
            let l = n - 2 * k;
            for m in (-(l as i32)..=l as i32).rev() {
                out.push(Ame { k, l, m });
            }
        }
        out
    }
}

impl fmt::Display for Ame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(k={}, l={}, m={})", self.k, self.l, self.m)
    }
}

/// Factorized-eigenstate label `(n1, n2, n3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FeTriple {
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
}

impl FeTriple {
    pub fn new(n1: u32, n2: u32, n3: u32) -> Self {
        Self { n1, n2, n3 }
    }

    pub fn energy(&self) -> u32 {
        self.n1 + self.n2 + self.n3
    }

    pub fn as_array(&self) -> [u32; 3] {
        [self.n1, self.n2, self.n3]
    }
}

impl fmt::Display for FeTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n1, self.n2, self.n3)
    }
}

/// All triples with `n1 + n2 + n3 = n`, in ascending lexicographic order.
pub fn degenerate_subspace(n: u32) -> Vec<FeTriple> {
    let mut out = Vec::with_capacity(((n + 1) * (n + 2) / 2) as usize);
    for n1 in 0..=n {
        for n2 in 0..=(n - n1) {
            out.push(FeTriple::new(n1, n2, n - n1 - n2));
        }
    }
    out
}

/// An exact coefficient `sign * sqrt(radicand) * s_sum`.
///
/// Values built through [`ExactCoeff::new`] are canonical: the radicand is
/// square-free (as far as small primes go), and the sign is chosen so that
/// the first nonzero component of `s_sum` is positive. Zero is stored with
/// radicand 0. Equality compares values, not representations.
#[derive(Clone, Debug)]
pub struct ExactCoeff {
    pub s_sum: GaussianRational,
    pub radicand: BigRational,
    pub sign: i8,
}

impl ExactCoeff {
    pub fn new(sign: i8, radicand: BigRational, s_sum: GaussianRational) -> Result<Self> {
        if radicand.is_negative() {
            return Err(Error::Domain(format!("negative radicand {radicand}")));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::Domain(format!("sign must be +1 or -1, got {sign}")));
        }
        Ok(Self {
            s_sum,
            radicand,
            sign,
        }
        .canonical())
    }

    pub fn zero() -> Self {
        Self {
            s_sum: GaussianRational::zero(),
            radicand: BigRational::zero(),
            sign: 1,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.s_sum.is_zero() || self.radicand.is_zero()
    }

    fn canonical(self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let (root, rest) = split_square(&self.radicand);
        let mut s = self.s_sum.scale(&root);
        if self.sign < 0 {
            s = -s;
        }
        let leading_negative = if s.re.is_zero() {
            s.im.is_negative()
        } else {
            s.re.is_negative()
        };
        let sign = if leading_negative {
            s = -s;
            -1
        } else {
            1
        };
        Self {
            s_sum: s,
            radicand: rest,
            sign,
        }
    }

    pub fn to_surd(&self) -> Surd {
        if self.is_zero() {
            return Surd::zero();
        }
        let v = if self.sign < 0 {
            -self.s_sum.clone()
        } else {
            self.s_sum.clone()
        };
        Surd::new(self.radicand.clone(), v)
    }

    pub fn to_complex(&self) -> Complex64 {
        self.to_surd().to_complex()
    }

    /// `|C|²`, always rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.radicand * self.s_sum.norm_sqr()
    }
}

impl PartialEq for ExactCoeff {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (self.clone().canonical(), other.clone().canonical());
        a.sign == b.sign && a.radicand == b.radicand && a.s_sum == b.s_sum
    }
}

impl Eq for ExactCoeff {}

impl fmt::Display for ExactCoeff {
    /// `sign*sqrt(p/q)*(a/b + c/d i)`, e.g. `-1*sqrt(2/1)*(1/2 + 0/1 i)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.sign < 0 { "-1" } else { "+1" };
        write!(
            f,
            "{sign}*sqrt({}/{})*({})",
            self.radicand.numer(),
            self.radicand.denom(),
            self.s_sum
        )
    }
}

impl FromStr for ExactCoeff {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("malformed exact coefficient `{s}`"));
        let s = s.trim();
        let (sign, rest) = s.split_once("*sqrt(").ok_or_else(bad)?;
        let sign = match sign.trim() {
            "+1" | "1" | "+" => 1,
            "-1" | "-" => -1,
            _ => return Err(bad()),
        };
        let (rad, rest) = rest.split_once(")*(").ok_or_else(bad)?;
        let body = rest.strip_suffix(')').ok_or_else(bad)?;
        let rad: BigRational = {
            let (n, d) = rad.split_once('/').unwrap_or((rad, "1"));
            let n = n.trim().parse().map_err(|_| bad())?;
            let d: num_bigint::BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            BigRational::new(n, d)
        };
        let s_sum = GaussianRational::from_str(body)?;
        if rad.is_zero() || s_sum.is_zero() {
            return Ok(Self::zero());
        }
        // keep the parsed representation: canonical input re-emits identically
        let parsed = Self {
            s_sum,
            radicand: rad,
            sign,
        };
        if parsed.radicand.is_negative() {
            return Err(bad());
        }
        Ok(parsed)
    }
}
