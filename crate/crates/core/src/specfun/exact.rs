use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `n!` as an exact integer.
pub fn factorial(n: u32) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, j| acc * j)
}

/// `n!! = n (n-2) (n-4) ...`, with `n!! = 1` for `n <= 0` (so `(-1)!! = 1`).
pub fn double_factorial(n: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut j = n;
    while j > 1 {
        acc *= j;
        j -= 2;
    }
    acc
}

/// Binomial coefficient for `n >= 0`; zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

/// Terminating Gauss hypergeometric series at `z = -1`,
/// `sum_{j=0}^{|a|} (a)_j (b)_j / ((c)_j j!) (-1)^j`, evaluated exactly.
///
/// `a` must be a non-positive integer so the series terminates; a zero of
/// `(c)_j` inside the summation range is reported as a pole.
pub fn gauss_2f1_neg1(a: i64, b: i64, c: &BigRational) -> Result<BigRational> {
    if a > 0 {
        return Err(Error::Domain(format!(
            "2F1 with a = {a} > 0 does not terminate"
        )));
    }
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    for j in 0..(-a) {
        let cj = c + BigRational::from_integer(BigInt::from(j));
        if cj.is_zero() {
            return Err(Error::Domain(format!(
                "pole: (c)_j vanishes at j = {} for c = {c}",
                j + 1
            )));
        }
        let num = BigRational::from_integer(BigInt::from((a + j) * (b + j)));
        term = -term * num / (cj * BigRational::from_integer(BigInt::from(j + 1)));
        sum += &term;
        if term.is_zero() {
            break;
        }
    }
    Ok(sum)
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

fn split_square_int(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.clone();
    let mut root = BigInt::one();
    for &p in SMALL_PRIMES.iter() {
        let p = BigInt::from(p);
        let p2 = &p * &p;
        loop {
            let (quot, rem) = rest.div_rem(&p2);
            if !rem.is_zero() {
                break;
            }
            rest = quot;
            root *= &p;
        }
    }
    // whatever is left may still be a square of a large prime
    let s = rest.sqrt();
    if &s * &s == rest && !rest.is_one() {
        root *= &s;
        rest = BigInt::one();
    }
    (root, rest)
}

/// Writes `q = root^2 * rest` by pulling square factors of small primes out
/// of numerator and denominator. `rest` is then an integer with no squared
/// small-prime factor (denominators are cleared into it).
pub fn split_square(q: &BigRational) -> (BigRational, BigRational) {
    if q.is_zero() {
        return (BigRational::zero(), BigRational::one());
    }
    let (rn, sn) = split_square_int(q.numer());
    // q = n/d = n*d / d^2
    let (rd, sd) = split_square_int(q.denom());
    // n/d = rn^2 sn / (rd^2 sd) = (rn/(rd sd))^2 * sn*sd
    let root = BigRational::new(rn, rd * &sd);
    let rest = BigRational::from_integer(sn * sd);
    (root, rest)
}

/// A complex number with exact rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `i^n` for any integer `n`.
    pub fn i_pow(n: i64) -> Self {
        match n.rem_euclid(4) {
            0 => Self::from_int(1),
            1 => Self::new(BigRational::zero(), BigRational::one()),
            2 => Self::from_int(-1),
            _ => Self::new(BigRational::zero(), -BigRational::one()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::new(&self.re * s, &self.im * s)
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl Add for GaussianRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for GaussianRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Mul for GaussianRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl fmt::Display for GaussianRational {
    /// `a/b + c/d i`, always with explicit denominators.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{} + {}/{} i",
            self.re.numer(),
            self.re.denom(),
            self.im.numer(),
            self.im.denom()
        )
    }
}

fn parse_ratio(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Domain(format!("malformed rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

impl FromStr for GaussianRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .strip_suffix('i')
            .ok_or_else(|| Error::Domain(format!("malformed Gaussian rational `{s}`")))?;
        // the separator is the last " + " or " - " between the two parts
        let (re, im) = body
            .rsplit_once(" + ")
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .or_else(|| {
                body.rsplit_once(" - ")
                    .map(|(a, b)| (a.to_string(), format!("-{}", b.trim())))
            })
            .ok_or_else(|| Error::Domain(format!("malformed Gaussian rational `{s}`")))?;
        Ok(Self::new(parse_ratio(&re)?, parse_ratio(&im)?))
    }
}

/// `sqrt(radicand) * value` with a non-negative rational radicand.
///
/// Sums of surds are exact as long as the radicands agree up to a rational
/// square, which holds for every inner product of expansion coefficients
/// within one degenerate subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    pub radicand: BigRational,
    pub value: GaussianRational,
}

impl Surd {
    pub fn new(radicand: BigRational, value: GaussianRational) -> Self {
        Self { radicand, value }.canonical()
    }

    pub fn zero() -> Self {
        Self {
            radicand: BigRational::one(),
            value: GaussianRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero() || self.radicand.is_zero()
    }

    /// Moves square factors of the radicand into `value`.
    pub fn canonical(self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let (root, rest) = split_square(&self.radicand);
        Self {
            radicand: rest,
            value: self.value.scale(&root),
        }
    }

    /// Exact sum; fails if the radicands differ by a non-square factor.
    pub fn checked_add(&self, other: &Surd) -> Option<Surd> {
        if self.is_zero() {
            return Some(other.clone());
        }
        if other.is_zero() {
            return Some(self.clone());
        }
        let ratio = &other.radicand / &self.radicand;
        let root = rational_sqrt(&ratio)?;
        let value = &self.value + &other.value.scale(&root);
        Some(
            Surd {
                radicand: self.radicand.clone(),
                value,
            }
            .canonical_if_zero(),
        )
    }

    fn canonical_if_zero(self) -> Self {
        if self.value.is_zero() {
            Self::zero()
        } else {
            self
        }
    }

    pub fn mul(&self, other: &Surd) -> Surd {
        Surd::new(&self.radicand * &other.radicand, &self.value * &other.value)
    }

    pub fn conj(&self) -> Surd {
        Surd {
            radicand: self.radicand.clone(),
            value: self.value.conj(),
        }
    }

    /// The value as a rational, if it is one (real with square radicand).
    pub fn to_rational(&self) -> Option<GaussianRational> {
        if self.is_zero() {
            return Some(GaussianRational::zero());
        }
        let root = rational_sqrt(&self.radicand)?;
        Some(self.value.scale(&root))
    }

    pub fn to_complex(&self) -> Complex64 {
        self.value.to_complex() * self.radicand.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn double_factorial_values() {
        assert_eq!(double_factorial(-1), BigInt::one());
        assert_eq!(double_factorial(0), BigInt::one());
        assert_eq!(double_factorial(1), BigInt::one());
        assert_eq!(double_factorial(5), BigInt::from(15));
        // iterated product oracle
        let oracle: i64 = [9i64, 7, 5, 3, 1].iter().product();
        assert_eq!(double_factorial(9), BigInt::from(oracle));
        assert_eq!(oracle, 945);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(5, 6), BigInt::zero());
        assert_eq!(binomial(5, -1), BigInt::zero());
        assert_eq!(binomial(0, 0), BigInt::one());
    }

    fn pochhammer(x: &BigRational, j: i64) -> BigRational {
        (0..j).fold(BigRational::one(), |acc, i| {
            acc * (x + BigRational::from_integer(BigInt::from(i)))
        })
    }

    // term-by-term Pochhammer oracle, independent of the running-ratio loop
    fn f21_oracle(a: i64, b: i64, c: &BigRational) -> BigRational {
        let mut sum = BigRational::zero();
        for j in 0..=(-a) {
            let num = pochhammer(&q(a, 1), j) * pochhammer(&q(b, 1), j);
            let den = pochhammer(c, j) * BigRational::from_integer(factorial(j as u32));
            let sign = if j % 2 == 0 { q(1, 1) } else { q(-1, 1) };
            sum += num / den * sign;
        }
        sum
    }

    #[test]
    fn f21_examples() {
        assert_eq!(gauss_2f1_neg1(0, -3, &q(5, 1)).unwrap(), q(1, 1));
        assert_eq!(gauss_2f1_neg1(-1, -1, &q(2, 1)).unwrap(), q(1, 2));
        let v = gauss_2f1_neg1(-2, -2, &q(1, 1)).unwrap();
        assert_eq!(v, f21_oracle(-2, -2, &q(1, 1)));
        // 1 + (-2)(-2)/(1*1)(-1) + (-2)(-1)(-2)(-1)/(1*2*2)(+1) = 1 - 4 + 1
        assert_eq!(v, q(-2, 1));
        for a in -5..=0 {
            for b in -5..=0 {
                for c in [q(1, 2), q(3, 1), q(7, 3)] {
                    assert_eq!(gauss_2f1_neg1(a, b, &c).unwrap(), f21_oracle(a, b, &c));
                }
            }
        }
    }

    #[test]
    fn f21_errors() {
        assert!(gauss_2f1_neg1(1, -1, &q(1, 1)).is_err());
        // (c)_j = c (c+1) vanishes at j = 2 for c = -1
        assert!(gauss_2f1_neg1(-3, -3, &q(-1, 1)).is_err());
    }

    #[test]
    fn f21_result_is_integral_after_clearing_denominators() {
        for a in -6..=0 {
            for b in -6..=0 {
                let c = q(2, 1);
                let v = gauss_2f1_neg1(a, b, &c).unwrap();
                // denominators divide lcm over j of (c)_j j!
                let mut l = BigInt::one();
                for j in 0..=(-a) {
                    let d = pochhammer(&c, j) * BigRational::from_integer(factorial(j as u32));
                    l = l.lcm(&d.to_integer());
                }
                assert!((v * BigRational::from_integer(l)).is_integer());
            }
        }
    }

    #[test]
    fn gaussian_rational_powers_of_i() {
        let i = GaussianRational::i_pow(1);
        assert_eq!(&i * &i, GaussianRational::from_int(-1));
        assert_eq!(GaussianRational::i_pow(-1), GaussianRational::i_pow(3));
        assert_eq!(GaussianRational::i_pow(8), GaussianRational::one());
    }

    #[test]
    fn gaussian_rational_parse_roundtrip() {
        let g = GaussianRational::new(q(-3, 7), q(5, 2));
        assert_eq!(g.to_string().parse::<GaussianRational>().unwrap(), g);
        let z = GaussianRational::new(q(1, 1), q(-1, 3));
        assert_eq!(z.to_string().parse::<GaussianRational>().unwrap(), z);
    }

    #[test]
    fn square_split() {
        let (root, rest) = split_square(&q(8, 27));
        assert_eq!(&root * &root * &rest, q(8, 27));
        assert_eq!(rest, q(6, 1));
        assert_eq!(rational_sqrt(&q(9, 4)), Some(q(3, 2)));
        assert_eq!(rational_sqrt(&q(2, 1)), None);
    }

    #[test]
    fn surd_sums() {
        // sqrt(2)*1 + sqrt(8)*1 = 3 sqrt(2)
        let a = Surd::new(q(2, 1), GaussianRational::one());
        let b = Surd::new(q(8, 1), GaussianRational::one());
        let s = a.checked_add(&b).unwrap();
        assert_eq!(s.radicand, q(2, 1));
        assert_eq!(s.value, GaussianRational::from_int(3));
        let c = Surd::new(q(3, 1), GaussianRational::one());
        assert!(a.checked_add(&c).is_none());
    }
}
