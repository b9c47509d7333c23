use std::fmt;

/// A half-integer stored as twice its value, so `alpha = l + 1/2` is exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HalfInteger(i32);

impl HalfInteger {
    pub const fn from_twice(twice: i32) -> Self {
        Self(twice)
    }

    pub const fn from_int(n: i32) -> Self {
        Self(2 * n)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Physicists' Hermite polynomial `H_n(u)` by the three-term recurrence.
pub fn hermite(n: u32, u: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * u;
    for k in 2..=n {
        let next = 2.0 * u * cur - 2.0 * f64::from(k - 1) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Associated Laguerre polynomial `L_n^(alpha)(u)`.
///
/// At `u = 0` the value `binom(n + alpha, n)` is returned from its product
/// form instead of the recurrence.
pub fn assoc_laguerre(n: u32, alpha: HalfInteger, u: f64) -> f64 {
    let a = alpha.value();
    if u == 0.0 {
        return (1..=n).fold(1.0, |acc, j| acc * (a + f64::from(j)) / f64::from(j));
    }
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - u;
    for k in 1..n {
        let k = f64::from(k);
        let next = ((2.0 * k + 1.0 + a - u) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}
