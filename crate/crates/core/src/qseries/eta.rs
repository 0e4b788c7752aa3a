//! Dedekind eta products and the Ligozat cusp-order formula.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::QSeries;
use crate::error::{Error, Result};
use crate::field::arith::{divisors, gcd};
use crate::field::Rational;

/// Coefficients of `prod_{n>=1} (1 - q^n)` below `q^t`, from Euler's
/// pentagonal number theorem.
pub fn euler_product(t: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); t];
    if t == 0 {
        return out;
    }
    out[0] = BigInt::one();
    for k in 1i64.. {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let e1 = (k * (3 * k - 1) / 2) as usize;
        let e2 = (k * (3 * k + 1) / 2) as usize;
        if e1 >= t {
            break;
        }
        out[e1] += sign;
        if e2 < t {
            out[e2] += sign;
        }
    }
    out
}

/// `f^r` for an integer series with `f[0] = 1` (J. C. P. Miller's recurrence).
pub fn int_series_pow(f: &[BigInt], r: i64) -> Vec<BigInt> {
    let t = f.len();
    let mut g = vec![BigInt::zero(); t];
    if t == 0 {
        return g;
    }
    debug_assert!(f[0].is_one());
    g[0] = BigInt::one();
    for n in 1..t {
        let mut acc = BigInt::zero();
        for k in 1..=n {
            if f[k].is_zero() {
                continue;
            }
            let w = (r + 1) * k as i64 - n as i64;
            if w != 0 {
                acc += &f[k] * &g[n - k] * w;
            }
        }
        let (quo, rem) = acc.div_rem(&BigInt::from(n));
        debug_assert!(rem.is_zero());
        g[n] = quo;
    }
    g
}

/// `prod_{n>=1} (1 - q^{m n})^r` below `q^t`.
pub fn euler_power(m: u64, r: i64, t: usize) -> Vec<BigInt> {
    let m = m as usize;
    let base = int_series_pow(&euler_product(t.div_ceil(m)), r);
    let mut out = vec![BigInt::zero(); t];
    for (k, c) in base.into_iter().enumerate() {
        if k * m < t {
            out[k * m] = c;
        }
    }
    out
}

/// `prod_m eta(m tau)^{r_m}` on `Gamma_0(level)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaQuotientSpec {
    pub level: u64,
    pub terms: Vec<(u64, i64)>,
}

impl EtaQuotientSpec {
    pub fn new(level: u64, terms: Vec<(u64, i64)>) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidSpec("level must be positive".into()));
        }
        for &(m, _) in &terms {
            if m == 0 || !level.is_multiple_of(m) {
                return Err(Error::InvalidSpec(format!(
                    "eta(m tau) with m = {m} does not divide the level {level}"
                )));
            }
        }
        Ok(Self { level, terms })
    }

    pub fn weight(&self) -> Rational {
        Rational::new(self.terms.iter().map(|t| t.1).sum::<i64>().into(), 2.into())
    }

    /// Leading exponent `sum m r_m / 24`.
    pub fn offset(&self) -> Rational {
        let num: i64 = self.terms.iter().map(|&(m, r)| m as i64 * r).sum();
        Rational::new(num.into(), 24.into())
    }

    pub fn expand(&self, t: usize) -> QSeries {
        let mut acc: Vec<BigInt> = vec![BigInt::zero(); t];
        if t > 0 {
            acc[0] = BigInt::one();
        }
        for &(m, r) in &self.terms {
            let factor = euler_power(m, r, t);
            acc = int_mul(&acc, &factor);
        }
        QSeries::from_bigints(self.offset(), acc)
    }

    /// Order of vanishing at the cusp `a/c` of `Gamma_0(N)`, measured in the
    /// local uniformizer there.
    pub fn cusp_order(&self, cusp: &Cusp) -> Result<Rational> {
        let n = self.level as i64;
        let c = cusp.c;
        if c <= 0 || n % c != 0 {
            return Err(Error::CuspNotOfLevel(cusp.to_string(), self.level));
        }
        let mut sum = Rational::zero();
        for &(m, r) in &self.terms {
            let g = gcd(c, m as i64);
            sum += Rational::new(BigInt::from(g * g * r), BigInt::from(m as i64));
        }
        let denom = 24 * gcd(c, n / c) * c;
        Ok(sum * Rational::new(n.into(), denom.into()))
    }
}

fn int_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let t = a.len().min(b.len());
    let mut out = vec![BigInt::zero(); t];
    for (i, x) in a.iter().take(t).enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().take(t - i).enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// A cusp `a/c` of `Gamma_0(N)` with `c | N`; infinity is `1/N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Cusp {
    pub a: i64,
    pub c: i64,
}

impl Cusp {
    pub fn infinity(level: u64) -> Self {
        Self { a: 1, c: level as i64 }
    }

    /// Width `N / gcd(c^2, N)`.
    pub fn width(&self, level: u64) -> u64 {
        let n = level as i64;
        (n / gcd(self.c * self.c, n)) as u64
    }
}

impl std::fmt::Display for Cusp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.a, self.c)
    }
}

impl From<Cusp> for String {
    fn from(c: Cusp) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for Cusp {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl std::str::FromStr for Cusp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (a, c) = s.split_once('/').unwrap_or((s, "1"));
        let a: i64 = a.trim().parse().map_err(|_| Error::Parse(format!("bad cusp {s:?}")))?;
        let c: i64 = c.trim().parse().map_err(|_| Error::Parse(format!("bad cusp {s:?}")))?;
        if c <= 0 || gcd(a, c) != 1 {
            return Err(Error::Parse(format!(
                "cusp {s:?} is not a reduced fraction with positive denominator"
            )));
        }
        Ok(Self { a, c })
    }
}

/// Representatives of the cusps of `Gamma_0(N)`: for each `c | N`, the
/// fractions `a/c` with `a` running over units mod `gcd(c, N/c)`.
pub fn cusps(level: u64) -> Vec<Cusp> {
    let n = level as i64;
    let mut out = Vec::new();
    for c in divisors(level) {
        let c = c as i64;
        let g = gcd(c, n / c);
        for class in (0..g).filter(|&k| gcd(k, g) == 1) {
            let mut a = class;
            while gcd(a, c) != 1 {
                a += g;
            }
            out.push(Cusp { a, c });
        }
    }
    out
}
