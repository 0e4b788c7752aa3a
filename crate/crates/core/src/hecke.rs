//! Multiplicative Hecke operators `T~(n)` on product exponents and on
//! q-series, the usual additive Hecke operators, and an eigenform test.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::arith::{factorize, is_prime};
use crate::field::{Qt, Rational};
use crate::prodexp::ProductExpansion;
use crate::qseries::QSeries;

/// A Hecke index `n` at level `N`, with its factorization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeckeIndex {
    pub n: u64,
    pub level: u64,
    /// `(p, t, p | N)`.
    pub factors: Vec<(u64, u32, bool)>,
}

impl HeckeIndex {
    pub fn new(n: u64, level: u64) -> Result<Self> {
        if n == 0 || level == 0 {
            return Err(Error::InvalidArgument("Hecke index and level must be positive".into()));
        }
        let factors = factorize(n).into_iter().map(|(p, t)| (p, t, level.is_multiple_of(p))).collect();
        Ok(Self { n, level, factors })
    }

    /// Leading-power multiplier: `h(f|T~(n)) = h(f) * beta(n)`.
    pub fn beta(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, t, divides)| if divides { 1 } else { (p.pow(t + 1) - 1) / (p - 1) })
            .product()
    }

    /// Input exponents needed to emit `t_out` output terms (indices `< t_out`).
    pub fn input_truncation(&self, t_out: usize) -> usize {
        self.n as usize * (t_out.saturating_sub(1)) + 1
    }
}

/// `sigma(p)` if `p` does not divide `N`, else 1.
pub fn beta(p: u64, level: u64) -> u64 {
    if level.is_multiple_of(p) {
        1
    } else {
        p + 1
    }
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// `T~(p)` on exponents:
/// `c_p(D,n) = [p !| N] c(D,n/p) + p c(D,pn) + (D/p) chi_p(n) c(D,n)`.
/// The output truncation is `floor((T-1)/p) + 1`.
pub fn mh_prime_exponents(pe: &ProductExpansion, p: u64, level: u64) -> Result<ProductExpansion> {
    check_prime(p)?;
    let p_us = p as usize;
    let out_len = (pe.t - 1) / p_us;
    let unramified = !level.is_multiple_of(p);
    let chi_dp = pe.d.kronecker(p as i64) as i64;
    let mut c = Vec::with_capacity(out_len);
    for n in 1..=out_len {
        let mut v = pe.c[p_us * n - 1].scale_int(p as i64);
        if unramified && n % p_us == 0 {
            v = v.checked_add(&pe.c[n / p_us - 1])?;
        }
        if chi_dp != 0 && n % p_us != 0 {
            v = v.checked_add(&pe.c[n - 1].scale_int(chi_dp))?;
        }
        c.push(v);
    }
    let h = pe.h * beta(p, level) as i64;
    Ok(ProductExpansion::new(h, pe.d, c))
}

/// `T~(p^t)`. For `p !| N` this uses
/// `c_{p^t} = T~(p) c_{p^{t-1}} - p c_{p^{t-2}}`; for `p | N` the operator is
/// the `t`-th iterate of `T~(p)`.
pub fn mh_prime_power_exponents(pe: &ProductExpansion, p: u64, t: u32, level: u64) -> Result<ProductExpansion> {
    check_prime(p)?;
    if t == 0 {
        return Ok(pe.clone());
    }
    if level.is_multiple_of(p) {
        let mut acc = pe.clone();
        for _ in 0..t {
            acc = mh_prime_exponents(&acc, p, level)?;
        }
        return Ok(acc);
    }
    let mut prev2 = pe.clone();
    let mut prev1 = mh_prime_exponents(pe, p, level)?;
    for _ in 2..=t {
        let applied = mh_prime_exponents(&prev1, p, level)?;
        let len = applied.c.len();
        let c = applied
            .c
            .iter()
            .zip(prev2.c.iter())
            .take(len)
            .map(|(a, b)| a.checked_sub(&b.scale_int(p as i64)))
            .collect::<Result<Vec<_>>>()?;
        let h = applied.h - p as i64 * prev2.h;
        prev2 = prev1;
        prev1 = ProductExpansion::new(h, pe.d, c);
    }
    Ok(prev1)
}

/// `T~(n)` as the composition of its prime-power parts.
pub fn mh_exponents(pe: &ProductExpansion, n: u64, level: u64) -> Result<ProductExpansion> {
    let idx = HeckeIndex::new(n, level)?;
    let mut acc = pe.clone();
    for &(p, t, _) in &idx.factors {
        acc = mh_prime_power_exponents(&acc, p, t, level)?;
    }
    Ok(acc)
}

/// `T~(n)` with a guaranteed number of output terms.
pub fn mh_exponents_to(pe: &ProductExpansion, n: u64, level: u64, t_out: usize) -> Result<ProductExpansion> {
    let needed = HeckeIndex::new(n, level)?.input_truncation(t_out);
    if pe.t < needed {
        return Err(Error::InsufficientTruncation { needed, have: pe.t });
    }
    Ok(mh_exponents(pe, n, level)?.truncate(t_out))
}

/// `T~(p)` directly on a normalized q-series, without roots of unity: with
/// `L = log(q^{-h} f)`, the product over `f((tau+j)/p)` is
/// `q^h exp(p sum_m L_{pm} q^m)`; for `p !| N` multiply by `f(p tau)`.
pub fn mh_series_direct(f: &QSeries, p: u64, level: u64) -> Result<QSeries> {
    check_prime(p)?;
    let h = f.int_offset()?;
    match f.leading() {
        Some(c) if c.is_one() => {}
        Some(c) => return Err(Error::LeadingNotOne(c.to_string())),
        None => return Err(Error::LeadingNotOne("0".into())),
    }
    let unit = f.shift(-h);
    let log = unit.log_unit()?;
    let t = unit.truncation();
    let p_us = p as usize;
    let out_len = (t - 1) / p_us + 1;
    let mut filtered = vec![Qt::zero(); out_len];
    for (m, slot) in filtered.iter_mut().enumerate().skip(1) {
        if let Some(l) = log.coeff((p_us * m) as i64) {
            *slot = l.scale_int(p as i64);
        }
    }
    let mut out = QSeries::from_int_offset(0, filtered).exp_zero()?.truncate(out_len).shift(h);
    if !level.is_multiple_of(p) {
        out = out.mul(&f.substitute_power(p))?;
    }
    let lead = out.leading().cloned().ok_or(Error::DivisionByZero)?;
    if !lead.is_one() {
        out = out.scale(&lead.inv()?)?;
    }
    Ok(out)
}

/// Output of [`usual_hecke`], with the normalization that was applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UsualHecke {
    pub series: QSeries,
    pub weight: i64,
    pub p: u64,
    /// Factor by which `series` exceeds the classical operator
    /// `b(n) = a(pn) + p^{k-1} a(n/p)`: `p` in weight 0, otherwise 1.
    pub relative_to_classical: Rational,
}

/// The additive Hecke operator `T(p)` (`U(p)` when `p | N`).
///
/// Weight `k != 0`: `b(n) = a(pn) + p^{k-1} a(n/p)`, or `a(pn)` for `p | N`.
/// Weight 0: `b(n) = p a(pn) + a(n/p)`, or `p a(pn)` for `p | N`, so that
/// `q^{-1} + O(q)` goes to `q^{-p} + O(1)` with integral coefficients.
pub fn usual_hecke(f: &QSeries, k: i64, p: u64, level: u64) -> Result<UsualHecke> {
    check_prime(p)?;
    let unramified = !level.is_multiple_of(p);
    let pi = p as i64;
    let (w_up, w_down) = if k == 0 {
        (Rational::from_integer(pi.into()), Rational::one())
    } else {
        let pk = Rational::from_integer(BigInt::from(pi)).pow((k - 1) as i32);
        (Rational::one(), pk)
    };
    let relative = if k == 0 {
        Rational::from_integer(pi.into())
    } else {
        Rational::one()
    };
    if f.is_zero() {
        return Ok(UsualHecke {
            series: f.clone(),
            weight: k,
            p,
            relative_to_classical: relative,
        });
    }
    let h = f.int_offset()?;
    let abs = h + f.truncation() as i64;
    let lo_up = div_ceil(h, pi);
    let lo = if unramified { lo_up.min(pi * h) } else { lo_up };
    let hi = (abs - 1).div_euclid(pi);
    let mut coeffs = Vec::new();
    for n in lo..=hi {
        let mut b = f.coeff(pi * n).unwrap_or_else(Qt::zero).scale(&w_up);
        if unramified && n % pi == 0 {
            if let Some(a) = f.coeff(n / pi) {
                b = b.checked_add(&a.scale(&w_down))?;
            }
        }
        coeffs.push(b);
    }
    Ok(UsualHecke {
        series: QSeries::from_int_offset(lo, coeffs),
        weight: k,
        p,
        relative_to_classical: relative,
    })
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum EigenVerdict {
    /// `f|T~(p) = f^{m_p}` for every tested prime.
    EigenformOnTestedPrimes { primes: Vec<u64>, powers: Vec<i64> },
    /// `f|T~(p)` is not `f^m`; at `exponent` the coefficients differ.
    Counterexample {
        p: u64,
        power: Option<i64>,
        exponent: i64,
        expected: Option<Qt>,
        got: Qt,
    },
}

impl EigenVerdict {
    pub fn is_eigenform(&self) -> bool {
        matches!(self, EigenVerdict::EigenformOnTestedPrimes { .. })
    }
}

/// Tests `f|T~(p) = f^m` for a single integer `m` per prime. For `h != 0`
/// the candidate is `m = h(f|T~(p))/h`; otherwise it is read off the first
/// nonconstant coefficient.
pub fn is_mult_eigenform(f: &QSeries, primes: &[u64], level: u64) -> Result<EigenVerdict> {
    let h = f.int_offset()?;
    let mut powers = Vec::with_capacity(primes.len());
    for &p in primes {
        let g = mh_series_direct(f, p, level)?;
        let gh = g.int_offset()?;
        let m = if h != 0 {
            if gh % h != 0 {
                return Ok(EigenVerdict::Counterexample {
                    p,
                    power: None,
                    exponent: gh,
                    expected: None,
                    got: g.coeffs()[0].clone(),
                });
            }
            Some(gh / h)
        } else {
            power_from_first_term(f, &g)
        };
        let Some(m) = m else {
            let (exponent, got) = first_nonconstant(&g).unwrap_or((1, Qt::zero()));
            return Ok(EigenVerdict::Counterexample {
                p,
                power: None,
                exponent,
                expected: None,
                got,
            });
        };
        let fm = f.pow(m)?;
        if let Some((e, expected, got)) = first_difference(&fm, &g) {
            return Ok(EigenVerdict::Counterexample {
                p,
                power: Some(m),
                exponent: e,
                expected: Some(expected),
                got,
            });
        }
        powers.push(m);
    }
    Ok(EigenVerdict::EigenformOnTestedPrimes {
        primes: primes.to_vec(),
        powers,
    })
}

fn first_nonconstant(s: &QSeries) -> Option<(i64, Qt)> {
    let h = s.int_offset().ok()?;
    s.coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, c)| !c.is_zero())
        .map(|(k, c)| (h + k as i64, c.clone()))
}

fn power_from_first_term(f: &QSeries, g: &QSeries) -> Option<i64> {
    let Some((k, a)) = first_nonconstant(f) else {
        // f = 1: any power works, and g must be 1 as well
        return Some(1);
    };
    let b = g.coeff(k)?;
    let ratio = b.checked_div(&a).ok()?.to_rational()?;
    if !ratio.is_integer() {
        return None;
    }
    let m = ratio.to_integer();
    if m.abs() > BigInt::from(1_000_000) {
        return None;
    }
    m.to_i64()
}

fn first_difference(a: &QSeries, b: &QSeries) -> Option<(i64, Qt, Qt)> {
    let ha = a.int_offset().ok()?;
    let hb = b.int_offset().ok()?;
    let lo = ha.min(hb);
    let hi = (ha + a.truncation() as i64).min(hb + b.truncation() as i64);
    (lo..hi).find_map(|e| {
        let x = a.coeff(e).unwrap_or_else(Qt::zero);
        let y = b.coeff(e).unwrap_or_else(Qt::zero);
        (x != y).then_some((e, x, y))
    })
}
