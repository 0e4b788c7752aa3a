//! Twisted infinite products `f = q^h prod_n P_D(q^n)^{c(D,n)}`.
//!
//! Both directions work with the formal logarithm
//! `log P_D(t) = -sqrt(D) sum_r (D/r) t^r / r`, so no roots of unity ever
//! appear and all arithmetic stays in the field generated by the
//! coefficients and `sqrt(D)`.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{divisors, Discriminant, Qt, Rational};
use crate::qseries::series::exp_dense;
use crate::qseries::QSeries;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductExpansion {
    pub h: i64,
    #[serde(rename = "D")]
    pub d: Discriminant,
    /// `c[n - 1] = c(D, n)` for `1 <= n < t`.
    #[serde(serialize_with = "as_strings")]
    pub c: Vec<Qt>,
    #[serde(rename = "T")]
    pub t: usize,
}

fn as_strings<S: serde::Serializer>(v: &[Qt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl ProductExpansion {
    pub fn new(h: i64, d: Discriminant, c: Vec<Qt>) -> Self {
        let t = c.len() + 1;
        Self { h, d, c, t }
    }

    /// `c(D, n)` for `1 <= n < T`.
    pub fn exponent(&self, n: usize) -> Option<&Qt> {
        n.checked_sub(1).and_then(|k| self.c.get(k))
    }

    pub fn is_trivial(&self) -> bool {
        self.c.iter().all(Qt::is_zero)
    }

    pub fn truncate(&self, t: usize) -> Self {
        let mut c = self.c.clone();
        c.truncate(t.saturating_sub(1));
        Self::new(self.h, self.d, c)
    }

    /// `sum_{u | n} u sqrt(D) c(D,u) (D / (n/u))`, which is independent of `D`.
    pub fn weighted_divisor_sum(&self, n: usize) -> Result<Qt> {
        if n == 0 || n >= self.t {
            return Err(Error::InsufficientTruncation {
                needed: n + 1,
                have: self.t,
            });
        }
        weighted_sum(&self.c, self.d, n)
    }
}

fn weighted_sum(c: &[Qt], d: Discriminant, n: usize) -> Result<Qt> {
    let mut acc = Qt::zero();
    for u in divisors(n as u64) {
        let chi = d.kronecker((n as u64 / u) as i64);
        let cu = &c[u as usize - 1];
        if chi == 0 || cu.is_zero() {
            continue;
        }
        acc = acc.checked_add(&cu.scale_int(u as i64 * chi as i64))?;
    }
    acc.checked_mul(&d.sqrt_of())
}

/// Expansion of `P_D(t)` below `t^T`.
pub fn pd_series(d: Discriminant, t: usize) -> Result<QSeries> {
    let sqrt_d = d.sqrt_of();
    let mut g = vec![Qt::zero(); t];
    for (r, slot) in g.iter_mut().enumerate().skip(1) {
        let chi = d.kronecker(r as i64);
        if chi != 0 {
            *slot = sqrt_d.scale(&Rational::new(BigInt::from(-chi), BigInt::from(r as i64)));
        }
    }
    Ok(QSeries::from_int_offset(0, exp_dense(&g)?))
}

/// The exponents `c(D, n)` of a series `q^h (1 + sum a(n) q^n)`, for
/// `1 <= n < T`, by the recursion
/// `c(D,n) = -a(n)/sqrt(D) - (1/(n sqrt(D))) [ sum_{d | n, d < n} d sqrt(D) c(D,d) (D/(n/d))
///            + sum_{1 <= u < n} a(n-u) W(u) ]`
/// where `W(u)` is the weighted divisor sum at `u`.
pub fn to_exponents(f: &QSeries, d: Discriminant) -> Result<ProductExpansion> {
    let h = f.int_offset()?;
    let a = f.coeffs();
    match a.first() {
        Some(lead) if lead.is_one() => {}
        Some(lead) => return Err(Error::LeadingNotOne(lead.to_string())),
        None => return Err(Error::LeadingNotOne("0".into())),
    }
    let t = a.len();
    let sqrt_d = d.sqrt_of();
    let inv_sqrt_d = sqrt_d.inv()?;
    let mut c: Vec<Qt> = Vec::with_capacity(t.saturating_sub(1));
    // w[u] = W(u)
    let mut w: Vec<Qt> = vec![Qt::zero(); t];
    for n in 1..t {
        let mut bracket = Qt::zero();
        for dd in divisors(n as u64) {
            let dd = dd as usize;
            if dd == n {
                continue;
            }
            let chi = d.kronecker((n / dd) as i64);
            if chi != 0 && !c[dd - 1].is_zero() {
                let term = c[dd - 1].checked_mul(&sqrt_d)?.scale_int(dd as i64 * chi as i64);
                bracket = bracket.checked_add(&term)?;
            }
        }
        let divisor_part = bracket.clone();
        for u in 1..n {
            if a[n - u].is_zero() || w[u].is_zero() {
                continue;
            }
            bracket = bracket.checked_add(&a[n - u].checked_mul(&w[u])?)?;
        }
        let cn = (-&a[n])
            .checked_mul(&inv_sqrt_d)?
            .checked_sub(&bracket.checked_mul(&inv_sqrt_d)?.scale(&Rational::new(1.into(), (n as i64).into())))?;
        // W(n) = n sqrt(D) c(n) + (divisor part)
        w[n] = cn.checked_mul(&sqrt_d)?.scale_int(n as i64).checked_add(&divisor_part)?;
        c.push(cn);
    }
    Ok(ProductExpansion::new(h, d, c))
}

/// Rebuilds `q^h prod P_D(q^n)^{c(D,n)}` to the truncation of `pe`.
pub fn from_exponents(pe: &ProductExpansion) -> Result<QSeries> {
    let t = pe.t;
    let mut g = vec![Qt::zero(); t];
    for (m, slot) in g.iter_mut().enumerate().skip(1) {
        let wm = weighted_sum(&pe.c, pe.d, m)?;
        if !wm.is_zero() {
            *slot = -wm.scale(&Rational::new(1.into(), (m as i64).into()));
        }
    }
    Ok(QSeries::from_int_offset(pe.h, exp_dense(&g)?))
}

/// `-theta(f)/f` coefficients `1..T` for a normalized series; equals the
/// weighted divisor sums of its product exponents.
pub fn minus_log_derivative(f: &QSeries) -> Result<Vec<Qt>> {
    let ld = f.log_derivative()?;
    Ok(ld.into_iter().skip(1).map(|x| -x).collect())
}

impl std::fmt::Display for ProductExpansion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "h = {}, D = {}", self.h, self.d)?;
        for (k, c) in self.c.iter().enumerate() {
            write!(f, "\nc({}) = {c}", k + 1)?;
        }
        Ok(())
    }
}

/// Zero exponents, used as the identity for tests and operators.
pub fn trivial(h: i64, d: Discriminant, t: usize) -> ProductExpansion {
    ProductExpansion::new(h, d, vec![Qt::zero(); t.saturating_sub(1)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::{delta, FormSpec};
    use proptest::prelude::*;

    fn disc(d: i64) -> Discriminant {
        Discriminant::new(d).unwrap()
    }

    #[test]
    fn pd_trivial_discriminant() {
        let p = pd_series(disc(1), 12).unwrap();
        assert_eq!(p, QSeries::from_integers(0, &[1, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]));
    }

    #[test]
    fn pd_eight_is_a_rational_function() {
        let s2 = Qt::sqrt(2);
        let num = QSeries::from_int_offset(0, {
            let mut v = vec![Qt::zero(); 20];
            v[0] = Qt::one();
            v[1] = -&s2;
            v[2] = Qt::one();
            v
        });
        let den = QSeries::from_int_offset(0, {
            let mut v = vec![Qt::zero(); 20];
            v[0] = Qt::one();
            v[1] = s2.clone();
            v[2] = Qt::one();
            v
        });
        assert_eq!(pd_series(disc(8), 20).unwrap(), num.div(&den).unwrap());
    }

    #[test]
    fn pd_log_coefficients() {
        let l = pd_series(disc(5), 15).unwrap().log_unit().unwrap();
        let inv = Qt::sqrt(5).inv().unwrap();
        for r in 1..15i64 {
            let expected = Qt::from_frac(-crate::field::kronecker(5, r) as i64, r);
            assert_eq!(l.coeff(r).unwrap().checked_mul(&inv).unwrap(), expected);
        }
    }

    #[test]
    fn constant_form_has_zero_exponents() {
        for d in [1, 5, 8] {
            let pe = to_exponents(&QSeries::one(10), disc(d)).unwrap();
            assert!(pe.is_trivial());
            assert_eq!(pe.t, 10);
            for n in 1..10 {
                assert!(pe.weighted_divisor_sum(n).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn leading_coefficient_checked() {
        let f = QSeries::from_integers(0, &[2, 1, 1]);
        assert!(matches!(to_exponents(&f, disc(1)), Err(Error::LeadingNotOne(_))));
    }

    #[test]
    fn single_exponent_and_delta() {
        let pe = ProductExpansion::new(0, disc(1), vec![Qt::one(), Qt::zero(), Qt::zero()]);
        assert_eq!(from_exponents(&pe).unwrap(), QSeries::from_integers(0, &[1, -1, 0, 0]));

        let pe = ProductExpansion::new(1, disc(1), vec![Qt::from_integer(24); 9]);
        let s = from_exponents(&pe).unwrap();
        assert_eq!(s, delta(10));
        assert_eq!(to_exponents(&delta(10), disc(1)).unwrap(), pe);
    }

    #[test]
    fn level11_round_trip() {
        let f = FormSpec::level11_weight2().expand(25).unwrap();
        for d in [1, 8] {
            let pe = to_exponents(&f, disc(d)).unwrap();
            assert_eq!(pe.t, 25);
            assert_eq!(from_exponents(&pe).unwrap(), f);
        }
    }

    #[test]
    fn weighted_sums_match_log_derivative() {
        let f = FormSpec::level11_weight2().expand(21).unwrap();
        let oracle = minus_log_derivative(&f).unwrap();
        for d in [1, 5, 8, 13] {
            let pe = to_exponents(&f, disc(d)).unwrap();
            for n in 1..=20 {
                assert_eq!(pe.weighted_divisor_sum(n).unwrap(), oracle[n - 1], "D={d} n={n}");
            }
        }
    }

    fn arb_pe() -> impl Strategy<Value = ProductExpansion> {
        (
            -3i64..3,
            proptest::sample::select(vec![1i64, 5, 8, 13]),
            proptest::collection::vec((-30i64..30, 1i64..4, -5i64..5), 29),
        )
            .prop_map(|(h, d, c)| {
                let d = disc(d);
                let c = c
                    .into_iter()
                    .map(|(x, den, y)| Qt::from_frac(x, den) + d.sqrt_of().scale_int(y))
                    .collect();
                ProductExpansion::new(h, d, c)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn exponents_are_unique(pe in arb_pe()) {
            let f = from_exponents(&pe).unwrap();
            prop_assert_eq!(to_exponents(&f, pe.d).unwrap(), pe);
        }
    }
}
