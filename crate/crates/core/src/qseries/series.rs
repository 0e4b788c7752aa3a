//! Truncated Laurent series `q^offset * (c_0 + c_1 q + ... + c_{T-1} q^{T-1} + O(q^T))`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Qt, Rational};

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SeriesJson", into = "SeriesJson")]
pub struct QSeries {
    offset: Rational,
    /// `coeffs.len()` is the relative truncation.
    coeffs: Vec<Qt>,
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl QSeries {
    /// Builds a series and strips leading zero coefficients.
    pub fn new(offset: Rational, coeffs: Vec<Qt>) -> Self {
        let mut s = Self { offset, coeffs };
        s.normalize();
        s
    }

    pub fn from_int_offset(offset: i64, coeffs: Vec<Qt>) -> Self {
        Self::new(rat(offset), coeffs)
    }

    pub fn from_integers(offset: i64, coeffs: &[i64]) -> Self {
        Self::from_int_offset(offset, coeffs.iter().map(|&c| Qt::from_integer(c)).collect())
    }

    pub fn from_bigints(offset: Rational, coeffs: Vec<BigInt>) -> Self {
        Self::new(offset, coeffs.into_iter().map(Qt::from_bigint).collect())
    }

    /// The constant `c + O(q^t)`.
    pub fn constant(c: Qt, t: usize) -> Self {
        let mut coeffs = vec![Qt::zero(); t.max(1)];
        coeffs[0] = c;
        Self::new(Rational::zero(), coeffs)
    }

    pub fn one(t: usize) -> Self {
        Self::constant(Qt::one(), t)
    }

    /// `O(q^{offset + t})`.
    pub fn zero(offset: Rational, t: usize) -> Self {
        Self {
            offset,
            coeffs: vec![Qt::zero(); t],
        }
    }

    /// `q^e` with relative truncation `t`.
    pub fn monomial(e: i64, t: usize) -> Self {
        let mut s = Self::one(t);
        s.offset = rat(e);
        s
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(0) => {}
            Some(k) => {
                self.coeffs.drain(..k);
                self.offset += rat(k as i64);
            }
            None => {}
        }
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    /// The offset as an integer, or [`Error::FractionalOffset`].
    pub fn int_offset(&self) -> Result<i64> {
        use num_traits::ToPrimitive;
        if self.offset.is_integer() {
            self.offset
                .to_integer()
                .to_i64()
                .ok_or_else(|| Error::InvalidArgument("offset out of range".into()))
        } else {
            Err(Error::FractionalOffset(self.offset.to_string()))
        }
    }

    pub fn coeffs(&self) -> &[Qt] {
        &self.coeffs
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    /// First unknown exponent: the series is known modulo `q^{abs_precision}`.
    pub fn abs_precision(&self) -> Rational {
        &self.offset + rat(self.coeffs.len() as i64)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Qt::is_zero)
    }

    pub fn leading(&self) -> Option<&Qt> {
        self.coeffs.first().filter(|c| !c.is_zero())
    }

    /// Coefficient of `q^e` for an absolute exponent `e`. Exponents below the
    /// offset give zero; exponents at or past the truncation give `None`.
    pub fn coeff(&self, e: i64) -> Option<Qt> {
        let k = rat(e) - &self.offset;
        if !k.is_integer() {
            return Some(Qt::zero());
        }
        if k < Rational::zero() {
            return Some(Qt::zero());
        }
        use num_traits::ToPrimitive;
        let k = k.to_integer().to_usize()?;
        self.coeffs.get(k).cloned()
    }

    /// Integer shift of the offset (multiplication by `q^e`).
    pub fn shift(&self, e: i64) -> Self {
        Self {
            offset: &self.offset + rat(e),
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn truncate(&self, t: usize) -> Self {
        let mut s = self.clone();
        s.coeffs.truncate(t);
        s
    }

    fn offset_gap(&self, other: &Self) -> Result<i64> {
        let diff = &other.offset - &self.offset;
        if !diff.is_integer() {
            return Err(Error::IncompatibleOffsets(self.offset.to_string(), other.offset.to_string()));
        }
        use num_traits::ToPrimitive;
        diff.to_integer()
            .to_i64()
            .ok_or_else(|| Error::InvalidArgument("offset gap out of range".into()))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let gap = self.offset_gap(other)?;
        let (lo, hi, gap) = if gap >= 0 {
            (self, other, gap as usize)
        } else {
            (other, self, (-gap) as usize)
        };
        let len = lo.coeffs.len().min(gap + hi.coeffs.len());
        let mut coeffs = Vec::with_capacity(len);
        for k in 0..len {
            let mut c = lo.coeffs[k].clone();
            if k >= gap {
                c = c.checked_add(&hi.coeffs[k - gap])?;
            }
            coeffs.push(c);
        }
        Ok(Self::new(lo.offset.clone(), coeffs))
    }

    pub fn neg(&self) -> Self {
        Self {
            offset: self.offset.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Qt) -> Result<Self> {
        if c.is_zero() {
            return Ok(Self::zero(self.offset.clone(), self.coeffs.len()));
        }
        let coeffs = self.coeffs.iter().map(|x| x.checked_mul(c)).collect::<Result<_>>()?;
        Ok(Self::new(self.offset.clone(), coeffs))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let len = self.coeffs.len().min(other.coeffs.len());
        let offset = &self.offset + &other.offset;
        let mut coeffs = vec![Qt::zero(); len];
        for (i, a) in self.coeffs.iter().take(len).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(len - i).enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].checked_add(&a.checked_mul(b)?)?;
            }
        }
        Ok(Self::new(offset, coeffs))
    }

    /// Multiplicative inverse; the leading coefficient must be nonzero.
    pub fn inverse(&self) -> Result<Self> {
        let lead = self.leading().ok_or(Error::DivisionByZero)?;
        let lead_inv = lead.inv()?;
        let len = self.coeffs.len();
        let mut out: Vec<Qt> = Vec::with_capacity(len);
        out.push(lead_inv.clone());
        for n in 1..len {
            let mut acc = Qt::zero();
            for k in 1..=n {
                let a = &self.coeffs[k];
                if a.is_zero() || out[n - k].is_zero() {
                    continue;
                }
                acc = acc.checked_add(&a.checked_mul(&out[n - k])?)?;
            }
            out.push((-acc).checked_mul(&lead_inv)?);
        }
        Ok(Self::new(-&self.offset, out))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inverse()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = Self::one(base.coeffs.len());
        let mut sq = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&sq)?;
            }
            n >>= 1;
            if n > 0 {
                sq = sq.mul(&sq)?;
            }
        }
        Ok(acc)
    }

    /// `theta = q d/dq`: multiplies the coefficient of `q^e` by `e`.
    pub fn theta(&self) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.scale(&(&self.offset + rat(k as i64))))
            .collect();
        Ok(Self::new(self.offset.clone(), coeffs))
    }

    /// Substitutes `q -> q^m`.
    pub fn substitute_power(&self, m: u64) -> Self {
        let m = m as usize;
        let mut coeffs = vec![Qt::zero(); self.coeffs.len() * m];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k * m] = c.clone();
        }
        Self {
            offset: &self.offset * rat(m as i64),
            coeffs,
        }
    }

    /// Coefficients `a(0..len)` of `q^{-h} f` for an integer-offset series
    /// with leading coefficient one.
    fn unit_part(&self) -> Result<&[Qt]> {
        if !self.offset.is_zero() || !self.coeffs.first().is_some_and(Qt::is_one) {
            let lead = self.coeffs.first().map(|c| c.to_string()).unwrap_or_else(|| "0".into());
            return Err(Error::NotAUnit(format!("offset {}, leading coefficient {lead}", self.offset)));
        }
        Ok(&self.coeffs)
    }

    /// `theta(f)/f` for a series with nonzero leading coefficient, as a dense
    /// vector of coefficients of `q^0 .. q^{T-1}`, including the offset term.
    pub fn log_derivative(&self) -> Result<Vec<Qt>> {
        let lead = self.leading().ok_or(Error::DivisionByZero)?;
        let unit = self.scale(&lead.inv()?)?;
        let shifted = Self {
            offset: Rational::zero(),
            coeffs: unit.coeffs,
        };
        let dense = log_derivative_unit(shifted.unit_part()?)?;
        let mut out = dense;
        if !self.offset.is_zero() {
            out[0] = Qt::from_rational(self.offset.clone());
        }
        Ok(out)
    }

    /// Formal logarithm of `1 + O(q)`.
    pub fn log_unit(&self) -> Result<Self> {
        let a = self.unit_part()?;
        let ld = log_derivative_unit(a)?;
        let coeffs = ld
            .iter()
            .enumerate()
            .map(|(n, c)| {
                if n == 0 {
                    Qt::zero()
                } else {
                    c.scale(&Rational::new(1.into(), (n as i64).into()))
                }
            })
            .collect();
        Ok(Self::new(Rational::zero(), coeffs))
    }

    /// Formal exponential of a series without constant or polar terms.
    pub fn exp_zero(&self) -> Result<Self> {
        let t = self.abs_precision();
        if t <= Rational::zero() {
            return Err(Error::InvalidArgument("exp of a series known only to negative order".into()));
        }
        if !t.is_integer() || (!self.offset.is_integer() && !self.is_zero()) {
            return Err(Error::FractionalOffset(self.offset.to_string()));
        }
        use num_traits::ToPrimitive;
        let t = t.to_integer().to_usize().expect("small truncation");
        let mut g = vec![Qt::zero(); t];
        if !self.is_zero() {
            let start = self.int_offset()?;
            if start <= 0 {
                return Err(Error::NonzeroConstant);
            }
            for (k, c) in self.coeffs.iter().enumerate() {
                g[start as usize + k] = c.clone();
            }
        }
        Ok(Self::new(Rational::zero(), exp_dense(&g)?))
    }

    /// Maps every coefficient through `f`.
    pub fn map_coeffs(&self, f: impl Fn(&Qt) -> Result<Qt>) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(f).collect::<Result<_>>()?;
        Ok(Self::new(self.offset.clone(), coeffs))
    }

    /// True when both series agree on their common range of known exponents.
    pub fn agrees_with(&self, other: &Self) -> bool {
        if self.offset_gap(other).is_err() {
            return false;
        }
        let mut e = std::cmp::min(&self.offset, &other.offset).clone();
        let hi = std::cmp::min(self.abs_precision(), other.abs_precision());
        while e < hi {
            if self.coeff_rel(&e) != other.coeff_rel(&e) {
                return false;
            }
            e += Rational::one();
        }
        true
    }

    fn coeff_rel(&self, exponent: &Rational) -> Qt {
        let k = exponent - &self.offset;
        if !k.is_integer() || k < Rational::zero() {
            return Qt::zero();
        }
        use num_traits::ToPrimitive;
        let k = k.to_integer().to_usize().unwrap_or(usize::MAX);
        self.coeffs.get(k).cloned().unwrap_or_else(Qt::zero)
    }
}

/// `theta(f)/f` for `f = a[0] + a[1] q + ...` with `a[0] = 1`; entry 0 is 0.
pub(crate) fn log_derivative_unit(a: &[Qt]) -> Result<Vec<Qt>> {
    // theta f = f * L  =>  L_n = n a_n - sum_{k=1}^{n-1} a_k L_{n-k}
    let t = a.len();
    let mut l = vec![Qt::zero(); t];
    for n in 1..t {
        let mut acc = a[n].scale_int(n as i64);
        for k in 1..n {
            if a[k].is_zero() || l[n - k].is_zero() {
                continue;
            }
            acc = acc.checked_sub(&a[k].checked_mul(&l[n - k])?)?;
        }
        l[n] = acc;
    }
    Ok(l)
}

/// `exp(g)` for a dense `g` with `g[0] = 0`.
pub(crate) fn exp_dense(g: &[Qt]) -> Result<Vec<Qt>> {
    // theta E = E * theta g  =>  E_n = (1/n) sum_{k=1}^n k g_k E_{n-k}
    let t = g.len();
    let mut e = vec![Qt::zero(); t];
    if t == 0 {
        return Ok(e);
    }
    e[0] = Qt::one();
    let kg: Vec<Qt> = g.iter().enumerate().map(|(k, c)| c.scale_int(k as i64)).collect();
    for n in 1..t {
        let mut acc = Qt::zero();
        for k in 1..=n {
            if kg[k].is_zero() || e[n - k].is_zero() {
                continue;
            }
            acc = acc.checked_add(&kg[k].checked_mul(&e[n - k])?)?;
        }
        e[n] = acc.scale(&Rational::new(BigInt::one(), BigInt::from(n as i64)));
    }
    Ok(e)
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = &self.offset + rat(k as i64);
            let term = if c.terms().len() > 1 { format!("({c})") } else { c.to_string() };
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if e.is_zero() {
                write!(f, "{term}")?;
            } else {
                write!(f, "{term}*q^{e}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.abs_precision())
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QSeries({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    offset: String,
    coeffs: Vec<String>,
    truncation: usize,
}

impl From<QSeries> for SeriesJson {
    fn from(s: QSeries) -> Self {
        SeriesJson {
            offset: s.offset.to_string(),
            truncation: s.coeffs.len(),
            coeffs: s.coeffs.iter().map(|c| c.to_string()).collect(),
        }
    }
}

impl TryFrom<SeriesJson> for QSeries {
    type Error = Error;
    fn try_from(j: SeriesJson) -> Result<Self> {
        let offset: Rational = j.offset.parse().map_err(|_| Error::Parse(format!("bad offset {:?}", j.offset)))?;
        let mut coeffs = j.coeffs.iter().map(|c| c.parse()).collect::<Result<Vec<Qt>>>()?;
        if coeffs.len() > j.truncation {
            return Err(Error::Parse("more coefficients than the truncation".into()));
        }
        coeffs.resize(j.truncation, Qt::zero());
        Ok(QSeries::new(offset, coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(offset: i64, c: &[i64]) -> QSeries {
        QSeries::from_integers(offset, c)
    }

    #[test]
    fn geometric_series() {
        let one_minus_q = ints(0, &[1, -1, 0, 0, 0, 0]);
        let geo = ints(0, &[1, 1, 1, 1, 1, 1]);
        assert_eq!(one_minus_q.mul(&geo).unwrap(), QSeries::one(6));
        assert_eq!(one_minus_q.inverse().unwrap(), geo);
    }

    #[test]
    fn offsets_add_under_multiplication() {
        let a = QSeries::monomial(-1, 4);
        let b = QSeries::monomial(1, 4);
        let p = a.mul(&b).unwrap();
        assert_eq!(p, QSeries::one(4));
        assert_eq!(p.int_offset().unwrap(), 0);
        assert_eq!(a.div(&b).unwrap().int_offset().unwrap(), -2);
    }

    #[test]
    fn leading_zeros_are_stripped() {
        let s = ints(0, &[0, 0, 3, 1]);
        assert_eq!(s.int_offset().unwrap(), 2);
        assert_eq!(s.truncation(), 2);
        assert_eq!(s.abs_precision(), rat(4));
    }

    #[test]
    fn addition_takes_min_precision() {
        let a = ints(-1, &[1, 0, 2, 0]);
        let b = ints(0, &[5, 1]);
        let s = a.add(&b).unwrap();
        assert_eq!(s.abs_precision(), rat(2));
        assert_eq!(s.coeff(0), Some(Qt::from_integer(5)));
        assert_eq!(s.coeff(1), Some(Qt::from_integer(3)));
        assert_eq!(s.coeff(2), None);
    }

    #[test]
    fn fractional_offsets_must_align() {
        let a = QSeries::new(Rational::new(1.into(), 24.into()), vec![Qt::one(); 3]);
        let b = QSeries::one(3);
        assert!(matches!(a.add(&b), Err(Error::IncompatibleOffsets(..))));
        assert!(a.mul(&b).is_ok());
    }

    #[test]
    fn log_of_one_minus_q() {
        let f = ints(0, &[1, -1, 0, 0, 0, 0, 0, 0]);
        let l = f.log_unit().unwrap();
        for n in 1..8 {
            assert_eq!(l.coeff(n).unwrap(), Qt::from_frac(-1, n));
        }
        assert!(matches!(ints(0, &[2, 1]).log_unit(), Err(Error::NotAUnit(_))));
        assert!(matches!(ints(0, &[1, 1]).exp_zero(), Err(Error::NonzeroConstant)));
    }

    #[test]
    fn exp_log_inverse_pair() {
        let mut c = vec![0i64; 20];
        c[0] = 1;
        c[1] = 5;
        c[3] = 7;
        let f = ints(0, &c);
        assert_eq!(f.log_unit().unwrap().exp_zero().unwrap(), f);
    }

    #[test]
    fn theta_basics() {
        assert_eq!(QSeries::monomial(5, 3).theta().unwrap().coeff(5), Some(Qt::from_integer(5)));
        assert!(QSeries::constant(Qt::from_integer(7), 4).theta().unwrap().is_zero());
    }

    #[test]
    fn substitution() {
        let s = ints(0, &[1, 1]).substitute_power(3);
        assert_eq!(s, ints(0, &[1, 0, 0, 1, 0, 0]));
        assert_eq!(ints(-1, &[1, 2]).substitute_power(2).int_offset().unwrap(), -2);
    }

    #[test]
    fn json_round_trip() {
        let s = QSeries::new(rat(-1), vec![Qt::one(), Qt::sqrt(2), Qt::from_frac(1, 3)]);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"offset":"-1","coeffs":["1","sqrt(2)","1/3"],"truncation":3}"#);
        let back: QSeries = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }

    fn arb_series(t: usize) -> impl Strategy<Value = QSeries> {
        proptest::collection::vec((-9i64..9, -9i64..9), t).prop_map(|v| {
            let coeffs = v.iter().map(|(a, b)| Qt::from_integer(*a) + Qt::sqrt(2).scale_int(*b)).collect();
            QSeries::from_int_offset(0, coeffs)
        })
    }

    fn arb_unit(t: usize) -> impl Strategy<Value = QSeries> {
        proptest::collection::vec(-9i64..9, t).prop_map(|mut c| {
            c[0] = 1;
            QSeries::from_integers(0, &c)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn exp_log_round_trip(f in arb_unit(40)) {
            let g = f.log_unit().unwrap();
            prop_assert_eq!(g.exp_zero().unwrap(), f.clone());
            prop_assert_eq!(g.exp_zero().unwrap().log_unit().unwrap(), g);
        }

        #[test]
        fn theta_is_a_derivation(f in arb_series(12), g in arb_series(12)) {
            let lhs = f.mul(&g).unwrap().theta().unwrap();
            let rhs = f.theta().unwrap().mul(&g).unwrap().add(&f.mul(&g.theta().unwrap()).unwrap()).unwrap();
            prop_assert!(lhs.agrees_with(&rhs));
        }
    }
}
