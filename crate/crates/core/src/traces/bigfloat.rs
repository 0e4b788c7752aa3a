//! Binary floating point with a big-integer mantissa, and complex numbers
//! built on it. Transcendental functions run in fixed point internally.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{Qt, Rational};

/// `man * 2^exp`, rounded to `prec` significant bits after every operation.
#[derive(Clone, Debug)]
pub struct BigFloat {
    man: BigInt,
    exp: i64,
    prec: u32,
}

fn shift_round(man: &BigInt, shift: u64) -> BigInt {
    if shift == 0 {
        return man.clone();
    }
    let half = BigInt::one() << (shift - 1);
    if man.is_negative() {
        -((-man + half) >> shift)
    } else {
        (man + half) >> shift
    }
}

impl BigFloat {
    fn normalize(man: BigInt, exp: i64, prec: u32) -> Self {
        if man.is_zero() {
            return Self { man, exp: 0, prec };
        }
        let bits = man.bits();
        if bits > prec as u64 {
            let shift = bits - prec as u64;
            Self::normalize(shift_round(&man, shift), exp + shift as i64, prec)
        } else {
            Self { man, exp, prec }
        }
    }

    pub fn zero(prec: u32) -> Self {
        Self {
            man: BigInt::zero(),
            exp: 0,
            prec,
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_int(1, prec)
    }

    pub fn from_int(n: impl Into<BigInt>, prec: u32) -> Self {
        Self::normalize(n.into(), 0, prec)
    }

    pub fn from_rational(x: &Rational, prec: u32) -> Self {
        let (num, den) = (x.numer(), x.denom());
        if num.is_zero() {
            return Self::zero(prec);
        }
        let k = (prec as i64 + den.bits() as i64 - num.bits() as i64 + 2).max(0);
        Self::normalize((num << k as u64) / den, -k, prec)
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        if x == 0.0 || !x.is_finite() {
            return Self::zero(prec);
        }
        let e = x.abs().log2().floor() as i64 - 60;
        let man = (x / 2f64.powi(e as i32)).round() as i64;
        Self::normalize(BigInt::from(man), e, prec)
    }

    /// `round(self * 2^w)`.
    pub(crate) fn to_fixed(&self, w: i64) -> BigInt {
        let s = self.exp + w;
        if s >= 0 {
            &self.man << s as u64
        } else {
            shift_round(&self.man, (-s) as u64)
        }
    }

    pub(crate) fn from_fixed(v: BigInt, w: i64, prec: u32) -> Self {
        Self::normalize(v, -w, prec)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self::normalize(self.man.clone(), self.exp, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    /// `floor(log2 |x|) + 1`, or `i64::MIN` for zero.
    pub fn magnitude(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.man.bits() as i64 + self.exp
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            man: -&self.man,
            exp: self.exp,
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            man: self.man.abs(),
            exp: self.exp,
            prec: self.prec,
        }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self {
            man: self.man.clone(),
            exp: self.exp + k,
            prec: self.prec,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let prec = self.prec.max(o.prec);
        if self.is_zero() {
            return o.with_prec(prec);
        }
        if o.is_zero() {
            return self.with_prec(prec);
        }
        let slack = prec as i64 + 4;
        if self.magnitude() > o.magnitude() + slack {
            return self.with_prec(prec);
        }
        if o.magnitude() > self.magnitude() + slack {
            return o.with_prec(prec);
        }
        let e = self.exp.min(o.exp);
        let man = (&self.man << (self.exp - e) as u64) + (&o.man << (o.exp - e) as u64);
        Self::normalize(man, e, prec)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::normalize(&self.man * &o.man, self.exp + o.exp, self.prec.max(o.prec))
    }

    pub fn mul_int(&self, n: i64) -> Self {
        Self::normalize(&self.man * n, self.exp, self.prec)
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let prec = self.prec.max(o.prec);
        let k = (prec as i64 + o.man.bits() as i64 - self.man.bits() as i64 + 2).max(0);
        Ok(Self::normalize((&self.man << k as u64) / &o.man, self.exp - k - o.exp, prec))
    }

    pub fn div_int(&self, n: i64) -> Result<Self> {
        self.div(&Self::from_int(n, self.prec))
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.is_negative() {
            return Err(Error::InvalidArgument("square root of a negative number".into()));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let mut s = (2 * self.prec as i64 + 2 - self.man.bits() as i64).max(0);
        if (self.exp - s) % 2 != 0 {
            s += 1;
        }
        let m = (&self.man << s as u64).sqrt();
        Ok(Self::normalize(m, (self.exp - s) / 2, self.prec))
    }

    /// Nearest integer (ties away from zero).
    pub fn round(&self) -> BigInt {
        self.to_fixed(0)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits() as i64;
        let drop = (bits - 60).max(0);
        let head = (&self.man >> drop as u64).to_f64().unwrap_or(f64::NAN);
        let e = self.exp + drop;
        head * 2f64.powi(e.clamp(-2000, 2000) as i32)
    }

    /// Positional decimal with `sig` significant digits.
    pub fn to_decimal(&self, sig: usize) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let sig = sig.max(1) as i64;
        let e10 = ((self.magnitude() - 1) as f64 * std::f64::consts::LOG10_2).floor() as i64;
        let mut k = sig - 1 - e10;
        let mut n = self.scaled_by_pow10(k);
        // the estimate of log10 may be one too small
        if n.to_string().len() as i64 > sig {
            k -= 1;
            n = self.scaled_by_pow10(k);
        }
        let mut digits = n.to_string();
        let sign = if self.is_negative() { "-" } else { "" };
        if k <= 0 {
            digits.extend(std::iter::repeat_n('0', (-k) as usize));
            return format!("{sign}{digits}");
        }
        let k = k as usize;
        if digits.len() <= k {
            digits = "0".repeat(k + 1 - digits.len()) + &digits;
        }
        let split = digits.len() - k;
        format!("{sign}{}.{}", &digits[..split], &digits[split..])
    }

    /// `round(|x| 10^k)`.
    fn scaled_by_pow10(&self, k: i64) -> BigInt {
        let ten = BigInt::from(10);
        if k >= 0 {
            let scaled = self.man.abs() * num_traits::pow(ten, k as usize);
            if self.exp >= 0 {
                scaled << self.exp as u64
            } else {
                shift_round(&scaled, (-self.exp) as u64)
            }
        } else {
            let p = num_traits::pow(ten, (-k) as usize);
            (self.abs().to_fixed(1) + &p) / (p * 2)
        }
    }

    pub fn cmp_abs(&self, o: &Self) -> Ordering {
        self.abs().sub(&o.abs()).sign_ordering()
    }

    fn sign_ordering(&self) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    pub fn lt(&self, o: &Self) -> bool {
        self.sub(o).sign_ordering() == Ordering::Less
    }

    pub fn pi(prec: u32) -> Self {
        cached("pi", prec, || {
            let w = prec as i64 + 32;
            let v = atan_inv(5, w) * 16 - atan_inv(239, w) * 4;
            Self::from_fixed(v, w, prec)
        })
    }

    pub fn ln2(prec: u32) -> Self {
        cached("ln2", prec, || {
            let w = prec as i64 + 32;
            let mut sum = BigInt::zero();
            let mut term = BigInt::one() << w as u64;
            let mut k = 1i64;
            loop {
                term >>= 1;
                if term.is_zero() {
                    break;
                }
                sum += &term / k;
                k += 1;
            }
            Self::from_fixed(sum, w, prec)
        })
    }

    pub fn exp(&self) -> Result<Self> {
        let prec = self.prec;
        if self.is_zero() {
            return Ok(Self::one(prec));
        }
        let approx = self.to_f64() / std::f64::consts::LN_2;
        if !approx.is_finite() || approx.abs() > 1e15 {
            return Err(Error::InvalidArgument("exponent out of range".into()));
        }
        let n = approx.round() as i64;
        let extra = 64 - (n.unsigned_abs() | 1).leading_zeros();
        let work = prec + extra + 16;
        let r = self.with_prec(work).sub(&Self::ln2(work).mul_int(n));
        let halvings = (prec as f64).sqrt() as u64 + 1;
        let w = prec as i64 + 2 * halvings as i64 + 32;
        let y = r.to_fixed(w) >> halvings;
        let one = BigInt::one() << w as u64;
        let mut sum = one.clone();
        let mut term = one;
        let mut k = 1i64;
        loop {
            term = ((term * &y) >> w as u64) / k;
            if term.is_zero() {
                break;
            }
            sum += &term;
            k += 1;
        }
        for _ in 0..halvings {
            sum = (&sum * &sum) >> w as u64;
        }
        Ok(Self::from_fixed(sum, w, prec).mul_pow2(n))
    }
}

/// `sum (-1)^k / ((2k+1) n^(2k+1))` in fixed point.
fn atan_inv(n: i64, w: i64) -> BigInt {
    let mut x = (BigInt::one() << w as u64) / n;
    let n2 = n * n;
    let mut sum = x.clone();
    let mut k = 1i64;
    loop {
        x /= n2;
        if x.is_zero() {
            break;
        }
        let t = &x / (2 * k + 1);
        if k % 2 == 1 {
            sum -= t;
        } else {
            sum += t;
        }
        k += 1;
    }
    sum
}

thread_local! {
    static CONSTANTS: RefCell<HashMap<(&'static str, u32), BigFloat>> = RefCell::new(HashMap::new());
}

fn cached(name: &'static str, prec: u32, f: impl FnOnce() -> BigFloat) -> BigFloat {
    if let Some(v) = CONSTANTS.with(|c| c.borrow().get(&(name, prec)).cloned()) {
        return v;
    }
    let v = f();
    CONSTANTS.with(|c| c.borrow_mut().insert((name, prec), v.clone()));
    v
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (self.prec as f64 * std::f64::consts::LOG10_2) as usize;
        f.write_str(&self.to_decimal(digits))
    }
}

#[derive(Clone, Debug)]
pub struct BigComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl BigComplex {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        Self { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Self::new(BigFloat::zero(prec), BigFloat::zero(prec))
    }

    pub fn one(prec: u32) -> Self {
        Self::new(BigFloat::one(prec), BigFloat::zero(prec))
    }

    pub fn from_real(re: BigFloat) -> Self {
        let prec = re.prec;
        Self::new(re, BigFloat::zero(prec))
    }

    pub fn from_rational(x: &Rational, prec: u32) -> Self {
        Self::from_real(BigFloat::from_rational(x, prec))
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        Self::new(BigFloat::from_f64(re, prec), BigFloat::from_f64(im, prec))
    }

    /// Numeric value of an exact tower element; `sqrt(r)` for `r < 0` is `i sqrt(|r|)`.
    pub fn from_qt(x: &Qt, prec: u32) -> Self {
        let mut re = BigFloat::zero(prec);
        let mut im = BigFloat::zero(prec);
        for (r, c) in x.terms() {
            let mut v = BigFloat::from_rational(c, prec);
            if r.abs() != 1 {
                let root = BigFloat::from_int(r.abs(), prec).sqrt().expect("positive");
                v = v.mul(&root);
            }
            if *r < 0 {
                im = im.add(&v);
            } else {
                re = re.add(&v);
            }
        }
        Self::new(re, im)
    }

    pub fn prec(&self) -> u32 {
        self.re.prec.max(self.im.prec)
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self::new(self.re.with_prec(prec), self.im.with_prec(prec))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.re.neg(), self.im.neg())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), self.im.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        )
    }

    pub fn scale(&self, x: &BigFloat) -> Self {
        Self::new(self.re.mul(x), self.im.mul(x))
    }

    pub fn mul_i(&self) -> Self {
        Self::new(self.im.neg(), self.re.clone())
    }

    pub fn norm_sqr(&self) -> BigFloat {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn abs(&self) -> BigFloat {
        self.norm_sqr().sqrt().expect("nonnegative")
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm_sqr();
        Ok(Self::new(self.re.div(&n)?, self.im.neg().div(&n)?))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one(self.prec());
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b);
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b);
            }
        }
        Ok(acc)
    }

    /// `e^(2 pi i x)` for real `x`.
    pub fn exp_2pi_i(x: &BigFloat) -> Self {
        let prec = x.prec;
        let work = prec + 16;
        let frac = x
            .with_prec(work + x.magnitude().max(0) as u32)
            .sub(&BigFloat::from_int(x.round(), work));
        let theta = frac.mul(&BigFloat::pi(work).mul_pow2(1));
        let halvings = (prec as f64).sqrt() as u64 + 1;
        let w = prec as i64 + 2 * halvings as i64 + 32;
        let y = theta.to_fixed(w) >> halvings;
        let one = BigInt::one() << w as u64;
        let (mut cr, mut ci) = (one.clone(), BigInt::zero());
        let (mut tr, mut ti) = (one, BigInt::zero());
        let mut k = 1i64;
        loop {
            // term *= i y / k
            let nr = -((&ti * &y) >> w as u64) / k;
            let ni = ((&tr * &y) >> w as u64) / k;
            tr = nr;
            ti = ni;
            if tr.is_zero() && ti.is_zero() {
                break;
            }
            cr += &tr;
            ci += &ti;
            k += 1;
        }
        for _ in 0..halvings {
            let r = (&cr * &cr - &ci * &ci) >> w as u64;
            let i = (&cr * &ci * 2) >> w as u64;
            cr = r;
            ci = i;
        }
        Self::new(BigFloat::from_fixed(cr, w, prec), BigFloat::from_fixed(ci, w, prec))
    }

    /// `e^(2 pi i tau)`.
    pub fn q_of(tau: &BigComplex) -> Result<Self> {
        let prec = tau.prec();
        let two_pi = BigFloat::pi(prec + 16).mul_pow2(1);
        let radius = tau.im.with_prec(prec + 16).mul(&two_pi).neg().exp()?.with_prec(prec);
        Ok(Self::exp_2pi_i(&tau.re).scale(&radius))
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn to_decimal(&self, sig: usize) -> (String, String) {
        (self.re.to_decimal(sig), self.im.to_decimal(sig))
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*i", self.re, self.im)
    }
}

impl Serialize for BigComplex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let digits = (self.prec() as f64 * std::f64::consts::LOG10_2) as usize;
        let mut st = s.serialize_struct("BigComplex", 3)?;
        st.serialize_field("re", &self.re.to_decimal(digits))?;
        st.serialize_field("im", &self.im.to_decimal(digits))?;
        st.serialize_field("precision_bits", &self.prec().to_string())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn close(a: &BigFloat, b: &BigFloat, bits: i64) -> bool {
        let d = a.sub(b);
        d.is_zero() || d.magnitude() < b.magnitude().max(1) - bits
    }

    #[test]
    fn arithmetic_round_trips() {
        let a = BigFloat::from_rational(&Rational::new(355.into(), 113.into()), P);
        let b = BigFloat::from_int(7, P);
        assert!(close(&a.mul(&b).div(&b).unwrap(), &a, 250));
        assert!(close(&a.add(&b).sub(&b), &a, 250));
        let two = BigFloat::from_int(2, P);
        let r = two.sqrt().unwrap();
        assert!(close(&r.mul(&r), &two, 250));
        assert_eq!(BigFloat::from_int(-17, P).round(), BigInt::from(-17));
        assert_eq!(
            BigFloat::from_rational(&Rational::new(5.into(), 2.into()), P).round(),
            BigInt::from(3)
        );
    }

    #[test]
    fn constants_match_known_digits() {
        assert!(BigFloat::pi(P)
            .to_decimal(40)
            .starts_with("3.141592653589793238462643383279502884197"));
        assert!(BigFloat::ln2(P).to_decimal(30).starts_with("0.693147180559945309417232121458"));
        let e = BigFloat::one(P).exp().unwrap();
        assert!(e.to_decimal(30).starts_with("2.71828182845904523536028747135"));
    }

    #[test]
    fn exp_is_a_homomorphism() {
        let x = BigFloat::from_rational(&Rational::new((-37).into(), 3.into()), P);
        let y = BigFloat::from_rational(&Rational::new(11.into(), 7.into()), P);
        let lhs = x.add(&y).exp().unwrap();
        let rhs = x.exp().unwrap().mul(&y.exp().unwrap());
        assert!(close(&lhs, &rhs, 245));
    }

    #[test]
    fn roots_of_unity() {
        // e^(2 pi i / 8)^8 = 1 and e^(2 pi i / 4) = i
        let x = BigFloat::from_rational(&Rational::new(1.into(), 8.into()), P);
        let z = BigComplex::exp_2pi_i(&x);
        let z8 = z.pow(8).unwrap();
        assert!(close(&z8.re, &BigFloat::one(P), 240));
        assert!(z8.im.magnitude() < -240);
        let i = BigComplex::exp_2pi_i(&BigFloat::from_rational(&Rational::new(5.into(), 4.into()), P));
        assert!(i.re.magnitude() < -240);
        assert!(close(&i.im, &BigFloat::one(P), 240));
        let sqrt2 = BigFloat::from_int(2, P).sqrt().unwrap();
        assert!(close(&z.re.mul(&sqrt2), &BigFloat::one(P), 240));
    }

    #[test]
    fn decimal_formatting() {
        assert_eq!(BigFloat::from_int(1728, P).to_decimal(6), "1728.00");
        assert_eq!(BigFloat::from_int(-5, P).to_decimal(1), "-5");
        assert_eq!(BigFloat::from_int(123456, P).to_decimal(3), "123000");
        let third = BigFloat::from_rational(&Rational::new(1.into(), 3.into()), P);
        assert_eq!(third.to_decimal(5), "0.33333");
        let small = BigFloat::from_rational(&Rational::new(1.into(), 1000.into()), P);
        assert_eq!(small.to_decimal(2), "0.0010");
    }

    #[test]
    fn tower_numbers_convert() {
        let x = Qt::from_frac(-9, 2) + Qt::sqrt(-3).scale_int(-3).scale(&Rational::new(1.into(), 2.into()));
        let z = BigComplex::from_qt(&x, P);
        assert!((z.re.to_f64() + 4.5).abs() < 1e-15);
        assert!((z.im.to_f64() + 1.5 * 3f64.sqrt()).abs() < 1e-14);
    }
}
