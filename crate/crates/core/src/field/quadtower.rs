//! Exact arithmetic in biquadratic towers `Q(sqrt(s1), sqrt(s2))`.
//!
//! A [`QuadTowerNumber`] is stored as a sparse sum `sum_r x_r * sqrt(r)` over
//! squarefree radicands `r` (with `r = 1` for the rational part). For `r < 0`,
//! `sqrt(r)` means `i * sqrt(|r|)`, so `sqrt(-3) * sqrt(-3) = -3`. The
//! radicands occurring in a value must generate a group of rank at most two
//! modulo squares; anything larger is reported as [`Error::IncompatibleTower`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::arith::{is_squarefree, squarefree_decomposition};
use super::Rational;
use crate::error::{Error, Result};

/// `sqrt(a) * sqrt(b) = coef * sqrt(s)` for squarefree `a`, `b`.
fn radical_product(a: i64, b: i64) -> (i64, i64) {
    let g = num_integer::gcd(a.unsigned_abs(), b.unsigned_abs()) as i64;
    let s = (a as i128 * b as i128 / (g as i128 * g as i128)) as i64;
    let sign = if a < 0 && b < 0 { -1 } else { 1 };
    (sign * g, s)
}

/// Squarefree class of `a * b`.
fn class_product(a: i64, b: i64) -> i64 {
    radical_product(a, b).1
}

/// A basis (of size at most two) of the group generated by `radicands`
/// modulo squares.
fn span_basis(radicands: impl IntoIterator<Item = i64>) -> Result<Vec<i64>> {
    let mut basis: Vec<i64> = Vec::with_capacity(2);
    let mut seen: Vec<i64> = Vec::new();
    for r in radicands {
        if r == 1 || seen.contains(&r) {
            continue;
        }
        seen.push(r);
        if coordinates(r, &basis).is_none() {
            basis.push(r);
            if basis.len() > 2 {
                seen.sort_unstable();
                return Err(Error::IncompatibleTower(seen));
            }
        }
    }
    Ok(basis)
}

/// Coordinates of `r` over a basis of size <= 2, if `r` lies in its span.
fn coordinates(r: i64, basis: &[i64]) -> Option<(u8, u8)> {
    if r == 1 {
        return Some((0, 0));
    }
    match basis {
        [] => None,
        [b1] => (r == *b1).then_some((1, 0)),
        [b1, b2] => {
            if r == *b1 {
                Some((1, 0))
            } else if r == *b2 {
                Some((0, 1))
            } else if r == class_product(*b1, *b2) {
                Some((1, 1))
            } else {
                None
            }
        }
        _ => unreachable!("basis has at most two elements"),
    }
}

/// An exact element of a biquadratic field `Q(sqrt(s1), sqrt(s2))`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QuadTowerNumber {
    /// Sorted by radicand; coefficients are nonzero; radicands squarefree.
    terms: Vec<(i64, Rational)>,
}

pub type Qt = QuadTowerNumber;

impl QuadTowerNumber {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rational(Rational::from_integer(n))
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        Self::from_rational(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(x: Rational) -> Self {
        if x.is_zero() {
            Self::zero()
        } else {
            Self { terms: vec![(1, x)] }
        }
    }

    /// `x * sqrt(n)` for an arbitrary nonzero integer `n`, canonicalized so the
    /// radicand is squarefree (`sqrt(8) = 2 sqrt(2)`).
    pub fn rational_times_sqrt(x: Rational, n: i64) -> Self {
        if n == 0 || x.is_zero() {
            return Self::zero();
        }
        let (g, s) = squarefree_decomposition(n);
        let coef = x * Rational::from_integer(BigInt::from(g));
        Self { terms: vec![(s, coef)] }
    }

    /// The principal square root of `n` (`i sqrt(|n|)` for negative `n`).
    pub fn sqrt(n: i64) -> Self {
        Self::rational_times_sqrt(Rational::one(), n)
    }

    /// Builds `x0 + x1 sqrt(s1) + x2 sqrt(s2) + x3 sqrt(s3)` with
    /// `s3` the squarefree part of `s1 s2`.
    pub fn from_components(s1: i64, s2: i64, x: [Rational; 4]) -> Result<Self> {
        for s in [s1, s2] {
            if !is_squarefree(s) {
                return Err(Error::InvalidArgument(format!("radicand {s} is not squarefree")));
            }
        }
        let s3 = class_product(s1, s2);
        let [x0, x1, x2, x3] = x;
        let parts = [(1, x0), (s1, x1), (s2, x2), (s3, x3)];
        parts
            .into_iter()
            .map(|(r, c)| Self::rational_times_sqrt(c, r))
            .try_fold(Self::zero(), |acc, t| acc.checked_add(&t))
    }

    fn from_terms(mut raw: Vec<(i64, Rational)>) -> Self {
        raw.sort_by_key(|a| a.0);
        let mut terms: Vec<(i64, Rational)> = Vec::with_capacity(raw.len());
        for (r, c) in raw {
            match terms.last_mut() {
                Some((lr, lc)) if *lr == r => *lc += c,
                _ => terms.push((r, c)),
            }
        }
        terms.retain(|(_, c)| !c.is_zero());
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 1 && self.terms[0].1.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.terms.iter().all(|(r, _)| *r == 1)
    }

    /// The value as a rational, if it is one.
    pub fn to_rational(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(1, c)] => Some(c.clone()),
            _ => None,
        }
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        self.to_rational().filter(|r| r.is_integer()).map(|r| r.to_integer())
    }

    /// Coefficient of `sqrt(r)` for a squarefree radicand `r`.
    pub fn coefficient(&self, r: i64) -> Rational {
        self.terms
            .iter()
            .find(|(s, _)| *s == r)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Squarefree radicands carrying nonzero coefficients (including 1).
    pub fn radicands(&self) -> impl Iterator<Item = i64> + '_ {
        self.terms.iter().map(|(r, _)| *r)
    }

    pub fn terms(&self) -> &[(i64, Rational)] {
        &self.terms
    }

    /// The canonical tower `(s1, s2)` of this value: generators of the group
    /// spanned by its radicands, chosen as the two smallest nontrivial
    /// elements by absolute value (ties broken negative first). Missing
    /// generators are reported as 1.
    pub fn tower(&self) -> (i64, i64) {
        let basis = span_basis(self.radicands()).expect("stored values have rank <= 2");
        match basis.as_slice() {
            [] => (1, 1),
            [b] => (*b, 1),
            [b1, b2] => {
                let mut all = [*b1, *b2, class_product(*b1, *b2)];
                all.sort_by(|x, y| x.abs().cmp(&y.abs()).then(x.cmp(y)));
                (all[0], all[1])
            }
            _ => unreachable!(),
        }
    }

    /// `[x0, x1, x2, x3]` relative to [`tower`](Self::tower).
    pub fn components(&self) -> (i64, i64, [Rational; 4]) {
        let (s1, s2) = self.tower();
        let s3 = class_product(s1, s2);
        let x0 = self.coefficient(1);
        let x1 = if s1 == 1 { Rational::zero() } else { self.coefficient(s1) };
        let x2 = if s2 == 1 { Rational::zero() } else { self.coefficient(s2) };
        let x3 = if s1 == 1 || s2 == 1 {
            Rational::zero()
        } else {
            self.coefficient(s3)
        };
        (s1, s2, [x0, x1, x2, x3])
    }

    fn check_union(&self, other: &Self) -> Result<()> {
        if self.terms.len() + other.terms.len() <= 3 {
            // at most two non-rational radicands
            let nontrivial = self.radicands().chain(other.radicands()).filter(|&r| r != 1);
            if nontrivial.count() <= 2 {
                return Ok(());
            }
        }
        span_basis(self.radicands().chain(other.radicands())).map(|_| ())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        self.check_union(other)?;
        Ok(self.add_unchecked(other))
    }

    fn add_unchecked(&self, other: &Self) -> Self {
        let mut out: Vec<(i64, Rational)> = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ra, ca) = &self.terms[i];
            let (rb, cb) = &other.terms[j];
            match ra.cmp(rb) {
                Ordering::Less => {
                    out.push((*ra, ca.clone()));
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((*rb, cb.clone()));
                    j += 1;
                }
                Ordering::Equal => {
                    let s = ca + cb;
                    if !s.is_zero() {
                        out.push((*ra, s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(other.terms[j..].iter().cloned());
        Self { terms: out }
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        if let [(1, c)] = other.terms.as_slice() {
            return Ok(self.scale(c));
        }
        if let [(1, c)] = self.terms.as_slice() {
            return Ok(other.scale(c));
        }
        self.check_union(other)?;
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ra, ca) in &self.terms {
            for (rb, cb) in &other.terms {
                let (coef, s) = radical_product(*ra, *rb);
                let mut c = ca * cb;
                if coef != 1 {
                    c *= Rational::from_integer(BigInt::from(coef));
                }
                raw.push((s, c));
            }
        }
        Ok(Self::from_terms(raw))
    }

    pub fn scale(&self, x: &Rational) -> Self {
        if x.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(r, c)| (*r, c * x)).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&Rational::from_integer(BigInt::from(n)))
    }

    fn neg_ref(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(r, c)| (*r, -c)).collect(),
        }
    }

    /// Galois conjugate negating the square roots with odd `which`-coordinate
    /// over `basis`.
    fn conjugate(&self, basis: &[i64], which: usize) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(r, c)| {
                    let (e1, e2) = coordinates(*r, basis).expect("radicand in span");
                    let flip = if which == 0 { e1 } else { e2 };
                    (*r, if flip == 1 { -c } else { c.clone() })
                })
                .collect(),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let basis = span_basis(self.radicands())?;
        match basis.len() {
            0 => Ok(Self::from_rational(self.terms[0].1.recip())),
            1 => {
                let c1 = self.conjugate(&basis, 0);
                let norm = self.checked_mul(&c1)?.to_rational().expect("norm is rational");
                Ok(c1.scale(&norm.recip()))
            }
            _ => {
                let c1 = self.conjugate(&basis, 0);
                let y = self.checked_mul(&c1)?;
                let c2 = y.conjugate(&basis, 1);
                let norm = y.checked_mul(&c2)?.to_rational().expect("norm is rational");
                Ok(c1.checked_mul(&c2)?.scale(&norm.recip()))
            }
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = other.to_rational() {
            return Ok(self.scale(&r.recip()));
        }
        self.check_union(other)?;
        self.checked_mul(&other.inv()?)
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    /// Numeric value as `(re, im)` in double precision, for diagnostics.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (r, c) in &self.terms {
            let x = rational_to_f64(c) * (r.unsigned_abs() as f64).sqrt();
            if *r < 0 {
                im += x;
            } else {
                re += x;
            }
        }
        (re, im)
    }
}

pub(crate) fn rational_to_f64(x: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

fn fmt_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl fmt::Display for QuadTowerNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // rational part first, then radicands by absolute value
        let mut ordered: Vec<&(i64, Rational)> = self.terms.iter().collect();
        ordered.sort_by(|a, b| (a.0 != 1).cmp(&(b.0 != 1)).then(a.0.abs().cmp(&b.0.abs())).then(a.0.cmp(&b.0)));
        for (i, (r, c)) in ordered.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            if *r == 1 {
                write!(f, "{}", fmt_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "sqrt({r})")?;
            } else {
                write!(f, "{}*sqrt({r})", fmt_rational(&mag))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for QuadTowerNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Qt({self})")
    }
}

fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

fn parse_term(term: &str) -> Result<QuadTowerNumber> {
    let term = term.trim();
    let bad = || Error::Parse(format!("bad term {term:?}"));
    let (coef, rad) = match term.find("sqrt(") {
        Some(pos) => {
            let inner = term[pos + 5..].strip_suffix(')').ok_or_else(bad)?;
            let n: i64 = inner.trim().parse().map_err(|_| bad())?;
            let head = term[..pos].trim().trim_end_matches('*').trim();
            let coef = match head {
                "" | "+" => Rational::one(),
                "-" => -Rational::one(),
                h => parse_rational(h)?,
            };
            (coef, n)
        }
        None => (parse_rational(term)?, 1),
    };
    Ok(QuadTowerNumber::rational_times_sqrt(coef, rad))
}

impl FromStr for QuadTowerNumber {
    type Err = Error;

    /// Parses the [`Display`](fmt::Display) format, e.g. `-3/2 - 3/2*sqrt(-3)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty number".into()));
        }
        let mut terms = Vec::new();
        let mut depth = 0;
        let mut start = 0;
        let bytes = s.as_bytes();
        for (i, &ch) in bytes.iter().enumerate() {
            match ch {
                b'(' => depth += 1,
                b')' => depth -= 1,
                b'+' | b'-' if depth == 0 && i > 0 => {
                    let prev = s[..i].trim_end();
                    let splits = !prev.is_empty() && !prev.ends_with(['*', '/', '+', '-']);
                    if splits {
                        terms.push(&s[start..i]);
                        start = i;
                    }
                }
                _ => {}
            }
        }
        terms.push(&s[start..]);
        let mut acc = QuadTowerNumber::zero();
        for t in terms {
            let t = t.trim();
            let (neg, body) = match t.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, t.strip_prefix('+').unwrap_or(t)),
            };
            let mut v = parse_term(body)?;
            if neg {
                v = -v;
            }
            acc = acc.checked_add(&v)?;
        }
        Ok(acc)
    }
}

#[derive(Serialize, Deserialize)]
struct QtFields {
    s1: String,
    s2: String,
    x0: String,
    x1: String,
    x2: String,
    x3: String,
}

impl Serialize for QuadTowerNumber {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let (s1, s2, x) = self.components();
        QtFields {
            s1: s1.to_string(),
            s2: s2.to_string(),
            x0: fmt_rational(&x[0]),
            x1: fmt_rational(&x[1]),
            x2: fmt_rational(&x[2]),
            x3: fmt_rational(&x[3]),
        }
        .serialize(serializer)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum QtRepr {
    Text(String),
    Fields(QtFields),
}

impl<'de> Deserialize<'de> for QuadTowerNumber {
    /// Accepts either the field object or the textual rendering.
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match QtRepr::deserialize(deserializer)? {
            QtRepr::Text(s) => s.parse().map_err(D::Error::custom),
            QtRepr::Fields(f) => {
                let int = |s: &str| s.trim().parse::<i64>().map_err(D::Error::custom);
                let rat = |s: &str| parse_rational(s).map_err(D::Error::custom);
                QuadTowerNumber::from_components(int(&f.s1)?, int(&f.s2)?, [rat(&f.x0)?, rat(&f.x1)?, rat(&f.x2)?, rat(&f.x3)?])
                    .map_err(D::Error::custom)
            }
        }
    }
}

impl std::ops::Neg for QuadTowerNumber {
    type Output = QuadTowerNumber;
    fn neg(self) -> Self {
        self.neg_ref()
    }
}

impl std::ops::Neg for &QuadTowerNumber {
    type Output = QuadTowerNumber;
    fn neg(self) -> QuadTowerNumber {
        self.neg_ref()
    }
}

// Operator sugar. These panic when the operands need more than two
// independent square roots; library code uses the `checked_*` methods.
macro_rules! forward_op {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl std::ops::$tr<&QuadTowerNumber> for &QuadTowerNumber {
            type Output = QuadTowerNumber;
            fn $method(self, rhs: &QuadTowerNumber) -> QuadTowerNumber {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl std::ops::$tr<QuadTowerNumber> for QuadTowerNumber {
            type Output = QuadTowerNumber;
            fn $method(self, rhs: QuadTowerNumber) -> QuadTowerNumber {
                (&self).$checked(&rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl std::ops::$tr<&QuadTowerNumber> for QuadTowerNumber {
            type Output = QuadTowerNumber;
            fn $method(self, rhs: &QuadTowerNumber) -> QuadTowerNumber {
                (&self).$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}

forward_op!(Add, add, checked_add);
forward_op!(Sub, sub, checked_sub);
forward_op!(Mul, mul, checked_mul);
forward_op!(Div, div, checked_div);

impl From<i64> for QuadTowerNumber {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<Rational> for QuadTowerNumber {
    fn from(x: Rational) -> Self {
        Self::from_rational(x)
    }
}

impl From<BigInt> for QuadTowerNumber {
    fn from(n: BigInt) -> Self {
        Self::from_bigint(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> Qt {
        s.parse().unwrap()
    }

    #[test]
    fn norm_identity() {
        let a = Qt::one() + Qt::sqrt(2);
        let b = Qt::one() - Qt::sqrt(2);
        assert_eq!(a * b, Qt::from_integer(-1));
    }

    #[test]
    fn squarefree_canonicalization() {
        assert_eq!(Qt::sqrt(8), Qt::sqrt(2).scale_int(2));
        assert_eq!(Qt::sqrt(8).to_string(), "2*sqrt(2)");
        assert_eq!(Qt::sqrt(-12).to_string(), "2*sqrt(-3)");
        assert_eq!(Qt::sqrt(1), Qt::one());
        assert_eq!(Qt::sqrt(13).to_string(), "sqrt(13)");
    }

    #[test]
    fn rationalization() {
        let inv = Qt::sqrt(2).inv().unwrap();
        assert_eq!(inv, Qt::rational_times_sqrt(Rational::new(1.into(), 2.into()), 2));
    }

    #[test]
    fn negative_radicands_follow_principal_branch() {
        assert_eq!(Qt::sqrt(-3) * Qt::sqrt(-3), Qt::from_integer(-3));
        assert_eq!(Qt::sqrt(-1) * Qt::sqrt(-3), -Qt::sqrt(3));
        assert_eq!(Qt::sqrt(-3) * Qt::sqrt(2), Qt::sqrt(-6));
    }

    #[test]
    fn biquadratic_inverse() {
        let x = q("1 + sqrt(2) + 3*sqrt(-3) - 1/2*sqrt(-6)");
        assert_eq!(x.tower(), (2, -3));
        let y = x.inv().unwrap();
        assert!((x * y).is_one());
    }

    #[test]
    fn three_radicands_rejected() {
        let x = Qt::sqrt(2) + Qt::sqrt(3);
        assert!(matches!(x.checked_add(&Qt::sqrt(5)), Err(Error::IncompatibleTower(_))));
        assert!(Qt::sqrt(2).checked_mul(&Qt::sqrt(3)).is_ok());
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(Qt::one().checked_div(&Qt::zero()), Err(Error::DivisionByZero));
        assert_eq!(Qt::zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn parse_and_render() {
        for s in [
            "0",
            "-3/2 - 3/2*sqrt(-3)",
            "3414528*sqrt(2)",
            "5 + sqrt(2) - sqrt(-3) + 2/7*sqrt(-6)",
        ] {
            assert_eq!(q(s).to_string(), s);
        }
        assert_eq!(q("1 + 2*sqrt(8)").to_string(), "1 + 4*sqrt(2)");
    }

    #[test]
    fn components_and_json() {
        let x = q("1/2 + 3*sqrt(2) - sqrt(-3)");
        let (s1, s2, comps) = x.components();
        assert_eq!((s1, s2), (2, -3));
        assert_eq!(comps[1], Rational::from_integer(3.into()));
        let json = serde_json::to_string(&x).unwrap();
        assert!(json.contains("\"x0\":\"1/2\""));
        let back: Qt = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
        let from_text: Qt = serde_json::from_str("\"-1/10\"").unwrap();
        assert_eq!(from_text, Qt::from_frac(-1, 10));
    }

    fn arb_qt() -> impl Strategy<Value = Qt> {
        (
            proptest::sample::select(vec![(2i64, -3i64), (5, 8), (-1, 2), (13, -3)]),
            proptest::collection::vec((-20i64..20, 1i64..6), 4),
        )
            .prop_map(|((s1, s2), c)| {
                let xs = c.iter().map(|(n, d)| Rational::new((*n).into(), (*d).into()));
                let xs: Vec<Rational> = xs.collect();
                let s1 = squarefree_decomposition(s1).1;
                let s2 = squarefree_decomposition(s2).1;
                Qt::from_components(s1, s2, [xs[0].clone(), xs[1].clone(), xs[2].clone(), xs[3].clone()]).unwrap()
            })
    }

    fn same_tower() -> impl Strategy<Value = (Qt, Qt, Qt)> {
        proptest::sample::select(vec![(2i64, -3i64), (5, 2), (-1, 2), (13, -3)]).prop_flat_map(|(s1, s2)| {
            let one = proptest::collection::vec((-20i64..20, 1i64..6), 4).prop_map(move |c| {
                let xs: Vec<Rational> = c.iter().map(|(n, d)| Rational::new((*n).into(), (*d).into())).collect();
                Qt::from_components(s1, s2, [xs[0].clone(), xs[1].clone(), xs[2].clone(), xs[3].clone()]).unwrap()
            });
            (one.clone(), one.clone(), one)
        })
    }

    proptest! {
        #[test]
        fn field_axioms((a, b, c) in same_tower()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a - &a).is_zero());
            if !a.is_zero() {
                prop_assert!((&a / &a).is_one());
                prop_assert_eq!(&(&b / &a) * &a, b.clone());
            }
        }

        #[test]
        fn render_parse_idempotent(a in arb_qt()) {
            let text = a.to_string();
            let back: Qt = text.parse().unwrap();
            prop_assert_eq!(&back, &a);
            prop_assert_eq!(back.to_string(), text);
        }
    }
}
