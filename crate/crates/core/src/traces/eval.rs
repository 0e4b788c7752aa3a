//! Numeric evaluation of [`FormSpec`] trees at points of the upper half-plane.
//!
//! Every leaf is summed from its own rapidly convergent expansion (pentagonal
//! sums for eta, Lambert-type sums for Eisenstein series), so nothing with
//! exponentially growing coefficients is ever truncated.

use std::collections::HashMap;

use num_bigint::BigInt;

use super::bigfloat::{BigComplex, BigFloat};
use crate::error::{Error, Result};
use crate::field::arith::sigma_k;
use crate::field::Rational;
use crate::qseries::{faber, ClassicalName, EtaQuotientSpec, FormSpec, QSeries};

/// Guard bits carried on top of the requested precision.
pub const GUARD_BITS: u32 = 64;

/// Smallest `T` with `|q|^T < 2^-(prec/2 + 32)` at `Im tau = im`.
pub fn auto_terms(im: f64, prec: u32) -> usize {
    let need = (prec as f64 / 2.0 + 32.0) * std::f64::consts::LN_2;
    ((need / (2.0 * std::f64::consts::PI * im)).ceil() as usize + 8).max(16)
}

/// `spec(tau)` from expansions truncated below `q^T`, checked against the
/// same evaluation at `2T`.
pub fn eval_at(spec: &FormSpec, tau: &BigComplex, prec: u32, terms: Option<usize>) -> Result<BigComplex> {
    let im = tau.im.to_f64();
    if tau.im.is_negative() || tau.im.is_zero() {
        return Err(Error::InvalidArgument("tau must lie in the upper half-plane".into()));
    }
    let t = terms.unwrap_or_else(|| auto_terms(im, prec));
    let work = prec + GUARD_BITS;
    let tau_w = tau.with_prec(work);
    let short = Leaves::new(&tau_w, t)?.eval(spec)?;
    let long = Leaves::new(&tau_w, 2 * t)?.eval(spec)?;
    tail_check(&short, &long, prec, t)?;
    Ok(long.with_prec(prec))
}

pub(crate) fn tail_check(short: &BigComplex, long: &BigComplex, prec: u32, t: usize) -> Result<()> {
    let diff = short.sub(long).abs();
    let size = long.abs().magnitude().max(1);
    if !diff.is_zero() && diff.magnitude() > size - (prec / 2) as i64 {
        return Err(Error::PrecisionLoss(format!(
            "truncations {t} and {} differ by 2^{} at magnitude 2^{size}",
            2 * t,
            diff.magnitude()
        )));
    }
    Ok(())
}

/// `q^h sum a(n) q^n` evaluated directly from the truncated expansion.
pub fn eval_qseries(s: &QSeries, tau: &BigComplex) -> Result<BigComplex> {
    let prec = tau.prec();
    let q = BigComplex::q_of(tau)?;
    let mut acc = BigComplex::zero(prec);
    for c in s.coeffs().iter().rev() {
        acc = acc.mul(&q).add(&BigComplex::from_qt(c, prec));
    }
    Ok(acc.mul(&q_power(tau, s.offset())?))
}

/// `e^(2 pi i r tau)` for rational `r`.
fn q_power(tau: &BigComplex, r: &Rational) -> Result<BigComplex> {
    let prec = tau.prec();
    let x = BigFloat::from_rational(r, prec);
    BigComplex::q_of(&tau.scale(&x))
}

struct Leaves {
    tau: BigComplex,
    q: BigComplex,
    t: usize,
    prec: u32,
    euler: HashMap<u64, BigComplex>,
}

impl Leaves {
    fn new(tau: &BigComplex, t: usize) -> Result<Self> {
        Ok(Self {
            tau: tau.clone(),
            q: BigComplex::q_of(tau)?,
            t,
            prec: tau.prec(),
            euler: HashMap::new(),
        })
    }

    fn q_pow(&self, m: u64) -> Result<BigComplex> {
        self.q.pow(m as i64)
    }

    /// `prod_{n >= 1} (1 - x^n)` at `x = q^m` by the pentagonal number theorem.
    fn euler(&mut self, m: u64) -> Result<BigComplex> {
        if let Some(v) = self.euler.get(&m) {
            return Ok(v.clone());
        }
        let x = self.q_pow(m)?;
        let limit = self.t as u64;
        let mut sum = BigComplex::one(self.prec);
        // p = x^{k(3k-1)/2}, xk = x^k after each step
        let mut p = BigComplex::one(self.prec);
        let mut xk = BigComplex::one(self.prec);
        let mut k: u64 = 1;
        loop {
            let g1 = k * (3 * k - 1) / 2;
            if m * g1 >= limit {
                break;
            }
            // g1(k) - g1(k-1) = 3(k-1) + 1
            p = p.mul(&xk.mul(&xk).mul(&xk).mul(&x));
            xk = xk.mul(&x);
            let mut term = p.clone();
            if m * (g1 + k) < limit {
                term = term.add(&p.mul(&xk));
            }
            sum = if k % 2 == 1 { sum.sub(&term) } else { sum.add(&term) };
            k += 1;
        }
        self.euler.insert(m, sum.clone());
        Ok(sum)
    }

    fn eta_quotient(&mut self, spec: &EtaQuotientSpec) -> Result<BigComplex> {
        let mut acc = q_power(&self.tau, &spec.offset())?;
        for &(m, r) in &spec.terms {
            acc = acc.mul(&self.euler(m)?.pow(r)?);
        }
        Ok(acc)
    }

    /// `1 + scale * sum sigma_{k-1}(n) x^n` at `x = q^m`.
    fn eisenstein(&self, k: u32, m: u64) -> Result<BigComplex> {
        let scale: i64 = match k {
            2 => -24,
            4 => 240,
            6 => -504,
            _ => return Err(Error::InvalidArgument(format!("Eisenstein series of weight {k} not supported"))),
        };
        let x = self.q_pow(m)?;
        let top = (self.t as u64).div_ceil(m).saturating_sub(1);
        let mut acc = BigComplex::zero(self.prec);
        for n in (1..=top).rev() {
            let s = BigFloat::from_int(BigInt::from(sigma_k(n, k - 1)), self.prec);
            acc = acc.add(&BigComplex::from_real(s)).mul(&x);
        }
        Ok(BigComplex::one(self.prec).add(&acc.scale(&BigFloat::from_int(scale, self.prec))))
    }

    fn delta(&mut self, m: u64) -> Result<BigComplex> {
        Ok(self.q_pow(m)?.mul(&self.euler(m)?.pow(24)?))
    }

    fn j(&mut self, m: u64) -> Result<BigComplex> {
        self.eisenstein(4, m)?.pow(3)?.div(&self.delta(m)?)
    }

    fn hauptmodul(&mut self, level: u64) -> Result<BigComplex> {
        match level {
            1 => self.j(1),
            7 => {
                let e = EtaQuotientSpec::new(7, vec![(1, 4), (7, -4)])?;
                Ok(self.eta_quotient(&e)?.add(&BigComplex::from_real(BigFloat::from_int(4, self.prec))))
            }
            9 => self.eta_quotient(&EtaQuotientSpec::new(9, vec![(1, 3), (9, -3)])?),
            _ => Err(Error::UnsupportedLevel(level)),
        }
    }

    fn eval(&mut self, spec: &FormSpec) -> Result<BigComplex> {
        let prec = self.prec;
        Ok(match spec {
            FormSpec::EtaQuotient { level, terms } => self.eta_quotient(&EtaQuotientSpec::new(*level, terms.clone())?)?,
            FormSpec::E2 { m } => self.eisenstein(2, *m)?,
            FormSpec::Classical { name, m } => match name {
                ClassicalName::E4 => self.eisenstein(4, *m)?,
                ClassicalName::E6 => self.eisenstein(6, *m)?,
                ClassicalName::Delta => self.delta(*m)?,
                ClassicalName::J => self.j(*m)?,
            },
            FormSpec::Constant { value } => BigComplex::from_qt(value, prec),
            FormSpec::Scale { factor, form } => self.eval(form)?.mul(&BigComplex::from_qt(factor, prec)),
            FormSpec::Sum { terms } => {
                let mut acc = BigComplex::zero(prec);
                for f in terms {
                    acc = acc.add(&self.eval(f)?);
                }
                acc
            }
            FormSpec::Product { terms } => {
                let mut acc = BigComplex::one(prec);
                for f in terms {
                    acc = acc.mul(&self.eval(f)?);
                }
                acc
            }
            FormSpec::Power { form, exponent } => self.eval(form)?.pow(*exponent)?,
            FormSpec::Hauptmodul { level } => self.hauptmodul(*level)?,
            FormSpec::Faber { level, n } => {
                let poly = faber(*level, *n, 2)?.poly;
                let h = self.hauptmodul(*level)?;
                horner(&poly, &h)
            }
        })
    }
}

/// `sum poly[k] x^k` with exact coefficients.
pub fn horner(poly: &[crate::field::Qt], x: &BigComplex) -> BigComplex {
    let prec = x.prec();
    let mut acc = BigComplex::zero(prec);
    for c in poly.iter().rev() {
        acc = acc.mul(x).add(&BigComplex::from_qt(c, prec));
    }
    acc
}
