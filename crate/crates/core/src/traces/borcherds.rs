//! The twisted Borcherds product `H_{D,d}(f) = prod_Q (f - f(alpha_Q))^{chi_D(Q)}`
//! for the Hauptmodul `f`, rebuilt exactly from numerically recognized data.
//!
//! The roots with `chi = +1` and `chi = -1` are Galois conjugate over
//! `Q(sqrt D)`, so the monic polynomials `P+` and `P-` they cut out have
//! conjugate coefficients `a + b sqrt(D)` and `a - b sqrt(D)`. Recognizing
//! those coefficients (denominators at most 2) pins down `H` exactly.

use num_bigint::BigInt;
use serde::Serialize;

use super::bigfloat::{BigComplex, BigFloat};
use super::trace::{eval_many, trace_classes, CmPoint, TraceOptions};
use crate::error::{Error, Result};
use crate::field::{Discriminant, Qt, Rational};
use crate::qseries::{hauptmodul, FormSpec, QSeries};
use crate::quadforms::Bqf;

#[derive(Clone, Debug, Serialize)]
pub struct TwistedBorcherds {
    #[serde(rename = "D")]
    pub big_d: i64,
    pub d: i64,
    #[serde(rename = "N")]
    pub level: u64,
    /// Forms with their character values, in class order.
    pub divisor: Vec<(Bqf, i32)>,
    /// `P+`, ascending coefficients.
    #[serde(serialize_with = "strings")]
    pub numerator: Vec<Qt>,
    /// `P-`, ascending coefficients.
    #[serde(serialize_with = "strings")]
    pub denominator: Vec<Qt>,
    /// Largest distance between a numeric coefficient and its recognized value.
    pub residual: f64,
    pub series: QSeries,
}

fn strings<S: serde::Serializer>(v: &[Qt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

/// Monic polynomial with the given roots, ascending coefficients.
fn poly_from_roots(roots: &[BigComplex], prec: u32) -> Vec<BigComplex> {
    let mut p = vec![BigComplex::one(prec)];
    for r in roots {
        let mut next = vec![BigComplex::zero(prec); p.len() + 1];
        for (k, c) in p.iter().enumerate() {
            next[k + 1] = next[k + 1].add(c);
            next[k] = next[k].sub(&c.mul(r));
        }
        p = next;
    }
    p
}

fn half(n: BigInt) -> Rational {
    Rational::new(n, BigInt::from(2))
}

pub fn twisted_borcherds_numeric(big_d: Discriminant, d: i64, level: u64, opts: &TraceOptions, t: usize) -> Result<TwistedBorcherds> {
    let prec = opts.prec;
    let reps = trace_classes(big_d, d, level)?;
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    let mut divisor = Vec::new();
    for r in reps.iter().filter(|r| r.chi != 0) {
        if r.omega != 1 {
            return Err(Error::InvalidArgument(format!(
                "{} has a nontrivial stabilizer; exponents would not be integral",
                r.form
            )));
        }
        divisor.push((r.form, r.chi));
        let p = CmPoint::new(r.form, prec + 32)?;
        if r.chi > 0 {
            plus.push(p.alpha);
        } else {
            minus.push(p.alpha);
        }
    }
    let f = FormSpec::Hauptmodul { level };
    let plus_values = eval_many(&f, &plus, opts)?;
    let minus_values = eval_many(&f, &minus, opts)?;
    let p_plus = poly_from_roots(&plus_values, prec);
    let p_minus = poly_from_roots(&minus_values, prec);

    let mut residual: f64 = 0.0;
    let (numerator, denominator) = if big_d.get() == 1 {
        let mut num = Vec::new();
        for c in &p_plus {
            let v = Qt::from_rational(half(c.re.mul_pow2(1).round()));
            residual = residual.max(c.sub(&BigComplex::from_qt(&v, prec)).abs().to_f64());
            num.push(v);
        }
        (num, vec![Qt::one()])
    } else {
        if p_plus.len() != p_minus.len() {
            return Err(Error::InvalidArgument("the character takes +1 and -1 unequally often".into()));
        }
        let sqrt_d = BigFloat::from_int(big_d.get(), prec).sqrt()?;
        let mut num = Vec::new();
        let mut den = Vec::new();
        for (cp, cm) in p_plus.iter().zip(&p_minus) {
            let a2 = cp.re.add(&cm.re).round();
            let b2 = cp.re.sub(&cm.re).div(&sqrt_d)?.round();
            let root = Qt::sqrt(big_d.get());
            let b_part = root.scale(&half(b2));
            let vp = Qt::from_rational(half(a2.clone())) + b_part.clone();
            let vm = Qt::from_rational(half(a2)) - b_part;
            residual = residual
                .max(cp.sub(&BigComplex::from_qt(&vp, prec)).abs().to_f64())
                .max(cm.sub(&BigComplex::from_qt(&vm, prec)).abs().to_f64());
            num.push(vp);
            den.push(vm);
        }
        (num, den)
    };
    if residual > opts.tolerance {
        return Err(Error::RecognitionFailed {
            value: "coefficients of the CM polynomials".into(),
            residual: format!("{residual:e}"),
        });
    }
    let series = rational_function_series(&numerator, &denominator, level, t)?;
    Ok(TwistedBorcherds {
        big_d: big_d.get(),
        d,
        level,
        divisor,
        numerator,
        denominator,
        residual,
        series,
    })
}

/// `P(h) / Q(h)` for the Hauptmodul `h`, to `t` terms.
pub fn rational_function_series(num: &[Qt], den: &[Qt], level: u64, t: usize) -> Result<QSeries> {
    let deg = num.len().max(den.len());
    let mut work = t + 2 * deg + 2;
    loop {
        let h = hauptmodul(level, work)?;
        let eval = |poly: &[Qt]| -> Result<QSeries> {
            let mut acc = QSeries::constant(poly.last().cloned().unwrap_or_else(Qt::zero), work);
            for c in poly.iter().rev().skip(1) {
                acc = acc.mul(&h)?.add(&QSeries::constant(c.clone(), work))?;
            }
            Ok(acc)
        };
        let s = eval(num)?.div(&eval(den)?)?;
        if s.truncation() >= t {
            return Ok(s.truncate(t));
        }
        work *= 2;
    }
}
