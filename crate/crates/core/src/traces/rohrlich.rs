//! Values at cusps and the divisor sums `sum ord_z(f)/omega_z g(z)` over
//! `X_0(N)`, compared against the weighted divisor sums of product exponents.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::bigfloat::{BigComplex, BigFloat};
use super::eval::{eval_at, horner};
use super::trace::{eval_many, trace_classes, CmPoint, TraceOptions, Verdict};
use crate::error::{Error, Result};
use crate::field::{Discriminant, Qt, Rational};
use crate::hecke::mh_prime_power_exponents;
use crate::prodexp::ProductExpansion;
use crate::qseries::{faber, Cusp, FormSpec};
use crate::quadforms::{omega, Bqf, UnimodularMatrix};

/// `lim_{tau -> i oo} g(gamma tau)` for `gamma(oo)` the cusp, where `g` is
/// the Hauptmodul of the level. The limit is sampled at `tau = iY` and `2iY`
/// with `Y` large enough for the neglected terms to be below `2^-(prec/2)`.
pub fn hauptmodul_at_cusp(level: u64, cusp: &Cusp, prec: u32) -> Result<BigComplex> {
    if cusp.c % level as i64 == 0 {
        return Err(Error::InvalidArgument("the Hauptmodul has its pole at infinity".into()));
    }
    let gamma = UnimodularMatrix::with_first_column(cusp.a, cusp.c)?;
    let width = cusp.width(level) as f64;
    let y = width * (prec as f64 / 2.0 + 40.0) * std::f64::consts::LN_2 / (2.0 * std::f64::consts::PI);
    let work = prec + 64;
    let f = FormSpec::Hauptmodul { level };
    let at = |y: f64| -> Result<BigComplex> {
        let tau = BigComplex::new(BigFloat::zero(work), BigFloat::from_f64(y, work));
        let p = |x: i64| BigComplex::from_real(BigFloat::from_int(x, work));
        let z = p(gamma.p).mul(&tau).add(&p(gamma.q)).div(&p(gamma.r).mul(&tau).add(&p(gamma.s)))?;
        eval_at(&f, &z, work, None)
    };
    let v1 = at(y)?;
    let v2 = at(2.0 * y)?;
    super::eval::tail_check(&v1, &v2, prec, 0).map_err(|_| Error::PrecisionLoss(format!("value at cusp {cusp} has not converged")))?;
    Ok(v2.with_prec(prec))
}

/// A point of `X_0(N)` with a multiplicity: a Heegner point `alpha_Q`
/// (weighted by `1/omega_Q` in the sum) or a cusp.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DivisorTerm {
    Point { form: Bqf, order: i64 },
    Cusp { cusp: Cusp, order: i64 },
}

/// The divisor of the twisted Borcherds product: `chi_D(Q)` at every `alpha_Q`.
pub fn heegner_divisor(big_d: Discriminant, d: i64, level: u64) -> Result<Vec<DivisorTerm>> {
    Ok(trace_classes(big_d, d, level)?
        .into_iter()
        .filter(|r| r.chi != 0)
        .map(|r| DivisorTerm::Point {
            form: r.form,
            order: r.chi as i64,
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct DivisorSumCheck {
    /// Which function was summed: `f_{N,n}`.
    pub function: String,
    /// The exponent side, exact.
    #[serde(serialize_with = "as_string")]
    pub exact: Qt,
    pub numeric: BigComplex,
    pub residual: f64,
    pub verdict: Verdict,
}

fn as_string<T: std::fmt::Display, S: serde::Serializer>(x: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn degree(level: u64, divisor: &[DivisorTerm]) -> Rational {
    divisor.iter().fold(Rational::zero(), |acc, t| match t {
        DivisorTerm::Point { form, order } => acc + Rational::new(BigInt::from(*order), BigInt::from(omega(form, level))),
        DivisorTerm::Cusp { order, .. } => acc + Rational::from_integer(BigInt::from(*order)),
    })
}

/// `sum ord/omega f_{N,m}(z)` over the divisor. At infinity the constant
/// term of the expansion stands in for the value, which is harmless on a
/// divisor of degree zero.
pub fn divisor_sum(level: u64, m: u32, divisor: &[DivisorTerm], opts: &TraceOptions) -> Result<BigComplex> {
    let prec = opts.prec;
    let fab = faber(level, m, 2)?;
    let spec = FormSpec::Faber { level, n: m };
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut total = BigComplex::zero(prec);
    for t in divisor {
        match t {
            DivisorTerm::Point { form, order } => {
                if form.a % level as i64 != 0 {
                    return Err(Error::InvalidArgument(format!("{form} is not in Q_N for N = {level}")));
                }
                points.push(CmPoint::new(*form, prec + 32)?.alpha);
                weights.push(BigFloat::from_int(*order, prec).div_int(omega(form, level) as i64)?);
            }
            DivisorTerm::Cusp { cusp, order } => {
                let value = if cusp.c % level as i64 == 0 {
                    BigComplex::from_qt(&fab.series.coeff(0).unwrap_or_else(Qt::zero), prec)
                } else {
                    horner(&fab.poly, &hauptmodul_at_cusp(level, cusp, prec)?)
                };
                total = total.add(&value.scale(&BigFloat::from_int(*order, prec)));
            }
        }
    }
    for (v, w) in eval_many(&spec, &points, opts)?.iter().zip(&weights) {
        total = total.add(&v.scale(w));
    }
    Ok(total)
}

fn compare(function: String, exact: Qt, numeric: BigComplex, tol: f64, prec: u32) -> DivisorSumCheck {
    let residual = numeric.sub(&BigComplex::from_qt(&exact, prec)).abs().to_f64();
    let verdict = Verdict::new(
        format!("divisor sum of {function}"),
        residual < tol,
        format!("{exact} vs {}, residual {residual:.3e}", numeric.re.to_decimal(25)),
    );
    DivisorSumCheck {
        function,
        exact,
        numeric,
        residual,
        verdict,
    }
}

/// `sum_{u | n} u sqrt(D) c(D,u) (D/(n/u))` against the divisor sum of `f_{N,n}`.
pub fn verify_divisor_sum(
    pe: &ProductExpansion,
    level: u64,
    n: usize,
    divisor: &[DivisorTerm],
    opts: &TraceOptions,
) -> Result<DivisorSumCheck> {
    let function = format!("f_{{{level},{n}}}");
    let exact = pe.weighted_divisor_sum(n)?;
    let deg = degree(level, divisor);
    if !deg.is_zero() {
        let v = Verdict::skipped(
            format!("divisor sum of {function}"),
            format!("divisor has degree {deg}; constants do not cancel"),
        );
        return Ok(DivisorSumCheck {
            function,
            exact,
            numeric: BigComplex::zero(opts.prec),
            residual: f64::NAN,
            verdict: v,
        });
    }
    let numeric = divisor_sum(level, n as u32, divisor, opts)?;
    Ok(compare(function, exact, numeric, opts.tolerance, opts.prec))
}

/// `sqrt(D) c_{p^r}(D, 1)` from `T~(p^r)` against the divisor sum of `f_{N,p^r}`.
pub fn verify_divisor_sum_hecke(
    pe: &ProductExpansion,
    level: u64,
    p: u64,
    r: u32,
    divisor: &[DivisorTerm],
    opts: &TraceOptions,
) -> Result<DivisorSumCheck> {
    if level.is_multiple_of(p) {
        return Err(Error::InvalidArgument(format!("p = {p} divides N = {level}")));
    }
    let image = mh_prime_power_exponents(pe, p, r, level)?;
    let pr = p.pow(r);
    let function = format!("f_{{{level},{pr}}}");
    let exact = image.weighted_divisor_sum(1)?;
    let deg = degree(level, divisor);
    if !deg.is_zero() {
        let v = Verdict::skipped(
            format!("divisor sum of {function}"),
            format!("divisor has degree {deg}; constants do not cancel"),
        );
        return Ok(DivisorSumCheck {
            function,
            exact,
            numeric: BigComplex::zero(opts.prec),
            residual: f64::NAN,
            verdict: v,
        });
    }
    let numeric = divisor_sum(level, pr as u32, divisor, opts)?;
    Ok(compare(function, exact, numeric, opts.tolerance, opts.prec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prodexp::{to_exponents, trivial};
    use crate::qseries::FormSpec;

    #[test]
    fn trivial_product_has_zero_divisor_sum() {
        let d = Discriminant::new(8).unwrap();
        let pe = trivial(0, d, 5);
        let c = verify_divisor_sum(&pe, 1, 2, &[], &TraceOptions::default()).unwrap();
        assert!(c.exact.is_zero());
        assert_eq!(c.verdict.status, super::super::trace::Status::Pass);
    }

    #[test]
    fn level_nine_cusp_divisor() {
        // f = h - alpha has divisor (1/3) - (oo), alpha the Hauptmodul value at 1/3
        let prec = 192;
        let alpha = hauptmodul_at_cusp(9, &"1/3".parse().unwrap(), prec).unwrap();
        let (re, im) = alpha.to_f64_pair();
        assert!((re + 4.5).abs() < 1e-12 && (im + 1.5 * 3f64.sqrt()).abs() < 1e-12, "{alpha}");
        let exact_alpha = Qt::from_frac(-9, 2) + Qt::sqrt(-3).scale(&Rational::new((-3).into(), 2.into()));
        let f = FormSpec::level9_shifted(exact_alpha).expand(8).unwrap();
        let pe = to_exponents(&f, Discriminant::new(1).unwrap()).unwrap();
        let divisor = vec![
            DivisorTerm::Cusp {
                cusp: "1/3".parse().unwrap(),
                order: 1,
            },
            DivisorTerm::Cusp {
                cusp: Cusp::infinity(9),
                order: -1,
            },
        ];
        let opts = TraceOptions {
            prec,
            ..TraceOptions::default()
        };
        for n in 1..=3 {
            let c = verify_divisor_sum(&pe, 9, n, &divisor, &opts).unwrap();
            assert_eq!(c.verdict.status, super::super::trace::Status::Pass, "{:?}", c.verdict);
        }
        let c = verify_divisor_sum_hecke(&pe, 9, 2, 1, &divisor, &opts).unwrap();
        assert_eq!(c.verdict.status, super::super::trace::Status::Pass, "{:?}", c.verdict);
    }

    #[test]
    fn nonzero_degree_is_skipped() {
        let d = Discriminant::new(1).unwrap();
        let pe = trivial(0, d, 5);
        let div = [DivisorTerm::Point {
            form: Bqf::new(1, 0, 1),
            order: 2,
        }];
        let c = verify_divisor_sum(&pe, 1, 1, &div, &TraceOptions::default()).unwrap();
        assert_eq!(c.verdict.status, super::super::trace::Status::Skipped);
    }
}
