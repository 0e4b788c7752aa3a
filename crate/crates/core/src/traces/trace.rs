//! CM points, twisted traces `Tr_{D,d}(f) = sum chi_D(Q)/omega_Q f(alpha_Q)`,
//! and the integrality, congruence and Hecke-identity checks on them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use super::bigfloat::{BigComplex, BigFloat};
use super::eval::{auto_terms, eval_at};
use crate::error::{Error, Result};
use crate::field::{is_prime, kronecker, Discriminant, Qt, Rational};
use crate::qseries::FormSpec;
use crate::quadforms::{admissible_betas, all_classes, Bqf, ClassRep};

#[derive(Clone, Debug)]
pub struct CmPoint {
    pub form: Bqf,
    pub alpha: BigComplex,
}

impl CmPoint {
    /// `alpha = (-b + i sqrt(d)) / (2a)`.
    pub fn new(form: Bqf, prec: u32) -> Result<Self> {
        let form = Bqf::positive_definite(form.a, form.b, form.c)?;
        let two_a = BigFloat::from_int(2 * form.a, prec);
        let re = BigFloat::from_int(-form.b, prec).div(&two_a)?;
        let im = BigFloat::from_int(-form.disc(), prec).sqrt()?.div(&two_a)?;
        Ok(Self {
            form,
            alpha: BigComplex::new(re, im),
        })
    }

    /// `|Q(alpha, 1)|`, which vanishes up to rounding.
    pub fn residual(&self) -> BigFloat {
        let prec = self.alpha.prec();
        let a = BigComplex::from_real(BigFloat::from_int(self.form.a, prec));
        let b = BigComplex::from_real(BigFloat::from_int(self.form.b, prec));
        let c = BigComplex::from_real(BigFloat::from_int(self.form.c, prec));
        a.mul(&self.alpha).add(&b).mul(&self.alpha).add(&c).abs()
    }
}

#[derive(Clone, Debug)]
pub struct TraceOptions {
    pub prec: u32,
    /// Truncation of every leaf expansion; chosen per point when absent.
    pub terms: Option<usize>,
    pub tolerance: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            prec: 256,
            terms: None,
            tolerance: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub claim: String,
    pub status: Status,
    pub detail: String,
}

impl Verdict {
    pub fn new(claim: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            claim: claim.into(),
            status: if pass { Status::Pass } else { Status::Fail },
            detail: detail.into(),
        }
    }

    pub fn skipped(claim: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            claim: claim.into(),
            status: Status::Skipped,
            detail: detail.into(),
        }
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

fn as_string<T: std::fmt::Display, S: Serializer>(x: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn opt_as_string<T: std::fmt::Display, S: Serializer>(x: &Option<T>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&v.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceReport {
    #[serde(rename = "D")]
    pub big_d: i64,
    pub d: i64,
    #[serde(rename = "N")]
    pub level: u64,
    pub function: String,
    pub classes: usize,
    /// `sum chi_D(Q) / omega_Q`, exact.
    #[serde(serialize_with = "as_string")]
    pub chi_over_omega: Rational,
    pub raw: BigComplex,
    /// `raw / sqrt(D)`.
    pub normalized: BigComplex,
    #[serde(serialize_with = "opt_as_string")]
    pub recognized: Option<Qt>,
    #[serde(serialize_with = "as_string")]
    pub residual: f64,
    pub precision_bits: u32,
    pub verdicts: Vec<Verdict>,
}

impl TraceReport {
    pub fn passed(&self) -> bool {
        !self.verdicts.iter().any(Verdict::failed)
    }

    pub fn integer(&self) -> Option<BigInt> {
        self.recognized.as_ref().and_then(Qt::to_integer)
    }

    fn require_integer(&self) -> Result<BigInt> {
        self.integer().ok_or_else(|| Error::RecognitionFailed {
            value: self.normalized.re.to_decimal(30),
            residual: format!("{:e}", self.residual),
        })
    }
}

/// Short name for reports: `f_{N,n}` for Faber functions.
pub fn function_label(f: &FormSpec) -> String {
    match f {
        FormSpec::Faber { level, n } => format!("f_{{{level},{n}}}"),
        FormSpec::Hauptmodul { level } => format!("hauptmodul_{level}"),
        FormSpec::Classical { name, m } => format!("{name:?}(m={m})"),
        _ => "custom".into(),
    }
}

/// The classes of `Q_{dD,N} / Gamma_0(N)` over all admissible `beta`, with
/// `chi_D` attached, in a fixed order.
pub fn trace_classes(big_d: Discriminant, d: i64, level: u64) -> Result<Vec<ClassRep>> {
    let disc = d * big_d.get();
    if admissible_betas(disc, level).is_empty() {
        return Err(Error::InconsistentSquareCondition {
            d: -disc,
            beta: 0,
            modulus: 4 * level as i64,
        });
    }
    let mut reps = Vec::new();
    for list in all_classes(disc, level)? {
        reps.extend(list.with_character(big_d)?.reps);
    }
    Ok(reps)
}

pub fn chi_over_omega_sum(reps: &[ClassRep]) -> Rational {
    reps.iter()
        .map(|r| Rational::new(BigInt::from(r.chi), BigInt::from(r.omega)))
        .fold(Rational::zero(), |a, b| a + b)
}

/// Values of `f` at many points, spread over threads; order is preserved.
pub fn eval_many(f: &FormSpec, points: &[BigComplex], opts: &TraceOptions) -> Result<Vec<BigComplex>> {
    let threads = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(points.len().max(1));
    let chunk = points.len().div_ceil(threads.max(1)).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = points
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter()
                        .map(|z| eval_at(f, z, opts.prec, opts.terms))
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        let mut out = Vec::with_capacity(points.len());
        for h in handles {
            out.extend(h.join().expect("evaluation thread panicked")?);
        }
        Ok(out)
    })
}

/// `Tr_{D,d}(f)` with recognition of `Tr / sqrt(D)` as an integer. The
/// report is returned even when recognition fails; see [`twisted_trace`].
pub fn twisted_trace_report(big_d: Discriminant, d: i64, level: u64, f: &FormSpec, opts: &TraceOptions) -> Result<TraceReport> {
    let prec = opts.prec;
    let reps = trace_classes(big_d, d, level)?;
    let chi_omega = chi_over_omega_sum(&reps);
    let active: Vec<&ClassRep> = reps.iter().filter(|r| r.chi != 0).collect();
    let points: Vec<CmPoint> = active.iter().map(|r| CmPoint::new(r.form, prec + 32)).collect::<Result<_>>()?;
    let alphas: Vec<BigComplex> = points.iter().map(|p| p.alpha.clone()).collect();
    let values = eval_many(f, &alphas, opts)?;
    let mut raw = BigComplex::zero(prec);
    for (rep, v) in active.iter().zip(&values) {
        let w = BigFloat::from_int(rep.chi, prec).div_int(rep.omega as i64)?;
        raw = raw.add(&v.scale(&w));
    }
    let sqrt_d = BigFloat::from_int(big_d.get(), prec).sqrt()?;
    let normalized = BigComplex::new(raw.re.div(&sqrt_d)?, raw.im.div(&sqrt_d)?);
    let nearest = normalized.re.round();
    let residual = normalized
        .sub(&BigComplex::from_real(BigFloat::from_int(nearest.clone(), prec)))
        .abs()
        .to_f64();
    let recognized = (residual < opts.tolerance).then(|| Qt::from_bigint(nearest.clone()));
    let mut verdicts = vec![constants_vanish_verdict(big_d, d, &chi_omega)];
    verdicts.push(Verdict::new(
        "trace / sqrt(D) is an integer",
        recognized.is_some(),
        format!("nearest {nearest}, residual {residual:.3e}"),
    ));
    Ok(TraceReport {
        big_d: big_d.get(),
        d,
        level,
        function: function_label(f),
        classes: reps.len(),
        chi_over_omega: chi_omega,
        raw,
        normalized,
        recognized,
        residual,
        precision_bits: prec,
        verdicts,
    })
}

fn constants_vanish_verdict(big_d: Discriminant, d: i64, s: &Rational) -> Verdict {
    let claim = format!("sum chi/omega = 0 at d = {d}");
    if big_d.get() == 1 {
        Verdict::skipped(claim, "requires D>1")
    } else {
        Verdict::new(claim, s.is_zero(), format!("sum = {s}"))
    }
}

/// Like [`twisted_trace_report`], but an unrecognized value is an error.
pub fn twisted_trace(big_d: Discriminant, d: i64, level: u64, f: &FormSpec, opts: &TraceOptions) -> Result<TraceReport> {
    let r = twisted_trace_report(big_d, d, level, f, opts)?;
    r.require_integer()?;
    Ok(r)
}

/// Largest `T` any point of the trace would use by default.
pub fn worst_case_terms(big_d: Discriminant, d: i64, level: u64, prec: u32) -> Result<usize> {
    let reps = trace_classes(big_d, d, level)?;
    Ok(reps
        .iter()
        .map(|r| {
            let im = ((-r.form.disc()) as f64).sqrt() / (2.0 * r.form.a as f64);
            auto_terms(im, prec)
        })
        .max()
        .unwrap_or(16))
}

/// Checks, for `p` prime to `N` and `f_{N,m}` the Faber functions:
/// `Tr(f_{N,p}) / sqrt(D) = (D/p) Tr(f_{N,1}) / sqrt(D)  (mod p)` and
/// `Tr_{D,d}(f_{N,p^r}) = sum_{t=0}^{r} (-d/p)^{r-t} Tr_{D,p^{2t} d}(f_{N,1})`
/// (both divided by `sqrt(D)`). The returned report is the trace of
/// `f_{N,p^r}` with all verdicts attached.
pub fn verify_trace_identities(big_d: Discriminant, d: i64, level: u64, p: u64, r: u32, opts: &TraceOptions) -> Result<TraceReport> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if level.is_multiple_of(p) {
        return Err(Error::InvalidArgument(format!("p = {p} divides N = {level}")));
    }
    if r == 0 {
        return Err(Error::InvalidArgument("r must be positive".into()));
    }
    let pr = p.pow(r) as u32;
    let faber = |n: u32| FormSpec::Faber { level, n };
    let mut main = twisted_trace_report(big_d, d, level, &faber(pr), opts)?;
    if big_d.get() == 1 {
        main.verdicts.push(Verdict::skipped(format!("congruence mod {p}"), "requires D>1"));
        main.verdicts
            .push(Verdict::skipped(format!("Hecke identity r = {r}"), "requires D>1"));
        return Ok(main);
    }
    let mut base = Vec::new();
    for t in 0..=r {
        let dt = d * (p as i64).pow(2 * t);
        let rep = twisted_trace_report(big_d, dt, level, &faber(1), opts)?;
        main.verdicts
            .extend(rep.verdicts.iter().filter(|v| v.claim.starts_with("sum")).cloned());
        base.push((dt, rep));
    }
    let b0 = base[0].1.integer();
    let a1 = if r == 1 {
        main.integer()
    } else {
        twisted_trace_report(big_d, d, level, &faber(p as u32), opts)?.integer()
    };
    let pb = BigInt::from(p);
    let chi_p = big_d.kronecker(p as i64);
    let congruence = match (&a1, &b0) {
        (Some(a), Some(b)) => {
            let lhs = a.mod_floor(&pb);
            let rhs = (b * chi_p).mod_floor(&pb);
            let ok = lhs == rhs;
            Verdict::new(
                format!("congruence mod {p}"),
                ok,
                format!("{a} = {lhs}, ({}/{p}) * {b} = {rhs} (mod {p})", big_d.get()),
            )
        }
        _ => Verdict::new(format!("congruence mod {p}"), false, "a trace was not recognized"),
    };
    main.verdicts.push(congruence);
    let chi = kronecker(-d, p as i64) as i64;
    let mut rhs = Some(BigInt::zero());
    let mut terms = Vec::new();
    for (t, (dt, rep)) in base.iter().enumerate() {
        let coef = chi.pow(r - t as u32);
        match (rhs.as_mut(), rep.integer()) {
            (Some(acc), Some(v)) => {
                *acc += &v * coef;
                terms.push(format!("({coef})*Tr[d={dt}]({v})"));
            }
            _ => rhs = None,
        }
    }
    let identity = match (main.integer(), rhs) {
        (Some(lhs), Some(rhs)) => Verdict::new(
            format!("Hecke identity r = {r}"),
            lhs == rhs,
            format!("{lhs} = {} = {rhs}", terms.join(" + ")),
        ),
        _ => Verdict::new(format!("Hecke identity r = {r}"), false, "a trace was not recognized"),
    };
    main.verdicts.push(identity);
    Ok(main)
}

/// Nearest element of `Z[1/2] + Z[1/2] sqrt(s)` for an imaginary radicand
/// `s < 0`, with the distance.
pub fn recognize_imag_quadratic(z: &BigComplex, s: i64) -> Result<(Qt, f64)> {
    if s >= 0 {
        return Err(Error::InvalidArgument(format!("radicand {s} is not negative")));
    }
    let prec = z.prec();
    let root = BigFloat::from_int(-s, prec).sqrt()?;
    let a2 = z.re.mul_pow2(1).round();
    let b2 = z.im.mul_pow2(1).div(&root)?.round();
    let half = |n: &BigInt| Rational::new(n.clone(), BigInt::from(2));
    let value = Qt::from_rational(half(&a2)) + Qt::rational_times_sqrt(half(&b2), s);
    let residual = z.sub(&BigComplex::from_qt(&value, prec)).abs().to_f64();
    Ok((value, residual))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(d: i64) -> Discriminant {
        Discriminant::new(d).unwrap()
    }

    #[test]
    fn cm_points_are_roots() {
        for f in [Bqf::new(1, 0, 6), Bqf::new(14, 2, 1), Bqf::new(49, 12, 1)] {
            let p = CmPoint::new(f, 200).unwrap();
            assert!(p.residual().magnitude() < -180);
            assert!(!p.alpha.im.is_negative());
        }
        assert!(CmPoint::new(Bqf::new(1, 5, 1), 64).is_err());
    }

    #[test]
    fn level_one_trace_of_j() {
        // D = 8, d = 3: j([1,0,6]) - j([2,0,3]) = 2 * 1707264 sqrt(2)
        let f = FormSpec::Faber { level: 1, n: 1 };
        let r = twisted_trace(disc(8), 3, 1, &f, &TraceOptions::default()).unwrap();
        assert_eq!(r.integer(), Some(BigInt::from(1707264)));
        assert!(r.passed());
        assert_eq!(r.classes, 2);
    }

    #[test]
    fn d_one_skips_the_constant_check() {
        let f = FormSpec::Faber { level: 1, n: 1 };
        let r = twisted_trace_report(disc(1), 23, 1, &f, &TraceOptions::default()).unwrap();
        assert_eq!(r.verdicts[0].status, Status::Skipped);
        assert_eq!(r.verdicts[0].detail, "requires D>1");
    }

    #[test]
    fn inconsistent_discriminant_rejected() {
        let f = FormSpec::Faber { level: 7, n: 1 };
        assert!(matches!(
            twisted_trace(disc(5), 3, 7, &f, &TraceOptions::default()),
            Err(Error::InconsistentSquareCondition { .. })
        ));
    }

    #[test]
    fn recognition_of_gaussian_halves() {
        let z = BigComplex::from_f64(-4.5, -1.5 * 3f64.sqrt(), 128);
        let (v, res) = recognize_imag_quadratic(&z, -3).unwrap();
        assert_eq!(v, Qt::from_frac(-9, 2) + Qt::sqrt(-3).scale(&Rational::new((-3).into(), 2.into())));
        assert!(res < 1e-14);
    }
}
