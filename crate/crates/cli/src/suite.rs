//! The `verify-published` harness: every published value and every property check,
//! run concurrently and reported in a fixed order.

use std::time::Instant;

use serde::Serialize;

use mulhecke_core::field::{divisors, is_fundamental, is_prime, kronecker, Discriminant, Qt};
use mulhecke_core::hecke::{is_mult_eigenform, mh_exponents, mh_exponents_to, mh_prime_exponents, mh_series_direct, EigenVerdict};
use mulhecke_core::prodexp::{from_exponents, to_exponents};
use mulhecke_core::qseries::{faber, ClassicalName, FormSpec, QSeries};
use mulhecke_core::quadforms::Bqf;
use mulhecke_core::traces::trace::{chi_over_omega_sum, trace_classes, worst_case_terms};
use mulhecke_core::traces::{
    hauptmodul_at_cusp, recognize_imag_quadratic, twisted_borcherds_numeric, twisted_trace, verify_trace_identities, BigComplex, Status,
    TraceOptions,
};
use mulhecke_core::{Error, Result};

use crate::cache::ClassCache;

pub struct Ctx {
    pub prec: u32,
    pub terms: Option<usize>,
    pub cache: ClassCache,
}

impl Ctx {
    fn opts(&self) -> TraceOptions {
        TraceOptions {
            prec: self.prec,
            terms: self.terms,
            ..TraceOptions::default()
        }
    }
}

struct Outcome {
    expected: String,
    got: String,
    pass: bool,
}

fn outcome(expected: impl ToString, got: impl ToString) -> Outcome {
    let (expected, got) = (expected.to_string(), got.to_string());
    Outcome {
        pass: expected == got,
        expected,
        got,
    }
}

type Run = fn(&Ctx) -> Result<Outcome>;

struct Check {
    id: &'static str,
    description: &'static str,
    provenance: &'static str,
    run: Run,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub description: String,
    pub provenance: String,
    pub expected: String,
    pub got: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub schema: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<CheckResult>,
}

fn disc(d: i64) -> Discriminant {
    Discriminant::new(d).expect("fundamental")
}

fn q(s: &str) -> Qt {
    s.parse().expect("literal")
}

fn list(v: &[Qt]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn j() -> FormSpec {
    FormSpec::Classical {
        name: ClassicalName::J,
        m: 1,
    }
}

fn level9_alpha() -> Qt {
    q("-9/2 - 3/2*sqrt(-3)")
}

fn zagier(ctx: &Ctx) -> Result<Outcome> {
    let h = twisted_borcherds_numeric(disc(8), 3, 1, &ctx.opts(), 6)?;
    let pe = to_exponents(&h.series, disc(8))?;
    Ok(outcome("[1707264, 4125992712192, 13288900691444361984]", list(&pe.c[..3])))
}

fn level11_pe() -> Result<mulhecke_core::prodexp::ProductExpansion> {
    to_exponents(&FormSpec::level11_weight2().expand(28)?, disc(8))
}

fn level11_t3(_: &Ctx) -> Result<Outcome> {
    let t = mh_exponents_to(&level11_pe()?, 3, 11, 4)?;
    Ok(outcome(
        list(&[q("-9*sqrt(2)"), q("-288*sqrt(2)"), q("11742*sqrt(2)")]),
        list(&t.c[..3]),
    ))
}

fn level11_t9(_: &Ctx) -> Result<Outcome> {
    let t = mh_exponents_to(&level11_pe()?, 9, 11, 4)?;
    let want = [q("35235*sqrt(2)"), q("1134001917*sqrt(2)"), q("43213358093067*sqrt(2)")];
    Ok(outcome(list(&want), list(&t.c[..3])))
}

fn level9_series() -> Result<QSeries> {
    FormSpec::level9_shifted(level9_alpha()).expand(30)
}

fn level9_exponents(_: &Ctx) -> Result<Outcome> {
    let pe = to_exponents(&level9_series()?, disc(1))?;
    let want = [q("-3/2 - 3/2*sqrt(-3)"), q("-3/2 + 3*sqrt(-3)"), q("9/2 + 1/2*sqrt(-3)")];
    Ok(outcome(format!("h=-1 {}", list(&want)), format!("h={} {}", pe.h, list(&pe.c[..3]))))
}

fn level9_t2(_: &Ctx) -> Result<Outcome> {
    let pe = to_exponents(&level9_series()?, disc(1))?;
    let t2 = mh_prime_exponents(&pe, 2, 9)?;
    let want = [q("-9/2 + 9/2*sqrt(-3)"), q("-9/2 - 9*sqrt(-3)"), q("27/2 - 3/2*sqrt(-3)")];
    Ok(outcome(format!("h=-3 {}", list(&want)), format!("h={} {}", t2.h, list(&t2.c[..3]))))
}

fn level9_verdict(_: &Ctx) -> Result<Outcome> {
    let got = match is_mult_eigenform(&level9_series()?, &[2], 9)? {
        EigenVerdict::Counterexample {
            p,
            power: Some(m),
            expected: Some(x),
            got,
            ..
        } if x != got => format!("counterexample({p}), f|T(2) != f^{m}"),
        v => format!("{v:?}"),
    };
    Ok(outcome("counterexample(2), f|T(2) != f^3", got))
}

fn level9_alpha_check(ctx: &Ctx) -> Result<Outcome> {
    let prec = ctx.prec.max(384);
    let value = hauptmodul_at_cusp(9, &"1/3".parse()?, prec)?;
    let (recognized, _) = recognize_imag_quadratic(&value, -3)?;
    let dist = value.sub(&BigComplex::from_qt(&level9_alpha(), prec)).abs().to_f64();
    let close = if dist < 1e-20 { "within 1e-20" } else { "off" };
    Ok(outcome(format!("{} within 1e-20", level9_alpha()), format!("{recognized} {close}")))
}

fn faber_trace(ctx: &Ctx, big_d: i64, d: i64, level: u64, n: u32) -> Result<String> {
    let r = twisted_trace(disc(big_d), d, level, &FormSpec::Faber { level, n }, &ctx.opts())?;
    Ok(r.integer().map(|v| v.to_string()).unwrap_or_else(|| r.normalized.re.to_decimal(20)))
}

fn tr_13_4_1(ctx: &Ctx) -> Result<Outcome> {
    Ok(outcome(-6, faber_trace(ctx, 13, 4, 7, 1)?))
}

fn tr_13_4_3(ctx: &Ctx) -> Result<Outcome> {
    Ok(outcome(8244, faber_trace(ctx, 13, 4, 7, 3)?))
}

fn tr_13_36_1(ctx: &Ctx) -> Result<Outcome> {
    Ok(outcome(8238, faber_trace(ctx, 13, 36, 7, 1)?))
}

fn verdict_of(ctx: &Ctx, big_d: i64, d: i64, level: u64, p: u64, r: u32, claim: &str) -> Result<Outcome> {
    let rep = verify_trace_identities(disc(big_d), d, level, p, r, &ctx.opts())?;
    let v = rep
        .verdicts
        .iter()
        .find(|v| v.claim.starts_with(claim))
        .ok_or_else(|| Error::InvalidArgument(format!("no verdict {claim}")))?;
    Ok(Outcome {
        expected: "pass".into(),
        got: v.detail.clone(),
        pass: v.status == Status::Pass,
    })
}

fn level7_congruence(ctx: &Ctx) -> Result<Outcome> {
    verdict_of(ctx, 13, 4, 7, 3, 1, "congruence")
}

fn level7_identity_1(ctx: &Ctx) -> Result<Outcome> {
    verdict_of(ctx, 13, 4, 7, 3, 1, "Hecke identity")
}

fn level7_identity_2(ctx: &Ctx) -> Result<Outcome> {
    verdict_of(ctx, 13, 4, 7, 3, 2, "Hecke identity")
}

const MATRIX: [(i64, i64, u64); 4] = [(13, 4, 7), (13, 36, 7), (8, 3, 1), (5, 4, 1)];

fn matrix_values(ctx: &Ctx, prec: u32) -> Result<Vec<String>> {
    MATRIX
        .iter()
        .map(|&(big_d, d, level)| {
            let worst = worst_case_terms(disc(big_d), d, level, prec)?;
            let opts = TraceOptions {
                prec,
                terms: Some(ctx.terms.unwrap_or(0).max(worst).max(200)),
                ..TraceOptions::default()
            };
            let r = twisted_trace(disc(big_d), d, level, &FormSpec::Faber { level, n: 1 }, &opts)?;
            Ok(r.integer().map(|v| v.to_string()).unwrap_or_default())
        })
        .collect()
}

fn matrix_integers(ctx: &Ctx) -> Result<Outcome> {
    let got = matrix_values(ctx, ctx.prec)?;
    let pass = got.iter().all(|v| !v.is_empty());
    Ok(Outcome {
        expected: "integers".into(),
        got: got.join(", "),
        pass,
    })
}

fn stability(ctx: &Ctx) -> Result<Outcome> {
    Ok(outcome(
        matrix_values(ctx, ctx.prec)?.join(", "),
        matrix_values(ctx, 2 * ctx.prec)?.join(", "),
    ))
}

fn matrix_congruences(ctx: &Ctx) -> Result<Outcome> {
    let mut failed = Vec::new();
    for &(big_d, d, level) in &MATRIX {
        for p in [3u64, 5] {
            if level % p != 0 && !verdict_of(ctx, big_d, d, level, p, 1, "congruence")?.pass {
                failed.push(format!("({big_d},{d},{level},{p})"));
            }
        }
    }
    Ok(outcome(
        "all hold",
        if failed.is_empty() { "all hold".into() } else { failed.join(" ") },
    ))
}

fn forms(list: &[[i64; 3]]) -> Vec<Bqf> {
    list.iter().map(|&[a, b, c]| Bqf::new(a, b, c)).collect()
}

fn classes_match(ctx: &Ctx, d: i64, beta: i64, published: &[[i64; 3]]) -> Result<Outcome> {
    let got = ctx.cache.get(d, 7, beta)?;
    let same = got.same_classes(&forms(published))?;
    Ok(Outcome {
        expected: format!("{} classes equivalent to the published list", published.len()),
        got: format!("{} classes, {}", got.len(), if same { "equivalent" } else { "different" }),
        pass: same && got.len() == published.len(),
    })
}

fn classes_52_plus(ctx: &Ctx) -> Result<Outcome> {
    classes_match(ctx, 52, 2, &[[14, 2, 1], [7, 2, 2]])
}

fn classes_52_minus(ctx: &Ctx) -> Result<Outcome> {
    classes_match(ctx, 52, -2, &[[49, 12, 1], [7, -2, 2]])
}

fn classes_468_plus(ctx: &Ctx) -> Result<Outcome> {
    let published = [
        [126, 6, 1],
        [63, 6, 2],
        [42, 6, 3],
        [21, 6, 6],
        [7, 6, 18],
        [154, 62, 7],
        [238, 90, 9],
        [77, 48, 9],
        [14, 6, 9],
        [98, 62, 11],
    ];
    classes_match(ctx, 468, 6, &published)
}

fn classes_468_minus(ctx: &Ctx) -> Result<Outcome> {
    let published = [
        [133, 8, 1],
        [119, 22, 2],
        [147, 36, 3],
        [21, -6, 6],
        [63, 36, 7],
        [7, -6, 18],
        [49, 36, 9],
        [14, -6, 9],
        [182, 78, 9],
        [266, 106, 11],
    ];
    classes_match(ctx, 468, -6, &published)
}

fn test_forms(t: usize) -> Result<Vec<QSeries>> {
    Ok(vec![
        j().expand(t)?,
        FormSpec::delta().expand(t)?,
        FormSpec::level11_weight2().expand(t)?,
    ])
}

fn flag(failures: Vec<String>, ok: &str) -> Outcome {
    let got = if failures.is_empty() { ok.to_string() } else { failures.join("; ") };
    outcome(ok, got)
}

fn d_independence(_: &Ctx) -> Result<Outcome> {
    let mut bad = Vec::new();
    for (i, f) in test_forms(25)?.iter().enumerate() {
        let base = to_exponents(f, disc(1))?;
        for big_d in [5, 8, 13, 17] {
            let pe = to_exponents(f, disc(big_d))?;
            for n in 1..=24 {
                if base.weighted_divisor_sum(n)? != pe.weighted_divisor_sum(n)? {
                    bad.push(format!("form {i}, D={big_d}, n={n}"));
                }
            }
        }
    }
    Ok(flag(bad, "equal"))
}

fn round_trip(_: &Ctx) -> Result<Outcome> {
    let mut bad = Vec::new();
    for (i, f) in test_forms(40)?.iter().enumerate() {
        for big_d in [1, 5, 8] {
            if from_exponents(&to_exponents(f, disc(big_d))?)? != *f {
                bad.push(format!("form {i}, D={big_d}"));
            }
        }
    }
    Ok(flag(bad, "identity"))
}

fn direct_vs_exponents(_: &Ctx) -> Result<Outcome> {
    let mut bad = Vec::new();
    for (level, spec) in [
        (1u64, j()),
        (9, FormSpec::Hauptmodul { level: 9 }),
        (11, FormSpec::level11_weight2()),
    ] {
        let f = spec.expand(40)?;
        for big_d in [1, 8] {
            let pe = to_exponents(&f, disc(big_d))?;
            for p in [2u64, 3, 5] {
                let via = from_exponents(&mh_prime_exponents(&pe, p, level)?)?;
                if !via.agrees_with(&mh_series_direct(&f, p, level)?) {
                    bad.push(format!("N={level}, D={big_d}, p={p}"));
                }
            }
        }
    }
    Ok(flag(bad, "equal"))
}

fn composition(_: &Ctx) -> Result<Outcome> {
    let mut bad = Vec::new();
    for big_d in [1, 8] {
        let pe = to_exponents(&j().expand(70)?, disc(big_d))?;
        for (r, s) in [(2u64, 3u64), (2, 5)] {
            let rs = mh_exponents_to(&pe, r * s, 1, 6)?;
            let a = mh_exponents(&mh_exponents(&pe, r, 1)?, s, 1)?;
            let b = mh_exponents(&mh_exponents(&pe, s, 1)?, r, 1)?;
            if rs.c[..5] != a.c[..5] || rs.c[..5] != b.c[..5] {
                bad.push(format!("D={big_d}, ({r},{s})"));
            }
        }
    }
    Ok(flag(bad, "equal"))
}

fn character_sums(_: &Ctx) -> Result<Outcome> {
    let mut bad = Vec::new();
    for big_d in (2..=120).filter(|&d| is_fundamental(d)) {
        for p in (2..=big_d).filter(|&p| big_d % p == 0 && is_prime(p as u64)) {
            for m in (p..big_d).step_by(p as usize) {
                let s: i32 = (0..p).map(|i| kronecker(big_d, m / p + i * big_d / p)).sum();
                if s != 0 {
                    bad.push(format!("D={big_d}, p={p}, m={m}"));
                }
            }
        }
    }
    Ok(flag(bad, "0"))
}

fn delta_eigenform(_: &Ctx) -> Result<Outcome> {
    let delta = FormSpec::delta().expand(30)?;
    let pe = to_exponents(&delta, disc(1))?;
    let mut bad = Vec::new();
    for p in [2u64, 3, 5] {
        let image = from_exponents(&mh_prime_exponents(&pe, p, 1)?)?;
        let power = delta.pow(p as i64 + 1)?;
        if !image.agrees_with(&power) || image.offset() != power.offset() {
            bad.push(format!("p={p}"));
        }
    }
    Ok(flag(bad, "equal"))
}

fn level_one_sums(_: &Ctx) -> Result<Outcome> {
    let pe = to_exponents(&j().expand(22)?, disc(1))?;
    let mut bad = Vec::new();
    for m in 1..=20u64 {
        let cm = mh_exponents_to(&pe, m, 1, 2)?;
        let weighted = divisors(m)
            .iter()
            .fold(Qt::zero(), |acc, &u| acc + pe.c[u as usize - 1].scale_int(u as i64));
        if cm.c[0] != weighted {
            bad.push(format!("m={m}"));
        }
    }
    Ok(flag(bad, "equal"))
}

fn chi_over_omega(_: &Ctx) -> Result<Outcome> {
    let mut bad = Vec::new();
    let mut instances = MATRIX.to_vec();
    instances.extend([
        (13, 324, 7),
        (13, 100, 7),
        (13, 900, 7),
        (8, 27, 1),
        (8, 75, 1),
        (5, 36, 1),
        (5, 100, 1),
    ]);
    for (big_d, d, level) in instances {
        let s = chi_over_omega_sum(&trace_classes(disc(big_d), d, level)?);
        if s.to_string() != "0" {
            bad.push(format!("({big_d},{d},{level}): {s}"));
        }
    }
    Ok(flag(bad, "0"))
}

fn faber_7_3(_: &Ctx) -> Result<Outcome> {
    let f = faber(7, 3, 2)?;
    Ok(outcome("[-24, -6, 0, 1]", list(&f.poly)))
}

const CHECKS: &[Check] = &[
    Check {
        id: "exponents.zagier",
        description: "c(8,1..3) of H_{8,3}",
        provenance: "published",
        run: zagier,
    },
    Check {
        id: "hecke.level11.t3",
        description: "level-11 form, D=8: T~(3) exponents n=1..3",
        provenance: "published",
        run: level11_t3,
    },
    Check {
        id: "hecke.level11.t9",
        description: "level-11 form, D=8: T~(9) exponents n=1..3",
        provenance: "published",
        run: level11_t9,
    },
    Check {
        id: "counterexample.exponents",
        description: "N=9: h and c(1..3)",
        provenance: "published",
        run: level9_exponents,
    },
    Check {
        id: "counterexample.t2",
        description: "N=9: f|T~(2) offset and exponents",
        provenance: "published",
        run: level9_t2,
    },
    Check {
        id: "counterexample.verdict",
        description: "N=9: not a multiplicative eigenform at p=2",
        provenance: "published",
        run: level9_verdict,
    },
    Check {
        id: "counterexample.alpha",
        description: "N=9: Hauptmodul value at the cusp 1/3",
        provenance: "published",
        run: level9_alpha_check,
    },
    Check {
        id: "traces.level7.13_4_f1",
        description: "(1/sqrt13) Tr_{13,4}(f_{7,1})",
        provenance: "published",
        run: tr_13_4_1,
    },
    Check {
        id: "traces.level7.13_4_f3",
        description: "(1/sqrt13) Tr_{13,4}(f_{7,3})",
        provenance: "published",
        run: tr_13_4_3,
    },
    Check {
        id: "traces.level7.13_36_f1",
        description: "(1/sqrt13) Tr_{13,36}(f_{7,1})",
        provenance: "published",
        run: tr_13_36_1,
    },
    Check {
        id: "traces.level7.congruence",
        description: "8244 = (13/3)(-6) mod 3",
        provenance: "published",
        run: level7_congruence,
    },
    Check {
        id: "traces.level7.identity_r1",
        description: "8244 = 6 + 8238",
        provenance: "published",
        run: level7_identity_1,
    },
    Check {
        id: "traces.level7.identity_r2",
        description: "Hecke identity for p^2 = 9 at (13,4,7)",
        provenance: "computed",
        run: level7_identity_2,
    },
    Check {
        id: "traces.matrix.integers",
        description: "(1/sqrtD) Tr(f_{N,1}) is an integer on the test matrix",
        provenance: "computed",
        run: matrix_integers,
    },
    Check {
        id: "traces.matrix.congruence",
        description: "congruence for p in {3,5} on the test matrix",
        provenance: "computed",
        run: matrix_congruences,
    },
    Check {
        id: "traces.matrix.stability",
        description: "doubling the precision changes no integer",
        provenance: "computed",
        run: stability,
    },
    Check {
        id: "classes.468.minus",
        description: "Q_{468,7,-6}/Gamma0(7)",
        provenance: "published",
        run: classes_468_minus,
    },
    Check {
        id: "classes.468.plus",
        description: "Q_{468,7,6}/Gamma0(7)",
        provenance: "published",
        run: classes_468_plus,
    },
    Check {
        id: "classes.52.minus",
        description: "Q_{52,7,-2}/Gamma0(7)",
        provenance: "published",
        run: classes_52_minus,
    },
    Check {
        id: "classes.52.plus",
        description: "Q_{52,7,2}/Gamma0(7)",
        provenance: "published",
        run: classes_52_plus,
    },
    Check {
        id: "properties.character_sums",
        description: "character sums vanish, D <= 120",
        provenance: "computed",
        run: character_sums,
    },
    Check {
        id: "properties.chi_over_omega",
        description: "sum chi/omega = 0 on every trace instance",
        provenance: "computed",
        run: chi_over_omega,
    },
    Check {
        id: "properties.composition",
        description: "T~(rs) = T~(r)T~(s) for (2,3), (2,5)",
        provenance: "computed",
        run: composition,
    },
    Check {
        id: "properties.d_independence",
        description: "weighted divisor sums agree for D in {1,5,8,13,17}",
        provenance: "computed",
        run: d_independence,
    },
    Check {
        id: "properties.delta",
        description: "Delta|T~(p) = Delta^(p+1), p in {2,3,5}",
        provenance: "computed",
        run: delta_eigenform,
    },
    Check {
        id: "properties.direct_vs_exponents",
        description: "T~(p) on series and on exponents agree",
        provenance: "computed",
        run: direct_vs_exponents,
    },
    Check {
        id: "properties.faber_7_3",
        description: "f_{7,3} = X^3 - 6X - 24",
        provenance: "published",
        run: faber_7_3,
    },
    Check {
        id: "properties.level_one",
        description: "c_m(1) = sum_{u|m} u c(u), m <= 20",
        provenance: "computed",
        run: level_one_sums,
    },
    Check {
        id: "properties.round_trip",
        description: "from_exponents(to_exponents(f)) = f at T=40",
        provenance: "computed",
        run: round_trip,
    },
];

pub fn groups() -> Vec<&'static str> {
    let mut g: Vec<&str> = CHECKS.iter().map(|c| c.id.split('.').next().unwrap_or(c.id)).collect();
    g.dedup();
    g
}

/// Checks whose id equals `only` or starts with `only.`; all of them for `None`.
pub fn run(ctx: &Ctx, only: Option<&str>, timings: bool) -> SuiteResult {
    let selected: Vec<&Check> = CHECKS
        .iter()
        .filter(|c| only.is_none_or(|o| c.id == o || c.id.starts_with(&format!("{o}."))))
        .collect();
    let mut checks: Vec<CheckResult> = std::thread::scope(|s| {
        let handles: Vec<_> = selected
            .iter()
            .map(|c| {
                s.spawn(move || {
                    let start = Instant::now();
                    let o = (c.run)(ctx).unwrap_or_else(|e| Outcome {
                        expected: String::new(),
                        got: format!("error: {e}"),
                        pass: false,
                    });
                    CheckResult {
                        id: c.id.into(),
                        description: c.description.into(),
                        provenance: c.provenance.into(),
                        expected: o.expected,
                        got: o.got,
                        pass: o.pass,
                        runtime_ms: timings.then(|| start.elapsed().as_millis() as u64),
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .zip(&selected)
            .map(|(h, c)| {
                h.join().unwrap_or_else(|_| CheckResult {
                    id: c.id.into(),
                    description: c.description.into(),
                    provenance: c.provenance.into(),
                    expected: String::new(),
                    got: "panicked".into(),
                    pass: false,
                    runtime_ms: None,
                })
            })
            .collect()
    });
    checks.sort_by(|a, b| a.id.cmp(&b.id));
    let passed = checks.iter().filter(|c| c.pass).count();
    SuiteResult {
        schema: "1",
        passed,
        failed: checks.len() - passed,
        checks,
    }
}
