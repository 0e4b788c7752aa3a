//! Expression trees describing modular objects, expanded to exact q-series.

use serde::{Deserialize, Serialize};

use super::classical::{delta, eisenstein, faber, hauptmodul, j_invariant};
use super::eta::EtaQuotientSpec;
use super::QSeries;
use crate::error::{Error, Result};
use crate::field::Qt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassicalName {
    E4,
    E6,
    Delta,
    J,
}

fn one() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FormSpec {
    EtaQuotient {
        level: u64,
        terms: Vec<(u64, i64)>,
    },
    /// `E_2(m tau)`.
    E2 {
        #[serde(default = "one")]
        m: u64,
    },
    /// A level-one form evaluated at `m tau`.
    Classical {
        name: ClassicalName,
        #[serde(default = "one")]
        m: u64,
    },
    Constant {
        value: Qt,
    },
    Scale {
        factor: Qt,
        form: Box<FormSpec>,
    },
    Sum {
        terms: Vec<FormSpec>,
    },
    Product {
        terms: Vec<FormSpec>,
    },
    Power {
        form: Box<FormSpec>,
        exponent: i64,
    },
    Hauptmodul {
        level: u64,
    },
    Faber {
        level: u64,
        n: u32,
    },
}

impl FormSpec {
    pub fn eta_quotient(level: u64, terms: &[(u64, i64)]) -> Self {
        FormSpec::EtaQuotient {
            level,
            terms: terms.to_vec(),
        }
    }

    pub fn scale(factor: Qt, form: FormSpec) -> Self {
        FormSpec::Scale {
            factor,
            form: Box::new(form),
        }
    }

    pub fn sum(terms: Vec<FormSpec>) -> Self {
        FormSpec::Sum { terms }
    }

    pub fn constant(value: Qt) -> Self {
        FormSpec::Constant { value }
    }

    /// Expands to at least `t` coefficients past the leading term, retrying
    /// with more working terms when cancellation or polar factors eat into
    /// the truncation.
    pub fn expand(&self, t: usize) -> Result<QSeries> {
        let mut work = t + self.slack();
        loop {
            let s = self.expand_raw(work)?;
            if s.truncation() >= t {
                return Ok(s.truncate(t));
            }
            if work > 16 * t + 256 {
                return Err(Error::InsufficientTruncation {
                    needed: t,
                    have: s.truncation(),
                });
            }
            work *= 2;
        }
    }

    /// Like [`expand`](Self::expand), but insists on an integer leading power.
    pub fn expand_integral(&self, t: usize) -> Result<QSeries> {
        let s = self.expand(t)?;
        s.int_offset()?;
        Ok(s)
    }

    fn slack(&self) -> usize {
        match self {
            FormSpec::Faber { n, .. } => *n as usize + 1,
            FormSpec::Hauptmodul { .. } => 1,
            FormSpec::Classical { name: ClassicalName::J, m } => *m as usize,
            FormSpec::Scale { form, .. } | FormSpec::Power { form, .. } => form.slack(),
            FormSpec::Sum { terms } | FormSpec::Product { terms } => terms.iter().map(|f| f.slack()).sum(),
            _ => 0,
        }
    }

    fn expand_raw(&self, t: usize) -> Result<QSeries> {
        Ok(match self {
            FormSpec::EtaQuotient { level, terms } => EtaQuotientSpec::new(*level, terms.clone())?.expand(t),
            FormSpec::E2 { m } => at_multiple(eisenstein(2, t.div_ceil(*m as usize))?, *m, t)?,
            FormSpec::Classical { name, m } => {
                let base_t = t.div_ceil(*m as usize);
                let base = match name {
                    ClassicalName::E4 => eisenstein(4, base_t)?,
                    ClassicalName::E6 => eisenstein(6, base_t)?,
                    ClassicalName::Delta => delta(base_t),
                    ClassicalName::J => j_invariant(base_t)?,
                };
                at_multiple(base, *m, t)?
            }
            FormSpec::Constant { value } => QSeries::constant(value.clone(), t),
            FormSpec::Scale { factor, form } => form.expand_raw(t)?.scale(factor)?,
            FormSpec::Sum { terms } => {
                let mut it = terms.iter();
                let first = it.next().ok_or_else(|| Error::InvalidSpec("empty sum".into()))?;
                it.try_fold(first.expand_raw(t)?, |acc, f| acc.add(&f.expand_raw(t)?))?
            }
            FormSpec::Product { terms } => {
                let mut acc = QSeries::one(t);
                for f in terms {
                    acc = acc.mul(&f.expand_raw(t)?)?;
                }
                acc
            }
            FormSpec::Power { form, exponent } => form.expand_raw(t)?.pow(*exponent)?,
            FormSpec::Hauptmodul { level } => hauptmodul(*level, t)?,
            FormSpec::Faber { level, n } => faber(*level, *n, t)?.series,
        })
    }

    /// The level-11 weight-2 form `-(E_2 - 11 E_2(11 tau) + 24 eta^2 eta(11 tau)^2) / 10`.
    pub fn level11_weight2() -> Self {
        FormSpec::scale(
            Qt::from_frac(-1, 10),
            FormSpec::sum(vec![
                FormSpec::E2 { m: 1 },
                FormSpec::scale(Qt::from_integer(-11), FormSpec::E2 { m: 11 }),
                FormSpec::scale(Qt::from_integer(24), FormSpec::eta_quotient(11, &[(1, 2), (11, 2)])),
            ]),
        )
    }

    /// `(eta(tau)/eta(9 tau))^3 - alpha`.
    pub fn level9_shifted(alpha: Qt) -> Self {
        FormSpec::sum(vec![FormSpec::Hauptmodul { level: 9 }, FormSpec::constant(-alpha)])
    }

    pub fn delta() -> Self {
        FormSpec::Classical {
            name: ClassicalName::Delta,
            m: 1,
        }
    }
}

fn at_multiple(base: QSeries, m: u64, t: usize) -> Result<QSeries> {
    if m == 0 {
        return Err(Error::InvalidSpec("multiplier m must be positive".into()));
    }
    Ok(base.substitute_power(m).truncate(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shapes() {
        let s: FormSpec = serde_json::from_str(r#"{"type":"eta_quotient","level":9,"terms":[[1,3],[9,-3]]}"#).unwrap();
        assert_eq!(s, FormSpec::eta_quotient(9, &[(1, 3), (9, -3)]));
        let s: FormSpec = serde_json::from_str(r#"{"type":"e2","m":11}"#).unwrap();
        assert_eq!(s, FormSpec::E2 { m: 11 });
        let s: FormSpec = serde_json::from_str(r#"{"type":"faber","level":7,"n":3}"#).unwrap();
        assert_eq!(s, FormSpec::Faber { level: 7, n: 3 });
        let s: FormSpec = serde_json::from_str(r#"{"type":"scale","factor":"-1/10","form":{"type":"classical","name":"Delta"}}"#).unwrap();
        assert_eq!(s, FormSpec::scale(Qt::from_frac(-1, 10), FormSpec::delta()));
        let text = serde_json::to_string(&FormSpec::level11_weight2()).unwrap();
        let back: FormSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, FormSpec::level11_weight2());
    }

    #[test]
    fn level11_form_has_no_linear_term() {
        let f = FormSpec::level11_weight2().expand(12).unwrap();
        assert_eq!(f.int_offset().unwrap(), 0);
        assert!(f.coeffs()[0].is_one());
        assert!(f.coeffs()[1].is_zero());
        assert!(!f.coeffs()[2].is_zero());
        assert_eq!(f.truncation(), 12);
    }

    #[test]
    fn eta_substitution_matches_leaf() {
        let direct = FormSpec::eta_quotient(9, &[(9, 1)]).expand(40).unwrap();
        let sub = FormSpec::eta_quotient(1, &[(1, 1)])
            .expand(40)
            .unwrap()
            .substitute_power(9)
            .truncate(40);
        assert_eq!(direct, sub);
    }

    #[test]
    fn integral_offsets_enforced() {
        let eta = FormSpec::eta_quotient(1, &[(1, 1)]);
        assert!(matches!(eta.expand_integral(5), Err(Error::FractionalOffset(_))));
        assert!(FormSpec::eta_quotient(1, &[(1, 24)]).expand_integral(5).is_ok());
    }

    #[test]
    fn faber_leaf_keeps_requested_truncation() {
        let f = FormSpec::Faber { level: 7, n: 3 }.expand(20).unwrap();
        assert_eq!(f.truncation(), 20);
        assert_eq!(f.int_offset().unwrap(), -3);
    }
}
