//! Level-one Eisenstein series, the discriminant, `j`, and the supported
//! Hauptmoduln with their Faber polynomials.

use num_bigint::BigInt;
use num_traits::Zero;

use super::eta::{euler_power, EtaQuotientSpec};
use super::QSeries;
use crate::error::{Error, Result};
use crate::field::arith::sigma_k;
use crate::field::{Qt, Rational};

/// `E_k = 1 + scale * sum sigma_{k-1}(n) q^n` for `k` in {2, 4, 6}.
pub fn eisenstein(k: u32, t: usize) -> Result<QSeries> {
    let scale: i64 = match k {
        2 => -24,
        4 => 240,
        6 => -504,
        _ => return Err(Error::InvalidArgument(format!("Eisenstein series of weight {k} not supported"))),
    };
    let mut coeffs = vec![BigInt::zero(); t.max(1)];
    coeffs[0] = BigInt::from(1);
    for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
        *c = BigInt::from(sigma_k(n as u64, k - 1)) * scale;
    }
    Ok(QSeries::from_bigints(Rational::zero(), coeffs))
}

/// `Delta = q prod (1 - q^n)^24`.
pub fn delta(t: usize) -> QSeries {
    QSeries::from_bigints(Rational::from_integer(1.into()), euler_power(1, 24, t))
}

/// `j = E_4^3 / Delta`.
pub fn j_invariant(t: usize) -> Result<QSeries> {
    eisenstein(4, t)?.pow(3)?.div(&delta(t))
}

pub const SUPPORTED_LEVELS: [u64; 3] = [1, 7, 9];

/// The normalized Hauptmodul `q^{-1} + O(1)` of `Gamma_0(N)` for `N` in
/// {1, 7, 9}: `j`, `(eta(tau)/eta(7 tau))^4 + 4`, `(eta(tau)/eta(9 tau))^3`.
pub fn hauptmodul(level: u64, t: usize) -> Result<QSeries> {
    match level {
        1 => j_invariant(t),
        7 => EtaQuotientSpec::new(7, vec![(1, 4), (7, -4)])?
            .expand(t)
            .add(&QSeries::constant(Qt::from_integer(4), t)),
        9 => Ok(EtaQuotientSpec::new(9, vec![(1, 3), (9, -3)])?.expand(t)),
        _ => Err(Error::UnsupportedLevel(level)),
    }
}

/// A Faber polynomial `P` (coefficients in ascending degree) together with
/// the expansion of `P(hauptmodul)`.
#[derive(Clone, Debug)]
pub struct Faber {
    pub level: u64,
    pub n: u32,
    pub poly: Vec<Qt>,
    pub series: QSeries,
}

/// The monic polynomial `P` of degree `n` with `P(f_{N,1}) = q^{-n} + O(q)`.
pub fn faber(level: u64, n: u32, t: usize) -> Result<Faber> {
    if n == 0 {
        return Err(Error::InvalidArgument("Faber index must be positive".into()));
    }
    let h = hauptmodul(level, t + n as usize)?;
    let mut powers = vec![QSeries::one(t + n as usize)];
    for k in 1..=n as usize {
        powers.push(powers[k - 1].mul(&h)?);
    }
    let mut poly = vec![Qt::zero(); n as usize + 1];
    poly[n as usize] = Qt::one();
    let mut rest = powers[n as usize].clone();
    for k in (0..n as usize).rev() {
        let c = rest.coeff(-(k as i64)).expect("polar part is within the truncation");
        if !c.is_zero() {
            rest = rest.sub(&powers[k].scale(&c)?)?;
            poly[k] = -c;
        }
    }
    Ok(Faber {
        level,
        n,
        poly,
        series: rest.truncate(t),
    })
}
