use mulhecke_core::field::{is_fundamental, kronecker, Discriminant, Qt, Rational};
use mulhecke_core::prodexp::pd_series;
use mulhecke_core::traces::{BigComplex, BigFloat};
use num_bigint::BigInt;

const P: u32 = 192;

/// (a/p) for an odd prime p by Euler's criterion.
fn legendre(a: i64, p: i64) -> i32 {
    let a = a.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    let mut r = 1i64;
    let (mut b, mut e) = (a, (p - 1) / 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

/// (D/n) for n > 0 from the prime factorization of n.
fn kronecker_oracle(d: i64, mut n: i64) -> i32 {
    let mut out = 1;
    let mut p = 2;
    while n > 1 {
        while n % p == 0 {
            out *= if p == 2 {
                match d.rem_euclid(8) {
                    1 | 7 => 1,
                    3 | 5 => -1,
                    _ => 0,
                }
            } else {
                legendre(d, p)
            };
            n /= p;
        }
        p += 1;
    }
    out
}

fn fundamentals(limit: i64) -> Vec<i64> {
    (2..=limit).filter(|&d| is_fundamental(d)).collect()
}

#[test]
fn kronecker_agrees_with_factorization_oracle() {
    for d in fundamentals(120) {
        for n in 1..200 {
            assert_eq!(kronecker(d, n), kronecker_oracle(d, n), "({d}/{n})");
        }
    }
}

#[test]
fn character_sums_vanish() {
    let mut checked = 0;
    for d in fundamentals(120) {
        for p in (2..=d).filter(|&p| d % p == 0 && (2..p).all(|q| p % q != 0)) {
            for m in (p..d).step_by(p as usize) {
                let s: i32 = (0..p).map(|i| kronecker(d, m / p + i * d / p)).sum();
                let oracle: i32 = (0..p).map(|i| kronecker_oracle(d, m / p + i * d / p)).sum();
                assert_eq!(s, 0, "D={d} p={p} m={m}");
                assert_eq!(oracle, 0);
                checked += 1;
            }
        }
    }
    assert!(checked > 300);
}

fn zeta_power(k: i64, d: i64) -> BigComplex {
    BigComplex::exp_2pi_i(&BigFloat::from_rational(&Rational::new(k.into(), d.into()), P))
}

fn close(a: &BigComplex, b: &BigComplex) -> bool {
    let diff = a.sub(b).abs();
    diff.is_zero() || diff.magnitude() < -150
}

#[test]
fn gauss_sums() {
    for d in [5i64, 8, 12, 13, 17, 21, 24] {
        let root = BigFloat::from_int(d, P).sqrt().unwrap();
        for r in 1..=d {
            let mut sum = BigComplex::zero(P);
            for m in 1..d {
                let chi = kronecker(d, m);
                if chi != 0 {
                    sum = sum.add(&zeta_power(m * r, d).scale(&BigFloat::from_int(chi, P)));
                }
            }
            let expect = BigComplex::from_real(root.mul_int(kronecker(d, r) as i64));
            assert!(close(&sum, &expect), "D={d} r={r}: {sum}");
        }
    }
}

#[test]
fn pd_equals_its_cyclotomic_product() {
    // P_D(t) = prod_{0<m<D} (1 - zeta_D^m t)^{(D/m)}
    let t = BigComplex::from_f64(0.3, 0.2, P);
    for d in [5i64, 8, 13, 24] {
        let mut product = BigComplex::one(P);
        for m in 1..d {
            let chi = kronecker(d, m);
            if chi != 0 {
                let factor = BigComplex::one(P).sub(&zeta_power(m, d).mul(&t));
                product = product.mul(&factor.pow(chi as i64).unwrap());
            }
        }
        let s = pd_series(Discriminant::new(d).unwrap(), 200).unwrap();
        let mut acc = BigComplex::zero(P);
        for c in s.coeffs().iter().rev() {
            acc = acc.mul(&t).add(&BigComplex::from_qt(c, P));
        }
        assert!(close(&acc, &product), "D={d}");
    }
    // D = 1: 1 - t
    assert_eq!(
        pd_series(Discriminant::new(1).unwrap(), 3).unwrap().coeffs()[1],
        Qt::from_bigint(BigInt::from(-1))
    );
}
