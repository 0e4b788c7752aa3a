//! Kronecker symbol `(a/n)`.

/// Jacobi symbol `(a/b)` for odd positive `b`.
fn jacobi(a: i128, b: i128) -> i32 {
    debug_assert!(b > 0 && b % 2 == 1);
    let mut a = a.rem_euclid(b);
    let mut b = b;
    let mut result = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(b % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut b);
        if a % 4 == 3 && b % 4 == 3 {
            result = -result;
        }
        a %= b;
    }
    if b == 1 {
        result
    } else {
        0
    }
}

/// The Kronecker symbol `(a/n)`, the completely multiplicative extension of
/// the Jacobi symbol to all integers `n`.
///
/// Conventions: `(a/0) = 1` if `|a| = 1` and `0` otherwise; `(a/-1)` is the
/// sign of `a`; `(a/2)` is `0` for even `a` and `(-1)^((a^2-1)/8)` for odd `a`.
pub fn kronecker(a: i64, n: i64) -> i32 {
    let a = a as i128;
    let mut n = n as i128;
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut k = 1;
    if n < 0 {
        n = -n;
        if a < 0 {
            k = -k;
        }
    }
    let v = n.trailing_zeros();
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            k = -k;
        }
        n >>= v;
    }
    k * jacobi(a, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::arith::{is_fundamental, is_prime};

    /// Legendre symbol by counting square roots modulo an odd prime.
    fn legendre_by_counting(a: i64, p: i64) -> i32 {
        let roots = (0..p).filter(|x| (x * x - a).rem_euclid(p) == 0).count();
        roots as i32 - 1
    }

    #[test]
    fn reference_values() {
        assert_eq!(kronecker(8, 1), 1);
        assert_eq!(kronecker(8, 3), -1);
        assert_eq!(kronecker(8, 5), -1);
        assert_eq!(kronecker(8, 7), 1);
        assert_eq!(kronecker(8, 2), 0);
        assert_eq!(kronecker(13, 3), legendre_by_counting(13, 3));
        assert_eq!(kronecker(13, 3), 1);
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(5, 2), -1);
    }

    #[test]
    fn zero_and_negative_arguments() {
        assert_eq!(kronecker(1, 0), 1);
        assert_eq!(kronecker(-1, 0), 1);
        assert_eq!(kronecker(8, 0), 0);
        assert_eq!(kronecker(5, -1), 1);
        assert_eq!(kronecker(-3, -1), -1);
        assert_eq!(kronecker(1, 12345), 1);
    }

    #[test]
    fn agrees_with_counting_at_odd_primes() {
        for p in (3..200).filter(|&p| is_prime(p as u64)) {
            for a in -60..60 {
                assert_eq!(kronecker(a, p), legendre_by_counting(a, p), "a={a} p={p}");
            }
        }
    }

    #[test]
    fn multiplicative_and_periodic_for_fundamental() {
        for d in (1..=60).filter(|&d| is_fundamental(d)) {
            for m in 1..=120 {
                for n in 1..=120 {
                    assert_eq!(kronecker(d, m * n), kronecker(d, m) * kronecker(d, n), "d={d} m={m} n={n}");
                }
                assert_eq!(kronecker(d, m), kronecker(d, m + d), "period d={d} m={m}");
            }
        }
    }
}
