//! Elementary integer helpers: divisors, factorization, squarefree parts.

use num_integer::Integer;

/// All positive divisors of `n`, sorted ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1, "divisors: n must be positive");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Sum of the positive divisors of `n`.
pub fn sigma(n: u64) -> u64 {
    divisors(n).into_iter().sum()
}

/// Sum of `d^k` over the divisors of `n`.
pub fn sigma_k(n: u64, k: u32) -> u128 {
    divisors(n).into_iter().map(|d| (d as u128).pow(k)).sum()
}

/// Prime factorization of `n >= 1` as `(prime, exponent)` pairs in ascending order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let f = factorize(n);
    f.len() == 1 && f[0].1 == 1
}

/// Writes `n = g^2 * s` with `s` squarefree (sign carried by `s`). Returns `(g, s)`.
///
/// `n = 0` maps to `(0, 0)`.
pub fn squarefree_decomposition(n: i64) -> (u64, i64) {
    if n == 0 {
        return (0, 0);
    }
    let sign = n.signum();
    let mut g = 1u64;
    let mut s = 1u64;
    for (p, e) in factorize(n.unsigned_abs()) {
        g *= p.pow(e / 2);
        if e % 2 == 1 {
            s *= p;
        }
    }
    (g, sign * s as i64)
}

pub fn squarefree_part(n: i64) -> i64 {
    squarefree_decomposition(n).1
}

pub fn is_squarefree(n: i64) -> bool {
    n != 0 && squarefree_part(n) == n
}

/// True iff `d` is 1 or a fundamental discriminant (of either sign).
pub fn is_fundamental(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    if d == 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m)
        }
        _ => false,
    }
}

/// Euler totient.
pub fn totient(n: u64) -> u64 {
    factorize(n).into_iter().fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Extended Euclid on signed integers: returns `(g, x, y)` with `a x + b y = g >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let e = (a as i128).extended_gcd(&(b as i128));
    let (g, x, y) = if e.gcd < 0 { (-e.gcd, -e.x, -e.y) } else { (e.gcd, e.x, e.y) };
    (g as i64, x as i64, y as i64)
}

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Index of `Gamma_0(N)` in `SL_2(Z)`: `N * prod_{p | N} (1 + 1/p)`.
pub fn gamma0_index(n: u64) -> u64 {
    factorize(n).into_iter().fold(n, |acc, (p, _)| acc / p * (p + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_divisors(n: u64) -> Vec<u64> {
        (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
    }

    #[test]
    fn divisors_match_trial_division() {
        for n in 1..300 {
            assert_eq!(divisors(n), brute_divisors(n), "n = {n}");
        }
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(sigma(12), 28);
    }

    #[test]
    fn sigma_small_values() {
        assert_eq!(sigma(1), 1);
        assert_eq!(sigma(2), 3);
        assert_eq!(sigma(3), 4);
        assert_eq!(sigma_k(2, 3), 9);
    }

    #[test]
    fn fundamental_discriminants() {
        assert!(is_fundamental(1));
        assert!(is_fundamental(8));
        assert!(is_fundamental(5));
        assert!(is_fundamental(13));
        assert!(is_fundamental(12));
        assert!(!is_fundamental(4));
        assert!(!is_fundamental(9));
        assert!(!is_fundamental(16));
        assert!(!is_fundamental(2));
        assert!(is_fundamental(-3));
        assert!(is_fundamental(-4));
        let positive: Vec<i64> = (1..=30).filter(|&d| is_fundamental(d)).collect();
        assert_eq!(positive, vec![1, 5, 8, 12, 13, 17, 21, 24, 28, 29]);
    }

    #[test]
    fn squarefree_reduction() {
        assert_eq!(squarefree_decomposition(8), (2, 2));
        assert_eq!(squarefree_decomposition(-12), (2, -3));
        assert_eq!(squarefree_decomposition(1), (1, 1));
        assert_eq!(squarefree_decomposition(-1), (1, -1));
    }

    #[test]
    fn index_and_totient() {
        assert_eq!(gamma0_index(1), 1);
        assert_eq!(gamma0_index(7), 8);
        assert_eq!(gamma0_index(9), 12);
        assert_eq!(totient(9), 6);
        assert_eq!(totient(1), 1);
    }

    #[test]
    fn extended_gcd_identity() {
        for a in -20i64..20 {
            for b in -20i64..20 {
                let (g, x, y) = ext_gcd(a, b);
                assert_eq!(a * x + b * y, g);
                assert_eq!(g, gcd(a, b));
            }
        }
    }
}
