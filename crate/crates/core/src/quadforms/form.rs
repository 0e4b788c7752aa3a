//! Binary quadratic forms, SL2(Z) matrices, reduction and automorphs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::arith::ext_gcd;

/// `a x^2 + b x y + c y^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 3]", into = "[i64; 3]")]
pub struct Bqf {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl From<[i64; 3]> for Bqf {
    fn from([a, b, c]: [i64; 3]) -> Self {
        Self { a, b, c }
    }
}

impl From<Bqf> for [i64; 3] {
    fn from(q: Bqf) -> Self {
        [q.a, q.b, q.c]
    }
}

impl fmt::Display for Bqf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.a, self.b, self.c)
    }
}

impl Bqf {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    /// A positive definite form, or [`Error::NotPositiveDefinite`].
    pub fn positive_definite(a: i64, b: i64, c: i64) -> Result<Self> {
        let q = Self { a, b, c };
        if a > 0 && q.disc() < 0 {
            Ok(q)
        } else {
            Err(Error::NotPositiveDefinite(a, b, c))
        }
    }

    /// `b^2 - 4ac`.
    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn eval(&self, x: i64, y: i64) -> i128 {
        let (x, y) = (x as i128, y as i128);
        self.a as i128 * x * x + self.b as i128 * x * y + self.c as i128 * y * y
    }

    pub fn content(&self) -> i64 {
        num_integer::gcd(num_integer::gcd(self.a, self.b), self.c)
    }

    /// `(Q o g)(x, y) = Q(p x + q y, r x + s y)`.
    pub fn act(&self, g: &UnimodularMatrix) -> Self {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        let (p, q, r, s) = (g.p as i128, g.q as i128, g.r as i128, g.s as i128);
        let na = a * p * p + b * p * r + c * r * r;
        let nb = 2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s;
        let nc = a * q * q + b * q * s + c * s * s;
        Self {
            a: na as i64,
            b: nb as i64,
            c: nc as i64,
        }
    }

    pub fn is_reduced(&self) -> bool {
        self.b.abs() <= self.a && self.a <= self.c && (self.b >= 0 || (self.b.abs() != self.a && self.a != self.c))
    }

    /// Gauss reduction: returns `(R, g)` with `Q o g = R` reduced.
    pub fn reduce(&self) -> Result<(Bqf, UnimodularMatrix)> {
        if self.a <= 0 || self.disc() >= 0 {
            return Err(Error::NotPositiveDefinite(self.a, self.b, self.c));
        }
        let mut q = *self;
        let mut g = UnimodularMatrix::identity();
        loop {
            // b into (-a, a]
            let k = (q.a - q.b).div_euclid(2 * q.a);
            if k != 0 {
                let t = UnimodularMatrix::translation(k);
                q = q.act(&t);
                g = g.mul(&t);
            }
            if q.c < q.a {
                let s = UnimodularMatrix::s();
                q = q.act(&s);
                g = g.mul(&s);
                continue;
            }
            if q.a == q.c && q.b < 0 {
                let s = UnimodularMatrix::s();
                q = q.act(&s);
                g = g.mul(&s);
            }
            debug_assert!(q.is_reduced(), "{q}");
            return Ok((q, g));
        }
    }

    /// All `g` in SL2(Z) with `Q o g = Q`.
    pub fn automorphs(&self) -> Vec<UnimodularMatrix> {
        let d = -self.disc();
        let mut sols: Vec<(i64, i64)> = vec![(2, 0), (-2, 0)];
        if d == 3 {
            sols.extend([(1, 1), (1, -1), (-1, 1), (-1, -1)]);
        } else if d == 4 {
            sols.extend([(0, 1), (0, -1)]);
        }
        sols.into_iter()
            .filter_map(|(t, u)| {
                let (b, c, a) = (self.b, self.c, self.a);
                if (t - b * u) % 2 != 0 {
                    return None;
                }
                let g = UnimodularMatrix {
                    p: (t - b * u) / 2,
                    q: -c * u,
                    r: a * u,
                    s: (t + b * u) / 2,
                };
                (g.det() == 1 && self.act(&g) == *self).then_some(g)
            })
            .collect()
    }
}

/// `[[p, q], [r, s]]` with `p s - q r = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnimodularMatrix {
    pub p: i64,
    pub q: i64,
    pub r: i64,
    pub s: i64,
}

impl fmt::Display for UnimodularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.p, self.q, self.r, self.s)
    }
}

impl UnimodularMatrix {
    pub fn new(p: i64, q: i64, r: i64, s: i64) -> Result<Self> {
        let g = Self { p, q, r, s };
        if g.det() == 1 {
            Ok(g)
        } else {
            Err(Error::InvalidArgument(format!("{g} has determinant {}", g.det())))
        }
    }

    pub fn identity() -> Self {
        Self { p: 1, q: 0, r: 0, s: 1 }
    }

    pub fn translation(k: i64) -> Self {
        Self { p: 1, q: k, r: 0, s: 1 }
    }

    pub fn s() -> Self {
        Self { p: 0, q: -1, r: 1, s: 0 }
    }

    pub fn det(&self) -> i64 {
        self.p * self.s - self.q * self.r
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            p: self.p * o.p + self.q * o.r,
            q: self.p * o.q + self.q * o.s,
            r: self.r * o.p + self.s * o.r,
            s: self.r * o.q + self.s * o.s,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            p: self.s,
            q: -self.q,
            r: -self.r,
            s: self.p,
        }
    }

    pub fn in_gamma0(&self, level: u64) -> bool {
        self.r.rem_euclid(level as i64) == 0
    }

    /// Some matrix with first column `(p, r)`, for coprime `p`, `r`.
    pub fn with_first_column(p: i64, r: i64) -> Result<Self> {
        let (g, x, y) = ext_gcd(p, r);
        if g != 1 {
            return Err(Error::InvalidArgument(format!("({p}, {r}) is not primitive")));
        }
        // p x + r y = 1  =>  [[p, -y], [r, x]]
        Ok(Self { p, q: -y, r, s: x })
    }
}

/// All reduced forms of discriminant `-d` (primitive or not).
pub fn reduced_forms(d: i64) -> Result<Vec<Bqf>> {
    if d <= 0 || !matches!(d.rem_euclid(4), 0 | 3) {
        return Err(Error::InvalidArgument(format!("-{d} is not a negative discriminant")));
    }
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= d {
        for b in -a + 1..=a {
            let num = b * b + d;
            if num % (4 * a) != 0 {
                continue;
            }
            let q = Bqf::new(a, b, num / (4 * a));
            if q.is_reduced() {
                out.push(q);
            }
        }
        a += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn action_examples() {
        let q = Bqf::new(1, 0, 6);
        assert_eq!(q.act(&UnimodularMatrix::identity()), q);
        assert_eq!(q.act(&UnimodularMatrix::translation(1)), Bqf::new(1, 2, 7));
        assert_eq!(q.act(&UnimodularMatrix::s()), Bqf::new(6, 0, 1));
    }

    #[test]
    fn reduction_examples() {
        for q in [Bqf::new(1, 0, 6), Bqf::new(2, 0, 3)] {
            assert_eq!(q.reduce().unwrap(), (q, UnimodularMatrix::identity()));
        }
        let (r, g) = Bqf::new(6, 6, 7).reduce().unwrap();
        assert_eq!(Bqf::new(6, 6, 7).act(&g), r);
        assert!(reduced_forms(132).unwrap().contains(&r));
        assert!(matches!(Bqf::new(1, 5, 1).reduce(), Err(Error::NotPositiveDefinite(..))));
    }

    #[test]
    fn reduced_forms_by_brute_force() {
        // every form with small coefficients reduces into the list
        for d in [3i64, 4, 15, 20, 23, 24, 52, 132] {
            let list = reduced_forms(d).unwrap();
            for a in 1..30 {
                for b in -30..30 {
                    if (b * b + d) % (4 * a) == 0 {
                        let q = Bqf::new(a, b, (b * b + d) / (4 * a));
                        let (r, _) = q.reduce().unwrap();
                        assert!(list.contains(&r), "{q} -> {r}");
                    }
                }
            }
        }
        assert_eq!(reduced_forms(24).unwrap(), vec![Bqf::new(1, 0, 6), Bqf::new(2, 0, 3)]);
    }

    fn brute_automorphs(q: &Bqf) -> usize {
        let mut n = 0;
        for p in -2..=2 {
            for r in -2..=2 {
                for s in -2..=2 {
                    for t in -2..=2 {
                        let g = UnimodularMatrix { p, q: r, r: s, s: t };
                        if g.det() == 1 && q.act(&g) == *q {
                            n += 1;
                        }
                    }
                }
            }
        }
        n
    }

    #[test]
    fn automorph_counts() {
        for (q, n) in [(Bqf::new(1, 0, 6), 2), (Bqf::new(1, 1, 1), 6), (Bqf::new(1, 0, 1), 4)] {
            assert_eq!(q.automorphs().len(), n, "{q}");
            assert_eq!(brute_automorphs(&q), n, "{q}");
        }
    }

    fn arb_matrix() -> impl Strategy<Value = UnimodularMatrix> {
        proptest::collection::vec((-4i64..5, 0usize..2), 1..6).prop_map(|steps| {
            steps.into_iter().fold(UnimodularMatrix::identity(), |g, (k, which)| {
                g.mul(&if which == 0 {
                    UnimodularMatrix::translation(k)
                } else {
                    UnimodularMatrix::s()
                })
            })
        })
    }

    proptest! {
        #[test]
        fn action_invariants(g in arb_matrix(), h in arb_matrix(), a in 1i64..20, b in -20i64..20, c in 1i64..40) {
            prop_assume!(b * b - 4 * a * c < 0);
            let q = Bqf::new(a, b, c);
            prop_assert_eq!(q.act(&g).disc(), q.disc());
            prop_assert_eq!(q.act(&g).act(&h), q.act(&g.mul(&h)));
            let (r, m) = q.reduce().unwrap();
            prop_assert_eq!(q.act(&m), r);
            prop_assert_eq!(r.reduce().unwrap().0, r);
            prop_assert_eq!(q.act(&g).reduce().unwrap().0, r);
        }
    }
}
