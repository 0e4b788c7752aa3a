//! `Gamma_0(N)`-classes of forms `[a, b, c]` with `N | a`, the genus
//! character `chi_D`, and stabilizer orders.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::form::{reduced_forms, Bqf, UnimodularMatrix};
use crate::error::{Error, Result};
use crate::field::arith::gcd;
use crate::field::{kronecker, Discriminant};

/// `Some(gamma)` in `Gamma_0(N)` with `Q1 o gamma = Q2`, if one exists.
pub fn gamma0_equivalent(q1: &Bqf, q2: &Bqf, level: u64) -> Result<Option<UnimodularMatrix>> {
    let (r1, g1) = q1.reduce()?;
    let (r2, g2) = q2.reduce()?;
    if r1 != r2 {
        return Ok(None);
    }
    let g2_inv = g2.inverse();
    for u in r1.automorphs() {
        let gamma = g1.mul(&u).mul(&g2_inv);
        if gamma.in_gamma0(level) {
            debug_assert_eq!(q1.act(&gamma), *q2);
            return Ok(Some(gamma));
        }
    }
    Ok(None)
}

/// `|Gamma_0(N)_Q / {+-1}|`.
pub fn omega(q: &Bqf, level: u64) -> u32 {
    (q.automorphs().iter().filter(|g| g.in_gamma0(level)).count() / 2) as u32
}

/// Checks `-d = beta^2 (mod 4N)`.
pub fn check_square_condition(d: i64, level: u64, beta: i64) -> Result<()> {
    let m = 4 * level as i64;
    if (beta * beta + d).rem_euclid(m) != 0 {
        return Err(Error::InconsistentSquareCondition { d: -d, beta, modulus: m });
    }
    Ok(())
}

/// The residues `beta mod 2N` with `beta^2 = -d (mod 4N)`, in `[0, 2N)`.
pub fn admissible_betas(d: i64, level: u64) -> Vec<i64> {
    let two_n = 2 * level as i64;
    (0..two_n).filter(|b| (b * b + d).rem_euclid(2 * two_n) == 0).collect()
}

fn translate_b_into_range(q: Bqf) -> Bqf {
    let k = (q.a - q.b).div_euclid(2 * q.a);
    q.act(&UnimodularMatrix::translation(k))
}

/// Canonical representative of `(x : y)` in `P^1(Z/N)` under unit scaling.
fn p1_canonical(x: i64, y: i64, level: i64, units: &[i64]) -> (i64, i64) {
    units
        .iter()
        .map(|&u| ((u * x).rem_euclid(level), (u * y).rem_euclid(level)))
        .min()
        .expect("1 is a unit")
}

/// Exact enumeration of `Q_{d,N,beta} / Gamma_0(N)`.
///
/// For each SL2-reduced form `R` of discriminant `-d`, the forms `R o g` run
/// over the cosets `g Gamma_0(N)`, which are indexed by the first column of
/// `g` in `P^1(Z/N)`; `N | a` means `R(p, r) = 0 (mod N)`, and `Gamma_0(N)`
/// classes are the orbits of `Aut(R)` acting on the left. Each orbit is
/// represented by a lift with the smallest possible leading coefficient.
pub fn class_representatives(d: i64, level: u64, beta: i64) -> Result<ClassList> {
    check_square_condition(d, level, beta)?;
    let n = level as i64;
    let units: Vec<i64> = (1..=n.max(1)).filter(|&u| gcd(u, n) == 1).collect();
    let two_n = 2 * n;
    let mut reps = Vec::new();
    for r in reduced_forms(d)? {
        // qualifying points of P^1(Z/N), grouped into Aut(R)-orbits
        let mut orbit_of: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        let mut n_orbits = 0usize;
        let auts = r.automorphs();
        for x in 0..n {
            for y in 0..n {
                if gcd(gcd(x, y), n) != 1 || r.eval(x, y).rem_euclid(n as i128) != 0 {
                    continue;
                }
                let pt = p1_canonical(x, y, n, &units);
                if orbit_of.contains_key(&pt) {
                    continue;
                }
                for u in &auts {
                    let img = p1_canonical(u.p * pt.0 + u.q * pt.1, u.r * pt.0 + u.s * pt.1, n, &units);
                    orbit_of.insert(img, n_orbits);
                }
                n_orbits += 1;
            }
        }
        if n_orbits == 0 {
            continue;
        }
        for form in minimal_lifts(&r, &orbit_of, n_orbits, n, &units)? {
            if (form.b - beta).rem_euclid(two_n) == 0 {
                reps.push(form);
            }
        }
    }
    reps.sort();
    Ok(ClassList::new(d, level, beta.rem_euclid(two_n), reps))
}

/// For every orbit, the form `R o g` of smallest leading coefficient `R(p, r)`
/// over primitive lifts `(p, r)` of the orbit's points.
fn minimal_lifts(r: &Bqf, orbit_of: &BTreeMap<(i64, i64), usize>, n_orbits: usize, n: i64, units: &[i64]) -> Result<Vec<Bqf>> {
    // R(x, y) >= lambda (x^2 + y^2) with lambda the smaller eigenvalue
    let (a, b, c) = (r.a as f64, r.b as f64, r.c as f64);
    let lambda = ((a + c) - ((a - c).powi(2) + b * b).sqrt()) / 2.0;
    let mut best: Vec<Option<(i128, i64, i64)>> = vec![None; n_orbits];
    let mut k: i64 = 2;
    loop {
        for x in -k..=k {
            for y in 0..=k {
                if (y == 0 && x <= 0) || gcd(x, y) != 1 {
                    continue;
                }
                let pt = p1_canonical(x, y, n, units);
                let Some(&o) = orbit_of.get(&pt) else { continue };
                let v = r.eval(x, y);
                let cand = (v, x, y);
                if best[o].is_none_or(|cur| cand < cur) {
                    best[o] = Some(cand);
                }
            }
        }
        // lattice points outside the box have R >= lambda (k+1)^2
        let complete = best.iter().all(|b| b.is_some_and(|(v, _, _)| v as f64 <= lambda * (k * k) as f64));
        if complete {
            break;
        }
        k *= 2;
        if k > 1 << 20 {
            return Err(Error::InvalidArgument("coset lift search did not terminate".into()));
        }
    }
    best.into_iter()
        .map(|b| {
            let (_, x, y) = b.expect("all orbits found");
            let g = UnimodularMatrix::with_first_column(x, y)?;
            Ok(translate_b_into_range(r.act(&g)))
        })
        .collect()
}

/// Enumeration by a growing box: `|b| <= B`, `b = beta (mod 2N)`,
/// `N | a <= B N d`, deduplicated by [`gamma0_equivalent`]. Without an
/// explicit bound, `B` doubles until two consecutive rounds add nothing
/// and `B >= 4 N sqrt(d)`.
pub fn class_representatives_search(d: i64, level: u64, beta: i64, bound: Option<i64>) -> Result<ClassList> {
    check_square_condition(d, level, beta)?;
    let n = level as i64;
    let mut reps: Vec<Bqf> = Vec::new();
    let scan = |big_b: i64, reps: &mut Vec<Bqf>| -> Result<usize> {
        let mut added = 0;
        let b_start = -big_b + (beta - (-big_b)).rem_euclid(2 * n);
        let mut b = b_start;
        while b <= big_b {
            let mut a = n;
            while a <= big_b * n * d {
                let num = b * b + d;
                if num % (4 * a) == 0 {
                    let q = Bqf::new(a, b, num / (4 * a));
                    let mut known = false;
                    for rep in reps.iter() {
                        if gamma0_equivalent(rep, &q, level)?.is_some() {
                            known = true;
                            break;
                        }
                    }
                    if !known {
                        reps.push(q);
                        added += 1;
                    }
                }
                a += n;
            }
            b += 2 * n;
        }
        Ok(added)
    };
    match bound {
        Some(big_b) => {
            scan(big_b, &mut reps)?;
        }
        None => {
            let floor = 4 * n * ((d as f64).sqrt().ceil() as i64);
            let mut big_b = 1;
            let mut quiet = 0;
            while quiet < 2 || big_b <= floor {
                quiet = if scan(big_b, &mut reps)? == 0 { quiet + 1 } else { 0 };
                big_b *= 2;
            }
        }
    }
    let mut reps: Vec<Bqf> = reps.into_iter().map(translate_b_into_range).collect();
    reps.sort();
    Ok(ClassList::new(d, level, beta.rem_euclid(2 * n), reps))
}

/// Which represented integers [`genus_character`] may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepresentationSearch {
    /// Values `Q(x, y)` over primitive pairs in growing boxes.
    Box,
    /// Values `Q(x, y)` with `|y| >= 2` only (disjoint from the pairs
    /// `(1, 0)` and `(x, +-1)`), used to cross-check independence of `n`.
    FarPairs,
}

/// `chi_D(Q)` for `Q = [N a', b, c]` of discriminant `-dD`: `(D/n)` for an
/// integer `n` prime to `D` represented by `Q`, and 0 when `D` does not
/// divide the discriminant or `gcd(a', b, c, D) > 1`.
pub fn genus_character(q: &Bqf, d: Discriminant, level: u64) -> Result<i32> {
    genus_character_with(q, d, level, RepresentationSearch::Box)
}

pub fn genus_character_with(q: &Bqf, dd: Discriminant, level: u64, how: RepresentationSearch) -> Result<i32> {
    let big_d = dd.get();
    if big_d == 1 {
        return Ok(1);
    }
    let n = level as i64;
    if q.a % n != 0 {
        return Err(Error::InvalidArgument(format!("{q} is not in Q_N for N = {n}")));
    }
    let disc = q.disc();
    if disc % big_d != 0 {
        return Ok(0);
    }
    if gcd(gcd(gcd(q.a / n, q.b), q.c), big_d) != 1 {
        return Ok(0);
    }
    let min_y = match how {
        RepresentationSearch::Box => 0,
        RepresentationSearch::FarPairs => 2,
    };
    let limit: i64 = 64;
    for k in 1..=limit {
        for x in -k..=k {
            for y in min_y..=k.max(min_y) {
                if x.abs().max(y) != k || (y == 0 && x <= 0) || gcd(x, y) != 1 {
                    continue;
                }
                let v = q.eval(x, y);
                if gcd((v % big_d as i128) as i64, big_d) == 1 {
                    return Ok(kronecker(big_d, v as i64));
                }
            }
        }
    }
    Err(Error::SearchExhausted(big_d, q.a, q.b, q.c))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRep {
    pub form: Bqf,
    pub chi: i32,
    pub omega: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassList {
    pub d: i64,
    #[serde(rename = "N")]
    pub level: u64,
    pub beta: i64,
    /// The discriminant whose character is attached, if any.
    #[serde(rename = "D", default)]
    pub character: Option<i64>,
    pub reps: Vec<ClassRep>,
}

impl ClassList {
    fn new(d: i64, level: u64, beta: i64, forms: Vec<Bqf>) -> Self {
        let reps = forms
            .into_iter()
            .map(|form| ClassRep {
                form,
                chi: 1,
                omega: omega(&form, level),
            })
            .collect();
        Self {
            d,
            level,
            beta,
            character: None,
            reps,
        }
    }

    pub fn forms(&self) -> Vec<Bqf> {
        self.reps.iter().map(|r| r.form).collect()
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn with_character(mut self, d: Discriminant) -> Result<Self> {
        for rep in &mut self.reps {
            rep.chi = genus_character(&rep.form, d, self.level)?;
        }
        self.character = Some(d.get());
        Ok(self)
    }

    /// Same classes as `other`, up to `Gamma_0(N)`-equivalence.
    pub fn same_classes(&self, other: &[Bqf]) -> Result<bool> {
        if self.reps.len() != other.len() {
            return Ok(false);
        }
        for q in other {
            let mut hits = 0;
            for rep in &self.reps {
                if gamma0_equivalent(&rep.form, q, self.level)?.is_some() {
                    hits += 1;
                }
            }
            if hits != 1 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `Q_{d,N} / Gamma_0(N)` as the union over admissible `beta mod 2N`.
pub fn all_classes(d: i64, level: u64) -> Result<Vec<ClassList>> {
    admissible_betas(d, level)
        .into_iter()
        .map(|beta| class_representatives(d, level, beta))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forms(v: &[[i64; 3]]) -> Vec<Bqf> {
        v.iter().map(|&f| Bqf::from(f)).collect()
    }

    #[test]
    fn equivalence_examples() {
        let q = Bqf::new(14, 2, 1);
        assert_eq!(gamma0_equivalent(&q, &Bqf::new(7, 2, 2), 7).unwrap(), None);
        assert_eq!(gamma0_equivalent(&Bqf::new(1, 0, 6), &Bqf::new(2, 0, 3), 1).unwrap(), None);
        let gamma = UnimodularMatrix::new(3, 1, 14, 5).unwrap();
        let w = gamma0_equivalent(&q, &q.act(&gamma), 7).unwrap().unwrap();
        assert!(w.in_gamma0(7));
        assert_eq!(q.act(&w), q.act(&gamma));
    }

    #[test]
    fn omega_values() {
        assert_eq!(omega(&Bqf::new(1, 1, 1), 1), 3);
        assert_eq!(omega(&Bqf::new(1, 0, 1), 1), 2);
        assert_eq!(omega(&Bqf::new(1, 0, 6), 1), 1);
        assert_eq!(omega(&Bqf::new(7, 7, 2), 7), 1);
    }

    #[test]
    fn square_condition() {
        assert!(matches!(
            class_representatives(52, 7, 1),
            Err(Error::InconsistentSquareCondition { .. })
        ));
        assert_eq!(admissible_betas(52, 7), vec![2, 12]);
    }

    #[test]
    fn level7_lists() {
        let cases = [
            (52, 2, forms(&[[14, 2, 1], [7, 2, 2]])),
            (52, -2, forms(&[[49, 12, 1], [7, -2, 2]])),
        ];
        for (d, beta, expected) in cases {
            let list = class_representatives(d, 7, beta).unwrap();
            assert!(list.same_classes(&expected).unwrap(), "beta={beta}: {:?}", list.forms());
            let slow = class_representatives_search(d, 7, beta, None).unwrap();
            assert!(slow.same_classes(&list.forms()).unwrap());
        }
    }

    #[test]
    fn level_one_matches_reduced_forms() {
        for d in [3i64, 4, 23, 24, 52, 104, 132] {
            let all: Vec<Bqf> = all_classes(d, 1).unwrap().into_iter().flat_map(|l| l.forms()).collect();
            let mut reduced = reduced_forms(d).unwrap();
            reduced.sort();
            let mut got: Vec<Bqf> = all.iter().map(|q| q.reduce().unwrap().0).collect();
            got.sort();
            assert_eq!(got, reduced, "d={d}");
        }
    }

    #[test]
    fn class_counts_match_box_search() {
        for (d, n) in [(20i64, 3u64), (52, 7), (23, 2), (39, 5), (35, 9), (56, 9), (3, 7), (4, 5)] {
            for beta in admissible_betas(d, n) {
                let exact = class_representatives(d, n, beta).unwrap();
                let slow = class_representatives_search(d, n, beta, None).unwrap();
                assert!(exact.same_classes(&slow.forms()).unwrap(), "d={d} N={n} beta={beta}");
                for rep in &exact.reps {
                    assert_eq!(rep.form.a % n as i64, 0);
                    assert_eq!((rep.form.b - beta).rem_euclid(2 * n as i64), 0);
                    assert_eq!(rep.form.disc(), -d);
                }
            }
        }
    }

    #[test]
    fn genus_character_basics() {
        let d1 = Discriminant::new(1).unwrap();
        assert_eq!(genus_character(&Bqf::new(14, 2, 1), d1, 7).unwrap(), 1);
        let d13 = Discriminant::new(13).unwrap();
        let d5 = Discriminant::new(5).unwrap();
        for (d, n, dd) in [(52i64, 7u64, d13), (468, 7, d13), (20, 1, d5), (60, 3, d5), (40, 1, d5)] {
            let mut total = 0.0;
            for list in all_classes(d, n).unwrap() {
                for rep in list.with_character(dd).unwrap().reps {
                    let alt = genus_character_with(&rep.form, dd, n, RepresentationSearch::FarPairs).unwrap();
                    assert_eq!(rep.chi, alt, "{}", rep.form);
                    total += rep.chi as f64 / rep.omega as f64;
                    let lower = UnimodularMatrix::new(1, 0, n as i64, 1).unwrap();
                    let g = UnimodularMatrix::translation(3).mul(&lower).mul(&UnimodularMatrix::translation(-1));
                    let moved = rep.form.act(&g);
                    assert_eq!(genus_character(&moved, dd, n).unwrap(), rep.chi);
                }
            }
            assert_eq!(total, 0.0, "d={d} N={n}");
        }
    }
}
