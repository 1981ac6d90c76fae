//! Class groups of imaginary quadratic orders through reduced binary
//! quadratic forms and Gauss composition.

use std::collections::{BTreeMap, HashSet};

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::is_prime;
use crate::shape::Shape;

/// Largest `|d|` accepted by [`class_group`].
pub const MAX_ABS_DISCRIMINANT: i64 = 100_000_000;

/// `a x^2 + b x y + c y^2` with negative discriminant and `a > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// `|b| <= a <= c`, with `b >= 0` when `|b| = a` or `a = c`.
    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
    }

    /// The principal form of discriminant `d`.
    pub fn identity(d: i64) -> QuadForm {
        let b = d.rem_euclid(2);
        QuadForm { a: 1, b, c: (b * b - d) / 4 }
    }

    pub fn inverse(&self) -> QuadForm {
        QuadForm { a: self.a, b: -self.b, c: self.c }.reduce()
    }

    /// The unique reduced form equivalent to `self`.
    pub fn reduce(&self) -> QuadForm {
        let d = self.discriminant() as i128;
        let (mut a, mut b) = (self.a as i128, self.b as i128);
        let mut c;
        loop {
            // move b into (-a, a]
            let two_a = 2 * a;
            let mut r = b.rem_euclid(two_a);
            if r > a {
                r -= two_a;
            }
            b = r;
            c = (b * b - d) / (4 * a);
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            break;
        }
        QuadForm { a: a as i64, b: b as i64, c: c as i64 }
    }

    /// Dirichlet composition followed by reduction.
    pub fn compose(&self, other: &QuadForm) -> QuadForm {
        let d = self.discriminant() as i128;
        debug_assert_eq!(d, other.discriminant() as i128);
        let (a1, b1) = (self.a as i128, self.b as i128);
        let (a2, b2) = (other.a as i128, other.b as i128);
        let beta = (b1 + b2) / 2;
        // e = gcd(a1, a2, beta) = mu a1 + nu a2 + omega beta
        let g1 = a1.extended_gcd(&a2);
        let g2 = g1.gcd.extended_gcd(&beta);
        let e = g2.gcd;
        let (mu, nu, omega) = (g2.x * g1.x, g2.x * g1.y, g2.y);
        let a3 = a1 * a2 / (e * e);
        let num = mu * a1 * b2 + nu * a2 * b1 + omega * (b1 * b2 + d) / 2;
        let b3 = (num / e).rem_euclid(2 * a3);
        debug_assert_eq!((b3 * b3 - d).rem_euclid(4 * a3), 0);
        let c3 = (b3 * b3 - d) / (4 * a3);
        QuadForm { a: a3 as i64, b: b3 as i64, c: c3 as i64 }.reduce()
    }

    pub fn pow(&self, mut e: u64) -> QuadForm {
        let mut base = *self;
        let mut acc = QuadForm::identity(self.discriminant());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }
}

fn squarefree(n: u64) -> bool {
    let mut n = n;
    let mut q = 2u64;
    while q * q <= n {
        if n.is_multiple_of(q) {
            n /= q;
            if n.is_multiple_of(q) {
                return false;
            }
        }
        q += 1;
    }
    true
}

/// Fundamental discriminant of an imaginary quadratic field.
pub fn is_fundamental(d: i64) -> bool {
    if d >= 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => squarefree(d.unsigned_abs()),
        0 => {
            let q = d / 4;
            matches!(q.rem_euclid(4), 2 | 3) && squarefree(q.unsigned_abs())
        }
        _ => false,
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Kronecker symbol `(d | p)` for an odd prime `p`.
pub fn kronecker(d: i64, p: u64) -> i32 {
    let r = d.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// `p` is inert or ramified in `Q(√d)`.
pub fn p_nonsplit(d: i64, p: u64) -> bool {
    kronecker(d, p) != 1
}

/// All reduced forms of discriminant `d`, sorted.
pub fn reduced_forms(d: i64) -> Vec<QuadForm> {
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -d {
        let mut b = -a + 1;
        while b <= a {
            if (b - d).rem_euclid(2) == 0 && (b * b - d) % (4 * a) == 0 {
                let f = QuadForm { a, b, c: (b * b - d) / (4 * a) };
                if f.is_reduced() {
                    out.push(f);
                }
            }
            b += 1;
        }
        a += 1;
    }
    out
}

/// Subgroup generated by `gens`, adjoined one element at a time.
fn closure(identity: QuadForm, gens: impl IntoIterator<Item = QuadForm>, stop_at: usize) -> Vec<QuadForm> {
    let mut set: HashSet<QuadForm> = HashSet::from([identity]);
    let mut elems = vec![identity];
    for g in gens {
        if set.len() >= stop_at {
            break;
        }
        if set.contains(&g) {
            continue;
        }
        let base = elems.clone();
        let mut shift = g;
        while !set.contains(&shift) {
            for b in &base {
                let x = b.compose(&shift);
                if set.insert(x) {
                    elems.push(x);
                }
            }
            shift = shift.compose(&g);
        }
    }
    elems
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassGroupResult {
    pub d: i64,
    pub h: u64,
    pub p: u64,
    pub sylow: Shape,
}

fn p_adic_split(mut h: u64, p: u64) -> (u32, u64) {
    let mut e = 0;
    while h.is_multiple_of(p) {
        h /= p;
        e += 1;
    }
    (e, h)
}

/// Class number and `p`-Sylow subgroup of the class group of discriminant `d`.
pub fn class_group(d: i64, p: u64) -> Result<ClassGroupResult> {
    if p < 2 || !is_prime(p) {
        return Err(Error::InvalidParameter(format!("p = {p} is not prime")));
    }
    if d >= 0 || d.unsigned_abs() > MAX_ABS_DISCRIMINANT as u64 {
        return Err(Error::BudgetExceeded(format!(
            "discriminant {d} outside [-{MAX_ABS_DISCRIMINANT}, -1]"
        )));
    }
    if !is_fundamental(d) {
        return Err(Error::InvalidParameter(format!("{d} is not a fundamental discriminant")));
    }
    let forms = reduced_forms(d);
    let h = forms.len() as u64;
    let (e, cofactor) = p_adic_split(h, p);
    let sylow = if e == 0 {
        Shape::trivial()
    } else {
        let size = p.pow(e) as usize;
        let sylow_elems = closure(
            QuadForm::identity(d),
            forms.iter().map(|f| f.pow(cofactor)),
            size,
        );
        assert_eq!(sylow_elems.len(), size, "p-Sylow of d = {d} has wrong order");
        sylow_shape(&sylow_elems, p)
    };
    Ok(ClassGroupResult { d, h, p, sylow })
}

/// Shape of a finite abelian `p`-group from the orders `|p^k S|`.
fn sylow_shape(elems: &[QuadForm], p: u64) -> Shape {
    let log_p = |n: usize| {
        let mut k = 0u32;
        let mut v = 1usize;
        while v < n {
            v *= p as usize;
            k += 1;
        }
        k
    };
    let mut orders = Vec::new();
    let mut current: Vec<QuadForm> = elems.to_vec();
    loop {
        orders.push(log_p(current.len()));
        if current.len() == 1 {
            break;
        }
        let next: HashSet<QuadForm> = current.iter().map(|f| f.pow(p)).collect();
        current = next.into_iter().collect();
    }
    Shape::from_multiple_orders(&orders)
}

/// `d = -(c + q k)` for `k` in a range; parsed from strings like `-1-3j`,
/// `-3j`, `-2-5k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Family {
    pub constant: i64,
    pub step: i64,
}

impl Family {
    pub fn parse(s: &str) -> Result<Family> {
        let bad = || Error::InvalidParameter(format!("family {s:?} must look like -1-3j or -3j"));
        let t = s.trim().strip_prefix('-').ok_or_else(bad)?;
        let t = t.strip_suffix(|ch: char| ch.is_ascii_alphabetic()).ok_or_else(bad)?;
        let (constant, step) = match t.split_once('-') {
            Some((c, q)) => (c.parse().map_err(|_| bad())?, q.parse().map_err(|_| bad())?),
            None => (0, t.parse().map_err(|_| bad())?),
        };
        if step <= 0 || constant < 0 {
            return Err(bad());
        }
        Ok(Family { constant, step })
    }

    pub fn discriminant(&self, k: i64) -> i64 {
        -(self.constant + self.step * k)
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.constant == 0 {
            write!(f, "-{}k", self.step)
        } else {
            write!(f, "-{}-{}k", self.constant, self.step)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadSurvey {
    pub p: u64,
    pub family: String,
    pub k_min: i64,
    pub k_max: i64,
    pub candidates: u64,
    pub not_fundamental: u64,
    pub split: u64,
    /// `d = -3, -4`, which carry extra units.
    pub excluded_units: Vec<i64>,
    pub surveyed: u64,
    pub not_divisible: u64,
    /// `m ↦` number of `d` with `A_0 ≅ Z/p^m`.
    pub cyclic: BTreeMap<u32, u64>,
    pub non_cyclic: u64,
    pub records: Vec<ClassGroupResult>,
}

impl QuadSurvey {
    pub fn divisible_fraction(&self) -> f64 {
        if self.surveyed == 0 {
            return 0.0;
        }
        (self.surveyed - self.not_divisible) as f64 / self.surveyed as f64
    }

    /// Fraction of cyclic `A_0` among the `p`-divisible ones.
    pub fn cyclic_fraction_of_divisible(&self) -> f64 {
        let div = self.surveyed - self.not_divisible;
        if div == 0 {
            return 0.0;
        }
        self.cyclic.values().sum::<u64>() as f64 / div as f64
    }
}

enum Outcome {
    NotFundamental,
    Split,
    Unit(i64),
    Record(ClassGroupResult),
}

/// Surveys `d = family(k)`, `k_min <= k <= k_max`, restricted to fundamental
/// `d` in which `p` does not split. Results are sorted by `|d|`.
pub fn survey(p: u64, family: Family, k_min: i64, k_max: i64, jobs: usize) -> Result<QuadSurvey> {
    if k_min > k_max {
        return Err(Error::InvalidParameter(format!("empty range {k_min}..={k_max}")));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let outcomes: Vec<Result<Outcome>> = pool.install(|| {
        (k_min..=k_max)
            .into_par_iter()
            .map(|k| {
                let d = family.discriminant(k);
                if !is_fundamental(d) {
                    return Ok(Outcome::NotFundamental);
                }
                if !p_nonsplit(d, p) {
                    return Ok(Outcome::Split);
                }
                if d == -3 || d == -4 {
                    return Ok(Outcome::Unit(d));
                }
                class_group(d, p).map(Outcome::Record)
            })
            .collect()
    });
    let mut s = QuadSurvey {
        p,
        family: family.to_string(),
        k_min,
        k_max,
        candidates: (k_max - k_min + 1) as u64,
        not_fundamental: 0,
        split: 0,
        excluded_units: Vec::new(),
        surveyed: 0,
        not_divisible: 0,
        cyclic: BTreeMap::new(),
        non_cyclic: 0,
        records: Vec::new(),
    };
    for o in outcomes {
        match o? {
            Outcome::NotFundamental => s.not_fundamental += 1,
            Outcome::Split => s.split += 1,
            Outcome::Unit(d) => s.excluded_units.push(d),
            Outcome::Record(r) => {
                s.surveyed += 1;
                match r.sylow.rank() {
                    0 => s.not_divisible += 1,
                    1 => *s.cyclic.entry(r.sylow.exponents()[0]).or_default() += 1,
                    _ => s.non_cyclic += 1,
                }
                s.records.push(r);
            }
        }
    }
    s.records.sort_by_key(|r| r.d.unsigned_abs());
    Ok(s)
}
