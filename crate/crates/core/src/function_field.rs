//! Hyperelliptic curves `y^2 = f(x)` over `F_p`, their zeta numerators and
//! class numbers, and the quadratic family over `F_3(X)` lifted along
//! `T^3 - T + 1/X = 0`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::heuristics::predicted_a1_distribution;
use crate::padic::is_prime;

/// Polynomial over `F_p`, coefficients ascending, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FpPoly {
    pub p: u32,
    pub coeffs: Vec<u32>,
}

impl FpPoly {
    pub fn new(p: u32, coeffs: Vec<u32>) -> Self {
        let mut f = FpPoly {
            p,
            coeffs: coeffs.into_iter().map(|c| c % p).collect(),
        };
        f.trim();
        f
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn zero(p: u32) -> Self {
        FpPoly { p, coeffs: vec![] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn add(&self, o: &FpPoly) -> FpPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        FpPoly::new(self.p, (0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn scale(&self, c: u32) -> FpPoly {
        FpPoly::new(self.p, self.coeffs.iter().map(|&x| x * (c % self.p)).collect())
    }

    pub fn sub(&self, o: &FpPoly) -> FpPoly {
        self.add(&o.scale(self.p - 1))
    }

    pub fn mul(&self, o: &FpPoly) -> FpPoly {
        if self.is_zero() || o.is_zero() {
            return FpPoly::zero(self.p);
        }
        let mut v = vec![0u32; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                v[i + j] = (v[i + j] + a * b) % self.p;
            }
        }
        FpPoly::new(self.p, v)
    }

    pub fn pow(&self, e: u32) -> FpPoly {
        (0..e).fold(FpPoly::new(self.p, vec![1]), |acc, _| acc.mul(self))
    }

    fn inv_mod_p(&self, a: u32) -> u32 {
        (1..self.p).find(|&x| x * a % self.p == 1).expect("nonzero residue")
    }

    pub fn div_rem(&self, d: &FpPoly) -> (FpPoly, FpPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = self.inv_mod_p(d.leading());
        let mut r = self.coeffs.clone();
        let mut q = vec![0u32; self.coeffs.len().saturating_sub(dd).max(1)];
        while r.len() > dd {
            let top = r.len() - 1;
            let c = r[top] * inv % self.p;
            if c != 0 {
                q[top - dd] = c;
                for (i, &dc) in d.coeffs.iter().enumerate() {
                    let idx = top - dd + i;
                    r[idx] = (r[idx] + self.p * self.p - c * dc % self.p) % self.p;
                }
            }
            r.pop();
            while r.last() == Some(&0) {
                r.pop();
            }
        }
        (FpPoly::new(self.p, q), FpPoly::new(self.p, r))
    }

    pub fn gcd(&self, o: &FpPoly) -> FpPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let inv = self.inv_mod_p(a.leading());
        a.scale(inv)
    }

    pub fn derivative(&self) -> FpPoly {
        FpPoly::new(
            self.p,
            self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| (i as u32 % self.p) * c).collect(),
        )
    }

    /// No repeated irreducible factor. A non-constant `f` with `f' = 0` is a
    /// `p`-th power.
    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => {
                let d = self.derivative();
                !d.is_zero() && self.gcd(&d).degree() == Some(0)
            }
        }
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn exact_div(&self, d: &FpPoly) -> FpPoly {
        let (q, r) = self.div_rem(d);
        assert!(r.is_zero(), "{d} does not divide {self}");
        q
    }

    /// `f = Π f_i^i` with the `f_i` monic, squarefree and pairwise coprime.
    /// Returns `(f_i, i)` for the non-constant `f_i`.
    pub fn squarefree_factorization(&self) -> Vec<(FpPoly, u32)> {
        let p = self.p;
        let one = FpPoly::new(p, vec![1]);
        let monic = self.scale(self.inv_mod_p(self.leading()));
        let mut out = Vec::new();
        let mut c = monic.gcd(&monic.derivative());
        if c.is_zero() {
            c = monic.clone();
        }
        let mut w = monic.exact_div(&c);
        let mut i = 1;
        while w != one {
            let y = w.gcd(&c);
            let z = w.exact_div(&y);
            if z != one {
                out.push((z, i));
            }
            i += 1;
            w = y.clone();
            c = c.exact_div(&y);
        }
        if c != one {
            // c' = 0, so c(x) = r(x^p) = r(x)^p over F_p
            let root = FpPoly::new(p, c.coeffs.iter().step_by(p as usize).copied().collect());
            out.extend(root.squarefree_factorization().into_iter().map(|(g, j)| (g, j * p)));
        }
        out.sort_by_key(|(_, j)| *j);
        out
    }

    /// `(f̃, s)` with `f = f̃ s^2` and `f̃` squarefree, carrying the leading coefficient.
    pub fn squarefree_part(&self) -> (FpPoly, FpPoly) {
        let p = self.p;
        let mut core = FpPoly::new(p, vec![self.leading()]);
        let mut sq = FpPoly::new(p, vec![1]);
        for (g, i) in self.squarefree_factorization() {
            if i % 2 == 1 {
                core = core.mul(&g);
            }
            sq = sq.mul(&g.pow(i / 2));
        }
        (core, sq)
    }

    /// `Σ c_i p^i`, used as a deterministic ordering key.
    pub fn key(&self) -> u64 {
        self.coeffs.iter().rev().fold(0u64, |acc, &c| acc * self.p as u64 + c as u64)
    }
}

impl std::fmt::Display for FpPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(u32::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// `F_{p^k}` with elements stored as discrete logarithms to a fixed generator.
/// The modulus is the least monic irreducible of degree `k` in the order of
/// [`FpPoly::key`].
pub struct FiniteField {
    pub p: u32,
    pub k: u32,
    pub q: u32,
    pub modulus: FpPoly,
    /// `exp[i]` is `g^i` in base-`p` digit encoding.
    exp: Vec<u32>,
    log: Vec<u32>,
    /// `zech[n] = log(1 + g^n)`.
    zech: Vec<u32>,
}

/// Logarithm of a field element; `q - 1` encodes zero.
pub type Elt = u32;

fn encode(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

fn decode(mut x: u32, p: u32, k: u32) -> Vec<u32> {
    (0..k)
        .map(|_| {
            let d = x % p;
            x /= p;
            d
        })
        .collect()
}

fn least_irreducible(p: u32, k: u32) -> FpPoly {
    if k == 1 {
        return FpPoly::new(p, vec![0, 1]);
    }
    let q = p.pow(k);
    'candidate: for low in 0..q {
        let mut c = decode(low, p, k);
        c.push(1);
        let f = FpPoly::new(p, c);
        if f.coeff(0) == 0 {
            continue;
        }
        for d in 1..=k / 2 {
            for low_d in 0..p.pow(d) {
                let mut g = decode(low_d, p, d);
                g.push(1);
                if f.div_rem(&FpPoly::new(p, g)).1.is_zero() {
                    continue 'candidate;
                }
            }
        }
        return f;
    }
    unreachable!("an irreducible polynomial of every degree exists")
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl FiniteField {
    pub fn new(p: u32, k: u32) -> Result<Self> {
        if !is_prime(p as u64) || k == 0 {
            return Err(Error::InvalidParameter(format!("F_{{{p}^{k}}} is not a field size")));
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= 1 << 24)
            .ok_or_else(|| Error::BudgetExceeded(format!("F_{{{p}^{k}}} too large for log tables")))?;
        let modulus = least_irreducible(p, k);
        let mulmod = |a: u32, b: u32| -> u32 {
            let pa = FpPoly::new(p, decode(a, p, k));
            let pb = FpPoly::new(p, decode(b, p, k));
            let r = pa.mul(&pb).div_rem(&modulus).1;
            encode(&r.coeffs, p)
        };
        let powmod = |g: u32, mut e: u32| -> u32 {
            let (mut acc, mut base) = (1u32, g);
            while e > 0 {
                if e & 1 == 1 {
                    acc = mulmod(acc, base);
                }
                base = mulmod(base, base);
                e >>= 1;
            }
            acc
        };
        let n = q - 1;
        let factors = prime_factors(n);
        let g = (2..q)
            .find(|&g| factors.iter().all(|&l| powmod(g, n / l) != 1))
            .unwrap_or(1);
        let mut exp = vec![0u32; n as usize];
        let mut log = vec![n; q as usize];
        let mut x = 1u32;
        for i in 0..n {
            exp[i as usize] = x;
            log[x as usize] = i;
            x = mulmod(x, g);
        }
        let zech = (0..n)
            .map(|i| {
                let mut d = decode(exp[i as usize], p, k);
                d[0] = (d[0] + 1) % p;
                log[encode(&d, p) as usize]
            })
            .collect();
        Ok(FiniteField {
            p,
            k,
            q,
            modulus,
            exp,
            log,
            zech,
        })
    }

    pub fn zero(&self) -> Elt {
        self.q - 1
    }

    pub fn one(&self) -> Elt {
        0
    }

    /// The image of `c ∈ F_p`.
    pub fn from_prime_field(&self, c: u32) -> Elt {
        self.log[(c % self.p) as usize]
    }

    /// Element from its base-`p` digit encoding.
    pub fn from_encoding(&self, x: u32) -> Elt {
        self.log[x as usize]
    }

    pub fn encoding(&self, a: Elt) -> u32 {
        if a == self.zero() {
            0
        } else {
            self.exp[a as usize]
        }
    }

    pub fn mul(&self, a: Elt, b: Elt) -> Elt {
        let z = self.zero();
        if a == z || b == z {
            return z;
        }
        let s = a + b;
        if s >= z {
            s - z
        } else {
            s
        }
    }

    pub fn add(&self, a: Elt, b: Elt) -> Elt {
        let z = self.zero();
        if a == z {
            return b;
        }
        if b == z {
            return a;
        }
        let d = if b >= a { b - a } else { b + z - a };
        let t = self.zech[d as usize];
        if t == z {
            return z;
        }
        self.mul(a, t)
    }

    pub fn pow(&self, a: Elt, e: u64) -> Elt {
        if a == self.zero() {
            return if e == 0 { self.one() } else { a };
        }
        ((a as u64 * e) % (self.q as u64 - 1)) as Elt
    }

    /// Quadratic character: `1` on nonzero squares, `-1` on non-squares, `0` at zero.
    pub fn chi(&self, a: Elt) -> i64 {
        if a == self.zero() {
            0
        } else if a.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// `f(x)` by Horner's rule.
    pub fn eval(&self, f: &[Elt], x: Elt) -> Elt {
        f.iter().rev().fold(self.zero(), |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// Lifts a polynomial over `F_p` coefficientwise.
    pub fn lift(&self, f: &FpPoly) -> Vec<Elt> {
        f.coeffs.iter().map(|&c| self.from_prime_field(c)).collect()
    }
}

/// `y^2 = f(x)` over `F_p`, `f` squarefree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HyperellipticModel {
    pub f: FpPoly,
    pub genus: u32,
}

impl HyperellipticModel {
    pub fn new(f: FpPoly) -> Result<Self> {
        if f.p == 2 {
            return Err(Error::InvalidParameter("characteristic 2 is not supported".into()));
        }
        let deg = f.degree().unwrap_or(0);
        if deg == 0 {
            return Err(Error::InvalidParameter("constant right-hand side".into()));
        }
        if !f.is_squarefree() {
            return Err(Error::InvalidParameter(format!("{f} is not squarefree")));
        }
        Ok(HyperellipticModel {
            genus: ((deg - 1) / 2) as u32,
            f,
        })
    }

    /// Points over `F_{p^k}` on the smooth model.
    pub fn point_count_in(&self, field: &FiniteField) -> i64 {
        let lifted = field.lift(&self.f);
        let mut sum = 0i64;
        for x in 0..field.q {
            sum += field.chi(field.eval(&lifted, field.from_encoding(x)));
        }
        let deg = self.f.degree().unwrap();
        let infinity = if deg % 2 == 1 {
            1
        } else {
            1 + field.chi(field.from_prime_field(self.f.leading()))
        };
        field.q as i64 + sum + infinity
    }

    pub fn point_count(&self, k: u32) -> Result<i64> {
        Ok(self.point_count_in(&FiniteField::new(self.f.p, k)?))
    }
}

/// Numerator `P(T) = Σ a_i T^i` of the zeta function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZetaData {
    pub q: i128,
    pub genus: u32,
    /// `N_1, ..., N_g`.
    pub counts: Vec<i64>,
    /// `a_0, ..., a_{2g}`.
    pub coeffs: Vec<i128>,
    pub class_number: i128,
}

impl ZetaData {
    /// `N_k` predicted by the numerator.
    pub fn predicted_count(&self, k: u32) -> i128 {
        let s = self.power_sums(k);
        self.q.pow(k) + 1 - s[k as usize - 1]
    }

    /// `S_j = Σ α_i^j`, `j = 1..=n`, from the numerator by Newton's identities.
    fn power_sums(&self, n: u32) -> Vec<i128> {
        let a = |i: usize| self.coeffs.get(i).copied().unwrap_or(0);
        let mut s: Vec<i128> = Vec::new();
        for i in 1..=n as usize {
            // i a_i = -Σ_{j=1}^{i} S_j a_{i-j}  =>  S_i = -i a_i - Σ_{j<i} S_j a_{i-j}
            let mut v = -(i as i128) * a(i);
            for j in 1..i {
                v -= s[j - 1] * a(i - j);
            }
            s.push(v);
        }
        s
    }
}

fn weil_ok(h: i128, q: i128, g: u32) -> bool {
    let sq = (q as f64).sqrt();
    let lo = (sq - 1.0).powi(2 * g as i32);
    let hi = (sq + 1.0).powi(2 * g as i32);
    let hf = h as f64;
    hf >= lo * (1.0 - 1e-12) && hf <= hi * (1.0 + 1e-12)
}

/// Recovers the zeta numerator from `N_1..N_g` and checks the Weil bounds.
pub fn zeta_from_counts(q: i128, genus: u32, counts: &[i64]) -> Result<ZetaData> {
    let g = genus as usize;
    if counts.len() < g {
        return Err(Error::InvalidParameter(format!("need {g} point counts, got {}", counts.len())));
    }
    for (k, &n) in counts.iter().enumerate().take(g) {
        let k = k as u32 + 1;
        let dev = n as i128 - q.pow(k) - 1;
        if dev * dev > 4 * (g as i128).pow(2) * q.pow(k) {
            return Err(Error::WeilViolation(format!("N_{k} = {n} for q = {q}, g = {g}")));
        }
    }
    let s: Vec<i128> = (0..g).map(|k| q.pow(k as u32 + 1) + 1 - counts[k] as i128).collect();
    let mut a = vec![0i128; 2 * g + 1];
    a[0] = 1;
    for i in 1..=g {
        let mut acc = 0i128;
        for j in 1..=i {
            acc += s[j - 1] * a[i - j];
        }
        if acc % i as i128 != 0 {
            return Err(Error::WeilViolation(format!("Newton identity not integral at i = {i}")));
        }
        a[i] = -acc / i as i128;
    }
    for i in 0..g {
        a[2 * g - i] = q.pow((g - i) as u32) * a[i];
    }
    let h: i128 = a.iter().sum();
    if !weil_ok(h, q, genus) {
        return Err(Error::WeilViolation(format!("h = {h} for q = {q}, g = {g}")));
    }
    Ok(ZetaData {
        q,
        genus,
        counts: counts[..g].to_vec(),
        coeffs: a,
        class_number: h,
    })
}

/// Fields `F_{p^k}`, `k = 1..=n`, built once and shared.
pub struct FieldTower {
    fields: Vec<FiniteField>,
}

impl FieldTower {
    pub fn new(p: u32, n: u32) -> Result<Self> {
        Ok(FieldTower {
            fields: (1..=n).map(|k| FiniteField::new(p, k)).collect::<Result<_>>()?,
        })
    }

    pub fn field(&self, k: u32) -> &FiniteField {
        &self.fields[k as usize - 1]
    }

    pub fn height(&self) -> u32 {
        self.fields.len() as u32
    }
}

/// Divisor class number `P(1)` of `y^2 = f(x)` over `F_p`.
pub fn class_number_with(model: &HyperellipticModel, tower: &FieldTower) -> Result<(i128, ZetaData)> {
    let g = model.genus;
    if g > tower.height() {
        return Err(Error::InvalidParameter(format!("genus {g} needs fields up to degree {g}")));
    }
    let counts: Vec<i64> = (1..=g).map(|k| model.point_count_in(tower.field(k))).collect();
    let z = zeta_from_counts(model.f.p as i128, g, &counts)?;
    Ok((z.class_number, z))
}

pub fn class_number(f: &FpPoly) -> Result<(i128, ZetaData)> {
    let model = HyperellipticModel::new(f.clone())?;
    let tower = FieldTower::new(f.p, model.genus.max(1))?;
    class_number_with(&model, &tower)
}

/// `H(t) = (t^3 - t)^8 h(-1/(t^3 - t))` before reduction.
pub fn first_layer_polynomial(h: &FpPoly) -> Result<FpPoly> {
    if h.p != 3 {
        return Err(Error::InvalidParameter("the first layer is defined over F_3".into()));
    }
    let deg = h.degree().unwrap_or(0);
    if h.coeff(0) != 0 || deg > 8 || deg == 0 {
        return Err(Error::InvalidParameter(format!("{h} must satisfy h(0) = 0, 1 <= deg <= 8")));
    }
    let w = FpPoly::new(3, vec![0, 2, 0, 1]);
    let mut big = FpPoly::zero(3);
    for (i, &c) in h.coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let sign = if i % 2 == 0 { 1 } else { 2 };
        big = big.add(&w.pow(8 - i as u32).scale(c * sign));
    }
    Ok(big)
}

/// The lifted curve `y^2 = H̃(t)` over `F_3(t)`, `H̃` the squarefree part of
/// [`first_layer_polynomial`].
pub fn first_layer_model(h: &FpPoly) -> Result<HyperellipticModel> {
    let big = first_layer_polynomial(h)?;
    if big.is_zero() {
        return Err(Error::InvalidParameter(format!("lift of {h} vanishes")));
    }
    let (core, _) = big.squarefree_part();
    if core.degree().unwrap_or(0) == 0 {
        return Err(Error::InvalidParameter(format!("lift of {h} is degenerate: squarefree part {core}")));
    }
    HyperellipticModel::new(core)
}

/// The reversal `X^8 h(1/X)`, or `X^8 h(-1/X)` when that one is monic.
/// Both come from automorphisms of `F_3(X)`, so the quadratic fields agree.
pub fn normalized_reversal(h: &FpPoly) -> FpPoly {
    let c1 = h.coeff(1);
    let sign = if c1 == 1 { 1 } else { 2 };
    // X^8 h(s/X) = Σ c_i s^i X^{8-i}
    let mut out = vec![0u32; 9];
    for (i, &c) in h.coeffs.iter().enumerate() {
        let s = if i % 2 == 0 { 1 } else { sign };
        out[8 - i] = c * s % 3;
    }
    FpPoly::new(3, out)
}

/// Monic squarefree `h ∈ F_3[X]` of degree 7 with `h(0) = 0`, one
/// representative per reversal pair, ordered by [`FpPoly::key`].
pub fn enumerate_h() -> Vec<FpPoly> {
    let mut out = Vec::new();
    for low in 0..3u32.pow(6) {
        // coefficients of X^1..X^6
        let mut c = vec![0u32];
        c.extend(decode(low, 3, 6));
        c.push(1);
        let h = FpPoly::new(3, c);
        if h.coeff(1) == 0 || !h.is_squarefree() {
            continue;
        }
        let rev = normalized_reversal(&h);
        if rev.key() < h.key() {
            continue;
        }
        out.push(h);
    }
    out.sort_by_key(FpPoly::key);
    out
}

pub fn v3(mut n: i128) -> u32 {
    let mut e = 0;
    while n != 0 && n % 3 == 0 {
        n /= 3;
        e += 1;
    }
    e
}

/// Column label for `A_0 ≅ Z/3`: the order `3^{e_1}` determines `A_1` except
/// that `e_1 = 3` covers both `9×3` and `3×3×3`.
pub fn table5_class(e1: u32) -> &'static str {
    match e1 {
        2 => "9",
        3 => "9×3 or 3×3×3",
        4 => "9×9",
        5 => "27×9",
        6 => "27×27",
        _ => "larger",
    }
}

pub const TABLE5_CLASSES: [&str; 5] = ["9", "9×3 or 3×3×3", "9×9", "27×9", "27×27"];

#[derive(Debug, Clone, Serialize)]
pub struct FfRecord {
    pub h: Vec<u32>,
    pub h0: i128,
    pub e0: u32,
    pub h1: Option<i128>,
    pub e1: Option<u32>,
    pub lift_genus: Option<u32>,
    pub table5_class: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FfSample {
    Full,
    First(usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct FfSurvey {
    pub sample: FfSample,
    pub family_size: usize,
    pub total: usize,
    pub divisible: usize,
    pub e0_histogram: BTreeMap<u32, usize>,
    /// `e_1` histogram over the `e_0 = 1` records.
    pub e1_histogram: BTreeMap<u32, usize>,
    /// Column fractions over the `e_0 = 1` records, in column order.
    pub computed: Vec<(String, f64)>,
    pub predicted: Vec<(String, f64)>,
    /// `e_1 - e_0 = 1` among `e_0 = 1` records.
    pub lambda_one: usize,
    /// Records with `3 | h_0` but `e_1 < e_0 + 1`.
    pub injectivity_violations: Vec<Vec<u32>>,
    pub records: Vec<FfRecord>,
}

/// Predicted row: the `A_0 ≅ Z/3` distribution with order classes merged.
pub fn table5_predicted() -> Result<Vec<(String, f64)>> {
    let dist = predicted_a1_distribution(3, 1, 5)?;
    let mut by_class: BTreeMap<&str, num_rational::BigRational> = BTreeMap::new();
    for e in &dist.entries {
        *by_class.entry(table5_class(e.shape.order_exponent())).or_default() += e.probability.clone();
    }
    Ok(TABLE5_CLASSES
        .iter()
        .map(|c| (c.to_string(), crate::heuristics::to_f64(&by_class[c])))
        .collect())
}

impl FfSurvey {
    /// One row per record: coefficients ascending, `h0`, `e0`, `h1`, `e1`, class.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("h\th0\te0\th1\te1\ttable5_class\n");
        let opt = |x: Option<String>| x.unwrap_or_else(|| "-".into());
        for r in &self.records {
            let h: Vec<String> = r.h.iter().map(u32::to_string).collect();
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                h.join(","),
                r.h0,
                r.e0,
                opt(r.h1.map(|v| v.to_string())),
                opt(r.e1.map(|v| v.to_string())),
                opt(r.table5_class.clone()),
            ));
        }
        out
    }
}

pub fn survey_ff(sample: FfSample, jobs: usize) -> Result<FfSurvey> {
    let family = enumerate_h();
    let family_size = family.len();
    let chosen: Vec<FpPoly> = match sample {
        FfSample::Full => family,
        FfSample::First(n) => family.into_iter().take(n).collect(),
    };
    let tower = FieldTower::new(3, 10)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let records: Vec<FfRecord> = pool.install(|| {
        chosen
            .par_iter()
            .map(|h| -> Result<FfRecord> {
                let (h0, _) = class_number_with(&HyperellipticModel::new(h.clone())?, &tower)?;
                let e0 = v3(h0);
                let (mut h1, mut e1, mut lift_genus, mut class) = (None, None, None, None);
                if e0 >= 1 {
                    let lifted = first_layer_model(h)?;
                    if lifted.genus > tower.height() {
                        return Err(Error::BudgetExceeded(format!("lift genus {}", lifted.genus)));
                    }
                    let (v, _) = class_number_with(&lifted, &tower)?;
                    h1 = Some(v);
                    e1 = Some(v3(v));
                    lift_genus = Some(lifted.genus);
                    if e0 == 1 {
                        class = Some(table5_class(v3(v)).to_string());
                    }
                }
                Ok(FfRecord {
                    h: h.coeffs.clone(),
                    h0,
                    e0,
                    h1,
                    e1,
                    lift_genus,
                    table5_class: class,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut e0_histogram = BTreeMap::new();
    let mut e1_histogram = BTreeMap::new();
    let mut class_counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut injectivity_violations = Vec::new();
    let mut lambda_one = 0;
    for r in &records {
        *e0_histogram.entry(r.e0).or_insert(0) += 1;
        if let Some(e1) = r.e1 {
            if e1 < r.e0 + 1 {
                injectivity_violations.push(r.h.clone());
            }
            if r.e0 == 1 {
                *e1_histogram.entry(e1).or_insert(0) += 1;
                if e1 == 2 {
                    lambda_one += 1;
                }
            }
        }
        if let Some(c) = &r.table5_class {
            *class_counts.entry(c.clone()).or_insert(0) += 1;
        }
    }
    let n_e0_1 = e0_histogram.get(&1).copied().unwrap_or(0);
    let computed = TABLE5_CLASSES
        .iter()
        .map(|c| {
            let k = class_counts.get(*c).copied().unwrap_or(0);
            let frac = if n_e0_1 == 0 { 0.0 } else { k as f64 / n_e0_1 as f64 };
            (c.to_string(), frac)
        })
        .collect();
    Ok(FfSurvey {
        sample,
        family_size,
        total: records.len(),
        divisible: records.iter().filter(|r| r.e0 >= 1).count(),
        e0_histogram,
        e1_histogram,
        computed,
        predicted: table5_predicted()?,
        lambda_one,
        injectivity_violations,
        records,
    })
}
