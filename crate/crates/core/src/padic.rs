//! Exact arithmetic in `Z/p^N` with valuation tracking, and matrix normal
//! forms over that local ring.
//!
//! Residues are stored as non-negative [`BigUint`] values in `[0, p^N)`.
//! A residue of zero is "zero at precision": its valuation is reported as
//! `N`, meaning "at least `N`".

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PadicError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("cannot mix Z/{0}^{1} with Z/{2}^{3}")]
    RingMismatch(u64, u32, u64, u32),
    #[error("element {0} is not a unit")]
    NotUnit(String),
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, PadicError>;

/// Deterministic primality by trial division; inputs here are small primes.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

struct RingInner {
    p: u64,
    precision: u32,
    p_big: BigUint,
    modulus: BigUint,
    /// `p^k` for `k` in `0..=precision`.
    powers: Vec<BigUint>,
}

/// The ring `Z/p^N` for an odd prime `p`. Cheap to clone.
#[derive(Clone)]
pub struct LocalRing(Arc<RingInner>);

impl LocalRing {
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        if p.is_multiple_of(2) || !is_prime(p) {
            return Err(PadicError::NotOddPrime(p));
        }
        if precision == 0 {
            return Err(PadicError::ZeroPrecision);
        }
        let p_big = BigUint::from(p);
        let mut powers = Vec::with_capacity(precision as usize + 1);
        let mut acc = BigUint::one();
        for _ in 0..=precision {
            powers.push(acc.clone());
            acc *= &p_big;
        }
        let modulus = powers[precision as usize].clone();
        Ok(LocalRing(Arc::new(RingInner {
            p,
            precision,
            p_big,
            modulus,
            powers,
        })))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn precision(&self) -> u32 {
        self.0.precision
    }

    pub fn modulus(&self) -> &BigUint {
        &self.0.modulus
    }

    /// `p^k` as an integer, for `k <= N`.
    pub fn p_power(&self, k: u32) -> &BigUint {
        &self.0.powers[k as usize]
    }

    pub fn zero(&self) -> PAdicInt {
        PAdicInt {
            ring: self.clone(),
            value: BigUint::zero(),
        }
    }

    pub fn one(&self) -> PAdicInt {
        self.from_biguint(BigUint::one())
    }

    pub fn from_i64(&self, v: i64) -> PAdicInt {
        self.from_bigint(&BigInt::from(v))
    }

    pub fn from_bigint(&self, v: &BigInt) -> PAdicInt {
        let m = BigInt::from_biguint(Sign::Plus, self.0.modulus.clone());
        let r = v.mod_floor(&m);
        PAdicInt {
            ring: self.clone(),
            value: r.to_biguint().expect("mod_floor is non-negative"),
        }
    }

    pub fn from_biguint(&self, v: BigUint) -> PAdicInt {
        PAdicInt {
            ring: self.clone(),
            value: v % &self.0.modulus,
        }
    }

    /// The element `p^k` (zero when `k >= N`).
    pub fn p_pow(&self, k: u32) -> PAdicInt {
        if k >= self.precision() {
            self.zero()
        } else {
            self.from_biguint(self.p_power(k).clone())
        }
    }

    fn valuation_of(&self, v: &BigUint) -> u32 {
        if v.is_zero() {
            return self.precision();
        }
        let mut k = 0;
        let mut x = v.clone();
        loop {
            let (q, r) = x.div_rem(&self.0.p_big);
            if !r.is_zero() {
                return k;
            }
            x = q;
            k += 1;
        }
    }

    fn check(&self, other: &LocalRing) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(PadicError::RingMismatch(
                self.p(),
                self.precision(),
                other.p(),
                other.precision(),
            ))
        }
    }

    fn add_raw(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if &s >= self.modulus() {
            s - self.modulus()
        } else {
            s
        }
    }

    fn sub_raw(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            self.modulus() - b + a
        }
    }

    fn mul_raw(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % self.modulus()
    }

    fn inverse_raw(&self, a: &BigUint) -> Option<BigUint> {
        if (a % &self.0.p_big).is_zero() {
            return None;
        }
        // |(Z/p^N)^x| = p^(N-1) (p-1)
        let order = self.p_power(self.precision() - 1) * (self.p() - 1);
        Some(a.modpow(&(order - 1u32), self.modulus()))
    }
}

impl PartialEq for LocalRing {
    fn eq(&self, other: &Self) -> bool {
        self.p() == other.p() && self.precision() == other.precision()
    }
}

impl Eq for LocalRing {}

impl fmt::Debug for LocalRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}^{}", self.p(), self.precision())
    }
}

/// An element of `Z/p^N`.
#[derive(Clone)]
pub struct PAdicInt {
    ring: LocalRing,
    value: BigUint,
}

/// Builds `v mod p^N`; fails when `p` is not an odd prime or `N = 0`.
pub fn padic_new(p: u64, precision: u32, v: i64) -> Result<PAdicInt> {
    Ok(LocalRing::new(p, precision)?.from_i64(v))
}

impl PAdicInt {
    pub fn ring(&self) -> &LocalRing {
        &self.ring
    }

    pub fn p(&self) -> u64 {
        self.ring.p()
    }

    pub fn precision(&self) -> u32 {
        self.ring.precision()
    }

    /// Residue in `[0, p^N)`.
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == 0
    }

    /// Exponent of the largest power of `p` dividing the residue; `N` for zero.
    pub fn valuation(&self) -> u32 {
        self.ring.valuation_of(&self.value)
    }

    /// Symmetric representative in `(-p^N/2, p^N/2]`.
    pub fn to_signed(&self) -> BigInt {
        let m = self.ring.modulus();
        let v = BigInt::from_biguint(Sign::Plus, self.value.clone());
        if &self.value * 2u32 > *m {
            v - BigInt::from_biguint(Sign::Plus, m.clone())
        } else {
            v
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.to_signed().to_i64()
    }

    pub fn try_add(&self, rhs: &PAdicInt) -> Result<PAdicInt> {
        self.ring.check(&rhs.ring)?;
        Ok(self.with(self.ring.add_raw(&self.value, &rhs.value)))
    }

    pub fn try_sub(&self, rhs: &PAdicInt) -> Result<PAdicInt> {
        self.ring.check(&rhs.ring)?;
        Ok(self.with(self.ring.sub_raw(&self.value, &rhs.value)))
    }

    pub fn try_mul(&self, rhs: &PAdicInt) -> Result<PAdicInt> {
        self.ring.check(&rhs.ring)?;
        Ok(self.with(self.ring.mul_raw(&self.value, &rhs.value)))
    }

    pub fn neg(&self) -> PAdicInt {
        self.with(self.ring.sub_raw(&BigUint::zero(), &self.value))
    }

    pub fn mul_i64(&self, k: i64) -> PAdicInt {
        let k = self.ring.from_i64(k);
        self.with(self.ring.mul_raw(&self.value, &k.value))
    }

    pub fn pow(&self, e: u32) -> PAdicInt {
        self.with(self.value.modpow(&BigUint::from(e), self.ring.modulus()))
    }

    pub fn inverse(&self) -> Result<PAdicInt> {
        self.ring
            .inverse_raw(&self.value)
            .map(|v| self.with(v))
            .ok_or_else(|| PadicError::NotUnit(self.to_string()))
    }

    /// Splits `x = p^v * u` with `v = valuation(x) < N`; `None` for zero.
    /// The cofactor `u` is a unit (its lift is determined modulo `p^(N-v)`).
    pub fn unit_part(&self) -> Option<(u32, PAdicInt)> {
        if self.is_zero() {
            return None;
        }
        let v = self.valuation();
        Some((v, self.with(&self.value / self.ring.p_power(v))))
    }

    fn with(&self, value: BigUint) -> PAdicInt {
        PAdicInt {
            ring: self.ring.clone(),
            value,
        }
    }
}

impl PartialEq for PAdicInt {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.value == other.value
    }
}

impl Eq for PAdicInt {}

impl fmt::Display for PAdicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_signed())
    }
}

impl fmt::Debug for PAdicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.value, self.p(), self.precision())
    }
}

// Operator forms panic on mixed rings; the `try_*` methods report it instead.
macro_rules! binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl std::ops::$trait<&PAdicInt> for &PAdicInt {
            type Output = PAdicInt;
            fn $method(self, rhs: &PAdicInt) -> PAdicInt {
                self.$try(rhs).expect("mixed Z/p^N rings")
            }
        }
        impl std::ops::$trait<PAdicInt> for PAdicInt {
            type Output = PAdicInt;
            fn $method(self, rhs: PAdicInt) -> PAdicInt {
                self.$try(&rhs).expect("mixed Z/p^N rings")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

/// A dense matrix over `Z/p^N`. Entries are kept as raw residues sharing one ring.
#[derive(Clone)]
pub struct LocalMatrix {
    ring: LocalRing,
    rows: usize,
    cols: usize,
    data: Vec<BigUint>,
}

impl LocalMatrix {
    pub fn zeros(ring: &LocalRing, rows: usize, cols: usize) -> Self {
        LocalMatrix {
            ring: ring.clone(),
            rows,
            cols,
            data: vec![BigUint::zero(); rows * cols],
        }
    }

    pub fn identity(ring: &LocalRing, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.data[i * n + i] = BigUint::one();
        }
        m
    }

    pub fn from_i64_rows(ring: &LocalRing, rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(ring, r, c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(PadicError::Shape(format!("row {i} has {} entries, expected {c}", row.len())));
            }
            for (j, &v) in row.iter().enumerate() {
                m.data[i * c + j] = ring.from_i64(v).value;
            }
        }
        Ok(m)
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(ring: &LocalRing, columns: &[Vec<PAdicInt>]) -> Result<Self> {
        let c = columns.len();
        let r = columns.first().map_or(0, |col| col.len());
        let mut m = Self::zeros(ring, r, c);
        for (j, col) in columns.iter().enumerate() {
            if col.len() != r {
                return Err(PadicError::Shape(format!("column {j} has {} entries, expected {r}", col.len())));
            }
            for (i, x) in col.iter().enumerate() {
                ring.check(&x.ring)?;
                m.data[i * c + j] = x.value.clone();
            }
        }
        Ok(m)
    }

    pub fn ring(&self) -> &LocalRing {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> PAdicInt {
        PAdicInt {
            ring: self.ring.clone(),
            value: self.data[i * self.cols + j].clone(),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, x: &PAdicInt) -> Result<()> {
        self.ring.check(&x.ring)?;
        self.data[i * self.cols + j] = x.value.clone();
        Ok(())
    }

    pub fn row(&self, i: usize) -> Vec<PAdicInt> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn column(&self, j: usize) -> Vec<PAdicInt> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &LocalMatrix) -> Result<LocalMatrix> {
        self.ring.check(&rhs.ring)?;
        if self.cols != rhs.rows {
            return Err(PadicError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(&self.ring, self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = BigUint::zero();
                for k in 0..self.cols {
                    acc += &self.data[i * self.cols + k] * &rhs.data[k * rhs.cols + j];
                }
                out.data[i * rhs.cols + j] = acc % self.ring.modulus();
            }
        }
        Ok(out)
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hstack(&self, rhs: &LocalMatrix) -> Result<LocalMatrix> {
        self.ring.check(&rhs.ring)?;
        if self.rows != rhs.rows {
            return Err(PadicError::Shape("hstack with different row counts".into()));
        }
        let cols = self.cols + rhs.cols;
        let mut out = Self::zeros(&self.ring, self.rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[i * cols + j] = self.data[i * self.cols + j].clone();
            }
            for j in 0..rhs.cols {
                out.data[i * cols + self.cols + j] = rhs.data[i * rhs.cols + j].clone();
            }
        }
        Ok(out)
    }

    /// Entries in the symmetric residue range, row by row.
    pub fn to_signed_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(PAdicInt::to_signed).collect())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn scale_row(&mut self, i: usize, c: &BigUint) {
        for j in 0..self.cols {
            let idx = i * self.cols + j;
            self.data[idx] = self.ring.mul_raw(&self.data[idx], c);
        }
    }

    /// `row[dst] -= c * row[src]`
    fn sub_row(&mut self, dst: usize, src: usize, c: &BigUint) {
        for j in 0..self.cols {
            let t = self.ring.mul_raw(c, &self.data[src * self.cols + j]);
            let idx = dst * self.cols + j;
            self.data[idx] = self.ring.sub_raw(&self.data[idx], &t);
        }
    }

    /// `col[dst] -= c * col[src]`
    fn sub_col(&mut self, dst: usize, src: usize, c: &BigUint) {
        for i in 0..self.rows {
            let t = self.ring.mul_raw(c, &self.data[i * self.cols + src]);
            let idx = i * self.cols + dst;
            self.data[idx] = self.ring.sub_raw(&self.data[idx], &t);
        }
    }
}

impl PartialEq for LocalMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl fmt::Debug for LocalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} over {:?}", self.rows, self.cols, self.ring)?;
        for row in self.to_signed_rows() {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Elementary divisors of a matrix over `Z/p^N`, as valuations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    /// Non-decreasing, one per diagonal position (`min(rows, cols)` entries).
    pub divisor_valuations: Vec<u32>,
    /// `true` where the divisor is zero at precision, i.e. only known to be `>= N`.
    pub undetermined: Vec<bool>,
}

impl SnfResult {
    pub fn is_fully_determined(&self) -> bool {
        !self.undetermined.iter().any(|&u| u)
    }

    /// Determined positive valuations, largest first (the cokernel shape).
    pub fn nonzero_exponents_desc(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self
            .divisor_valuations
            .iter()
            .zip(&self.undetermined)
            .filter(|(&d, &u)| d > 0 && !u)
            .map(|(&d, _)| d)
            .collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }
}

/// `left * M * right = diagonal`, with `left`, `right` invertible over `Z/p^N`.
#[derive(Debug, Clone)]
pub struct SnfDecomposition {
    pub result: SnfResult,
    pub left: LocalMatrix,
    pub right: LocalMatrix,
    pub diagonal: LocalMatrix,
}

/// Valuation-pivot elimination.
///
/// At step `k` the entry of minimal valuation in the trailing submatrix is
/// chosen (ties broken by smallest `(row, col)`), moved to `(k, k)`, scaled
/// to exactly `p^v`, and its row and column are cleared. When the trailing
/// submatrix is zero at precision the remaining divisors are flagged.
pub fn smith_decomposition(m: &LocalMatrix) -> SnfDecomposition {
    let ring = m.ring.clone();
    let n = ring.precision();
    let mut a = m.clone();
    let mut left = LocalMatrix::identity(&ring, m.rows);
    let mut right = LocalMatrix::identity(&ring, m.cols);
    let diag_len = m.rows.min(m.cols);
    let mut vals = Vec::with_capacity(diag_len);
    let mut undetermined = Vec::with_capacity(diag_len);

    for k in 0..diag_len {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in k..a.rows {
            for j in k..a.cols {
                let v = ring.valuation_of(&a.data[i * a.cols + j]);
                if v < n && best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                }
            }
        }
        let Some((v, pi, pj)) = best else {
            for _ in k..diag_len {
                vals.push(n);
                undetermined.push(true);
            }
            break;
        };
        a.swap_rows(k, pi);
        left.swap_rows(k, pi);
        a.swap_cols(k, pj);
        right.swap_cols(k, pj);

        let pv = ring.p_power(v).clone();
        let unit = &a.data[k * a.cols + k] / &pv;
        let inv = ring.inverse_raw(&unit).expect("pivot cofactor is a unit");
        a.scale_row(k, &inv);
        left.scale_row(k, &inv);

        for i in (k + 1)..a.rows {
            let entry = &a.data[i * a.cols + k];
            if entry.is_zero() {
                continue;
            }
            let c = entry / &pv;
            a.sub_row(i, k, &c);
            left.sub_row(i, k, &c);
        }
        for j in (k + 1)..a.cols {
            let entry = &a.data[k * a.cols + j];
            if entry.is_zero() {
                continue;
            }
            let c = entry / &pv;
            a.sub_col(j, k, &c);
            right.sub_col(j, k, &c);
        }
        vals.push(v);
        undetermined.push(false);
    }

    SnfDecomposition {
        result: SnfResult {
            divisor_valuations: vals,
            undetermined,
        },
        left,
        right,
        diagonal: a,
    }
}

pub fn smith_normal_form(m: &LocalMatrix) -> SnfResult {
    smith_decomposition(m).result
}

/// Generators of `{x : x M = 0 (mod p^N)}` as row vectors, zero vectors omitted.
pub fn kernel_mod_ideal(m: &LocalMatrix) -> Vec<Vec<PAdicInt>> {
    let ring = m.ring();
    let dec = smith_decomposition(m);
    let n = ring.precision();
    let mut gens = Vec::new();
    for i in 0..m.rows() {
        // y_i * p^{d_i} = 0 forces y_i into p^{N - d_i}; rows past the diagonal are free.
        let scale = match dec.result.divisor_valuations.get(i) {
            Some(&d) => ring.p_pow(n - d),
            None => ring.one(),
        };
        if scale.is_zero() {
            continue;
        }
        let g: Vec<PAdicInt> = dec.left.row(i).iter().map(|x| x * &scale).collect();
        if g.iter().any(|x| !x.is_zero()) {
            gens.push(g);
        }
    }
    gens
}

/// `log_p` of the order of the submodule of `(Z/p^N)^n` spanned by `rows`.
pub fn span_order_exponent(ring: &LocalRing, rows: &[Vec<PAdicInt>]) -> Result<u32> {
    if rows.is_empty() {
        return Ok(0);
    }
    // Columns of the transposed generator matrix span the same module image.
    let g = LocalMatrix::from_columns(ring, rows)?;
    let snf = smith_normal_form(&g);
    let n = ring.precision();
    Ok(snf.divisor_valuations.iter().map(|&d| n - d).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring(p: u64, n: u32) -> LocalRing {
        LocalRing::new(p, n).unwrap()
    }

    #[test]
    fn construction_reduces_and_tracks_valuation() {
        let x = padic_new(3, 4, 82).unwrap();
        assert_eq!(x.value(), &BigUint::from(1u32));
        assert_eq!(x.valuation(), 0);
        assert_eq!(padic_new(5, 3, 0).unwrap().valuation(), 3);
        assert_eq!(padic_new(5, 3, 50).unwrap().valuation(), 2);
        assert_eq!(padic_new(5, 3, 25).unwrap().valuation(), 2);
        assert_eq!(padic_new(3, 4, 54).unwrap().valuation(), 3);
        assert_eq!(padic_new(3, 2, -1).unwrap().value(), &BigUint::from(8u32));
    }

    #[test]
    fn rejects_bad_moduli() {
        assert_eq!(padic_new(2, 3, 1).unwrap_err(), PadicError::NotOddPrime(2));
        assert_eq!(padic_new(9, 3, 1).unwrap_err(), PadicError::NotOddPrime(9));
        assert_eq!(padic_new(5, 0, 1).unwrap_err(), PadicError::ZeroPrecision);
    }

    #[test]
    fn mixing_rings_is_an_error() {
        let a = padic_new(3, 4, 1).unwrap();
        let b = padic_new(3, 5, 1).unwrap();
        let c = padic_new(5, 4, 1).unwrap();
        assert!(matches!(a.try_add(&b), Err(PadicError::RingMismatch(3, 4, 3, 5))));
        assert!(a.try_mul(&c).is_err());
        assert!(a.try_sub(&a).unwrap().is_zero());
    }

    #[test]
    fn inverse_of_units_only() {
        let r = ring(7, 3);
        let x = r.from_i64(10);
        assert_eq!(&x * &x.inverse().unwrap(), r.one());
        assert!(r.from_i64(14).inverse().is_err());
    }

    #[test]
    fn snf_identity_and_zero() {
        let r = ring(5, 3);
        let id = LocalMatrix::identity(&r, 4);
        let s = smith_normal_form(&id);
        assert_eq!(s.divisor_valuations, vec![0, 0, 0, 0]);
        assert!(s.is_fully_determined());
        let z = LocalMatrix::zeros(&r, 2, 3);
        let s = smith_normal_form(&z);
        assert_eq!(s.divisor_valuations, vec![3, 3]);
        assert_eq!(s.undetermined, vec![true, true]);
    }

    #[test]
    fn snf_worked_example_p5() {
        // Relation matrix of T^6 + 5N over Z_5[sigma], columns T^9, T^10, T^7, T^8, T^6+5N.
        let r = ring(5, 6);
        let m = LocalMatrix::from_i64_rows(
            &r,
            &[
                vec![0, 0, 0, 0, 25],
                vec![-350, 625, -75, 175, 75],
                vec![-525, 900, -125, 275, 95],
                vec![-425, 725, -105, 225, 65],
                vec![-125, 200, -35, 70, 20],
            ],
        )
        .unwrap();
        let s = smith_normal_form(&m);
        assert_eq!(s.divisor_valuations, vec![1, 1, 1, 2, 3]);
        assert!(s.is_fully_determined());
    }

    #[test]
    fn decomposition_reconstructs_diagonal() {
        let r = ring(3, 5);
        let m = LocalMatrix::from_i64_rows(&r, &[vec![9, 3, 6], vec![0, 27, 3], vec![18, 1, 0]]).unwrap();
        let dec = smith_decomposition(&m);
        let prod = dec.left.mul(&m).unwrap().mul(&dec.right).unwrap();
        assert_eq!(prod, dec.diagonal);
        for i in 0..3 {
            for j in 0..3 {
                let e = dec.diagonal.get(i, j);
                if i == j {
                    assert_eq!(e, r.p_pow(dec.result.divisor_valuations[i]));
                } else {
                    assert!(e.is_zero());
                }
            }
        }
    }

    #[test]
    fn mixed_diagonal_p3() {
        // U * diag(9, 3) * V with explicit unimodular U, V.
        let r = ring(3, 5);
        let u = LocalMatrix::from_i64_rows(&r, &[vec![1, 2], vec![1, 3]]).unwrap(); // det 1
        let v = LocalMatrix::from_i64_rows(&r, &[vec![2, 5], vec![1, 3]]).unwrap(); // det 1
        let d = LocalMatrix::from_i64_rows(&r, &[vec![9, 0], vec![0, 3]]).unwrap();
        let m = u.mul(&d).unwrap().mul(&v).unwrap();
        assert_eq!(smith_normal_form(&m).divisor_valuations, vec![1, 2]);
        assert_eq!(smith_normal_form(&d).divisor_valuations, vec![1, 2]);
    }

    #[test]
    fn kernel_examples() {
        let r = ring(3, 2);
        let m = LocalMatrix::from_i64_rows(&r, &[vec![3, 0], vec![0, 1]]).unwrap();
        let k = kernel_mod_ideal(&m);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![r.from_i64(3), r.zero()]);

        let z = LocalMatrix::zeros(&r, 2, 2);
        let k = kernel_mod_ideal(&z);
        assert_eq!(span_order_exponent(&r, &k).unwrap(), 4);
        assert_eq!(k.len(), 2);
    }

    #[test]
    fn kernel_of_wide_and_tall_matrices() {
        let r = ring(5, 3);
        // 3x1 column (5, 0, 1): x M = 5 x0 + x2.
        let m = LocalMatrix::from_i64_rows(&r, &[vec![5], vec![0], vec![1]]).unwrap();
        let k = kernel_mod_ideal(&m);
        for g in &k {
            let s = &(&g[0] * &r.from_i64(5)) + &g[2];
            assert!(s.is_zero());
        }
        // kernel has order 125^2 = 5^6
        assert_eq!(span_order_exponent(&r, &k).unwrap(), 6);
    }

    /// Fraction-free (Bareiss) determinant over Z, independent of the SNF path.
    fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
        let n = a.len();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                let Some(sw) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap(k, sw);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    fn int_valuation(x: &BigInt, p: u64) -> u32 {
        let mut v = 0;
        let mut x = x.clone();
        let pb = BigInt::from(p);
        while !x.is_zero() && (&x % &pb).is_zero() {
            x /= &pb;
            v += 1;
        }
        v
    }

    fn small_matrix() -> impl Strategy<Value = (u64, Vec<Vec<i64>>)> {
        (prop::sample::select(vec![3u64, 5, 7]), 1usize..=5).prop_flat_map(|(p, n)| {
            (Just(p), prop::collection::vec(prop::collection::vec(-60i64..60, n), n))
        })
    }

    proptest! {
        #[test]
        fn divisor_sum_matches_det_valuation((p, rows) in small_matrix()) {
            let n_prec = 8;
            let r = ring(p, n_prec);
            let m = LocalMatrix::from_i64_rows(&r, &rows).unwrap();
            let det = bareiss_det(rows.iter().map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect());
            let snf = smith_normal_form(&m);
            let vdet = if det.is_zero() { u32::MAX } else { int_valuation(&det, p) };
            if vdet < n_prec {
                prop_assert!(snf.is_fully_determined());
                prop_assert_eq!(snf.divisor_valuations.iter().sum::<u32>(), vdet);
            } else {
                prop_assert!(snf.divisor_valuations.iter().sum::<u32>() >= n_prec);
            }
            let mut sorted = snf.divisor_valuations.clone();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, snf.divisor_valuations.clone());
        }

        #[test]
        fn snf_invariant_under_unimodular_mixing(
            (p, rows) in small_matrix(),
            seed_ops in prop::collection::vec((0usize..5, 0usize..5, -20i64..20, any::<bool>()), 0..12),
            perm in any::<prop::sample::Index>(),
        ) {
            let r = ring(p, 6);
            let m = LocalMatrix::from_i64_rows(&r, &rows).unwrap();
            let n = m.rows();
            let base = smith_normal_form(&m);
            let mut mixed = m.clone();
            for (a, b, c, on_rows) in seed_ops {
                let (a, b) = (a % n, b % n);
                if a == b { continue; }
                let c = BigUint::from(c.rem_euclid(1000) as u64);
                if on_rows { mixed.sub_row(a, b, &c); } else { mixed.sub_col(a, b, &c); }
            }
            let k = perm.index(n);
            mixed.swap_rows(0, k);
            mixed.swap_cols(k, n - 1);
            prop_assert_eq!(smith_normal_form(&mixed), base);
        }

        #[test]
        fn valuation_of_products(a in -5000i64..5000, b in -5000i64..5000, p in prop::sample::select(vec![3u64, 5, 7])) {
            let r = ring(p, 5);
            let (x, y) = (r.from_i64(a), r.from_i64(b));
            prop_assert_eq!((&x * &y).valuation(), (x.valuation() + y.valuation()).min(5));
        }

        #[test]
        fn kernel_generators_annihilate((p, rows) in small_matrix()) {
            let r = ring(p, 4);
            let m = LocalMatrix::from_i64_rows(&r, &rows).unwrap();
            for g in kernel_mod_ideal(&m) {
                let x = LocalMatrix::from_columns(&r, &[g]).unwrap().transpose();
                let prod = x.mul(&m).unwrap();
                prop_assert!(prod.row(0).iter().all(PAdicInt::is_zero));
            }
        }
    }
}
