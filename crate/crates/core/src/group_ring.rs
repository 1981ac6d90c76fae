//! The group ring `Z_p[σ]` (`σ^p = 1`) in the basis `1, T, ..., T^{p-1}` with
//! `T = σ - 1`, the cyclotomic ring `Z_p[ζ]` in the basis `1, π, ..., π^{p-2}`
//! with `π = ζ - 1`, and the two projections of the fiber product
//! `Z_p[σ] → Z_p[ζ] × Z_p`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;

use crate::padic::{LocalMatrix, LocalRing, PAdicInt, PadicError, Result};
use crate::shape::Shape;

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Reduces a coefficient vector of any length to length `d` using
/// `X^d = Σ_{i<d} top[i] X^i`, eliminating from the highest degree down.
fn reduce(ring: &LocalRing, mut coeffs: Vec<PAdicInt>, d: usize, top: &[PAdicInt]) -> Vec<PAdicInt> {
    while coeffs.len() > d {
        let k = coeffs.len() - 1;
        let c = coeffs.pop().unwrap();
        if c.is_zero() {
            continue;
        }
        for (i, t) in top.iter().enumerate() {
            coeffs[k - d + i] = &coeffs[k - d + i] + &(&c * t);
        }
    }
    coeffs.resize(d, ring.zero());
    coeffs
}

/// Schoolbook product, then reduced.
fn poly_mul(ring: &LocalRing, a: &[PAdicInt], b: &[PAdicInt], top: &[PAdicInt]) -> Vec<PAdicInt> {
    let d = a.len();
    let mut prod = vec![ring.zero(); 2 * d - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            prod[i + j] = &prod[i + j] + &(x * y);
        }
    }
    reduce(ring, prod, d, top)
}

struct GroupRingInner {
    ring: LocalRing,
    /// `T^p` in the T-basis.
    reduction: Vec<PAdicInt>,
    cyclotomic: CyclotomicRing,
}

/// `Z_p[σ]` at precision `N`. Cheap to clone.
#[derive(Clone)]
pub struct GroupRing(Arc<GroupRingInner>);

impl GroupRing {
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        let ring = LocalRing::new(p, precision)?;
        let d = p as usize;
        // (1+T)^p = 1  =>  T^p = -sum_{i=1}^{p-1} C(p,i) T^i  = ũ p T
        let mut top = vec![ring.zero(); d];
        for (i, t) in top.iter_mut().enumerate().skip(1) {
            *t = ring.from_biguint(binomial(d, i)).neg();
        }
        debug_assert!(top.iter().all(|c| c.valuation() >= 1));
        // ũ(0) = -1: the T-coefficient of T^p is exactly -p.
        assert_eq!(top[1], ring.from_i64(-(p as i64)), "T^p reduction does not match ũ(0) = -1");
        let reduction = top;
        let cyclotomic = CyclotomicRing::with_ring(ring.clone());
        Ok(GroupRing(Arc::new(GroupRingInner {
            ring,
            reduction,
            cyclotomic,
        })))
    }

    pub fn local_ring(&self) -> &LocalRing {
        &self.0.ring
    }

    pub fn cyclotomic(&self) -> &CyclotomicRing {
        &self.0.cyclotomic
    }

    pub fn p(&self) -> u64 {
        self.0.ring.p()
    }

    pub fn precision(&self) -> u32 {
        self.0.ring.precision()
    }

    fn dim(&self) -> usize {
        self.p() as usize
    }

    pub fn element(&self, coeffs: Vec<PAdicInt>) -> Result<GroupRingElement> {
        if coeffs.len() != self.dim() {
            return Err(PadicError::Shape(format!("expected {} coefficients, got {}", self.dim(), coeffs.len())));
        }
        for c in &coeffs {
            if c.ring() != self.local_ring() {
                return Err(PadicError::RingMismatch(c.p(), c.precision(), self.p(), self.precision()));
            }
        }
        Ok(GroupRingElement {
            ring: self.clone(),
            coeffs,
        })
    }

    /// Coefficients in the T-basis, ascending; shorter inputs are zero-padded.
    pub fn from_i64(&self, coeffs: &[i64]) -> GroupRingElement {
        let c: Vec<PAdicInt> = coeffs.iter().map(|&x| self.local_ring().from_i64(x)).collect();
        let c = reduce(self.local_ring(), c, self.dim(), &self.0.reduction);
        GroupRingElement {
            ring: self.clone(),
            coeffs: c,
        }
    }

    pub fn zero(&self) -> GroupRingElement {
        self.from_i64(&[])
    }

    pub fn one(&self) -> GroupRingElement {
        self.from_i64(&[1])
    }

    pub fn scalar(&self, x: &PAdicInt) -> GroupRingElement {
        let mut c = vec![self.local_ring().zero(); self.dim()];
        c[0] = x.clone();
        GroupRingElement {
            ring: self.clone(),
            coeffs: c,
        }
    }

    /// `T = σ - 1`.
    pub fn t(&self) -> GroupRingElement {
        self.from_i64(&[0, 1])
    }

    pub fn sigma(&self) -> GroupRingElement {
        self.from_i64(&[1, 1])
    }

    pub fn t_pow(&self, k: u32) -> GroupRingElement {
        self.t().pow(k)
    }

    /// `N = 1 + σ + ... + σ^{p-1}`, expanded in the T-basis.
    pub fn norm_element(&self) -> GroupRingElement {
        let sigma = self.sigma();
        let mut acc = self.zero();
        let mut power = self.one();
        for _ in 0..self.p() {
            acc = &acc + &power;
            power = &power * &sigma;
        }
        acc
    }

    /// `α = T^r + j p^{m-1} N`, the generator of the ideal with parameters `(m, r, j)`.
    pub fn make_alpha(&self, m: u32, r: u32, j: u64) -> Result<GroupRingElement> {
        if m == 0 || r == 0 || j >= self.p() {
            return Err(PadicError::Shape(format!(
                "alpha parameters out of range: m={m}, r={r}, j={j} (need m>=1, r>=1, 0<=j<p)"
            )));
        }
        let coef = self.local_ring().p_pow(m - 1).mul_i64(j as i64);
        Ok(&self.t_pow(r) + &self.norm_element().scale(&coef))
    }

    /// Matrix of `x ↦ a x` in the T-basis (column `i` is `a · T^i`).
    pub fn multiplication_matrix(&self, a: &GroupRingElement) -> LocalMatrix {
        let cols: Vec<Vec<PAdicInt>> = (0..self.p() as u32)
            .map(|i| (a * &self.t_pow(i)).coeffs)
            .collect();
        LocalMatrix::from_columns(self.local_ring(), &cols).expect("square by construction")
    }
}

impl fmt::Debug for GroupRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z_{}[σ] mod {}^{}", self.p(), self.p(), self.precision())
    }
}

/// `Σ b_i T^i` in `Z_p[σ]`.
#[derive(Clone)]
pub struct GroupRingElement {
    ring: GroupRing,
    coeffs: Vec<PAdicInt>,
}

impl GroupRingElement {
    pub fn parent(&self) -> &GroupRing {
        &self.ring
    }

    /// T-basis coefficients `b_0, ..., b_{p-1}`.
    pub fn coeffs(&self) -> &[PAdicInt] {
        &self.coeffs
    }

    pub fn coeffs_i64(&self) -> Vec<i64> {
        self.coeffs.iter().map(|c| c.to_i64().expect("fits in i64")).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(PAdicInt::is_zero)
    }

    fn same_ring(&self, other: &Self) -> Result<()> {
        if self.ring.local_ring() == other.ring.local_ring() {
            Ok(())
        } else {
            Err(PadicError::RingMismatch(self.ring.p(), self.ring.precision(), other.ring.p(), other.ring.precision()))
        }
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.same_ring(rhs)?;
        Ok(self.with(self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect()))
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.same_ring(rhs)?;
        Ok(self.with(self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect()))
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.same_ring(rhs)?;
        let lr = self.ring.local_ring();
        Ok(self.with(poly_mul(lr, &self.coeffs, &rhs.coeffs, &self.ring.0.reduction)))
    }

    pub fn scale(&self, c: &PAdicInt) -> Self {
        self.with(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = self.ring.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Coefficients in the σ-basis: `T^i = Σ_k C(i,k) (-1)^{i-k} σ^k`.
    pub fn to_sigma_basis(&self) -> Vec<PAdicInt> {
        let lr = self.ring.local_ring();
        let d = self.coeffs.len();
        let mut out = vec![lr.zero(); d];
        for (i, b) in self.coeffs.iter().enumerate() {
            for (k, o) in out.iter_mut().enumerate().take(i + 1) {
                let c = lr.from_biguint(binomial(i, k));
                let term = b * &c;
                *o = if (i - k) % 2 == 0 { &*o + &term } else { &*o - &term };
            }
        }
        out
    }

    /// ε: `Σ a_i σ^i ↦ Σ a_i`, evaluated on the σ-basis form.
    pub fn augmentation(&self) -> PAdicInt {
        let lr = self.ring.local_ring();
        self.to_sigma_basis().iter().fold(lr.zero(), |acc, x| &acc + x)
    }

    /// φ: `σ ↦ ζ`, i.e. `T ↦ π`.
    pub fn to_cyclotomic(&self) -> CyclotomicElement {
        let cyc = self.ring.cyclotomic();
        let lr = self.ring.local_ring();
        let d = cyc.dim();
        // the T^{p-1} term reduces through π^{p-1} = u p
        let c = reduce(lr, self.coeffs.clone(), d, &cyc.0.reduction);
        CyclotomicElement { ring: cyc.clone(), coeffs: c }
    }

    fn with(&self, coeffs: Vec<PAdicInt>) -> Self {
        GroupRingElement {
            ring: self.ring.clone(),
            coeffs,
        }
    }
}

impl PartialEq for GroupRingElement {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl fmt::Debug for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.coeffs.iter().map(|x| x.to_string()).collect();
        write!(f, "T-basis({})", c.join(", "))
    }
}

macro_rules! ring_binop {
    ($ty:ident, $trait:ident, $method:ident, $try:ident) => {
        impl std::ops::$trait<&$ty> for &$ty {
            type Output = $ty;
            fn $method(self, rhs: &$ty) -> $ty {
                self.$try(rhs).expect("mixed rings")
            }
        }
    };
}

ring_binop!(GroupRingElement, Add, add, try_add);
ring_binop!(GroupRingElement, Sub, sub, try_sub);
ring_binop!(GroupRingElement, Mul, mul, try_mul);

struct CyclotomicInner {
    ring: LocalRing,
    /// `π^{p-1}` in the π-basis.
    reduction: Vec<PAdicInt>,
}

/// `Z_p[ζ]` at precision `N`, basis `1, π, ..., π^{p-2}`.
#[derive(Clone)]
pub struct CyclotomicRing(Arc<CyclotomicInner>);

impl CyclotomicRing {
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        Ok(Self::with_ring(LocalRing::new(p, precision)?))
    }

    fn with_ring(ring: LocalRing) -> Self {
        let d = ring.p() as usize - 1;
        // Φ_p(1+π) = Σ_{i=1}^{p} C(p,i) π^{i-1} = 0  =>  π^{p-1} = -Σ_{k<p-1} C(p,k+1) π^k
        let top: Vec<PAdicInt> = (0..d)
            .map(|k| ring.from_biguint(binomial(d + 1, k + 1)).neg())
            .collect();
        // u = π^{p-1}/p has constant term -1, so u ≡ -1 mod π.
        assert_eq!(top[0], ring.from_i64(-(ring.p() as i64)));
        let reduction = top;
        CyclotomicRing(Arc::new(CyclotomicInner { ring, reduction }))
    }

    pub fn local_ring(&self) -> &LocalRing {
        &self.0.ring
    }

    pub fn p(&self) -> u64 {
        self.0.ring.p()
    }

    fn dim(&self) -> usize {
        self.p() as usize - 1
    }

    pub fn from_i64(&self, coeffs: &[i64]) -> CyclotomicElement {
        let lr = self.local_ring();
        let c: Vec<PAdicInt> = coeffs.iter().map(|&x| lr.from_i64(x)).collect();
        CyclotomicElement {
            ring: self.clone(),
            coeffs: reduce(lr, c, self.dim(), &self.0.reduction),
        }
    }

    pub fn one(&self) -> CyclotomicElement {
        self.from_i64(&[1])
    }

    pub fn pi(&self) -> CyclotomicElement {
        self.from_i64(&[0, 1])
    }

    pub fn pi_pow(&self, k: u32) -> CyclotomicElement {
        let mut acc = self.one();
        let pi = self.pi();
        for _ in 0..k {
            acc = &acc * &pi;
        }
        acc
    }

    /// The unit `u` with `π^{p-1} = u p`: coefficients `-C(p, k+1)/p`.
    pub fn u(&self) -> CyclotomicElement {
        let lr = self.local_ring();
        let p = self.p() as usize;
        let coeffs = (0..self.dim())
            .map(|k| lr.from_biguint(binomial(p, k + 1) / p).neg())
            .collect();
        CyclotomicElement { ring: self.clone(), coeffs }
    }

    /// `(p-1)×(p-1)` matrix whose columns are `π^r, ..., π^{r+p-2}` in the π-basis.
    pub fn pi_power_matrix(&self, r: u32) -> LocalMatrix {
        let cols: Vec<Vec<PAdicInt>> = (0..self.dim() as u32).map(|i| self.pi_pow(r + i).coeffs).collect();
        LocalMatrix::from_columns(self.local_ring(), &cols).expect("square by construction")
    }
}

/// `Σ x_i π^i` in `Z_p[ζ]`.
#[derive(Clone)]
pub struct CyclotomicElement {
    ring: CyclotomicRing,
    coeffs: Vec<PAdicInt>,
}

impl CyclotomicElement {
    pub fn coeffs(&self) -> &[PAdicInt] {
        &self.coeffs
    }

    pub fn coeffs_i64(&self) -> Vec<i64> {
        self.coeffs.iter().map(|c| c.to_i64().expect("fits in i64")).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(PAdicInt::is_zero)
    }

    /// π-adic valuation, `min_i ((p-1) v_p(x_i) + i)`; capped by the precision.
    pub fn pi_valuation(&self) -> u32 {
        let d = self.coeffs.len() as u32;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, x)| d * x.valuation() + i as u32)
            .min()
            .unwrap_or(0)
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.check(rhs)?;
        Ok(self.with(self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect()))
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.check(rhs)?;
        Ok(self.with(self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect()))
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.check(rhs)?;
        let lr = self.ring.local_ring();
        Ok(self.with(poly_mul(lr, &self.coeffs, &rhs.coeffs, &self.ring.0.reduction)))
    }

    fn check(&self, rhs: &Self) -> Result<()> {
        let (a, b) = (self.ring.local_ring(), rhs.ring.local_ring());
        if a == b {
            Ok(())
        } else {
            Err(PadicError::RingMismatch(a.p(), a.precision(), b.p(), b.precision()))
        }
    }

    fn with(&self, coeffs: Vec<PAdicInt>) -> Self {
        CyclotomicElement {
            ring: self.ring.clone(),
            coeffs,
        }
    }
}

impl PartialEq for CyclotomicElement {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl fmt::Debug for CyclotomicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.coeffs.iter().map(|x| x.to_string()).collect();
        write!(f, "π-basis({})", c.join(", "))
    }
}

ring_binop!(CyclotomicElement, Add, add, try_add);
ring_binop!(CyclotomicElement, Sub, sub, try_sub);
ring_binop!(CyclotomicElement, Mul, mul, try_mul);

/// A pair in `Z_p[ζ] × Z_p`; it lies in the group ring iff [`fiber_check`] holds.
#[derive(Clone, Debug)]
pub struct FiberPair {
    pub x: CyclotomicElement,
    pub y: PAdicInt,
}

impl FiberPair {
    pub fn of(a: &GroupRingElement) -> Self {
        FiberPair {
            x: a.to_cyclotomic(),
            y: a.augmentation(),
        }
    }

    pub fn is_compatible(&self) -> bool {
        fiber_check(&self.x, &self.y)
    }
}

/// `x mod π == y mod p` in `F_p`.
pub fn fiber_check(x: &CyclotomicElement, y: &PAdicInt) -> bool {
    let p = BigUint::from(y.p());
    (x.coeffs[0].value() % &p) == (y.value() % &p)
}

pub fn norm_element(p: u64, precision: u32) -> Result<GroupRingElement> {
    Ok(GroupRing::new(p, precision)?.norm_element())
}

pub fn make_alpha(m: u32, r: u32, j: u64, p: u64, precision: u32) -> Result<GroupRingElement> {
    GroupRing::new(p, precision)?.make_alpha(m, r, j)
}

/// `Z_p[ζ]/π^r ≅ (Z/p^{s+1})^t × (Z/p^s)^{p-1-t}` with `r = (p-1)s + t`, `0 <= t < p-1`.
pub fn cyclotomic_quotient_shape(p: u64, r: u32) -> Shape {
    let d = (p - 1) as u32;
    let (s, t) = (r / d, r % d);
    let mut exps = vec![s + 1; t as usize];
    exps.extend(std::iter::repeat_n(s, (d - t) as usize));
    Shape::new(exps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::smith_normal_form;
    use proptest::prelude::*;

    fn gr(p: u64, n: u32) -> GroupRing {
        GroupRing::new(p, n).unwrap()
    }

    #[test]
    fn norm_expansions() {
        assert_eq!(norm_element(5, 6).unwrap().coeffs_i64(), vec![5, 10, 10, 5, 1]);
        assert_eq!(norm_element(3, 4).unwrap().coeffs_i64(), vec![3, 3, 1]);
        for p in [3, 5, 7, 11] {
            let g = gr(p, 5);
            let n = g.norm_element();
            assert!((&g.t() * &n).is_zero());
            assert_eq!(n.augmentation(), g.local_ring().from_i64(p as i64));
            assert!(n.to_cyclotomic().is_zero());
            assert_eq!(&n * &n, n.scale(&g.local_ring().from_i64(p as i64)));
        }
    }

    #[test]
    fn t_power_wraparound_p5() {
        let g = gr(5, 6);
        assert_eq!(g.t_pow(5).coeffs_i64(), vec![0, -5, -10, -10, -5]);
        assert_eq!(g.t_pow(7).coeffs_i64(), vec![0, -75, -125, -105, -35]);
        assert_eq!(g.t_pow(8).coeffs_i64(), vec![0, 175, 275, 225, 70]);
        assert_eq!(g.t_pow(9).coeffs_i64(), vec![0, -350, -525, -425, -125]);
        assert_eq!(g.t_pow(10).coeffs_i64(), vec![0, 625, 900, 725, 200]);
        assert_eq!(g.sigma().pow(5), g.one());
        let a = g.from_i64(&[3, 1, 4, 1, 5]);
        assert_eq!(&a * &g.one(), a);
    }

    #[test]
    fn alpha_examples() {
        let g = gr(5, 6);
        let a = g.make_alpha(2, 6, 1).unwrap();
        assert_eq!(a.coeffs_i64(), vec![25, 75, 95, 65, 20]);
        assert_eq!(a.augmentation(), g.local_ring().from_i64(25));
        assert_eq!(a.to_cyclotomic().pi_valuation(), 6);
        assert_eq!(g.make_alpha(2, 7, 0).unwrap().coeffs_i64(), vec![0, -75, -125, -105, -35]);
        for p in [3, 5, 7] {
            let g = gr(p, 4);
            let a = g.make_alpha(1, 1, 1).unwrap();
            assert_eq!(a.augmentation(), g.local_ring().from_i64(p as i64));
            assert_eq!(a.to_cyclotomic().pi_valuation(), 1);
        }
        assert!(g.make_alpha(0, 1, 1).is_err());
        assert!(g.make_alpha(1, 0, 1).is_err());
        assert!(g.make_alpha(1, 1, 5).is_err());
    }

    #[test]
    fn augmentation_examples() {
        let g = gr(5, 6);
        assert!(g.t().augmentation().is_zero());
        let a = &g.t_pow(6) + &g.norm_element().scale(&g.local_ring().from_i64(5));
        assert_eq!(a.augmentation().to_i64(), Some(25));
        // ε agrees with the constant T-coefficient
        assert_eq!(a.augmentation(), a.coeffs()[0]);
    }

    #[test]
    fn cyclotomic_image_of_t6_p5() {
        // π^6 = π^2 · π^4 = π^2 · 5u, so s = 1, t = 2: coefficients at π^0, π^1 have
        // valuation >= 2, at π^2 exactly 1, at π^3 at least 1.
        let g = gr(5, 6);
        let a = &g.t_pow(6) + &g.norm_element().scale(&g.local_ring().from_i64(5));
        let x = a.to_cyclotomic();
        let pi6 = g.cyclotomic().pi_pow(6);
        assert_eq!(x, pi6);
        let v: Vec<u32> = x.coeffs().iter().map(PAdicInt::valuation).collect();
        assert!(v[0] >= 2 && v[1] >= 2);
        assert_eq!(v[2], 1);
        assert!(v[3] >= 1);
        assert_eq!(x.pi_valuation(), 6);
        for r in 0..4 {
            let mut expect = vec![0i64; 4];
            expect[r as usize] = 1;
            assert_eq!(g.t_pow(r).to_cyclotomic().coeffs_i64(), expect);
        }
    }

    #[test]
    fn unit_u_is_minus_one_mod_pi() {
        for p in [3, 5, 7] {
            let c = CyclotomicRing::new(p, 6).unwrap();
            let u = c.u();
            assert_eq!(u.coeffs()[0].to_i64(), Some(-1));
            let pu = u.try_mul(&c.from_i64(&[p as i64])).unwrap();
            assert_eq!(pu, c.pi_pow(p as u32 - 1));
        }
    }

    #[test]
    fn fiber_compatibility_examples() {
        let c = CyclotomicRing::new(5, 4).unwrap();
        let lr = c.local_ring().clone();
        assert!(fiber_check(&c.pi_pow(3), &lr.from_i64(25)));
        assert!(fiber_check(&c.one(), &lr.from_i64(1)));
        assert!(!fiber_check(&c.one(), &lr.from_i64(0)));
    }

    #[test]
    fn cyclotomic_shapes() {
        assert_eq!(cyclotomic_quotient_shape(5, 6), Shape::new(vec![2, 2, 1, 1]));
        assert_eq!(cyclotomic_quotient_shape(3, 2), Shape::new(vec![1, 1]));
        assert_eq!(cyclotomic_quotient_shape(7, 11), Shape::new(vec![2, 2, 2, 2, 2, 1]));
        assert_eq!(cyclotomic_quotient_shape(7, 0), Shape::trivial());
    }

    #[test]
    fn cyclotomic_shape_matches_pi_power_snf() {
        for p in [3u64, 5, 7] {
            for r in 0..=3 * (p as u32 - 1) {
                let prec = r / (p as u32 - 1) + 3;
                let c = CyclotomicRing::new(p, prec).unwrap();
                let snf = smith_normal_form(&c.pi_power_matrix(r));
                assert!(snf.is_fully_determined());
                assert_eq!(Shape::new(snf.nonzero_exponents_desc()), cyclotomic_quotient_shape(p, r), "p={p} r={r}");
            }
        }
    }

    fn element(p: u64) -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(-1000i64..1000, p as usize)
    }

    proptest! {
        #[test]
        fn projections_are_ring_morphisms(a in element(5), b in element(5)) {
            let g = gr(5, 5);
            let (x, y) = (g.from_i64(&a), g.from_i64(&b));
            prop_assert_eq!((&x * &y).augmentation(), &x.augmentation() * &y.augmentation());
            prop_assert_eq!((&x + &y).augmentation(), &x.augmentation() + &y.augmentation());
            prop_assert_eq!((&x * &y).to_cyclotomic(), &x.to_cyclotomic() * &y.to_cyclotomic());
            prop_assert_eq!((&x + &y).to_cyclotomic(), &x.to_cyclotomic() + &y.to_cyclotomic());
            prop_assert!(FiberPair::of(&x).is_compatible());
        }

        #[test]
        fn kernels_and_norm_projection(a in element(3), p_idx in 0usize..3) {
            let p = [3u64, 5, 7][p_idx];
            let g = gr(p, 4);
            let mut coeffs = a.clone();
            coeffs.resize(p as usize, 7);
            let x = g.from_i64(&coeffs);
            let n = g.norm_element();
            prop_assert!((&g.t() * &x).augmentation().is_zero());
            prop_assert!((&n * &x).to_cyclotomic().is_zero());
            prop_assert_eq!(&n * &x, n.scale(&x.augmentation()));
            prop_assert!(FiberPair::of(&x).is_compatible());
        }

        #[test]
        fn multiplication_is_associative_and_commutative(a in element(7), b in element(7), c in element(7)) {
            let g = gr(7, 3);
            let (x, y, z) = (g.from_i64(&a), g.from_i64(&b), g.from_i64(&c));
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &y, &y * &x);
        }
    }
}
