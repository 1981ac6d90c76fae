//! Brute-force model of `Z_p[σ]/I` by explicit enumeration in the finite rings
//! `R_k = (Z/p^k)[T]/((1+T)^p - 1)`. Shares no arithmetic with the SNF path.

use std::collections::HashSet;

use super::ReinerIdeal;
use crate::error::{Error, Result};
use crate::shape::Shape;

/// Maximum number of group elements enumerated by a single call.
pub const DEFAULT_BUDGET: usize = 10_000_000;

struct SmallRing {
    p: usize,
    q: u64,
    /// `C(p, i) mod q` for `i = 0..=p`.
    binom: Vec<u64>,
}

type Elem = Vec<u64>;

impl SmallRing {
    fn new(p: u64, k: u32) -> Result<Self> {
        let q = p
            .checked_pow(k)
            .filter(|q| q.checked_mul(*q).is_some())
            .ok_or_else(|| Error::BudgetExceeded(format!("modulus {p}^{k} too large")))?;
        let p = p as usize;
        let mut row = vec![1u64];
        for _ in 0..p {
            let mut next = vec![1u64; row.len() + 1];
            for i in 1..row.len() {
                next[i] = (row[i - 1] + row[i]) % q;
            }
            row = next;
        }
        Ok(SmallRing { p, q, binom: row })
    }

    fn zero(&self) -> Elem {
        vec![0; self.p]
    }

    fn monomial(&self, i: usize) -> Elem {
        let mut v = vec![0; 2 * self.p];
        v[i] = 1 % self.q;
        self.reduce(v)
    }

    /// `T^p = -Σ_{0<i<p} C(p,i) T^i`, applied from the top degree down.
    fn reduce(&self, mut v: Vec<u64>) -> Elem {
        let (p, q) = (self.p, self.q);
        for deg in (p..v.len()).rev() {
            let c = v[deg];
            if c == 0 {
                continue;
            }
            v[deg] = 0;
            for i in 1..p {
                let sub = mulmod(c, self.binom[i], q);
                let idx = deg - p + i;
                v[idx] = (v[idx] + q - sub) % q;
            }
        }
        v.truncate(p);
        v.resize(p, 0);
        v
    }

    fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let mut v = vec![0u64; 2 * self.p];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                v[i + j] = (v[i + j] + mulmod(x, y, self.q)) % self.q;
            }
        }
        self.reduce(v)
    }

    fn add(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.q).collect()
    }

    fn scale(&self, a: &Elem, c: u64) -> Elem {
        a.iter().map(|&x| mulmod(x, c % self.q, self.q)).collect()
    }

    fn encode(&self, a: &Elem) -> u128 {
        a.iter().rev().fold(0u128, |acc, &x| acc * self.q as u128 + x as u128)
    }

    /// `N = Σ_{i<p} (1+T)^i`.
    fn norm(&self) -> Elem {
        let sigma = self.add(&self.monomial(0), &self.monomial(1));
        let mut acc = self.zero();
        let mut pw = self.monomial(0);
        for _ in 0..self.p {
            acc = self.add(&acc, &pw);
            pw = self.mul(&pw, &sigma);
        }
        acc
    }

    fn pow_mod_q(&self, base: u64, e: u32) -> u64 {
        (0..e).fold(1 % self.q, |acc, _| mulmod(acc, base, self.q))
    }

    fn generators(&self, ideal: &ReinerIdeal) -> Vec<Elem> {
        let mut t_r = self.monomial(0);
        let t = self.monomial(1);
        for _ in 0..ideal.r {
            t_r = self.mul(&t_r, &t);
        }
        let n = self.norm();
        let coef = mulmod(self.pow_mod_q(ideal.p, ideal.m - 1), ideal.j, self.q);
        let alpha = self.add(&t_r, &self.scale(&n, coef));
        let mut gens = Vec::new();
        let mut g = alpha;
        for _ in 0..self.p {
            gens.push(g.clone());
            g = self.mul(&g, &t);
        }
        gens.push(self.scale(&n, self.pow_mod_q(ideal.p, ideal.m)));
        gens
    }

    /// Additive subgroup generated by `gens`, adjoining one generator at a time
    /// coset by coset.
    fn span(&self, gens: &[Elem], budget: usize) -> Result<HashSet<u128>> {
        let zero = self.zero();
        let mut set: HashSet<u128> = HashSet::from([self.encode(&zero)]);
        let mut elems = vec![zero];
        for g in gens {
            let base = elems.clone();
            let mut shift = g.clone();
            while !set.contains(&self.encode(&shift)) {
                for b in &base {
                    let x = self.add(b, &shift);
                    if set.insert(self.encode(&x)) {
                        elems.push(x);
                    }
                }
                if set.len() > budget {
                    return Err(Error::BudgetExceeded(format!(
                        "subgroup of R_k exceeds {budget} elements"
                    )));
                }
                shift = self.add(&shift, g);
            }
        }
        Ok(set)
    }

    fn log_p(&self, n: usize) -> u32 {
        let mut e = 0;
        let mut v = 1usize;
        while v < n {
            v *= self.p;
            e += 1;
        }
        assert_eq!(v, n, "subgroup order {n} is not a power of {}", self.p);
        e
    }
}

fn mulmod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

/// Explicit model of `Q/p^k Q` for the smallest `k` with `p^k Q = 0`.
pub struct BruteQuotient {
    ideal: ReinerIdeal,
    ring: SmallRing,
    ideal_set: HashSet<u128>,
    budget: usize,
    pub shape: Shape,
    /// The `k` of the ring `R_k` carrying the model.
    pub precision: u32,
}

impl BruteQuotient {
    /// Increases `k` until `|Q/p^k Q|` stabilizes, then reads the shape from
    /// the orders `|p^k Q|`.
    pub fn build(ideal: &ReinerIdeal, max_precision: u32, budget: usize) -> Result<Self> {
        let p = ideal.p as u32;
        // c[k] = log_p |Q / p^k Q|
        let mut c = vec![0u32];
        let mut prev: Option<(SmallRing, HashSet<u128>)> = None;
        for k in 1..=max_precision {
            let ring = SmallRing::new(ideal.p, k)?;
            let set = ring.span(&ring.generators(ideal), budget)?;
            c.push(p * k - ring.log_p(set.len()));
            if c[k as usize] == c[k as usize - 1] {
                let total = c[k as usize];
                let orders: Vec<u32> = c[..k as usize].iter().map(|&ck| total - ck).collect();
                let shape = Shape::from_multiple_orders(&orders);
                let (ring, ideal_set, precision) = match prev {
                    Some((r, s)) => (r, s, k - 1),
                    None => (ring, set, k),
                };
                return Ok(BruteQuotient {
                    ideal: *ideal,
                    ring,
                    ideal_set,
                    budget,
                    shape,
                    precision,
                });
            }
            prev = Some((ring, set));
        }
        Err(Error::PrecisionExhausted {
            what: format!("brute-force quotient of {ideal:?}"),
            precision: max_precision,
        })
    }

    /// `log_p` of the order of the class of `N`.
    pub fn norm_image_order(&self) -> u32 {
        let r = &self.ring;
        let mut x = r.norm();
        let mut e = 0;
        while !self.ideal_set.contains(&r.encode(&x)) {
            x = r.scale(&x, self.ideal.p);
            e += 1;
        }
        e
    }

    /// `log_p` of the number of classes killed by `T`, by scanning all of `R_k`.
    pub fn fixed_subgroup_order(&self) -> Result<u32> {
        let r = &self.ring;
        let total = (r.q as u128).checked_pow(r.p as u32).filter(|&n| n <= self.budget as u128);
        let Some(total) = total else {
            return Err(Error::BudgetExceeded(format!(
                "R_{} has more than {} elements",
                self.precision, self.budget
            )));
        };
        let t = r.monomial(1);
        let mut count = 0usize;
        let mut x = r.zero();
        for _ in 0..total {
            if self.ideal_set.contains(&r.encode(&r.mul(&t, &x))) {
                count += 1;
            }
            for c in x.iter_mut() {
                *c += 1;
                if *c < r.q {
                    break;
                }
                *c = 0;
            }
        }
        Ok(r.log_p(count) - r.log_p(self.ideal_set.len()))
    }

    /// `log_p |Q / T Q|`.
    pub fn coinvariant_order(&self) -> Result<u32> {
        let r = &self.ring;
        let mut gens = r.generators(&self.ideal);
        gens.extend((1..=r.p).map(|i| r.monomial(i)));
        let set = r.span(&gens, self.budget)?;
        Ok(r.p as u32 * self.precision - r.log_p(set.len()))
    }
}

/// Shape of `Z_p[σ]/I` by enumeration, trying `k = 1, ..., max_precision`.
pub fn quotient_brute_force(ideal: &ReinerIdeal, max_precision: u32) -> Result<Shape> {
    Ok(BruteQuotient::build(ideal, max_precision, DEFAULT_BUDGET)?.shape)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(p: u64, m: u32, r: u32, j: u64) -> Shape {
        quotient_brute_force(&ReinerIdeal::new(p, m, r, j).unwrap(), 8).unwrap()
    }

    #[test]
    fn small_ring_relations() {
        let r = SmallRing::new(3, 3).unwrap();
        // σ^3 = 1
        let sigma = r.add(&r.monomial(0), &r.monomial(1));
        let s3 = r.mul(&r.mul(&sigma, &sigma), &sigma);
        assert_eq!(s3, r.monomial(0));
        // T N = 0
        assert_eq!(r.mul(&r.monomial(1), &r.norm()), r.zero());
        assert_eq!(r.norm(), vec![3, 3, 1]);
    }

    #[test]
    fn known_shapes() {
        assert_eq!(shape(3, 1, 1, 1), Shape::cyclic(2));
        assert_eq!(shape(3, 2, 4, 1), Shape::new(vec![2, 2, 2]));
        assert_eq!(shape(3, 1, 3, 1), Shape::new(vec![2, 2]));
        assert_eq!(shape(3, 1, 2, 2), Shape::new(vec![1, 1, 1]));
        assert_eq!(shape(3, 1, 2, 1), Shape::new(vec![2, 1]));
        assert_eq!(shape(3, 3, 10, 2), Shape::new(vec![6, 5, 2]));
    }

    #[test]
    fn budget_and_precision_errors() {
        let id = ReinerIdeal::new(3, 2, 6, 1).unwrap();
        assert!(matches!(quotient_brute_force(&id, 2), Err(Error::PrecisionExhausted { .. })));
        assert!(matches!(
            BruteQuotient::build(&id, 8, 10),
            Err(Error::BudgetExceeded(_))
        ));
        let big = ReinerIdeal::new(5, 2, 6, 1).unwrap();
        assert!(matches!(quotient_brute_force(&big, 8), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn model_level_invariants() {
        let q = BruteQuotient::build(&ReinerIdeal::new(3, 1, 2, 1).unwrap(), 6, DEFAULT_BUDGET).unwrap();
        assert_eq!(q.norm_image_order(), 1);
        assert_eq!(q.fixed_subgroup_order().unwrap(), 1);
        assert_eq!(q.coinvariant_order().unwrap(), 1);
        let q0 = BruteQuotient::build(&ReinerIdeal::new(3, 1, 2, 0).unwrap(), 6, DEFAULT_BUDGET).unwrap();
        assert_eq!(q0.norm_image_order(), 1);
        assert!(q0.fixed_subgroup_order().unwrap() > 1);
    }
}
