//! Finite abelian p-groups as exponent lists.
//!
//! Text format: dot-separated exponents, non-increasing, e.g. `3.2.1.1.1`
//! for `p^3 x p^2 x p x p x p`; the trivial group is `0`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid shape {input:?}: {reason}")]
pub struct ShapeParseError {
    pub input: String,
    pub reason: String,
}

/// Isomorphism type of a finite abelian p-group; `p` is implicit.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Shape(Vec<u32>);

impl Shape {
    /// Canonicalizes: zeros dropped, sorted non-increasing.
    pub fn new(mut exponents: Vec<u32>) -> Self {
        exponents.retain(|&e| e > 0);
        exponents.sort_unstable_by(|a, b| b.cmp(a));
        Shape(exponents)
    }

    pub fn trivial() -> Self {
        Shape(Vec::new())
    }

    pub fn cyclic(e: u32) -> Self {
        Shape::new(vec![e])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// `log_p` of the group order.
    pub fn order_exponent(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }

    /// Non-trivial and cyclic.
    pub fn is_cyclic(&self) -> bool {
        self.0.len() == 1
    }

    /// Recovers the shape from `c[k] = log_p |Q / p^k Q|`, `k = 0, 1, ...`
    /// (so `c[0] = 0`). The count of cyclic factors of exponent `>= k` is
    /// `c[k] - c[k-1]`. The sequence must be non-decreasing and stabilize.
    pub fn from_quotient_orders(c: &[u32]) -> Self {
        let mut exps = Vec::new();
        for k in 1..c.len() {
            let at_least_k = c[k] - c[k - 1];
            let at_least_next = if k + 1 < c.len() { c[k + 1] - c[k] } else { 0 };
            for _ in 0..(at_least_k - at_least_next) {
                exps.push(k as u32);
            }
        }
        Shape::new(exps)
    }

    /// Recovers the shape from `o[k] = log_p |p^k Q|`, `k = 0, 1, ...`,
    /// ending at the first zero.
    pub fn from_multiple_orders(o: &[u32]) -> Self {
        let mut exps = Vec::new();
        for k in 0..o.len() {
            let next = o.get(k + 1).copied().unwrap_or(0);
            // factors of exponent > k number o[k] - o[k+1]
            let gt_k = o[k] - next;
            let gt_next = if k + 2 <= o.len() {
                next - o.get(k + 2).copied().unwrap_or(0)
            } else {
                0
            };
            for _ in 0..(gt_k - gt_next) {
                exps.push(k as u32 + 1);
            }
        }
        Shape::new(exps)
    }

    /// Human rendering such as `27×9×3`; exponents past `p^e >= 100` print as `3^5`.
    pub fn pretty(&self, p: u64) -> String {
        if self.is_trivial() {
            return "1".into();
        }
        self.0
            .iter()
            .map(|&e| match p.checked_pow(e) {
                Some(v) if v < 100 => v.to_string(),
                _ => format!("{p}^{e}"),
            })
            .collect::<Vec<_>>()
            .join("×")
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "{}", parts.join("."))
    }
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Shape({self})")
    }
}

impl FromStr for Shape {
    type Err = ShapeParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| ShapeParseError {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let t = s.trim();
        if t.is_empty() {
            return Err(err("empty"));
        }
        if t == "0" {
            return Ok(Shape::trivial());
        }
        let mut exps = Vec::new();
        for part in t.split('.') {
            let e: u32 = part.parse().map_err(|_| err("exponents must be non-negative integers"))?;
            if e == 0 {
                return Err(err("zero exponent inside a non-trivial shape"));
            }
            exps.push(e);
        }
        if exps.windows(2).any(|w| w[0] < w[1]) {
            return Err(err("exponents must be non-increasing"));
        }
        Ok(Shape(exps))
    }
}

impl PartialOrd for Shape {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by group order first, then lexicographically by exponents.
impl Ord for Shape {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order_exponent()
            .cmp(&other.order_exponent())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl Serialize for Shape {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Shape {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_form_and_text() {
        let s = Shape::new(vec![1, 3, 0, 2, 1, 1]);
        assert_eq!(s.to_string(), "3.2.1.1.1");
        assert_eq!(s.order_exponent(), 8);
        assert_eq!(Shape::trivial().to_string(), "0");
        assert_eq!("0".parse::<Shape>().unwrap(), Shape::trivial());
        assert_eq!("2".parse::<Shape>().unwrap(), Shape::cyclic(2));
        assert!("1.2".parse::<Shape>().is_err());
        assert!("2.0".parse::<Shape>().is_err());
        assert!("x".parse::<Shape>().is_err());
        assert!("".parse::<Shape>().is_err());
    }

    #[test]
    fn pretty_rendering() {
        assert_eq!(Shape::new(vec![3, 2, 1]).pretty(3), "27×9×3");
        assert_eq!(Shape::new(vec![5, 4]).pretty(3), "3^5×81");
        assert_eq!(Shape::new(vec![2, 1, 1, 1]).pretty(5), "25×5×5×5");
    }

    #[test]
    fn order_sequences() {
        // Z/27 x Z/3: |Q/pQ| = 9, |Q/p^2Q| = 27, |Q/p^3 Q| = 81
        assert_eq!(Shape::from_quotient_orders(&[0, 2, 3, 4, 4]), Shape::new(vec![3, 1]));
        // |Q| = 81, |3Q| = 9, |9Q| = 3, |27Q| = 1
        assert_eq!(Shape::from_multiple_orders(&[4, 2, 1, 0]), Shape::new(vec![3, 1]));
        assert_eq!(Shape::from_multiple_orders(&[0]), Shape::trivial());
    }

    proptest! {
        #[test]
        fn text_round_trip(exps in prop::collection::vec(0u32..7, 0..8)) {
            let s = Shape::new(exps);
            prop_assert_eq!(s.to_string().parse::<Shape>().unwrap(), s);
        }

        #[test]
        fn order_sequences_recover_shape(exps in prop::collection::vec(1u32..7, 0..6)) {
            let s = Shape::new(exps);
            let top = s.exponents().first().copied().unwrap_or(0) as usize;
            let quot: Vec<u32> = (0..=top + 1)
                .map(|k| s.exponents().iter().map(|&e| e.min(k as u32)).sum())
                .collect();
            prop_assert_eq!(Shape::from_quotient_orders(&quot), s.clone());
            let mult: Vec<u32> = (0..=top)
                .map(|k| s.exponents().iter().map(|&e| e.saturating_sub(k as u32)).sum())
                .collect();
            prop_assert_eq!(Shape::from_multiple_orders(&mult), s);
        }
    }
}
