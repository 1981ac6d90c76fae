//! Closed-form structure of `A_1` for cyclic `A_0 ≅ Z/p^m`, the list of all
//! possible `A_1` for a given `m`, and the cyclicity criterion for `λ = 1`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::shape::Shape;

fn check_params(p: u64, m: u32, r: u32, j: u64) -> Result<()> {
    if p < 3 || p.is_multiple_of(2) || !crate::padic::is_prime(p) {
        return Err(Error::InvalidParameter(format!("p = {p} must be an odd prime")));
    }
    if m == 0 || r == 0 {
        return Err(Error::InvalidParameter(format!("need m >= 1 and r >= 1 (m={m}, r={r})")));
    }
    if j == 0 || j >= p {
        return Err(Error::InvalidParameter(format!("need 1 <= j <= p-1 (j={j})")));
    }
    Ok(())
}

/// Whether `j ≡ (-1)^m (mod p)`.
pub fn j_matches_sign(p: u64, m: u32, j: u64) -> bool {
    let sign = if m.is_multiple_of(2) { 1 } else { p - 1 };
    j % p == sign
}

fn build(parts: &[(u32, u32)]) -> Shape {
    let mut exps = Vec::new();
    for &(e, count) in parts {
        exps.extend(std::iter::repeat_n(e, count as usize));
    }
    Shape::new(exps)
}

/// Structure of `Z_p[σ]/(T^r + j p^{m-1} N)` from the closed-form table,
/// with `r = (p-1)s + t`, `0 <= t < p-1`.
pub fn table1_shape(p: u64, m: u32, r: u32, j: u64) -> Result<Shape> {
    check_params(p, m, r, j)?;
    let d = (p - 1) as u32;
    let (s, t) = (r / d, r % d);
    let p = p as u32;
    let shape = if m < s {
        build(&[(m - 1, 1), (s + 1, t + 1), (s, p - t - 2)])
    } else if m > s && t != 0 {
        build(&[(m + 1, 1), (s + 1, t - 1), (s, p - t)])
    } else if m > s {
        build(&[(m + 1, 1), (s, p - 2), (s.saturating_sub(1), 1)])
    } else if t != 0 {
        build(&[(m - 1, 1), (m + 1, t + 1), (m, p - t - 2)])
    } else if !j_matches_sign(p as u64, m, j) {
        build(&[(m + 1, 1), (m - 1, 1), (m, p - 2)])
    } else {
        build(&[(m, p)])
    };
    Ok(shape)
}

/// One possible `A_1`, with the `r` producing it and how many `j` do.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PossibleA1 {
    pub shape: Shape,
    pub r: u32,
    pub j_count: u32,
}

/// All `A_1` of order at most `p^max_order_exponent` for `A_0 ≅ Z/p^m`,
/// ordered by `r` and then by shape (largest exponents first).
pub fn theorem1_enumerate(p: u64, m: u32, max_order_exponent: u32) -> Result<Vec<PossibleA1>> {
    let mut out = Vec::new();
    for r in 1..=max_order_exponent.saturating_sub(m) {
        let mut counts: BTreeMap<Shape, u32> = BTreeMap::new();
        for j in 1..p {
            *counts.entry(table1_shape(p, m, r, j)?).or_default() += 1;
        }
        let mut at_r: Vec<PossibleA1> = counts
            .into_iter()
            .map(|(shape, j_count)| PossibleA1 { shape, r, j_count })
            .collect();
        at_r.sort_by(|a, b| b.shape.exponents().cmp(a.shape.exponents()));
        out.extend(at_r);
    }
    Ok(out)
}

/// The three families as stated in the structure theorem, enumerated directly
/// (independent of the case table). Sorted and deduplicated.
pub fn theorem1_families(p: u64, m: u32, max_order_exponent: u32) -> Vec<Shape> {
    let p32 = p as u32;
    let mut out = Vec::new();
    // (Z/p^m)^p
    if m * p32 <= max_order_exponent {
        out.push(build(&[(m, p32)]));
    }
    // (Z/p^{m-1}) × (Z/p^{s+1})^a × (Z/p^s)^{p-1-a}, m <= s, 1 <= a <= p-1
    let mut s = m;
    while m - 1 + s * (p32 - 1) < max_order_exponent {
        for a in 1..p32 {
            let g = build(&[(m - 1, 1), (s + 1, a), (s, p32 - 1 - a)]);
            if g.order_exponent() <= max_order_exponent {
                out.push(g);
            }
        }
        s += 1;
    }
    // (Z/p^{m+1}) × (Z/p^{s+1})^b × (Z/p^s)^{p-1-b}, 0 <= s < m, 0 <= b <= p-2,
    // b != p-2 when m = s+1
    for s in 0..m {
        for b in 0..=(p32 - 2) {
            if m == s + 1 && b == p32 - 2 {
                continue;
            }
            let g = build(&[(m + 1, 1), (s + 1, b), (s, p32 - 1 - b)]);
            if g.order_exponent() <= max_order_exponent {
                out.push(g);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// `A_0 ≅ Z/p^m` and `A_1` cyclic; equivalently `|A_1|/|A_0| = p`.
pub fn is_lambda_one_pair(m: u32, a1: &Shape) -> bool {
    m >= 1 && a1.is_cyclic() && a1.exponents()[0] == m + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sh(e: &[u32]) -> Shape {
        Shape::new(e.to_vec())
    }

    #[test]
    fn table_examples() {
        assert_eq!(table1_shape(5, 2, 6, 1).unwrap(), sh(&[3, 2, 1, 1, 1]));
        assert_eq!(table1_shape(3, 1, 2, 2).unwrap(), sh(&[1, 1, 1]));
        assert_eq!(table1_shape(3, 1, 2, 1).unwrap(), sh(&[2, 1]));
        assert_eq!(table1_shape(3, 2, 4, 2).unwrap(), sh(&[3, 2, 1]));
        assert_eq!(table1_shape(3, 2, 4, 1).unwrap(), sh(&[2, 2, 2]));
        assert_eq!(table1_shape(3, 1, 1, 1).unwrap(), sh(&[2]));
        assert_eq!(table1_shape(3, 1, 3, 1).unwrap(), sh(&[2, 2]));
    }

    #[test]
    fn parameter_errors() {
        assert!(table1_shape(4, 1, 1, 1).is_err());
        assert!(table1_shape(3, 0, 1, 1).is_err());
        assert!(table1_shape(3, 1, 0, 1).is_err());
        assert!(table1_shape(3, 1, 1, 0).is_err());
        assert!(table1_shape(3, 1, 1, 3).is_err());
    }

    #[test]
    fn order_is_r_plus_m() {
        for p in [3u64, 5, 7, 11] {
            for m in 1..=4 {
                for r in 1..=(p as u32 - 1) * (m + 3) {
                    for j in 1..p {
                        assert_eq!(table1_shape(p, m, r, j).unwrap().order_exponent(), r + m);
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_p3_m1() {
        let got: Vec<(String, u32, u32)> = theorem1_enumerate(3, 1, 5)
            .unwrap()
            .into_iter()
            .map(|e| (e.shape.to_string(), e.j_count, e.r))
            .collect();
        assert_eq!(
            got,
            vec![
                ("2".into(), 2, 1),
                ("2.1".into(), 1, 2),
                ("1.1.1".into(), 1, 2),
                ("2.2".into(), 2, 3),
                ("3.2".into(), 2, 4),
            ]
        );
    }

    #[test]
    fn enumeration_p5_m1_split() {
        let e = theorem1_enumerate(5, 1, 5).unwrap();
        let at5: Vec<_> = e.iter().filter(|x| x.shape.order_exponent() == 5).collect();
        assert_eq!(at5.len(), 2);
        assert!(at5.iter().any(|x| x.shape == sh(&[2, 1, 1, 1]) && x.j_count == 3));
        assert!(at5.iter().any(|x| x.shape == sh(&[1, 1, 1, 1, 1]) && x.j_count == 1));
        for m in 1..4 {
            assert!(theorem1_enumerate(5, m, m).unwrap().is_empty());
        }
    }

    #[test]
    fn enumeration_matches_theorem_families() {
        for p in [3u64, 5, 7] {
            for m in 1..=4 {
                let bound = m * p as u32 + 2 * (p as u32 - 1) + 3;
                let mut from_table: Vec<Shape> =
                    theorem1_enumerate(p, m, bound).unwrap().into_iter().map(|e| e.shape).collect();
                from_table.sort();
                let n_before = from_table.len();
                from_table.dedup();
                assert_eq!(n_before, from_table.len(), "a shape repeats across r for p={p} m={m}");
                assert_eq!(from_table, theorem1_families(p, m, bound), "p={p} m={m}");
            }
        }
    }

    #[test]
    fn shape_determined_by_order_except_pm_p() {
        for p in [3u64, 5, 7] {
            for m in 1..=3 {
                let e = theorem1_enumerate(p, m, m * p as u32 + 12).unwrap();
                let mut by_order: BTreeMap<u32, Vec<&Shape>> = BTreeMap::new();
                for x in &e {
                    by_order.entry(x.shape.order_exponent()).or_default().push(&x.shape);
                }
                for (order, shapes) in by_order {
                    if order == m * p as u32 {
                        assert_eq!(shapes.len(), 2);
                        assert!(shapes.contains(&&sh(&vec![m; p as usize])));
                    } else {
                        assert_eq!(shapes.len(), 1, "p={p} m={m} order={order}");
                    }
                }
            }
        }
    }

    #[test]
    fn split_counts_conserve() {
        for p in [3u64, 5, 7, 11] {
            for m in 1..=3 {
                for x in theorem1_enumerate(p, m, m * p as u32 + 5).unwrap() {
                    if x.r == (p as u32 - 1) * m {
                        assert!(x.j_count == 1 || x.j_count as u64 == p - 2);
                    } else {
                        assert_eq!(x.j_count as u64, p - 1);
                    }
                }
            }
        }
    }

    #[test]
    fn removed_duplicate_is_covered() {
        // m = s+1, b = p-2 gives the same group as m = s, a = 1.
        for p in [3u32, 5, 7] {
            for m in 1..=4u32 {
                let s = m - 1;
                let dup = build(&[(m + 1, 1), (s + 1, p - 2), (s, 1)]);
                let fam = theorem1_families(p as u64, m, dup.order_exponent());
                assert!(fam.contains(&dup));
                assert_eq!(dup, build(&[(m - 1, 1), (m + 1, 1), (m, p - 2)]));
            }
        }
    }

    #[test]
    fn lambda_one_criterion() {
        assert!(is_lambda_one_pair(1, &sh(&[2])));
        assert!(!is_lambda_one_pair(1, &sh(&[1, 1])));
        assert!(is_lambda_one_pair(2, &sh(&[3])));
        assert!(!is_lambda_one_pair(2, &sh(&[2, 1])));
        for p in [3u64, 5, 7] {
            for m in 1..=3 {
                for x in theorem1_enumerate(p, m, m + 10).unwrap() {
                    assert_eq!(x.shape.is_cyclic(), x.shape.order_exponent() == m + 1);
                    assert_eq!(is_lambda_one_pair(m, &x.shape), x.shape.order_exponent() == m + 1);
                }
            }
        }
    }
}
