//! Probability models for `A_0`, `A_1` and `λ`.
//!
//! Every probability has the form `c · η^k` with `c` an exact rational and
//! `k ∈ {0, 1}`, where `η = Π_{j>=1} (1 - p^{-j})`. The coefficient is kept
//! exactly; the value uses `η` truncated once `p^{-J} < 10^{-30}`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::classification::theorem1_enumerate;
use crate::error::{Error, Result};
use crate::padic::is_prime;
use crate::shape::Shape;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn inv_p_pow(p: u64, e: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(p).pow(e))
}

/// `Π_{j=1}^{r} (1 - p^{-j})`.
fn partial_eta(p: u64, r: u32) -> BigRational {
    (1..=r).fold(BigRational::one(), |acc, j| acc * (BigRational::one() - inv_p_pow(p, j)))
}

/// Renders `x` rounded half away from zero to `places` decimals.
pub fn to_decimal(x: &BigRational, places: usize) -> String {
    let scale = BigInt::from(10u32).pow(places as u32);
    let scaled = x * BigRational::from_integer(scale.clone());
    let half = rat(1, 2);
    let rounded = if scaled.is_negative() {
        -((-scaled) + half).floor().to_integer()
    } else {
        (scaled + half).floor().to_integer()
    };
    let neg = rounded.is_negative();
    let digits = rounded.abs().to_string();
    let digits = format!("{:0>width$}", digits, width = places + 1);
    let (int, frac) = digits.split_at(digits.len() - places);
    let sign = if neg { "-" } else { "" };
    if places == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Truncated `η(p)`.
#[derive(Debug, Clone)]
pub struct Eta {
    pub p: u64,
    pub terms: u32,
    pub value: BigRational,
    /// Bound on the relative truncation error, `Σ_{j>J} p^{-j}`.
    pub error_bound: BigRational,
}

pub fn eta(p: u64) -> Result<Eta> {
    if p < 2 {
        return Err(Error::InvalidParameter(format!("eta needs p >= 2, got {p}")));
    }
    let threshold = BigInt::from(10u32).pow(30);
    let mut terms = 0u32;
    let mut pj = BigInt::one();
    while pj <= threshold {
        pj *= p;
        terms += 1;
    }
    Ok(Eta {
        p,
        terms,
        value: partial_eta(p, terms),
        error_bound: BigRational::new(BigInt::one(), BigInt::from(p - 1) * BigInt::from(p).pow(terms)),
    })
}

/// A probability `coefficient · η^eta_power`.
#[derive(Debug, Clone, Serialize)]
pub struct HeuristicValue {
    pub p: u64,
    pub param: u32,
    #[serde(serialize_with = "ser_rational")]
    pub coefficient: BigRational,
    pub eta_power: u32,
    #[serde(serialize_with = "ser_rational_decimal")]
    pub value: BigRational,
    #[serde(serialize_with = "ser_rational_decimal")]
    pub error_bound: BigRational,
}

fn ser_rational<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_rational_decimal<S: serde::Serializer>(
    x: &BigRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&to_decimal(x, 30))
}

impl HeuristicValue {
    fn with_eta(p: u64, param: u32, coefficient: BigRational) -> Result<Self> {
        let e = eta(p)?;
        let value = &coefficient * &e.value;
        let error_bound = &value * &e.error_bound;
        Ok(HeuristicValue {
            p,
            param,
            coefficient,
            eta_power: 1,
            value,
            error_bound,
        })
    }

    pub fn decimal(&self, places: usize) -> String {
        to_decimal(&self.value, places)
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.value)
    }
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::InvalidParameter(format!("p = {p} is not prime")));
    }
    Ok(())
}

/// `Prob(rank A = r) = p^{-r^2} η Π_{j<=r} (1 - p^{-j})^{-2}`.
pub fn clm_rank_prob(p: u64, r: u32) -> Result<HeuristicValue> {
    check_prime(p)?;
    let pe = partial_eta(p, r);
    HeuristicValue::with_eta(p, r, inv_p_pow(p, r * r) / (&pe * &pe))
}

/// `Prob(A cyclic) = p^{-1} (1 - p^{-1})^{-2} η`.
pub fn clm_cyclic_prob(p: u64) -> Result<HeuristicValue> {
    check_prime(p)?;
    let one_minus = BigRational::one() - inv_p_pow(p, 1);
    HeuristicValue::with_eta(p, 1, inv_p_pow(p, 1) / (&one_minus * &one_minus))
}

/// `Prob(λ = r) = p^{-r} η Π_{j<=r} (1 - p^{-j})^{-1}`.
pub fn ejv_lambda_prob(p: u64, r: u32) -> Result<HeuristicValue> {
    check_prime(p)?;
    HeuristicValue::with_eta(p, r, inv_p_pow(p, r) / partial_eta(p, r))
}

/// `Prob(λ = 1) = p^{-1} Π_{j>=2} (1 - p^{-j})`, evaluated from its own product.
pub fn ejv_lambda_one_direct(p: u64) -> Result<BigRational> {
    check_prime(p)?;
    let e = eta(p)?;
    let tail = (2..=e.terms).fold(BigRational::one(), |acc, j| acc * (BigRational::one() - inv_p_pow(p, j)));
    Ok(inv_p_pow(p, 1) * tail)
}

/// `Prob(λ = r) = Σ_{k=1}^{r} Prob(rank = k) p^{-(r-k)} (p-1)/p`.
pub fn new_lambda_prob(p: u64, r: u32) -> Result<HeuristicValue> {
    check_prime(p)?;
    if r == 0 {
        return Err(Error::InvalidParameter("the alternative model starts at r = 1".into()));
    }
    let frac = rat(p as i64 - 1, p as i64);
    let mut coef = BigRational::zero();
    for k in 1..=r {
        coef += clm_rank_prob(p, k)?.coefficient * inv_p_pow(p, r - k) * &frac;
    }
    HeuristicValue::with_eta(p, r, coef)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaModel {
    Ejv,
    New,
}

/// One row of a `λ` table. `r = 0` appears only for the EJV model and is
/// extrapolated from the general formula.
#[derive(Debug, Clone, Serialize)]
pub struct LambdaRow {
    pub r: u32,
    pub extrapolated: bool,
    pub probability: HeuristicValue,
}

pub fn lambda_table(p: u64, model: LambdaModel, max_r: u32, include_zero: bool) -> Result<Vec<LambdaRow>> {
    let mut rows = Vec::new();
    if include_zero && model == LambdaModel::Ejv {
        rows.push(LambdaRow {
            r: 0,
            extrapolated: true,
            probability: ejv_lambda_prob(p, 0)?,
        });
    }
    for r in 1..=max_r {
        let probability = match model {
            LambdaModel::Ejv => ejv_lambda_prob(p, r)?,
            LambdaModel::New => new_lambda_prob(p, r)?,
        };
        rows.push(LambdaRow {
            r,
            extrapolated: false,
            probability,
        });
    }
    Ok(rows)
}

/// `|Aut| = (p-1) p^{m+r-1}` for a module with cyclic `A_0 ≅ Z/p^m` and `|A_1| = p^{m+r}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AutSize {
    pub unit_factor: u64,
    pub exponent: u32,
}

impl AutSize {
    pub fn value(&self, p: u64) -> BigUint {
        BigUint::from(self.unit_factor) * BigUint::from(p).pow(self.exponent)
    }
}

pub fn aut_size_exponent(p: u64, m: u32, r: u32) -> Result<AutSize> {
    check_prime(p)?;
    if m == 0 || r == 0 {
        return Err(Error::InvalidParameter(format!("need m >= 1 and r >= 1 (m={m}, r={r})")));
    }
    Ok(AutSize {
        unit_factor: p - 1,
        exponent: m + r - 1,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PredictedA1 {
    pub shape: Shape,
    pub r: u32,
    pub j_count: u32,
    #[serde(serialize_with = "ser_rational")]
    pub probability: BigRational,
}

#[derive(Debug, Clone, Serialize)]
pub struct A1Distribution {
    pub p: u64,
    pub m: u32,
    pub max_r: u32,
    pub entries: Vec<PredictedA1>,
    /// Mass of all `r > max_r`, equal to `p^{-max_r}`.
    #[serde(serialize_with = "ser_rational")]
    pub tail: BigRational,
}

/// Each `A_1` weighted by `j_count / |Aut|`, normalized by the total
/// `1 / ((p-1) p^{m-1})`.
pub fn predicted_a1_distribution(p: u64, m: u32, max_r: u32) -> Result<A1Distribution> {
    let normalizer = BigRational::new(BigInt::one(), BigInt::from(p - 1) * BigInt::from(p).pow(m - 1));
    let mut entries = Vec::new();
    for e in theorem1_enumerate(p, m, m + max_r)? {
        let aut = aut_size_exponent(p, m, e.r)?;
        let weighted = BigRational::new(BigInt::from(e.j_count), BigInt::from(aut.value(p)));
        let probability = weighted / &normalizer;
        let simplified = BigRational::new(BigInt::from(e.j_count), BigInt::from(p).pow(e.r));
        assert_eq!(probability, simplified, "normalized weight must reduce to j_count / p^r");
        entries.push(PredictedA1 {
            shape: e.shape,
            r: e.r,
            j_count: e.j_count,
            probability,
        });
    }
    Ok(A1Distribution {
        p,
        m,
        max_r,
        entries,
        tail: inv_p_pow(p, max_r),
    })
}

impl A1Distribution {
    pub fn total(&self) -> BigRational {
        self.entries.iter().map(|e| e.probability.clone()).sum()
    }

    pub fn cyclic_mass(&self) -> BigRational {
        self.entries
            .iter()
            .filter(|e| e.shape.is_cyclic())
            .map(|e| e.probability.clone())
            .sum()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompatibilityReport {
    pub p: u64,
    #[serde(serialize_with = "ser_rational")]
    pub expected: BigRational,
    /// Coefficient ratio of the two `η`-multiples.
    #[serde(serialize_with = "ser_rational")]
    pub symbolic_ratio: BigRational,
    /// Ratio of the truncated numerical values.
    #[serde(serialize_with = "ser_rational_decimal")]
    pub numeric_ratio: BigRational,
    /// Cyclic mass of the predicted `A_1` distribution for `m = 1, 2, 3`.
    pub cyclic_masses: Vec<(u32, String)>,
    pub agrees: bool,
}

/// `Prob(λ = 1 | A_0 cyclic) = (p-1)/p` along three independent routes.
pub fn compatibility_check(p: u64) -> Result<CompatibilityReport> {
    let expected = rat(p as i64 - 1, p as i64);
    let ejv = ejv_lambda_prob(p, 1)?;
    let cyc = clm_cyclic_prob(p)?;
    let symbolic_ratio = &ejv.coefficient / &cyc.coefficient;
    let numeric_ratio = &ejv.value / &cyc.value;
    let tolerance = BigRational::new(BigInt::one(), BigInt::from(10u32).pow(25));
    let mut agrees = symbolic_ratio == expected && (&numeric_ratio - &expected).abs() < tolerance;
    let mut cyclic_masses = Vec::new();
    for m in 1..=3 {
        let mass = predicted_a1_distribution(p, m, 1)?.cyclic_mass();
        agrees &= mass == expected;
        cyclic_masses.push((m, mass.to_string()));
    }
    Ok(CompatibilityReport {
        p,
        expected,
        symbolic_ratio,
        numeric_ratio,
        cyclic_masses,
        agrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dec(v: &HeuristicValue, k: usize) -> String {
        v.decimal(k)
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&rat(2, 3), 4), "0.6667");
        assert_eq!(to_decimal(&rat(1, 8), 2), "0.13");
        assert_eq!(to_decimal(&rat(-1, 8), 2), "-0.13");
        assert_eq!(to_decimal(&rat(5, 1), 0), "5");
        assert_eq!(to_decimal(&rat(1, 100000), 4), "0.0000");
    }

    #[test]
    fn eta_values() {
        let e3 = eta(3).unwrap();
        assert!(e3.value.to_f64().unwrap() - 0.560126 < 1e-6);
        assert!(inv_p_pow(3, e3.terms) < rat(1, 1) / BigRational::from_integer(BigInt::from(10u32).pow(30)));
        let e2 = eta(2).unwrap();
        assert_eq!(to_decimal(&e2.value, 6), "0.288788");
        // ten more factors change nothing at 25 digits
        let longer = partial_eta(2, e2.terms + 10);
        assert_eq!(to_decimal(&longer, 25), to_decimal(&e2.value, 25));
        let big = eta(1_000_000).unwrap();
        assert_eq!(to_decimal(&big.value, 6), "0.999999");
        assert!(eta(1).is_err());
    }

    #[test]
    fn eta_decreases_toward_one_minus_inverse() {
        let mut last = BigRational::zero();
        for p in [2u64, 3, 5, 7, 11, 13, 101] {
            let e = eta(p).unwrap().value;
            assert!(e > last);
            let approx = BigRational::one() - inv_p_pow(p, 1) - inv_p_pow(p, 2);
            assert!((&e - &approx).abs() < inv_p_pow(p, 4) * BigRational::from_integer(BigInt::from(2)));
            last = e;
        }
    }

    #[test]
    fn clm_values() {
        assert_eq!(dec(&clm_rank_prob(3, 1).unwrap(), 6), "0.420095");
        assert_eq!(dec(&clm_rank_prob(3, 2).unwrap(), 6), "0.019692");
        assert_eq!(clm_rank_prob(3, 0).unwrap().value, eta(3).unwrap().value);
        assert_eq!(clm_cyclic_prob(3).unwrap().coefficient, clm_rank_prob(3, 1).unwrap().coefficient);
        assert_eq!(clm_cyclic_prob(5).unwrap().coefficient, rat(1, 5) / (rat(4, 5) * rat(4, 5)));
    }

    #[test]
    fn lambda_tables_p3() {
        let ejv: Vec<String> = (1..=6).map(|r| dec(&ejv_lambda_prob(3, r).unwrap(), 5)).collect();
        assert_eq!(ejv, ["0.28006", "0.10502", "0.03635", "0.01227", "0.00411", "0.00137"]);
        let new: Vec<String> = (1..=6).map(|r| dec(&new_lambda_prob(3, r).unwrap(), 5)).collect();
        assert_eq!(new, ["0.28006", "0.10648", "0.03555", "0.01185", "0.00395", "0.00132"]);
        let e = eta(3).unwrap();
        assert_eq!(to_decimal(&(&e.value / rat(2, 1)), 5), "0.28006");
    }

    #[test]
    fn hand_composed_new_r2() {
        let c1 = clm_rank_prob(3, 1).unwrap().value;
        let c2 = clm_rank_prob(3, 2).unwrap().value;
        let composed = c1 * rat(1, 3) * rat(2, 3) + c2 * rat(2, 3);
        assert_eq!(composed, new_lambda_prob(3, 2).unwrap().value);
    }

    #[test]
    fn lambda_one_forms_agree() {
        for p in [3u64, 5, 7, 11] {
            let ejv = ejv_lambda_prob(p, 1).unwrap();
            assert_eq!(ejv.coefficient, new_lambda_prob(p, 1).unwrap().coefficient);
            let direct = ejv_lambda_one_direct(p).unwrap();
            assert!((direct - &ejv.value).abs() < &ejv.error_bound * rat(2, 1));
        }
    }

    #[test]
    fn ejv_total_mass_is_one() {
        for p in [3u64, 5, 7] {
            let e = eta(p).unwrap();
            let mut coef_sum = BigRational::zero();
            for r in 0..=80 {
                coef_sum += ejv_lambda_prob(p, r).unwrap().coefficient;
            }
            let total = coef_sum * &e.value;
            assert!((total - BigRational::one()).abs() < rat(1, 1_000_000_000_000_000) * rat(1, 1_000_000_000));
        }
    }

    #[test]
    fn lambda_distributions_decrease() {
        for p in [3u64, 5, 7] {
            for model in [LambdaModel::Ejv, LambdaModel::New] {
                let rows = lambda_table(p, model, 12, false).unwrap();
                for w in rows.windows(2) {
                    assert!(w[0].probability.value > w[1].probability.value);
                }
            }
        }
        let with_zero = lambda_table(3, LambdaModel::Ejv, 2, true).unwrap();
        assert!(with_zero[0].extrapolated && with_zero[0].r == 0);
        assert!(lambda_table(3, LambdaModel::New, 2, true).unwrap()[0].r == 1);
    }

    #[test]
    fn automorphism_sizes() {
        assert_eq!(aut_size_exponent(3, 1, 1).unwrap().value(3), BigUint::from(6u32));
        assert_eq!(aut_size_exponent(3, 2, 3).unwrap().value(3), BigUint::from(162u32));
        assert_eq!(aut_size_exponent(5, 1, 4).unwrap().value(5), BigUint::from(4u32 * 625));
        assert!(aut_size_exponent(3, 0, 1).is_err());
    }

    fn predicted(p: u64, m: u32, max_r: u32) -> Vec<(String, String)> {
        predicted_a1_distribution(p, m, max_r)
            .unwrap()
            .entries
            .iter()
            .map(|e| (e.shape.pretty(p), to_decimal(&e.probability, 4)))
            .collect()
    }

    #[test]
    fn predicted_rows() {
        let t2: Vec<String> = predicted(3, 1, 10).into_iter().map(|x| x.1).collect();
        assert_eq!(
            t2,
            ["0.6667", "0.1111", "0.1111", "0.0741", "0.0247", "0.0082", "0.0027", "0.0009", "0.0003", "0.0001", "0.0000"]
        );
        let t2_shapes: Vec<String> = predicted(3, 1, 5).into_iter().map(|x| x.0).collect();
        assert_eq!(t2_shapes, ["9", "9×3", "3×3×3", "9×9", "27×9", "27×27"]);
        assert_eq!(
            predicted(3, 2, 5),
            [
                ("27".to_string(), "0.6667".to_string()),
                ("27×3".into(), "0.2222".into()),
                ("27×3×3".into(), "0.0741".into()),
                ("27×9×3".into(), "0.0123".into()),
                ("9×9×9".into(), "0.0123".into()),
                ("27×27×3".into(), "0.0082".into()),
            ]
        );
        assert_eq!(
            predicted(5, 1, 7),
            [
                ("25".to_string(), "0.8000".to_string()),
                ("25×5".into(), "0.1600".into()),
                ("25×5×5".into(), "0.0320".into()),
                ("25×5×5×5".into(), "0.0048".into()),
                ("5×5×5×5×5".into(), "0.0016".into()),
                ("25×25×5×5".into(), "0.0013".into()),
                ("25×25×25×5".into(), "0.0003".into()),
                ("25×25×25×25".into(), "0.0001".into()),
            ]
        );
        let d = predicted_a1_distribution(5, 1, 4).unwrap();
        assert_eq!(d.entries[3].probability, rat(3, 625));
        assert_eq!(d.entries[4].probability, rat(1, 625));
        assert_eq!(predicted_a1_distribution(3, 1, 3).unwrap().entries[3].probability, rat(2, 27));
    }

    #[test]
    fn distribution_mass_and_tail() {
        for p in [3u64, 5, 7] {
            for m in 1..=3 {
                for max_r in [1, 4, 9] {
                    let d = predicted_a1_distribution(p, m, max_r).unwrap();
                    assert_eq!(d.total(), BigRational::one() - inv_p_pow(p, max_r));
                    assert_eq!(d.total() + &d.tail, BigRational::one());
                }
            }
        }
    }

    #[test]
    fn compatibility() {
        for p in [3u64, 5, 7, 11] {
            let rep = compatibility_check(p).unwrap();
            assert!(rep.agrees, "{rep:?}");
            assert_eq!(rep.symbolic_ratio, rat(p as i64 - 1, p as i64));
        }
    }
}
