//! Finite-index ideals `I = Z_p[σ](π^r, j p^m) + Z_p(0, p^{m+1})` of the
//! group ring and their quotients.

pub mod oracle;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group_ring::GroupRing;
use crate::padic::{
    is_prime, kernel_mod_ideal, smith_decomposition, smith_normal_form, span_order_exponent,
    LocalMatrix, LocalRing, SnfResult,
};
use crate::shape::Shape;

pub const PRECISION_GUARD_ENV: &str = "IWASAWA_PRECISION_GUARD";
pub const DEFAULT_PRECISION_GUARD: u32 = 2;

/// Extra precision above `m + ceil(r/(p-1))`, read from the environment.
pub fn precision_guard() -> Result<u32> {
    match std::env::var(PRECISION_GUARD_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Error::InvalidParameter(format!("{PRECISION_GUARD_ENV}={v:?} is not a non-negative integer"))
        }),
        Err(_) => Ok(DEFAULT_PRECISION_GUARD),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ReinerIdeal {
    pub p: u64,
    pub m: u32,
    pub r: u32,
    pub j: u64,
}

impl ReinerIdeal {
    pub fn new(p: u64, m: u32, r: u32, j: u64) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidParameter(format!("p = {p} must be an odd prime")));
        }
        if m == 0 || r == 0 {
            return Err(Error::InvalidParameter(format!("need m >= 1 and r >= 1 (m={m}, r={r})")));
        }
        if j >= p {
            return Err(Error::InvalidParameter(format!("need 0 <= j <= p-1 (j={j})")));
        }
        Ok(ReinerIdeal { p, m, r, j })
    }

    /// `r = (p-1)s + t`.
    pub fn s(&self) -> u32 {
        self.r / (self.p as u32 - 1)
    }

    pub fn t(&self) -> u32 {
        self.r % (self.p as u32 - 1)
    }

    /// `m + ceil(r/(p-1)) + guard`.
    pub fn policy_precision(&self, guard: u32) -> u32 {
        let d = self.p as u32 - 1;
        self.m + self.r.div_ceil(d) + guard
    }

    fn group_ring(&self, precision: u32) -> Result<GroupRing> {
        Ok(GroupRing::new(self.p, precision)?)
    }
}

fn alpha_columns(ideal: &ReinerIdeal, gr: &GroupRing) -> Result<Vec<Vec<crate::padic::PAdicInt>>> {
    let alpha = gr.make_alpha(ideal.m, ideal.r, ideal.j)?;
    Ok((0..ideal.p as u32).map(|i| (&alpha * &gr.t_pow(i)).coeffs().to_vec()).collect())
}

/// `p × p` matrix with columns `T^i α`, `i = 0..p-1`. Requires `j ≠ 0`.
pub fn relation_matrix(ideal: &ReinerIdeal, precision: u32) -> Result<LocalMatrix> {
    if ideal.j == 0 {
        return Err(Error::InvalidParameter(
            "j = 0: alpha does not generate the ideal, use relation_matrix_general".into(),
        ));
    }
    let gr = ideal.group_ring(precision)?;
    Ok(LocalMatrix::from_columns(gr.local_ring(), &alpha_columns(ideal, &gr)?)?)
}

/// `p × (p+1)` matrix: the columns `T^i α` followed by `p^m N`. Valid for every `j`.
pub fn relation_matrix_general(ideal: &ReinerIdeal, precision: u32) -> Result<LocalMatrix> {
    let gr = ideal.group_ring(precision)?;
    let mut cols = alpha_columns(ideal, &gr)?;
    let pm = gr.local_ring().p_pow(ideal.m);
    cols.push(gr.norm_element().scale(&pm).coeffs().to_vec());
    Ok(LocalMatrix::from_columns(gr.local_ring(), &cols)?)
}

fn default_matrix(ideal: &ReinerIdeal, precision: u32) -> Result<LocalMatrix> {
    if ideal.j == 0 {
        relation_matrix_general(ideal, precision)
    } else {
        relation_matrix(ideal, precision)
    }
}

/// The quotient `Z_p[σ]/I` as computed at a working precision.
#[derive(Debug, Clone)]
pub struct QuotientModel {
    pub ideal: ReinerIdeal,
    pub precision: u32,
    pub matrix: LocalMatrix,
    pub snf: SnfResult,
    pub shape: Shape,
}

/// Builds the quotient at `precision`, reporting undetermined divisors as an error.
pub fn quotient_model_at(ideal: &ReinerIdeal, precision: u32) -> Result<QuotientModel> {
    let matrix = default_matrix(ideal, precision)?;
    let snf = smith_normal_form(&matrix);
    if !snf.is_fully_determined() {
        return Err(Error::PrecisionExhausted {
            what: format!("{ideal:?}"),
            precision,
        });
    }
    let shape = Shape::new(snf.nonzero_exponents_desc());
    Ok(QuotientModel {
        ideal: *ideal,
        precision,
        matrix,
        snf,
        shape,
    })
}

/// Builds the quotient at the policy precision, retrying once at `N + 2`.
pub fn quotient_model(ideal: &ReinerIdeal) -> Result<QuotientModel> {
    let n = ideal.policy_precision(precision_guard()?);
    match quotient_model_at(ideal, n) {
        Err(Error::PrecisionExhausted { .. }) => quotient_model_at(ideal, n + 2),
        other => other,
    }
}

pub fn quotient_shape_snf(ideal: &ReinerIdeal) -> Result<Shape> {
    Ok(quotient_model(ideal)?.shape)
}

/// Data shared by the norm and fixed-point computations: `L M R = D` for the
/// general relation matrix, so `x ↦ L x` identifies the quotient with `⊕ Z/p^{d_i}`.
struct Coordinates {
    gr: GroupRing,
    left: LocalMatrix,
    divisors: Vec<u32>,
}

fn coordinates(ideal: &ReinerIdeal, precision: u32) -> Result<Coordinates> {
    let matrix = relation_matrix_general(ideal, precision)?;
    let dec = smith_decomposition(&matrix);
    if !dec.result.is_fully_determined() {
        return Err(Error::PrecisionExhausted {
            what: format!("{ideal:?}"),
            precision,
        });
    }
    Ok(Coordinates {
        gr: ideal.group_ring(precision)?,
        left: dec.left,
        divisors: dec.result.divisor_valuations,
    })
}

/// `log_p` of the order of the class of `N` in `Z_p[σ]/I`.
pub fn norm_image_order(ideal: &ReinerIdeal, precision: u32) -> Result<u32> {
    let c = coordinates(ideal, precision)?;
    let ring = c.gr.local_ring();
    let n_col = LocalMatrix::from_columns(ring, &[c.gr.norm_element().coeffs().to_vec()])?;
    let y = c.left.mul(&n_col)?;
    Ok(c.divisors
        .iter()
        .enumerate()
        .map(|(i, &d)| d - y.get(i, 0).valuation().min(d))
        .max()
        .unwrap_or(0))
}

/// `log_p` of the order of `{x ∈ Z_p[σ]/I : T x = 0}`.
pub fn fixed_subgroup_order(ideal: &ReinerIdeal, precision: u32) -> Result<u32> {
    let c = coordinates(ideal, precision)?;
    let ring: &LocalRing = c.gr.local_ring();
    let p = ideal.p as usize;
    let a_t = c.gr.multiplication_matrix(&c.gr.t());
    // x is fixed iff (L T x)_i ≡ 0 mod p^{d_i}; scale row i by p^{N - d_i}.
    let mut cond = c.left.mul(&a_t)?;
    for i in 0..p {
        let scale = ring.p_pow(precision - c.divisors[i]);
        for k in 0..p {
            let v = &cond.get(i, k) * &scale;
            cond.set(i, k, &v)?;
        }
    }
    let kernel = kernel_mod_ideal(&cond.transpose());
    let kernel_exp = span_order_exponent(ring, &kernel)?;
    let quotient_exp: u32 = c.divisors.iter().sum();
    let ideal_exp = p as u32 * precision - quotient_exp;
    Ok(kernel_exp - ideal_exp)
}

/// `log_p |Q / T Q|` for `Q = Z_p[σ]/I`.
pub fn coinvariant_order(ideal: &ReinerIdeal, precision: u32) -> Result<u32> {
    let gr = ideal.group_ring(precision)?;
    let m = relation_matrix_general(ideal, precision)?;
    let snf = smith_normal_form(&m.hstack(&gr.multiplication_matrix(&gr.t()))?);
    if !snf.is_fully_determined() {
        return Err(Error::PrecisionExhausted {
            what: format!("coinvariants of {ideal:?}"),
            precision,
        });
    }
    Ok(snf.divisor_valuations.iter().sum())
}
