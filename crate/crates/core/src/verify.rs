//! Cross-validation battery over a grid of Reiner ideals.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::classification::table1_shape;
use crate::error::Result;
use crate::group_ring::{cyclotomic_quotient_shape, CyclotomicRing};
use crate::padic::smith_normal_form;
use crate::reiner::oracle::{BruteQuotient, DEFAULT_BUDGET};
use crate::reiner::{
    fixed_subgroup_order, norm_image_order, quotient_model, ReinerIdeal,
};
use crate::shape::Shape;

/// Largest `m` and `r` for which the fixed-point criterion is also checked by
/// enumeration at `p = 3`.
pub const BRUTE_FIXED_LIMIT: (u32, u32) = (2, 6);

#[derive(Debug, Clone, Default, Serialize)]
pub struct BatteryReport {
    pub p: u64,
    pub max_m: u32,
    pub max_r: u32,
    /// Number of `(m, r, j)` ideals visited.
    pub cases: u64,
    /// Individual comparisons per check name.
    pub checks: BTreeMap<String, u64>,
    pub failures: Vec<String>,
}

impl BatteryReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Default)]
struct CaseResult {
    checks: Vec<&'static str>,
    failures: Vec<String>,
}

impl CaseResult {
    fn check(&mut self, name: &'static str, ok: bool, detail: impl FnOnce() -> String) {
        self.checks.push(name);
        if !ok {
            self.failures.push(format!("{name}: {}", detail()));
        }
    }
}

fn run_case(p: u64, m: u32, r: u32, j: u64) -> Result<CaseResult> {
    let mut c = CaseResult::default();
    let id = ReinerIdeal::new(p, m, r, j)?;
    let tag = format!("p={p} m={m} r={r} j={j}");
    let model = quotient_model(&id)?;
    let n = model.precision;
    if j != 0 {
        let table = table1_shape(p, m, r, j)?;
        c.check("table-vs-snf", table == model.shape, || {
            format!("{tag}: table {table}, snf {}", model.shape)
        });
        let sum: u32 = model.snf.divisor_valuations.iter().sum();
        c.check("divisor-sum", sum == r + m, || format!("{tag}: sum {sum}"));
    }
    let fixed = fixed_subgroup_order(&id, n)?;
    let norm = norm_image_order(&id, n)?;
    c.check("fixed-point-criterion", (fixed == m) == (j != 0) && fixed >= m, || {
        format!("{tag}: fixed {fixed}")
    });
    c.check("norm-image", norm == m, || format!("{tag}: norm image {norm}"));
    if p == 3 {
        let brute = BruteQuotient::build(&id, n + 4, DEFAULT_BUDGET)?;
        c.check("snf-vs-brute", brute.shape == model.shape, || {
            format!("{tag}: brute {}, snf {}", brute.shape, model.shape)
        });
        if m <= BRUTE_FIXED_LIMIT.0 && r <= BRUTE_FIXED_LIMIT.1 {
            let bf = brute.fixed_subgroup_order()?;
            c.check("fixed-vs-brute", bf == fixed, || format!("{tag}: brute fixed {bf}, snf {fixed}"));
        }
    }
    Ok(c)
}

/// Runs every check over `1 <= m <= max_m`, `1 <= r <= max_r`, `0 <= j < p`,
/// plus the cyclotomic quotient shapes for `r <= max_r`.
pub fn run_battery(p: u64, max_m: u32, max_r: u32) -> Result<BatteryReport> {
    let grid: Vec<(u32, u32, u64)> = (1..=max_m)
        .flat_map(|m| (1..=max_r).flat_map(move |r| (0..p).map(move |j| (m, r, j))))
        .collect();
    let results: Vec<Result<CaseResult>> = grid.par_iter().map(|&(m, r, j)| run_case(p, m, r, j)).collect();
    let mut report = BatteryReport {
        p,
        max_m,
        max_r,
        cases: grid.len() as u64,
        ..Default::default()
    };
    for res in results {
        let res = res?;
        for name in res.checks {
            *report.checks.entry(name.to_string()).or_default() += 1;
        }
        report.failures.extend(res.failures);
    }
    let ring = CyclotomicRing::new(p, max_r / (p as u32 - 1) + 3)?;
    for r in 0..=max_r {
        let snf = smith_normal_form(&ring.pi_power_matrix(r));
        let expected = cyclotomic_quotient_shape(p, r);
        let got = Shape::new(snf.nonzero_exponents_desc());
        *report.checks.entry("cyclotomic-quotient".into()).or_default() += 1;
        if got != expected || !snf.is_fully_determined() {
            report.failures.push(format!("cyclotomic-quotient: p={p} r={r}: {got} vs {expected}"));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_battery_passes() {
        let rep = run_battery(3, 1, 4).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        assert_eq!(rep.cases, 12);
        assert_eq!(rep.checks["table-vs-snf"], 8);
        assert_eq!(rep.checks["snf-vs-brute"], 12);
        assert_eq!(rep.checks["cyclotomic-quotient"], 5);
    }

    #[test]
    fn battery_without_brute_force() {
        let rep = run_battery(5, 1, 5).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        assert!(!rep.checks.contains_key("snf-vs-brute"));
    }
}
