use std::fmt::Write as _;
use std::path::PathBuf;

use iwasawa_core::classification::{j_matches_sign, table1_shape};
use iwasawa_core::reiner::oracle::{quotient_brute_force, BruteQuotient, DEFAULT_BUDGET};
use iwasawa_core::reiner::{
    fixed_subgroup_order, norm_image_order, quotient_shape_snf, coinvariant_order, ReinerIdeal,
};
use rayon::prelude::*;

fn p3_grid() -> Vec<ReinerIdeal> {
    let mut out = Vec::new();
    for m in 1..=3 {
        for r in 1..=2 * (m + 2) {
            for j in 1..3 {
                out.push(ReinerIdeal::new(3, m, r, j).unwrap());
            }
        }
    }
    out
}

#[test]
fn snf_table_and_brute_force_agree_for_p3() {
    let mismatches: Vec<String> = p3_grid()
        .par_iter()
        .filter_map(|id| {
            let table = table1_shape(id.p, id.m, id.r, id.j).unwrap();
            let snf = quotient_shape_snf(id).unwrap();
            let brute = quotient_brute_force(id, 10).unwrap();
            (table != snf || snf != brute).then(|| format!("{id:?}: table {table} snf {snf} brute {brute}"))
        })
        .collect();
    assert!(mismatches.is_empty(), "{mismatches:#?}");
}

#[test]
fn norm_fixed_and_coinvariants_match_brute_force() {
    for m in 1..=2 {
        for r in 1..=6 {
            for j in 0..3 {
                let id = ReinerIdeal::new(3, m, r, j).unwrap();
                let brute = BruteQuotient::build(&id, 10, DEFAULT_BUDGET).unwrap();
                let n = id.policy_precision(2) + 1;
                assert_eq!(norm_image_order(&id, n).unwrap(), brute.norm_image_order(), "{id:?}");
                assert_eq!(
                    fixed_subgroup_order(&id, n).unwrap(),
                    brute.fixed_subgroup_order().unwrap(),
                    "{id:?}"
                );
                assert_eq!(
                    coinvariant_order(&id, n).unwrap(),
                    brute.coinvariant_order().unwrap(),
                    "{id:?}"
                );
            }
        }
    }
}

fn split_point_table() -> String {
    let mut out = String::from("# p m r j sign_class shape source\n");
    for p in [3u64, 5, 7] {
        for m in 1..=3u32 {
            let r = (p as u32 - 1) * m;
            for j in 1..p {
                let id = ReinerIdeal::new(p, m, r, j).unwrap();
                let (shape, source) = if p == 3 {
                    (quotient_brute_force(&id, 10).unwrap(), "brute")
                } else {
                    (quotient_shape_snf(&id).unwrap(), "snf")
                };
                let class = if j_matches_sign(p, m, j) { "j=(-1)^m" } else { "other" };
                writeln!(out, "{p} {m} {r} {j} {class} {shape} {source}").unwrap();
            }
        }
    }
    out
}

#[test]
fn split_point_golden() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/split_points.txt");
    let got = split_point_table();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &got).unwrap();
    }
    let want = std::fs::read_to_string(&path).expect("golden file missing; rerun with UPDATE_GOLDEN=1");
    assert_eq!(got, want);
}
