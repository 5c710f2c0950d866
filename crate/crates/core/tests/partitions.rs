mod common;

use std::collections::BTreeMap;

use ckp_core::hwv::{hwv_basis, Algebra};
use ckp_core::identities::jacobi_sum;
use ckp_core::partitions::{
    crank, crank_counts, enumerate_bpdi, enumerate_odp, enumerate_ptdo, hwv_count_via_crank, integer_partitions,
    odp_counts, ptdo_counts, triangular, Bipartition,
};
use ckp_core::series::{product_eval, Grading, Mono, Series};
use proptest::prelude::*;

#[test]
fn count_examples() {
    assert_eq!(ptdo_counts(6), vec![1, 1, 1, 2, 1, 2, 3]);
    assert_eq!(odp_counts(5), vec![1, 1, 0, 1, 1, 1]);
    assert_eq!(enumerate_odp(0), vec![vec![ckp_core::partitions::HalfOddPartition::new(vec![]).unwrap()]]);
}

#[test]
fn enumerations_are_duplicate_free() {
    for (d2, ps) in enumerate_odp(30).iter().enumerate() {
        let mut seen: Vec<&[u32]> = ps.iter().map(|p| p.parts_doubled()).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), ps.len());
        assert!(ps.iter().all(|p| p.doubled_weight() == d2 as u32));
    }
    for (d2, ps) in enumerate_ptdo(30).iter().enumerate() {
        let mut seen: Vec<String> = ps.iter().map(ToString::to_string).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), ps.len());
        assert!(ps.iter().all(|p| p.doubled_weight() == d2 as u32));
    }
}

fn bp(pi1: &[u32], pi2: &[u32]) -> Bipartition {
    Bipartition::new(pi1.to_vec(), pi2.to_vec()).unwrap()
}

#[test]
fn bpdi_examples() {
    let at = |d2: u32| -> Vec<Bipartition> {
        let mut v: Vec<Bipartition> = enumerate_bpdi(d2).into_iter().filter(|b| b.doubled_weight() == d2).collect();
        v.sort_by_key(ToString::to_string);
        v
    };
    let mut three_halves = vec![bp(&[1], &[]), bp(&[], &[3, 2, 1])];
    three_halves.sort_by_key(ToString::to_string);
    assert_eq!(at(3), three_halves);
    assert_eq!(at(4), vec![bp(&[], &[4, 3, 2, 1])]);
    assert_eq!(at(0), vec![bp(&[], &[])]);
    assert_eq!(bp(&[1], &[]).doubled_weight(), 3);
    assert_eq!(bp(&[], &[1]).doubled_weight(), 1);
    assert_eq!(bp(&[1], &[1]).doubled_weight(), 8);
    assert!(Bipartition::new(vec![2, 2], vec![]).is_err());
}

/// 2W from the closed formula 2|π| + 2ns − n(2n−1)/2 − s(2s+1)/2, doubled.
fn weight_oracle(pi1: &[u32], pi2: &[u32]) -> i64 {
    let size: i64 = pi1.iter().chain(pi2).map(|&x| x as i64).sum();
    let (n, s) = (pi1.len() as i64, pi2.len() as i64);
    4 * size + 4 * n * s - n * (2 * n - 1) - s * (2 * s + 1)
}

#[test]
fn one_sided_weights_match_degree_formulas() {
    for n in 0..=5u32 {
        let stair: Vec<u32> = (1..=n).rev().collect();
        let t = triangular(n) as i64;
        // deg = 3n/2 + 2|π₁| − 2T_n, and for π₂ only deg = n/2 + 2|π₂| − 2T_n.
        let b1 = bp(&stair, &[]);
        assert_eq!(b1.doubled_weight() as i64, 3 * n as i64 + 4 * t - 4 * t);
        let b2 = bp(&[], &stair);
        assert_eq!(b2.doubled_weight() as i64, n as i64);
    }
}

#[test]
fn bpdi_counts_and_biranks_match_hwv_charges() {
    let bps = enumerate_bpdi(20);
    let ptdo = ptdo_counts(20);
    for d2 in 0..=20u32 {
        let mut biranks: Vec<i32> = bps.iter().filter(|b| b.doubled_weight() == d2).map(|b| b.birank()).collect();
        assert_eq!(biranks.len() as u64, ptdo[d2 as usize], "d2={d2}");
        biranks.sort_unstable();
        if d2 <= 14 {
            let mut charges = hwv_basis(Algebra::Untwisted, d2).charges.unwrap();
            charges.sort_unstable();
            assert_eq!(biranks, charges, "d2={d2}");
        }
    }
    for b in &bps {
        assert_eq!((b.doubled_weight() as i32 - b.birank()).rem_euclid(4), 0, "{b}");
    }
}

#[test]
fn odp_generating_function() {
    let g = Grading::q_dominated(&["q"], 40);
    let prod = product_eval(&g, |k| vec![(Mono::new(1, &[2 * k as i32 - 1]), 1)]).unwrap();
    for (d2, c) in odp_counts(40).iter().enumerate() {
        assert_eq!(prod.coefficient(&[d2 as i32]), common::q(*c as i64, 1), "d2={d2}");
    }
}

#[test]
fn triangular_sum_has_triangular_support() {
    let s: Series = jacobi_sum(48).unwrap();
    let support: Vec<i32> = s.terms().map(|(e, _)| e[0]).collect();
    let want: Vec<i32> = (0..).map(|m| 4 * triangular(m) as i32).take_while(|&e| e <= 48).collect();
    assert_eq!(support, want);
}

#[test]
fn crank_examples() {
    assert_eq!(crank(&[2]).unwrap(), 2);
    assert_eq!(crank(&[1, 1]).unwrap(), -2);
    assert_eq!(crank(&[]).unwrap(), 0);
    let t = crank_counts(6);
    assert_eq!((t.get(-1, 1), t.get(0, 1), t.get(1, 1)), (1, -1, 1));
    for m in -3..=3 {
        assert_eq!(t.get(m, 0), i64::from(m == 0));
    }
    assert_eq!(hwv_count_via_crank(&t, 3, 3), 1);
    assert_eq!(hwv_count_via_crank(&t, 3, -1), 1);
    let at_13: BTreeMap<i64, i64> =
        (-13..=13).map(|m| (m, hwv_count_via_crank(&crank_counts(13), 13, m))).filter(|(_, c)| *c != 0).collect();
    assert_eq!(at_13, BTreeMap::from([(13, 1), (9, 1), (5, 2), (1, 2), (-3, 1)]));
}

#[test]
fn crank_table_matches_definition() {
    let t = crank_counts(12);
    for n in 2..=12u32 {
        let mut by_crank: BTreeMap<i64, i64> = BTreeMap::new();
        for p in integer_partitions(n, |_| true) {
            *by_crank.entry(crank(&p).unwrap()).or_default() += 1;
        }
        for m in -(n as i64)..=n as i64 {
            assert_eq!(t.get(m, n), by_crank.get(&m).copied().unwrap_or(0), "N'({m},{n})");
        }
    }
}

proptest! {
    #[test]
    fn crank_is_symmetric_and_counts_partitions(n in 2u32..14) {
        let t = crank_counts(n);
        let total: i64 = (-(n as i64)..=n as i64).map(|m| t.get(m, n)).sum();
        prop_assert_eq!(total, integer_partitions(n, |_| true).len() as i64);
        for m in 0..=n as i64 {
            prop_assert_eq!(t.get(m, n), t.get(-m, n));
        }
    }

    #[test]
    fn bipartition_weight_and_birank(
        pi1 in prop::collection::btree_set(1u32..9, 0..4),
        pi2 in prop::collection::btree_set(1u32..9, 0..4),
    ) {
        let (a, b): (Vec<u32>, Vec<u32>) = (pi1.into_iter().rev().collect(), pi2.into_iter().rev().collect());
        let x = Bipartition::new(a.clone(), b.clone()).unwrap();
        prop_assert_eq!(x.birank(), b.len() as i32 - a.len() as i32);
        prop_assert_eq!(x.doubled_weight() as i64, weight_oracle(&a, &b));
        prop_assert_eq!((x.doubled_weight() as i32 - x.birank()).rem_euclid(4), 0);
    }
}
