mod common;

use ckp_core::series::{pochhammer, product_eval, sum_eval, Grading, Mono, Series};
use ckp_core::CkpError;
use common::q;
use proptest::prelude::*;

#[test]
fn geometric_inverse() {
    let g = Grading::q_dominated(&["u"], 3);
    let one_minus_u = Series::one(&g).sub(&Series::monomial(&g, &Mono::new(1, &[1])).unwrap()).unwrap();
    let inv = one_minus_u.inverse().unwrap();
    let want: Vec<(i32, i64)> = (0..=3).map(|k| (k, 1)).collect();
    let got: Vec<(i32, i64)> = inv.sorted_terms().iter().map(|(e, c)| (e[0], c.to_integer().try_into().unwrap())).collect();
    assert_eq!(got, want);
    let non_unit = Series::monomial(&g, &Mono::new(1, &[1])).unwrap();
    assert!(matches!(non_unit.inverse(), Err(CkpError::NonUnitConstant)));
}

#[test]
fn half_odd_product_counts_monomials() {
    let g = Grading::q_dominated(&["q"], 4);
    let s = product_eval(&g, |k| vec![(Mono::new(-1, &[2 * k as i32 - 1]), -1)]).unwrap();
    let coeffs: Vec<Rational> = (0..=4).map(|e| s.coefficient(&[e])).collect();
    assert_eq!(coeffs, vec![q(1, 1), q(1, 1), q(1, 1), q(2, 1), q(2, 1)]);
}

type Rational = ckp_core::Rational;

#[test]
fn triangular_product_sparsity() {
    let g = Grading::q_dominated(&["q"], 24);
    let s = product_eval(&g, |i| {
        let i = i as i32;
        vec![(Mono::new(-1, &[8 * i]), 1), (Mono::new(1, &[4 * i]), 1)]
    })
    .unwrap();
    for e in 0..=24 {
        let want = i64::from([0, 4, 12, 24].contains(&e));
        assert_eq!(s.coefficient(&[e]), q(want, 1), "doubled q^{e}");
    }
}

#[test]
fn product_eval_rejects_stalled_factors() {
    let g = Grading::q_dominated(&["q"], 10);
    let r = product_eval(&g, |_| vec![(Mono::new(-1, &[2]), -1)]);
    assert!(matches!(r, Err(CkpError::NonIncreasingValuation)));
}

#[test]
fn sum_eval_matches_product() {
    // Σ_k q^{k(k+1)/2}/(q;q)_k = ∏(1 + q^k), Euler.
    let g = Grading::q_dominated(&["q"], 40);
    let step = Mono::new(1, &[2]);
    let sum = sum_eval(&g, |k| {
        let val = (k * (k + 1)) as i64;
        let mut t = Series::monomial(&g, &Mono::new(1, &[val as i32]))?;
        for j in 1..=k {
            t = t.div_binomial(&Mono::new(-1, &[2 * j as i32]))?;
        }
        Ok((val, Some(t)))
    })
    .unwrap();
    let prod = pochhammer(&g, &Mono::new(-1, &[2]), &step).unwrap();
    assert_eq!(sum, prod);
}

#[test]
fn first_mismatch_is_smallest() {
    let g = Grading::q_dominated(&["q", "z"], 10);
    let mut a = Series::zero(&g);
    let mut b = Series::zero(&g);
    a.add_term([6, 2, 0, 0], q(1, 1)).unwrap();
    a.add_term([2, -2, 0, 0], q(3, 1)).unwrap();
    b.add_term([2, -2, 0, 0], q(5, 2)).unwrap();
    let m = a.first_mismatch(&b).unwrap();
    assert_eq!(m.exps, vec![2, -2]);
    assert_eq!((m.left, m.right), (q(3, 1), q(5, 2)));
}

fn grading() -> std::sync::Arc<Grading> {
    Grading::q_dominated(&["q", "z"], 16)
}

fn arb_series() -> impl Strategy<Value = Series> {
    prop::collection::vec((0i32..=16, -6i32..=6, -9i64..=9, 1i64..=9), 0..12).prop_map(|ts| {
        let g = grading();
        let mut s = Series::zero(&g);
        for (e, z, n, d) in ts {
            s.add_term([e, z, 0, 0], q(n, d)).unwrap();
        }
        s
    })
}

proptest! {
    #[test]
    fn json_round_trip(s in arb_series()) {
        let back = Series::from_json(&grading(), &s.to_json()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn binomial_division_inverts_multiplication(s in arb_series(), e in 1i32..6, z in -3i32..=3, c in -3i64..=3) {
        prop_assume!(c != 0);
        let m = Mono::new(c, &[e, z]);
        prop_assert_eq!(s.mul_binomial(&m).unwrap().div_binomial(&m).unwrap(), s.clone());
    }

    #[test]
    fn multiplication_commutes_and_distributes(a in arb_series(), b in arb_series(), c in arb_series()) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn unit_inverse(a in arb_series()) {
        let mut u = Series::one(&grading());
        for (e, c) in a.terms().filter(|(e, _)| e[0] > 0) {
            u.add_term(*e, c.clone()).unwrap();
        }
        prop_assert_eq!(u.mul(&u.inverse().unwrap()).unwrap(), Series::one(&grading()));
    }
}
