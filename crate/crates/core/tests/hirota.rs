mod common;

use ckp_core::fock::monomials_up_to;
use ckp_core::hirota::{
    beta_gamma_equivalence, central_charge_probe, exp_orbit_tau, g_generator, hirota_apply, hirota_nonzero,
    hirota_residual, no_solution_scan, symmetry_check, QuadraticGenerator,
};
use ckp_core::{CkpError, FockMonomial, FockVector, HalfOdd, TensorVector};
use common::{mono, q};
use proptest::prelude::*;

fn swap(w: &TensorVector) -> TensorVector {
    let mut out = TensorVector::zero();
    for ((l, r), c) in w.terms() {
        out.add_term(r.clone(), l.clone(), c.clone());
    }
    out
}

fn square(v: &FockVector) -> TensorVector {
    TensorVector::tensor(v, v)
}

#[test]
fn apply_examples() {
    let vac = FockVector::vacuum();
    assert!(hirota_apply(&square(&vac)).is_zero());
    let s = hirota_apply(&square(&mono(&[1])));
    let (v, two) = (FockMonomial::vacuum(), FockMonomial::from_doubled_indices(&[1, 1]).unwrap());
    assert_eq!(s.coefficient(&v, &two), q(1, 1));
    assert_eq!(s.coefficient(&two, &v), q(-1, 1));
    assert_eq!(s.len(), 2);
}

#[test]
fn scan_examples() {
    assert!(hirota_nonzero(&mono(&[3])));
    assert!(!hirota_nonzero(&FockVector::vacuum()));
    assert!(hirota_nonzero(&mono(&[1]).add(&FockVector::vacuum())));
    let r = no_solution_scan(8, 20, 1);
    assert!(r.pass() && r.vacuum_is_solution, "{:?}", r.falsifications);
    assert_eq!(r.monomials_checked, monomials_up_to(8).len() - 1);
}

#[test]
fn scan_is_deterministic() {
    assert_eq!(no_solution_scan(6, 10, 42), no_solution_scan(6, 10, 42));
}

#[test]
fn symmetry_examples() {
    assert!(symmetry_check(HalfOdd::of(-1), HalfOdd::of(-1), 4));
    assert!(symmetry_check(HalfOdd::of(1), HalfOdd::of(-3), 4));
}

#[test]
fn beta_gamma_on_small_tensors() {
    let r = beta_gamma_equivalence(6);
    assert!(r.pass);
    assert_eq!(r.scalar.as_deref(), Some("1"));
    assert!(r.probes > 100);
}

#[test]
fn orbit_examples() {
    let zero = QuadraticGenerator::new([]).unwrap();
    assert_eq!(exp_orbit_tau(&zero, 10).unwrap(), FockVector::vacuum());
    let single = QuadraticGenerator::new([((-1, -3), q(2, 3))]).unwrap();
    let tau = exp_orbit_tau(&single, 16).unwrap();
    assert!(tau.len() > 1);
    assert!(hirota_residual(&tau, 16).is_zero());
    let lowering = QuadraticGenerator::new([((1, -1), q(1, 1))]).unwrap();
    assert!(matches!(exp_orbit_tau(&lowering, 6), Err(CkpError::NotDegreeRaising(..))));
}

#[test]
fn orbit_residual_vanishes_only_on_the_exact_window() {
    // Beyond total degree D the truncated τ is missing terms, and the residual shows it.
    let g = QuadraticGenerator::new([((-1, -3), q(1, 1)), ((-5, 1), q(-1, 2))]).unwrap();
    let tau = exp_orbit_tau(&g, 8).unwrap();
    assert!(hirota_residual(&tau, 8).is_zero());
    assert!(!hirota_residual(&tau, 16).is_zero());
}

#[test]
fn seeded_orbits() {
    for g in common::orbit_generators(7) {
        assert!(hirota_residual(&exp_orbit_tau(&g, 12).unwrap(), 12).is_zero());
    }
}

#[test]
fn central_probe_examples() {
    let (minus, plus) = (q(-1, 2), q(1, 2));
    let p = central_charge_probe(&g_generator(0, 1), &g_generator(1, 0), 8, &minus).unwrap();
    assert_eq!((p.cocycle.as_str(), p.residual.as_str(), p.pass), ("-4", "2", true));
    assert!(!central_charge_probe(&g_generator(0, 1), &g_generator(1, 0), 8, &plus).unwrap().pass);
    let far = central_charge_probe(&g_generator(3, 4), &g_generator(0, 1), 8, &minus).unwrap();
    assert_eq!((far.cocycle.as_str(), far.residual.as_str(), far.pass), ("0", "0", true));
}

fn arb_vector() -> impl Strategy<Value = FockVector> {
    let m = prop::collection::vec(prop::sample::select(vec![1u32, 3, 5]), 0..4)
        .prop_map(|ix| FockMonomial::from_doubled_indices(&ix).unwrap());
    prop::collection::vec((m, -4i64..=4, 1i64..=3), 1..5)
        .prop_map(|ts| FockVector::from_terms(ts.into_iter().map(|(m, n, d)| (m, q(n, d)))))
}

proptest! {
    #[test]
    fn swap_anticommutes(v in arb_vector(), w in arb_vector()) {
        let t = TensorVector::tensor(&v, &w);
        prop_assert_eq!(swap(&hirota_apply(&t)), hirota_apply(&swap(&t)).scale(&q(-1, 1)));
    }

    #[test]
    fn residual_depends_only_on_low_degrees(v in arb_vector(), extra in arb_vector(), d in 0u32..8) {
        // Terms of τ above degree D cannot reach total degree ≤ D.
        let shifted = extra.terms().fold(FockVector::zero(), |acc, (m, c)| {
            let high = FockMonomial::from_doubled_indices(&[&m.expanded()[..], &[2 * d + 1]].concat()).unwrap();
            acc.add(&FockVector::from_terms([(high, c.clone())]))
        });
        let tau = v.add(&shifted);
        let full = hirota_apply(&square(&tau)).filtered(|a, b| a + b <= d);
        prop_assert_eq!(hirota_residual(&tau, d), full.clone());
        prop_assert_eq!(hirota_residual(&tau.truncated(d), d), full);
    }
}
