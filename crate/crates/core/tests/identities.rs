mod common;

use ckp_core::hwv::{hwv_basis, Algebra};
use ckp_core::identities::{
    char_fock_bruteforce, char_fock_product, char_hwv, char_hwv_bpdi, char_triple, char_twisted_trace,
    char_twisted_trace_eigen, identity_r_product, identity_r_sums, jacobi_product, jacobi_sum, verify_identity,
    VerifyOptions, REGISTRY,
};
use ckp_core::series::Series;
use ckp_core::CkpError;
use common::q;

fn coeff(s: &Series, e: &[i32]) -> ckp_core::Rational {
    s.coefficient(e)
}

#[test]
fn fock_character_examples() {
    let s = char_fock_bruteforce(6).unwrap();
    assert_eq!(coeff(&s, &[0, 0]), q(1, 1));
    assert_eq!(coeff(&s, &[1, 2]), q(1, 1));
    assert_eq!(coeff(&s, &[3, 6]), q(1, 1));
    assert_eq!(coeff(&s, &[3, -2]), q(1, 1));
    assert_eq!(s.terms().filter(|(e, _)| e[0] == 3).count(), 2);
    let p = char_fock_product(1).unwrap();
    assert_eq!(coeff(&p, &[1, 2]), q(1, 1));
    assert_eq!(char_fock_bruteforce(1).unwrap(), p);
}

#[test]
fn hwv_character_examples() {
    let s = char_hwv(6).unwrap();
    assert_eq!(coeff(&s, &[3, 6]), q(1, 1));
    assert_eq!(coeff(&s, &[3, -2]), q(1, 1));
    assert!(s.all_integer_coefficients() && s.all_nonnegative());
}

#[test]
fn hwv_character_from_exact_bases_matches_bipartitions() {
    let n = 14;
    let mut direct = Series::zero(char_hwv_bpdi(n).unwrap().grading());
    for d2 in 0..=n {
        for c in hwv_basis(Algebra::Untwisted, d2).charges.unwrap() {
            direct.add_term([d2 as i32, 2 * c, 0, 0], q(1, 1)).unwrap();
        }
    }
    assert_eq!(direct, char_hwv_bpdi(n).unwrap());
    assert_eq!(direct, char_hwv(n).unwrap());
}

#[test]
fn twisted_trace_at_degree_one() {
    for s in [char_twisted_trace(6).unwrap(), char_twisted_trace_eigen(6).unwrap()] {
        assert_eq!(coeff(&s, &[2, 1]), q(1, 1));
        assert_eq!(coeff(&s, &[2, 0]), q(0, 1));
        assert!(s.all_integer_coefficients());
    }
}

#[test]
fn triple_character_forgets_to_fock_character() {
    let n = 20;
    let t = char_triple(n).unwrap();
    let mut forgot = Series::zero(char_fock_bruteforce(n).unwrap().grading());
    for (e, c) in t.terms() {
        forgot.add_term([e[0], e[1], 0, 0], c.clone()).unwrap();
    }
    assert_eq!(forgot, char_fock_bruteforce(n).unwrap());
}

#[test]
fn identity_r_is_even() {
    for s in [identity_r_sums(4).unwrap(), identity_r_product(4).unwrap()] {
        assert!(s.exponents_divisible(0, 2), "q exponents not integral: {:?}", s.sorted_terms());
        assert!(s.exponents_divisible(1, 4), "z exponents not even: {:?}", s.sorted_terms());
    }
    assert_eq!(identity_r_sums(4).unwrap(), identity_r_product(4).unwrap());
}

#[test]
fn jacobi_at_24() {
    assert_eq!(jacobi_sum(24).unwrap(), jacobi_product(24).unwrap());
    let r = verify_identity("jacobi_triangular", VerifyOptions { order: 24, guard: 0 }).unwrap();
    assert!(r.pass && r.witness.is_none());
}

#[test]
fn every_identity_passes_and_is_stable() {
    for name in REGISTRY {
        let r = verify_identity(name, VerifyOptions { order: 20, guard: 4 }).unwrap();
        assert!(r.pass, "{name}: {:?}", r.witness);
        assert!(r.checks.iter().all(|c| c.pass));
        assert_eq!(r.stability, Some((24, true)), "{name}");
    }
}

#[test]
fn registry_errors() {
    assert!(matches!(verify_identity("nope", VerifyOptions::default()), Err(CkpError::UnknownIdentity(_))));
    let r = verify_identity("dim_q", VerifyOptions { order: 8, guard: 0 }).unwrap();
    assert_eq!(r.stability, None);
}
