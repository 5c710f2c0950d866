//! One check per acceptance criterion, shared by the integration tests and the acceptance runner.
//! Each returns a one-line detail on success and a reason on failure.
#![allow(dead_code)]

use std::time::Instant;

use ckp_core::dressed::{dressed_mode, hwv_from_bipartition, DressedOperator};
use ckp_core::heisenberg::{commutator_table, heis_untwisted, scaled_table, GradedOperator, Shift};
use ckp_core::hirota::{
    beta_gamma_equivalence, central_charge_probe, exp_orbit_tau, g_generator, hirota_apply, hirota_residual,
    no_solution_scan, symmetry_check, QuadraticGenerator,
};
use ckp_core::hwv::{certified_hwv_counts, hwv_basis, is_hwv, Algebra};
use ckp_core::identities::{verify_all, VerifyOptions};
use ckp_core::partitions::{crank_counts, enumerate_bpdi, hwv_count_via_crank, odp_counts, ptdo_counts};
use ckp_core::{FockMonomial, FockVector, HalfOdd, Rational, TensorVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Check = Result<String, String>;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn mono(indices: &[u32]) -> FockVector {
    FockVector::from_monomial(FockMonomial::from_doubled_indices(indices).unwrap())
}

/// Σ c·monomial with monomials as doubled indices.
pub fn combo(terms: &[(i64, i64, &[u32])]) -> FockVector {
    terms.iter().fold(FockVector::zero(), |acc, (n, d, m)| acc.add(&mono(m).scale(&q(*n, *d))))
}

fn identity_op() -> GradedOperator {
    GradedOperator::new("1", Shift::Fixed(0), Shift::Fixed(0), |v| v.clone())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

pub const MODE_DEGREE_D2: u32 = 12;

/// [χ_m,χ_n], [h^ℤ_m,h^ℤ_n], [h^t_m,h^t_n], [L^t_0,h^t_n], [L^h_0,h^ℤ_n] on degree ≤ 6.
pub fn criterion_1() -> Check {
    let d = MODE_DEGREE_D2;
    let half: Vec<i32> = (-5..=5).filter(|k: &i32| k.rem_euclid(2) == 1).collect();
    let ints: Vec<i32> = (-2..=2).collect();
    let id = identity_op();
    let mut relations = 0;
    let err = |e: ckp_core::CkpError| e.to_string();
    for &m in &half {
        for &n in &half {
            let got = commutator_table(&GradedOperator::chi(HalfOdd::of(m)), &GradedOperator::chi(HalfOdd::of(n)), d)
                .map_err(err)?;
            let c = if m + n == 0 { q(if ((m - 1) / 2).rem_euclid(2) == 0 { 1 } else { -1 }, 1) } else { q(0, 1) };
            ensure(got == scaled_table(&id, &c, d), || format!("[χ_{m}/2, χ_{n}/2]"))?;
            let ht = |k: i32| GradedOperator::h_twisted(HalfOdd::of(k));
            let got = commutator_table(&ht(m), &ht(n), d).map_err(err)?;
            let c = if m + n == 0 { q(-(m as i64), 2) } else { q(0, 1) };
            ensure(got == scaled_table(&id, &c, d), || format!("[h^t_{m}/2, h^t_{n}/2]"))?;
            relations += 2;
        }
        let ht = GradedOperator::h_twisted(HalfOdd::of(m));
        let got = commutator_table(&GradedOperator::lt0(), &ht, d).map_err(err)?;
        ensure(got == scaled_table(&ht, &q(-(m as i64), 2), d), || format!("[L^t_0, h^t_{m}/2]"))?;
        relations += 1;
    }
    let lh = [(q(0, 1), q(0, 1)), (q(1, 3), q(-2, 5))];
    for &m in &ints {
        for &n in &ints {
            let got = commutator_table(&GradedOperator::h_untwisted(m), &GradedOperator::h_untwisted(n), d).map_err(err)?;
            let c = if m + n == 0 { q(-(m as i64), 1) } else { q(0, 1) };
            ensure(got == scaled_table(&id, &c, d), || format!("[h_{m}, h_{n}]"))?;
            relations += 1;
        }
        let h = GradedOperator::h_untwisted(m);
        for (a, b) in &lh {
            let got = commutator_table(&GradedOperator::lh0(a.clone(), b.clone()), &h, d).map_err(err)?;
            ensure(got == scaled_table(&h, &q(-(m as i64), 1), d), || format!("[L^h_0({a},{b}), h_{m}]"))?;
            relations += 1;
        }
    }
    Ok(format!("{relations} relations on all monomials of degree ≤ 6"))
}

/// hwv counts against P_tdo / ODP for degree ≤ 13/2 and the charge multiset at 13/2.
pub fn criterion_2() -> Check {
    let (ptdo, odp) = (ptdo_counts(13), odp_counts(13));
    for d2 in 0..=13u32 {
        let u = hwv_basis(Algebra::Untwisted, d2).len() as u64;
        let t = hwv_basis(Algebra::Twisted, d2).len() as u64;
        ensure(u == ptdo[d2 as usize], || format!("untwisted d2={d2}: {u} vs P_tdo {}", ptdo[d2 as usize]))?;
        ensure(t == odp[d2 as usize], || format!("twisted d2={d2}: {t} vs ODP {}", odp[d2 as usize]))?;
    }
    let mut charges = hwv_basis(Algebra::Untwisted, 13).charges.unwrap();
    charges.sort_unstable_by(|a, b| b.cmp(a));
    ensure(charges == [13, 9, 5, 5, 1, 1, -3], || format!("charge multiset {charges:?}"))?;
    Ok(format!("degrees 0..13/2 match; charges at 13/2 = {charges:?}"))
}

/// Known low-degree hwv, untwisted and twisted, by doubled degree.
pub fn reference_tables() -> (Vec<Vec<FockVector>>, Vec<Vec<FockVector>>) {
    let untwisted = vec![
        vec![FockVector::vacuum()],
        vec![mono(&[1])],
        vec![mono(&[1, 1])],
        vec![mono(&[1, 1, 1]), mono(&[3])],
        vec![mono(&[1, 1, 1, 1])],
        vec![mono(&[1, 1, 1, 1, 1]), combo(&[(1, 1, &[3, 1, 1]), (2, 1, &[5])])],
        vec![mono(&[1; 6]), combo(&[(1, 1, &[3, 1, 1, 1]), (3, 1, &[5, 1])]), mono(&[3, 3])],
    ];
    let twisted = vec![
        vec![FockVector::vacuum()],
        vec![mono(&[1])],
        vec![],
        vec![combo(&[(1, 1, &[3]), (-1, 3, &[1, 1, 1])])],
        vec![combo(&[(1, 1, &[3, 1]), (-1, 6, &[1, 1, 1, 1])])],
        vec![combo(&[(1, 1, &[5]), (-1, 1, &[3, 1, 1]), (1, 10, &[1, 1, 1, 1, 1])])],
    ];
    (untwisted, twisted)
}

/// Whether `vs` and `ws` span the same space.
pub fn same_span(vs: &[FockVector], ws: &[FockVector]) -> bool {
    let mut cols: Vec<FockMonomial> = vs.iter().chain(ws).flat_map(|v| v.terms().map(|(m, _)| m.clone())).collect();
    cols.sort();
    cols.dedup();
    let coords = |v: &FockVector| cols.iter().map(|m| v.coefficient(m)).collect::<Vec<_>>();
    let r = |xs: &[FockVector]| ckp_core::field::rank(cols.len(), xs.iter().map(coords));
    let both: Vec<FockVector> = vs.iter().chain(ws).cloned().collect();
    r(vs) == vs.len() && r(ws) == ws.len() && r(&both) == vs.len() && vs.len() == ws.len()
}

pub fn criterion_3() -> Check {
    let (untwisted, twisted) = reference_tables();
    for (alg, table) in [(Algebra::Untwisted, &untwisted), (Algebra::Twisted, &twisted)] {
        for (d2, row) in table.iter().enumerate() {
            let basis = hwv_basis(alg, d2 as u32);
            ensure(row.iter().all(|v| is_hwv(alg, v)), || format!("{alg:?} d2={d2}: reference vector is not hwv"))?;
            ensure(same_span(row, &basis.vectors), || format!("{alg:?} d2={d2}: span differs"))?;
            if alg == Algebra::Untwisted {
                // Each reference vector is the unique basis vector of its charge, up to scale.
                for v in row {
                    let c = v.homogeneous_charge().unwrap();
                    let i = basis.charges.as_ref().unwrap().iter().position(|&x| x == c).unwrap();
                    ensure(v.ratio_to(&basis.vectors[i]).is_some(), || format!("d2={d2} charge {c}: not proportional"))?;
                }
            } else if let [v] = row.as_slice() {
                ensure(v.ratio_to(&basis.vectors[0]).is_some(), || format!("twisted d2={d2}: not proportional"))?;
            }
        }
    }
    Ok("untwisted degrees ≤ 3 and twisted degrees ≤ 5/2 reproduced".to_string())
}

/// ½(h_{−1}² − h_{−2})|0⟩ − h_{−1}χ_{−3/2}χ_{−1/2}|0⟩ + χ_{−7/2}χ_{−1/2}|0⟩.
pub fn v40_from_modes() -> FockVector {
    let vac = FockVector::vacuum();
    let h11 = heis_untwisted(-1, &heis_untwisted(-1, &vac));
    let h2 = heis_untwisted(-2, &vac);
    h11.sub(&h2).scale(&q(1, 2)).sub(&heis_untwisted(-1, &mono(&[3, 1]))).add(&mono(&[7, 1]))
}

/// A closed form for v_{4;0} with a χ_{−5/2}² term in place of χ_{−5/2}χ_{−3/2}.
pub fn v40_misprint() -> FockVector {
    combo(&[(1, 1, &[3, 3, 1, 1]), (-2, 1, &[7, 1]), (2, 1, &[5, 5])])
}

pub fn criterion_4() -> Check {
    let vac = FockVector::vacuum();
    let beta = |k: i32, v: &FockVector| dressed_mode(DressedOperator::beta(k), v);
    let gamma = |k: i32, v: &FockVector| dressed_mode(DressedOperator::gamma(k), v);
    ensure(beta(-1, &vac) == mono(&[3]), || "H^β_(−1)|0⟩".into())?;
    ensure(beta(-2, &vac) == combo(&[(2, 1, &[7]), (-1, 1, &[3, 3, 1])]), || "H^β_(−2)|0⟩".into())?;
    let g1 = gamma(-1, &vac);
    ensure(g1 == mono(&[1]), || "H^γ_(−1)|0⟩".into())?;
    ensure(beta(1, &g1) == vac, || "H^β_(1)H^γ_(−1)|0⟩".into())?;
    ensure(beta(0, &g1).is_zero() && beta(0, &vac).is_zero(), || "H^β_(0) does not annihilate".into())?;
    let v40 = beta(-1, &g1);
    ensure(v40 == v40_from_modes(), || format!("v_4;0 = {v40}"))?;
    ensure(is_hwv(Algebra::Untwisted, &v40), || "v_4;0 is not hwv".into())?;
    ensure(v40.homogeneous_charge() == Some(0) && v40.homogeneous_doubled_degree() == Some(8), || "v_4;0 grading".into())?;
    // The χ_{−5/2}² term has degree 5, so this form cannot be a degree-4 vector.
    ensure(v40_misprint().homogeneous_doubled_degree().is_none(), || "closed form unexpectedly homogeneous".into())?;
    let bps = enumerate_bpdi(16);
    for bp in &bps {
        let v = hwv_from_bipartition(bp);
        ensure(!v.is_zero() && is_hwv(Algebra::Untwisted, &v), || format!("{bp}: not a nonzero hwv"))?;
        ensure(v.homogeneous_charge() == Some(bp.birank()), || format!("{bp}: charge ≠ birank"))?;
        ensure(v.homogeneous_doubled_degree() == Some(bp.doubled_weight()), || format!("{bp}: degree ≠ W"))?;
    }
    Ok(format!(
        "dressed facts hold; v_4;0 = {v40} (= −½ × closed form with χ_{{-5/2}}² read as χ_{{-5/2}}χ_{{-3/2}}); {} bipartitions with W ≤ 8",
        bps.len()
    ))
}

pub fn criterion_5() -> Check {
    let start = Instant::now();
    let reports = verify_all(VerifyOptions { order: 40, guard: 8 }).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    for r in &reports {
        ensure(r.pass, || format!("{} fails: {:?}", r.name, r.witness))?;
        ensure(r.stability == Some((48, true)), || format!("{} unstable at order 48", r.name))?;
    }
    ensure(secs <= 300.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{} identities pass at u-order 40, stable at 48, {secs:.1}s", reports.len()))
}

pub fn orbit_generators(seed: u64) -> Vec<QuadraticGenerator> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..20).map(|_| QuadraticGenerator::random(&mut rng, 2, 5)).collect()
}

pub fn criterion_6() -> Check {
    let vac = FockVector::vacuum();
    ensure(hirota_apply(&TensorVector::tensor(&vac, &vac)).is_zero(), || "S^C(|0⟩⊗|0⟩) ≠ 0".into())?;
    let scan = no_solution_scan(12, 100, 2024);
    ensure(scan.pass(), || format!("scan falsified: {:?}", scan.falsifications))?;
    let idx: Vec<i32> = (-5..=5).filter(|k: &i32| k.rem_euclid(2) == 1).collect();
    for &a in &idx {
        for &b in &idx {
            ensure(symmetry_check(HalfOdd::of(a), HalfOdd::of(b), 6), || format!("symmetry ({a}/2, {b}/2)"))?;
        }
    }
    let bg = beta_gamma_equivalence(6);
    ensure(bg.pass, || "β/γ residue differs from S^C".into())?;
    let gens = orbit_generators(7);
    let mut nontrivial = 0;
    for (i, g) in gens.iter().enumerate() {
        let tau = exp_orbit_tau(g, 12).map_err(|e| e.to_string())?;
        nontrivial += usize::from(tau.len() > 1);
        ensure(hirota_residual(&tau, 12).is_zero(), || format!("generator {i}: residual ≠ 0"))?;
    }
    ensure(nontrivial * 2 > gens.len(), || format!("only {nontrivial} nontrivial orbits"))?;
    Ok(format!(
        "vacuum solves; {} monomials + {} combinations rejected; {} symmetry pairs; β/γ scalar {}; {} orbits ({nontrivial} nontrivial) with zero residual",
        scan.monomials_checked,
        scan.combinations_checked,
        idx.len() * idx.len(),
        bg.scalar.unwrap_or_default(),
        gens.len()
    ))
}

pub fn criterion_7() -> Check {
    let counts = certified_hwv_counts(Algebra::Untwisted, 13).map_err(|e| e.to_string())?;
    let table = crank_counts(13);
    let mut compared = 0;
    for d2 in 0..=13u32 {
        for m in -13..=13i64 {
            let solver = counts.get(&(d2, m as i32)).copied().unwrap_or(0) as i64;
            let crank = hwv_count_via_crank(&table, d2, m);
            ensure(solver == crank, || format!("d2={d2} charge {m}: solver {solver} vs crank {crank}"))?;
            compared += 1;
        }
        let basis = hwv_basis(Algebra::Untwisted, d2);
        for c in basis.charges.unwrap() {
            ensure((d2 as i32 - c).rem_euclid(4) == 0, || format!("d2={d2} charge {c} breaks 2deg ≡ chg mod 4"))?;
        }
    }
    Ok(format!("{compared} (degree, charge) cells agree; congruence holds"))
}

pub fn central_pairs() -> Vec<((i64, i64), (i64, i64))> {
    vec![((0, 1), (1, 0)), ((-1, 2), (2, -1)), ((0, 2), (2, 0)), ((1, 3), (3, 1)), ((1, 1), (0, 0)), ((0, 1), (0, 1))]
}

pub fn criterion_8() -> Check {
    let minus = q(-1, 2);
    let plus = q(1, 2);
    let mut nonzero = 0;
    for ((i, j), (k, l)) in central_pairs() {
        let (x, y) = (g_generator(i, j), g_generator(k, l));
        let p = central_charge_probe(&x, &y, 8, &minus).map_err(|e| e.to_string())?;
        ensure(p.pass, || format!("G_{i}{j}, G_{k}{l}: residual {} vs cocycle {}", p.residual, p.cocycle))?;
        if p.cocycle != "0" {
            nonzero += 1;
            let m = central_charge_probe(&x, &y, 8, &plus).map_err(|e| e.to_string())?;
            ensure(!m.pass, || format!("G_{i}{j}, G_{k}{l}: +1/2 mutation passes"))?;
        }
    }
    ensure(nonzero > 0, || "no probe with nonzero cocycle".into())?;
    Ok(format!("{} pairs give cocycle × (−1/2); +1/2 rejected on {nonzero} nonzero-cocycle pairs", central_pairs().len()))
}
