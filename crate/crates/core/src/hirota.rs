//! The Hirota operator S^C = Σ_n (−1)^{n−1/2} χ_n ⊗ χ_{−n} on F ⊗ F, the symmetry it
//! commutes with, and exponential-orbit solutions.
//!
//! S^C preserves the total degree of a tensor, so the (d₁, d₂) component of S^C(τ⊗τ)
//! only involves the components of τ of degree ≤ d₁ + d₂.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CkpError, Result};
use crate::fock::{
    apply_normal_pair, mode_on_monomial, mode_sign, monomials_of_degree, monomials_up_to, normal_pair_on_monomial,
    FockMonomial, FockVector, HalfOdd, TensorVector,
};
use crate::half::fmt_doubled;
use crate::heisenberg::{commutator_table_in_window, operator_table, GradedOperator, Shift};
use crate::Rational;

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Applies Σ c·χ_l ⊗ χ_r over the listed (c, l, r) with doubled indices.
fn apply_mode_pairs(pairs: &[(i64, i32, i32)], w: &TensorVector) -> TensorVector {
    let mut out = TensorVector::zero();
    for ((l, r), x) in w.terms() {
        for &(c, a, b) in pairs {
            let (Some((l2, ca)), Some((r2, cb))) =
                (mode_on_monomial(HalfOdd::of(a), l), mode_on_monomial(HalfOdd::of(b), r))
            else {
                continue;
            };
            out.add_term(l2, r2, x * int(c * ca * cb));
        }
    }
    out
}

/// S^C applied to a finite tensor. Only modes χ_n with χ_{|n|} present in one factor contribute.
pub fn hirota_apply(w: &TensorVector) -> TensorVector {
    let mut out = TensorVector::zero();
    for ((l, r), x) in w.terms() {
        // n > 0 annihilates in the left factor; n < 0 annihilates χ_{−n} in the right factor.
        let modes = l.parts().iter().map(|&(j, _)| j as i32).chain(r.parts().iter().map(|&(j, _)| -(j as i32)));
        for n in modes {
            let (Some((l2, ca)), Some((r2, cb))) =
                (mode_on_monomial(HalfOdd::of(n), l), mode_on_monomial(HalfOdd::of(-n), r))
            else {
                continue;
            };
            out.add_term(l2, r2, x * int(mode_sign(n) * ca * cb));
        }
    }
    out
}

fn homogeneous_parts(v: &FockVector) -> BTreeMap<u32, FockVector> {
    let mut parts: BTreeMap<u32, FockVector> = BTreeMap::new();
    for (m, c) in v.terms() {
        parts.entry(m.doubled_degree()).or_default().add_term(m.clone(), c.clone());
    }
    parts
}

/// S^C(τ⊗τ) restricted to doubled total degree ≤ `max_total_d2`; uses only τ up to that degree.
pub fn hirota_residual(tau: &FockVector, max_total_d2: u32) -> TensorVector {
    let parts = homogeneous_parts(tau);
    let mut out = TensorVector::zero();
    for (&a, va) in &parts {
        for (&b, vb) in &parts {
            if a + b <= max_total_d2 {
                out.add_scaled(&hirota_apply(&TensorVector::tensor(va, vb)), &Rational::one());
            }
        }
    }
    out
}

/// Whether S^C(v⊗v) ≠ 0, found by computing total-degree components from the top down.
pub fn hirota_nonzero(v: &FockVector) -> bool {
    let parts: Vec<(u32, FockVector)> = homogeneous_parts(v).into_iter().collect();
    let mut totals: Vec<u32> = parts.iter().flat_map(|(a, _)| parts.iter().map(move |(b, _)| a + b)).collect();
    totals.sort_unstable_by(|x, y| y.cmp(x));
    totals.dedup();
    totals.into_iter().any(|t| {
        let mut comp = TensorVector::zero();
        for (a, va) in &parts {
            for (b, vb) in &parts {
                if a + b == t {
                    comp.add_scaled(&hirota_apply(&TensorVector::tensor(va, vb)), &Rational::one());
                }
            }
        }
        !comp.is_zero()
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub max_doubled_degree: u32,
    pub vacuum_is_solution: bool,
    pub monomials_checked: usize,
    pub combinations_checked: usize,
    /// Nonvacuum vectors found with S^C(v⊗v) = 0; always empty if the theory holds.
    pub falsifications: Vec<String>,
}

impl ScanReport {
    pub fn pass(&self) -> bool {
        self.vacuum_is_solution && self.falsifications.is_empty()
    }
}

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(BigInt::from(rng.gen_range(-9i64..=9)), BigInt::from(rng.gen_range(1i64..=9)))
}

/// Random vector supported on degrees ≤ `d2` with a nonzero component at degree `d2`.
fn random_combination(rng: &mut ChaCha8Rng, d2: u32) -> FockVector {
    let mut v = FockVector::zero();
    for m in monomials_up_to(d2) {
        v.add_term(m, small_rational(rng));
    }
    let top = monomials_of_degree(d2);
    if v.terms().all(|(m, _)| m.doubled_degree() != d2) {
        let k = rng.gen_range(0..top.len());
        let mut c = small_rational(rng);
        if c.is_zero() {
            c = Rational::one();
        }
        v.add_term(top[k].clone(), c);
    }
    v
}

/// Checks that no nonvacuum monomial or random combination of degree ≤ `max_d2`/2 solves S^C(v⊗v) = 0.
pub fn no_solution_scan(max_d2: u32, trials: usize, seed: u64) -> ScanReport {
    let vac = FockVector::vacuum();
    let vacuum_is_solution = hirota_apply(&TensorVector::tensor(&vac, &vac)).is_zero();
    let monomials: Vec<FockVector> =
        monomials_up_to(max_d2).into_iter().filter(|m| !m.is_vacuum()).map(FockVector::from_monomial).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let combos: Vec<FockVector> =
        (1..=max_d2).flat_map(|d2| (0..trials).map(move |_| d2)).map(|d2| random_combination(&mut rng, d2)).collect();
    let falsifications: Vec<String> = monomials
        .par_iter()
        .chain(combos.par_iter())
        .filter(|v| !hirota_nonzero(v))
        .map(|v| v.to_string())
        .collect();
    ScanReport {
        max_doubled_degree: max_d2,
        vacuum_is_solution,
        monomials_checked: monomials.len(),
        combinations_checked: combos.len(),
        falsifications,
    }
}

fn tensor_basis(max_d2: u32) -> Vec<(FockMonomial, FockMonomial)> {
    let ms = monomials_up_to(max_d2);
    ms.iter().flat_map(|l| ms.iter().map(move |r| (l.clone(), r.clone()))).collect()
}

fn basis_tensor(l: &FockMonomial, r: &FockMonomial) -> TensorVector {
    let mut w = TensorVector::zero();
    w.add_term(l.clone(), r.clone(), Rational::one());
    w
}

/// (E ⊗ 1 + 1 ⊗ E) for E = −:χ_a χ_b:.
fn symmetry_apply(a: HalfOdd, b: HalfOdd, w: &TensorVector) -> TensorVector {
    let e = |m: &FockMonomial| normal_pair_on_monomial(a, b, m);
    let id = |m: &FockMonomial| Some((m.clone(), 1));
    let minus = -Rational::one();
    let mut out = w.apply_pair(&minus, e, id);
    out.add_scaled(&w.apply_pair(&minus, id, e), &Rational::one());
    out
}

/// Whether [E ⊗ 1 + 1 ⊗ E, S^C] vanishes on every basis tensor of bidegree ≤ (D, D), E = −:χ_a χ_b:.
pub fn symmetry_check(a: HalfOdd, b: HalfOdd, max_d2: u32) -> bool {
    tensor_basis(max_d2).par_iter().all(|(l, r)| {
        let w = basis_tensor(l, r);
        let lhs = symmetry_apply(a, b, &hirota_apply(&w));
        let rhs = hirota_apply(&symmetry_apply(a, b, &w));
        lhs == rhs
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub pass: bool,
    /// λ with Res = λ·S^C on every probed tensor.
    pub scalar: Option<String>,
    pub probes: usize,
}

/// Mode pairs of Res_w(β(w)⊗γ(w) − γ(w)⊗β(w)) acting on bidegree ≤ (D, D), from the field
/// expansions β(w) = Σ_{2a≡1 (4)} χ_a w^{−(2a+3)/4} and γ(w) = Σ_{2a≡3 (4)} χ_a w^{−(2a+1)/4}.
fn residue_pairs(max_d2: u32) -> Vec<(i64, i32, i32)> {
    let k = max_d2 as i32 + 1;
    let beta: Vec<(i32, i32)> = (-k..=k).filter(|a| a.rem_euclid(4) == 1).map(|a| (a, -(a + 3))).collect();
    let gamma: Vec<(i32, i32)> = (-k..=k).filter(|a| a.rem_euclid(4) == 3).map(|a| (a, -(a + 1))).collect();
    let mut pairs = Vec::new();
    // Exponents are stored times 4; the residue collects total exponent −4.
    for &(a, ea) in &beta {
        for &(b, eb) in &gamma {
            if ea + eb == -4 {
                pairs.push((1, a, b));
                pairs.push((-1, b, a));
            }
        }
    }
    pairs
}

/// Compares the β/γ residue operator with S^C on all basis tensors of bidegree ≤ (D, D).
pub fn beta_gamma_equivalence(max_d2: u32) -> EquivalenceReport {
    let pairs = residue_pairs(max_d2);
    let basis = tensor_basis(max_d2);
    let mut scalar: Option<Rational> = None;
    let mut pass = true;
    for (l, r) in &basis {
        let w = basis_tensor(l, r);
        let s = hirota_apply(&w);
        let res = apply_mode_pairs(&pairs, &w);
        let Some(((lm, rm), c)) = s.terms().next() else {
            pass &= res.is_zero();
            continue;
        };
        let lambda = res.coefficient(lm, rm) / c;
        if lambda.is_zero() || res != s.scale(&lambda) || scalar.as_ref().is_some_and(|x| *x != lambda) {
            pass = false;
        }
        scalar.get_or_insert(lambda);
    }
    EquivalenceReport { pass: pass && scalar.is_some(), scalar: scalar.map(|x| x.to_string()), probes: basis.len() }
}

/// −Σ c_{mn} :χ_m χ_n: with doubled indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QuadraticGenerator {
    coeffs: BTreeMap<(i32, i32), Rational>,
}

impl QuadraticGenerator {
    pub fn new(coeffs: impl IntoIterator<Item = ((i32, i32), Rational)>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for ((m, n), c) in coeffs {
            HalfOdd::new(m)?;
            HalfOdd::new(n)?;
            if !c.is_zero() {
                *out.entry((m, n)).or_insert_with(Rational::zero) += c;
            }
        }
        out.retain(|_, c: &mut Rational| !c.is_zero());
        Ok(QuadraticGenerator { coeffs: out })
    }

    /// `terms` random pairs with doubled indices in [−max_index, max_index] and m + n < 0.
    pub fn random(rng: &mut ChaCha8Rng, terms: usize, max_index: i32) -> Self {
        let mut coeffs = Vec::new();
        while coeffs.len() < terms {
            let pick = |rng: &mut ChaCha8Rng| 2 * rng.gen_range(-(max_index + 1) / 2..=(max_index - 1) / 2) + 1;
            let (m, n) = (pick(rng), pick(rng));
            let c = small_rational(rng);
            if m + n < 0 && !c.is_zero() {
                coeffs.push(((m, n), c));
            }
        }
        QuadraticGenerator::new(coeffs).expect("odd indices by construction")
    }

    pub fn coeffs(&self) -> &BTreeMap<(i32, i32), Rational> {
        &self.coeffs
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        let mut out = FockVector::zero();
        for (&(m, n), c) in &self.coeffs {
            out.add_scaled(&apply_normal_pair(HalfOdd::of(m), HalfOdd::of(n), v), &-c.clone());
        }
        out
    }
}

/// exp(g)|0⟩ truncated to doubled degree ≤ `max_d2`. Every pair must raise the degree (m + n < 0),
/// which makes the truncation exact.
pub fn exp_orbit_tau(g: &QuadraticGenerator, max_d2: u32) -> Result<FockVector> {
    if let Some(&(m, n)) = g.coeffs.keys().find(|(m, n)| m + n >= 0) {
        return Err(CkpError::NotDegreeRaising(fmt_doubled(m as i64), fmt_doubled(n as i64)));
    }
    let mut tau = FockVector::vacuum();
    let mut term = FockVector::vacuum();
    for k in 1.. {
        term = g.apply(&term).truncated(max_d2).scale(&Rational::new(BigInt::one(), BigInt::from(k)));
        if term.is_zero() {
            break;
        }
        tau = tau.add(&term);
    }
    Ok(tau)
}

/// Finitely supported matrix over ℤ × ℤ.
pub type CMatrix = BTreeMap<(i64, i64), Rational>;

/// G_ij = (−1)^j E_ij − (−1)^i E_{1−j,1−i}.
pub fn g_generator(i: i64, j: i64) -> CMatrix {
    let sign = |k: i64| if k.rem_euclid(2) == 0 { int(1) } else { int(-1) };
    let mut m = CMatrix::new();
    let mut put = |k: (i64, i64), c: Rational| {
        let e = m.entry(k).or_insert_with(Rational::zero);
        *e += c;
    };
    put((i, j), sign(j));
    put((1 - j, 1 - i), -sign(i));
    m.retain(|_, c| !c.is_zero());
    m
}

pub fn matrix_bracket(x: &CMatrix, y: &CMatrix) -> CMatrix {
    let mut out = CMatrix::new();
    for (&(i, j), a) in x {
        for (&(k, l), b) in y {
            if j == k {
                *out.entry((i, l)).or_insert_with(Rational::zero) += a * b;
            }
            if l == i {
                *out.entry((k, j)).or_insert_with(Rational::zero) -= a * b;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Bilinear cocycle with C(E_ij, E_ji) = 1 = −C(E_ji, E_ij) for i ≤ 0 < j, zero otherwise.
pub fn cocycle(x: &CMatrix, y: &CMatrix) -> Rational {
    let mut total = Rational::zero();
    for (&(i, j), a) in x {
        let Some(b) = y.get(&(j, i)) else { continue };
        let s = if i <= 0 && j >= 1 {
            1
        } else if i >= 1 && j <= 0 {
            -1
        } else {
            0
        };
        total += a * b * int(s);
    }
    total
}

/// The Fock operator ½Σ m_ij (−1)^j ρ(G_ij) with ρ(G_ij) = −:χ_{1/2−i} χ_{j−1/2}:.
pub fn rho(x: &CMatrix) -> GradedOperator {
    let terms: Vec<(Rational, HalfOdd, HalfOdd)> = x
        .iter()
        .map(|(&(i, j), c)| {
            let sign = if j.rem_euclid(2) == 0 { 1 } else { -1 };
            let coeff = c * Rational::new(BigInt::from(-sign), BigInt::from(2));
            (coeff, HalfOdd::of((1 - 2 * i) as i32), HalfOdd::of((2 * j - 1) as i32))
        })
        .collect();
    let shifts: Vec<i32> = x.keys().map(|&(i, j)| 2 * (i - j) as i32).collect();
    let degree = match shifts.first() {
        Some(&s) if shifts.iter().all(|&t| t == s) => Shift::Fixed(s),
        None => Shift::Fixed(0),
        _ => Shift::Mixed,
    };
    GradedOperator::new("ρ", degree, Shift::Fixed(0), move |v| {
        let mut out = FockVector::zero();
        for (c, a, b) in &terms {
            out.add_scaled(&apply_normal_pair(*a, *b, v), c);
        }
        out
    })
}

fn raising(x: &CMatrix) -> u32 {
    x.keys().map(|&(i, j)| (2 * (i - j)).max(0) as u32).max().unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CentralProbe {
    pub residual: String,
    pub cocycle: String,
    pub central_factor: String,
    pub pass: bool,
}

/// [ρ(x), ρ(y)] − ρ([x, y]) on the probe space of doubled degree ≤ `max_d2`; the residual must be
/// the scalar cocycle(x, y)·`central_factor`.
pub fn central_charge_probe(x: &CMatrix, y: &CMatrix, max_d2: u32, central_factor: &Rational) -> Result<CentralProbe> {
    let (rx, ry) = (rho(x), rho(y));
    let window = max_d2 + raising(x) + raising(y);
    let comm = commutator_table_in_window(&rx, &ry, max_d2, window)?;
    let predicted = operator_table(&rho(&matrix_bracket(x, y)), max_d2);
    let residual = comm.sub(&predicted).scalar().ok_or(CkpError::NonScalarResidual)?;
    let c = cocycle(x, y);
    let pass = residual == &c * central_factor;
    Ok(CentralProbe {
        residual: residual.to_string(),
        cocycle: c.to_string(),
        central_factor: central_factor.to_string(),
        pass,
    })
}
