//! Characters of the Fock space computed in independent ways, and the registry of
//! identities relating them.
//!
//! All series store doubled exponents. The order N bounds the doubled q-exponent
//! (the exponent of u = q^{1/2}); z, t and r carry weight 0 and are q-dominated.
//! The ₁ψ₁ chain uses its own weights per stage so that every expansion parameter
//! has positive weight; truncation is then exact in each stage.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CkpError, Result};
use crate::fock::monomials_up_to;
use crate::hwv::{certified_hwv_counts, eigenbasis, Algebra};
use crate::partitions::{crank_counts, enumerate_bpdi, hwv_count_via_crank, odp_counts, CrankTable};
use crate::series::{pochhammer_into, product_eval, sum_eval, Exps, Grading, Mismatch, Mono, Series, MAX_VARS};
use crate::Rational;

pub const REGISTRY: [&str; 12] = [
    "dim_q",
    "fock_character",
    "qt_trace",
    "triple_character",
    "characterF_hwv",
    "charform_ferm",
    "identityR",
    "three_characters",
    "crank",
    "jacobi_triangular",
    "psi_chain",
    "crank_hwv_counts",
];

/// Largest order at which the eigenbasis traces are recomputed from explicit vectors.
pub const EIGEN_TRACE_ORDER: u32 = 12;

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn exps(e: &[i32]) -> Exps {
    let mut out = [0; MAX_VARS];
    out[..e.len()].copy_from_slice(e);
    out
}

fn add(s: &mut Series, e: &[i32], c: Rational) -> Result<()> {
    s.add_term(exps(e), c)
}

fn qz(n: u32) -> Arc<Grading> {
    Grading::q_dominated(&["q", "z"], n as i64)
}

type Counts = Arc<BTreeMap<(u32, i32), usize>>;

static COUNT_CACHE: Mutex<Vec<(Algebra, u32, Counts)>> = Mutex::new(Vec::new());

/// Certified highest weight vector counts up to doubled degree `max_d2`, memoised.
pub fn hwv_counts(algebra: Algebra, max_d2: u32) -> Result<Counts> {
    let mut cache = COUNT_CACHE.lock().expect("count cache poisoned");
    if let Some((_, _, c)) = cache.iter().find(|(a, m, _)| *a == algebra && *m >= max_d2) {
        return Ok(Arc::new(c.iter().filter(|((d, _), _)| *d <= max_d2).map(|(k, v)| (*k, *v)).collect()));
    }
    let c = Arc::new(certified_hwv_counts(algebra, max_d2)?);
    cache.retain(|(a, _, _)| *a != algebra);
    cache.push((algebra, max_d2, c.clone()));
    Ok(c)
}

/// Σ_n q^{n/2}·#{monomials of doubled degree n}.
pub fn dim_q_bruteforce(n: u32) -> Result<Series> {
    let g = Grading::q_dominated(&["q"], n as i64);
    let mut s = Series::zero(&g);
    for m in monomials_up_to(n) {
        add(&mut s, &[m.doubled_degree() as i32], Rational::one())?;
    }
    Ok(s)
}

/// 1/∏(1 − q^{(2k−1)/2}).
pub fn dim_q_product(n: u32) -> Result<Series> {
    let g = Grading::q_dominated(&["q"], n as i64);
    product_eval(&g, |k| vec![(Mono::new(-1, &[2 * k as i32 - 1]), -1)])
}

/// Σ over monomials of q^{deg} z^{chg}.
pub fn char_fock_bruteforce(n: u32) -> Result<Series> {
    let mut s = Series::zero(&qz(n));
    for m in monomials_up_to(n) {
        add(&mut s, &[m.doubled_degree() as i32, 2 * m.charge()], Rational::one())?;
    }
    Ok(s)
}

/// 1/∏((1 − zq^{2j−3/2})(1 − z^{−1}q^{2j−1/2})).
pub fn char_fock_product(n: u32) -> Result<Series> {
    product_eval(&qz(n), |j| {
        let j = j as i32;
        vec![(Mono::new(-1, &[4 * j - 3, 2]), -1), (Mono::new(-1, &[4 * j - 1, -2]), -1)]
    })
}

/// Σ over highest weight vectors of q^{deg} z^{chg}, from the certified solver counts.
pub fn char_hwv(n: u32) -> Result<Series> {
    let counts = hwv_counts(Algebra::Untwisted, n)?;
    let mut s = Series::zero(&qz(n));
    for (&(d2, c), &k) in counts.iter() {
        add(&mut s, &[d2 as i32, 2 * c], int(k as i64))?;
    }
    Ok(s)
}

/// Σ_{BP_DI} q^{W} z^{birank}.
pub fn char_hwv_bpdi(n: u32) -> Result<Series> {
    let mut s = Series::zero(&qz(n));
    for bp in enumerate_bpdi(n) {
        add(&mut s, &[bp.doubled_weight() as i32, 2 * bp.birank()], Rational::one())?;
    }
    Ok(s)
}

/// ∏(1 − q^{2k})/((1 − zq^{2k−3/2})(1 − z^{−1}q^{2k−1/2})).
pub fn char_hwv_product(n: u32) -> Result<Series> {
    product_eval(&qz(n), |k| {
        let k = k as i32;
        vec![(Mono::new(-1, &[4 * k - 3, 2]), -1), (Mono::new(-1, &[4 * k - 1, -2]), -1), (Mono::new(-1, &[4 * k, 0]), 1)]
    })
}

/// prefactor · (Σ_k z^k q^{k/2}/(1 + z^{−1}q^{2k+3/2}) + Σ_k z^{−k} q^{3k/2}/(1 + zq^{2k+1/2})).
fn times_two_sums(prefactor: &Series) -> Result<Series> {
    let g = prefactor.grading().clone();
    let first = sum_eval(&g, |k| {
        let k = k as i32;
        let t = prefactor.mul_mono(&Mono::new(1, &[k, 2 * k]))?.div_binomial(&Mono::new(1, &[4 * k + 3, -2]))?;
        Ok((k as i64, Some(t)))
    })?;
    let second = sum_eval(&g, |k| {
        let k = k as i32;
        let t = prefactor.mul_mono(&Mono::new(1, &[3 * k, -2 * k]))?.div_binomial(&Mono::new(1, &[4 * k + 1, 2]))?;
        Ok((3 * k as i64, Some(t)))
    })?;
    first.add(&second)
}

/// ∏(1 + zq^{2l−3/2})(1 + z^{−1}q^{2l−1/2}) over `denominator`, as a product.
fn sum_prefactor(n: u32, denominator: impl Fn(i32) -> Vec<(Mono, i32)>) -> Result<Series> {
    product_eval(&qz(n), |l| {
        let l = l as i32;
        let mut f = vec![(Mono::new(1, &[4 * l - 3, 2]), 1), (Mono::new(1, &[4 * l - 1, -2]), 1)];
        f.extend(denominator(l));
        f
    })
}

/// The sum side for the highest weight character:
/// ∏(1+zq^{2l−3/2})(1+z^{−1}q^{2l−1/2}) / (2∏(1−q^{4i})(1+q^{2i})) · (two sums).
pub fn char_hwv_sum(n: u32) -> Result<Series> {
    let pre = sum_prefactor(n, |i| vec![(Mono::new(-1, &[8 * i, 0]), -1), (Mono::new(1, &[4 * i, 0]), -1)])?;
    Ok(times_two_sums(&pre)?.scale(&Rational::new(1.into(), 2.into())))
}

/// The sum side for the full character: the same sums over 2∏(1 − q^{4l})².
pub fn char_fock_sum(n: u32) -> Result<Series> {
    let pre = sum_prefactor(n, |l| vec![(Mono::new(-1, &[8 * l, 0]), -2)])?;
    Ok(times_two_sums(&pre)?.scale(&Rational::new(1.into(), 2.into())))
}

/// Σ_k z^k q^{k/2}/(1 + z^{−1}q^{2k+3/2}) + Σ_k z^{−k} q^{3k/2}/(1 + zq^{2k+1/2}).
pub fn identity_r_sums(n: u32) -> Result<Series> {
    times_two_sums(&Series::one(&qz(n)))
}

/// 2∏(1 − q^{4l})² / ∏(1 − z²q^{4l−3})(1 − z^{−2}q^{4l−1}).
pub fn identity_r_product(n: u32) -> Result<Series> {
    let p = product_eval(&qz(n), |l| {
        let l = l as i32;
        vec![(Mono::new(-1, &[8 * l, 0]), 2), (Mono::new(-1, &[8 * l - 6, 4]), -1), (Mono::new(-1, &[8 * l - 2, -4]), -1)]
    })?;
    Ok(p.scale(&int(2)))
}

fn qt(n: u32) -> Arc<Grading> {
    Grading::q_dominated(&["q", "t"], n as i64)
}

/// 1/∏(1 − q^{2k−1} t^{(2k−1)/2}) applied to `s`.
fn twisted_module_factor(s: Series) -> Result<Series> {
    let f = product_eval(s.grading(), |k| vec![(Mono::new(-1, &[4 * k as i32 - 2, 2 * k as i32 - 1]), -1)])?;
    s.mul(&f)
}

/// Trace of q^{L_0-degree} t^{L^t_0}: certified twisted highest weight vector counts times the
/// Heisenberg module character.
pub fn char_twisted_trace(n: u32) -> Result<Series> {
    let counts = hwv_counts(Algebra::Twisted, n)?;
    let mut s = Series::zero(&qt(n));
    for (&(d2, _), &k) in counts.iter() {
        add(&mut s, &[d2 as i32, 0], int(k as i64))?;
    }
    twisted_module_factor(s)
}

/// Σ_{ODP} q^{|p|}/∏(1 − q^{2k−1} t^{(2k−1)/2}).
pub fn char_twisted_trace_odp(n: u32) -> Result<Series> {
    let mut s = Series::zero(&qt(n));
    for (d2, &c) in odp_counts(n).iter().enumerate() {
        add(&mut s, &[d2 as i32, 0], int(c as i64))?;
    }
    twisted_module_factor(s)
}

/// The same trace from explicit eigenvectors and their computed eigenvalues.
pub fn char_twisted_trace_eigen(n: u32) -> Result<Series> {
    let mut s = Series::zero(&qt(n));
    for d2 in 0..=n {
        for e in eigenbasis(Algebra::Twisted, d2)? {
            let t = (&e.grading * int(2)).to_integer();
            add(&mut s, &[d2 as i32, i32::try_from(t).expect("small eigenvalue")], Rational::one())?;
        }
    }
    Ok(s)
}

fn qzr(n: u32) -> Arc<Grading> {
    Grading::q_dominated(&["q", "z", "r"], n as i64)
}

/// s / ∏(1 − q^{2k} r^k).
fn untwisted_module_factor(s: Series) -> Result<Series> {
    let f = product_eval(s.grading(), |k| vec![(Mono::new(-1, &[4 * k as i32, 0, 2 * k as i32]), -1)])?;
    s.mul(&f)
}

/// Trace of q^{deg} z^{h_0} r^{L^h_0} from certified counts, with r^{−c²/2} per highest weight vector.
pub fn char_triple(n: u32) -> Result<Series> {
    let counts = hwv_counts(Algebra::Untwisted, n)?;
    let mut s = Series::zero(&qzr(n));
    for (&(d2, c), &k) in counts.iter() {
        add(&mut s, &[d2 as i32, 2 * c, -c * c], int(k as i64))?;
    }
    untwisted_module_factor(s)
}

/// Σ_{BP_DI} q^{W} z^{birank} r^{−birank²/2}/∏(1 − q^{2k} r^k).
pub fn char_triple_bpdi(n: u32) -> Result<Series> {
    let mut s = Series::zero(&qzr(n));
    for bp in enumerate_bpdi(n) {
        let b = bp.birank();
        add(&mut s, &[bp.doubled_weight() as i32, 2 * b, -b * b], Rational::one())?;
    }
    untwisted_module_factor(s)
}

/// The triple trace from explicit eigenvectors and their computed eigenvalues.
pub fn char_triple_eigen(n: u32) -> Result<Series> {
    let mut s = Series::zero(&qzr(n));
    for d2 in 0..=n {
        for e in eigenbasis(Algebra::Untwisted, d2)? {
            let r = (&e.grading * int(2)).to_integer();
            let c = e.charge.expect("untwisted eigenvectors carry a charge");
            add(&mut s, &[d2 as i32, 2 * c, i32::try_from(r).expect("small eigenvalue")], Rational::one())?;
        }
    }
    Ok(s)
}

/// Σ N′(m, k) z^m q^k from the crank table.
pub fn crank_series(n: u32, table: &CrankTable) -> Result<Series> {
    let mut s = Series::zero(&qz(n));
    for (&(m, k), &c) in &table.counts {
        if 2 * k <= n {
            add(&mut s, &[2 * k as i32, 2 * m as i32], int(c))?;
        }
    }
    Ok(s)
}

/// ∏(1 − q^k)/((1 − zq^k)(1 − z^{−1}q^k)).
pub fn crank_product(n: u32) -> Result<Series> {
    product_eval(&qz(n), |k| {
        let k = 2 * k as i32;
        vec![(Mono::new(-1, &[k, 0]), 1), (Mono::new(-1, &[k, 2]), -1), (Mono::new(-1, &[k, -2]), -1)]
    })
}

/// Σ N′(m, k) z^m q^{2k+m/2}: the crank series after q → q², z → zq^{1/2}.
pub fn crank_series_substituted(n: u32, table: &CrankTable) -> Result<Series> {
    let mut s = Series::zero(&qz(n));
    for (&(m, k), &c) in &table.counts {
        let e = 4 * k as i64 + m;
        if e <= n as i64 {
            add(&mut s, &[e as i32, 2 * m as i32], int(c))?;
        }
    }
    Ok(s)
}

/// ∏(1 − q^{2k})/((1 − zq^{2k+1/2})(1 − z^{−1}q^{2k−1/2})).
pub fn crank_product_substituted(n: u32) -> Result<Series> {
    product_eval(&qz(n), |k| {
        let k = k as i32;
        vec![(Mono::new(-1, &[4 * k, 0]), 1), (Mono::new(-1, &[4 * k + 1, 2]), -1), (Mono::new(-1, &[4 * k - 1, -2]), -1)]
    })
}

/// Σ_{m,k} Σ_{l≥0} N′(m − l, k) z^m q^{2k+m/2}.
pub fn crank_hwv_series(n: u32, table: &CrankTable) -> Result<Series> {
    let mut s = Series::zero(&qz(n));
    for (&(m, k), &c) in &table.counts {
        for l in 0.. {
            let e = 4 * k as i64 + m + l;
            if e > n as i64 {
                break;
            }
            add(&mut s, &[e as i32, 2 * (m + l) as i32], int(c))?;
        }
    }
    Ok(s)
}

/// Σ_{m≥0} q^{2T_m} with T_m = m(m+1)/2.
pub fn jacobi_sum(n: u32) -> Result<Series> {
    let g = Grading::q_dominated(&["q"], n as i64);
    let mut s = Series::zero(&g);
    for m in 0.. {
        let e = 2 * m * (m + 1);
        if e > n as i32 {
            return Ok(s);
        }
        add(&mut s, &[e], Rational::one())?;
    }
    unreachable!()
}

/// ∏(1 − q^{4i})(1 + q^{2i}).
pub fn jacobi_product(n: u32) -> Result<Series> {
    let g = Grading::q_dominated(&["q"], n as i64);
    product_eval(&g, |i| vec![(Mono::new(-1, &[8 * i as i32]), 1), (Mono::new(1, &[4 * i as i32]), 1)])
}

/// ∏(1 − q^{4i})/∏(1 − q^{4i−2}).
pub fn jacobi_quotient(n: u32) -> Result<Series> {
    let g = Grading::q_dominated(&["q"], n as i64);
    product_eval(&g, |i| vec![(Mono::new(-1, &[8 * i as i32]), 1), (Mono::new(-1, &[8 * i as i32 - 4]), -1)])
}

/// One stage of the ₁ψ₁ chain: the generic variables q, a, x as monomials in the stage variables.
struct PsiStage {
    name: &'static str,
    grading: Arc<Grading>,
    q: Mono,
    a: Mono,
    x: Mono,
}

/// Stages before the last use twice the order as their weight bound; their weights are heavier.
fn psi_stages(n: u32) -> Vec<PsiStage> {
    let b = 2 * n as i64;
    vec![
        PsiStage {
            name: "(q,a,x)",
            grading: Grading::new(&["q", "a", "x"], &[3, 1, 1], b),
            q: Mono::new(1, &[2, 0, 0]),
            a: Mono::new(1, &[0, 2, 0]),
            x: Mono::new(1, &[0, 0, 2]),
        },
        PsiStage {
            name: "x=qy",
            grading: Grading::new(&["q", "a", "y"], &[4, 1, -2], b),
            q: Mono::new(1, &[2, 0, 0]),
            a: Mono::new(1, &[0, 2, 0]),
            x: Mono::new(1, &[2, 0, 2]),
        },
        PsiStage {
            name: "q->q^2",
            grading: Grading::new(&["q", "a", "y"], &[2, 1, -2], b),
            q: Mono::new(1, &[4, 0, 0]),
            a: Mono::new(1, &[0, 2, 0]),
            x: Mono::new(1, &[4, 0, 2]),
        },
        PsiStage {
            name: "y=zq^(-3/2)",
            grading: Grading::new(&["q", "a", "z"], &[2, 1, 0], b),
            q: Mono::new(1, &[4, 0, 0]),
            a: Mono::new(1, &[0, 2, 0]),
            x: Mono::new(1, &[1, 0, 2]),
        },
        PsiStage {
            name: "a=-z^(-1)q^(3/2)",
            grading: qz(n),
            q: Mono::new(1, &[4, 0]),
            a: Mono::new(-1, &[3, -2]),
            x: Mono::new(1, &[1, 2]),
        },
    ]
}

/// Σ_{k≥0} x^k/(1 − aq^k) − Σ_{k≥1} a^{−1}q^k x^{−k}/(1 − a^{−1}q^k).
fn psi_sum(st: &PsiStage) -> Result<Series> {
    let g = &st.grading;
    let first = sum_eval(g, |k| {
        let xk = st.x.pow(k as i32);
        let t = Series::monomial(g, &xk)?.div_binomial(&st.a.mul(&st.q.pow(k as i32)).neg())?;
        Ok((g.weight(&xk.exps), Some(t)))
    })?;
    let ainv = st.a.inv();
    let second = sum_eval(g, |k| {
        let k = k as i32 + 1;
        let lead = ainv.mul(&st.q.pow(k)).mul(&st.x.pow(-k));
        let t = Series::monomial(g, &lead)?.div_binomial(&ainv.mul(&st.q.pow(k)).neg())?;
        Ok((g.weight(&lead.exps), Some(t)))
    })?;
    first.sub(&second)
}

/// (q;q)²(q/(ax);q)(ax;q) / ((1 − a)(aq;q)(q/x;q)(q/a;q)(x;q)).
fn psi_product(st: &PsiStage) -> Result<Series> {
    let (q, a, x) = (&st.q, &st.a, &st.x);
    let ax = a.mul(x);
    let mut s = Series::one(&st.grading);
    s = pochhammer_into(s, q, q, 1)?;
    s = pochhammer_into(s, q, q, 1)?;
    s = pochhammer_into(s, &q.mul(&ax.inv()), q, 1)?;
    s = pochhammer_into(s, &ax, q, 1)?;
    s = s.div_binomial(&a.neg())?;
    s = pochhammer_into(s, &a.mul(q), q, -1)?;
    s = pochhammer_into(s, &q.mul(&x.inv()), q, -1)?;
    s = pochhammer_into(s, &q.mul(&a.inv()), q, -1)?;
    pochhammer_into(s, x, q, -1)
}

/// One compared pair of series.
pub struct Check {
    pub label: String,
    pub lhs: Series,
    pub rhs: Series,
}

fn check(label: impl Into<String>, lhs: Series, rhs: Series) -> Check {
    Check { label: label.into(), lhs, rhs }
}

/// Compares `s` with its projection onto terms satisfying `keep`.
fn property(label: impl Into<String>, s: Series, keep: impl Fn(&Exps, &Rational) -> bool) -> Result<Check> {
    let mut proj = Series::zero(s.grading());
    for (e, c) in s.terms() {
        if keep(e, c) {
            proj.add_term(*e, c.clone())?;
        }
    }
    Ok(check(label, s, proj))
}

fn nonnegative_integers(label: &str, s: Series) -> Result<Check> {
    property(label, s, |_, c| c.is_integer() && *c >= Rational::zero())
}

fn checks_for(name: &str, n: u32) -> Result<Vec<Check>> {
    let eigen = n.min(EIGEN_TRACE_ORDER);
    let out = match name {
        "dim_q" => vec![check("monomial count = product", dim_q_bruteforce(n)?, dim_q_product(n)?)],
        "fock_character" => vec![check("brute force = product", char_fock_bruteforce(n)?, char_fock_product(n)?)],
        "qt_trace" => {
            let direct = char_twisted_trace(n)?;
            vec![
                check("eigenbasis trace = dimension trace", char_twisted_trace_eigen(eigen)?, direct.truncate(eigen as i64)),
                nonnegative_integers("trace coefficients are multiplicities", direct.clone())?,
                check("direct trace = ODP sum", direct, char_twisted_trace_odp(n)?),
            ]
        }
        "triple_character" => {
            let direct = char_triple(n)?;
            let forget_r = {
                let mut s = Series::zero(&qz(n));
                for (e, c) in direct.terms() {
                    add(&mut s, &[e[0], e[1]], c.clone())?;
                }
                s
            };
            vec![
                check("eigenbasis trace = dimension trace", char_triple_eigen(eigen)?, direct.truncate(eigen as i64)),
                check("direct trace = BP_DI sum", direct, char_triple_bpdi(n)?),
                check("r = 1 gives the (q,z) character", forget_r, char_fock_bruteforce(n)?),
            ]
        }
        "characterF_hwv" => vec![check("hwv character = sum formula", char_hwv(n)?, char_hwv_sum(n)?)],
        "charform_ferm" => {
            let brute = char_fock_bruteforce(n)?;
            vec![
                check("full character = sum formula", brute.clone(), char_fock_sum(n)?),
                check("full character = product", brute, char_fock_product(n)?),
            ]
        }
        "identityR" => {
            let sums = identity_r_sums(n)?;
            vec![
                property("sums carry integral q-powers and even z-powers", sums.clone(), |e, _| {
                    e[0] % 2 == 0 && e[1] % 4 == 0
                })?,
                check("two sums = product", sums, identity_r_product(n)?),
            ]
        }
        "three_characters" => {
            let sides = [
                ("hwv trace", char_hwv(n)?),
                ("BP_DI sum", char_hwv_bpdi(n)?),
                ("product", char_hwv_product(n)?),
                ("sum formula", char_hwv_sum(n)?),
            ];
            let mut out = vec![nonnegative_integers("hwv coefficients are dimensions", sides[0].1.clone())?];
            for i in 0..sides.len() {
                for j in i + 1..sides.len() {
                    out.push(check(format!("{} = {}", sides[i].0, sides[j].0), sides[i].1.clone(), sides[j].1.clone()));
                }
            }
            out
        }
        "crank" => {
            let table = crank_counts(n / 2);
            let hwv = char_hwv(n)?;
            let via_crank = crank_hwv_series(n, &table)?;
            vec![
                check("crank counts = generating product", crank_series(n, &table)?, crank_product(n)?),
                check(
                    "substituted crank counts = substituted product",
                    crank_series_substituted(n, &table)?,
                    crank_product_substituted(n)?,
                ),
                check("hwv trace = crank sum", hwv.clone(), via_crank.clone()),
                check("crank sum = BP_DI sum", via_crank, char_hwv_bpdi(n)?),
                check("hwv trace = product", hwv, char_hwv_product(n)?),
            ]
        }
        "jacobi_triangular" => {
            let sum = jacobi_sum(n)?;
            vec![
                check("triangular sum = product", sum.clone(), jacobi_product(n)?),
                check("triangular sum = quotient", sum, jacobi_quotient(n)?),
            ]
        }
        "psi_chain" => {
            let stages = psi_stages(n);
            let mut out = Vec::new();
            for st in &stages {
                out.push(check(format!("stage {}", st.name), psi_sum(st)?, psi_product(st)?));
            }
            let last = stages.last().expect("five stages");
            out.push(check("final sum side = identity sums", psi_sum(last)?, identity_r_sums(n)?));
            out.push(check("final product side = identity product", psi_product(last)?, identity_r_product(n)?));
            out
        }
        "crank_hwv_counts" => {
            let table = crank_counts(n / 2);
            let counts = hwv_counts(Algebra::Untwisted, n)?;
            let (mut solver, mut crank) = (Series::zero(&qz(n)), Series::zero(&qz(n)));
            for d2 in 0..=n {
                for m in -(n as i64)..=n as i64 {
                    let k = counts.get(&(d2, m as i32)).copied().unwrap_or(0);
                    add(&mut solver, &[d2 as i32, 2 * m as i32], int(k as i64))?;
                    add(&mut crank, &[d2 as i32, 2 * m as i32], int(hwv_count_via_crank(&table, d2, m)))?;
                }
            }
            vec![
                property("counts vanish unless degree ≡ charge mod 4", crank.clone(), |e, _| (e[0] - e[1] / 2) % 4 == 0)?,
                check("solver counts = crank counts", solver, crank),
            ]
        }
        other => return Err(CkpError::UnknownIdentity(other.to_string())),
    };
    Ok(out)
}

/// Coefficient disagreement with exponents still doubled and rationals as strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub check: String,
    pub vars: Vec<String>,
    pub doubled_exponents: Vec<i32>,
    pub left: String,
    pub right: String,
}

impl Witness {
    fn new(check: &Check, m: Mismatch) -> Witness {
        Witness {
            check: check.label.clone(),
            vars: check.lhs.grading().vars.clone(),
            doubled_exponents: m.exps,
            left: m.left.to_string(),
            right: m.right.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub label: String,
    pub pass: bool,
    /// Weight bound of the compared series.
    pub window: i64,
    pub terms: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub order: u32,
    pub windows: BTreeMap<String, i64>,
    pub pass: bool,
    pub checks: Vec<CheckOutcome>,
    /// First failing coefficient; present iff the identity fails.
    pub witness: Option<Witness>,
    /// Order of the stability re-run and whether every compared coefficient survived it.
    pub stability: Option<(u32, bool)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Doubled q-order N.
    pub order: u32,
    /// Enlargement for the stability re-run; 0 skips it.
    pub guard: u32,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { order: 40, guard: 8 }
    }
}

/// Smallest guard that makes the stability re-run enlarge every window.
pub const DECLARED_SLACK: u32 = 1;

/// Evaluates one identity and, if requested, re-runs it at order + guard.
pub fn verify_identity(name: &str, opts: VerifyOptions) -> Result<IdentityReport> {
    if !REGISTRY.contains(&name) {
        return Err(CkpError::UnknownIdentity(name.to_string()));
    }
    if opts.guard != 0 && opts.guard < DECLARED_SLACK {
        return Err(CkpError::WindowTooSmall { slack: DECLARED_SLACK as i64, window: opts.guard as i64 });
    }
    let checks = checks_for(name, opts.order)?;
    let mut witness = None;
    let mut outcomes = Vec::new();
    let mut windows = BTreeMap::new();
    for c in &checks {
        let m = c.lhs.first_mismatch(&c.rhs);
        if witness.is_none() {
            witness = m.clone().map(|m| Witness::new(c, m));
        }
        windows.insert(c.label.clone(), c.lhs.bound());
        outcomes.push(CheckOutcome { label: c.label.clone(), pass: m.is_none(), window: c.lhs.bound(), terms: c.lhs.len() });
    }
    let stability = if opts.guard > 0 {
        let big_order = opts.order + opts.guard;
        let bigger = checks_for(name, big_order)?;
        let stable = checks.iter().zip(&bigger).all(|(small, big)| {
            big.lhs.truncate(small.lhs.bound()) == small.lhs && big.rhs.truncate(small.rhs.bound()) == small.rhs
        });
        Some((big_order, stable))
    } else {
        None
    };
    Ok(IdentityReport {
        name: name.to_string(),
        order: opts.order,
        windows,
        pass: witness.is_none(),
        checks: outcomes,
        witness,
        stability,
    })
}

/// Runs the whole registry concurrently; reports come back in registry order.
pub fn verify_all(opts: VerifyOptions) -> Result<Vec<IdentityReport>> {
    let top = opts.order + opts.guard;
    hwv_counts(Algebra::Untwisted, top)?;
    hwv_counts(Algebra::Twisted, top)?;
    REGISTRY.par_iter().map(|name| verify_identity(name, opts)).collect()
}
