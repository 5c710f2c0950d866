//! Untwisted and twisted Heisenberg modes as quadratic expressions in χ, the
//! grading operators built from them, and exact commutator tables on a probe
//! space of monomials.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{CkpError, Result};
use crate::fock::{mode_sign, monomials_up_to, normal_pair_on_monomial, FockMonomial, FockVector, HalfOdd};
use crate::half::fmt_doubled;
use crate::Rational;

/// Calls `f(a, b, result, coefficient)` for every ordered pair with a + b = s
/// (doubled) such that :χ_a χ_b: does not kill `m`.
pub fn for_each_pair_on_monomial<F>(s: i32, m: &FockMonomial, mut f: F)
where
    F: FnMut(i32, i32, FockMonomial, i64),
{
    let mut emit = |a: i32, b: i32| {
        if let Some((r, c)) = normal_pair_on_monomial(HalfOdd::of(a), HalfOdd::of(b), m) {
            f(a, b, r, c);
        }
    };
    if s < 0 {
        let mut a = s + 1;
        while a <= -1 {
            emit(a, s - a);
            a += 2;
        }
    }
    for &(p, _) in m.parts() {
        let p = p as i32;
        // p as the left index covers (+,+) and (+,−); p as the right index covers (−,+).
        emit(p, s - p);
        if s - p < 0 {
            emit(s - p, p);
        }
    }
}

/// 2·h^ℤ_n on a monomial, integer coefficients.
pub fn heis_untwisted_twice_on_monomial(n: i32, m: &FockMonomial, out: &mut Vec<(FockMonomial, i64)>) {
    for_each_pair_on_monomial(4 * n, m, |_, _, r, c| out.push((r, c)));
}

/// (−1)^{b+1/2} for a doubled index b.
fn twisted_pair_sign(b: i32) -> i64 {
    if ((b + 1) / 2).rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// 2·h^t_n on a monomial, integer coefficients.
pub fn heis_twisted_twice_on_monomial(n: HalfOdd, m: &FockMonomial, out: &mut Vec<(FockMonomial, i64)>) {
    for_each_pair_on_monomial(2 * n.twice(), m, |_, b, r, c| out.push((r, c * twisted_pair_sign(b))));
}

fn half() -> Rational {
    Rational::new(BigInt::from(1), BigInt::from(2))
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// h^ℤ_n = ½ Σ_{a+b=2n} :χ_a χ_b:.
pub fn heis_untwisted(n: i32, v: &FockVector) -> FockVector {
    v.map_terms(&half(), |m, out| heis_untwisted_twice_on_monomial(n, m, out))
}

/// h^t_n = ½ Σ_{a+b=2n} (−1)^{b+1/2} :χ_a χ_b:.
pub fn heis_twisted(n: HalfOdd, v: &FockVector) -> FockVector {
    v.map_terms(&half(), |m, out| heis_twisted_twice_on_monomial(n, m, out))
}

/// The charge operator h^ℤ_0.
pub fn grade_charge(v: &FockVector) -> FockVector {
    heis_untwisted(0, v)
}

/// L_0 = ½ Σ_{j>0} (−1)^{j−1/2} j :χ_{−j} χ_j:.
pub fn grade_l0(v: &FockVector) -> FockVector {
    let mut out = FockVector::zero();
    for (m, c) in v.terms() {
        for &(j, _) in m.parts() {
            let j = j as i32;
            if let Some((r, k)) = normal_pair_on_monomial(HalfOdd::of(-j), HalfOdd::of(j), m) {
                let coeff = Rational::new(BigInt::from(mode_sign(j) * j as i64 * k), BigInt::from(4));
                out.add_term(r, c * coeff);
            }
        }
    }
    out
}

/// L^λ_0 = −Σ_{k∈ℤ} (λ+k) :χ_{−2k+1/2} χ_{2k−1/2}:.
pub fn grade_llambda(lambda: &Rational, v: &FockVector) -> FockVector {
    let mut out = FockVector::zero();
    for (m, c) in v.terms() {
        for_each_pair_on_monomial(0, m, |a, _, r, k| {
            if a.rem_euclid(4) == 1 {
                let kk = (1 - a) / 4;
                out.add_term(r, -(lambda + rat(kk as i64)) * rat(k) * c);
            }
        });
    }
    out
}

/// L^t_0 = −Σ_{n>0} h^t_{−n} h^t_n; terms with 2n above the degree of `v` vanish.
pub fn grade_lt0(v: &FockVector) -> FockVector {
    let top = v.max_doubled_degree() as i32;
    let mut out = FockVector::zero();
    let mut n = 1;
    while n <= top / 2 {
        let w = heis_twisted(HalfOdd::of(n), v);
        if !w.is_zero() {
            let w = heis_twisted(HalfOdd::of(-n), &w);
            out.add_scaled(&w, &-Rational::one());
        }
        n += 2;
    }
    out
}

/// L^h_0 = −½(h_0)² − Σ_{n>0} h_{−n} h_n + (b−a) h_0 + (2ab − b²)/2.
pub fn grade_lh0(v: &FockVector, a: &Rational, b: &Rational) -> FockVector {
    let top = v.max_doubled_degree() as i32;
    let h0 = heis_untwisted(0, v);
    let mut out = heis_untwisted(0, &h0).scale(&-half());
    let mut n = 1;
    while 4 * n <= top {
        let w = heis_untwisted(n, v);
        if !w.is_zero() {
            out.add_scaled(&heis_untwisted(-n, &w), &-Rational::one());
        }
        n += 1;
    }
    out.add_scaled(&h0, &(b - a));
    let constant = (rat(2) * a * b - b * b) * half();
    out.add_scaled(v, &constant);
    out
}

/// Degree or charge change of an operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shift {
    /// Fixed shift; degree shifts are doubled.
    Fixed(i32),
    Mixed,
}

type Action = Arc<dyn Fn(&FockVector) -> FockVector + Send + Sync>;

/// A linear operator on the Fock space with its grading behaviour.
#[derive(Clone)]
pub struct GradedOperator {
    label: String,
    degree_shift: Shift,
    charge_shift: Shift,
    action: Action,
}

impl fmt::Debug for GradedOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GradedOperator")
            .field("label", &self.label)
            .field("degree_shift", &self.degree_shift)
            .field("charge_shift", &self.charge_shift)
            .finish()
    }
}

impl GradedOperator {
    pub fn new<F>(label: impl Into<String>, degree_shift: Shift, charge_shift: Shift, action: F) -> Self
    where
        F: Fn(&FockVector) -> FockVector + Send + Sync + 'static,
    {
        GradedOperator { label: label.into(), degree_shift, charge_shift, action: Arc::new(action) }
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        (self.action)(v)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn degree_shift(&self) -> Shift {
        self.degree_shift
    }

    pub fn charge_shift(&self) -> Shift {
        self.charge_shift
    }

    pub fn chi(n: HalfOdd) -> Self {
        let charge = if n.twice().rem_euclid(4) == 3 { 1 } else { -1 };
        GradedOperator::new(
            format!("χ_{{{}}}", fmt_doubled(n.twice() as i64)),
            Shift::Fixed(-n.twice()),
            Shift::Fixed(charge),
            move |v| crate::fock::apply_mode(n, v),
        )
    }

    pub fn h_untwisted(n: i32) -> Self {
        GradedOperator::new(format!("h^Z_{{{n}}}"), Shift::Fixed(-4 * n), Shift::Fixed(0), move |v| {
            heis_untwisted(n, v)
        })
    }

    pub fn h_twisted(n: HalfOdd) -> Self {
        GradedOperator::new(
            format!("h^t_{{{}}}", fmt_doubled(n.twice() as i64)),
            Shift::Fixed(-2 * n.twice()),
            Shift::Mixed,
            move |v| heis_twisted(n, v),
        )
    }

    pub fn charge() -> Self {
        GradedOperator::new("h^Z_0", Shift::Fixed(0), Shift::Fixed(0), grade_charge)
    }

    pub fn l0() -> Self {
        GradedOperator::new("L_0", Shift::Fixed(0), Shift::Fixed(0), grade_l0)
    }

    pub fn llambda(lambda: Rational) -> Self {
        GradedOperator::new(format!("L^{lambda}_0"), Shift::Fixed(0), Shift::Fixed(0), move |v| {
            grade_llambda(&lambda, v)
        })
    }

    pub fn lt0() -> Self {
        GradedOperator::new("L^t_0", Shift::Fixed(0), Shift::Mixed, grade_lt0)
    }

    pub fn lh0(a: Rational, b: Rational) -> Self {
        GradedOperator::new("L^h_0", Shift::Fixed(0), Shift::Fixed(0), move |v| grade_lh0(v, &a, &b))
    }

    /// self ∘ other.
    pub fn compose(&self, other: &GradedOperator) -> GradedOperator {
        let (a, b) = (self.action.clone(), other.action.clone());
        let add = |x: Shift, y: Shift| match (x, y) {
            (Shift::Fixed(p), Shift::Fixed(q)) => Shift::Fixed(p + q),
            _ => Shift::Mixed,
        };
        GradedOperator {
            label: format!("{}·{}", self.label, other.label),
            degree_shift: add(self.degree_shift, other.degree_shift),
            charge_shift: add(self.charge_shift, other.charge_shift),
            action: Arc::new(move |v| a(&b(v))),
        }
    }
}

/// Columns of an operator restricted to a monomial probe space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorMatrix {
    pub basis: Vec<FockMonomial>,
    pub columns: Vec<FockVector>,
}

impl OperatorMatrix {
    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(FockVector::is_zero)
    }

    /// `Some(c)` if the matrix equals c·Id on the probe space.
    pub fn scalar(&self) -> Option<Rational> {
        let (m0, v0) = (self.basis.first()?, self.columns.first()?);
        let c = v0.coefficient(m0);
        self.basis
            .iter()
            .zip(&self.columns)
            .all(|(m, v)| *v == FockVector::from_monomial(m.clone()).scale(&c))
            .then_some(c)
    }

    pub fn column(&self, m: &FockMonomial) -> Option<&FockVector> {
        self.basis.binary_search(m).ok().map(|i| &self.columns[i])
    }

    pub fn sub(&self, other: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix {
            basis: self.basis.clone(),
            columns: self.columns.iter().zip(&other.columns).map(|(a, b)| a.sub(b)).collect(),
        }
    }
}

fn check_window(v: &FockVector, window_d2: u32) -> Result<()> {
    let top = v.max_doubled_degree();
    if top > window_d2 {
        return Err(CkpError::ProbeEscape { found_doubled: top, window_doubled: window_d2 });
    }
    Ok(())
}

fn default_window(a: &GradedOperator, b: &GradedOperator, max_d2: u32) -> u32 {
    let up = |s: Shift| match s {
        Shift::Fixed(k) => k.max(0) as u32,
        Shift::Mixed => 0,
    };
    max_d2 + up(a.degree_shift) + up(b.degree_shift)
}

/// The matrix of AB − BA on all monomials of doubled degree ≤ `max_d2`.
/// Intermediate and final images must stay within doubled degree `window_d2`.
pub fn commutator_table_in_window(
    a: &GradedOperator,
    b: &GradedOperator,
    max_d2: u32,
    window_d2: u32,
) -> Result<OperatorMatrix> {
    let basis = monomials_up_to(max_d2);
    let columns = basis
        .iter()
        .map(|m| {
            let v = FockVector::from_monomial(m.clone());
            let bv = b.apply(&v);
            let av = a.apply(&v);
            check_window(&bv, window_d2)?;
            check_window(&av, window_d2)?;
            let abv = a.apply(&bv);
            let bav = b.apply(&av);
            check_window(&abv, window_d2)?;
            check_window(&bav, window_d2)?;
            Ok(abv.sub(&bav))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OperatorMatrix { basis, columns })
}

/// `commutator_table_in_window` with the window sized from the declared degree shifts.
pub fn commutator_table(a: &GradedOperator, b: &GradedOperator, max_d2: u32) -> Result<OperatorMatrix> {
    commutator_table_in_window(a, b, max_d2, default_window(a, b, max_d2))
}

/// The matrix of a single operator on the probe space.
pub fn operator_table(a: &GradedOperator, max_d2: u32) -> OperatorMatrix {
    let basis = monomials_up_to(max_d2);
    let columns = basis.iter().map(|m| a.apply(&FockVector::from_monomial(m.clone()))).collect();
    OperatorMatrix { basis, columns }
}

/// `c·A` as an operator matrix on the same probe space.
pub fn scaled_table(a: &GradedOperator, c: &Rational, max_d2: u32) -> OperatorMatrix {
    let mut t = operator_table(a, max_d2);
    for col in &mut t.columns {
        *col = col.scale(c);
    }
    t
}

/// Eigenvalue of `v` under `op`, or an error if `v` is not an eigenvector.
pub fn eigenvalue(op: &GradedOperator, v: &FockVector) -> Result<Rational> {
    let w = op.apply(v);
    if w.is_zero() {
        return Ok(Rational::zero());
    }
    w.ratio_to(v).ok_or_else(|| CkpError::NotEigenvector(op.label().to_string()))
}
