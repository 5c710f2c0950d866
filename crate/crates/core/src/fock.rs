//! The Fock space of the field χ(z) = Σ χ_n z^{-n-1/2}: creation monomials,
//! exact rational vectors, the action of single modes and normal-ordered pairs,
//! and the tensor square.
//!
//! Indices are doubled throughout: `χ_{-3/2}` is stored as the positive odd
//! value 3 inside a monomial and as `HalfOdd(-3)` when used as a mode.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{CkpError, Result};
use crate::half::fmt_doubled;
use crate::Rational;

/// A mode index n ∈ ℤ+1/2, stored as 2n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfOdd(i32);

impl HalfOdd {
    pub fn new(twice_value: i32) -> Result<Self> {
        if twice_value % 2 == 0 {
            return Err(CkpError::EvenDoubledIndex(twice_value as i64));
        }
        Ok(HalfOdd(twice_value))
    }

    /// Panics on an even argument; for literals known to be odd.
    pub fn of(twice_value: i32) -> Self {
        Self::new(twice_value).expect("odd doubled index")
    }

    pub fn twice(self) -> i32 {
        self.0
    }

    pub fn is_annihilation(self) -> bool {
        self.0 > 0
    }

    /// (−1)^{n−1/2}.
    pub fn sign(self) -> i64 {
        parity_sign((self.0 - 1) / 2)
    }

    pub fn to_rational(self) -> Rational {
        Rational::new(BigInt::from(self.0), BigInt::from(2))
    }
}

impl std::ops::Neg for HalfOdd {
    type Output = HalfOdd;
    fn neg(self) -> HalfOdd {
        HalfOdd(-self.0)
    }
}

impl fmt::Display for HalfOdd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2", self.0)
    }
}

/// (−1)^k for any integer k.
pub(crate) fn parity_sign(k: i32) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// (−1)^{n−1/2} for a doubled odd index.
pub(crate) fn mode_sign(twice: i32) -> i64 {
    parity_sign((twice - 1) / 2)
}

/// Charge contribution of one factor χ_{−j}, j given doubled: +1 for j ≡ 1/2, −1 for j ≡ 3/2 (mod 2).
pub(crate) fn factor_charge(twice_j: u32) -> i32 {
    if twice_j % 4 == 1 {
        1
    } else {
        -1
    }
}

/// χ_{−j_k}^{m_k} ⋯ χ_{−j_1}^{m_1}|0⟩ with the j given doubled, strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FockMonomial {
    parts: Vec<(u32, u32)>,
    doubled_degree: u32,
}

impl FockMonomial {
    pub fn vacuum() -> Self {
        Self::default()
    }

    /// Builds a monomial from (positive index, multiplicity) pairs in any order.
    pub fn from_parts(parts: &[(HalfOdd, u32)]) -> Result<Self> {
        let mut m = Self::vacuum();
        for &(j, k) in parts {
            if j.twice() <= 0 {
                return Err(CkpError::MalformedMonomial(format!("index {j} is not positive")));
            }
            for _ in 0..k {
                m = m.created(j.twice() as u32);
            }
        }
        Ok(m)
    }

    /// Builds a monomial from a list of doubled positive odd indices (with repetition).
    pub fn from_doubled_indices(indices: &[u32]) -> Result<Self> {
        let mut m = Self::vacuum();
        for &j in indices {
            if j % 2 == 0 {
                return Err(CkpError::MalformedMonomial(format!("doubled index {j} is even")));
            }
            m = m.created(j);
        }
        Ok(m)
    }

    pub fn parts(&self) -> &[(u32, u32)] {
        &self.parts
    }

    pub fn is_vacuum(&self) -> bool {
        self.parts.is_empty()
    }

    /// Twice the degree Σ mult·j.
    pub fn doubled_degree(&self) -> u32 {
        self.doubled_degree
    }

    pub fn degree(&self) -> Rational {
        Rational::new(BigInt::from(self.doubled_degree), BigInt::from(2))
    }

    pub fn charge(&self) -> i32 {
        self.parts.iter().map(|&(j, k)| factor_charge(j) * k as i32).sum()
    }

    pub fn multiplicity(&self, twice_j: u32) -> u32 {
        match self.parts.binary_search_by_key(&twice_j, |p| p.0) {
            Ok(i) => self.parts[i].1,
            Err(_) => 0,
        }
    }

    pub fn factor_count(&self) -> u32 {
        self.parts.iter().map(|p| p.1).sum()
    }

    pub fn max_index(&self) -> u32 {
        self.parts.last().map_or(0, |p| p.0)
    }

    /// χ_{−j}·self.
    pub fn created(&self, twice_j: u32) -> Self {
        debug_assert!(twice_j % 2 == 1);
        let mut parts = self.parts.clone();
        match parts.binary_search_by_key(&twice_j, |p| p.0) {
            Ok(i) => parts[i].1 += 1,
            Err(i) => parts.insert(i, (twice_j, 1)),
        }
        FockMonomial { parts, doubled_degree: self.doubled_degree + twice_j }
    }

    /// Removes one factor χ_{−j}; returns the old multiplicity.
    pub fn annihilated(&self, twice_j: u32) -> Option<(Self, u32)> {
        let i = self.parts.binary_search_by_key(&twice_j, |p| p.0).ok()?;
        let mut parts = self.parts.clone();
        let k = parts[i].1;
        if k == 1 {
            parts.remove(i);
        } else {
            parts[i].1 -= 1;
        }
        Some((FockMonomial { parts, doubled_degree: self.doubled_degree - twice_j }, k))
    }

    /// The factors as doubled indices in ascending order, repeated by multiplicity.
    pub fn expanded(&self) -> Vec<u32> {
        self.parts.iter().flat_map(|&(j, k)| std::iter::repeat_n(j, k as usize)).collect()
    }
}

fn cmp_expanded(a: &[(u32, u32)], b: &[(u32, u32)]) -> Ordering {
    let (mut i, mut j) = (0, 0);
    let mut ra = a.first().map_or(0, |p| p.1);
    let mut rb = b.first().map_or(0, |p| p.1);
    loop {
        match (i < a.len(), j < b.len()) {
            (false, false) => return Ordering::Equal,
            (false, true) => return Ordering::Less,
            (true, false) => return Ordering::Greater,
            _ => {}
        }
        if a[i].0 != b[j].0 {
            return a[i].0.cmp(&b[j].0);
        }
        let step = ra.min(rb);
        ra -= step;
        rb -= step;
        if ra == 0 {
            i += 1;
            ra = a.get(i).map_or(0, |p| p.1);
        }
        if rb == 0 {
            j += 1;
            rb = b.get(j).map_or(0, |p| p.1);
        }
    }
}

/// Degree first, then the ascending list of indices compared lexicographically.
impl Ord for FockMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.doubled_degree
            .cmp(&other.doubled_degree)
            .then_with(|| cmp_expanded(&self.parts, &other.parts))
    }
}

impl PartialOrd for FockMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FockMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(j, k) in self.parts.iter().rev() {
            write!(f, "χ_{{-{}}}", fmt_doubled(j as i64))?;
            if k > 1 {
                write!(f, "^{k}")?;
            }
        }
        write!(f, "|0⟩")
    }
}

/// Single mode χ_n on a monomial; `None` when the result vanishes.
pub fn mode_on_monomial(n: HalfOdd, m: &FockMonomial) -> Option<(FockMonomial, i64)> {
    let t = n.twice();
    if t < 0 {
        Some((m.created((-t) as u32), 1))
    } else {
        let (rest, k) = m.annihilated(t as u32)?;
        Some((rest, k as i64 * n.sign()))
    }
}

/// :χ_a χ_b: on a monomial, annihilation mode applied first.
pub fn normal_pair_on_monomial(a: HalfOdd, b: HalfOdd, m: &FockMonomial) -> Option<(FockMonomial, i64)> {
    let (first, second) = if a.is_annihilation() && !b.is_annihilation() { (a, b) } else { (b, a) };
    let (m1, c1) = mode_on_monomial(first, m)?;
    let (m2, c2) = mode_on_monomial(second, &m1)?;
    Some((m2, c1 * c2))
}

/// Finite linear combination of monomials with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FockVector {
    terms: BTreeMap<FockMonomial, Rational>,
}

impl FockVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn vacuum() -> Self {
        Self::from_monomial(FockMonomial::vacuum())
    }

    pub fn from_monomial(m: FockMonomial) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(m, Rational::one());
        FockVector { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (FockMonomial, Rational)>>(iter: I) -> Self {
        let mut v = Self::zero();
        for (m, c) in iter {
            v.add_term(m, c);
        }
        v
    }

    pub fn add_term(&mut self, m: FockMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &FockVector, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.terms {
            self.add_term(m.clone(), x * c);
        }
    }

    pub fn add(&self, other: &FockVector) -> FockVector {
        let mut r = self.clone();
        r.add_scaled(other, &Rational::one());
        r
    }

    pub fn sub(&self, other: &FockVector) -> FockVector {
        let mut r = self.clone();
        r.add_scaled(other, &-Rational::one());
        r
    }

    pub fn scale(&self, c: &Rational) -> FockVector {
        if c.is_zero() {
            return Self::zero();
        }
        FockVector { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &FockMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Largest doubled index appearing in any monomial.
    pub fn max_index(&self) -> u32 {
        self.terms.keys().map(FockMonomial::max_index).max().unwrap_or(0)
    }

    pub fn max_doubled_degree(&self) -> u32 {
        self.terms.keys().map(FockMonomial::doubled_degree).max().unwrap_or(0)
    }

    /// The common doubled degree, if the vector is nonzero and homogeneous.
    pub fn homogeneous_doubled_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(FockMonomial::doubled_degree);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn homogeneous_charge(&self) -> Option<i32> {
        let mut it = self.terms.keys().map(FockMonomial::charge);
        let c = it.next()?;
        it.all(|e| e == c).then_some(c)
    }

    pub fn truncated(&self, max_doubled_degree: u32) -> FockVector {
        FockVector {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.doubled_degree() <= max_doubled_degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn charge_components(&self) -> BTreeMap<i32, FockVector> {
        let mut out: BTreeMap<i32, FockVector> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.charge()).or_default().terms.insert(m.clone(), c.clone());
        }
        out
    }

    /// Scales so that the first nonzero coefficient (monomial order) is 1.
    pub fn normalized(&self) -> FockVector {
        match self.terms.values().next() {
            None => Self::zero(),
            Some(c) => self.scale(&c.recip()),
        }
    }

    /// `Some(c)` if `self = c·other` (both nonzero).
    pub fn ratio_to(&self, other: &FockVector) -> Option<Rational> {
        let (m, c) = other.terms.iter().next()?;
        let r = self.coefficient(m) / c;
        if self.sub(&other.scale(&r)).is_zero() && !r.is_zero() {
            Some(r)
        } else {
            None
        }
    }

    /// Applies a monomial-level map with integer coefficients, all scaled by `unit`.
    pub fn map_terms<F>(&self, unit: &Rational, mut f: F) -> FockVector
    where
        F: FnMut(&FockMonomial, &mut Vec<(FockMonomial, i64)>),
    {
        let mut out = FockVector::zero();
        let mut buf = Vec::new();
        for (m, c) in &self.terms {
            buf.clear();
            f(m, &mut buf);
            for (m2, k) in buf.drain(..) {
                out.add_term(m2, c * unit * Rational::from_integer(BigInt::from(k)));
            }
        }
        out
    }
}

impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let (sign, mag) = if c.is_negative() { ("-", -c.clone()) } else { ("+", c.clone()) };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if !mag.is_one() {
                write!(f, "({mag})")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// χ_n applied to a vector.
pub fn apply_mode(n: HalfOdd, v: &FockVector) -> FockVector {
    v.map_terms(&Rational::one(), |m, out| out.extend(mode_on_monomial(n, m)))
}

/// :χ_m χ_l: applied to a vector.
pub fn apply_normal_pair(m: HalfOdd, l: HalfOdd, v: &FockVector) -> FockVector {
    v.map_terms(&Rational::one(), |mono, out| out.extend(normal_pair_on_monomial(m, l, mono)))
}

/// All monomials of doubled degree `d2` (partitions of `d2` into odd parts), sorted.
pub fn monomials_of_degree(d2: u32) -> Vec<FockMonomial> {
    let mut out = Vec::new();
    let mut stack: Vec<u32> = Vec::new();
    fn rec(rest: u32, max_part: u32, stack: &mut Vec<u32>, out: &mut Vec<FockMonomial>) {
        if rest == 0 {
            out.push(FockMonomial::from_doubled_indices(stack).expect("odd parts"));
            return;
        }
        let mut p = max_part.min(rest);
        if p.is_multiple_of(2) {
            p -= 1;
        }
        while p >= 1 {
            stack.push(p);
            rec(rest - p, p, stack, out);
            stack.pop();
            if p < 2 {
                break;
            }
            p -= 2;
        }
    }
    rec(d2, d2.max(1), &mut stack, &mut out);
    out.sort();
    out
}

/// All monomials of doubled degree ≤ `max_d2`, sorted.
pub fn monomials_up_to(max_d2: u32) -> Vec<FockMonomial> {
    (0..=max_d2).flat_map(monomials_of_degree).collect()
}

/// Element of F ⊗ F.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TensorVector {
    terms: BTreeMap<(FockMonomial, FockMonomial), Rational>,
}

impl TensorVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn tensor(a: &FockVector, b: &FockVector) -> Self {
        let mut t = Self::zero();
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                t.add_term(ma.clone(), mb.clone(), ca * cb);
            }
        }
        t
    }

    pub fn add_term(&mut self, left: FockMonomial, right: FockMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let key = (left, right);
        let e = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add_scaled(&mut self, other: &TensorVector, c: &Rational) {
        for ((l, r), x) in &other.terms {
            self.add_term(l.clone(), r.clone(), x * c);
        }
    }

    pub fn sub(&self, other: &TensorVector) -> TensorVector {
        let mut r = self.clone();
        r.add_scaled(other, &-Rational::one());
        r
    }

    pub fn scale(&self, c: &Rational) -> TensorVector {
        let mut r = Self::zero();
        r.add_scaled(self, c);
        r
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(FockMonomial, FockMonomial), &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, left: &FockMonomial, right: &FockMonomial) -> Rational {
        self.terms.get(&(left.clone(), right.clone())).cloned().unwrap_or_else(Rational::zero)
    }

    /// Largest doubled index in either factor.
    pub fn max_index(&self) -> u32 {
        self.terms.keys().map(|(l, r)| l.max_index().max(r.max_index())).max().unwrap_or(0)
    }

    pub fn max_total_doubled_degree(&self) -> u32 {
        self.terms.keys().map(|(l, r)| l.doubled_degree() + r.doubled_degree()).max().unwrap_or(0)
    }

    /// Keeps the components with doubled bidegree (d1, d2) satisfying `keep(d1, d2)`.
    pub fn filtered<F: Fn(u32, u32) -> bool>(&self, keep: F) -> TensorVector {
        TensorVector {
            terms: self
                .terms
                .iter()
                .filter(|((l, r), _)| keep(l.doubled_degree(), r.doubled_degree()))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Applies monomial maps on the left and right factors, scaling by `c`.
    pub fn apply_pair<FL, FR>(&self, c: &Rational, left: FL, right: FR) -> TensorVector
    where
        FL: Fn(&FockMonomial) -> Option<(FockMonomial, i64)>,
        FR: Fn(&FockMonomial) -> Option<(FockMonomial, i64)>,
    {
        let mut out = TensorVector::zero();
        for ((l, r), x) in &self.terms {
            if let (Some((l2, a)), Some((r2, b))) = (left(l), right(r)) {
                out.add_term(l2, r2, x * c * Rational::from_integer(BigInt::from(a * b)));
            }
        }
        out
    }
}

impl fmt::Display for TensorVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|((l, r), c)| format!("({c}) {l} ⊗ {r}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(indices: &[u32]) -> FockMonomial {
        FockMonomial::from_doubled_indices(indices).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn mode_examples() {
        let v = FockVector::from_monomial(mono(&[1]));
        assert_eq!(apply_mode(HalfOdd::of(1), &v), FockVector::vacuum());
        let v = FockVector::from_monomial(mono(&[3]));
        assert_eq!(apply_mode(HalfOdd::of(3), &v), FockVector::vacuum().scale(&q(-1, 1)));
        assert!(apply_mode(HalfOdd::of(1), &FockVector::vacuum()).is_zero());
        let v = FockVector::from_monomial(mono(&[5, 5]));
        assert_eq!(apply_mode(HalfOdd::of(5), &v), FockVector::from_monomial(mono(&[5])).scale(&q(2, 1)));
    }

    #[test]
    fn normal_pair_examples() {
        let v = FockVector::from_monomial(mono(&[1]));
        assert_eq!(apply_normal_pair(HalfOdd::of(-1), HalfOdd::of(1), &v), v);
        assert_eq!(apply_normal_pair(HalfOdd::of(1), HalfOdd::of(-1), &v), v);
        let v = FockVector::from_monomial(mono(&[3, 3]));
        assert_eq!(apply_normal_pair(HalfOdd::of(-3), HalfOdd::of(3), &v), v.scale(&q(-2, 1)));
    }

    #[test]
    fn degree_three_halves_basis() {
        let ms = monomials_of_degree(3);
        assert_eq!(ms, vec![mono(&[1, 1, 1]), mono(&[3])]);
        assert_eq!(monomials_of_degree(0), vec![FockMonomial::vacuum()]);
    }

    #[test]
    fn order_is_degree_then_ascending_lex() {
        let ms = monomials_of_degree(5);
        assert_eq!(ms, vec![mono(&[1, 1, 1, 1, 1]), mono(&[1, 1, 3]), mono(&[5])]);
        assert!(mono(&[1, 1, 1]) < mono(&[1, 1, 1, 1]));
    }

    #[test]
    fn charge_and_degree() {
        let m = mono(&[3, 1]);
        assert_eq!(m.charge(), 0);
        assert_eq!(m.doubled_degree(), 4);
        assert_eq!(mono(&[5, 5]).charge(), 2);
        assert_eq!(mono(&[7]).charge(), -1);
        assert_eq!(m.to_string(), "χ_{-3/2}χ_{-1/2}|0⟩");
    }
}
