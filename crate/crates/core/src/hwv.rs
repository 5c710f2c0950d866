//! Highest weight vectors for the twisted and untwisted Heisenberg actions,
//! and eigenbases of descendants.
//!
//! Solver: the lowest positive mode (h^t_{1/2} or h^ℤ_1) is triangular with
//! respect to κ, the number of factors χ_{−1/2} (twisted) or χ_{−1/2}, χ_{−3/2}
//! (untwisted). The output monomial μ meets the column μ·χ_{−1/2}² (resp.
//! μ·χ_{−1/2}χ_{−3/2}) with a nonzero coefficient, and every other column in that
//! row has κ at most κ(pivot) − 2. Back-substitution in increasing κ yields a
//! kernel basis indexed by the free columns; the remaining modes then act on
//! that much smaller space.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CkpError, Result};
use crate::field::{canonical_basis, Echelon, Field, Fp};
use crate::fock::{monomials_of_degree, FockMonomial, FockVector, HalfOdd};
use crate::heisenberg::{
    eigenvalue, heis_twisted, heis_twisted_twice_on_monomial, heis_untwisted, heis_untwisted_twice_on_monomial,
    GradedOperator,
};
use crate::partitions::integer_partitions;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algebra {
    Untwisted,
    Twisted,
}

impl std::str::FromStr for Algebra {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "untwisted" => Ok(Algebra::Untwisted),
            "twisted" => Ok(Algebra::Twisted),
            _ => Err(format!("unknown algebra {s:?}")),
        }
    }
}

/// Positive modes that can act nontrivially at doubled degree `d2`:
/// integers n with 4n ≤ d2, or doubled half-odd N with 2N ≤ d2.
pub fn positive_modes(algebra: Algebra, d2: u32) -> Vec<i32> {
    let d2 = d2 as i32;
    match algebra {
        Algebra::Untwisted => (1..).take_while(|n| 4 * n <= d2).collect(),
        Algebra::Twisted => (1..).step_by(2).take_while(|n| 2 * n <= d2).collect(),
    }
}

fn mode_twice_terms(algebra: Algebra, mode: i32, m: &FockMonomial, out: &mut Vec<(FockMonomial, i64)>) {
    match algebra {
        Algebra::Untwisted => heis_untwisted_twice_on_monomial(mode, m, out),
        Algebra::Twisted => heis_twisted_twice_on_monomial(HalfOdd::of(mode), m, out),
    }
}

/// Applies the positive (or negative) mode with the given identifier.
pub fn apply_heis(algebra: Algebra, mode: i32, v: &FockVector) -> FockVector {
    match algebra {
        Algebra::Untwisted => heis_untwisted(mode, v),
        Algebra::Twisted => heis_twisted(HalfOdd::of(mode), v),
    }
}

fn kappa(algebra: Algebra, m: &FockMonomial) -> u32 {
    match algebra {
        Algebra::Twisted => m.multiplicity(1),
        Algebra::Untwisted => m.multiplicity(1) + m.multiplicity(3),
    }
}

fn pivot_column(algebra: Algebra, row: &FockMonomial) -> FockMonomial {
    match algebra {
        Algebra::Twisted => row.created(1).created(1),
        Algebra::Untwisted => row.created(1).created(3),
    }
}

/// True iff every positive mode of `algebra` annihilates `v`.
pub fn is_hwv(algebra: Algebra, v: &FockVector) -> bool {
    positive_modes(algebra, v.max_doubled_degree()).into_iter().all(|n| apply_heis(algebra, n, v).is_zero())
}

/// Kernel of all positive modes on span(`cols`), as coordinate vectors.
/// `cols` must be closed under the Heisenberg action up to degree (a degree or degree-charge block).
fn solve_block<F: Field>(algebra: Algebra, cols: &[FockMonomial]) -> Vec<Vec<F>> {
    let n = cols.len();
    if n == 0 {
        return Vec::new();
    }
    let d2 = cols[0].doubled_degree();
    let index: HashMap<&FockMonomial, usize> = cols.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let modes = positive_modes(algebra, d2);
    if modes.is_empty() {
        return (0..n).map(|i| unit_vector(n, i)).collect();
    }

    let mut rows: HashMap<FockMonomial, BTreeMap<usize, i64>> = HashMap::new();
    let mut buf = Vec::new();
    for (j, m) in cols.iter().enumerate() {
        buf.clear();
        mode_twice_terms(algebra, modes[0], m, &mut buf);
        for (mu, c) in buf.drain(..) {
            *rows.entry(mu).or_default().entry(j).or_insert(0) += c;
        }
    }
    let mut pivot_rows: Vec<(u32, usize, BTreeMap<usize, i64>)> = rows
        .into_iter()
        .map(|(mu, entries)| {
            let p = index[&pivot_column(algebra, &mu)];
            (kappa(algebra, &cols[p]), p, entries)
        })
        .collect();
    pivot_rows.sort_by_key(|r| (r.0, r.1));

    let mut is_pivot = vec![false; n];
    for (_, p, _) in &pivot_rows {
        is_pivot[*p] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&j| !is_pivot[j]).collect();
    let nf = free.len();
    let mut b: Vec<Vec<F>> = vec![Vec::new(); n];
    for (k, &f) in free.iter().enumerate() {
        b[f] = unit_vector(nf, k);
    }
    for (_, p, entries) in &pivot_rows {
        let c = F::from_i64(entries[p]);
        assert!(!c.is_zero(), "pivot coefficient vanished");
        let mut acc = vec![F::zero(); nf];
        for (&j, &a) in entries {
            if j == *p || a == 0 {
                continue;
            }
            let a = F::from_i64(a);
            debug_assert_eq!(b[j].len(), nf, "column solved out of order");
            for (x, y) in acc.iter_mut().zip(&b[j]) {
                if !y.is_zero() {
                    *x = x.sub_mul(&a, y);
                }
            }
        }
        let inv = c.inv();
        b[*p] = acc.into_iter().map(|x| x.mul(&inv)).collect();
    }

    let mut ech = Echelon::<F>::new(nf);
    for &mode in &modes[1..] {
        let mut residual: HashMap<FockMonomial, Vec<F>> = HashMap::new();
        for (j, m) in cols.iter().enumerate() {
            if b[j].iter().all(F::is_zero) {
                continue;
            }
            buf.clear();
            mode_twice_terms(algebra, mode, m, &mut buf);
            for (mu, c) in buf.drain(..) {
                let c = F::from_i64(c);
                let row = residual.entry(mu).or_insert_with(|| vec![F::zero(); nf]);
                for (x, y) in row.iter_mut().zip(&b[j]) {
                    if !y.is_zero() {
                        *x = x.add(&c.mul(y));
                    }
                }
            }
        }
        let mut keys: Vec<FockMonomial> = residual.keys().cloned().collect();
        keys.sort();
        for key in keys {
            let row = residual.remove(&key).expect("key present");
            ech.push(row);
            if ech.is_full() {
                return Vec::new();
            }
        }
    }
    ech.kernel()
        .into_iter()
        .map(|k| {
            b.iter()
                .map(|row| row.iter().zip(&k).fold(F::zero(), |acc, (x, y)| acc.add(&x.mul(y))))
                .collect()
        })
        .collect()
}

fn unit_vector<F: Field>(n: usize, i: usize) -> Vec<F> {
    let mut v = vec![F::zero(); n];
    v[i] = F::one();
    v
}

/// Monomials of doubled degree `d2` grouped into the blocks the solver treats independently.
fn blocks(algebra: Algebra, d2: u32) -> Vec<(Option<i32>, Vec<FockMonomial>)> {
    let all = monomials_of_degree(d2);
    match algebra {
        Algebra::Twisted => vec![(None, all)],
        Algebra::Untwisted => {
            let mut by_charge: BTreeMap<i32, Vec<FockMonomial>> = BTreeMap::new();
            for m in all {
                by_charge.entry(m.charge()).or_default().push(m);
            }
            by_charge.into_iter().map(|(c, ms)| (Some(c), ms)).collect()
        }
    }
}

/// Basis of highest weight vectors at one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HwvBasis {
    pub doubled_degree: u32,
    pub algebra: Algebra,
    pub vectors: Vec<FockVector>,
    /// Charges of the vectors; untwisted only.
    pub charges: Option<Vec<i32>>,
}

impl HwvBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Exact basis of highest weight vectors at doubled degree `d2`, in reduced row
/// echelon form over the monomial order (first nonzero coordinate 1).
pub fn hwv_basis(algebra: Algebra, d2: u32) -> HwvBasis {
    let mut found: Vec<(FockVector, Option<i32>)> = Vec::new();
    for (charge, cols) in blocks(algebra, d2) {
        let kernel = solve_block::<Rational>(algebra, &cols);
        for row in canonical_basis(cols.len(), kernel) {
            let v = FockVector::from_terms(cols.iter().cloned().zip(row));
            found.push((v, charge));
        }
    }
    // Disjoint supports: the union of block-wise echelon bases is the global one.
    found.sort_by(|a, b| {
        let lead = |v: &FockVector| v.terms().next().map(|(m, _)| m.clone());
        lead(&a.0).cmp(&lead(&b.0))
    });
    let charges = (algebra == Algebra::Untwisted).then(|| found.iter().map(|(_, c)| c.unwrap_or(0)).collect());
    HwvBasis { doubled_degree: d2, algebra, vectors: found.into_iter().map(|(v, _)| v).collect(), charges }
}

/// Highest weight vector counts at doubled degree `d2` computed over F_p, keyed by
/// charge (untwisted) or by 0 (twisted). These bound the rational counts from above.
pub fn hwv_counts_mod_p(algebra: Algebra, d2: u32) -> BTreeMap<i32, usize> {
    let mut out = BTreeMap::new();
    for (charge, cols) in blocks(algebra, d2) {
        let k = solve_block::<Fp>(algebra, &cols).len();
        if k > 0 {
            out.insert(charge.unwrap_or(0), k);
        }
    }
    out
}

/// Number of descendants per doubled degree gap for one highest weight vector.
fn descendant_counts(algebra: Algebra, max_gap: u32) -> Vec<u64> {
    let mut c = vec![0u64; max_gap as usize + 1];
    c[0] = 1;
    // twisted: h^t_{−n} raises the doubled degree by 4n = 2, 6, 10, …; untwisted: 4, 8, 12, …
    let steps: Vec<u32> = match algebra {
        Algebra::Twisted => (1..).step_by(2).map(|k| 2 * k).take_while(|&s| s <= max_gap).collect(),
        Algebra::Untwisted => (1..).map(|k| 4 * k).take_while(|&s| s <= max_gap).collect(),
    };
    for s in steps {
        for g in s..=max_gap {
            c[g as usize] += c[(g - s) as usize];
        }
    }
    c
}

/// Highest weight vector counts for all doubled degrees ≤ `max_d2`, keyed by (doubled degree, charge).
/// Computed over F_p and certified: the module decomposition they imply must reproduce the
/// number of monomials at every degree (and charge), which forces the counts to equal the rational ones.
pub fn certified_hwv_counts(algebra: Algebra, max_d2: u32) -> Result<BTreeMap<(u32, i32), usize>> {
    let per_degree: Vec<BTreeMap<i32, usize>> =
        (0..=max_d2).into_par_iter().map(|d2| hwv_counts_mod_p(algebra, d2)).collect();
    let desc = descendant_counts(algebra, max_d2);
    for d2 in 0..=max_d2 {
        let mut expected: BTreeMap<i32, usize> = BTreeMap::new();
        for m in monomials_of_degree(d2) {
            let key = if algebra == Algebra::Untwisted { m.charge() } else { 0 };
            *expected.entry(key).or_default() += 1;
        }
        let mut got: BTreeMap<i32, usize> = BTreeMap::new();
        for (k, counts) in per_degree.iter().enumerate().take(d2 as usize + 1) {
            let mult = desc[(d2 as usize) - k] as usize;
            if mult == 0 {
                continue;
            }
            for (&c, &n) in counts {
                *got.entry(c).or_default() += n * mult;
            }
        }
        if got != expected {
            let rank: usize = got.values().sum();
            let total: usize = expected.values().sum();
            return Err(CkpError::RankDeficient { doubled_degree: d2, rank, expected: total });
        }
    }
    let mut out = BTreeMap::new();
    for (d2, counts) in per_degree.into_iter().enumerate() {
        for (c, n) in counts {
            out.insert((d2 as u32, c), n);
        }
    }
    Ok(out)
}

/// A descendant of a highest weight vector with its grading eigenvalues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eigenvector {
    pub vector: FockVector,
    /// Doubled degree of the descendant.
    pub doubled_degree: u32,
    /// Modes applied, as doubled half-odd (twisted) or integer (untwisted) raising indices.
    pub raising: Vec<u32>,
    pub charge: Option<i32>,
    /// L^t_0 (twisted) or L^h_0 at a = b = 0 (untwisted).
    pub grading: Rational,
}

/// Descendants h_{−n_s}⋯h_{−n_1} v of all highest weight vectors v, spanning doubled degree `d2`.
/// Fails if the vectors are dependent or do not span.
pub fn eigenbasis(algebra: Algebra, d2: u32) -> Result<Vec<Eigenvector>> {
    let zero = Rational::from_integer(0.into());
    let grading_op = match algebra {
        Algebra::Twisted => GradedOperator::lt0(),
        Algebra::Untwisted => GradedOperator::lh0(zero.clone(), zero.clone()),
    };
    let l0 = GradedOperator::l0();
    let mut out = Vec::new();
    for k in 0..=d2 {
        let gap = d2 - k;
        let raisings: Vec<Vec<u32>> = match algebra {
            Algebra::Twisted if gap.is_multiple_of(2) => integer_partitions(gap / 2, |p| p % 2 == 1),
            Algebra::Untwisted if gap.is_multiple_of(4) => integer_partitions(gap / 4, |_| true),
            _ => continue,
        };
        if raisings.is_empty() {
            continue;
        }
        let hw = hwv_basis(algebra, k);
        for (i, v) in hw.vectors.iter().enumerate() {
            for lam in &raisings {
                let mut w = v.clone();
                for &p in lam.iter().rev() {
                    w = apply_heis(algebra, -(p as i32), &w);
                }
                let deg = eigenvalue(&l0, &w)?;
                debug_assert_eq!(deg, Rational::new((d2 as i64).into(), 4.into()));
                let grading = eigenvalue(&grading_op, &w)?;
                let charge = match algebra {
                    Algebra::Untwisted => {
                        let c = eigenvalue(&GradedOperator::charge(), &w)?;
                        debug_assert_eq!(Some(&c), hw.charges.as_ref().map(|cs| Rational::from_integer(cs[i].into())).as_ref());
                        Some(c.to_integer().try_into().expect("small charge"))
                    }
                    Algebra::Twisted => None,
                };
                out.push(Eigenvector { vector: w, doubled_degree: d2, raising: lam.clone(), charge, grading });
            }
        }
    }
    let cols = monomials_of_degree(d2);
    let coords = out.iter().map(|e| cols.iter().map(|m| e.vector.coefficient(m)).collect::<Vec<_>>());
    let r = crate::field::rank(cols.len(), coords);
    if r != cols.len() || out.len() != cols.len() {
        return Err(CkpError::RankDeficient { doubled_degree: d2, rank: r, expected: cols.len() });
    }
    Ok(out)
}
