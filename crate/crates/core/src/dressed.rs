//! Dressed modes H^β_{(k)}, H^γ_{(k)} (untwisted, in w = z²) and H^χ_{(n)} (twisted),
//! and the bipartition → highest weight vector constructor.
//!
//! With h = h^ℤ and w = z²:
//!   H^β(w) = exp(−Σ h_{−n} wⁿ/n) · β(w) · w^{−h₀} · exp(Σ h_n w^{−n}/n)
//!   H^γ(w) = exp(Σ h_{−n} wⁿ/n) · γ(w) · w^{h₀} · exp(−Σ h_n w^{−n}/n)
//! where β(w) = Σ_{2a ≡ 1 (4)} χ_a w^{−(2a+3)/4}, γ(w) = Σ_{2a ≡ 3 (4)} χ_a w^{−(2a+1)/4},
//! and H_{(k)} is the coefficient of w^{−k−1}. With h = h^t:
//!   H^χ(z) = exp(−Σ_{m odd} (2/m) h_{−m/2} z^m) · χ(z) · exp(Σ_{m odd} (2/m) h_{m/2} z^{−m}),
//! H^χ_{(n)} being the coefficient of z^{−n−1/2}. The w^{∓h₀} factors act on
//! charge components during extraction.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::Result;
use crate::fock::{apply_mode, FockVector, HalfOdd};
use crate::heisenberg::{GradedOperator, Shift};
use crate::hwv::{apply_heis, Algebra};
use crate::partitions::Bipartition;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DressedKind {
    Beta,
    Gamma,
    Chi,
}

/// A single dressed mode; `mode` is an integer for β, γ and a doubled half-odd index for χ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DressedOperator {
    pub kind: DressedKind,
    pub mode: i32,
}

impl DressedOperator {
    pub fn beta(k: i32) -> Self {
        DressedOperator { kind: DressedKind::Beta, mode: k }
    }

    pub fn gamma(k: i32) -> Self {
        DressedOperator { kind: DressedKind::Gamma, mode: k }
    }

    pub fn chi(n: HalfOdd) -> Self {
        DressedOperator { kind: DressedKind::Chi, mode: n.twice() }
    }

    pub fn to_graded(self) -> GradedOperator {
        let label = match self.kind {
            DressedKind::Beta => format!("H^β_({})", self.mode),
            DressedKind::Gamma => format!("H^γ_({})", self.mode),
            DressedKind::Chi => format!("H^χ_({})", crate::half::fmt_doubled(self.mode as i64)),
        };
        let charge = match self.kind {
            DressedKind::Beta => Shift::Fixed(-1),
            DressedKind::Gamma => Shift::Fixed(1),
            DressedKind::Chi => Shift::Mixed,
        };
        GradedOperator::new(label, Shift::Mixed, charge, move |v| dressed_mode(self, v))
    }
}

/// Coefficients C_0..=C_upto of exp(sign·Σ_s (f/s)·h_{±s} x^s)·v, where s runs over
/// positive integers (untwisted, f = 1) or odd integers with h_{±s/2} (twisted, f = 2).
/// Uses k·C_k = sign·f·Σ_s h_{±s} C_{k−s}.
fn exp_coefficients(algebra: Algebra, sign: i64, raising: bool, v: &FockVector, upto: usize) -> Vec<FockVector> {
    let (f, step) = match algebra {
        Algebra::Untwisted => (1, 1),
        Algebra::Twisted => (2, 2),
    };
    let mut c = vec![v.clone()];
    for k in 1..=upto {
        let mut acc = FockVector::zero();
        let mut s = 1;
        while s <= k {
            if !c[k - s].is_zero() {
                let mode = if raising { -(s as i32) } else { s as i32 };
                acc = acc.add(&apply_heis(algebra, mode, &c[k - s]));
            }
            s += step;
        }
        let scale = Rational::new(BigInt::from(sign * f), BigInt::from(k as i64));
        c.push(acc.scale(&scale));
    }
    c
}

/// Σ_i Q_i X_i with Q the coefficients of the raising exponential.
fn apply_raising(algebra: Algebra, sign: i64, pieces: BTreeMap<usize, FockVector>) -> FockVector {
    let mut out = FockVector::zero();
    for (i, x) in pieces {
        if x.is_zero() {
            continue;
        }
        let q = exp_coefficients(algebra, sign, true, &x, i);
        out = out.add(&q[i]);
    }
    out
}

fn add_piece(pieces: &mut BTreeMap<usize, FockVector>, i: usize, v: FockVector) {
    if v.is_zero() {
        return;
    }
    let e = pieces.entry(i).or_default();
    *e = e.add(&v);
}

fn untwisted_mode(beta: bool, k: i32, v: &FockVector) -> FockVector {
    // charge factor, field offset r (field term χ_a w^{−(2a+r)/4}), lowering and raising signs
    let (s, r, lower_sign, raise_sign) = if beta { (-1i64, 3i64, 1, -1) } else { (1, 1, -1, 1) };
    let target = -(k as i64) - 1;
    let residue = (4 - r) as i32;
    let lowering = exp_coefficients(Algebra::Untwisted, lower_sign, false, v, (v.max_doubled_degree() / 4) as usize);
    let mut pieces = BTreeMap::new();
    for (j, pj) in lowering.iter().enumerate() {
        for (c, comp) in pj.charge_components() {
            // Total w-exponent −j + s·c − (a2 + r)/4 + i must equal the target.
            let base = -(j as i64) + s * c as i64 - target;
            let mut modes: Vec<i32> = Vec::new();
            let mut a2 = 4 * base - r;
            while a2 < 0 {
                modes.push(a2 as i32);
                a2 += 4;
            }
            let mut present: Vec<i32> = comp
                .terms()
                .flat_map(|(m, _)| m.parts().iter().map(|p| p.0 as i32).collect::<Vec<_>>())
                .filter(|&p| p.rem_euclid(4) == residue)
                .collect();
            present.sort_unstable();
            present.dedup();
            modes.extend(present);
            for a2 in modes {
                let i = (a2 as i64 + r) / 4 - base;
                if i < 0 {
                    continue;
                }
                add_piece(&mut pieces, i as usize, apply_mode(HalfOdd::of(a2), &comp));
            }
        }
    }
    apply_raising(Algebra::Untwisted, raise_sign, pieces)
}

fn twisted_mode(n2: i32, v: &FockVector) -> FockVector {
    let lowering = exp_coefficients(Algebra::Twisted, 1, false, v, (v.max_doubled_degree() / 2) as usize);
    let mut pieces = BTreeMap::new();
    for (j, pj) in lowering.iter().enumerate() {
        if pj.is_zero() {
            continue;
        }
        // z-exponent −j − (a + 1/2) + i = −n − 1/2, so i = a − n + j.
        let lo = n2 - 2 * j as i32;
        let mut modes: Vec<i32> = (lo..0).filter(|a| a.rem_euclid(2) == 1).collect();
        let mut present: Vec<i32> =
            pj.terms().flat_map(|(m, _)| m.parts().iter().map(|p| p.0 as i32).collect::<Vec<_>>()).collect();
        present.sort_unstable();
        present.dedup();
        modes.extend(present.into_iter().filter(|&p| p >= lo));
        for a2 in modes {
            let i = ((a2 - n2) / 2) as usize + j;
            add_piece(&mut pieces, i, apply_mode(HalfOdd::of(a2), pj));
        }
    }
    apply_raising(Algebra::Twisted, -1, pieces)
}

/// Applies a dressed mode to a vector; exact for every finite input.
pub fn dressed_mode(op: DressedOperator, v: &FockVector) -> FockVector {
    match op.kind {
        DressedKind::Beta => untwisted_mode(true, op.mode, v),
        DressedKind::Gamma => untwisted_mode(false, op.mode, v),
        DressedKind::Chi => twisted_mode(op.mode, v),
    }
}

/// Applies a word of dressed modes, rightmost first.
pub fn apply_word(word: &[DressedOperator], v: &FockVector) -> FockVector {
    word.iter().rev().fold(v.clone(), |acc, op| dressed_mode(*op, &acc))
}

/// H^β_{(−m_k)}⋯H^β_{(−m_1)} H^γ_{(−n_s)}⋯H^γ_{(−n_1)}|0⟩ for ((m_k,…,m_1)|(n_s,…,n_1)).
pub fn hwv_from_bipartition(bp: &Bipartition) -> FockVector {
    let word = bipartition_word(bp);
    apply_word(&word, &FockVector::vacuum())
}

/// The dressed word attached to a bipartition, leftmost operator first.
pub fn bipartition_word(bp: &Bipartition) -> Vec<DressedOperator> {
    bp.pi1()
        .iter()
        .map(|&m| DressedOperator::beta(-(m as i32)))
        .chain(bp.pi2().iter().map(|&n| DressedOperator::gamma(-(n as i32))))
        .collect()
}

/// H^χ_{(−n_k)}⋯H^χ_{(−n_1)}|0⟩ for strictly decreasing doubled half-odd parts (n_k, …, n_1).
pub fn twisted_hwv_from_parts(parts_doubled: &[u32]) -> Result<FockVector> {
    let word = parts_doubled
        .iter()
        .map(|&p| HalfOdd::new(-(p as i32)).map(DressedOperator::chi))
        .collect::<Result<Vec<_>>>()?;
    Ok(apply_word(&word, &FockVector::vacuum()))
}
