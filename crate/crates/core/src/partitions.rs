//! Partition families indexing the Heisenberg decompositions: distinct half-odd
//! partitions, triangular-plus-distinct-half-odd partitions, distinct integer
//! bipartitions with their birank and weight, and the crank.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{CkpError, Result};
use crate::half::fmt_doubled;

/// All partitions of `n` into parts accepted by `allowed`, parts weakly decreasing.
pub fn integer_partitions<F: Fn(u32) -> bool>(n: u32, allowed: F) -> Vec<Vec<u32>> {
    fn rec<F: Fn(u32) -> bool>(rest: u32, max: u32, allowed: &F, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=max.min(rest)).rev() {
            if allowed(p) {
                cur.push(p);
                rec(rest - p, p, allowed, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, n, &allowed, &mut Vec::new(), &mut out);
    out
}

/// Partitions of `total` into exactly `k` distinct positive parts, strictly decreasing.
pub fn distinct_partitions_with_length(total: u32, k: u32) -> Vec<Vec<u32>> {
    fn rec(rest: u32, k: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == 0 {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        // k distinct parts each ≤ max sum to at most k·max − T_{k−1}, at least T_k.
        let tk = k * (k + 1) / 2;
        if rest < tk {
            return;
        }
        for p in (k..=max.min(rest)).rev() {
            if p * k < rest + k * (k - 1) / 2 {
                break;
            }
            cur.push(p);
            rec(rest - p, k - 1, p - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, k, total, &mut Vec::new(), &mut out);
    out
}

pub fn triangular(m: u32) -> u32 {
    m * (m + 1) / 2
}

/// Distinct parts from ℤ≥0 + 1/2, stored doubled and strictly decreasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct HalfOddPartition {
    parts_doubled: Vec<u32>,
}

impl HalfOddPartition {
    pub fn new(mut parts_doubled: Vec<u32>) -> Result<Self> {
        parts_doubled.sort_unstable_by(|a, b| b.cmp(a));
        if parts_doubled.iter().any(|p| p % 2 == 0) || parts_doubled.windows(2).any(|w| w[0] == w[1]) {
            return Err(CkpError::MalformedPartition(format!("{parts_doubled:?}")));
        }
        Ok(HalfOddPartition { parts_doubled })
    }

    pub fn parts_doubled(&self) -> &[u32] {
        &self.parts_doubled
    }

    pub fn doubled_weight(&self) -> u32 {
        self.parts_doubled.iter().sum()
    }
}

impl fmt::Display for HalfOddPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts_doubled.iter().map(|&p| fmt_doubled(p as i64)).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A triangular number T_m together with a distinct half-odd tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TriangularPartition {
    pub triangular_index: u32,
    pub tail: HalfOddPartition,
}

impl TriangularPartition {
    pub fn doubled_weight(&self) -> u32 {
        2 * triangular(self.triangular_index) + self.tail.doubled_weight()
    }
}

impl fmt::Display for TriangularPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T_{}+{}", self.triangular_index, self.tail)
    }
}

/// Distinct half-odd partitions grouped by doubled weight 0..=max_d2.
pub fn enumerate_odp(max_d2: u32) -> Vec<Vec<HalfOddPartition>> {
    let mut out = vec![Vec::new(); max_d2 as usize + 1];
    // Parts are chosen in increasing order, then each list is reversed to decreasing form.
    fn rec_inc(rest: u32, min: u32, cur: &mut Vec<u32>, used: u32, out: &mut Vec<Vec<HalfOddPartition>>) {
        let mut parts = cur.clone();
        parts.reverse();
        out[used as usize].push(HalfOddPartition { parts_doubled: parts });
        let mut p = min;
        while p <= rest {
            cur.push(p);
            rec_inc(rest - p, p + 2, cur, used + p, out);
            cur.pop();
            p += 2;
        }
    }
    rec_inc(max_d2, 1, &mut Vec::new(), 0, &mut out);
    for row in &mut out {
        row.sort();
    }
    out
}

/// Triangular-plus-distinct-half-odd partitions grouped by doubled weight.
pub fn enumerate_ptdo(max_d2: u32) -> Vec<Vec<TriangularPartition>> {
    let odp = enumerate_odp(max_d2);
    let mut out = vec![Vec::new(); max_d2 as usize + 1];
    let mut m = 0;
    while 2 * triangular(m) <= max_d2 {
        let base = 2 * triangular(m);
        for (w, tails) in odp.iter().enumerate().take((max_d2 - base) as usize + 1) {
            for t in tails {
                out[base as usize + w].push(TriangularPartition { triangular_index: m, tail: t.clone() });
            }
        }
        m += 1;
    }
    out
}

pub fn odp_counts(max_d2: u32) -> Vec<u64> {
    let mut c = vec![0u64; max_d2 as usize + 1];
    c[0] = 1;
    let mut p = 1;
    while p <= max_d2 {
        for w in (p..=max_d2).rev() {
            c[w as usize] += c[(w - p) as usize];
        }
        p += 2;
    }
    c
}

pub fn ptdo_counts(max_d2: u32) -> Vec<u64> {
    let odp = odp_counts(max_d2);
    let mut c = vec![0u64; max_d2 as usize + 1];
    let mut m = 0;
    while 2 * triangular(m) <= max_d2 {
        let base = 2 * triangular(m) as usize;
        for w in base..=max_d2 as usize {
            c[w] += odp[w - base];
        }
        m += 1;
    }
    c
}

/// A pair of distinct-part integer partitions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Bipartition {
    pi1: Vec<u32>,
    pi2: Vec<u32>,
}

impl Bipartition {
    pub fn new(mut pi1: Vec<u32>, mut pi2: Vec<u32>) -> Result<Self> {
        for p in [&mut pi1, &mut pi2] {
            p.sort_unstable_by(|a, b| b.cmp(a));
            if p.contains(&0) || p.windows(2).any(|w| w[0] == w[1]) {
                return Err(CkpError::MalformedPartition(format!("{p:?}")));
            }
        }
        Ok(Bipartition { pi1, pi2 })
    }

    pub fn pi1(&self) -> &[u32] {
        &self.pi1
    }

    pub fn pi2(&self) -> &[u32] {
        &self.pi2
    }

    /// #π₂ − #π₁.
    pub fn birank(&self) -> i32 {
        self.pi2.len() as i32 - self.pi1.len() as i32
    }

    /// Twice the weight W = 3n/2 + s/2 + 2ns + 2(|π₁| − T_n) + 2(|π₂| − T_s), n = #π₁, s = #π₂.
    pub fn doubled_weight(&self) -> u32 {
        let (n, s) = (self.pi1.len() as u32, self.pi2.len() as u32);
        let e1 = self.pi1.iter().sum::<u32>() - triangular(n);
        let e2 = self.pi2.iter().sum::<u32>() - triangular(s);
        3 * n + s + 4 * n * s + 4 * (e1 + e2)
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |p: &[u32]| p.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        write!(f, "(({})|({}))", show(&self.pi1), show(&self.pi2))
    }
}

/// All bipartitions with doubled weight ≤ `max_d2`, sorted by (weight, bipartition).
/// At fixed lengths (n, s) the weight is minimal on staircases and grows by 4 per unit of excess,
/// so the search ranges n ≤ max/3, s ≤ max and excess ≤ (max − 3n − s − 4ns)/4 are exhaustive.
pub fn enumerate_bpdi(max_d2: u32) -> Vec<Bipartition> {
    let mut out = Vec::new();
    for n in 0..=max_d2 / 3 {
        for s in 0..=max_d2 {
            let base = 3 * n + s + 4 * n * s;
            if base > max_d2 {
                break;
            }
            let budget = (max_d2 - base) / 4;
            for e1 in 0..=budget {
                let firsts = distinct_partitions_with_length(triangular(n) + e1, n);
                for e2 in 0..=budget - e1 {
                    let seconds = distinct_partitions_with_length(triangular(s) + e2, s);
                    for a in &firsts {
                        for b in &seconds {
                            out.push(Bipartition { pi1: a.clone(), pi2: b.clone() });
                        }
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| a.doubled_weight().cmp(&b.doubled_weight()).then_with(|| a.cmp(b)));
    out
}

/// The crank of a weakly decreasing partition.
pub fn crank(lambda: &[u32]) -> Result<i64> {
    if lambda.windows(2).any(|w| w[0] < w[1]) || lambda.contains(&0) {
        return Err(CkpError::MalformedPartition(format!("{lambda:?}")));
    }
    let omega = lambda.iter().filter(|&&p| p == 1).count() as i64;
    if omega == 0 {
        return Ok(lambda.first().copied().unwrap_or(0) as i64);
    }
    let mu = lambda.iter().filter(|&&p| p as i64 > omega).count() as i64;
    Ok(mu - omega)
}

/// N′(m, n) for 0 ≤ n ≤ max_n, with N′(±1, 1) = 1 and N′(0, 1) = −1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrankTable {
    pub max_n: u32,
    pub counts: BTreeMap<(i64, u32), i64>,
}

impl CrankTable {
    pub fn get(&self, m: i64, n: u32) -> i64 {
        assert!(n <= self.max_n, "crank table computed only up to n = {}", self.max_n);
        self.counts.get(&(m, n)).copied().unwrap_or(0)
    }
}

pub fn crank_counts(max_n: u32) -> CrankTable {
    let mut counts: BTreeMap<(i64, u32), i64> = BTreeMap::new();
    for n in 0..=max_n {
        if n == 1 {
            counts.insert((-1, 1), 1);
            counts.insert((0, 1), -1);
            counts.insert((1, 1), 1);
            continue;
        }
        for lambda in integer_partitions(n, |_| true) {
            let c = crank(&lambda).expect("generated partitions are valid");
            *counts.entry((c, n)).or_default() += 1;
        }
    }
    CrankTable { max_n, counts }
}

/// Σ_{l≥0} N′(m − l, (d − m)/4) for doubled degree `d2 = d`; zero unless (d − m)/4 ∈ ℤ≥0.
pub fn hwv_count_via_crank(table: &CrankTable, d2: u32, m: i64) -> i64 {
    let diff = d2 as i64 - m;
    if diff < 0 || diff % 4 != 0 {
        return 0;
    }
    let n = (diff / 4) as u32;
    let lo = (m - n as i64).max(0);
    (lo..=m + n as i64).map(|l| table.get(m - l, n)).sum()
}
