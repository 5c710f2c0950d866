//! Truncated multivariate series with exact coefficients.
//!
//! Every exponent is stored doubled. A grading assigns an integer weight to each
//! variable; terms of weight above the bound are discarded. All stored terms have
//! nonnegative weight, so the discarded terms form an ideal and the arithmetic is
//! exact in the quotient. q-dominated series use weight 1 on the doubled q-exponent
//! (the exponent of u = q^{1/2}) and weight 0 on auxiliary variables.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{CkpError, Result};
use crate::Rational;

pub const MAX_VARS: usize = 4;

/// Doubled exponents; unused slots stay 0.
pub type Exps = [i32; MAX_VARS];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grading {
    pub vars: Vec<String>,
    pub weights: Vec<i64>,
    pub bound: i64,
}

impl Grading {
    pub fn new(vars: &[&str], weights: &[i64], bound: i64) -> Arc<Grading> {
        assert!(vars.len() == weights.len() && vars.len() <= MAX_VARS);
        Arc::new(Grading { vars: vars.iter().map(|s| s.to_string()).collect(), weights: weights.to_vec(), bound })
    }

    /// Weight 1 on the first variable (q, doubled) and 0 on the rest.
    pub fn q_dominated(vars: &[&str], bound: i64) -> Arc<Grading> {
        let mut w = vec![0; vars.len()];
        w[0] = 1;
        Grading::new(vars, &w, bound)
    }

    pub fn weight(&self, e: &Exps) -> i64 {
        self.weights.iter().zip(e).map(|(w, x)| w * *x as i64).sum()
    }

    pub fn with_bound(&self, bound: i64) -> Arc<Grading> {
        Arc::new(Grading { bound, ..self.clone() })
    }
}

/// c·x^e.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mono {
    pub coeff: Rational,
    pub exps: Exps,
}

impl Mono {
    pub fn new(coeff: i64, exps: &[i32]) -> Mono {
        let mut e = [0; MAX_VARS];
        e[..exps.len()].copy_from_slice(exps);
        Mono { coeff: Rational::from_integer(BigInt::from(coeff)), exps: e }
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut e = self.exps;
        for (x, y) in e.iter_mut().zip(&other.exps) {
            *x += y;
        }
        Mono { coeff: &self.coeff * &other.coeff, exps: e }
    }

    pub fn pow(&self, k: i32) -> Mono {
        let mut e = self.exps;
        for x in e.iter_mut() {
            *x *= k;
        }
        let coeff = if k >= 0 {
            num_traits::pow(self.coeff.clone(), k as usize)
        } else {
            num_traits::pow(self.coeff.recip(), (-k) as usize)
        };
        Mono { coeff, exps: e }
    }

    pub fn inv(&self) -> Mono {
        self.pow(-1)
    }

    pub fn neg(&self) -> Mono {
        Mono { coeff: -self.coeff.clone(), exps: self.exps }
    }

    pub fn is_constant(&self) -> bool {
        self.exps.iter().all(|&x| x == 0)
    }
}

/// First disagreement between two series, in graded-lex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub exps: Vec<i32>,
    pub left: Rational,
    pub right: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    grading: Arc<Grading>,
    terms: BTreeMap<Exps, Rational>,
}

impl Series {
    pub fn zero(grading: &Arc<Grading>) -> Series {
        Series { grading: grading.clone(), terms: BTreeMap::new() }
    }

    pub fn one(grading: &Arc<Grading>) -> Series {
        Series::constant(grading, Rational::one())
    }

    pub fn constant(grading: &Arc<Grading>, c: Rational) -> Series {
        let mut s = Series::zero(grading);
        s.add_term([0; MAX_VARS], c).expect("constant has weight 0");
        s
    }

    pub fn monomial(grading: &Arc<Grading>, m: &Mono) -> Result<Series> {
        let mut s = Series::zero(grading);
        s.add_term(m.exps, m.coeff.clone())?;
        Ok(s)
    }

    pub fn grading(&self) -> &Arc<Grading> {
        &self.grading
    }

    pub fn bound(&self) -> i64 {
        self.grading.bound
    }

    pub fn weight(&self, e: &Exps) -> i64 {
        self.grading.weight(e)
    }

    /// Adds c·x^e; rejects negative weight, drops weight above the bound.
    pub fn add_term(&mut self, e: Exps, c: Rational) -> Result<()> {
        let w = self.grading.weight(&e);
        if w < 0 {
            return Err(CkpError::NegativeWeight(e[..self.grading.vars.len()].to_vec()));
        }
        if w > self.grading.bound || c.is_zero() {
            return Ok(());
        }
        let slot = self.terms.entry(e).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exps: &[i32]) -> Rational {
        let mut e = [0; MAX_VARS];
        e[..exps.len()].copy_from_slice(exps);
        self.terms.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    fn check(&self, other: &Series) -> Result<()> {
        if self.grading != other.grading {
            return Err(CkpError::IncompatibleSeries);
        }
        Ok(())
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.check(other)?;
        let mut r = self.clone();
        for (e, c) in &other.terms {
            r.add_term(*e, c.clone())?;
        }
        Ok(r)
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Series {
        if c.is_zero() {
            return Series::zero(&self.grading);
        }
        Series { grading: self.grading.clone(), terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect() }
    }

    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.check(other)?;
        let mut r = Series::zero(&self.grading);
        let bound = self.grading.bound;
        for (e1, c1) in &self.terms {
            let w1 = self.weight(e1);
            for (e2, c2) in &other.terms {
                if w1 + self.weight(e2) > bound {
                    continue;
                }
                let mut e = *e1;
                for (x, y) in e.iter_mut().zip(e2) {
                    *x += y;
                }
                r.add_term(e, c1 * c2)?;
            }
        }
        Ok(r)
    }

    /// self·m; the product must have nonnegative weight.
    pub fn mul_mono(&self, m: &Mono) -> Result<Series> {
        let mut r = Series::zero(&self.grading);
        for (e, c) in &self.terms {
            let mut e2 = *e;
            for (x, y) in e2.iter_mut().zip(&m.exps) {
                *x += y;
            }
            r.add_term(e2, c * &m.coeff)?;
        }
        Ok(r)
    }

    fn parameter_check(&self, m: &Mono) -> Result<()> {
        if !m.is_constant() && self.weight(&m.exps) <= 0 {
            return Err(CkpError::NonPositiveParameter(m.exps[..self.grading.vars.len()].to_vec()));
        }
        Ok(())
    }

    /// self·(1 + m); m must be constant or of positive weight.
    pub fn mul_binomial(&self, m: &Mono) -> Result<Series> {
        self.parameter_check(m)?;
        self.add(&self.mul_mono(m)?)
    }

    /// self / (1 + m); m must be constant (≠ −1) or of positive weight.
    pub fn div_binomial(&self, m: &Mono) -> Result<Series> {
        self.parameter_check(m)?;
        if m.is_constant() {
            let d = Rational::one() + &m.coeff;
            if d.is_zero() {
                return Err(CkpError::NonUnitConstant);
            }
            return Ok(self.scale(&d.recip()));
        }
        let neg = m.neg();
        let mut out = self.clone();
        let mut term = self.clone();
        loop {
            term = term.mul_mono(&neg)?;
            if term.is_zero() {
                return Ok(out);
            }
            out = out.add(&term)?;
        }
    }

    /// Multiplicative inverse; the constant term must be the only weight-0 term and nonzero.
    pub fn inverse(&self) -> Result<Series> {
        let c0 = self.coefficient(&[]);
        let zero_weight = self.terms.keys().filter(|e| self.weight(e) == 0).count();
        if c0.is_zero() || zero_weight != 1 {
            return Err(CkpError::NonUnitConstant);
        }
        let inv0 = c0.recip();
        // self = c0(1 + t), 1/self = c0^{-1} Σ (−t)^k, each power raising the weight.
        let mut t = self.scale(&inv0);
        t.terms.remove(&[0; MAX_VARS]);
        let neg_t = t.scale(&-Rational::one());
        let mut out = Series::one(&self.grading);
        let mut power = Series::one(&self.grading);
        loop {
            power = power.mul(&neg_t)?;
            if power.is_zero() {
                return Ok(out.scale(&inv0));
            }
            out = out.add(&power)?;
        }
    }

    /// Keeps only terms of weight ≤ bound, under the grading with that bound.
    pub fn truncate(&self, bound: i64) -> Series {
        let grading = self.grading.with_bound(bound);
        let terms = self.terms.iter().filter(|(e, _)| self.weight(e) <= bound).map(|(e, c)| (*e, c.clone())).collect();
        Series { grading, terms }
    }

    fn graded_key(&self, e: &Exps) -> (i64, Exps) {
        (self.weight(e), *e)
    }

    /// Terms in graded-lex order: weight, then exponents lexicographically.
    pub fn sorted_terms(&self) -> Vec<(Exps, Rational)> {
        let mut v: Vec<(Exps, Rational)> = self.terms.iter().map(|(e, c)| (*e, c.clone())).collect();
        v.sort_by_key(|a| self.graded_key(&a.0));
        v
    }

    /// Smallest exponent (graded-lex) where the two series differ.
    pub fn first_mismatch(&self, other: &Series) -> Option<Mismatch> {
        let mut keys: Vec<Exps> = self.terms.keys().chain(other.terms.keys()).copied().collect();
        keys.sort_by(|a, b| self.graded_key(a).cmp(&self.graded_key(b)).then(Ordering::Equal));
        keys.dedup();
        let n = self.grading.vars.len();
        keys.into_iter().find_map(|e| {
            let (l, r) = (self.coefficient(&e[..n]), other.coefficient(&e[..n]));
            (l != r).then(|| Mismatch { exps: e[..n].to_vec(), left: l, right: r })
        })
    }

    /// Canonical JSON: graded-lex ordered terms [e1, …, ek, num, den] in lowest terms.
    pub fn to_json(&self) -> Value {
        let n = self.grading.vars.len();
        let num = |x: &BigInt| x.to_i64().map(Value::from).unwrap_or_else(|| Value::from(x.to_string()));
        let terms: Vec<Value> = self
            .sorted_terms()
            .into_iter()
            .map(|(e, c)| {
                let mut row: Vec<Value> = e[..n].iter().map(|&x| Value::from(x)).collect();
                row.push(num(c.numer()));
                row.push(num(c.denom()));
                Value::Array(row)
            })
            .collect();
        json!({ "vars": self.grading.vars, "doubled_exponents": true, "terms": terms })
    }

    /// Parses the JSON form back under the given grading.
    pub fn from_json(grading: &Arc<Grading>, v: &Value) -> Result<Series> {
        let bad = || CkpError::IncompatibleSeries;
        let vars: Vec<String> = serde_json::from_value(v.get("vars").cloned().ok_or_else(bad)?).map_err(|_| bad())?;
        if vars != grading.vars {
            return Err(bad());
        }
        let n = vars.len();
        let big = |x: &Value| -> Result<BigInt> {
            match x {
                Value::Number(k) => k.as_i64().map(BigInt::from).ok_or_else(bad),
                Value::String(s) => s.parse().map_err(|_| bad()),
                _ => Err(bad()),
            }
        };
        let mut s = Series::zero(grading);
        for row in v.get("terms").and_then(Value::as_array).ok_or_else(bad)? {
            let row = row.as_array().ok_or_else(bad)?;
            if row.len() != n + 2 {
                return Err(bad());
            }
            let mut e = [0; MAX_VARS];
            for (k, x) in row[..n].iter().enumerate() {
                e[k] = x.as_i64().ok_or_else(bad)? as i32;
            }
            s.add_term(e, Rational::new(big(&row[n])?, big(&row[n + 1])?))?;
        }
        Ok(s)
    }

    /// True iff every exponent of variable `var` (doubled) is divisible by `modulus`.
    pub fn exponents_divisible(&self, var: usize, modulus: i32) -> bool {
        self.terms.keys().all(|e| e[var].rem_euclid(modulus) == 0)
    }

    pub fn all_integer_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn all_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }
}

/// ∏_{n ≥ 1} of the factors (1 + m)^{±1} returned by `factors(n)`. The smallest factor weight
/// must strictly increase with n; the product stops once every factor exceeds the bound.
pub fn product_eval<F>(grading: &Arc<Grading>, mut factors: F) -> Result<Series>
where
    F: FnMut(u32) -> Vec<(Mono, i32)>,
{
    let mut out = Series::one(grading);
    let mut last = i64::MIN;
    for n in 1.. {
        let fs = factors(n);
        let min_w = fs.iter().map(|(m, _)| grading.weight(&m.exps)).min().unwrap_or(i64::MAX);
        if min_w <= last {
            return Err(CkpError::NonIncreasingValuation);
        }
        last = min_w;
        if min_w > grading.bound {
            return Ok(out);
        }
        for (m, power) in fs {
            out = match power {
                1 => out.mul_binomial(&m)?,
                -1 => out.div_binomial(&m)?,
                _ => {
                    let mut o = out;
                    for _ in 0..power.abs() {
                        o = if power > 0 { o.mul_binomial(&m)? } else { o.div_binomial(&m)? };
                    }
                    o
                }
            };
        }
    }
    unreachable!("product loop exits once weights pass the bound")
}

/// Σ_{k ≥ 0} of terms with declared lower bounds on their weight (strictly increasing);
/// summation stops once the declared bound exceeds the truncation.
pub fn sum_eval<F>(grading: &Arc<Grading>, mut term: F) -> Result<Series>
where
    F: FnMut(u32) -> Result<(i64, Option<Series>)>,
{
    let mut out = Series::zero(grading);
    let mut last = i64::MIN;
    for k in 0.. {
        let (val, s) = term(k)?;
        if val <= last {
            return Err(CkpError::NonIncreasingValuation);
        }
        last = val;
        if val > grading.bound {
            return Ok(out);
        }
        if let Some(s) = s {
            if s.terms().any(|(e, _)| s.weight(e) < val) {
                return Err(CkpError::NonIncreasingValuation);
            }
            out = out.add(&s)?;
        }
    }
    unreachable!("sum loop exits once valuations pass the bound")
}

/// (b; step)_∞ = ∏_{i ≥ 0} (1 − b·stepⁱ); `step` must have positive weight.
pub fn pochhammer(grading: &Arc<Grading>, b: &Mono, step: &Mono) -> Result<Series> {
    pochhammer_pow(grading, b, step, 1)
}

/// (b; step)_∞^{power} for power = ±1.
pub fn pochhammer_pow(grading: &Arc<Grading>, b: &Mono, step: &Mono, power: i32) -> Result<Series> {
    pochhammer_into(Series::one(grading), b, step, power)
}

/// s·(b; step)_∞^{power}, one binomial factor at a time.
pub fn pochhammer_into(s: Series, b: &Mono, step: &Mono, power: i32) -> Result<Series> {
    let grading = s.grading().clone();
    if grading.weight(&step.exps) <= 0 {
        return Err(CkpError::NonPositiveParameter(step.exps[..grading.vars.len()].to_vec()));
    }
    let mut out = s;
    let mut cur = b.clone();
    loop {
        if !cur.is_constant() && grading.weight(&cur.exps) > grading.bound {
            return Ok(out);
        }
        let factor = cur.neg();
        out = if power > 0 { out.mul_binomial(&factor)? } else { out.div_binomial(&factor)? };
        cur = cur.mul(step);
    }
}
