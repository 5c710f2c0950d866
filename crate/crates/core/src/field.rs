//! Scalar fields for linear algebra: exact rationals and the prime field
//! F_p with p = 2^61 − 1, plus row reduction and kernels.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::Rational;

pub trait Field: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(x: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; callers never pass zero.
    fn inv(&self) -> Self;

    /// self − a·b.
    fn sub_mul(&self, a: &Self, b: &Self) -> Self {
        self.sub(&a.mul(b))
    }
}

impl Field for Rational {
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn one() -> Self {
        <Rational as One>::one()
    }
    fn from_i64(x: i64) -> Self {
        Rational::from_integer(BigInt::from(x))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        self.recip()
    }
}

pub const P61: u64 = (1 << 61) - 1;

/// Element of F_p, p = 2^61 − 1, kept reduced in [0, p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp(u64);

impl Fp {
    pub fn new(x: u64) -> Self {
        Fp(x % P61)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn reduce(x: u128) -> u64 {
        let lo = (x as u64) & P61;
        let hi = (x >> 61) as u64;
        let s = lo + (hi & P61) + ((x >> 122) as u64);
        let s = (s & P61) + (s >> 61);
        if s >= P61 {
            s - P61
        } else {
            s
        }
    }

    fn pow(self, mut e: u64) -> Fp {
        let (mut base, mut acc) = (self, Fp(1));
        while e > 0 {
            if e & 1 == 1 {
                acc = Field::mul(&acc, &base);
            }
            base = Field::mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

impl Field for Fp {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1)
    }
    fn from_i64(x: i64) -> Self {
        let r = x.rem_euclid(P61 as i64);
        Fp(r as u64)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn add(&self, other: &Self) -> Self {
        let s = self.0 + other.0;
        Fp(if s >= P61 { s - P61 } else { s })
    }
    fn sub(&self, other: &Self) -> Self {
        Fp(if self.0 >= other.0 { self.0 - other.0 } else { self.0 + P61 - other.0 })
    }
    fn mul(&self, other: &Self) -> Self {
        Fp(Fp::reduce(self.0 as u128 * other.0 as u128))
    }
    fn neg(&self) -> Self {
        Fp(if self.0 == 0 { 0 } else { P61 - self.0 })
    }
    fn inv(&self) -> Self {
        self.pow(P61 - 2)
    }
}

/// Rows kept in reduced echelon form while new rows are streamed in.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    ncols: usize,
    /// (pivot column, row with 1 at the pivot and 0 at every other stored pivot).
    rows: Vec<(usize, Vec<F>)>,
}

impl<F: Field> Echelon<F> {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    /// Reduces `v` against the stored rows; keeps it if independent.
    pub fn push(&mut self, mut v: Vec<F>) -> bool {
        debug_assert_eq!(v.len(), self.ncols);
        for (p, row) in &self.rows {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    if !r.is_zero() {
                        *x = x.sub_mul(&f, r);
                    }
                }
            }
        }
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].inv();
        for x in v.iter_mut() {
            *x = x.mul(&inv);
        }
        for (_, row) in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for (x, r) in row.iter_mut().zip(&v) {
                    if !r.is_zero() {
                        *x = x.sub_mul(&f, r);
                    }
                }
            }
        }
        let at = self.rows.partition_point(|(q, _)| *q < p);
        self.rows.insert(at, (p, v));
        true
    }

    /// Rows of the reduced row echelon form, sorted by pivot column.
    pub fn rref_rows(&self) -> Vec<Vec<F>> {
        self.rows.iter().map(|(_, r)| r.clone()).collect()
    }

    /// Basis of {x : row·x = 0 for all rows}, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let mut is_pivot = vec![false; self.ncols];
        for (p, _) in &self.rows {
            is_pivot[*p] = true;
        }
        (0..self.ncols)
            .filter(|&c| !is_pivot[c])
            .map(|f| {
                let mut x = vec![F::zero(); self.ncols];
                x[f] = F::one();
                for (p, row) in &self.rows {
                    x[*p] = row[f].neg();
                }
                x
            })
            .collect()
    }
}

/// Reduced row echelon basis of the span of `vectors`.
pub fn canonical_basis<F: Field>(ncols: usize, vectors: impl IntoIterator<Item = Vec<F>>) -> Vec<Vec<F>> {
    let mut e = Echelon::new(ncols);
    for v in vectors {
        e.push(v);
    }
    e.rref_rows()
}

pub fn rank<F: Field>(ncols: usize, vectors: impl IntoIterator<Item = Vec<F>>) -> usize {
    let mut e = Echelon::new(ncols);
    for v in vectors {
        e.push(v);
        if e.is_full() {
            break;
        }
    }
    e.rank()
}
