//! Exact weighted spanning-tree counts.
//!
//! For the product of a perfect tree with a weighted edge, `Â_n = A_n □ wK_2`,
//! write `a_n` for its weighted spanning-tree count and `a'_n` for the part of
//! that count coming from trees that contain the root bag edge. Both obey a
//! joint recursion starting from `a_0 = a'_0 = w`, and the ball `T̂_n` is
//! assembled from an `Â_n` and an `Â_{n-1}`. Three independent routes are
//! provided: the recursions ([`CountTable`]), a fraction-free determinant
//! ([`matrix_tree_count`]) and brute-force enumeration
//! ([`enumerate_spanning_trees`]).

mod determinant;
mod enumerate;
mod ratios;

pub use determinant::{contracted_count, matrix_tree_count};
pub use enumerate::{
    bag_count_law, classify_by_paths, classify_spanning_trees, enumerate_spanning_trees, PathGrouping, SpanningTree,
    DEFAULT_CLASSIFICATION_CAP, DEFAULT_ENUMERATION_CAP,
};
pub use ratios::{exact_ratio_sequence, ratio_sequence, ExactRatioRow, RatioRow};

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational used for every count.
pub type ExactScalar = BigRational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CountError {
    #[error("tree degree must be at least 3, got {0}")]
    InvalidDegree(usize),
    #[error("bag weight must be positive, got {0}")]
    NonPositiveWeight(String),
    #[error("ball count needs n >= 1, got {0}")]
    BallTooSmall(usize),
    #[error("bag-count formula holds for m = 1 < n or 2 <= m < n; got n = {n}, m = {m}")]
    BagCountOutOfRange { n: usize, m: usize },
    #[error("graph has {vertex_count} vertices, above the cap of {cap}")]
    GraphTooLarge { vertex_count: usize, cap: usize },
    #[error("classification needs the fiber K_2")]
    FiberNotEdge,
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

pub(crate) fn check_params(d: usize, w: &ExactScalar) -> Result<(), CountError> {
    if d < 3 {
        return Err(CountError::InvalidDegree(d));
    }
    if !w.is_positive() {
        return Err(CountError::NonPositiveWeight(w.to_string()));
    }
    Ok(())
}

/// `(a_n, a'_n)` for one height.
#[derive(Debug, Clone, PartialEq)]
pub struct CountRow {
    pub a: ExactScalar,
    pub a_prime: ExactScalar,
}

/// Rows `(a_n, a'_n)` for `n = 0, 1, ...` at fixed `d` and `w`. Extending
/// the table only appends rows.
#[derive(Debug, Clone)]
pub struct CountTable {
    d: usize,
    w: ExactScalar,
    rows: Vec<CountRow>,
}

impl CountTable {
    pub fn new(d: usize, w: ExactScalar) -> Result<Self, CountError> {
        check_params(d, &w)?;
        let base = CountRow { a: w.clone(), a_prime: w.clone() };
        Ok(Self { d, w, rows: vec![base] })
    }

    /// Table holding rows `0..=n_max`.
    pub fn up_to(d: usize, w: ExactScalar, n_max: usize) -> Result<Self, CountError> {
        let mut table = Self::new(d, w)?;
        table.extend_to(n_max);
        Ok(table)
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn bag_weight(&self) -> &ExactScalar {
        &self.w
    }

    /// Largest `n` currently stored.
    pub fn height(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn rows(&self) -> &[CountRow] {
        &self.rows
    }

    pub fn extend_to(&mut self, n_max: usize) {
        while self.rows.len() <= n_max {
            let prev = self.rows.last().expect("table is never empty");
            let hang = hanging(prev, &self.w);
            let pow = num_traits::pow(hang.clone(), self.d - 2);
            let a_prime = &self.w * &pow * &hang;
            let a = &a_prime + BigRational::from_integer(BigInt::from(self.d - 1)) * &prev.a * &pow;
            self.rows.push(CountRow { a, a_prime });
        }
    }

    fn row(&mut self, n: usize) -> &CountRow {
        self.extend_to(n);
        &self.rows[n]
    }

    /// `2 a_n + a'_n / w`: weighted ways to hang a copy of `Â_n` below a
    /// bag by its two tree edges so that the result stays a spanning tree.
    pub fn hanging_weight(&mut self, n: usize) -> ExactScalar {
        let w = self.w.clone();
        hanging(self.row(n), &w)
    }

    pub fn a(&mut self, n: usize) -> ExactScalar {
        self.row(n).a.clone()
    }

    pub fn a_prime(&mut self, n: usize) -> ExactScalar {
        self.row(n).a_prime.clone()
    }

    /// `c_n = a'_n / a_n`.
    pub fn c(&self, n: usize) -> Option<ExactScalar> {
        self.rows.get(n).map(|r| &r.a_prime / &r.a)
    }

    /// `s_n = a_{n-1}^{d-1} / a_n`, defined for `n >= 1`.
    pub fn s(&self, n: usize) -> Option<ExactScalar> {
        if n == 0 || n >= self.rows.len() {
            return None;
        }
        Some(num_traits::pow(self.rows[n - 1].a.clone(), self.d - 1) / &self.rows[n].a)
    }

    /// Weighted spanning-tree count of the ball product `T̂_n`.
    pub fn count_ball(&mut self, n: usize) -> Result<ExactScalar, CountError> {
        if n == 0 {
            return Err(CountError::BallTooSmall(n));
        }
        self.extend_to(n);
        let (big, small) = (&self.rows[n], &self.rows[n - 1]);
        let two = BigRational::from_integer(2.into());
        Ok(two * &big.a * &small.a + (&big.a * &small.a_prime + &big.a_prime * &small.a) / &self.w)
    }

    /// Weighted count of spanning trees of `T̂_n` whose path between the two
    /// vertices of the central bag enters exactly `m` bags. Only the range
    /// `m = 1 < n` or `2 <= m < n` is served.
    pub fn count_by_bags(&mut self, n: usize, m: usize) -> Result<ExactScalar, CountError> {
        let in_range = (m == 1 && n > 1) || (m >= 2 && m < n);
        if !in_range {
            return Err(CountError::BagCountOutOfRange { n, m });
        }
        self.extend_to(n);
        let d = self.d;
        if m == 1 {
            let x = self.hanging_weight(n - 1);
            return Ok(&self.w * num_traits::pow(x, d));
        }
        let paths = BigInt::from(d) * num_traits::pow(BigInt::from(d - 1), m - 2);
        let mut total = BigRational::from_integer(paths) * &self.w;
        total *= self.hanging_weight(n - 1) * self.hanging_weight(n - m);
        for i in 1..=m {
            total *= num_traits::pow(self.hanging_weight(n - i), d - 2);
        }
        Ok(total)
    }

    /// CSV with columns `n,a_n,a_prime_n,c_n,s_n`; counts as `num/den`,
    /// ratios as decimals, `s_0` left empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,a_n,a_prime_n,c_n,s_n\n");
        for (n, row) in self.rows.iter().enumerate() {
            let c = self.c(n).map(|c| decimal(&c)).unwrap_or_default();
            let s = self.s(n).map(|s| decimal(&s)).unwrap_or_default();
            let _ = writeln!(out, "{n},{},{},{c},{s}", fraction(&row.a), fraction(&row.a_prime));
        }
        out
    }
}

fn hanging(row: &CountRow, w: &ExactScalar) -> ExactScalar {
    BigRational::from_integer(2.into()) * &row.a + &row.a_prime / w
}

/// `num/den` text of a rational.
pub fn fraction(x: &ExactScalar) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Shortest decimal that round-trips the nearest `f64`.
pub fn decimal(x: &ExactScalar) -> String {
    format!("{:?}", to_f64(x))
}

/// Nearest float, also for numerators and denominators beyond `f64` range.
pub fn to_f64(x: &ExactScalar) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() && (v != 0.0 || x.is_zero()) {
            return v;
        }
    }
    // Scale both parts down to ~64 significant bits.
    let bits = |n: &BigInt| n.bits() as i64;
    let (num, den) = (x.numer(), x.denom());
    let shift_num = (bits(num) - 64).max(0);
    let shift_den = (bits(den) - 64).max(0);
    let n = (num >> shift_num as usize).to_f64().unwrap_or(f64::NAN);
    let d = (den >> shift_den as usize).to_f64().unwrap_or(f64::NAN);
    let exp = shift_num - shift_den;
    (n / d) * 2f64.powi(exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

/// `(a_n, a'_n)` for the perfect-tree product `Â_n`.
pub fn recursion_a(d: usize, w: &ExactScalar, n: usize) -> Result<(ExactScalar, ExactScalar), CountError> {
    let table = CountTable::up_to(d, w.clone(), n)?;
    let row = &table.rows()[n];
    Ok((row.a.clone(), row.a_prime.clone()))
}

/// `t(T̂_n)` for `n >= 1`.
pub fn count_ball(d: usize, w: &ExactScalar, n: usize) -> Result<ExactScalar, CountError> {
    CountTable::new(d, w.clone())?.count_ball(n)
}

/// `t_m(T̂_n)` in the range where the closed product formula applies.
pub fn count_by_bags(d: usize, w: &ExactScalar, n: usize, m: usize) -> Result<ExactScalar, CountError> {
    CountTable::new(d, w.clone())?.count_by_bags(n, m)
}
