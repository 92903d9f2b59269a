//! Normalized ratios `c_n = a'_n / a_n` and `s_n = a_{n-1}^{d-1} / a_n`.
//!
//! Dividing the two recursions gives `c_n = (2w + c_{n-1}) / (2w + c_{n-1} + d - 1)`
//! with `c_0 = 1`, and `s_n = c_n / (w (2 + c_{n-1}/w)^{d-1})`. Neither needs
//! the doubly exponential counts themselves.

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::{check_params, CountError, ExactScalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioRow {
    pub n: usize,
    pub c: f64,
    /// Undefined at `n = 0`.
    pub s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactRatioRow {
    pub n: usize,
    pub c: ExactScalar,
    pub s: Option<ExactScalar>,
}

/// Floating-point `(c_n, s_n)` for `n = 0..=n_max`.
pub fn ratio_sequence(d: usize, w: f64, n_max: usize) -> Result<Vec<RatioRow>, CountError> {
    if d < 3 {
        return Err(CountError::InvalidDegree(d));
    }
    if !(w > 0.0 && w.is_finite()) {
        return Err(CountError::NonPositiveWeight(w.to_string()));
    }
    let spread = (d - 1) as f64;
    let mut rows = Vec::with_capacity(n_max + 1);
    rows.push(RatioRow { n: 0, c: 1.0, s: None });
    let mut prev = 1.0;
    for n in 1..=n_max {
        let c = (2.0 * w + prev) / (2.0 * w + prev + spread);
        let s = c / (w * (2.0 + prev / w).powi(d as i32 - 1));
        rows.push(RatioRow { n, c, s: Some(s) });
        prev = c;
    }
    Ok(rows)
}

/// The same ratios in exact arithmetic. Numerators and denominators grow
/// linearly in `n`, so large `d` and `n` stay cheap.
pub fn exact_ratio_sequence(d: usize, w: &ExactScalar, n_max: usize) -> Result<Vec<ExactRatioRow>, CountError> {
    check_params(d, w)?;
    let two = BigRational::from_integer(2.into());
    let spread = BigRational::from_integer((d - 1).into());
    let mut rows = Vec::with_capacity(n_max + 1);
    let mut prev = BigRational::one();
    rows.push(ExactRatioRow { n: 0, c: prev.clone(), s: None });
    for n in 1..=n_max {
        let top = &two * w + &prev;
        let c = &top / (&top + &spread);
        let s = &c / (w * num_traits::pow(&two + &prev / w, d - 1));
        rows.push(ExactRatioRow { n, c: c.clone(), s: Some(s) });
        prev = c;
    }
    Ok(rows)
}
