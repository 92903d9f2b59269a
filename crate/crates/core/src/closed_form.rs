//! Limit constants of the free spanning forest on `T^d □ wK_2`.
//!
//! `c` is the probability that the bag edge at the special vertex of the
//! one-sided tree lies in the forest; it is the positive root of
//! `c^2 + c(2w + d - 2) - 2w = 0`. The number of bags `m` on the forest path
//! joining the two vertices of a bag is distributed as
//!
//! ```text
//! q_1 = (2w + c) c / (2w + 2c)
//! q_m = K r^m                          for m >= 2
//! r   = (d - 1) c / (2w + c)
//! K   = d (2w + c)^2 / ((2w + 2c)(d - 1)^2)
//! ```
//!
//! and the masses add up to one.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClosedFormError {
    #[error("tree degree must be at least 3, got {0}")]
    InvalidDegree(usize),
    #[error("bag weight must be positive and finite, got {0}")]
    InvalidWeight(f64),
    #[error("m_max must be at least 1")]
    EmptyTruncation,
    #[error("geometric ratio {0} is not below 1")]
    RatioNotContracting(f64),
}

fn check(d: usize, w: f64) -> Result<(), ClosedFormError> {
    if d < 3 {
        return Err(ClosedFormError::InvalidDegree(d));
    }
    if !(w > 0.0 && w.is_finite()) {
        return Err(ClosedFormError::InvalidWeight(w));
    }
    Ok(())
}

/// Positive root of the quadratic, via the conjugate form
/// `c = 4w / (b + sqrt(b^2 + 8w))` with `b = 2w + d - 2`, which avoids the
/// cancellation in `(-b + sqrt(b^2 + 8w)) / 2` when `b` is large.
pub fn edge_probability_c(d: usize, w: f64) -> Result<f64, ClosedFormError> {
    check(d, w)?;
    let b = 2.0 * w + d as f64 - 2.0;
    Ok(4.0 * w / (b + (b * b + 8.0 * w).sqrt()))
}

/// `c^2 + c(2w + d - 2) - 2w`.
pub fn quadratic_residual(c: f64, d: usize, w: f64) -> f64 {
    c * c + c * (2.0 * w + d as f64 - 2.0) - 2.0 * w
}

/// `s = c / (w (2 + c/w)^{d-1})`, the limit of `a_{n-1}^{d-1} / a_n`.
pub fn ratio_s(d: usize, w: f64) -> Result<f64, ClosedFormError> {
    let c = edge_probability_c(d, w)?;
    Ok(s_from_c(c, d, w))
}

fn s_from_c(c: f64, d: usize, w: f64) -> f64 {
    c / (w * (2.0 + c / w).powi(d as i32 - 1))
}

/// `r = (d - 1) c / (2w + c)`; errors if it is not below one.
pub fn geometric_ratio(d: usize, w: f64) -> Result<f64, ClosedFormError> {
    let c = edge_probability_c(d, w)?;
    ratio_from_c(c, d, w)
}

fn ratio_from_c(c: f64, d: usize, w: f64) -> Result<f64, ClosedFormError> {
    let r = (d - 1) as f64 * c / (2.0 * w + c);
    if r >= 1.0 || r.is_nan() {
        return Err(ClosedFormError::RatioNotContracting(r));
    }
    Ok(r)
}

/// All constants at one `(d, w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FsfConstants {
    pub d: usize,
    pub w: f64,
    pub c: f64,
    pub s: f64,
    pub r: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

impl FsfConstants {
    pub fn new(d: usize, w: f64) -> Result<Self, ClosedFormError> {
        let c = edge_probability_c(d, w)?;
        let r = ratio_from_c(c, d, w)?;
        let s = s_from_c(c, d, w);
        let spread = (d - 1) as f64;
        let k = d as f64 * (2.0 * w + c).powi(2) / ((2.0 * w + 2.0 * c) * spread * spread);
        Ok(Self { d, w, c, s, r, k })
    }

    /// `P(the bag edge itself joins the two vertices)`.
    pub fn q1(&self) -> f64 {
        (2.0 * self.w + self.c) * self.c / (2.0 * self.w + 2.0 * self.c)
    }

    /// `q_m` for `m >= 1`; zero for `m = 0`.
    pub fn q(&self, m: usize) -> f64 {
        match m {
            0 => 0.0,
            1 => self.q1(),
            _ => self.k * self.r.powi(m as i32),
        }
    }

    /// `sum_{m > m_max} q_m`, in closed form.
    pub fn tail_after(&self, m_max: usize) -> f64 {
        if m_max == 0 {
            return 1.0;
        }
        let first = m_max.max(1) + 1;
        self.k * self.r.powi(first as i32) / (1.0 - self.r)
    }

    /// `q_1 + K r^2 / (1 - r)`, which should be exactly one.
    pub fn total_mass(&self) -> f64 {
        self.q1() + self.tail_after(1)
    }

    pub fn residuals(&self) -> Residuals {
        Residuals {
            quadratic: quadratic_residual(self.c, self.d, self.w),
            total_mass: self.total_mass() - 1.0,
            s_identity: self.s * self.w * (2.0 + self.c / self.w).powi(self.d as i32 - 1) - self.c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    pub quadratic: f64,
    pub total_mass: f64,
    pub s_identity: f64,
}

pub const DEFAULT_M_MAX: usize = 64;

/// Truncated law of the number of bags on the path joining the two
/// vertices of a bag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceDistribution {
    pub d: usize,
    pub w: f64,
    pub m_max: usize,
    /// `q[i]` is `q_{i+1}`.
    pub q: Vec<f64>,
    /// Mass beyond `m_max`.
    pub tail: f64,
}

impl DistanceDistribution {
    pub fn q(&self, m: usize) -> Option<f64> {
        m.checked_sub(1).and_then(|i| self.q.get(i)).copied()
    }

    pub fn mass(&self) -> f64 {
        self.q.iter().sum::<f64>() + self.tail
    }
}

pub fn distance_distribution(d: usize, w: f64, m_max: usize) -> Result<DistanceDistribution, ClosedFormError> {
    if m_max == 0 {
        return Err(ClosedFormError::EmptyTruncation);
    }
    let constants = FsfConstants::new(d, w)?;
    Ok(DistanceDistribution {
        d,
        w,
        m_max,
        q: (1..=m_max).map(|m| constants.q(m)).collect(),
        tail: constants.tail_after(m_max),
    })
}

/// Everything the `closed-form` report prints for one `(d, w)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormReport {
    pub d: usize,
    pub w: f64,
    pub c: f64,
    pub s: f64,
    pub r: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub q: Vec<f64>,
    pub tail: f64,
    pub residuals: Residuals,
}

impl ClosedFormReport {
    pub fn new(d: usize, w: f64, m_max: usize) -> Result<Self, ClosedFormError> {
        let constants = FsfConstants::new(d, w)?;
        let dist = distance_distribution(d, w, m_max)?;
        Ok(Self {
            d,
            w,
            c: constants.c,
            s: constants.s,
            r: constants.r,
            k: constants.k,
            q: dist.q,
            tail: dist.tail,
            residuals: constants.residuals(),
        })
    }

    pub const CSV_HEADER: &'static str = "d,w,c,s,r,K,q1,tail_after_1,quadratic_residual,mass_residual";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
            self.d,
            self.w,
            self.c,
            self.s,
            self.r,
            self.k,
            self.q.first().copied().unwrap_or(f64::NAN),
            self.r.powi(2) * self.k / (1.0 - self.r),
            self.residuals.quadratic,
            self.residuals.total_mass,
        )
    }
}
