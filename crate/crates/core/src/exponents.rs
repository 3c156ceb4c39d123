//! Self-similar exponents of the anisotropic porous medium equation.
//!
//! Everything here is a closed-form function of the dimension `N` and the
//! diffusion exponents `m_1..m_N`. The structural hypotheses are
//!
//! * H1: `m_i > 1` for every `i` (slow diffusion in every direction);
//! * H2: `m_i < m̄ + 2/N` for every `i`, with `m̄` the mean exponent.
//!
//! H2 is what keeps every expansion exponent `σ_i` positive.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack used when checking H2 so that boundary cases (`σ_i = 0`) are rejected.
pub const H2_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HypothesisError {
    #[error("dimension must be at least 1")]
    EmptyDimension,
    #[error("exponent m[{index}] = {value} is not finite")]
    NotFinite { index: usize, value: f64 },
    #[error("H1 fails at index {index}: m[{index}] = {value} must be > 1")]
    H1 { index: usize, value: f64 },
    #[error("H2 fails at index {index}: m[{index}] = {value} must be < m_bar + 2/N = {bound}")]
    H2 {
        index: usize,
        value: f64,
        bound: f64,
    },
}

/// Dimension and per-direction diffusion exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    m: Vec<f64>,
}

impl MediumParams {
    /// Validates H1 and H2 and builds the parameter set. The dimension is `m.len()`.
    pub fn new(m: Vec<f64>) -> Result<Self, HypothesisError> {
        validate(&m)?;
        Ok(Self { m })
    }

    /// Isotropic medium `m_i = m` in dimension `n`.
    pub fn isotropic(m: f64, n: usize) -> Result<Self, HypothesisError> {
        Self::new(vec![m; n])
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    pub fn m(&self) -> &[f64] {
        &self.m
    }

    pub fn m_bar(&self) -> f64 {
        mean(&self.m)
    }

    pub fn is_isotropic(&self) -> bool {
        self.m.iter().all(|&mi| mi == self.m[0])
    }
}

/// Checks H1 and H2 without building anything.
pub fn validate(m: &[f64]) -> Result<(), HypothesisError> {
    if m.is_empty() {
        return Err(HypothesisError::EmptyDimension);
    }
    for (index, &value) in m.iter().enumerate() {
        if !value.is_finite() {
            return Err(HypothesisError::NotFinite { index, value });
        }
    }
    for (index, &value) in m.iter().enumerate() {
        if value <= 1.0 {
            return Err(HypothesisError::H1 { index, value });
        }
    }
    let bound = h2_bound(m);
    for (index, &value) in m.iter().enumerate() {
        if value >= bound - H2_SLACK {
            return Err(HypothesisError::H2 {
                index,
                value,
                bound,
            });
        }
    }
    Ok(())
}

/// Upper bound `m̄ + 2/N` of hypothesis H2.
pub fn h2_bound(m: &[f64]) -> f64 {
    mean(m) + 2.0 / m.len() as f64
}

fn mean(m: &[f64]) -> f64 {
    m.iter().sum::<f64>() / m.len() as f64
}

/// All self-similar constants derived from `(N, m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub m: Vec<f64>,
    pub m_bar: f64,
    /// Decay exponent of the sup norm, `α = N / (N(m̄ − 1) + 2)`.
    pub alpha: f64,
    /// Relative expansion exponents `σ_i = 1/N + (m̄ − m_i)/2`.
    pub sigma: Vec<f64>,
    /// Support growth exponents `a_i = α σ_i`.
    pub a: Vec<f64>,
    /// Mass-scaling exponents `ν_i = (m_i − 1)/2`.
    pub nu: Vec<f64>,
    /// Mass exponent of the scaling `T_k`: `M_k = k^β M`.
    pub beta: f64,
    /// Critical exponent `(N − 2)_+ / N`.
    pub m_c: f64,
}

impl Exponents {
    pub fn dim(&self) -> usize {
        self.m.len()
    }

    /// Drift coefficients `α σ_i` of the rescaled equation (equal to `a_i`).
    pub fn drift(&self) -> &[f64] {
        &self.a
    }
}

pub fn derive_exponents(p: &MediumParams) -> Exponents {
    let m = p.m().to_vec();
    let n = m.len() as f64;
    let m_bar = p.m_bar();
    let alpha = n / (n * (m_bar - 1.0) + 2.0);
    let sigma: Vec<f64> = m.iter().map(|&mi| 1.0 / n + (m_bar - mi) / 2.0).collect();
    let a = sigma.iter().map(|s| alpha * s).collect();
    let nu: Vec<f64> = m.iter().map(|&mi| (mi - 1.0) / 2.0).collect();
    let beta = 1.0 + nu.iter().sum::<f64>();
    let m_c = (n - 2.0).max(0.0) / n;
    Exponents {
        m,
        m_bar,
        alpha,
        sigma,
        a,
        nu,
        beta,
        m_c,
    }
}

/// True iff `α(m_i − 1) + 2 a_i = 1` holds for every direction within 1e-12 relative.
pub fn check_scaling_identity(e: &Exponents) -> bool {
    e.m.iter()
        .zip(&e.a)
        .all(|(&mi, &ai)| (e.alpha * (mi - 1.0) + 2.0 * ai - 1.0).abs() <= 1e-12)
}
