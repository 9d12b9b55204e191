//! Parameter schedule for a target approximation error.
//!
//! For `n` strategies and target `ε`, the schedule fixes a learning rate
//! `α = ln(1 + ε′/(3n))`, a slack `θ = ε′/3` and an iteration budget
//! `K = ⌊(n/e + 1 + α)/(αθ)⌋`, where `ε′ < ε` is chosen so that
//!
//! ```text
//! ((K+2)/(K+1))·ε′/3 + ε′/3 + ((K+2)/(K+1))·ε′/3 ≤ ε.
//! ```
//!
//! `ε′` solves that inequality with equality at a lower-bound budget `K̂`
//! computed from `ε` itself; since the budget only grows as `ε′ < ε`,
//! `(K+2)/(K+1) ≤ (K̂+2)/(K̂+1)` and the inequality holds at `K`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Contraction factor of the geometric term in the error bound.
pub const RHO: f64 = 0.5;

const EXACT_INTEGER_LIMIT: f64 = 9_007_199_254_740_992.0; // 2^53

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FptasSchedule {
    pub n: usize,
    pub eps_target: f64,
    pub k_hat: u64,
    pub eps_prime: f64,
    pub alpha: f64,
    pub theta: f64,
    #[serde(rename = "K")]
    pub k: u64,
    pub k_prime: u64,
    pub rho: f64,
    pub predicted_error: f64,
}

/// `⌊(n e⁻¹ + 1 + α)/(α θ)⌋`.
pub fn iterations_for_theta(n: usize, alpha: f64, theta: f64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidRate(alpha));
    }
    if !(theta.is_finite() && theta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "theta must be positive, got {theta}"
        )));
    }
    let value = ((n as f64) * (-1f64).exp() + 1.0 + alpha) / (alpha * theta);
    let k = value.floor();
    if !k.is_finite() || k >= EXACT_INTEGER_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "iteration count {value} is not representable exactly"
        )));
    }
    Ok(k as u64)
}

/// Right-hand side of the four-term error bound at iteration `K`:
/// `n/(eα(K+1)) + 1/(K+1) + ((K+2)/(K+1))·n(e^α − 1) + ((K+2)/(K+1))·n·ρ^K`.
pub fn mylove_bound(n: usize, alpha: f64, k: u64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidRate(alpha));
    }
    let n = n as f64;
    let k1 = k as f64 + 1.0;
    let ratio = (k as f64 + 2.0) / k1;
    let geometric = RHO.powi(k.min(i32::MAX as u64) as i32);
    Ok(n * (-1f64).exp() / (alpha * k1)
        + 1.0 / k1
        + ratio * n * alpha.exp_m1()
        + ratio * n * geometric)
}

/// The three-term guarantee `((K+2)/(K+1))·ε′/3 + ε′/3 + ((K+2)/(K+1))·ε′/3`.
pub fn three_term_error(k: u64, eps_prime: f64) -> f64 {
    let ratio = (k as f64 + 2.0) / (k as f64 + 1.0);
    ratio * eps_prime / 3.0 + eps_prime / 3.0 + ratio * eps_prime / 3.0
}

pub fn build_schedule(n: usize, eps: f64) -> Result<FptasSchedule> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    if !(eps.is_finite() && eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, 1], got {eps}"
        )));
    }
    let nf = n as f64;
    let k_hat = iterations_for_theta(n, (eps / (3.0 * nf)).ln_1p(), eps / 3.0)?;
    let ratio_hat = (k_hat as f64 + 2.0) / (k_hat as f64 + 1.0);
    let eps_prime = 3.0 * eps / (2.0 * ratio_hat + 1.0);
    let alpha = (eps_prime / (3.0 * nf)).ln_1p();
    let theta = eps_prime / 3.0;
    let k = iterations_for_theta(n, alpha, theta)?;
    let k_prime = ((eps_prime / (3.0 * nf)).ln() / RHO.ln()).ceil().max(0.0) as u64;
    let schedule = FptasSchedule {
        n,
        eps_target: eps,
        k_hat,
        eps_prime,
        alpha,
        theta,
        k,
        k_prime,
        rho: RHO,
        predicted_error: three_term_error(k, eps_prime),
    };
    if k_prime > k || k < k_hat {
        return Err(Error::ScheduleInvariant(format!(
            "expected K' <= K_hat <= K, got K' = {k_prime}, K_hat = {k_hat}, K = {k} for n = {n}, eps = {eps}"
        )));
    }
    Ok(schedule)
}
