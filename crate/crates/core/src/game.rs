//! Symmetric games, mixed strategies and the equilibrium-approximation error.
//!
//! A symmetric bimatrix game `(C, Cᵀ)` is described entirely by the row
//! player's payoff matrix `C`. Entries are kept in `[0, 1]`; matrices with
//! other ranges go through [`normalize`] first. Pure strategies are indexed
//! from zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{argmax, dot, softmax};

/// Absolute tolerance on `Σ masses = 1` after construction.
pub const SIMPLEX_TOLERANCE: f64 = 1e-12;
/// Inputs whose mass sum is within this distance of 1 are renormalized.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-9;

/// Dense row-major payoff matrix of a symmetric game with entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGame")]
pub struct SymmetricGame {
    n: usize,
    payoffs: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

#[derive(Deserialize)]
struct RawGame {
    n: usize,
    payoffs: Vec<f64>,
    #[serde(default)]
    label: Option<String>,
}

impl TryFrom<RawGame> for SymmetricGame {
    type Error = Error;

    fn try_from(raw: RawGame) -> Result<Self> {
        let game = SymmetricGame::new(raw.n, raw.payoffs)?;
        Ok(match raw.label {
            Some(label) => game.with_label(label),
            None => game,
        })
    }
}

impl SymmetricGame {
    pub fn new(n: usize, payoffs: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGame);
        }
        if payoffs.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: payoffs.len(),
            });
        }
        for (idx, &value) in payoffs.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index: idx, value });
            }
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::PayoffOutOfRange {
                    row: idx / n,
                    col: idx % n,
                    value,
                });
            }
        }
        Ok(SymmetricGame {
            n,
            payoffs,
            label: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut payoffs = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            payoffs.extend_from_slice(row);
        }
        SymmetricGame::new(n, payoffs)
    }

    /// Parses the game JSON format. With `normalize` set, payoffs outside
    /// `[0, 1]` are accepted and the whole matrix is rescaled by [`normalize`].
    pub fn from_json(text: &str, normalize_payoffs: bool) -> Result<Self> {
        if !normalize_payoffs {
            return Ok(serde_json::from_str(text)?);
        }
        let raw: RawGame = serde_json::from_str(text)?;
        if raw.n == 0 {
            return Err(Error::EmptyGame);
        }
        if raw.payoffs.len() != raw.n * raw.n {
            return Err(Error::DimensionMismatch {
                expected: raw.n * raw.n,
                found: raw.payoffs.len(),
            });
        }
        let rows: Vec<Vec<f64>> = raw.payoffs.chunks(raw.n).map(<[f64]>::to_vec).collect();
        let game = normalize(&rows)?;
        Ok(match raw.label {
            Some(label) => game.with_label(label),
            None => game,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("game serialization is infallible")
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn payoffs(&self) -> &[f64] {
        &self.payoffs
    }

    #[inline]
    pub fn payoff(&self, row: usize, col: usize) -> f64 {
        self.payoffs[row * self.n + col]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.payoffs[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.payoffs.chunks(self.n)
    }

    /// `C x` for an arbitrary vector of matching length.
    pub(crate) fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.rows().map(|row| dot(row, x)).collect()
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found,
            });
        }
        Ok(())
    }
}

/// A point on the probability simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MixedStrategy {
    masses: Vec<f64>,
}

impl TryFrom<Vec<f64>> for MixedStrategy {
    type Error = Error;

    fn try_from(masses: Vec<f64>) -> Result<Self> {
        MixedStrategy::new(masses)
    }
}

impl From<MixedStrategy> for Vec<f64> {
    fn from(x: MixedStrategy) -> Self {
        x.masses
    }
}

impl MixedStrategy {
    /// Validates and, when the mass sum is within [`RENORMALIZE_TOLERANCE`]
    /// of one, renormalizes.
    pub fn new(mut masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::NotOnSimplex("empty mass vector".into()));
        }
        for (index, &value) in masses.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index, value });
            }
            if value < 0.0 {
                return Err(Error::NotOnSimplex(format!(
                    "negative mass {value} at index {index}"
                )));
            }
        }
        let sum: f64 = masses.iter().sum();
        if (sum - 1.0).abs() > RENORMALIZE_TOLERANCE {
            return Err(Error::NotOnSimplex(format!("masses sum to {sum}")));
        }
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            masses.iter_mut().for_each(|m| *m /= sum);
        }
        Ok(MixedStrategy { masses })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform strategy needs n >= 1");
        MixedStrategy {
            masses: vec![1.0 / n as f64; n],
        }
    }

    /// The pure strategy `E_i`.
    pub fn pure(n: usize, i: usize) -> Self {
        assert!(i < n, "pure strategy index {i} out of range for n = {n}");
        let mut masses = vec![0.0; n];
        masses[i] = 1.0;
        MixedStrategy { masses }
    }

    /// Normalized `exp` of unnormalized log-weights.
    pub fn from_log_weights(log_weights: &[f64]) -> Result<Self> {
        if let Some((index, &value)) = log_weights.iter().enumerate().find(|(_, v)| v.is_nan()) {
            return Err(Error::NonFinite { index, value });
        }
        MixedStrategy::new(softmax(log_weights))
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.masses[i] > 0.0).collect()
    }

    pub fn is_interior(&self) -> bool {
        self.masses.iter().all(|&m| m > 0.0)
    }

    /// L∞ distance to another strategy of the same dimension.
    pub fn distance(&self, other: &MixedStrategy) -> f64 {
        self.masses
            .iter()
            .zip(&other.masses)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for MixedStrategy {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.masses[i]
    }
}

/// Approximation error `ε(X) = (CX)_max − X·CX` with its best-response witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximationReport {
    pub epsilon: f64,
    pub payoff_max: f64,
    pub payoff_self: f64,
    pub best_response_index: usize,
    pub strategy: MixedStrategy,
}

/// `C = A + S` with `A` symmetric (doubly symmetric game) and `S`
/// skew-symmetric (zero-sum part).
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub n: usize,
    pub doubly_symmetric_part: Vec<f64>,
    pub skew_part: Vec<f64>,
}

pub fn payoff_vector(game: &SymmetricGame, x: &MixedStrategy) -> Result<Vec<f64>> {
    game.check_dim(x.len())?;
    Ok(game.apply(x.masses()))
}

pub(crate) fn report_from_payoffs(payoffs: &[f64], x: &MixedStrategy) -> ApproximationReport {
    let (best, payoff_max) = argmax(payoffs);
    let payoff_self = dot(x.masses(), payoffs);
    ApproximationReport {
        epsilon: (payoff_max - payoff_self).max(0.0),
        payoff_max,
        payoff_self,
        best_response_index: best,
        strategy: x.clone(),
    }
}

/// Error of a raw vector assumed to lie on the simplex; skips validation.
pub(crate) fn epsilon_of(game: &SymmetricGame, x: &[f64]) -> f64 {
    let p = game.apply(x);
    let (_, max) = argmax(&p);
    (max - dot(x, &p)).max(0.0)
}

pub fn approximation_error(game: &SymmetricGame, x: &MixedStrategy) -> Result<ApproximationReport> {
    let p = payoff_vector(game, x)?;
    Ok(report_from_payoffs(&p, x))
}

/// Lowest-index pure best response to `x`.
pub fn best_response(game: &SymmetricGame, x: &MixedStrategy) -> Result<usize> {
    Ok(argmax(&payoff_vector(game, x)?).0)
}

pub fn decompose(game: &SymmetricGame) -> Decomposition {
    let n = game.n();
    let mut sym = vec![0.0; n * n];
    let mut skew = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (game.payoff(i, j), game.payoff(j, i));
            sym[i * n + j] = (a + b) / 2.0;
            skew[i * n + j] = (a - b) / 2.0;
        }
    }
    Decomposition {
        n,
        doubly_symmetric_part: sym,
        skew_part: skew,
    }
}

/// Affine rescaling `x ↦ (x − min)/(max − min)` onto `[0, 1]`; a constant
/// matrix maps to all 0.5.
pub fn normalize(matrix: &[Vec<f64>]) -> Result<SymmetricGame> {
    let n = matrix.len();
    if n == 0 {
        return Err(Error::EmptyGame);
    }
    let mut flat = Vec::with_capacity(n * n);
    for row in matrix {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        flat.extend_from_slice(row);
    }
    if let Some((index, &value)) = flat.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { index, value });
    }
    let min = flat.iter().copied().fold(f64::INFINITY, f64::min);
    let max = flat.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled = if max > min {
        flat.iter()
            .map(|v| ((v - min) / (max - min)).clamp(0.0, 1.0))
            .collect()
    } else {
        vec![0.5; n * n]
    };
    SymmetricGame::new(n, scaled)
}
