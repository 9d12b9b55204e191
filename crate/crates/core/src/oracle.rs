//! Exact symmetric equilibria of small games by support enumeration.
//!
//! For each nonempty support `T` the indifference system
//!
//! ```text
//! (CX)_i = v   for i ∈ T,     Σ_{i∈T} X_i = 1,     X_i = 0 off T
//! ```
//!
//! is solved with LU and partial pivoting. A solution is kept when its masses
//! are nonnegative (down to −1e-12, then clamped) and no strategy off `T`
//! earns more than `v + 1e-9`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{approximation_error, MixedStrategy, SymmetricGame};

pub const MAX_ENUMERATION_SIZE: usize = 12;

const NEGATIVE_MASS_TOLERANCE: f64 = 1e-12;
const BEST_RESPONSE_TOLERANCE: f64 = 1e-9;
const DEDUP_DISTANCE: f64 = 1e-8;
const PIVOT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub masses: MixedStrategy,
    pub residual: f64,
    pub support: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSet {
    pub equilibria: Vec<Equilibrium>,
    pub game_label: String,
    /// Supports whose indifference system was singular.
    #[serde(skip)]
    pub singular_supports: usize,
}

impl EquilibriumSet {
    /// The JSON list `[{masses, residual, support}, ...]`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.equilibria).expect("equilibria serialize")
    }
}

fn solve_support(game: &SymmetricGame, support: &[usize]) -> Option<(Vec<f64>, f64)> {
    let m = support.len();
    let mut a = DMatrix::<f64>::zeros(m + 1, m + 1);
    let mut b = DVector::<f64>::zeros(m + 1);
    for (r, &i) in support.iter().enumerate() {
        for (c, &j) in support.iter().enumerate() {
            a[(r, c)] = game.payoff(i, j);
        }
        a[(r, m)] = -1.0;
    }
    for c in 0..m {
        a[(m, c)] = 1.0;
    }
    b[m] = 1.0;
    let lu = a.lu();
    let min_pivot = lu
        .u()
        .diagonal()
        .iter()
        .fold(f64::INFINITY, |acc, d| acc.min(d.abs()));
    if min_pivot < PIVOT_FLOOR {
        return None;
    }
    let sol = lu.solve(&b)?;
    Some((sol.iter().take(m).copied().collect(), sol[m]))
}

pub fn support_enumeration(game: &SymmetricGame) -> Result<EquilibriumSet> {
    let n = game.n();
    if n > MAX_ENUMERATION_SIZE {
        return Err(Error::TooLarge {
            n,
            max: MAX_ENUMERATION_SIZE,
        });
    }
    let mut equilibria: Vec<Equilibrium> = Vec::new();
    let mut singular = 0;
    for mask in 1u32..(1u32 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let Some((on_support, value)) = solve_support(game, &support) else {
            singular += 1;
            continue;
        };
        if on_support
            .iter()
            .any(|&x| x < -NEGATIVE_MASS_TOLERANCE || !x.is_finite())
        {
            continue;
        }
        let mut masses = vec![0.0; n];
        for (&i, &x) in support.iter().zip(&on_support) {
            masses[i] = x.max(0.0);
        }
        let total: f64 = masses.iter().sum();
        masses.iter_mut().for_each(|x| *x /= total);
        let Ok(strategy) = MixedStrategy::new(masses) else {
            continue;
        };
        let payoff = game.apply(strategy.masses());
        let undercut = (0..n)
            .filter(|j| mask & (1 << j) == 0)
            .any(|j| payoff[j] > value + BEST_RESPONSE_TOLERANCE);
        if undercut {
            continue;
        }
        if equilibria
            .iter()
            .any(|e| e.masses.distance(&strategy) <= DEDUP_DISTANCE)
        {
            continue;
        }
        let residual = approximation_error(game, &strategy)?.epsilon;
        equilibria.push(Equilibrium {
            masses: strategy,
            residual,
            support,
        });
    }
    Ok(EquilibriumSet {
        equilibria,
        game_label: game.label().unwrap_or("unlabeled").to_string(),
        singular_supports: singular,
    })
}

/// `true` iff `x` is an `eps`-approximate symmetric equilibrium strategy.
pub fn verify(game: &SymmetricGame, x: &MixedStrategy, eps: f64) -> Result<bool> {
    Ok(approximation_error(game, x)?.epsilon <= eps)
}
