//! Reproducible game families.
//!
//! Every random draw comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded
//! with `seed_from_u64(seed)`. A uniform variate is
//! `(next_u64() >> 11) · 2⁻⁵³`, so the stream is fixed by the algorithm and
//! the seed alone and does not depend on platform or on `rand`'s
//! distribution code. Random matrices are filled row-major.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{normalize, MixedStrategy, SymmetricGame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Rps,
    RandomUniform,
    DoublySymmetric,
    SymmetricZeroSum,
    Coordination,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Rps,
        Family::RandomUniform,
        Family::DoublySymmetric,
        Family::SymmetricZeroSum,
        Family::Coordination,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Rps => "rps",
            Family::RandomUniform => "random_uniform",
            Family::DoublySymmetric => "doubly_symmetric",
            Family::SymmetricZeroSum => "symmetric_zero_sum",
            Family::Coordination => "coordination",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown game family `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(family: Family, n: usize, seed: u64) -> Self {
        GeneratorSpec { family, n, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptyGame);
        }
        if self.family == Family::Rps && (self.n < 3 || self.n.is_multiple_of(2)) {
            return Err(Error::InvalidParameter(format!(
                "rps needs an odd number of strategies >= 3, got {}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self.family {
            Family::Rps | Family::Coordination => format!("{}-n{}", self.family, self.n),
            _ => format!("{}-n{}-seed{}", self.family, self.n, self.seed),
        }
    }
}

/// Seeded source of uniform variates, random games and random strategies.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn below(&mut self, bound: usize) -> usize {
        ((self.uniform() * bound as f64) as usize).min(bound - 1)
    }

    /// Uniform on `[lo, hi)`.
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn matrix(&mut self, n: usize) -> Vec<f64> {
        (0..n * n).map(|_| self.uniform()).collect()
    }

    /// Uniformly distributed interior point of the simplex (normalized
    /// exponential spacings).
    pub fn interior_strategy(&mut self, n: usize) -> MixedStrategy {
        let w: Vec<f64> = (0..n)
            .map(|_| -(1.0 - self.uniform()).ln() + 1e-300)
            .collect();
        let total: f64 = w.iter().sum();
        MixedStrategy::new(w.into_iter().map(|v| v / total).collect())
            .expect("normalized weights lie on the simplex")
    }

    /// A strategy on a random nonempty support.
    pub fn sparse_strategy(&mut self, n: usize) -> MixedStrategy {
        let anchor = self.below(n);
        let keep: Vec<bool> = (0..n)
            .map(|i| i == anchor || self.uniform() < 0.5)
            .collect();
        let w: Vec<f64> = keep
            .iter()
            .map(|&k| {
                if k {
                    -(1.0 - self.uniform()).ln() + 1e-300
                } else {
                    0.0
                }
            })
            .collect();
        let total: f64 = w.iter().sum();
        MixedStrategy::new(w.into_iter().map(|v| v / total).collect())
            .expect("normalized weights lie on the simplex")
    }

    /// Interior strategy with one coordinate pinned at `min_mass`.
    pub fn boundary_strategy(&mut self, n: usize, min_mass: f64) -> MixedStrategy {
        if n == 1 {
            return MixedStrategy::uniform(1);
        }
        let low = self.below(n);
        let rest = self.interior_strategy(n - 1);
        let mut masses = Vec::with_capacity(n);
        let mut it = rest.masses().iter();
        for i in 0..n {
            if i == low {
                masses.push(min_mass);
            } else {
                masses.push(it.next().unwrap() * (1.0 - min_mass));
            }
        }
        MixedStrategy::new(masses).expect("rescaled strategy lies on the simplex")
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<SymmetricGame> {
    spec.validate()?;
    let n = spec.n;
    let mut sampler = Sampler::new(spec.seed);
    let game = match spec.family {
        Family::Rps => {
            let half = (n - 1) / 2;
            let mut c = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    let lead = (i + n - j) % n;
                    c[i * n + j] = match lead {
                        0 => 0.5,
                        d if d <= half => 1.0,
                        _ => 0.0,
                    };
                }
            }
            SymmetricGame::new(n, c)?
        }
        Family::RandomUniform => SymmetricGame::new(n, sampler.matrix(n))?,
        Family::DoublySymmetric => {
            let m = sampler.matrix(n);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (m[i * n + j] + m[j * n + i]) / 2.0)
                        .collect()
                })
                .collect();
            normalize(&rows)?
        }
        Family::SymmetricZeroSum => {
            let m = sampler.matrix(n);
            let skew: Vec<f64> = (0..n * n)
                .map(|idx| {
                    let (i, j) = (idx / n, idx % n);
                    (m[i * n + j] - m[j * n + i]) / 2.0
                })
                .collect();
            let scale = skew.iter().fold(0.0f64, |a, s| a.max(s.abs()));
            let factor = if scale > 0.0 { 0.5 / scale } else { 0.0 };
            let c = skew
                .iter()
                .map(|s| (0.5 + s * factor).clamp(0.0, 1.0))
                .collect();
            SymmetricGame::new(n, c)?
        }
        Family::Coordination => {
            let mut c = vec![0.0; n * n];
            for i in 0..n {
                c[i * n + i] = 1.0;
            }
            SymmetricGame::new(n, c)?
        }
    };
    Ok(game.with_label(spec.label()))
}
