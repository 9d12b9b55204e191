//! The Hedge map and fixed-rate trajectories.
//!
//! The map is
//!
//! ```text
//! T_i(X) = X(i) exp(α (CX)_i) / Σ_j X(j) exp(α (CX)_j)
//! ```
//!
//! Along a trajectory the iterate after `k` steps is a softmax of the
//! cumulative payoff scores `S^k(i) = Σ_{t<k} (CX^t)_i`:
//! `ln X^k(i) = ln X^0(i) + α S^k(i) − logsumexp`. The scores are the
//! canonical state. Masses are derived from them and may underflow to zero
//! for a badly dominated strategy, while the log-masses stay exact.
//!
//! Scores are bounded by `k`, so for `k ≤ 2⁴⁰` and `α ≤ 50` every quantity
//! stays many orders of magnitude away from `f64` overflow.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{epsilon_of, report_from_payoffs, MixedStrategy, SymmetricGame};
use crate::numeric::{argmax, dot, logsumexp, softmax};
use crate::schedule::mylove_bound;

fn check_rate(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidRate(alpha))
    }
}

fn check_interior(x: &MixedStrategy) -> Result<()> {
    match x.masses().iter().position(|&m| m <= 0.0) {
        Some(index) => Err(Error::NotInterior {
            index,
            mass: x[index],
        }),
        None => Ok(()),
    }
}

/// One application of the Hedge map.
pub fn hedge_step(game: &SymmetricGame, x: &MixedStrategy, alpha: f64) -> Result<MixedStrategy> {
    check_rate(alpha)?;
    if x.len() != game.n() {
        return Err(Error::DimensionMismatch {
            expected: game.n(),
            found: x.len(),
        });
    }
    check_interior(x)?;
    let p = game.apply(x.masses());
    let logits: Vec<f64> = x
        .masses()
        .iter()
        .zip(&p)
        .map(|(m, pi)| m.ln() + alpha * pi)
        .collect();
    MixedStrategy::from_log_weights(&logits)
}

/// State of a fixed-rate trajectory after `k` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct HedgeState {
    k: u64,
    alpha: f64,
    scores: Vec<f64>,
    log_x0: Vec<f64>,
    uniform_start: bool,
    log_iterate: Vec<f64>,
    iterate: MixedStrategy,
    average: MixedStrategy,
}

impl HedgeState {
    pub fn uniform(n: usize, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGame);
        }
        let mut state = HedgeState::with_start(MixedStrategy::uniform(n), alpha)?;
        state.uniform_start = true;
        Ok(state)
    }

    /// Trajectory from an arbitrary interior start.
    pub fn with_start(x0: MixedStrategy, alpha: f64) -> Result<Self> {
        check_rate(alpha)?;
        check_interior(&x0)?;
        let n = x0.len();
        let log_x0: Vec<f64> = x0.masses().iter().map(|m| m.ln()).collect();
        let uniform_start = x0.masses().iter().all(|&m| m == x0[0]);
        Ok(HedgeState {
            k: 0,
            alpha,
            scores: vec![0.0; n],
            log_iterate: log_x0.clone(),
            log_x0,
            uniform_start,
            iterate: x0.clone(),
            average: x0,
        })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.scores.len()
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn iterate(&self) -> &MixedStrategy {
        &self.iterate
    }

    /// Empirical average `X̄^k = (1/(k+1)) Σ_{t≤k} X^t`.
    pub fn average(&self) -> &MixedStrategy {
        &self.average
    }

    /// Exact `ln X^k(i)`, finite even when the mass has underflowed.
    pub fn log_iterate(&self) -> &[f64] {
        &self.log_iterate
    }

    pub fn start(&self) -> MixedStrategy {
        MixedStrategy::from_log_weights(&self.log_x0).expect("start was validated")
    }

    pub fn is_uniform_start(&self) -> bool {
        self.uniform_start
    }

    pub fn advance(&self, game: &SymmetricGame) -> Result<HedgeState> {
        let mut next = self.clone();
        next.step(game)?;
        Ok(next)
    }

    pub fn step(&mut self, game: &SymmetricGame) -> Result<()> {
        if game.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: game.n(),
            });
        }
        let payoff = game.apply(self.iterate.masses());
        self.step_with_payoff(&payoff);
        Ok(())
    }

    /// Advances given `payoff = C X^k` for the current iterate.
    fn step_with_payoff(&mut self, payoff: &[f64]) {
        for (s, p) in self.scores.iter_mut().zip(payoff) {
            *s += p;
        }
        let logits: Vec<f64> = self
            .log_x0
            .iter()
            .zip(&self.scores)
            .map(|(l, s)| l + self.alpha * s)
            .collect();
        let lse = logsumexp(&logits);
        self.log_iterate = logits.iter().map(|v| v - lse).collect();
        self.iterate = MixedStrategy::new(softmax(&logits)).expect("softmax lies on the simplex");

        let kk = (self.k + 2) as f64;
        let avg: Vec<f64> = self
            .average
            .masses()
            .iter()
            .zip(self.iterate.masses())
            .map(|(a, x)| x / kk + (kk - 1.0) * a / kk)
            .collect();
        self.average = MixedStrategy::new(avg).expect("convex combination lies on the simplex");
        self.k += 1;
    }
}

/// One observation row of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub k: u64,
    pub eps_iterate: f64,
    pub eps_average: f64,
    pub bound_rhs: f64,
    pub regret_avg: f64,
}

pub const CSV_HEADER: &str = "k,eps_iterate,eps_average,bound_rhs,regret_avg";

impl TrajectoryRecord {
    /// CSV row with 17 significant digits per real.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e}",
            self.k, self.eps_iterate, self.eps_average, self.bound_rhs, self.regret_avg
        )
    }
}

/// Drives a trajectory and keeps the running sums the audits need:
/// `C X^k`, `Σ_{t≤k} X^t(j) ln X^t(j)` and `Σ_{t≤k} X^t·CX^t`.
#[derive(Debug, Clone)]
pub struct TrajectoryRunner<'g> {
    game: &'g SymmetricGame,
    state: HedgeState,
    payoff: Vec<f64>,
    xlogx_sum: Vec<f64>,
    self_payoff_sum: f64,
}

impl<'g> TrajectoryRunner<'g> {
    pub fn new(game: &'g SymmetricGame, alpha: f64) -> Result<Self> {
        Self::from_state(game, HedgeState::uniform(game.n(), alpha)?)
    }

    pub fn with_start(game: &'g SymmetricGame, alpha: f64, x0: MixedStrategy) -> Result<Self> {
        if x0.len() != game.n() {
            return Err(Error::DimensionMismatch {
                expected: game.n(),
                found: x0.len(),
            });
        }
        Self::from_state(game, HedgeState::with_start(x0, alpha)?)
    }

    fn from_state(game: &'g SymmetricGame, state: HedgeState) -> Result<Self> {
        let mut runner = TrajectoryRunner {
            game,
            payoff: Vec::new(),
            xlogx_sum: vec![0.0; state.n()],
            self_payoff_sum: 0.0,
            state,
        };
        runner.accumulate();
        Ok(runner)
    }

    fn accumulate(&mut self) {
        self.payoff = self.game.apply(self.state.iterate.masses());
        for ((acc, &x), &lx) in self
            .xlogx_sum
            .iter_mut()
            .zip(self.state.iterate.masses())
            .zip(&self.state.log_iterate)
        {
            *acc += x * lx;
        }
        self.self_payoff_sum += dot(self.state.iterate.masses(), &self.payoff);
    }

    pub fn game(&self) -> &'g SymmetricGame {
        self.game
    }

    pub fn state(&self) -> &HedgeState {
        &self.state
    }

    /// `C X^k` for the current iterate.
    pub fn payoff(&self) -> &[f64] {
        &self.payoff
    }

    /// `Σ_{t≤k} X^t(j) ln X^t(j)` per strategy.
    pub fn xlogx_sum(&self) -> &[f64] {
        &self.xlogx_sum
    }

    pub fn self_payoff_sum(&self) -> f64 {
        self.self_payoff_sum
    }

    /// `max_i (1/(k+1)) Σ_{t≤k} (E_i − X^t)·CX^t`.
    pub fn regret_avg(&self) -> f64 {
        let best = self
            .state
            .scores
            .iter()
            .zip(&self.payoff)
            .map(|(s, p)| s + p)
            .fold(f64::NEG_INFINITY, f64::max);
        (best - self.self_payoff_sum) / (self.state.k + 1) as f64
    }

    pub fn record(&self) -> TrajectoryRecord {
        let eps_iterate = report_from_payoffs(&self.payoff, &self.state.iterate).epsilon;
        let avg_payoff = self.game.apply(self.state.average.masses());
        let (_, max) = argmax(&avg_payoff);
        let eps_average = (max - dot(self.state.average.masses(), &avg_payoff)).max(0.0);
        TrajectoryRecord {
            k: self.state.k,
            eps_iterate,
            eps_average,
            bound_rhs: mylove_bound(self.game.n(), self.state.alpha, self.state.k)
                .expect("rate validated at construction"),
            regret_avg: self.regret_avg(),
        }
    }

    pub fn advance(&mut self) {
        let payoff = std::mem::take(&mut self.payoff);
        self.state.step_with_payoff(&payoff);
        self.accumulate();
    }

    /// Fault injection for exercising the audits: moves `delta` of mass in
    /// the stored average from its largest to its smallest coordinate.
    pub fn inject_average_fault(&mut self, delta: f64) {
        let masses = self.state.average.masses();
        let (hi, _) = argmax(masses);
        let lo = (0..masses.len())
            .min_by(|&a, &b| masses[a].total_cmp(&masses[b]))
            .unwrap_or(0);
        if hi == lo {
            return;
        }
        let mut m = masses.to_vec();
        let d = delta.min(m[hi]);
        m[hi] -= d;
        m[lo] += d;
        self.state.average = MixedStrategy::new(m).expect("mass transfer keeps the simplex");
    }
}

/// Default observation stride `max(1, K/1000)`.
pub fn default_stride(iterations: u64) -> u64 {
    (iterations / 1000).max(1)
}

/// Runs `iterations` advances from the uniform start, recording every
/// `observe_every`-th step and always the last.
pub fn run_trajectory(
    game: &SymmetricGame,
    alpha: f64,
    iterations: u64,
    observe_every: u64,
) -> Result<Vec<TrajectoryRecord>> {
    run_from(
        TrajectoryRunner::new(game, alpha)?,
        iterations,
        observe_every,
    )
}

pub fn run_trajectory_from(
    game: &SymmetricGame,
    alpha: f64,
    x0: MixedStrategy,
    iterations: u64,
    observe_every: u64,
) -> Result<Vec<TrajectoryRecord>> {
    run_from(
        TrajectoryRunner::with_start(game, alpha, x0)?,
        iterations,
        observe_every,
    )
}

fn run_from(
    mut runner: TrajectoryRunner<'_>,
    iterations: u64,
    observe_every: u64,
) -> Result<Vec<TrajectoryRecord>> {
    if observe_every == 0 {
        return Err(Error::InvalidParameter("observe_every must be >= 1".into()));
    }
    let mut records = Vec::with_capacity((iterations / observe_every + 2) as usize);
    loop {
        let k = runner.state().k();
        if k.is_multiple_of(observe_every) || k == iterations {
            records.push(runner.record());
        }
        if k == iterations {
            break;
        }
        runner.advance();
    }
    Ok(records)
}

/// Error of the empirical average at the end of a trajectory.
pub fn final_average_error(game: &SymmetricGame, state: &HedgeState) -> f64 {
    epsilon_of(game, state.average().masses())
}
