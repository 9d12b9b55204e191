use super::entropy::{log_step, relative_entropy_log, require_dims, require_interior, tilted_mean};
use super::{LemmaId, LemmaReport, Tracker, Witness};
use crate::error::{Error, Result};
use crate::game::{MixedStrategy, SymmetricGame};
use crate::numeric::dot;

struct Sample<'a> {
    game: &'a SymmetricGame,
    x: &'a MixedStrategy,
    y: &'a MixedStrategy,
    log_x: Vec<f64>,
    payoff: Vec<f64>,
}

impl<'a> Sample<'a> {
    fn new(game: &'a SymmetricGame, x: &'a MixedStrategy, y: &'a MixedStrategy) -> Result<Self> {
        require_dims(game, x, y)?;
        require_interior(x)?;
        Ok(Sample {
            game,
            x,
            y,
            log_x: x.masses().iter().map(|m| m.ln()).collect(),
            payoff: game.apply(x.masses()),
        })
    }

    /// `F(α) = RE(Y, T_α(X))`.
    fn re_after(&self, alpha: f64) -> f64 {
        relative_entropy_log(self.y.masses(), &log_step(&self.log_x, &self.payoff, alpha))
    }

    /// `F′(α)`.
    fn derivative(&self, alpha: f64) -> f64 {
        tilted_mean(&self.log_x, &self.payoff, alpha) - dot(self.y.masses(), &self.payoff)
    }

    fn witness(
        &self,
        lemma: LemmaId,
        alpha: f64,
        lhs: f64,
        rhs: f64,
        violation: f64,
        alphas: Option<Vec<f64>>,
    ) -> Witness {
        Witness {
            lemma,
            game: self.game.clone(),
            alpha,
            k: 0,
            lhs,
            rhs,
            violation,
            x: Some(self.x.clone()),
            y: Some(self.y.clone()),
            alphas,
        }
    }
}

/// Violations `((b−a)F′(a) − ΔF, ΔF − (b−a)F′(b))` of the two secant
/// inequalities `F′(a) ≤ (F(b) − F(a))/(b − a) ≤ F′(b)` for
/// `F(α) = RE(Y, T_α(X))`. Both are `≤ 0` when `F` is convex.
pub fn secant_gaps(
    game: &SymmetricGame,
    x: &MixedStrategy,
    y: &MixedStrategy,
    a: f64,
    b: f64,
) -> Result<(f64, f64)> {
    if b.partial_cmp(&a) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidParameter(format!(
            "secant needs b > a, got a = {a}, b = {b}"
        )));
    }
    let s = Sample::new(game, x, y)?;
    let rise = s.re_after(b) - s.re_after(a);
    Ok((
        (b - a) * s.derivative(a) - rise,
        rise - (b - a) * s.derivative(b),
    ))
}

/// Convexity of `α ↦ RE(Y, T_α(X))` on a strictly increasing grid.
///
/// At each interior grid point the second difference, scaled so that it
/// equals `F(a) − 2F(b) + F(c)` on a uniform grid, must be nonnegative; the
/// secant inequalities are checked on every pair of neighbours.
pub fn check_convexity(
    game: &SymmetricGame,
    x: &MixedStrategy,
    y: &MixedStrategy,
    alpha_grid: &[f64],
) -> Result<LemmaReport> {
    if alpha_grid.len() < 3 {
        return Err(Error::GridTooShort(alpha_grid.len()));
    }
    if alpha_grid
        .windows(2)
        .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
        || alpha_grid.iter().any(|a| !a.is_finite())
    {
        return Err(Error::InvalidParameter(
            "alpha grid must be finite and strictly increasing".into(),
        ));
    }
    let s = Sample::new(game, x, y)?;
    let values: Vec<f64> = alpha_grid.iter().map(|&a| s.re_after(a)).collect();
    let slopes: Vec<f64> = alpha_grid.iter().map(|&a| s.derivative(a)).collect();
    let mut tracker = Tracker::new(LemmaId::Convexity);
    for w in 0..alpha_grid.len() - 2 {
        let (a, b, c) = (alpha_grid[w], alpha_grid[w + 1], alpha_grid[w + 2]);
        let (fa, fb, fc) = (values[w], values[w + 1], values[w + 2]);
        let second = ((c - b) * fa - (c - a) * fb + (b - a) * fc) * 2.0 / (c - a);
        tracker.record(-second, 0.0, |v| {
            s.witness(LemmaId::Convexity, b, -second, 0.0, v, Some(vec![a, b, c]))
        });
    }
    for w in 0..alpha_grid.len() - 1 {
        let (a, b) = (alpha_grid[w], alpha_grid[w + 1]);
        let rise = values[w + 1] - values[w];
        let lower = (b - a) * slopes[w];
        let upper = (b - a) * slopes[w + 1];
        tracker.record(lower, rise, |v| {
            s.witness(LemmaId::Convexity, a, lower, rise, v, Some(vec![a, b]))
        });
        tracker.record(rise, upper, |v| {
            s.witness(LemmaId::Convexity, b, rise, upper, v, Some(vec![a, b]))
        });
    }
    Ok(tracker.finish())
}

/// The three one-step inequalities at `(X, Y, α)`:
///
/// * secant bound: `RE(Y, T(X)) ≤ RE(Y, X) − α(Y − X)·CX + α(e^α − 1)`
/// * log lower bound, for every `i`:
///   `ln X(i) + α(E_i − X)·CX − α(e^α − 1) ≤ ln T_i(X)`
/// * Slater chain: `RE(Y, T(X)) − RE(Y, X) ≤ α · d/dα RE(Y, T(X))`
pub fn check_step_inequalities(
    game: &SymmetricGame,
    x: &MixedStrategy,
    y: &MixedStrategy,
    alpha: f64,
) -> Result<[LemmaReport; 3]> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidRate(alpha));
    }
    let s = Sample::new(game, x, y)?;
    let log_t = log_step(&s.log_x, &s.payoff, alpha);
    let self_payoff = dot(x.masses(), &s.payoff);
    let y_payoff = dot(y.masses(), &s.payoff);
    let slack = alpha * alpha.exp_m1();

    let re_before = relative_entropy_log(y.masses(), &s.log_x);
    let re_after = relative_entropy_log(y.masses(), &log_t);

    let mut secant = Tracker::new(LemmaId::SecantBound);
    let rhs = re_before - alpha * (y_payoff - self_payoff) + slack;
    secant.record(re_after, rhs, |v| {
        s.witness(LemmaId::SecantBound, alpha, re_after, rhs, v, None)
    });

    let mut log_bound = Tracker::new(LemmaId::LogLowerBound);
    for ((&log_x, &payoff), &rhs) in s.log_x.iter().zip(&s.payoff).zip(&log_t) {
        let lhs = log_x + alpha * (payoff - self_payoff) - slack;
        log_bound.record(lhs, rhs, |v| {
            s.witness(LemmaId::LogLowerBound, alpha, lhs, rhs, v, None)
        });
    }

    let mut slater = Tracker::new(LemmaId::SlaterChain);
    let lhs = re_after - re_before;
    let rhs = alpha * s.derivative(alpha);
    slater.record(lhs, rhs, |v| {
        s.witness(LemmaId::SlaterChain, alpha, lhs, rhs, v, None)
    });

    Ok([secant.finish(), log_bound.finish(), slater.finish()])
}

/// Recomputes the violation recorded in a sample witness.
pub(crate) fn replay_sample(w: &Witness) -> Result<f64> {
    let (Some(x), Some(y)) = (&w.x, &w.y) else {
        return Err(Error::InvalidParameter(
            "sample witness needs x and y".into(),
        ));
    };
    let s = Sample::new(&w.game, x, y)?;
    match (w.lemma, w.alphas.as_deref()) {
        (LemmaId::Convexity, Some(&[a, b, c])) => {
            let (fa, fb, fc) = (s.re_after(a), s.re_after(b), s.re_after(c));
            Ok(-((c - b) * fa - (c - a) * fb + (b - a) * fc) * 2.0 / (c - a))
        }
        (LemmaId::Convexity, Some(&[a, b])) => {
            let (lo, hi) = secant_gaps(&w.game, x, y, a, b)?;
            Ok(lo.max(hi))
        }
        (LemmaId::SecantBound | LemmaId::LogLowerBound | LemmaId::SlaterChain, _) => {
            let reports = check_step_inequalities(&w.game, x, y, w.alpha)?;
            let r = reports
                .iter()
                .find(|r| r.lemma_id == w.lemma)
                .expect("all three reported");
            Ok(r.max_violation)
        }
        _ => Err(Error::InvalidParameter(format!(
            "{} is not a sample statement",
            w.lemma
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate, Family, GeneratorSpec, Sampler};

    fn grid() -> Vec<f64> {
        (0..=40).map(|i| i as f64 * 0.05).collect()
    }

    #[test]
    fn rps_fixed_point_is_flat() {
        let g = generate(&GeneratorSpec::new(Family::Rps, 3, 0)).unwrap();
        let u = MixedStrategy::uniform(3);
        let y = MixedStrategy::pure(3, 1);
        let r = check_convexity(&g, &u, &y, &grid()).unwrap();
        assert!(r.passed);
        assert!(r.max_violation.abs() < 1e-14);

        let [a, b, c] = check_step_inequalities(&g, &u, &u, 0.7).unwrap();
        assert!(a.passed && b.passed && c.passed);
        // (Y − X)·CX = 0 here, so only the α(e^α − 1) slack separates the sides.
        assert!((a.max_violation + 0.7 * 0.7f64.exp_m1()).abs() < 1e-14);
    }

    #[test]
    fn random_samples_pass() {
        let mut s = Sampler::new(2024);
        for trial in 0..300 {
            let n = 2 + s.below(7);
            let g = generate(&GeneratorSpec::new(
                Family::RandomUniform,
                n,
                10_000 + trial,
            ))
            .unwrap();
            let x = s.interior_strategy(n);
            let y = if trial % 2 == 0 {
                s.sparse_strategy(n)
            } else {
                s.interior_strategy(n)
            };
            assert!(check_convexity(&g, &x, &y, &grid()).unwrap().passed);
            let alpha = s.range(1e-6, 2.0);
            for r in check_step_inequalities(&g, &x, &y, alpha).unwrap() {
                assert!(r.passed, "{:?}", r);
            }
            let (lo, hi) = secant_gaps(&g, &x, &y, 0.3, 0.9).unwrap();
            assert!(lo <= 1e-12 && hi <= 1e-12);
        }
    }

    #[test]
    fn near_boundary_start_still_passes() {
        let mut s = Sampler::new(5);
        for trial in 0..100 {
            let n = 2 + s.below(6);
            let g = generate(&GeneratorSpec::new(Family::RandomUniform, n, trial)).unwrap();
            let x = s.boundary_strategy(n, 1e-12);
            let y = s.sparse_strategy(n);
            for r in check_step_inequalities(&g, &x, &y, s.range(0.01, 2.0)).unwrap() {
                assert!(r.passed, "{:?}", r);
            }
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let g = generate(&GeneratorSpec::new(Family::RandomUniform, 3, 1)).unwrap();
        let u = MixedStrategy::uniform(3);
        assert!(matches!(
            check_convexity(&g, &u, &u, &[0.0, 0.1]),
            Err(Error::GridTooShort(2))
        ));
        assert!(check_convexity(&g, &u, &u, &[0.0, 0.2, 0.1]).is_err());
        assert!(check_step_inequalities(&g, &u, &u, 0.0).is_err());
        assert!(check_step_inequalities(&g, &MixedStrategy::pure(3, 0), &u, 0.1).is_err());
    }
}
