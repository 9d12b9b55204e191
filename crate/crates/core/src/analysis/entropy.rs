use crate::error::{Error, Result};
use crate::game::{MixedStrategy, SymmetricGame};
use crate::numeric::{dot, logsumexp};

/// `RE(P, Q) = Σ_{i ∈ supp P} P(i) ln(P(i)/Q(i))`, clamped at zero against
/// rounding.
pub fn relative_entropy(p: &MixedStrategy, q: &MixedStrategy) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    let mut total = 0.0;
    for (i, (&pi, &qi)) in p.masses().iter().zip(q.masses()).enumerate() {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Err(Error::SupportViolation(i));
            }
            total += pi * (pi / qi).ln();
        }
    }
    Ok(total.max(0.0))
}

/// `RE(P, Q)` with `Q` given by its log-masses; no clamping.
pub(crate) fn relative_entropy_log(p: &[f64], log_q: &[f64]) -> f64 {
    p.iter()
        .zip(log_q)
        .filter(|(pi, _)| **pi > 0.0)
        .map(|(pi, lq)| pi * (pi.ln() - lq))
        .sum()
}

/// Log-masses of `T_α(X)` given `ln X` and `p = CX`.
pub(crate) fn log_step(log_x: &[f64], payoff: &[f64], alpha: f64) -> Vec<f64> {
    let logits: Vec<f64> = log_x
        .iter()
        .zip(payoff)
        .map(|(l, p)| l + alpha * p)
        .collect();
    let lse = logsumexp(&logits);
    logits.into_iter().map(|v| v - lse).collect()
}

pub(crate) fn require_interior(x: &MixedStrategy) -> Result<()> {
    match x.masses().iter().position(|&m| m <= 0.0) {
        Some(index) => Err(Error::NotInterior {
            index,
            mass: x[index],
        }),
        None => Ok(()),
    }
}

pub(crate) fn require_dims(
    game: &SymmetricGame,
    x: &MixedStrategy,
    y: &MixedStrategy,
) -> Result<()> {
    for len in [x.len(), y.len()] {
        if len != game.n() {
            return Err(Error::DimensionMismatch {
                expected: game.n(),
                found: len,
            });
        }
    }
    Ok(())
}

/// Payoff mean under the tilted distribution `T_α(X)`.
pub(crate) fn tilted_mean(log_x: &[f64], payoff: &[f64], alpha: f64) -> f64 {
    let log_t = log_step(log_x, payoff, alpha);
    log_t.iter().zip(payoff).map(|(l, p)| l.exp() * p).sum()
}

/// Closed form of `d/dα RE(Y, T_α(X))`:
/// `Σ_j X(j)(CX)_j e^{α(CX)_j} / Σ_j X(j) e^{α(CX)_j} − Y·CX`.
pub fn re_alpha_derivative(
    game: &SymmetricGame,
    x: &MixedStrategy,
    y: &MixedStrategy,
    alpha: f64,
) -> Result<f64> {
    require_dims(game, x, y)?;
    require_interior(x)?;
    if !alpha.is_finite() {
        return Err(Error::InvalidRate(alpha));
    }
    let payoff = game.apply(x.masses());
    let log_x: Vec<f64> = x.masses().iter().map(|m| m.ln()).collect();
    Ok(tilted_mean(&log_x, &payoff, alpha) - dot(y.masses(), &payoff))
}

/// `RE(Y, T_α(X))` evaluated in the log domain.
pub fn re_after_step(
    game: &SymmetricGame,
    x: &MixedStrategy,
    y: &MixedStrategy,
    alpha: f64,
) -> Result<f64> {
    require_dims(game, x, y)?;
    require_interior(x)?;
    let payoff = game.apply(x.masses());
    let log_x: Vec<f64> = x.masses().iter().map(|m| m.ln()).collect();
    Ok(relative_entropy_log(
        y.masses(),
        &log_step(&log_x, &payoff, alpha),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate, Family, GeneratorSpec, Sampler};

    #[test]
    fn relative_entropy_examples() {
        let p = MixedStrategy::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(relative_entropy(&p, &p).unwrap(), 0.0);

        let x = MixedStrategy::new(vec![0.1, 0.6, 0.3]).unwrap();
        for i in 0..3 {
            let re = relative_entropy(&MixedStrategy::pure(3, i), &x).unwrap();
            assert!((re + x[i].ln()).abs() < 1e-15);
        }

        let a = MixedStrategy::new(vec![0.5, 0.5]).unwrap();
        let b = MixedStrategy::new(vec![0.25, 0.75]).unwrap();
        // 0.5 ln 2 + 0.5 ln(2/3) at 50 digits.
        assert!((relative_entropy(&a, &b).unwrap() - 0.143_841_036_225_890_46).abs() < 1e-15);
    }

    #[test]
    fn relative_entropy_support_violation() {
        let p = MixedStrategy::uniform(2);
        let q = MixedStrategy::pure(2, 0);
        assert!(matches!(
            relative_entropy(&p, &q),
            Err(Error::SupportViolation(1))
        ));
        assert!(relative_entropy(&q, &p).is_ok());
    }

    #[test]
    fn derivative_at_zero_rate() {
        let g = generate(&GeneratorSpec::new(Family::RandomUniform, 4, 8)).unwrap();
        let mut s = Sampler::new(1);
        let x = s.interior_strategy(4);
        let y = s.sparse_strategy(4);
        let p = g.apply(x.masses());
        let expect = dot(x.masses(), &p) - dot(y.masses(), &p);
        assert!((re_alpha_derivative(&g, &x, &y, 0.0).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn derivative_vanishes_on_rps_fixed_point() {
        let g = generate(&GeneratorSpec::new(Family::Rps, 3, 0)).unwrap();
        let u = MixedStrategy::uniform(3);
        for alpha in [0.0, 0.5, 3.0] {
            assert!(re_alpha_derivative(&g, &u, &u, alpha).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        // Central difference of α ↦ RE(Y, T_α(X)) computed directly from the
        // mass form of the map.
        fn re_direct(g: &SymmetricGame, x: &MixedStrategy, y: &MixedStrategy, a: f64) -> f64 {
            let p = g.apply(x.masses());
            let w: Vec<f64> = x
                .masses()
                .iter()
                .zip(&p)
                .map(|(m, pi)| m * (a * pi).exp())
                .collect();
            let z: f64 = w.iter().sum();
            y.masses()
                .iter()
                .zip(&w)
                .filter(|(yi, _)| **yi > 0.0)
                .map(|(yi, wi)| yi * (yi / (wi / z)).ln())
                .sum()
        }
        let mut s = Sampler::new(77);
        let h = 1e-6;
        for trial in 0..1000 {
            let n = 2 + s.below(6);
            let g = generate(&GeneratorSpec::new(Family::RandomUniform, n, trial)).unwrap();
            let x = s.interior_strategy(n);
            let y = s.sparse_strategy(n);
            let a = s.range(0.0, 2.0);
            let fd = (re_direct(&g, &x, &y, a + h) - re_direct(&g, &x, &y, a - h)) / (2.0 * h);
            let closed = re_alpha_derivative(&g, &x, &y, a).unwrap();
            assert!(
                (fd - closed).abs() <= 1e-6,
                "trial {trial}: {fd} vs {closed}"
            );
        }
    }

    #[test]
    fn derivative_requires_interior() {
        let g = generate(&GeneratorSpec::new(Family::Rps, 3, 0)).unwrap();
        let e = MixedStrategy::pure(3, 0);
        assert!(matches!(
            re_alpha_derivative(&g, &e, &e, 0.1),
            Err(Error::NotInterior { .. })
        ));
    }
}
