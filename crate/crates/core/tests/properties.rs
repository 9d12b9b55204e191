use hedge_nash::analysis::relative_entropy;
use hedge_nash::{
    approximation_error, best_response, decompose, generate, normalize, payoff_vector, Family,
    GeneratorSpec, MixedStrategy, SymmetricGame, TrajectoryRunner,
};
use proptest::prelude::*;

fn game_and_strategy() -> impl Strategy<Value = (SymmetricGame, MixedStrategy)> {
    (1usize..=8).prop_flat_map(|n| {
        (
            prop::collection::vec(0.0f64..=1.0, n * n),
            prop::collection::vec(0.0f64..1.0, n),
        )
            .prop_map(move |(c, w)| {
                let total: f64 = w.iter().sum();
                let x = if total > 1e-9 {
                    MixedStrategy::new(w.iter().map(|v| v / total).collect()).unwrap()
                } else {
                    MixedStrategy::uniform(n)
                };
                (SymmetricGame::new(n, c).unwrap(), x)
            })
    })
}

fn interior(w: &[f64]) -> MixedStrategy {
    let shifted: Vec<f64> = w.iter().map(|v| v + 1e-3).collect();
    let total: f64 = shifted.iter().sum();
    MixedStrategy::new(shifted.iter().map(|v| v / total).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn error_lies_in_unit_interval((game, x) in game_and_strategy()) {
        let eps = approximation_error(&game, &x).unwrap().epsilon;
        prop_assert!((0.0..=1.0).contains(&eps));
    }

    #[test]
    fn error_scales_under_affine_maps((game, x) in game_and_strategy(), a in 0.01f64..=1.0, t in 0.0f64..=1.0) {
        let b = t * (1.0 - a);
        let scaled: Vec<f64> = game.payoffs().iter().map(|c| (a * c + b).min(1.0)).collect();
        let scaled = SymmetricGame::new(game.n(), scaled).unwrap();
        let before = approximation_error(&game, &x).unwrap();
        let after = approximation_error(&scaled, &x).unwrap();
        prop_assert!((after.epsilon - a * before.epsilon).abs() <= 1e-10);

        let mut p = payoff_vector(&game, &x).unwrap();
        p.sort_by(|u, v| v.total_cmp(u));
        let clear_winner = p.len() == 1 || p[0] - p[1] > 1e-9;
        if clear_winner {
            prop_assert_eq!(best_response(&game, &x).unwrap(), best_response(&scaled, &x).unwrap());
        }
    }

    #[test]
    fn decomposition_reassembles((game, _x) in game_and_strategy()) {
        let d = decompose(&game);
        let n = game.n();
        for i in 0..n {
            for j in 0..n {
                let a = d.doubly_symmetric_part[i * n + j];
                let s = d.skew_part[i * n + j];
                prop_assert!((a + s - game.payoff(i, j)).abs() <= 1e-15);
                prop_assert_eq!(a, d.doubly_symmetric_part[j * n + i]);
                prop_assert_eq!(s, -d.skew_part[j * n + i]);
            }
        }
    }

    #[test]
    fn normalize_spans_unit_interval(rows in (1usize..=6).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-50.0f64..50.0, n), n))) {
        let g = normalize(&rows).unwrap();
        let min = g.payoffs().iter().copied().fold(f64::INFINITY, f64::min);
        let max = g.payoffs().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if g.payoffs().iter().all(|&v| v == 0.5) {
            prop_assert!(rows.iter().flatten().all(|&v| v == rows[0][0]));
        } else {
            prop_assert_eq!(min, 0.0);
            prop_assert_eq!(max, 1.0);
        }
    }

    #[test]
    fn relative_entropy_is_nonnegative(p in prop::collection::vec(0.0f64..1.0, 1..8), q in prop::collection::vec(0.0f64..1.0, 8)) {
        let n = p.len();
        let p = interior(&p);
        let q = interior(&q[..n]);
        prop_assert!(relative_entropy(&p, &q).unwrap() >= 0.0);
        prop_assert!(relative_entropy(&p, &p).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn trajectories_stay_on_the_simplex(seed in 0u64..1000, n in 1usize..=8, alpha in 0.001f64..5.0) {
        let game = generate(&GeneratorSpec::new(Family::RandomUniform, n, seed)).unwrap();
        let mut runner = TrajectoryRunner::new(&game, alpha).unwrap();
        for _ in 0..300 {
            runner.advance();
            for x in [runner.state().iterate(), runner.state().average()] {
                let total: f64 = x.masses().iter().sum();
                prop_assert!((total - 1.0).abs() <= 1e-12);
                prop_assert!(x.masses().iter().all(|&m| m >= 0.0));
            }
        }
    }
}
