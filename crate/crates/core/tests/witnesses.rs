//! Witnesses written by the checkers can be read back and replayed.

use hedge_nash::analysis::{audit_trajectory, check_step_inequalities};
use hedge_nash::{
    build_schedule, generate, replay_witness, Family, GeneratorSpec, LemmaId, MixedStrategy,
    Witness,
};

#[test]
fn contested_trajectory_witness_round_trips_and_replays() {
    // The inductive log-average bound fails here under the schedule.
    let game = generate(&GeneratorSpec::new(Family::RandomUniform, 2, 0)).unwrap();
    let s = build_schedule(2, 0.1).unwrap();
    let out = audit_trajectory(&game, s.alpha, s.k).unwrap();
    let report = out.report(LemmaId::InductiveLa).unwrap();
    assert!(!report.passed);
    assert!(out.asserted_pass());
    let w = report.witness.as_ref().unwrap();
    assert_eq!(w.violation, report.max_violation);
    assert!(w.x.is_none() && w.y.is_none());

    let back = Witness::from_json(&w.to_json()).unwrap();
    assert_eq!(&back, w);
    let replayed = replay_witness(&back).unwrap();
    assert!(
        (replayed - w.violation).abs() <= 1e-12,
        "{replayed} vs {}",
        w.violation
    );
}

#[test]
fn sample_witness_replays() {
    let game = generate(&GeneratorSpec::new(Family::RandomUniform, 3, 5)).unwrap();
    let x = MixedStrategy::new(vec![0.2, 0.5, 0.3]).unwrap();
    let y = MixedStrategy::pure(3, 2);
    let [secant, _, _] = check_step_inequalities(&game, &x, &y, 0.4).unwrap();
    // A passing check yields no witness; build one by hand from the same point.
    let w = Witness {
        lemma: LemmaId::SecantBound,
        game: game.clone(),
        alpha: 0.4,
        k: 0,
        lhs: 0.0,
        rhs: 0.0,
        violation: secant.max_violation,
        x: Some(x),
        y: Some(y),
        alphas: None,
    };
    assert_eq!(replay_witness(&w).unwrap(), secant.max_violation);
}

#[test]
fn replay_rejects_mismatched_witnesses() {
    let game = generate(&GeneratorSpec::new(Family::Rps, 3, 0)).unwrap();
    let w = Witness {
        lemma: LemmaId::Convexity,
        game,
        alpha: 0.1,
        k: 0,
        lhs: 0.0,
        rhs: 0.0,
        violation: 0.0,
        x: None,
        y: None,
        alphas: None,
    };
    assert!(replay_witness(&w).is_err());
}
