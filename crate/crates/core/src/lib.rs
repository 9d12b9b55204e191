//! Hedge (multiplicative weights) dynamics on symmetric bimatrix games.
//!
//! The crate runs the Hedge map from the uniform start, tracks the
//! approximation error of the iterate and of the time average, builds the
//! parameter schedule `(α, K)` for a target error, and audits the chain of
//! inequalities relating relative entropy, regret and approximation error
//! along every trajectory.
//!
//! ```
//! use hedge_nash::{generate, run_trajectory, Family, GeneratorSpec};
//!
//! let game = generate(&GeneratorSpec::new(Family::Rps, 3, 0)).unwrap();
//! let records = run_trajectory(&game, 0.1, 100, 1).unwrap();
//! assert_eq!(records.len(), 101);
//! assert!(records[100].eps_average < 1e-12);
//! ```

pub mod analysis;
pub mod campaign;
mod error;
mod game;
pub mod generators;
mod hedge;
pub mod io;
mod numeric;
pub mod oracle;
pub mod schedule;

pub use analysis::{replay_witness, LemmaId, LemmaReport, Witness};
pub use campaign::{check_game, run_campaign, CampaignConfig, CheckConfig, CheckOutcome};
pub use error::{Error, Result};
pub use game::{
    approximation_error, best_response, decompose, normalize, payoff_vector, ApproximationReport,
    Decomposition, MixedStrategy, SymmetricGame, RENORMALIZE_TOLERANCE, SIMPLEX_TOLERANCE,
};
pub use generators::{generate, Family, GeneratorSpec, Sampler};
pub use hedge::{
    default_stride, final_average_error, hedge_step, run_trajectory, run_trajectory_from,
    HedgeState, TrajectoryRecord, TrajectoryRunner, CSV_HEADER,
};
pub use numeric::{logsumexp, softmax};
pub use oracle::{support_enumeration, verify, Equilibrium, EquilibriumSet};
pub use schedule::{build_schedule, mylove_bound, FptasSchedule};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/games.md")]
    mod games {}
    #[doc = include_str!("../../../book/src/hedge.md")]
    mod hedge {}
    #[doc = include_str!("../../../book/src/audits.md")]
    mod audits {}
    #[doc = include_str!("../../../book/src/schedule.md")]
    mod schedule {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/generators.md")]
    mod generators {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
