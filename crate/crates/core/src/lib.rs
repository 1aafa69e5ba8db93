//! Deterministic simulation engine for noisy iterated prisoner's dilemma
//! tournaments and Moran processes over attitude-tagged strategy sets.
//!
//! Strategies are written in a small rule language ([`dsl`]), played against
//! each other in matches ([`game`]) and all-play-all tournaments
//! ([`tournament`]), and evolved in finite populations ([`moran`]). The
//! [`metrics`] and [`stats`] modules turn the results into summary numbers and
//! significance tests.
//!
//! Every random draw comes from a stream derived from a master seed
//! ([`seed`]), so results are reproducible and independent of thread count.

pub mod dsl;
pub mod game;
pub mod metrics;
pub mod moran;
mod pool;
pub mod seed;
pub mod stats;
pub mod tournament;
pub mod types;

pub use dsl::{
    evaluate, parse_strategy, synth_attitude_set, AttitudeSets, HistoryFeatures, ParseError,
    StrategySet, StrategySpec,
};
pub use game::{play_match, play_match_summary, MatchConfig, MatchRecord, PayoffMatrix};
pub use metrics::{compute_delta_noise, compute_entropy, compute_icd, compute_separation};
pub use moran::{
    run_condition_batch, run_moran_iteration, Composition, EquilibriumDistribution, Fixation,
    MoranConfig, MoranOutcome, Regime,
};
pub use pool::run_in_pool;
pub use stats::{holm_bonferroni, proportion_se, two_proportion_z, ZMethod, ZTestResult};
pub use tournament::{run_tournament, CooperationMatrix, PayoffTable, TournamentConfig, TournamentResult};
pub use types::{Action, Attitude, PromptLabel};

/// Version recorded in run manifests.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
