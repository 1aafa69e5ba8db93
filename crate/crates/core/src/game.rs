//! A single iterated prisoner's dilemma match with trembling-hand noise.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::dsl::{HistoryFeatures, StrategySpec, UniformSource};
use crate::seed::{stream, SimRng};
use crate::types::Action;

pub const DEFAULT_ROUNDS: u32 = 1000;
pub const DEFAULT_NOISE: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GameError {
    #[error("payoffs must satisfy T > R > P > S and 2R > T + S (got R={r}, S={s}, T={t}, P={p})")]
    InvalidPayoffs { r: f64, s: f64, t: f64, p: f64 },
    #[error("noise rate {0} is outside [0, 1]")]
    InvalidNoise(f64),
    #[error("a match needs at least one round")]
    ZeroRounds,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PayoffMatrix {
    pub r: f64,
    pub s: f64,
    pub t: f64,
    pub p: f64,
}

impl Default for PayoffMatrix {
    fn default() -> Self {
        Self { r: 3.0, s: 0.0, t: 5.0, p: 1.0 }
    }
}

impl PayoffMatrix {
    pub fn new(r: f64, s: f64, t: f64, p: f64) -> Result<Self, GameError> {
        let m = Self { r, s, t, p };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), GameError> {
        let Self { r, s, t, p } = *self;
        if t > r && r > p && p > s && 2.0 * r > t + s {
            Ok(())
        } else {
            Err(GameError::InvalidPayoffs { r, s, t, p })
        }
    }

    /// Payoff to a player choosing `mine` against `theirs`.
    #[inline]
    pub fn payoff(&self, mine: Action, theirs: Action) -> f64 {
        match (mine, theirs) {
            (Action::Cooperate, Action::Cooperate) => self.r,
            (Action::Cooperate, Action::Defect) => self.s,
            (Action::Defect, Action::Cooperate) => self.t,
            (Action::Defect, Action::Defect) => self.p,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub rounds: u32,
    pub noise_rate: f64,
    pub payoffs: PayoffMatrix,
    pub seed: u64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            rounds: DEFAULT_ROUNDS,
            noise_rate: 0.0,
            payoffs: PayoffMatrix::default(),
            seed: 0,
        }
    }
}

impl MatchConfig {
    pub fn validate(&self) -> Result<(), GameError> {
        if self.rounds == 0 {
            return Err(GameError::ZeroRounds);
        }
        if !(0.0..=1.0).contains(&self.noise_rate) {
            return Err(GameError::InvalidNoise(self.noise_rate));
        }
        self.payoffs.validate()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Full per-round history of one match.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchRecord {
    /// Realized (post-noise) actions, seat A then seat B.
    pub actions: Vec<[Action; 2]>,
    /// Actions as chosen, before noise.
    pub intended_actions: Vec<[Action; 2]>,
    pub payoff_per_round: Vec<[f64; 2]>,
    pub mean_payoff: [f64; 2],
    pub coop_rate: [f64; 2],
}

impl MatchRecord {
    pub fn rounds(&self) -> usize {
        self.actions.len()
    }

    /// CSV trace: `round,intended_a,realized_a,intended_b,realized_b,pay_a,pay_b`.
    pub fn write_trace_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "round,intended_a,realized_a,intended_b,realized_b,pay_a,pay_b")?;
        for (i, ((act, intended), pay)) in self
            .actions
            .iter()
            .zip(&self.intended_actions)
            .zip(&self.payoff_per_round)
            .enumerate()
        {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                i + 1,
                intended[0],
                act[0],
                intended[1],
                act[1],
                pay[0],
                pay[1]
            )?;
        }
        Ok(())
    }
}

/// Aggregates of one match, without the per-round history.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchSummary {
    pub rounds: u32,
    pub total_payoff: [f64; 2],
    pub cooperations: [u32; 2],
}

impl MatchSummary {
    pub fn mean_payoff(&self) -> [f64; 2] {
        self.total_payoff.map(|t| t / self.rounds as f64)
    }

    pub fn coop_rate(&self) -> [f64; 2] {
        self.cooperations.map(|c| c as f64 / self.rounds as f64)
    }
}

struct Seat {
    features: HistoryFeatures,
    strategy_rng: SimRng,
    noise_rng: SimRng,
}

impl Seat {
    fn new(seed: u64, index: u64) -> Self {
        Self {
            features: HistoryFeatures::initial(),
            strategy_rng: stream(seed, &[index, 0]),
            noise_rng: stream(seed, &[index, 1]),
        }
    }

    #[inline]
    fn choose(&mut self, spec: &StrategySpec, noise_rate: f64) -> (Action, Action) {
        let intended = spec.decide(&self.features).sample(&mut self.strategy_rng);
        let realized = if noise_rate > 0.0 && self.noise_rng.next_unit() < noise_rate {
            intended.flipped()
        } else {
            intended
        };
        (intended, realized)
    }
}

/// Drives the round loop, handing each round to `observe`.
fn run_rounds<F>(a: &StrategySpec, b: &StrategySpec, cfg: &MatchConfig, mut observe: F) -> MatchSummary
where
    F: FnMut([Action; 2], [Action; 2], [f64; 2]),
{
    let mut seat_a = Seat::new(cfg.seed, 0);
    let mut seat_b = Seat::new(cfg.seed, 1);
    let mut summary = MatchSummary {
        rounds: cfg.rounds,
        total_payoff: [0.0; 2],
        cooperations: [0; 2],
    };
    for _ in 0..cfg.rounds {
        let (intended_a, real_a) = seat_a.choose(a, cfg.noise_rate);
        let (intended_b, real_b) = seat_b.choose(b, cfg.noise_rate);
        let pay = [
            cfg.payoffs.payoff(real_a, real_b),
            cfg.payoffs.payoff(real_b, real_a),
        ];
        summary.total_payoff[0] += pay[0];
        summary.total_payoff[1] += pay[1];
        summary.cooperations[0] += real_a.is_cooperate() as u32;
        summary.cooperations[1] += real_b.is_cooperate() as u32;
        seat_a.features.advance(real_a, real_b);
        seat_b.features.advance(real_b, real_a);
        observe([intended_a, intended_b], [real_a, real_b], pay);
    }
    summary
}

/// Plays a full match and records every round. `cfg` must be valid.
pub fn play_match(a: &StrategySpec, b: &StrategySpec, cfg: &MatchConfig) -> MatchRecord {
    let n = cfg.rounds as usize;
    let mut actions = Vec::with_capacity(n);
    let mut intended_actions = Vec::with_capacity(n);
    let mut payoff_per_round = Vec::with_capacity(n);
    let summary = run_rounds(a, b, cfg, |intended, realized, pay| {
        intended_actions.push(intended);
        actions.push(realized);
        payoff_per_round.push(pay);
    });
    MatchRecord {
        actions,
        intended_actions,
        payoff_per_round,
        mean_payoff: summary.mean_payoff(),
        coop_rate: summary.coop_rate(),
    }
}

/// Same match as [`play_match`], keeping only the aggregates.
pub fn play_match_summary(a: &StrategySpec, b: &StrategySpec, cfg: &MatchConfig) -> MatchSummary {
    run_rounds(a, b, cfg, |_, _, _| {})
}
