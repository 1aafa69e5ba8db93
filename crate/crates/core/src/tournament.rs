//! All-play-all tournaments over the three attitude sets of one model–prompt
//! pair, aggregated into attitude-level cooperation and payoff tables.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dsl::{AttitudeSets, StrategySpec};
use crate::game::{play_match_summary, GameError, MatchConfig, MatchSummary};
use crate::pool::run_in_pool;
use crate::seed::derive_seed;
use crate::types::Attitude;

pub const DEFAULT_REPETITIONS: u32 = 20;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TournamentError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("repetitions must be at least 1")]
    ZeroRepetitions,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TournamentConfig {
    /// `seed` here is the tournament's master seed.
    #[serde(rename = "match")]
    pub match_cfg: MatchConfig,
    pub repetitions: u32,
    pub include_self_pairings: bool,
}

impl Default for TournamentConfig {
    fn default() -> Self {
        Self {
            match_cfg: MatchConfig::default(),
            repetitions: DEFAULT_REPETITIONS,
            include_self_pairings: true,
        }
    }
}

/// A 3x3 table indexed `[row attitude][column attitude]` in A, C, N order.
pub type AttitudeGrid<T> = [[T; 3]; 3];

/// Mean realized cooperation rate of row-attitude strategies against column-attitude strategies.
#[derive(Clone, Debug, PartialEq)]
pub struct CooperationMatrix {
    pub mean: AttitudeGrid<f64>,
    pub matches: AttitudeGrid<u64>,
}

impl CooperationMatrix {
    pub fn get(&self, row: Attitude, col: Attitude) -> f64 {
        self.mean[row.index()][col.index()]
    }
}

/// Mean per-round payoff `u(k, j)` of attitude `k` against attitude `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct PayoffTable {
    pub u: AttitudeGrid<f64>,
    pub stderr: AttitudeGrid<f64>,
    pub matches: AttitudeGrid<u64>,
}

impl PayoffTable {
    /// A table from published means only (no dispersion or counts).
    pub fn from_means(u: AttitudeGrid<f64>) -> Self {
        Self {
            u,
            stderr: [[f64::NAN; 3]; 3],
            matches: [[0; 3]; 3],
        }
    }

    pub fn get(&self, row: Attitude, col: Attitude) -> f64 {
        self.u[row.index()][col.index()]
    }

    pub fn row(&self, row: Attitude) -> [f64; 3] {
        self.u[row.index()]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrategyStats {
    pub attitude: Attitude,
    pub name: String,
    /// Realized cooperation fraction over all rounds of all its matches.
    pub coop_rate: f64,
    pub mean_payoff: f64,
    /// Seat appearances (a self-pairing counts twice).
    pub appearances: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TournamentResult {
    pub cooperation: CooperationMatrix,
    pub payoffs: PayoffTable,
    pub strategies: Vec<StrategyStats>,
    pub matches_played: u64,
}

impl TournamentResult {
    /// Per-strategy cooperation rates of one attitude, in roster order.
    pub fn coop_rates(&self, attitude: Attitude) -> Vec<f64> {
        self.strategies
            .iter()
            .filter(|s| s.attitude == attitude)
            .map(|s| s.coop_rate)
            .collect()
    }
}

/// Unordered roster pairs `(i, j)` with `i <= j` (or `i < j` without self-pairings).
pub fn roster_pairs(n: usize, include_self: bool) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        let start = if include_self { i } else { i + 1 };
        for j in start..n {
            pairs.push((i, j));
        }
    }
    pairs
}

/// Seed of repetition `rep` of the match between roster entries `i` and `j`.
pub fn match_seed(master: u64, i: usize, j: usize, rep: u32) -> u64 {
    derive_seed(master, &[i as u64, j as u64, rep as u64])
}

#[derive(Default, Clone, Copy)]
struct Cell {
    coop: f64,
    pay: f64,
    pay_sq: f64,
    observations: u64,
    matches: u64,
}

/// Plays every roster pair `repetitions` times and aggregates by attitude.
///
/// The roster is the A set, then C, then N, each in name order. Results do not
/// depend on `threads`.
pub fn run_tournament(
    sets: &AttitudeSets,
    cfg: &TournamentConfig,
    threads: Option<usize>,
) -> Result<TournamentResult, TournamentError> {
    cfg.match_cfg.validate()?;
    if cfg.repetitions == 0 {
        return Err(TournamentError::ZeroRepetitions);
    }

    let roster: Vec<(Attitude, &StrategySpec)> = sets
        .iter()
        .flat_map(|set| set.strategies().iter().map(move |s| (set.attitude, s)))
        .collect();
    let pairs = roster_pairs(roster.len(), cfg.include_self_pairings);
    let reps = cfg.repetitions;
    let master = cfg.match_cfg.seed;

    let summaries: Vec<MatchSummary> = run_in_pool(threads, || {
        (0..pairs.len() * reps as usize)
            .into_par_iter()
            .map(|job| {
                let (i, j) = pairs[job / reps as usize];
                let rep = (job % reps as usize) as u32;
                let match_cfg = cfg.match_cfg.with_seed(match_seed(master, i, j, rep));
                play_match_summary(roster[i].1, roster[j].1, &match_cfg)
            })
            .collect()
    });

    let mut cells = [[Cell::default(); 3]; 3];
    let mut per_strategy = vec![(0.0f64, 0.0f64, 0u64); roster.len()];

    for (job, summary) in summaries.iter().enumerate() {
        let (i, j) = pairs[job / reps as usize];
        let (ka, kb) = (roster[i].0.index(), roster[j].0.index());
        let coop = summary.coop_rate();
        let pay = summary.mean_payoff();

        for (seat, (row, col, idx)) in [(ka, kb, i), (kb, ka, j)].into_iter().enumerate() {
            let cell = &mut cells[row][col];
            cell.coop += coop[seat];
            cell.pay += pay[seat];
            cell.pay_sq += pay[seat] * pay[seat];
            cell.observations += 1;
            let s = &mut per_strategy[idx];
            s.0 += coop[seat];
            s.1 += pay[seat];
            s.2 += 1;
        }
        cells[ka][kb].matches += 1;
        if ka != kb {
            cells[kb][ka].matches += 1;
        }
    }

    let mut cooperation = CooperationMatrix {
        mean: [[f64::NAN; 3]; 3],
        matches: [[0; 3]; 3],
    };
    let mut payoffs = PayoffTable::from_means([[f64::NAN; 3]; 3]);
    for (row, line) in cells.iter().enumerate() {
        for (col, &c) in line.iter().enumerate() {
            cooperation.matches[row][col] = c.matches;
            payoffs.matches[row][col] = c.matches;
            if c.observations == 0 {
                continue;
            }
            let n = c.observations as f64;
            cooperation.mean[row][col] = c.coop / n;
            let mean = c.pay / n;
            payoffs.u[row][col] = mean;
            payoffs.stderr[row][col] = if c.observations > 1 {
                let var = ((c.pay_sq - n * mean * mean) / (n - 1.0)).max(0.0);
                (var / n).sqrt()
            } else {
                0.0
            };
        }
    }

    let strategies = roster
        .iter()
        .zip(&per_strategy)
        .map(|((attitude, spec), &(coop, pay, n))| StrategyStats {
            attitude: *attitude,
            name: spec.name.clone(),
            coop_rate: if n > 0 { coop / n as f64 } else { f64::NAN },
            mean_payoff: if n > 0 { pay / n as f64 } else { f64::NAN },
            appearances: n,
        })
        .collect();

    Ok(TournamentResult {
        cooperation,
        payoffs,
        strategies,
        matches_played: summaries.len() as u64,
    })
}
