//! Moran birth–death dynamics over populations of attitude-agents.
//!
//! Each generation every unordered pair of live agents plays one match, each
//! agent drawing a fresh strategy uniformly from its attitude's pool. Fitness
//! is the agent's mean per-round payoff over its matches; one agent reproduces
//! with probability proportional to fitness and its offspring replaces an
//! agent chosen uniformly from the whole population.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dsl::{AttitudeSets, UniformSource};
use crate::game::{play_match_summary, GameError, MatchConfig, PayoffMatrix};
use crate::pool::run_in_pool;
use crate::seed::{derive_seed, label_of, stream};
use crate::stats::proportion_se;
use crate::types::Attitude;

pub const DEFAULT_POPULATION: u32 = 12;
pub const DEFAULT_ITERATIONS: u32 = 500;
pub const DEFAULT_FITNESS_ROUNDS: u32 = 100;
pub const DEFAULT_MAX_GENERATIONS: u32 = 10_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MoranError {
    #[error("invalid Moran configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Initial attitude counts `(n_A, n_C, n_N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Composition(pub [u32; 3]);

impl Composition {
    pub const BALANCED: Self = Self([4, 4, 4]);
    pub const BIASED: Self = Self([8, 2, 2]);

    pub fn total(self) -> u32 {
        self.0.iter().sum()
    }

    pub fn count(self, attitude: Attitude) -> u32 {
        self.0[attitude.index()]
    }

    /// Neutral-drift fixation probability of `attitude`: its initial share.
    pub fn prior(self, attitude: Attitude) -> f64 {
        self.count(attitude) as f64 / self.total() as f64
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, c, n] = self.0;
        write!(f, "{a}:{c}:{n}")
    }
}

impl std::str::FromStr for Composition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() != 3 {
            return Err(format!("composition `{s}` must look like A:C:N"));
        }
        let mut counts = [0u32; 3];
        for (slot, part) in counts.iter_mut().zip(parts) {
            *slot = part
                .trim()
                .parse()
                .map_err(|_| format!("composition `{s}` has a non-integer count"))?;
        }
        Ok(Self(counts))
    }
}

/// One of the population regimes a model–prompt pair is evaluated under.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub composition: Composition,
    pub noise_rate: f64,
}

impl Regime {
    /// Balanced and biased compositions, each clean and with 10% noise.
    pub fn standard() -> [Regime; 4] {
        let noisy = crate::game::DEFAULT_NOISE;
        [
            Regime { composition: Composition::BALANCED, noise_rate: 0.0 },
            Regime { composition: Composition::BALANCED, noise_rate: noisy },
            Regime { composition: Composition::BIASED, noise_rate: 0.0 },
            Regime { composition: Composition::BIASED, noise_rate: noisy },
        ]
    }

    pub fn is_noisy(&self) -> bool {
        self.noise_rate > 0.0
    }

    /// E.g. `4:4:4 clean`, `8:2:2 noise`.
    pub fn label(&self) -> String {
        let kind = if self.is_noisy() { "noise" } else { "clean" };
        format!("{} {kind}", self.composition)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoranConfig {
    pub population_size: u32,
    pub composition: Composition,
    pub noise_rate: f64,
    pub iterations: u32,
    pub fitness_rounds: u32,
    pub max_generations: u32,
    pub master_seed: u64,
    pub payoffs: PayoffMatrix,
}

impl Default for MoranConfig {
    fn default() -> Self {
        Self {
            population_size: DEFAULT_POPULATION,
            composition: Composition::BALANCED,
            noise_rate: 0.0,
            iterations: DEFAULT_ITERATIONS,
            fitness_rounds: DEFAULT_FITNESS_ROUNDS,
            max_generations: DEFAULT_MAX_GENERATIONS,
            master_seed: 0,
            payoffs: PayoffMatrix::default(),
        }
    }
}

impl MoranConfig {
    pub fn for_regime(regime: Regime) -> Self {
        Self {
            population_size: regime.composition.total(),
            composition: regime.composition,
            noise_rate: regime.noise_rate,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), MoranError> {
        let bad = |msg: String| Err(MoranError::InvalidConfig(msg));
        if self.population_size < 2 {
            return bad(format!("population size {} < 2", self.population_size));
        }
        if self.composition.total() != self.population_size {
            return bad(format!(
                "composition {} does not sum to population size {}",
                self.composition, self.population_size
            ));
        }
        if self.iterations == 0 || self.fitness_rounds == 0 || self.max_generations == 0 {
            return bad("iterations, fitness_rounds and max_generations must be positive".into());
        }
        if self.payoffs.s < 0.0 {
            return bad("fitness-proportional selection needs non-negative payoffs".into());
        }
        MatchConfig {
            rounds: self.fitness_rounds,
            noise_rate: self.noise_rate,
            payoffs: self.payoffs,
            seed: 0,
        }
        .validate()?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Fixation {
    Fixed(Attitude),
    Censored,
}

impl fmt::Display for Fixation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fixation::Fixed(a) => write!(f, "{a}"),
            Fixation::Censored => f.write_str("censored"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoranOutcome {
    pub fixed_attitude: Fixation,
    pub generations: u32,
    pub iteration_seed: u64,
    /// Generations where every fitness was zero and birth fell back to uniform choice.
    pub degenerate_generations: u32,
}

/// Index chosen with probability proportional to `fitness`, given `u` in `[0, 1)`.
/// Returns `None` when the total fitness is not positive.
pub fn select_proportional(fitness: &[f64], u: f64) -> Option<usize> {
    let total: f64 = fitness.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return None;
    }
    let target = u * total;
    let mut cum = 0.0;
    let mut last_positive = None;
    for (i, &f) in fitness.iter().enumerate() {
        if f > 0.0 {
            cum += f;
            last_positive = Some(i);
            if target < cum {
                return Some(i);
            }
        }
    }
    // Rounding can leave target == cum at the end.
    last_positive
}

/// Seed of iteration `iteration` in the cell labelled `cell`.
pub fn iteration_seed(master: u64, cell: u64, iteration: u32) -> u64 {
    derive_seed(master, &[cell, iteration as u64])
}

const MATCH_STREAM: u64 = 0;
const SELECTION_STREAM: u64 = 1;
const SAMPLING_STREAM: u64 = 2;

fn counts_of(pop: &[Attitude]) -> [u32; 3] {
    let mut counts = [0u32; 3];
    for a in pop {
        counts[a.index()] += 1;
    }
    counts
}

fn monoculture(counts: [u32; 3]) -> Option<Attitude> {
    let total: u32 = counts.iter().sum();
    counts
        .iter()
        .position(|&c| c == total)
        .and_then(Attitude::from_index)
}

/// Runs one Moran iteration, calling `observe` with the attitude counts at
/// the start and after every generation.
pub fn run_moran_trajectory<F>(
    cfg: &MoranConfig,
    sets: &AttitudeSets,
    cell: u64,
    iteration: u32,
    mut observe: F,
) -> Result<MoranOutcome, MoranError>
where
    F: FnMut(u32, [u32; 3]),
{
    cfg.validate()?;
    for set in sets.iter() {
        if set.is_empty() {
            return Err(MoranError::InvalidConfig(format!("empty {} pool", set.attitude)));
        }
    }

    let seed = iteration_seed(cfg.master_seed, cell, iteration);
    let n = cfg.population_size as usize;
    let mut population: Vec<Attitude> = Attitude::ALL
        .iter()
        .flat_map(|&a| std::iter::repeat_n(a, cfg.composition.count(a) as usize))
        .collect();
    let mut counts = counts_of(&population);
    observe(0, counts);

    let mut outcome = MoranOutcome {
        fixed_attitude: Fixation::Censored,
        generations: cfg.max_generations,
        iteration_seed: seed,
        degenerate_generations: 0,
    };
    if let Some(a) = monoculture(counts) {
        outcome.fixed_attitude = Fixation::Fixed(a);
        outcome.generations = 0;
        return Ok(outcome);
    }

    let mut fitness = vec![0.0f64; n];
    for generation in 0..cfg.max_generations {
        fitness.iter_mut().for_each(|f| *f = 0.0);
        let mut pair_id = 0u64;
        for i in 0..n {
            for j in (i + 1)..n {
                let match_seed = derive_seed(seed, &[generation as u64, MATCH_STREAM, pair_id]);
                pair_id += 1;
                let mut picker = stream(match_seed, &[SAMPLING_STREAM]);
                let pool_i = sets.get(population[i]).strategies();
                let pool_j = sets.get(population[j]).strategies();
                let si = &pool_i[picker.random_range(0..pool_i.len())];
                let sj = &pool_j[picker.random_range(0..pool_j.len())];
                let match_cfg = MatchConfig {
                    rounds: cfg.fitness_rounds,
                    noise_rate: cfg.noise_rate,
                    payoffs: cfg.payoffs,
                    seed: match_seed,
                };
                let pay = play_match_summary(si, sj, &match_cfg).mean_payoff();
                fitness[i] += pay[0];
                fitness[j] += pay[1];
            }
        }
        let opponents = (n - 1) as f64;
        fitness.iter_mut().for_each(|f| *f /= opponents);

        let mut select = stream(seed, &[generation as u64, SELECTION_STREAM]);
        let parent = match select_proportional(&fitness, select.next_unit()) {
            Some(p) => p,
            None => {
                outcome.degenerate_generations += 1;
                select.random_range(0..n)
            }
        };
        let dead = select.random_range(0..n);
        population[dead] = population[parent];
        counts = counts_of(&population);
        observe(generation + 1, counts);

        if let Some(a) = monoculture(counts) {
            outcome.fixed_attitude = Fixation::Fixed(a);
            outcome.generations = generation + 1;
            return Ok(outcome);
        }
    }
    Ok(outcome)
}

/// Runs one Moran iteration to fixation or the generation cap.
pub fn run_moran_iteration(
    cfg: &MoranConfig,
    sets: &AttitudeSets,
    cell: u64,
    iteration: u32,
) -> Result<MoranOutcome, MoranError> {
    run_moran_trajectory(cfg, sets, cell, iteration, |_, _| {})
}

/// Fixation proportions for one cell.
#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumDistribution {
    pub composition: Composition,
    pub noise_rate: f64,
    pub p_a: f64,
    pub p_c: f64,
    pub p_n: f64,
    pub censored: f64,
    pub n: u64,
}

impl EquilibriumDistribution {
    pub fn from_outcomes(regime: Regime, outcomes: &[MoranOutcome]) -> Self {
        let mut counts = [0u64; 4];
        for o in outcomes {
            let slot = match o.fixed_attitude {
                Fixation::Fixed(a) => a.index(),
                Fixation::Censored => 3,
            };
            counts[slot] += 1;
        }
        Self::from_counts(regime, counts)
    }

    /// `counts` are A, C, N, censored.
    pub fn from_counts(regime: Regime, counts: [u64; 4]) -> Self {
        let n: u64 = counts.iter().sum();
        let share = |c: u64| if n == 0 { f64::NAN } else { c as f64 / n as f64 };
        Self {
            composition: regime.composition,
            noise_rate: regime.noise_rate,
            p_a: share(counts[0]),
            p_c: share(counts[1]),
            p_n: share(counts[2]),
            censored: share(counts[3]),
            n,
        }
    }

    pub fn regime(&self) -> Regime {
        Regime {
            composition: self.composition,
            noise_rate: self.noise_rate,
        }
    }

    pub fn p(&self, attitude: Attitude) -> f64 {
        match attitude {
            Attitude::Aggressive => self.p_a,
            Attitude::Cooperative => self.p_c,
            Attitude::Neutral => self.p_n,
        }
    }

    pub fn se(&self, attitude: Attitude) -> f64 {
        proportion_se(self.p(attitude), self.n)
    }

    pub fn se_censored(&self) -> f64 {
        proportion_se(self.censored, self.n)
    }

    /// Count of iterations fixing at `attitude` (exact when built from outcomes).
    pub fn count(&self, attitude: Attitude) -> u64 {
        (self.p(attitude) * self.n as f64).round() as u64
    }
}

/// One cell of a condition grid: a model–prompt pair under one regime.
#[derive(Clone, Debug)]
pub struct CellSpec<'a> {
    /// Stable identifier; the cell's seeds derive from it.
    pub id: String,
    pub regime: Regime,
    pub config: MoranConfig,
    pub sets: &'a AttitudeSets,
}

#[derive(Clone, Debug)]
pub struct CellResult {
    pub id: String,
    pub regime: Regime,
    pub outcomes: Vec<MoranOutcome>,
    pub distribution: EquilibriumDistribution,
    pub diagnostics: Vec<String>,
}

/// Runs `config.iterations` iterations for every cell. Iterations and cells
/// run in parallel; output is identical for any `threads`.
pub fn run_condition_batch(cells: &[CellSpec<'_>], threads: Option<usize>) -> Vec<CellResult> {
    let jobs: Vec<(usize, u32)> = cells
        .iter()
        .enumerate()
        .flat_map(|(c, cell)| (0..cell.config.iterations).map(move |i| (c, i)))
        .collect();

    let results: Vec<Result<MoranOutcome, MoranError>> = run_in_pool(threads, || {
        jobs.par_iter()
            .map(|&(c, i)| {
                let cell = &cells[c];
                run_moran_iteration(&cell.config, cell.sets, label_of(&cell.id), i)
            })
            .collect()
    });

    let mut per_cell: Vec<(Vec<MoranOutcome>, Vec<String>)> =
        cells.iter().map(|_| (Vec::new(), Vec::new())).collect();
    for (&(c, i), result) in jobs.iter().zip(results) {
        let (outcomes, diagnostics) = &mut per_cell[c];
        match result {
            Ok(o) => {
                if o.degenerate_generations > 0 {
                    diagnostics.push(format!(
                        "iteration {i}: {} generations with all-zero fitness (uniform birth)",
                        o.degenerate_generations
                    ));
                }
                outcomes.push(o);
            }
            Err(e) => diagnostics.push(format!("iteration {i}: {e}")),
        }
    }

    cells
        .iter()
        .zip(per_cell)
        .map(|(cell, (outcomes, mut diagnostics))| {
            // Repeated config errors collapse to one line.
            diagnostics.dedup_by(|a, b| a.split_once(": ").map(|x| x.1) == b.split_once(": ").map(|x| x.1));
            CellResult {
                id: cell.id.clone(),
                regime: cell.regime,
                distribution: EquilibriumDistribution::from_outcomes(cell.regime, &outcomes),
                outcomes,
                diagnostics,
            }
        })
        .collect()
}
