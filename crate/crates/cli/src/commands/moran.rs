use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use evoipd_core::dsl::AttitudeSets;
use evoipd_core::moran::{run_condition_batch, CellResult, CellSpec, MoranConfig};
use evoipd_core::{Attitude, Composition, PayoffMatrix, Regime};
use serde::{Deserialize, Serialize};

use crate::common::{load_pair, pair_label, parse_seed, record_set_hashes, Workers};
use crate::error::{CliError, CliResult};
use crate::manifest::Manifest;
use crate::table::{fmt_f, CsvOut};

#[derive(Args, Debug)]
pub struct MoranArgs {
    /// Condition grid (TOML).
    #[arg(long, value_name = "FILE")]
    pub grid: PathBuf,
    /// Iterations per cell; overrides the grid.
    #[arg(long)]
    pub iterations: Option<u32>,
    /// Master seed; overrides the grid.
    #[arg(long, value_parser = parse_seed)]
    pub seed: Option<u64>,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[command(flatten)]
    pub workers: Workers,
}

/// Grid file layout.
///
/// ```toml
/// pairs = ["sets/claude-default", "sets/gpt-default"]   # relative to the grid file
/// seed = 1
/// iterations = 500
/// fitness_rounds = 100
/// max_generations = 10000
/// payoffs = [3.0, 0.0, 5.0, 1.0]                          # R, S, T, P
///
/// [[regime]]                                             # default: the four standard regimes
/// composition = "4:4:4"
/// noise = 0.0
///
/// [[override]]                                           # optional per-cell settings
/// pair = "claude/default"
/// regime = "8:2:2 noise"
/// iterations = 1000
/// ```
#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub pairs: Vec<PathBuf>,
    pub seed: Option<u64>,
    pub iterations: Option<u32>,
    pub fitness_rounds: Option<u32>,
    pub max_generations: Option<u32>,
    pub payoffs: Option<[f64; 4]>,
    #[serde(default, rename = "regime")]
    pub regimes: Vec<RegimeEntry>,
    #[serde(default, rename = "override")]
    pub overrides: Vec<Override>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct RegimeEntry {
    pub composition: String,
    pub noise: f64,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct Override {
    /// `model/prompt`; all pairs when absent.
    pub pair: Option<String>,
    /// Regime label such as `4:4:4 clean`; all regimes when absent.
    pub regime: Option<String>,
    pub iterations: Option<u32>,
    pub fitness_rounds: Option<u32>,
    pub max_generations: Option<u32>,
}

#[derive(Serialize)]
struct RecordedCell {
    id: String,
    config: MoranConfig,
}

#[derive(Serialize)]
struct Recorded {
    cells: Vec<RecordedCell>,
}

fn read_grid(path: &Path) -> CliResult<GridFile> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn regimes(grid: &GridFile) -> CliResult<Vec<Regime>> {
    if grid.regimes.is_empty() {
        return Ok(Regime::standard().to_vec());
    }
    grid.regimes
        .iter()
        .map(|r| {
            let composition: Composition = r
                .composition
                .parse()
                .map_err(|e| CliError::Config(format!("regime composition: {e}")))?;
            Ok(Regime { composition, noise_rate: r.noise })
        })
        .collect()
}

fn cell_id(label: &str, regime: &Regime) -> String {
    format!("{label}/{}/{}", regime.composition, regime.noise_rate)
}

pub fn run(args: MoranArgs) -> CliResult<()> {
    let grid = read_grid(&args.grid)?;
    let base_dir = args.grid.parent().unwrap_or(Path::new("."));
    let regimes = regimes(&grid)?;

    let mut base = MoranConfig {
        master_seed: args.seed.or(grid.seed).unwrap_or(0),
        ..MoranConfig::default()
    };
    if base.master_seed > i64::MAX as u64 {
        return Err(CliError::Config(format!("seed must be at most {}", i64::MAX)));
    }
    base.iterations = args.iterations.or(grid.iterations).unwrap_or(base.iterations);
    base.fitness_rounds = grid.fitness_rounds.unwrap_or(base.fitness_rounds);
    base.max_generations = grid.max_generations.unwrap_or(base.max_generations);
    if let Some([r, s, t, p]) = grid.payoffs {
        base.payoffs = PayoffMatrix::new(r, s, t, p).map_err(|e| CliError::Config(e.to_string()))?;
    }

    // A pair that fails to load fails its cells; the rest of the batch still runs.
    let mut failures = Vec::new();
    let mut pairs: Vec<AttitudeSets> = Vec::new();
    let mut inputs = BTreeMap::new();
    for rel in &grid.pairs {
        let dir = base_dir.join(rel);
        match load_pair(&dir) {
            Ok(sets) => {
                let label = pair_label(&sets);
                if pairs.iter().any(|p| pair_label(p) == label) {
                    return Err(CliError::Config(format!("model–prompt pair {label} listed twice")));
                }
                record_set_hashes(&sets, &mut inputs);
                pairs.push(sets);
            }
            Err(e) => {
                for regime in &regimes {
                    eprintln!("cell {}/{}: {e}", rel.display(), regime.label());
                }
                failures.push(e);
            }
        }
    }

    let mut cells = Vec::new();
    for sets in &pairs {
        let label = pair_label(sets);
        for regime in &regimes {
            let mut config = MoranConfig {
                population_size: regime.composition.total(),
                composition: regime.composition,
                noise_rate: regime.noise_rate,
                ..base
            };
            for o in &grid.overrides {
                let pair_hit = o.pair.as_deref().is_none_or(|p| p == label);
                let regime_hit = o.regime.as_deref().is_none_or(|r| r == regime.label());
                if pair_hit && regime_hit {
                    config.iterations = o.iterations.unwrap_or(config.iterations);
                    config.fitness_rounds = o.fitness_rounds.unwrap_or(config.fitness_rounds);
                    config.max_generations = o.max_generations.unwrap_or(config.max_generations);
                }
            }
            let id = cell_id(&label, regime);
            if let Err(e) = config.validate() {
                eprintln!("cell {id}: {e}");
                failures.push(CliError::Config(format!("cell {id}: {e}")));
                continue;
            }
            cells.push(CellSpec { id, regime: *regime, config, sets });
        }
    }
    if cells.is_empty() {
        failures.push(CliError::Config("the grid has no runnable cells".into()));
        return Err(CliError::Batch(failures));
    }

    let recorded = Recorded {
        cells: cells.iter().map(|c| RecordedCell { id: c.id.clone(), config: c.config }).collect(),
    };
    let manifest = Manifest::new("moran", &recorded, &inputs)?;
    let threads = args.workers.threads;
    let results = run_condition_batch(&cells, threads);

    let dir = manifest.create_run_dir(&args.out, threads)?;
    write_outputs(&dir, manifest.hash(), &cells, &results)?;
    print_table(&cells, &results, &regimes);
    for r in &results {
        for d in &r.diagnostics {
            eprintln!("cell {}: {d}", r.id);
        }
        if r.outcomes.len() as u32 != cells.iter().find(|c| c.id == r.id).map_or(0, |c| c.config.iterations) {
            failures.push(CliError::Internal(format!("cell {}: iterations failed", r.id)));
        }
    }
    println!("{}", dir.display());
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Batch(failures))
    }
}

fn write_outputs(dir: &Path, hash: &str, cells: &[CellSpec<'_>], results: &[CellResult]) -> CliResult<()> {
    let mut outcomes = CsvOut::create(
        dir,
        "moran_outcomes.csv",
        hash,
        &["model", "prompt", "composition", "noise", "iteration", "seed", "fixed_attitude", "generations"],
    )?;
    let mut equilibria = CsvOut::create(
        dir,
        "equilibria.csv",
        hash,
        &[
            "model", "prompt", "composition", "noise", "n", "p_a", "p_c", "p_n", "censored", "se_a", "se_c", "se_n",
        ],
    )?;
    for (cell, result) in cells.iter().zip(results) {
        let model = cell.sets.model_label();
        let prompt = cell.sets.prompt_label().to_string();
        let composition = cell.regime.composition.to_string();
        let noise = cell.regime.noise_rate.to_string();
        for (i, o) in result.outcomes.iter().enumerate() {
            outcomes.row([
                model,
                &prompt,
                &composition,
                &noise,
                &i.to_string(),
                &o.iteration_seed.to_string(),
                &o.fixed_attitude.to_string(),
                &o.generations.to_string(),
            ])?;
        }
        let d = &result.distribution;
        equilibria.row([
            model.to_string(),
            prompt.clone(),
            composition.clone(),
            noise.clone(),
            d.n.to_string(),
            fmt_f(d.p_a, 6),
            fmt_f(d.p_c, 6),
            fmt_f(d.p_n, 6),
            fmt_f(d.censored, 6),
            fmt_f(d.se(Attitude::Aggressive), 6),
            fmt_f(d.se(Attitude::Cooperative), 6),
            fmt_f(d.se(Attitude::Neutral), 6),
        ])?;
    }
    outcomes.finish()?;
    equilibria.finish()
}

/// One row per pair, one `A/C/N` percentage column per regime.
fn print_table(cells: &[CellSpec<'_>], results: &[CellResult], regimes: &[Regime]) {
    let mut header = format!("{:<28}", "pair");
    for r in regimes {
        header.push_str(&format!(" {:>14}", r.label()));
    }
    println!("{header}");
    let mut labels: Vec<String> = Vec::new();
    for c in cells {
        let l = pair_label(c.sets);
        if !labels.contains(&l) {
            labels.push(l);
        }
    }
    for label in labels {
        let mut line = format!("{label:<28}");
        for regime in regimes {
            let hit = cells
                .iter()
                .zip(results)
                .find(|(c, _)| pair_label(c.sets) == label && c.regime == *regime);
            let text = match hit {
                Some((_, r)) => {
                    let d = &r.distribution;
                    let pct = |p: f64| (p * 100.0).round() as i64;
                    let mut t = format!("{}/{}/{}", pct(d.p_a), pct(d.p_c), pct(d.p_n));
                    if d.censored > 0.0 {
                        t.push_str(&format!(" +{}c", pct(d.censored)));
                    }
                    t
                }
                None => "-".into(),
            };
            line.push_str(&format!(" {text:>14}"));
        }
        println!("{line}");
    }
}
