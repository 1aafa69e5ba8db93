use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use evoipd_core::game::{DEFAULT_NOISE, DEFAULT_ROUNDS};
use evoipd_core::tournament::DEFAULT_REPETITIONS;
use evoipd_core::{run_tournament, Attitude, MatchConfig, PayoffMatrix, TournamentConfig};
use serde::Serialize;

use crate::common::{load_pair, pair_label, parse_payoffs, parse_seed, record_set_hashes, Workers};
use crate::error::{CliError, CliResult};
use crate::manifest::Manifest;
use crate::table::{fmt_f, CsvOut};

#[derive(Args, Debug)]
pub struct TournamentArgs {
    /// Model–prompt directory holding aggressive/, cooperative/ and neutral/ sets. Repeatable.
    #[arg(long = "strategies", value_name = "DIR", required = true)]
    pub strategies: Vec<PathBuf>,
    /// Root under which the run directory is created.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ROUNDS)]
    pub rounds: u32,
    #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
    pub reps: u32,
    #[arg(long, default_value_t = DEFAULT_NOISE)]
    pub noise: f64,
    #[arg(long, default_value = "0", value_parser = parse_seed)]
    pub seed: u64,
    /// Payoffs as R,S,T,P.
    #[arg(long, default_value = "3,0,5,1", value_parser = parse_payoffs)]
    pub payoffs: PayoffMatrix,
    /// Leave out matches of a strategy against itself.
    #[arg(long)]
    pub no_self_pairings: bool,
    #[command(flatten)]
    pub workers: Workers,
}

#[derive(Serialize)]
struct Recorded {
    tournament: TournamentConfig,
    pairs: Vec<String>,
}

pub fn run(args: TournamentArgs) -> CliResult<()> {
    let cfg = TournamentConfig {
        match_cfg: MatchConfig {
            rounds: args.rounds,
            noise_rate: args.noise,
            payoffs: args.payoffs,
            seed: args.seed,
        },
        repetitions: args.reps,
        include_self_pairings: !args.no_self_pairings,
    };
    cfg.match_cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    if cfg.repetitions == 0 {
        return Err(CliError::Config("--reps must be positive".into()));
    }

    let mut pairs = Vec::new();
    let mut inputs = BTreeMap::new();
    for dir in &args.strategies {
        let sets = load_pair(dir)?;
        let label = pair_label(&sets);
        if pairs.iter().any(|p| pair_label(p) == label) {
            return Err(CliError::Config(format!("model–prompt pair {label} given twice")));
        }
        record_set_hashes(&sets, &mut inputs);
        pairs.push(sets);
    }
    let recorded = Recorded { tournament: cfg, pairs: pairs.iter().map(pair_label).collect() };
    let manifest = Manifest::new("tournament", &recorded, &inputs)?;
    let threads = args.workers.threads;

    let mut results = Vec::with_capacity(pairs.len());
    for sets in &pairs {
        let res = run_tournament(sets, &cfg, threads).map_err(|e| CliError::Config(e.to_string()))?;
        results.push(res);
    }

    let dir = manifest.create_run_dir(&args.out, threads)?;
    let hash = manifest.hash();
    let mut coop = CsvOut::create(&dir, "cooperation.csv", hash, &["model", "prompt", "row", "col", "mean_coop_rate", "matches"])?;
    let mut pay = CsvOut::create(
        &dir,
        "payoffs.csv",
        hash,
        &["model", "prompt", "row", "col", "mean_payoff", "stderr", "matches"],
    )?;
    let mut strat = CsvOut::create(
        &dir,
        "strategies.csv",
        hash,
        &["model", "prompt", "attitude", "name", "coop_rate", "mean_payoff", "appearances"],
    )?;
    for (sets, res) in pairs.iter().zip(&results) {
        let model = sets.model_label();
        let prompt = sets.prompt_label().to_string();
        for row in Attitude::ALL {
            for col in Attitude::ALL {
                let (r, c) = (row.index(), col.index());
                coop.row([
                    model,
                    &prompt,
                    row.name(),
                    col.name(),
                    &fmt_f(res.cooperation.mean[r][c], 6),
                    &res.cooperation.matches[r][c].to_string(),
                ])?;
                pay.row([
                    model,
                    &prompt,
                    row.name(),
                    col.name(),
                    &fmt_f(res.payoffs.u[r][c], 6),
                    &fmt_f(res.payoffs.stderr[r][c], 6),
                    &res.payoffs.matches[r][c].to_string(),
                ])?;
            }
        }
        for s in &res.strategies {
            strat.row([
                model,
                &prompt,
                s.attitude.name(),
                &s.name,
                &fmt_f(s.coop_rate, 6),
                &fmt_f(s.mean_payoff, 6),
                &s.appearances.to_string(),
            ])?;
        }
        println!(
            "{}/{prompt}: {} matches, u[C][C] = {:.3}, u[A][A] = {:.3}",
            model,
            res.matches_played,
            res.payoffs.get(Attitude::Cooperative, Attitude::Cooperative),
            res.payoffs.get(Attitude::Aggressive, Attitude::Aggressive),
        );
    }
    coop.finish()?;
    pay.finish()?;
    strat.finish()?;
    println!("{}", dir.display());
    Ok(())
}
