use std::path::PathBuf;

use clap::Args;
use evoipd_core::dsl::{synth_labelled_set, AttitudeSets, StrategySet, SYNTH_MODEL_LABEL, STANDARD_SET_SIZE};
use evoipd_core::{Attitude, PromptLabel};

use crate::common::parse_seed;
use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug)]
pub enum AttitudeChoice {
    One(Attitude),
    All,
}

fn parse_choice(s: &str) -> Result<AttitudeChoice, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(AttitudeChoice::All);
    }
    s.parse::<Attitude>()
        .map(AttitudeChoice::One)
        .map_err(|_| format!("unknown attitude `{s}` (expected one of: aggressive, cooperative, neutral, all)"))
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// aggressive, cooperative, neutral, or all (writes one subdirectory per attitude).
    #[arg(long, value_parser = parse_choice)]
    pub attitude: AttitudeChoice,
    #[arg(long, value_parser = parse_seed)]
    pub seed: u64,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[arg(long, default_value_t = STANDARD_SET_SIZE)]
    pub size: usize,
    #[arg(long, default_value = SYNTH_MODEL_LABEL)]
    pub model: String,
    #[arg(long, default_value = "default")]
    pub prompt: PromptLabel,
    /// With `--attitude all`: build every set from this attitude's templates,
    /// giving identical pools (a neutral-drift control).
    #[arg(long, value_name = "ATTITUDE")]
    pub mirror: Option<Attitude>,
}

fn relabel(source: &StrategySet, attitude: Attitude) -> CliResult<StrategySet> {
    let specs = source
        .strategies()
        .iter()
        .cloned()
        .map(|mut s| {
            s.attitude = attitude;
            s
        })
        .collect();
    StrategySet::new(&source.model_label, source.prompt_label, attitude, specs, source.len())
        .map_err(|e| CliError::Internal(e.to_string()))
}

pub fn run(args: SynthArgs) -> CliResult<()> {
    if args.model.trim().is_empty() || args.model.contains(['/', '\n']) {
        return Err(CliError::Config(format!("invalid model label `{}`", args.model)));
    }
    let make = |a: Attitude| synth_labelled_set(a, args.seed, args.size, &args.model, args.prompt);
    match (args.attitude, args.mirror) {
        (AttitudeChoice::One(a), None) => {
            make(a).write_dir(&args.out)?;
            println!("wrote {} {a} strategies to {}", args.size, args.out.display());
        }
        (AttitudeChoice::One(_), Some(_)) => {
            return Err(CliError::Config("--mirror requires --attitude all".into()));
        }
        (AttitudeChoice::All, mirror) => {
            let sets = match mirror {
                None => AttitudeSets::new(
                    make(Attitude::Aggressive),
                    make(Attitude::Cooperative),
                    make(Attitude::Neutral),
                )?,
                Some(m) => {
                    let base = make(m);
                    AttitudeSets::new(
                        relabel(&base, Attitude::Aggressive)?,
                        relabel(&base, Attitude::Cooperative)?,
                        relabel(&base, Attitude::Neutral)?,
                    )?
                }
            };
            sets.write_dir(&args.out)?;
            println!("wrote 3 x {} strategies to {}", args.size, args.out.display());
        }
    }
    Ok(())
}
