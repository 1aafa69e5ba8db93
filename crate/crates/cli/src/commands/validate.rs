use std::path::PathBuf;

use clap::Args;
use evoipd_core::dsl::{AttitudeSets, StrategySet, META_FILE};

use crate::error::CliResult;

/// Parse-checks a set directory, or a model–prompt directory of three sets.
#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(value_name = "DIR")]
    pub dir: PathBuf,
}

fn describe(set: &StrategySet) {
    println!(
        "{}/{}/{}: {} strategies, sha256 {}",
        set.model_label,
        set.prompt_label,
        set.attitude,
        set.len(),
        set.content_hash()
    );
}

pub fn run(args: ValidateArgs) -> CliResult<()> {
    if args.dir.join(META_FILE).is_file() {
        describe(&StrategySet::load_dir(&args.dir)?);
    } else {
        AttitudeSets::load_dir(&args.dir)?.iter().for_each(describe);
    }
    println!("ok");
    Ok(())
}
