use std::path::PathBuf;

use clap::Args;
use evoipd_core::metrics::compute_icd;
use evoipd_core::Attitude;
use serde::Serialize;

use crate::commands::metrics::load;
use crate::error::{CliError, CliResult};
use crate::manifest::Manifest;
use crate::table::{fmt_f, CsvOut};

/// Plot-ready data: stacked equilibrium fractions per cell and ICD bars per pair.
#[derive(Args, Debug)]
pub struct ReportArgs {
    #[arg(long = "results", value_name = "DIR")]
    pub results: Vec<PathBuf>,
    #[arg(long = "from-paper", value_name = "FILE")]
    pub tables: Vec<PathBuf>,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct Recorded {
    files: Vec<&'static str>,
}

pub fn run(args: ReportArgs) -> CliResult<()> {
    let inputs = load(&args.results, &args.tables)?;
    let recorded = Recorded { files: vec!["equilibria_bars.csv", "icd_bars.csv"] };
    let manifest = Manifest::new("report", &recorded, &inputs.hashes)?;
    let dir = manifest.create_run_dir(&args.out, None)?;
    let hash = manifest.hash();

    let mut bars = CsvOut::create(
        &dir,
        "equilibria_bars.csv",
        hash,
        &["model", "prompt", "condition", "segment", "fraction", "cumulative", "prior"],
    )?;
    for (key, d) in &inputs.equilibria {
        let condition = d.regime().label();
        let mut cumulative = 0.0;
        for (segment, fraction, prior) in [
            ("aggressive", d.p_a, d.composition.prior(Attitude::Aggressive)),
            ("cooperative", d.p_c, d.composition.prior(Attitude::Cooperative)),
            ("neutral", d.p_n, d.composition.prior(Attitude::Neutral)),
            ("censored", d.censored, 0.0),
        ] {
            cumulative += fraction;
            bars.row([
                key.model.as_str(),
                &key.prompt,
                &condition,
                segment,
                &fmt_f(fraction, 6),
                &fmt_f(cumulative, 6),
                &fmt_f(prior, 6),
            ])?;
        }
    }
    bars.finish()?;

    let mut icd = CsvOut::create(&dir, "icd_bars.csv", hash, &["model", "prompt", "icd"])?;
    for key in &inputs.pairs {
        if let Some(p) = inputs.payoffs.get(key) {
            let v = compute_icd(p).map_err(|e| CliError::Input(format!("{}/{}: {e}", key.model, key.prompt)))?;
            icd.row([key.model.as_str(), &key.prompt, &fmt_f(v, 6)])?;
        }
    }
    icd.finish()?;
    println!("{}", dir.display());
    Ok(())
}
