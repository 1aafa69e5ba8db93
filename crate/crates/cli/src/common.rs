use std::collections::BTreeMap;
use std::path::Path;

use clap::Args;
use evoipd_core::dsl::AttitudeSets;
use evoipd_core::PayoffMatrix;

use crate::error::CliResult;

#[derive(Args, Debug, Clone)]
pub struct Workers {
    /// Worker threads (results do not depend on it). Defaults to all cores.
    #[arg(long, env = "EVOIPD_THREADS", value_name = "K")]
    pub threads: Option<usize>,
}

/// Seeds are stored as TOML integers, so they must fit in an i64.
pub fn parse_seed(s: &str) -> Result<u64, String> {
    let v: u64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > i64::MAX as u64 {
        return Err(format!("seed must be at most {}", i64::MAX));
    }
    Ok(v)
}

/// `R,S,T,P`.
pub fn parse_payoffs(s: &str) -> Result<PayoffMatrix, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [r, s, t, p] => PayoffMatrix::new(r, s, t, p).map_err(|e| e.to_string()),
        _ => Err("expected four comma-separated values R,S,T,P".into()),
    }
}

/// `model/prompt`.
pub fn pair_label(sets: &AttitudeSets) -> String {
    format!("{}/{}", sets.model_label(), sets.prompt_label())
}

pub fn load_pair(dir: &Path) -> CliResult<AttitudeSets> {
    Ok(AttitudeSets::load_dir(dir)?)
}

/// Adds `model/prompt/attitude -> content hash` entries.
pub fn record_set_hashes(sets: &AttitudeSets, inputs: &mut BTreeMap<String, String>) {
    let label = pair_label(sets);
    for (set, hash) in sets.iter().zip(sets.content_hashes()) {
        inputs.insert(format!("{label}/{}", set.attitude), hash);
    }
}
