use std::path::PathBuf;

use clap::Args;
use evoipd_core::metrics::{compute_delta_noise, compute_icd, compute_separation, EntropyReport};
use evoipd_core::stats::{holm_bonferroni, two_proportion_z, StatsError, ZMethod};
use evoipd_core::{Attitude, Composition};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::inputs::{Inputs, PairKey};
use crate::manifest::Manifest;
use crate::table::{fmt_f, fmt_opt, CsvOut};

#[derive(Args, Debug)]
pub struct MetricsArgs {
    /// Run directory from `tournament` or `moran`. Repeatable.
    #[arg(long = "results", value_name = "DIR")]
    pub results: Vec<PathBuf>,
    /// Hand-transcribed table (payoffs or equilibria schema). Repeatable.
    #[arg(long = "from-paper", value_name = "FILE")]
    pub tables: Vec<PathBuf>,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Family-wise significance level for the Holm correction.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = ZMethod::Pooled)]
    pub z_method: ZMethod,
    /// Equilibrium proportion compared by the z-tests.
    #[arg(long, default_value = "aggressive")]
    pub z_attitude: Attitude,
}

#[derive(Serialize)]
struct Recorded {
    alpha: f64,
    z_method: ZMethod,
    z_attitude: Attitude,
}

pub fn load(results: &[PathBuf], tables: &[PathBuf]) -> CliResult<Inputs> {
    if results.is_empty() && tables.is_empty() {
        return Err(CliError::Config("give at least one --results DIR or --from-paper FILE".into()));
    }
    let inputs = Inputs::load(results, tables)?;
    if inputs.is_empty() {
        let file = results.first().or(tables.first()).cloned().unwrap_or_default();
        return Err(CliError::schema(file, "*", "no data rows"));
    }
    Ok(inputs)
}

/// Compositions with both a clean and a noisy cell, in order of appearance.
pub fn noise_compositions(inputs: &Inputs) -> Vec<Composition> {
    let mut out = Vec::new();
    for (_, d) in &inputs.equilibria {
        if !out.contains(&d.composition) {
            out.push(d.composition);
        }
    }
    out
}

/// Δ_noise and its standard error (both in percentage points) for one pair and composition.
pub fn delta_noise(inputs: &Inputs, key: &PairKey, composition: Composition) -> Option<(f64, f64)> {
    let find = |noisy: bool| {
        inputs
            .equilibria
            .iter()
            .find(|(k, d)| k == key && d.composition == composition && (d.noise_rate > 0.0) == noisy)
            .map(|(_, d)| d)
    };
    let (clean, noisy) = (find(false)?, find(true)?);
    let delta = compute_delta_noise(clean, noisy).ok()?;
    let se = 100.0 * (clean.se(Attitude::Cooperative).powi(2) + noisy.se(Attitude::Cooperative).powi(2)).sqrt();
    Some((delta, se))
}

pub fn run(args: MetricsArgs) -> CliResult<()> {
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(CliError::Config(format!("--alpha must lie in (0, 1), got {}", args.alpha)));
    }
    let inputs = load(&args.results, &args.tables)?;
    let recorded = Recorded { alpha: args.alpha, z_method: args.z_method, z_attitude: args.z_attitude };
    let manifest = Manifest::new("metrics", &recorded, &inputs.hashes)?;
    let dir = manifest.create_run_dir(&args.out, None)?;
    let hash = manifest.hash();

    let compositions = noise_compositions(&inputs);
    let mut header: Vec<String> = ["model", "prompt", "icd"].map(String::from).to_vec();
    for c in &compositions {
        header.push(format!("delta_noise_{c}"));
        header.push(format!("delta_noise_se_{c}"));
    }
    header.extend(["h_aggressive", "h_cooperative", "h_neutral", "mean_entropy", "separation"].map(String::from));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut metrics = CsvOut::create(&dir, "metrics.csv", hash, &header_refs)?;

    for key in &inputs.pairs {
        let icd = match inputs.payoffs.get(key) {
            Some(p) => Some(compute_icd(p).map_err(|e| CliError::Input(format!("{}/{}: {e}", key.model, key.prompt)))?),
            None => None,
        };
        let mut row = vec![key.model.clone(), key.prompt.clone(), fmt_opt(icd, 6)];
        for &c in &compositions {
            let d = delta_noise(&inputs, key, c);
            row.push(fmt_opt(d.map(|x| x.0), 3));
            row.push(fmt_opt(d.map(|x| x.1), 3));
        }
        match inputs.rates.get(key) {
            Some(rates) if rates.iter().all(|r| !r.is_empty()) => {
                let report = EntropyReport::from_rates([&rates[0], &rates[1], &rates[2]]);
                for e in &report.per_attitude {
                    row.push(fmt_f(e.h, 6));
                }
                row.push(fmt_f(report.mean_h, 6));
                row.push(fmt_f(compute_separation(&rates[1], &rates[0]), 6));
            }
            _ => row.extend(std::iter::repeat_n(String::new(), 5)),
        }
        metrics.row(&row)?;
    }
    metrics.finish()?;

    write_ztests(&dir, hash, &inputs, &args)?;
    println!("{}", dir.display());
    Ok(())
}

/// Pairwise tests between models sharing a prompt and a regime; each such group is one Holm family.
fn write_ztests(dir: &std::path::Path, hash: &str, inputs: &Inputs, args: &MetricsArgs) -> CliResult<()> {
    let mut out = CsvOut::create(
        dir,
        "ztests.csv",
        hash,
        &[
            "model_1", "model_2", "prompt", "composition", "noise", "attitude", "x1", "n1", "x2", "n2", "z",
            "p_value", "holm_threshold", "significant", "note",
        ],
    )?;
    let mut groups: Vec<(String, Composition, f64)> = Vec::new();
    for (k, d) in &inputs.equilibria {
        let g = (k.prompt.clone(), d.composition, d.noise_rate);
        if !groups.contains(&g) {
            groups.push(g);
        }
    }
    for (prompt, composition, noise) in groups {
        let members: Vec<_> = inputs
            .equilibria
            .iter()
            .filter(|(k, d)| k.prompt == prompt && d.composition == composition && d.noise_rate == noise)
            .collect();
        let mut tests = Vec::new();
        for i in 0..members.len() {
            for j in (i + 1)..members.len() {
                let (ka, da) = members[i];
                let (kb, db) = members[j];
                let result = two_proportion_z(
                    da.count(args.z_attitude),
                    da.n,
                    db.count(args.z_attitude),
                    db.n,
                    args.z_method,
                );
                tests.push((ka, kb, da, db, result));
            }
        }
        let family: Vec<f64> = tests.iter().filter_map(|t| t.4.as_ref().ok().map(|r| r.p_value)).collect();
        let holm = holm_bonferroni(&family, args.alpha);
        let (rejected, thresholds) = (holm.rejected(), holm.thresholds());
        let mut slot = 0;
        for (ka, kb, da, db, result) in tests {
            let counts = [
                da.count(args.z_attitude).to_string(),
                da.n.to_string(),
                db.count(args.z_attitude).to_string(),
                db.n.to_string(),
            ];
            let (z, p, threshold, significant, note) = match result {
                Ok(r) => {
                    let cols = (
                        fmt_f(r.z, 4),
                        format!("{:.6e}", r.p_value),
                        format!("{:.6e}", thresholds[slot]),
                        rejected[slot].to_string(),
                        String::new(),
                    );
                    slot += 1;
                    cols
                }
                Err(StatsError::ZeroVariance { sentinel }) => (
                    fmt_f(sentinel.z, 4),
                    format!("{:.6e}", sentinel.p_value),
                    String::new(),
                    String::new(),
                    "zero variance; use an exact test".into(),
                ),
                Err(e) => return Err(CliError::Input(format!("{}/{} vs {}: {e}", ka.model, prompt, kb.model))),
            };
            out.row([
                ka.model.as_str(),
                &kb.model,
                &prompt,
                &composition.to_string(),
                &noise.to_string(),
                args.z_attitude.name(),
                &counts[0],
                &counts[1],
                &counts[2],
                &counts[3],
                &z,
                &p,
                &threshold,
                &significant,
                &note,
            ])?;
        }
    }
    out.finish()
}
