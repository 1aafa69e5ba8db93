//! Readers for result tables, whether produced by earlier runs or transcribed
//! by hand.
//!
//! Recognised schemas (header names, any column order, extra columns ignored):
//!
//! * payoffs, long: `model,prompt,row,col,mean_payoff` (what `tournament` writes)
//! * payoffs, wide: `model,prompt,a_vs_a,a_vs_c,a_vs_n,c_vs_a,c_vs_c,c_vs_n[,n_vs_a,n_vs_c,n_vs_n]`
//! * strategies: `model,prompt,attitude,coop_rate`
//! * equilibria: `model,prompt,composition,noise` plus `p_a,p_c,p_n` (fractions) or
//!   `pct_a,pct_c,pct_n` (percent), optional `censored`/`pct_censored` and `n` (default 500)

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use evoipd_core::moran::EquilibriumDistribution;
use evoipd_core::seed::content_hash;
use evoipd_core::{Attitude, Composition, PayoffTable};

use crate::error::{CliError, CliResult};
use crate::table::CsvIn;

/// Sample size assumed when an equilibria table has no `n` column.
pub const DEFAULT_EQUILIBRIUM_N: u64 = 500;

const RESULT_FILES: [&str; 3] = ["payoffs.csv", "strategies.csv", "equilibria.csv"];

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PairKey {
    pub model: String,
    pub prompt: String,
}

#[derive(Default)]
pub struct Inputs {
    /// Pairs in order of first appearance.
    pub pairs: Vec<PairKey>,
    pub payoffs: BTreeMap<PairKey, PayoffTable>,
    /// Per-strategy cooperation rates, A, C, N.
    pub rates: BTreeMap<PairKey, [Vec<f64>; 3]>,
    /// Cells in order of appearance.
    pub equilibria: Vec<(PairKey, EquilibriumDistribution)>,
    /// Stable label to content hash, for the manifest.
    pub hashes: BTreeMap<String, String>,
}

impl Inputs {
    pub fn load(results: &[PathBuf], tables: &[PathBuf]) -> CliResult<Self> {
        let mut inputs = Inputs::default();
        for (i, dir) in results.iter().enumerate() {
            let mut found = false;
            for name in RESULT_FILES {
                let path = dir.join(name);
                if path.is_file() {
                    inputs.add_file(&path, &format!("results.{i}.{name}"))?;
                    found = true;
                }
            }
            if !found {
                return Err(CliError::schema(
                    dir,
                    "*",
                    format!("no result tables (expected one of {})", RESULT_FILES.join(", ")),
                ));
            }
        }
        for (i, path) in tables.iter().enumerate() {
            let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            inputs.add_file(path, &format!("table.{i}.{name}"))?;
        }
        Ok(inputs)
    }

    fn note_pair(&mut self, key: &PairKey) {
        if !self.pairs.contains(key) {
            self.pairs.push(key.clone());
        }
    }

    fn add_file(&mut self, path: &Path, label: &str) -> CliResult<()> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        self.hashes.insert(label.to_string(), content_hash(&bytes));
        let table = CsvIn::read(path)?;
        if table.has("row") && table.has("mean_payoff") {
            self.add_long_payoffs(&table)
        } else if table.has("a_vs_a") {
            self.add_wide_payoffs(&table)
        } else if table.has("coop_rate") && table.has("attitude") {
            self.add_rates(&table)
        } else if table.has("composition") {
            self.add_equilibria(&table)
        } else {
            Err(CliError::schema(
                path,
                "*",
                "unrecognised table: expected payoffs (row,col,mean_payoff or a_vs_a..c_vs_n), \
                 strategies (attitude,coop_rate) or equilibria (composition,noise,p_*/pct_*)",
            ))
        }
    }

    fn key(table: &CsvIn, row: &csv::StringRecord, model: usize, prompt: usize) -> PairKey {
        PairKey {
            model: table.str(row, model).to_string(),
            prompt: table.str(row, prompt).to_string(),
        }
    }

    fn add_long_payoffs(&mut self, t: &CsvIn) -> CliResult<()> {
        let (m, p) = (t.column("model")?, t.column("prompt")?);
        let (r, c, v) = (t.column("row")?, t.column("col")?, t.column("mean_payoff")?);
        let se = if t.has("stderr") { Some(t.column("stderr")?) } else { None };
        for row in &t.rows {
            let key = Self::key(t, row, m, p);
            self.note_pair(&key);
            let a: Attitude = t.parsed(row, r)?;
            let b: Attitude = t.parsed(row, c)?;
            let entry = self
                .payoffs
                .entry(key)
                .or_insert_with(|| PayoffTable::from_means([[f64::NAN; 3]; 3]));
            entry.u[a.index()][b.index()] = t.f64(row, v)?;
            if let Some(se) = se {
                entry.stderr[a.index()][b.index()] = t.f64(row, se)?;
            }
        }
        Ok(())
    }

    fn add_wide_payoffs(&mut self, t: &CsvIn) -> CliResult<()> {
        let (m, p) = (t.column("model")?, t.column("prompt")?);
        let mut cols = [[None; 3]; 3];
        for (ri, rc) in ["a", "c", "n"].iter().enumerate() {
            for (ci, cc) in ["a", "c", "n"].iter().enumerate() {
                let name = format!("{rc}_vs_{cc}");
                cols[ri][ci] = if *rc == "n" && !t.has(&name) { None } else { Some(t.column(&name)?) };
            }
        }
        for row in &t.rows {
            let key = Self::key(t, row, m, p);
            self.note_pair(&key);
            let mut u = [[f64::NAN; 3]; 3];
            for ri in 0..3 {
                for ci in 0..3 {
                    if let Some(col) = cols[ri][ci] {
                        u[ri][ci] = t.f64(row, col)?;
                    }
                }
            }
            self.payoffs.insert(key, PayoffTable::from_means(u));
        }
        Ok(())
    }

    fn add_rates(&mut self, t: &CsvIn) -> CliResult<()> {
        let (m, p) = (t.column("model")?, t.column("prompt")?);
        let (a, r) = (t.column("attitude")?, t.column("coop_rate")?);
        for row in &t.rows {
            let key = Self::key(t, row, m, p);
            self.note_pair(&key);
            let attitude: Attitude = t.parsed(row, a)?;
            let rate = t.f64(row, r)?;
            self.rates.entry(key).or_default()[attitude.index()].push(rate);
        }
        Ok(())
    }

    fn add_equilibria(&mut self, t: &CsvIn) -> CliResult<()> {
        let (m, p) = (t.column("model")?, t.column("prompt")?);
        let (comp, noise) = (t.column("composition")?, t.column("noise")?);
        let (prefix, scale) = if t.has("p_a") { ("p_", 1.0) } else { ("pct_", 100.0) };
        let shares = [
            t.column(&format!("{prefix}a"))?,
            t.column(&format!("{prefix}c"))?,
            t.column(&format!("{prefix}n"))?,
        ];
        let censored_name = if prefix == "p_" { "censored".to_string() } else { "pct_censored".to_string() };
        let censored = if t.has(&censored_name) { Some(t.column(&censored_name)?) } else { None };
        let n = if t.has("n") { Some(t.column("n")?) } else { None };
        for row in &t.rows {
            let key = Self::key(t, row, m, p);
            self.note_pair(&key);
            let composition: Composition = t.parsed(row, comp)?;
            let noise_rate = t.f64(row, noise)?;
            let share = |col: usize| -> CliResult<f64> {
                let v = t.f64(row, col)? / scale;
                if !(0.0..=1.0).contains(&v) {
                    return Err(CliError::schema(&t.path, &format!("{prefix}*"), format!("share {v} outside [0, 1]")));
                }
                Ok(v)
            };
            let dist = EquilibriumDistribution {
                composition,
                noise_rate,
                p_a: share(shares[0])?,
                p_c: share(shares[1])?,
                p_n: share(shares[2])?,
                censored: match censored {
                    Some(c) => share(c)?,
                    None => 0.0,
                },
                n: match n {
                    Some(c) => t.u64(row, c)?,
                    None => DEFAULT_EQUILIBRIUM_N,
                },
            };
            self.equilibria.push((key, dist));
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.payoffs.is_empty() && self.rates.is_empty() && self.equilibria.is_empty()
    }
}
