//! Strategy sets and their on-disk layout.
//!
//! A set directory holds one `.ipds` file per strategy plus a `set.meta`
//! key-value file. A model–prompt directory holds one set directory per
//! attitude.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use super::ast::StrategySpec;
use super::parser::{parse_strategy, ParseError};
use crate::seed::content_hash;
use crate::types::{Attitude, PromptLabel};

/// Number of strategies generated per attitude.
pub const STANDARD_SET_SIZE: usize = 25;

pub const META_FILE: &str = "set.meta";
pub const STRATEGY_EXT: &str = "ipds";

#[derive(Debug, thiserror::Error)]
pub enum SetError {
    #[error("{}: no {META_FILE} found", dir.display())]
    MissingMeta { dir: PathBuf },
    #[error("{}: {detail}", path.display())]
    BadMeta { path: PathBuf, detail: String },
    #[error("{}:{}:{}: {source}", file.display(), source.position().line, source.position().column)]
    Parse { file: PathBuf, source: ParseError },
    #[error("set `{label}` has {found} strategies, expected {expected}")]
    WrongSize { label: String, expected: usize, found: usize },
    #[error("strategy `{name}` is tagged {found} but the set is {expected}")]
    AttitudeMismatch { name: String, expected: Attitude, found: Attitude },
    #[error("strategy name `{0}` appears twice in one set")]
    DuplicateName(String),
    #[error("set mismatch: {0}")]
    SetMismatch(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl SetError {
    fn io(path: &Path, source: io::Error) -> Self {
        SetError::Io { path: path.to_path_buf(), source }
    }
}

/// The strategies one model–prompt pair produced for one attitude.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategySet {
    pub model_label: String,
    pub prompt_label: PromptLabel,
    pub attitude: Attitude,
    strategies: Vec<StrategySpec>,
}

impl StrategySet {
    /// Validates membership: `expected_size` members, matching attitude tags, unique names.
    /// Strategies are stored sorted by name.
    pub fn new(
        model_label: impl Into<String>,
        prompt_label: PromptLabel,
        attitude: Attitude,
        mut strategies: Vec<StrategySpec>,
        expected_size: usize,
    ) -> Result<Self, SetError> {
        let model_label = model_label.into();
        if strategies.len() != expected_size {
            return Err(SetError::WrongSize {
                label: format!("{model_label}/{prompt_label}/{attitude}"),
                expected: expected_size,
                found: strategies.len(),
            });
        }
        if let Some(s) = strategies.iter().find(|s| s.attitude != attitude) {
            return Err(SetError::AttitudeMismatch {
                name: s.name.clone(),
                expected: attitude,
                found: s.attitude,
            });
        }
        strategies.sort_by(|a, b| a.name.cmp(&b.name));
        if let Some(w) = strategies.windows(2).find(|w| w[0].name == w[1].name) {
            return Err(SetError::DuplicateName(w[0].name.clone()));
        }
        Ok(Self {
            model_label,
            prompt_label,
            attitude,
            strategies,
        })
    }

    pub fn strategies(&self) -> &[StrategySpec] {
        &self.strategies
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    /// Hash of the canonical form: labels plus every strategy pretty-printed.
    pub fn content_hash(&self) -> String {
        content_hash(self.canonical_text().as_bytes())
    }

    fn canonical_text(&self) -> String {
        let mut text = self.meta_text();
        for s in &self.strategies {
            text.push_str(&s.to_source());
        }
        text
    }

    fn meta_text(&self) -> String {
        let mut meta = String::new();
        let _ = writeln!(meta, "model_label = {}", self.model_label);
        let _ = writeln!(meta, "prompt_label = {}", self.prompt_label);
        let _ = writeln!(meta, "attitude = {}", self.attitude);
        let _ = writeln!(meta, "size = {}", self.strategies.len());
        meta
    }

    /// Writes `set.meta` and one `<name>.ipds` per strategy into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<(), SetError> {
        fs::create_dir_all(dir).map_err(|e| SetError::io(dir, e))?;
        let meta = dir.join(META_FILE);
        fs::write(&meta, self.meta_text()).map_err(|e| SetError::io(&meta, e))?;
        for s in &self.strategies {
            let path = dir.join(format!("{}.{STRATEGY_EXT}", s.name));
            fs::write(&path, s.to_source()).map_err(|e| SetError::io(&path, e))?;
        }
        Ok(())
    }

    /// Loads and validates a set directory.
    pub fn load_dir(dir: &Path) -> Result<Self, SetError> {
        let meta_path = dir.join(META_FILE);
        if !meta_path.is_file() {
            return Err(SetError::MissingMeta { dir: dir.to_path_buf() });
        }
        let meta = SetMeta::read(&meta_path)?;

        let mut files = Vec::new();
        for entry in fs::read_dir(dir).map_err(|e| SetError::io(dir, e))? {
            let path = entry.map_err(|e| SetError::io(dir, e))?.path();
            if path.extension().is_some_and(|e| e == STRATEGY_EXT) {
                files.push(path);
            }
        }
        files.sort();

        let mut strategies = Vec::with_capacity(files.len());
        for file in files {
            let source = fs::read_to_string(&file).map_err(|e| SetError::io(&file, e))?;
            let spec = parse_strategy(&source).map_err(|source| SetError::Parse {
                file: file.clone(),
                source,
            })?;
            strategies.push(spec);
        }
        Self::new(meta.model_label, meta.prompt_label, meta.attitude, strategies, meta.size)
    }
}

/// Parsed contents of a `set.meta` file.
#[derive(Clone, Debug, PartialEq)]
pub struct SetMeta {
    pub model_label: String,
    pub prompt_label: PromptLabel,
    pub attitude: Attitude,
    pub size: usize,
}

impl SetMeta {
    pub fn read(path: &Path) -> Result<Self, SetError> {
        let text = fs::read_to_string(path).map_err(|e| SetError::io(path, e))?;
        Self::parse(&text).map_err(|detail| SetError::BadMeta {
            path: path.to_path_buf(),
            detail,
        })
    }

    /// `key = value` lines; `#` starts a comment; values may be quoted.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut fields = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(':'))
                .ok_or_else(|| format!("line {}: expected `key = value`", lineno + 1))?;
            let value = value.trim().trim_matches('"').to_string();
            fields.insert(key.trim().to_string(), value);
        }
        let get = |key: &str| {
            fields
                .get(key)
                .cloned()
                .ok_or_else(|| format!("missing key `{key}`"))
        };
        let size = match fields.get("size") {
            Some(s) => s.parse().map_err(|_| format!("invalid size `{s}`"))?,
            None => STANDARD_SET_SIZE,
        };
        Ok(Self {
            model_label: get("model_label")?,
            prompt_label: get("prompt_label")?.parse().map_err(|e| format!("{e}"))?,
            attitude: get("attitude")?.parse().map_err(|e| format!("{e}"))?,
            size,
        })
    }
}

/// One set per attitude, all from the same model–prompt pair.
#[derive(Clone, Debug, PartialEq)]
pub struct AttitudeSets {
    sets: [StrategySet; 3],
}

impl AttitudeSets {
    pub fn new(
        aggressive: StrategySet,
        cooperative: StrategySet,
        neutral: StrategySet,
    ) -> Result<Self, SetError> {
        let sets = [aggressive, cooperative, neutral];
        for (set, expected) in sets.iter().zip(Attitude::ALL) {
            if set.attitude != expected {
                return Err(SetError::SetMismatch(format!(
                    "expected a {expected} set, got {}",
                    set.attitude
                )));
            }
        }
        let (model, prompt) = (&sets[0].model_label, sets[0].prompt_label);
        if sets.iter().any(|s| &s.model_label != model || s.prompt_label != prompt) {
            return Err(SetError::SetMismatch(format!(
                "labels differ: {}",
                sets.iter()
                    .map(|s| format!("{}/{}", s.model_label, s.prompt_label))
                    .collect::<Vec<_>>()
                    .join(", ")
            )));
        }
        Ok(Self { sets })
    }

    /// Builds from sets in any order.
    pub fn from_unordered(sets: Vec<StrategySet>) -> Result<Self, SetError> {
        let mut slots: [Option<StrategySet>; 3] = [None, None, None];
        for set in sets {
            let slot = &mut slots[set.attitude.index()];
            if slot.is_some() {
                return Err(SetError::SetMismatch(format!("two {} sets", set.attitude)));
            }
            *slot = Some(set);
        }
        let [a, c, n] = slots;
        let missing = |att: Attitude| SetError::SetMismatch(format!("no {att} set"));
        Self::new(
            a.ok_or_else(|| missing(Attitude::Aggressive))?,
            c.ok_or_else(|| missing(Attitude::Cooperative))?,
            n.ok_or_else(|| missing(Attitude::Neutral))?,
        )
    }

    /// Loads every immediate subdirectory of `dir` that carries a `set.meta`.
    pub fn load_dir(dir: &Path) -> Result<Self, SetError> {
        let mut subdirs = Vec::new();
        for entry in fs::read_dir(dir).map_err(|e| SetError::io(dir, e))? {
            let path = entry.map_err(|e| SetError::io(dir, e))?.path();
            if path.is_dir() {
                subdirs.push(path);
            }
        }
        subdirs.sort();
        if subdirs.is_empty() {
            return Err(SetError::MissingMeta { dir: dir.to_path_buf() });
        }
        let sets = subdirs
            .iter()
            .map(|d| StrategySet::load_dir(d))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_unordered(sets)
    }

    /// Writes each set to `dir/<attitude>/`.
    pub fn write_dir(&self, dir: &Path) -> Result<(), SetError> {
        for set in &self.sets {
            set.write_dir(&dir.join(set.attitude.name()))?;
        }
        Ok(())
    }

    pub fn get(&self, attitude: Attitude) -> &StrategySet {
        &self.sets[attitude.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &StrategySet> {
        self.sets.iter()
    }

    pub fn model_label(&self) -> &str {
        &self.sets[0].model_label
    }

    pub fn prompt_label(&self) -> PromptLabel {
        self.sets[0].prompt_label
    }

    /// Content hashes in A, C, N order.
    pub fn content_hashes(&self) -> [String; 3] {
        [0, 1, 2].map(|i| self.sets[i].content_hash())
    }
}
