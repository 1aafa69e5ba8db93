//! The strategy rule language: parsing, evaluation, strategy sets and a
//! synthetic set generator.

mod ast;
mod eval;
mod lexer;
mod parser;
mod set;
mod synth;

pub use ast::{
    ActionDistribution, CmpOp, Condition, Feature, Operand, Rule, StrategySpec, ValueType,
    MAX_CONDITION_DEPTH,
};
pub use eval::{evaluate, HistoryFeatures, ScriptedDraws, UniformSource};
pub use lexer::Position;
pub use parser::{parse_strategy, ParseError};
pub use set::{
    AttitudeSets, SetError, SetMeta, StrategySet, META_FILE, STANDARD_SET_SIZE, STRATEGY_EXT,
};
pub use synth::{synth_attitude_set, synth_labelled_set, SYNTH_MODEL_LABEL};
