use rand::RngCore;

use super::ast::{ActionDistribution, CmpOp, Condition, Feature, Operand, StrategySpec};
use crate::types::Action;

/// Source of uniform draws in `[0, 1)`.
pub trait UniformSource {
    fn next_unit(&mut self) -> f64;
}

impl<R: RngCore + ?Sized> UniformSource for R {
    #[inline]
    fn next_unit(&mut self) -> f64 {
        // 53 random mantissa bits, same construction as rand's `StandardUniform` for f64.
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Replays a fixed list of draws; panics when exhausted. Useful in tests.
#[derive(Clone, Debug)]
pub struct ScriptedDraws {
    draws: Vec<f64>,
    next: usize,
}

impl ScriptedDraws {
    pub fn new(draws: impl Into<Vec<f64>>) -> Self {
        Self {
            draws: draws.into(),
            next: 0,
        }
    }

    pub fn consumed(&self) -> usize {
        self.next
    }
}

impl UniformSource for ScriptedDraws {
    fn next_unit(&mut self) -> f64 {
        let x = self.draws[self.next];
        self.next += 1;
        x
    }
}

/// What a player knows before choosing its move in `round`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistoryFeatures {
    /// 1-based round about to be played.
    pub round: u32,
    pub my_last: Option<Action>,
    pub opp_last: Option<Action>,
    pub my_defections: u32,
    pub opp_defections: u32,
    /// Defined as 1.0 before the opponent has moved.
    pub opp_coop_rate: f64,
    pub consecutive_opp_defections: u32,
}

impl Default for HistoryFeatures {
    fn default() -> Self {
        Self::initial()
    }
}

impl HistoryFeatures {
    pub fn initial() -> Self {
        Self {
            round: 1,
            my_last: None,
            opp_last: None,
            my_defections: 0,
            opp_defections: 0,
            opp_coop_rate: 1.0,
            consecutive_opp_defections: 0,
        }
    }

    /// Records one completed round (as observed) and moves to the next.
    pub fn advance(&mut self, mine: Action, theirs: Action) {
        if mine == Action::Defect {
            self.my_defections += 1;
        }
        if theirs == Action::Defect {
            self.opp_defections += 1;
            self.consecutive_opp_defections += 1;
        } else {
            self.consecutive_opp_defections = 0;
        }
        self.my_last = Some(mine);
        self.opp_last = Some(theirs);
        let played = self.round as f64;
        self.opp_coop_rate = 1.0 - self.opp_defections as f64 / played;
        self.round += 1;
    }

    /// Features at the start of round `mine.len() + 1`.
    pub fn from_history(mine: &[Action], theirs: &[Action]) -> Self {
        assert_eq!(mine.len(), theirs.len(), "histories must have equal length");
        let mut features = Self::initial();
        for (&m, &t) in mine.iter().zip(theirs) {
            features.advance(m, t);
        }
        features
    }

    /// Checks the count and rate invariants.
    pub fn is_consistent(&self) -> bool {
        if self.round == 0 {
            return false;
        }
        let played = self.round - 1;
        let counts_ok = self.my_defections <= played
            && self.opp_defections <= played
            && self.consecutive_opp_defections <= self.opp_defections;
        let rate_ok = if played == 0 {
            self.opp_coop_rate == 1.0 && self.my_last.is_none() && self.opp_last.is_none()
        } else {
            let expected = 1.0 - self.opp_defections as f64 / played as f64;
            (self.opp_coop_rate - expected).abs() < 1e-12
                && self.my_last.is_some()
                && self.opp_last.is_some()
        };
        counts_ok && rate_ok && (0.0..=1.0).contains(&self.opp_coop_rate)
    }

    fn number(&self, feature: Feature) -> f64 {
        match feature {
            Feature::Round => self.round as f64,
            Feature::MyDefections => self.my_defections as f64,
            Feature::OppDefections => self.opp_defections as f64,
            Feature::OppCoopRate => self.opp_coop_rate,
            Feature::ConsecutiveOppDefections => self.consecutive_opp_defections as f64,
            Feature::MyLast | Feature::OppLast => f64::NAN,
        }
    }

    fn action(&self, feature: Feature) -> Option<Action> {
        match feature {
            Feature::MyLast => self.my_last,
            Feature::OppLast => self.opp_last,
            _ => None,
        }
    }
}

fn compare<T: PartialOrd>(lhs: T, op: CmpOp, rhs: T) -> bool {
    match op {
        CmpOp::Eq => lhs == rhs,
        CmpOp::Ne => lhs != rhs,
        CmpOp::Lt => lhs < rhs,
        CmpOp::Le => lhs <= rhs,
        CmpOp::Gt => lhs > rhs,
        CmpOp::Ge => lhs >= rhs,
    }
}

fn action_of(operand: Operand, features: &HistoryFeatures) -> Option<Action> {
    match operand {
        Operand::Feature(f) => features.action(f),
        Operand::Action(a) => Some(a),
        Operand::Number(_) => None,
    }
}

fn number_of(operand: Operand, features: &HistoryFeatures) -> f64 {
    match operand {
        Operand::Feature(f) => features.number(f),
        Operand::Number(x) => x,
        Operand::Action(_) => f64::NAN,
    }
}

impl Condition {
    /// Evaluates the condition. Operand types were checked at parse time.
    pub fn holds(&self, features: &HistoryFeatures) -> bool {
        match self {
            Condition::Compare { lhs, op, rhs } => {
                if lhs.value_type() == super::ast::ValueType::Action {
                    // An absent last move equals nothing but another absent move.
                    compare(action_of(*lhs, features), *op, action_of(*rhs, features))
                } else {
                    compare(number_of(*lhs, features), *op, number_of(*rhs, features))
                }
            }
            Condition::Not(inner) => !inner.holds(features),
            Condition::And(l, r) => l.holds(features) && r.holds(features),
            Condition::Or(l, r) => l.holds(features) || r.holds(features),
        }
    }
}

impl ActionDistribution {
    /// Realises the distribution. Pure actions draw nothing; mixed ones draw once
    /// and cooperate iff the draw is strictly below `p_cooperate`.
    #[inline]
    pub fn sample<U: UniformSource + ?Sized>(self, rng: &mut U) -> Action {
        match self.as_pure() {
            Some(a) => a,
            None if rng.next_unit() < self.p_cooperate() => Action::Cooperate,
            None => Action::Defect,
        }
    }
}

impl StrategySpec {
    /// The distribution the policy selects for `features`, before sampling.
    pub fn decide(&self, features: &HistoryFeatures) -> ActionDistribution {
        if features.round <= 1 {
            return ActionDistribution::pure(self.opening);
        }
        self.rules
            .iter()
            .find(|rule| rule.condition.holds(features))
            .map_or(self.default_action, |rule| rule.action)
    }
}

/// Chooses an action: the opening in round 1, otherwise the first matching rule, else the default.
#[inline]
pub fn evaluate<U: UniformSource + ?Sized>(
    spec: &StrategySpec,
    features: &HistoryFeatures,
    rng: &mut U,
) -> Action {
    spec.decide(features).sample(rng)
}
