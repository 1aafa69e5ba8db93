use std::fmt;

use crate::types::{Action, Attitude};

/// Maximum nesting depth of a rule condition.
pub const MAX_CONDITION_DEPTH: usize = 16;

/// A probability of cooperating. `1.0` is pure C and `0.0` is pure D.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ActionDistribution {
    p_cooperate: f64,
}

impl ActionDistribution {
    pub const COOPERATE: Self = Self { p_cooperate: 1.0 };
    pub const DEFECT: Self = Self { p_cooperate: 0.0 };

    /// Returns `None` unless `0 <= p <= 1`.
    pub fn new(p_cooperate: f64) -> Option<Self> {
        (0.0..=1.0)
            .contains(&p_cooperate)
            .then_some(Self { p_cooperate })
    }

    pub fn pure(action: Action) -> Self {
        match action {
            Action::Cooperate => Self::COOPERATE,
            Action::Defect => Self::DEFECT,
        }
    }

    pub fn p_cooperate(self) -> f64 {
        self.p_cooperate
    }

    /// The action this distribution always yields, if it is degenerate.
    pub fn as_pure(self) -> Option<Action> {
        if self.p_cooperate == 1.0 {
            Some(Action::Cooperate)
        } else if self.p_cooperate == 0.0 {
            Some(Action::Defect)
        } else {
            None
        }
    }
}

impl fmt::Display for ActionDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_pure() {
            Some(a) => write!(f, "{a}"),
            None => write!(f, "C with {}", self.p_cooperate),
        }
    }
}

/// Observable quantities a rule can test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Feature {
    Round,
    MyLast,
    OppLast,
    MyDefections,
    OppDefections,
    OppCoopRate,
    ConsecutiveOppDefections,
}

impl Feature {
    pub const ALL: [Feature; 7] = [
        Feature::Round,
        Feature::MyLast,
        Feature::OppLast,
        Feature::MyDefections,
        Feature::OppDefections,
        Feature::OppCoopRate,
        Feature::ConsecutiveOppDefections,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::Round => "round",
            Feature::MyLast => "my_last",
            Feature::OppLast => "opp_last",
            Feature::MyDefections => "my_defections",
            Feature::OppDefections => "opp_defections",
            Feature::OppCoopRate => "opp_coop_rate",
            Feature::ConsecutiveOppDefections => "consecutive_opp_defections",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn value_type(self) -> ValueType {
        match self {
            Feature::MyLast | Feature::OppLast => ValueType::Action,
            _ => ValueType::Number,
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueType {
    Number,
    Action,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Operand {
    Feature(Feature),
    Number(f64),
    Action(Action),
}

impl Operand {
    pub fn value_type(self) -> ValueType {
        match self {
            Operand::Feature(f) => f.value_type(),
            Operand::Number(_) => ValueType::Number,
            Operand::Action(_) => ValueType::Action,
        }
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Feature(feat) => f.write_str(feat.name()),
            Operand::Number(x) => write!(f, "{x}"),
            Operand::Action(a) => write!(f, "{a}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn is_equality(self) -> bool {
        matches!(self, CmpOp::Eq | CmpOp::Ne)
    }
}

/// Boolean expression over history features.
#[derive(Clone, Debug, PartialEq)]
pub enum Condition {
    Compare { lhs: Operand, op: CmpOp, rhs: Operand },
    Not(Box<Condition>),
    And(Box<Condition>, Box<Condition>),
    Or(Box<Condition>, Box<Condition>),
}

impl Condition {
    pub fn depth(&self) -> usize {
        match self {
            Condition::Compare { .. } => 1,
            Condition::Not(inner) => 1 + inner.depth(),
            Condition::And(l, r) | Condition::Or(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Condition::Or(..) => 1,
            Condition::And(..) => 2,
            Condition::Not(_) | Condition::Compare { .. } => 3,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, child: &Condition, right: bool) -> fmt::Result {
        let parent = self.precedence();
        let prec = child.precedence();
        // Binary operators associate left, so an equal-precedence right child needs parens.
        if prec < parent || (right && prec == parent && prec < 3) {
            write!(f, "({child})")
        } else {
            write!(f, "{child}")
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Compare { lhs, op, rhs } => write!(f, "{lhs} {} {rhs}", op.symbol()),
            Condition::Not(inner) => {
                f.write_str("not ")?;
                if inner.precedence() < 3 {
                    write!(f, "({inner})")
                } else {
                    write!(f, "{inner}")
                }
            }
            Condition::And(l, r) => {
                self.fmt_child(f, l, false)?;
                f.write_str(" and ")?;
                self.fmt_child(f, r, true)
            }
            Condition::Or(l, r) => {
                self.fmt_child(f, l, false)?;
                f.write_str(" or ")?;
                self.fmt_child(f, r, true)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub condition: Condition,
    pub action: ActionDistribution,
}

/// A parsed, validated rule-based policy.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategySpec {
    pub name: String,
    pub attitude: Attitude,
    pub opening: Action,
    pub rules: Vec<Rule>,
    pub default_action: ActionDistribution,
}

impl StrategySpec {
    /// Mean `p_cooperate` over the opening, every rule action and the default.
    pub fn nominal_cooperation(&self) -> f64 {
        let opening = ActionDistribution::pure(self.opening).p_cooperate();
        let total: f64 = opening
            + self.rules.iter().map(|r| r.action.p_cooperate()).sum::<f64>()
            + self.default_action.p_cooperate();
        total / (self.rules.len() + 2) as f64
    }

    /// Canonical source text. Re-parses to an equal spec.
    pub fn to_source(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "strategy {} {} {{", self.name, self.attitude)?;
        writeln!(f, "    start {};", self.opening)?;
        for rule in &self.rules {
            writeln!(f, "    rule if {} -> {};", rule.condition, rule.action)?;
        }
        writeln!(f, "    default -> {};", self.default_action)?;
        writeln!(f, "}}")
    }
}
