//! Recursive-descent parser for `.ipds` strategy sources.
//!
//! ```text
//! strategy <ident> <attitude> "{"
//!     "start" (C|D) ";"
//!     { "rule" "if" <cond> "->" <act> ";" }
//!     "default" "->" <act> [";"]
//! "}"
//!
//! cond    := and { "or" and }
//! and     := unary { "and" unary }
//! unary   := "not" unary | "(" cond ")" | operand cmp operand
//! operand := feature | number | C | D
//! act     := C | D | C "with" number
//! ```

use super::ast::{
    ActionDistribution, CmpOp, Condition, Feature, Operand, Rule, StrategySpec, ValueType,
    MAX_CONDITION_DEPTH,
};
use super::lexer::{tokenize, Position, Token, TokenKind};
use crate::types::{Action, Attitude};

/// Recursion guard; parentheses nest without adding condition depth.
const MAX_NESTING: usize = 4 * MAX_CONDITION_DEPTH;

const KEYWORDS: &[&str] = &[
    "strategy", "start", "rule", "if", "default", "with", "and", "or", "not", "C", "D",
];

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("{pos}: syntax error: found {found}, expected {}", expected.join(" or "))]
    Syntax {
        pos: Position,
        found: String,
        expected: Vec<String>,
    },
    #[error("{pos}: strategy `{name}` has no `default` clause")]
    MissingDefault { pos: Position, name: String },
    #[error("{pos}: unknown feature `{name}` (known: {})", known_features())]
    UnknownFeature { pos: Position, name: String },
    #[error("{pos}: probability {value} is outside [0, 1]")]
    ProbabilityOutOfRange { pos: Position, value: f64 },
    #[error("{pos}: type mismatch: {detail}")]
    TypeMismatch { pos: Position, detail: String },
    #[error("{pos}: condition nesting exceeds depth {MAX_CONDITION_DEPTH}")]
    DepthExceeded { pos: Position },
}

impl ParseError {
    pub fn position(&self) -> Position {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::MissingDefault { pos, .. }
            | ParseError::UnknownFeature { pos, .. }
            | ParseError::ProbabilityOutOfRange { pos, .. }
            | ParseError::TypeMismatch { pos, .. }
            | ParseError::DepthExceeded { pos } => *pos,
        }
    }
}

fn known_features() -> String {
    Feature::ALL.map(Feature::name).join(", ")
}

/// Parses one strategy definition.
pub fn parse_strategy(source: &str) -> Result<StrategySpec, ParseError> {
    let tokens = tokenize(source).map_err(|e| ParseError::Syntax {
        pos: e.pos,
        found: format!("`{}`", e.found),
        expected: vec!["a token".into()],
    })?;
    Parser { tokens, cursor: 0 }.strategy()
}

struct Parser {
    tokens: Vec<Token>,
    cursor: usize,
}

fn quoted(s: &str) -> String {
    format!("`{s}`")
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.cursor]
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.cursor].clone();
        if tok.kind != TokenKind::Eof {
            self.cursor += 1;
        }
        tok
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        let tok = self.peek();
        Err(ParseError::Syntax {
            pos: tok.pos,
            found: tok.kind.describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(s) if s == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<Position, ParseError> {
        if self.at_keyword(kw) {
            Ok(self.bump().pos)
        } else {
            self.error(&[&quoted(kw)])
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Position, ParseError> {
        if self.peek().kind == kind {
            Ok(self.bump().pos)
        } else {
            self.error(&[&kind.describe()])
        }
    }

    fn strategy(&mut self) -> Result<StrategySpec, ParseError> {
        self.expect_keyword("strategy")?;
        let name = match &self.peek().kind {
            TokenKind::Ident(s) if !KEYWORDS.contains(&s.as_str()) => s.clone(),
            _ => return self.error(&["strategy name"]),
        };
        self.bump();

        let attitude = match &self.peek().kind {
            TokenKind::Ident(s) => match s.as_str() {
                "aggressive" => Attitude::Aggressive,
                "cooperative" => Attitude::Cooperative,
                "neutral" => Attitude::Neutral,
                _ => return self.error(&["`aggressive`", "`cooperative`", "`neutral`"]),
            },
            _ => return self.error(&["`aggressive`", "`cooperative`", "`neutral`"]),
        };
        self.bump();
        self.expect(TokenKind::LBrace)?;

        self.expect_keyword("start")?;
        let opening = self.pure_action()?;
        if self.peek().kind == TokenKind::Semi {
            self.bump();
        } else if self.peek().kind != TokenKind::RBrace {
            return self.error(&["`;`"]);
        }

        let mut rules = Vec::new();
        let default_action = loop {
            if self.at_keyword("rule") {
                self.bump();
                self.expect_keyword("if")?;
                let condition = self.condition(0)?;
                self.expect(TokenKind::Arrow)?;
                let action = self.action()?;
                self.expect(TokenKind::Semi)?;
                rules.push(Rule { condition, action });
            } else if self.at_keyword("default") {
                self.bump();
                self.expect(TokenKind::Arrow)?;
                let action = self.action()?;
                if self.peek().kind == TokenKind::Semi {
                    self.bump();
                }
                break action;
            } else if self.peek().kind == TokenKind::RBrace || self.peek().kind == TokenKind::Eof {
                return Err(ParseError::MissingDefault {
                    pos: self.peek().pos,
                    name,
                });
            } else {
                return self.error(&["`rule`", "`default`"]);
            }
        };

        self.expect(TokenKind::RBrace)?;
        self.expect(TokenKind::Eof)?;

        Ok(StrategySpec {
            name,
            attitude,
            opening,
            rules,
            default_action,
        })
    }

    fn pure_action(&mut self) -> Result<Action, ParseError> {
        let action = match &self.peek().kind {
            TokenKind::Ident(s) if s == "C" => Action::Cooperate,
            TokenKind::Ident(s) if s == "D" => Action::Defect,
            _ => return self.error(&["`C`", "`D`"]),
        };
        self.bump();
        Ok(action)
    }

    fn action(&mut self) -> Result<ActionDistribution, ParseError> {
        let action = self.pure_action()?;
        if action == Action::Cooperate && self.at_keyword("with") {
            self.bump();
            let tok = self.bump();
            return match tok.kind {
                TokenKind::Number(p) => ActionDistribution::new(p)
                    .ok_or(ParseError::ProbabilityOutOfRange { pos: tok.pos, value: p }),
                other => Err(ParseError::Syntax {
                    pos: tok.pos,
                    found: other.describe(),
                    expected: vec!["probability".into()],
                }),
            };
        }
        Ok(ActionDistribution::pure(action))
    }

    /// `nesting` counts enclosing condition constructs, bounding recursion.
    fn condition(&mut self, nesting: usize) -> Result<Condition, ParseError> {
        let start = self.peek().pos;
        let mut lhs = self.conjunction(nesting)?;
        while self.at_keyword("or") {
            self.bump();
            let rhs = self.conjunction(nesting)?;
            lhs = Condition::Or(Box::new(lhs), Box::new(rhs));
            check_depth(&lhs, start)?;
        }
        Ok(lhs)
    }

    fn conjunction(&mut self, nesting: usize) -> Result<Condition, ParseError> {
        let start = self.peek().pos;
        let mut lhs = self.unary(nesting)?;
        while self.at_keyword("and") {
            self.bump();
            let rhs = self.unary(nesting)?;
            lhs = Condition::And(Box::new(lhs), Box::new(rhs));
            check_depth(&lhs, start)?;
        }
        Ok(lhs)
    }

    fn unary(&mut self, nesting: usize) -> Result<Condition, ParseError> {
        let pos = self.peek().pos;
        if nesting > MAX_NESTING {
            return Err(ParseError::DepthExceeded { pos });
        }
        if self.at_keyword("not") {
            self.bump();
            let inner = self.unary(nesting + 1)?;
            let cond = Condition::Not(Box::new(inner));
            check_depth(&cond, pos)?;
            return Ok(cond);
        }
        if self.peek().kind == TokenKind::LParen {
            self.bump();
            let inner = self.condition(nesting + 1)?;
            self.expect(TokenKind::RParen)?;
            return Ok(inner);
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Condition, ParseError> {
        let pos = self.peek().pos;
        let lhs = self.operand()?;
        let op = match self.peek().kind {
            TokenKind::Cmp(sym) => match sym {
                "==" => CmpOp::Eq,
                "!=" => CmpOp::Ne,
                "<" => CmpOp::Lt,
                "<=" => CmpOp::Le,
                ">" => CmpOp::Gt,
                _ => CmpOp::Ge,
            },
            _ => return self.error(&["comparison operator"]),
        };
        self.bump();
        let rhs = self.operand()?;

        let (lt, rt) = (lhs.value_type(), rhs.value_type());
        if lt != rt {
            return Err(ParseError::TypeMismatch {
                pos,
                detail: format!("cannot compare `{lhs}` with `{rhs}`"),
            });
        }
        if lt == ValueType::Action && !op.is_equality() {
            return Err(ParseError::TypeMismatch {
                pos,
                detail: format!("actions only support `==` and `!=`, not `{}`", op.symbol()),
            });
        }
        Ok(Condition::Compare { lhs, op, rhs })
    }

    fn operand(&mut self) -> Result<Operand, ParseError> {
        let tok = self.peek().clone();
        let operand = match &tok.kind {
            TokenKind::Number(x) => Operand::Number(*x),
            TokenKind::Ident(s) if s == "C" => Operand::Action(Action::Cooperate),
            TokenKind::Ident(s) if s == "D" => Operand::Action(Action::Defect),
            TokenKind::Ident(s) if !KEYWORDS.contains(&s.as_str()) => match Feature::from_name(s) {
                Some(f) => Operand::Feature(f),
                None => {
                    return Err(ParseError::UnknownFeature {
                        pos: tok.pos,
                        name: s.clone(),
                    })
                }
            },
            _ => return self.error(&["feature", "number", "`C`", "`D`", "`(`", "`not`"]),
        };
        self.bump();
        Ok(operand)
    }
}

fn check_depth(cond: &Condition, pos: Position) -> Result<(), ParseError> {
    if cond.depth() > MAX_CONDITION_DEPTH {
        Err(ParseError::DepthExceeded { pos })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_cooperate() {
        let spec = parse_strategy("strategy allc cooperative { start C; default -> C }").unwrap();
        assert_eq!(spec.name, "allc");
        assert_eq!(spec.attitude, Attitude::Cooperative);
        assert_eq!(spec.opening, Action::Cooperate);
        assert!(spec.rules.is_empty());
        assert_eq!(spec.default_action.p_cooperate(), 1.0);
    }

    #[test]
    fn tit_for_tat() {
        let spec =
            parse_strategy("strategy tft neutral { start C; rule if opp_last == D -> D; default -> C }")
                .unwrap();
        assert_eq!(spec.rules.len(), 1);
        assert_eq!(
            spec.rules[0].condition,
            Condition::Compare {
                lhs: Operand::Feature(Feature::OppLast),
                op: CmpOp::Eq,
                rhs: Operand::Action(Action::Defect),
            }
        );
        assert_eq!(spec.rules[0].action, ActionDistribution::DEFECT);
    }

    #[test]
    fn missing_default() {
        let err = parse_strategy("strategy bad aggressive { start C }").unwrap_err();
        assert!(matches!(err, ParseError::MissingDefault { ref name, .. } if name == "bad"));
        let err = parse_strategy("strategy bad aggressive { start C; rule if round > 2 -> D; }")
            .unwrap_err();
        assert!(matches!(err, ParseError::MissingDefault { .. }));
    }

    #[test]
    fn syntax_error_reports_position_and_expectations() {
        let err = parse_strategy("strategy x neutral {\n  start C;\n  rule opp_last == D -> D;\n  default -> C }")
            .unwrap_err();
        match err {
            ParseError::Syntax { pos, expected, .. } => {
                assert_eq!(pos, Position { line: 3, column: 8 });
                assert_eq!(expected, vec!["`if`".to_string()]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_feature() {
        let err = parse_strategy("strategy x neutral { start C; rule if mood == C -> C; default -> D }")
            .unwrap_err();
        assert!(matches!(err, ParseError::UnknownFeature { ref name, .. } if name == "mood"));
    }

    #[test]
    fn probability_range() {
        let err = parse_strategy("strategy x neutral { start C; default -> C with 1.5 }").unwrap_err();
        assert!(matches!(err, ParseError::ProbabilityOutOfRange { value, .. } if value == 1.5));
        let err = parse_strategy("strategy x neutral { start C; default -> C with -0.1 }").unwrap_err();
        assert!(matches!(err, ParseError::ProbabilityOutOfRange { .. }));
        let ok = parse_strategy("strategy x neutral { start C; default -> C with 0.3 }").unwrap();
        assert_eq!(ok.default_action.p_cooperate(), 0.3);
    }

    #[test]
    fn type_errors() {
        for src in [
            "strategy x neutral { start C; rule if opp_last > C -> C; default -> D }",
            "strategy x neutral { start C; rule if opp_last == 1 -> C; default -> D }",
            "strategy x neutral { start C; rule if round == D -> C; default -> D }",
        ] {
            assert!(
                matches!(parse_strategy(src), Err(ParseError::TypeMismatch { .. })),
                "{src}"
            );
        }
    }

    #[test]
    fn precedence_and_parentheses() {
        let spec = parse_strategy(
            "strategy x neutral { start C; rule if round > 1 or round > 2 and not (opp_last == D or my_last == D) -> D; default -> C }",
        )
        .unwrap();
        match &spec.rules[0].condition {
            Condition::Or(_, rhs) => assert!(matches!(**rhs, Condition::And(..))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn depth_limit() {
        let mut cond = String::from("round > 1");
        for _ in 0..15 {
            cond = format!("not ({cond})");
        }
        let src = format!("strategy x neutral {{ start C; rule if {cond} -> D; default -> C }}");
        assert!(parse_strategy(&src).is_ok());
        let deeper = format!("strategy x neutral {{ start C; rule if not ({cond}) -> D; default -> C }}");
        assert!(matches!(parse_strategy(&deeper), Err(ParseError::DepthExceeded { .. })));

        // Pathological paren nesting must fail cleanly rather than overflow.
        let parens = format!(
            "strategy x neutral {{ start C; rule if {}round > 1{} -> D; default -> C }}",
            "(".repeat(5000),
            ")".repeat(5000)
        );
        assert!(matches!(parse_strategy(&parens), Err(ParseError::DepthExceeded { .. })));
    }

    #[test]
    fn trailing_content_is_rejected() {
        let err = parse_strategy("strategy a neutral { start C; default -> C } strategy").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
    }

    #[test]
    fn pretty_print_reparses() {
        let src = "strategy w neutral { start D; rule if (round > 3 or opp_coop_rate >= 0.5) and not my_last != opp_last -> C with 0.25; rule if consecutive_opp_defections >= 2 -> D; default -> C }";
        let spec = parse_strategy(src).unwrap();
        assert_eq!(parse_strategy(&spec.to_source()).unwrap(), spec);
    }
}
