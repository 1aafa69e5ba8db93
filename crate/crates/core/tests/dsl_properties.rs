use evoipd_core::dsl::{
    evaluate, parse_strategy, ActionDistribution, CmpOp, Condition, Feature, HistoryFeatures,
    Operand, Rule, StrategySpec, MAX_CONDITION_DEPTH,
};
use evoipd_core::seed::stream;
use evoipd_core::{Action, Attitude};
use proptest::prelude::*;

fn action() -> impl Strategy<Value = Action> {
    prop_oneof![Just(Action::Cooperate), Just(Action::Defect)]
}

fn attitude() -> impl Strategy<Value = Attitude> {
    prop_oneof![
        Just(Attitude::Aggressive),
        Just(Attitude::Cooperative),
        Just(Attitude::Neutral)
    ]
}

fn distribution() -> impl Strategy<Value = ActionDistribution> {
    prop_oneof![
        Just(ActionDistribution::COOPERATE),
        Just(ActionDistribution::DEFECT),
        (0.0f64..=1.0).prop_map(|p| ActionDistribution::new(p).unwrap()),
    ]
}

fn comparison() -> impl Strategy<Value = Condition> {
    let numeric = prop_oneof![
        Just(Feature::Round),
        Just(Feature::MyDefections),
        Just(Feature::OppDefections),
        Just(Feature::OppCoopRate),
        Just(Feature::ConsecutiveOppDefections),
    ];
    let number_cmp = (
        numeric,
        prop_oneof![
            Just(CmpOp::Eq),
            Just(CmpOp::Ne),
            Just(CmpOp::Lt),
            Just(CmpOp::Le),
            Just(CmpOp::Gt),
            Just(CmpOp::Ge)
        ],
        -50.0f64..1000.0,
        any::<bool>(),
    )
        .prop_map(|(f, op, x, flip)| {
            let (lhs, rhs) = (Operand::Feature(f), Operand::Number(x));
            if flip {
                Condition::Compare { lhs: rhs, op, rhs: lhs }
            } else {
                Condition::Compare { lhs, op, rhs }
            }
        });
    let action_cmp = (
        prop_oneof![Just(Feature::MyLast), Just(Feature::OppLast)],
        prop_oneof![Just(CmpOp::Eq), Just(CmpOp::Ne)],
        prop_oneof![
            action().prop_map(Operand::Action),
            Just(Operand::Feature(Feature::OppLast))
        ],
    )
        .prop_map(|(f, op, rhs)| Condition::Compare {
            lhs: Operand::Feature(f),
            op,
            rhs,
        });
    prop_oneof![number_cmp, action_cmp]
}

fn condition() -> impl Strategy<Value = Condition> {
    comparison()
        .prop_recursive(5, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|c| Condition::Not(Box::new(c))),
                (inner.clone(), inner.clone())
                    .prop_map(|(l, r)| Condition::And(Box::new(l), Box::new(r))),
                (inner.clone(), inner).prop_map(|(l, r)| Condition::Or(Box::new(l), Box::new(r))),
            ]
        })
        .prop_filter("depth limit", |c| c.depth() <= MAX_CONDITION_DEPTH)
}

fn spec() -> impl Strategy<Value = StrategySpec> {
    (
        "[a-z][a-z0-9_]{0,8}".prop_filter("not a keyword", |s| {
            !["strategy", "start", "rule", "if", "default", "with", "and", "or", "not"]
                .contains(&s.as_str())
        }),
        attitude(),
        action(),
        prop::collection::vec(
            (condition(), distribution()).prop_map(|(condition, action)| Rule { condition, action }),
            0..5,
        ),
        distribution(),
    )
        .prop_map(|(name, attitude, opening, rules, default_action)| StrategySpec {
            name,
            attitude,
            opening,
            rules,
            default_action,
        })
}

fn history() -> impl Strategy<Value = (Vec<Action>, Vec<Action>)> {
    (0usize..40).prop_flat_map(|n| (prop::collection::vec(action(), n), prop::collection::vec(action(), n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn pretty_print_round_trips(s in spec()) {
        let printed = s.to_source();
        let reparsed = parse_strategy(&printed).map_err(|e| TestCaseError::fail(format!("{e}\n{printed}")))?;
        prop_assert_eq!(&reparsed, &s);
        prop_assert_eq!(reparsed.to_source(), printed);
    }

    #[test]
    fn features_stay_consistent((mine, theirs) in history()) {
        let mut f = HistoryFeatures::initial();
        prop_assert!(f.is_consistent());
        for (m, t) in mine.iter().zip(&theirs) {
            f.advance(*m, *t);
            prop_assert!(f.is_consistent(), "{:?}", f);
        }
        prop_assert_eq!(f, HistoryFeatures::from_history(&mine, &theirs));
    }

    #[test]
    fn evaluation_is_pure(s in spec(), (mine, theirs) in history(), seed in any::<u64>()) {
        let f = HistoryFeatures::from_history(&mine, &theirs);
        let a = evaluate(&s, &f, &mut stream(seed, &[]));
        let b = evaluate(&s, &f, &mut stream(seed, &[]));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn disjoint_rules_commute(threshold in 2u32..30, p in 0.0f64..1.0, (mine, theirs) in history()) {
        // `round <= t` and `round > t` never hold together, so order cannot matter.
        let src = format!(
            "strategy d neutral {{ start C; rule if round <= {threshold} -> D; rule if round > {threshold} -> C with {p}; default -> C }}"
        );
        let spec = parse_strategy(&src).unwrap();
        let mut swapped = spec.clone();
        swapped.rules.swap(0, 1);
        let f = HistoryFeatures::from_history(&mine, &theirs);
        prop_assert_eq!(spec.decide(&f), swapped.decide(&f));
    }
}

#[test]
fn overlapping_rules_depend_on_order() {
    let spec = parse_strategy(
        "strategy o neutral { start C; rule if opp_defections >= 1 -> D; rule if opp_coop_rate < 0.9 -> C; default -> C }",
    )
    .unwrap();
    let mut swapped = spec.clone();
    swapped.rules.swap(0, 1);
    // Both conditions hold after one defection in two rounds.
    let witness = HistoryFeatures::from_history(&[Action::Cooperate; 2], &[Action::Cooperate, Action::Defect]);
    assert_eq!(spec.decide(&witness), ActionDistribution::DEFECT);
    assert_eq!(swapped.decide(&witness), ActionDistribution::COOPERATE);
}
