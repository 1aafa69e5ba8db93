//! Synthetic attitude sets built from fixed template families.
//!
//! Aggressive templates keep their nominal cooperation at or below 0.3,
//! cooperative templates at or above 0.8, and neutral templates are
//! reciprocal or conditional policies in between.

use rand::Rng;

use super::ast::StrategySpec;
use super::parser::parse_strategy;
use super::set::StrategySet;
use crate::seed::{label_of, stream, SimRng};
use crate::types::{Attitude, PromptLabel};

pub const SYNTH_MODEL_LABEL: &str = "synthetic";

fn prob(rng: &mut SimRng, lo_hundredths: u32, hi_hundredths: u32) -> String {
    let h = rng.random_range(lo_hundredths..=hi_hundredths);
    format!("{}", h as f64 / 100.0)
}

fn aggressive_body(rng: &mut SimRng) -> (&'static str, String) {
    match rng.random_range(0..5) {
        0 => ("alld", "start D;\n    default -> D;".into()),
        1 => (
            "randdefect",
            format!("start D;\n    default -> C with {};", prob(rng, 5, 30)),
        ),
        2 => (
            "opportunist",
            format!(
                "start D;\n    rule if opp_last == C and my_last == D -> C with {};\n    default -> D;",
                prob(rng, 10, 40)
            ),
        ),
        3 => {
            let k = rng.random_range(2..=6);
            (
                "prober",
                format!(
                    "start D;\n    rule if opp_defections == 0 and round > {k} -> D;\n    rule if consecutive_opp_defections >= 2 -> D;\n    default -> C with {};",
                    prob(rng, 20, 50)
                ),
            )
        }
        _ => (
            "extort",
            format!(
                "start D;\n    rule if opp_coop_rate < {} -> D;\n    default -> C with {};",
                prob(rng, 50, 90),
                prob(rng, 10, 35)
            ),
        ),
    }
}

fn cooperative_body(rng: &mut SimRng) -> (&'static str, String) {
    match rng.random_range(0..4) {
        0 => ("allc", "start C;\n    default -> C;".into()),
        1 => (
            "generous",
            format!(
                "start C;\n    rule if opp_last == D -> C with {};\n    default -> C;",
                prob(rng, 50, 90)
            ),
        ),
        2 => {
            let k = rng.random_range(3..=5);
            (
                "patient",
                format!(
                    "start C;\n    rule if consecutive_opp_defections >= {k} -> C with {};\n    default -> C;",
                    prob(rng, 45, 70)
                ),
            )
        }
        _ => (
            "randcoop",
            format!("start C;\n    default -> C with {};", prob(rng, 85, 99)),
        ),
    }
}

fn neutral_body(rng: &mut SimRng) -> (&'static str, String) {
    match rng.random_range(0..6) {
        0 => ("tft", "start C;\n    rule if opp_last == D -> D;\n    default -> C;".into()),
        1 => (
            "tf2t",
            "start C;\n    rule if consecutive_opp_defections >= 2 -> D;\n    default -> C;".into(),
        ),
        2 => ("wsls", "start C;\n    rule if my_last == opp_last -> C;\n    default -> D;".into()),
        3 => ("grim", "start C;\n    rule if opp_defections > 0 -> D;\n    default -> C;".into()),
        4 => (
            "ratematch",
            format!(
                "start C;\n    rule if opp_coop_rate >= {} -> C;\n    default -> D;",
                prob(rng, 40, 70)
            ),
        ),
        _ => ("stft", "start D;\n    rule if opp_last == C -> C;\n    default -> D;".into()),
    }
}

/// Emits `size` strategies for `attitude`, deterministically from `seed`.
pub fn synth_attitude_set(attitude: Attitude, seed: u64, size: usize) -> StrategySet {
    synth_labelled_set(attitude, seed, size, SYNTH_MODEL_LABEL, PromptLabel::Default)
}

pub fn synth_labelled_set(
    attitude: Attitude,
    seed: u64,
    size: usize,
    model_label: &str,
    prompt_label: PromptLabel,
) -> StrategySet {
    let mut rng = stream(seed, &[label_of(attitude.name())]);
    let strategies: Vec<StrategySpec> = (0..size)
        .map(|i| {
            let (template, body) = match attitude {
                Attitude::Aggressive => aggressive_body(&mut rng),
                Attitude::Cooperative => cooperative_body(&mut rng),
                Attitude::Neutral => neutral_body(&mut rng),
            };
            let source = format!(
                "strategy {}_{i:02}_{template} {attitude} {{\n    {body}\n}}\n",
                attitude.code().to_ascii_lowercase()
            );
            parse_strategy(&source).expect("synthetic templates are valid")
        })
        .collect();
    StrategySet::new(model_label, prompt_label, attitude, strategies, size)
        .expect("synthetic sets are well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_nominal(set: &StrategySet) -> f64 {
        set.strategies().iter().map(|s| s.nominal_cooperation()).sum::<f64>() / set.len() as f64
    }

    #[test]
    fn deterministic() {
        let a = synth_attitude_set(Attitude::Cooperative, 1, 25);
        let b = synth_attitude_set(Attitude::Cooperative, 1, 25);
        assert_eq!(a, b);
        assert_eq!(a.content_hash(), b.content_hash());
        assert_ne!(a, synth_attitude_set(Attitude::Cooperative, 2, 25));
    }

    #[test]
    fn sources_reparse() {
        for att in Attitude::ALL {
            let set = synth_attitude_set(att, 3, 25);
            assert_eq!(set.len(), 25);
            for s in set.strategies() {
                assert_eq!(parse_strategy(&s.to_source()).unwrap(), *s);
            }
        }
    }

    #[test]
    fn template_dispositions_are_ordered() {
        for seed in 0..50 {
            let sets = Attitude::ALL.map(|a| synth_attitude_set(a, seed, 25));
            for s in sets[0].strategies() {
                assert!(s.nominal_cooperation() <= 0.3, "{}", s.name);
            }
            for s in sets[1].strategies() {
                assert!(s.nominal_cooperation() >= 0.8, "{}", s.name);
            }
            let [a, c, n] = sets.each_ref().map(mean_nominal);
            assert!(a < n && n < c, "seed {seed}: {a} {n} {c}");
        }
    }
}
