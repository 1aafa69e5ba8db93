//! Moran process checked against an exact absorbing Markov chain and against
//! neutral drift.

use evoipd_core::dsl::{parse_strategy, AttitudeSets, StrategySet};
use evoipd_core::moran::{run_condition_batch, CellSpec, Fixation, MoranConfig};
use evoipd_core::{Attitude, Composition, PayoffMatrix, PromptLabel, Regime};

fn pool(att: Attitude, body: &str, size: usize) -> StrategySet {
    let specs = (0..size)
        .map(|i| parse_strategy(&format!("strategy s{i} {att} {{ {body} }}")).unwrap())
        .collect();
    StrategySet::new("m", PromptLabel::Default, att, specs, size).unwrap()
}

const ALLD: &str = "start D; default -> D";
const ALLC: &str = "start C; default -> C";
const TFT: &str = "start C; rule if opp_last == D -> D; default -> C";

/// Probability that AllD takes over a population of `n` where C and N both play AllC.
///
/// States are `(a, c, n)`; with constant policies each pairing pays its
/// one-shot payoff every round, so fitness is exact.
#[allow(clippy::needless_range_loop)]
fn exact_alld_fixation(start: [u32; 3], pay: PayoffMatrix) -> f64 {
    let size: u32 = start.iter().sum();
    let states: Vec<[u32; 3]> = (0..=size)
        .flat_map(|a| (0..=size - a).map(move |c| [a, c, size - a - c]))
        .collect();
    let index = |s: [u32; 3]| states.iter().position(|&t| t == s).unwrap();
    let m = states.len();
    // Row k: (1 - P(s, s)) h(s) - sum_{t != s} P(s, t) h(t) = 0 for transient s;
    // h = 1 or 0 on monocultures.
    let mut mat = vec![vec![0.0f64; m + 1]; m];
    for (k, &s) in states.iter().enumerate() {
        if s.contains(&size) {
            mat[k][k] = 1.0;
            mat[k][m] = if s[0] == size { 1.0 } else { 0.0 };
            continue;
        }
        let others = (size - 1) as f64;
        let (a, cn) = (s[0] as f64, (s[1] + s[2]) as f64);
        let f_a = if s[0] > 0 { ((a - 1.0) * pay.p + cn * pay.t) / others } else { 0.0 };
        let f_c = if cn > 0.0 { (a * pay.s + (cn - 1.0) * pay.r) / others } else { 0.0 };
        let fit = [f_a, f_c, f_c];
        let total: f64 = (0..3).map(|i| s[i] as f64 * fit[i]).sum();
        for birth in 0..3 {
            for death in 0..3 {
                if birth == death || s[death] == 0 || s[birth] == 0 {
                    continue;
                }
                let p = s[birth] as f64 * fit[birth] / total * s[death] as f64 / size as f64;
                let mut t = s;
                t[birth] += 1;
                t[death] -= 1;
                mat[k][index(t)] -= p;
                mat[k][k] += p;
            }
        }
    }
    for col in 0..m {
        let pivot = (col..m).max_by(|&x, &y| mat[x][col].abs().total_cmp(&mat[y][col].abs())).unwrap();
        mat.swap(col, pivot);
        for row in 0..m {
            if row != col {
                let factor = mat[row][col] / mat[col][col];
                for j in col..=m {
                    mat[row][j] -= factor * mat[col][j];
                }
            }
        }
    }
    let k = index(start);
    mat[k][m] / mat[k][k]
}

#[test]
fn exact_chain_sanity() {
    let pay = PayoffMatrix::default();
    // With no AllC present AllD is already fixed.
    assert_eq!(exact_alld_fixation([4, 0, 0], pay), 1.0);
    assert_eq!(exact_alld_fixation([0, 2, 2], pay), 0.0);
    // C and N are interchangeable, so splitting them does not matter.
    let a = exact_alld_fixation([1, 3, 0], pay);
    let b = exact_alld_fixation([1, 2, 1], pay);
    assert!((a - b).abs() < 1e-12);
    // AllD dominates AllC: better than neutral 1/4.
    assert!(a > 0.25 && a < 1.0, "{a}");
}

#[test]
fn alld_allc_pools_match_exact_chain() {
    let sets = AttitudeSets::new(
        pool(Attitude::Aggressive, ALLD, 3),
        pool(Attitude::Cooperative, ALLC, 3),
        pool(Attitude::Neutral, ALLC, 3),
    )
    .unwrap();
    let iterations = 10_000;
    for comp in [Composition([1, 3, 0]), Composition([1, 2, 1])] {
        let regime = Regime { composition: comp, noise_rate: 0.0 };
        let config = MoranConfig {
            iterations,
            master_seed: 11,
            ..MoranConfig::for_regime(regime)
        };
        let cell = CellSpec { id: format!("chain-{comp}"), regime, config, sets: &sets };
        let result = run_condition_batch(&[cell], None).remove(0);
        assert!(result.diagnostics.is_empty(), "{:?}", result.diagnostics);
        assert!(result.outcomes.iter().all(|o| o.fixed_attitude != Fixation::Censored));

        let exact = exact_alld_fixation(comp.0, PayoffMatrix::default());
        let observed = result.distribution.p_a;
        let se = (exact * (1.0 - exact) / iterations as f64).sqrt();
        assert!(
            (observed - exact).abs() <= 3.0 * se,
            "{comp}: observed {observed}, exact {exact}, se {se}"
        );
    }
}

#[test]
fn identical_pools_drift_to_initial_shares() {
    let sets = AttitudeSets::new(
        pool(Attitude::Aggressive, TFT, 2),
        pool(Attitude::Cooperative, TFT, 2),
        pool(Attitude::Neutral, TFT, 2),
    )
    .unwrap();
    let iterations = 1500u32;
    let regime = Regime { composition: Composition([2, 1, 3]), noise_rate: 0.0 };
    let config = MoranConfig {
        iterations,
        fitness_rounds: 20,
        master_seed: 5,
        ..MoranConfig::for_regime(regime)
    };
    let result = run_condition_batch(&[CellSpec { id: "drift".into(), regime, config, sets: &sets }], None).remove(0);
    let dist = result.distribution;
    assert_eq!(dist.censored, 0.0);
    for att in Attitude::ALL {
        let prior = regime.composition.prior(att);
        let se = (prior * (1.0 - prior) / iterations as f64).sqrt();
        assert!((dist.p(att) - prior).abs() <= 3.0 * se, "{att}: {} vs {prior}", dist.p(att));
    }
}

#[test]
fn batch_is_thread_count_invariant() {
    let sets = AttitudeSets::new(
        pool(Attitude::Aggressive, ALLD, 3),
        pool(Attitude::Cooperative, TFT, 3),
        pool(Attitude::Neutral, "start C; default -> C with 0.5", 3),
    )
    .unwrap();
    let cells: Vec<CellSpec> = [0.0, 0.1]
        .into_iter()
        .map(|noise_rate| {
            let regime = Regime { composition: Composition([2, 2, 2]), noise_rate };
            let config = MoranConfig { iterations: 30, fitness_rounds: 20, ..MoranConfig::for_regime(regime) };
            CellSpec { id: regime.label(), regime, config, sets: &sets }
        })
        .collect();
    let one = run_condition_batch(&cells, Some(1));
    let eight = run_condition_batch(&cells, Some(8));
    for (a, b) in one.iter().zip(&eight) {
        assert_eq!(a.outcomes, b.outcomes);
        assert_eq!(a.distribution, b.distribution);
    }
}
