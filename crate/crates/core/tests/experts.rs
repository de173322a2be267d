mod common;

use subgoal_bench::env::{ActionId, Environment};
use subgoal_bench::experts::{generate_records, sokoban_search_expert, ExpertSpec, SOKOBAN_NODE_CAP};
use subgoal_bench::guidance::{FittedValue, ValueFn};
use subgoal_bench::rubik::{scramble, solve_beginner, RubikEnv};
use subgoal_bench::seed::derive_seed;
use subgoal_bench::sokoban::{generate, GeneratorConfig};

use common::{two_modes, variance};

#[test]
fn beginner_solves_every_twenty_scramble() {
    for i in 0..500 {
        let (c, _) = scramble(derive_seed(2024, i), 20);
        let sol = solve_beginner(&c).unwrap_or_else(|e| panic!("scramble {i}: {e}"));
        let moves: Vec<ActionId> = sol.moves.iter().map(|&m| ActionId(m as u32)).collect();
        assert!(RubikEnv.replay(&c, &moves).unwrap().is_solved(), "scramble {i}");
    }
}

#[test]
fn mixed_dataset_lengths_have_two_far_modes() {
    let (mut recs, _) = generate_records(&ExpertSpec::RubikRandom { scramble_depth: 20 }, 300, 1).unwrap();
    recs.extend(generate_records(&ExpertSpec::RubikBeginner { scramble_depth: 20 }, 300, 2).unwrap().0);
    let lengths: Vec<usize> = recs.iter().map(|r| r.actions.len()).collect();
    let m = two_modes(&lengths, 5).expect("an empty stretch between the experts");
    assert_eq!(m.low_mean, 20.0);
    assert!(m.high - m.low >= 3 * m.low_mean as usize, "{m:?}");
}

/// Estimates on fresh scrambles from a value fitted on a dataset mix.
fn fresh_estimates(specs: &[(ExpertSpec, usize)]) -> Vec<f64> {
    let mut recs = Vec::new();
    for (i, (spec, n)) in specs.iter().enumerate() {
        recs.extend(generate_records(spec, *n, 40 + i as u64).unwrap().0);
    }
    let v = FittedValue::fit(&recs).unwrap();
    (0..100)
        .map(|i| {
            let (c, _) = scramble(derive_seed(777, i), 20);
            ValueFn::<RubikEnv, f64>::value(&v, &RubikEnv, &c)
        })
        .collect()
}

#[test]
fn mixing_in_beginner_runs_spreads_value_estimates() {
    let random_only = fresh_estimates(&[(ExpertSpec::RubikRandom { scramble_depth: 20 }, 1000)]);
    let mixed = fresh_estimates(&[
        (ExpertSpec::RubikRandom { scramble_depth: 20 }, 500),
        (ExpertSpec::RubikBeginner { scramble_depth: 20 }, 500),
    ]);
    let (a, b) = (variance(&random_only), variance(&mixed));
    assert!(b > a, "mixed variance {b} vs random-only {a}");
}

#[test]
fn generated_boards_mostly_solve_within_the_default_cap() {
    let cfg = GeneratorConfig::default();
    let n = 40;
    let solved = (0..n)
        .filter(|&seed| {
            let (env, s) = generate(seed, &cfg);
            match sokoban_search_expert(&env, &s, SOKOBAN_NODE_CAP) {
                Some(t) => env.is_solved(t.states.last().unwrap()),
                None => false,
            }
        })
        .count();
    assert!(solved * 100 >= 95 * n as usize, "{solved}/{n}");
}
