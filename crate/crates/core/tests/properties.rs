mod common;

use proptest::prelude::*;

use subgoal_bench::env::{ActionId, BudgetLedger, Environment, Inflated, NodeKind, StepError};
use subgoal_bench::harness::{
    compare_budget_definitions, success_curve, BudgetMeasure, CsvSummary,
};
use subgoal_bench::npuzzle::{shuffle, NPuzzleEnv};
use subgoal_bench::rubik::{self, RubikEnv};
use subgoal_bench::search::{select_children, ChildSelect, SearchStatus};
use subgoal_bench::sokoban::{generate, DeadEndOracle, GeneratorConfig};

use common::greedy_prefix;

fn distribution() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 6 => 0.0..1.0f64, 1 => Just(0.25)], 1..14)
        .prop_filter("some mass", |w| w.iter().sum::<f64>() > 0.0)
        .prop_map(|w| {
            let z: f64 = w.iter().sum();
            w.into_iter().map(|x| x / z).collect()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn confidence_takes_the_shortest_heaviest_prefix(p in distribution(), t in 0.01..=1.0f64) {
        let got = select_children(&p, ChildSelect::Confidence(t));
        prop_assert_eq!(&got, &greedy_prefix(&p, t));
        let mass: f64 = got.iter().map(|&i| p[i]).sum();
        let positive = p.iter().filter(|&&x| x > 0.0).count();
        // Either the threshold is met or every positive action is taken.
        prop_assert!(mass >= t || got.len() == positive);
        // Dropping the lightest pick falls short, so no smaller set reaches t.
        let without_last = mass - p[*got.last().unwrap()];
        prop_assert!(without_last < t);
        for w in got.windows(2) {
            prop_assert!(p[w[0]] > p[w[1]] || (p[w[0]] == p[w[1]] && w[0] < w[1]));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rubik_steps_are_deterministic_and_invertible(seed in any::<u64>(), moves in prop::collection::vec(0u32..12, 0..30)) {
        let (start, _) = rubik::scramble(seed, 7);
        let acts: Vec<ActionId> = moves.iter().map(|&m| ActionId(m)).collect();
        let a = RubikEnv.replay(&start, &acts).unwrap();
        let b = RubikEnv.replay(&start, &acts).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(RubikEnv.replay(&a, &rubik::invert(&acts)).unwrap(), start);
    }

    #[test]
    fn npuzzle_steps_are_deterministic(seed in any::<u64>(), side in 3usize..6, moves in prop::collection::vec(0u32..4, 0..40)) {
        let env = NPuzzleEnv::new(side);
        let mut a = shuffle(seed, side, 30);
        let mut b = a.clone();
        for &m in &moves {
            let x = env.step(&a, ActionId(m));
            let y = env.step(&b, ActionId(m));
            prop_assert_eq!(&x, &y);
            if let (Ok(x), Ok(y)) = (x, y) {
                a = x;
                b = y;
            }
            prop_assert_eq!(env.decode(&env.encode(&a)).unwrap(), a.clone());
        }
    }

    #[test]
    fn inflated_copies_act_like_their_base_action(seed in any::<u64>(), factor in 1usize..25, a in 0u32..12) {
        let env = Inflated::new(RubikEnv, factor);
        let (c, _) = rubik::scramble(seed, 5);
        let copy = ActionId(a + 12 * (seed as u32 % factor as u32));
        prop_assert_eq!(env.step(&c, copy), RubikEnv.step(&c, ActionId(a)));
    }

    #[test]
    fn ledger_books_every_state_once(ops in prop::collection::vec(0u8..3, 0..200), cap in 1usize..150) {
        let mut l = BudgetLedger::new(cap);
        let mut accepted = 0;
        for op in ops {
            match op {
                0 => accepted += l.charge(NodeKind::HighLevel).is_ok() as usize,
                1 => accepted += l.charge(NodeKind::LowLevel).is_ok() as usize,
                _ => if l.low_level() > 0 { l.promote() },
            }
            prop_assert_eq!(l.total(), l.high_level() + l.low_level());
            prop_assert_eq!(l.total(), accepted);
            prop_assert!(l.total() <= cap);
        }
    }

    #[test]
    fn success_curves_never_decrease(
        rows in prop::collection::vec((0usize..3, any::<bool>(), 1usize..5000, 0usize..5000), 0..60),
        mut budgets in prop::collection::btree_set(1usize..6000, 1..20),
    ) {
        let rows: Vec<CsvSummary> = rows
            .into_iter()
            .map(|(a, solved, total, high)| CsvSummary {
                algorithm: format!("alg{a}"),
                status: if solved { SearchStatus::Solved } else { SearchStatus::BudgetExhausted },
                nodes_total: total,
                nodes_high_level: high.min(total),
            })
            .collect();
        let budgets: Vec<usize> = std::mem::take(&mut budgets).into_iter().collect();
        for m in [BudgetMeasure::Total, BudgetMeasure::HighLevel] {
            prop_assert!(success_curve("all", &rows, &budgets, m).is_monotone());
        }
        for c in compare_budget_definitions(&rows, &budgets) {
            prop_assert!(c.is_monotone());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dead_ends_stay_dead(seed in 0u64..1000, walk in prop::collection::vec(0u32..4, 1..80)) {
        let cfg = GeneratorConfig { side: 7, boxes: 2, wall_density: 0.15, reverse_steps: 80 };
        let (env, mut s) = generate(seed, &cfg);
        let mut oracle = DeadEndOracle::new(env.clone(), 200_000);
        for a in walk {
            if oracle.is_dead_end(&s).unwrap() {
                for (_, t) in env.successors(&s) {
                    prop_assert!(oracle.is_dead_end(&t).unwrap());
                }
            }
            match env.step(&s, ActionId(a)) {
                Ok(t) => s = t,
                Err(StepError::NoOp) => {}
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }
}
