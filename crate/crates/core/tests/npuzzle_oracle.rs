use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use subgoal_bench::env::{ActionId, Environment};
use subgoal_bench::harness::{compare_to_optimal, optimal_lengths, prepare, run_instance, ExperimentConfig};
use subgoal_bench::npuzzle::{shuffle, NPuzzleEnv, NPuzzleTable};

#[test]
fn long_walks_stay_in_the_solvable_half() {
    let env = NPuzzleEnv::new(3);
    let table = NPuzzleTable::build(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let mut t = env.goal();
        for _ in 0..100 {
            if let Ok(n) = env.step(&t, ActionId(rng.random_range(0..4))) {
                t = n;
            }
        }
        assert!(table.distance(&t).is_some(), "{}", env.encode(&t));
    }
}

#[test]
fn four_slide_shuffles_are_at_most_four_away() {
    let table = NPuzzleTable::build(3).unwrap();
    for seed in 0..200 {
        assert!(table.distance(&shuffle(seed, 3, 4)).unwrap() <= 4);
    }
}

#[test]
fn oracle_astar_has_zero_gap_on_eight_puzzle() {
    let cfg = ExperimentConfig::parse(
        "env = npuzzle\nside = 3\nshuffle_depth = 60\nalgorithm = astar\nvalue = oracle\n\
         child_mode = topk:4\nn_instances = 100\nbudget_cap = 100000\nworkers = 1",
    )
    .unwrap();
    let prep = prepare(&cfg).unwrap();
    let records: Vec<_> = (0..cfg.n_instances).map(|i| run_instance(&cfg, &prep, i).0).collect();
    assert!(records.iter().all(|r| r.solved()));
    let lookup = optimal_lengths(cfg.env, 0).unwrap();
    let gaps = compare_to_optimal(&records, &*lookup).unwrap();
    assert_eq!(gaps.len(), 1);
    let distinct: std::collections::HashSet<_> = records.iter().map(|r| r.root.as_str()).collect();
    assert_eq!(gaps[0].instances, distinct.len());
    assert_eq!(gaps[0].mean_gap, 0.0);
}
