//! The pruned push-graph oracle against plain reachability over every
//! state of small boards.

mod common;

use subgoal_bench::env::Environment;
use subgoal_bench::sokoban::{generate, is_corner_dead, DeadEndOracle, GeneratorConfig, SokobanEnv};

use common::{all_states, brute_force_live};

const HAND_DRAWN: &[&str] = &[
    "#####\n#@$.#\n#####",
    "######\n#.  .#\n# $$ #\n#  @ #\n######",
    "#######\n#.    #\n# ### #\n# $ @ #\n#   $.#\n#######",
    "########\n#   #  #\n# $  . #\n## ##  #\n#. $ @ #\n#      #\n########",
    "######\n##. ##\n# $  #\n# #$.#\n#   @#\n######",
];

fn check_board(env: &SokobanEnv, boxes: usize) -> usize {
    let states = all_states(env, boxes);
    let live = brute_force_live(env, &states);
    let mut oracle = DeadEndOracle::new(env.clone(), 1_000_000);
    for (s, &alive) in states.iter().zip(&live) {
        let dead = oracle.is_dead_end(s).expect("small board fits the limit");
        assert_eq!(dead, !alive, "oracle disagrees on {}", env.encode(s));
        if is_corner_dead(env.layout(), s) {
            assert!(!alive, "corner rule marks a live state {}", env.encode(s));
        }
    }
    states.len()
}

#[test]
fn generated_boards_agree_on_every_state() {
    let mut checked = 0;
    for side in 5..=8 {
        for boxes in 1..=2 {
            for seed in 0..3 {
                let cfg = GeneratorConfig {
                    side,
                    boxes,
                    wall_density: 0.15,
                    reverse_steps: 60,
                };
                let (env, _) = generate(seed * 31 + side as u64, &cfg);
                checked += check_board(&env, boxes);
            }
        }
    }
    assert!(checked > 10_000, "only {checked} states");
}

#[test]
fn hand_drawn_boards_agree_on_every_state() {
    for level in HAND_DRAWN {
        let (env, start) = SokobanEnv::parse_level(level).unwrap();
        check_board(&env, start.boxes.len());
    }
}
