use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use super::deadend::live_squares;
use super::{Layout, SokobanEnv, SokobanState};
use crate::env::ActionId;

/// Minimum over box-to-target assignments of the summed Manhattan
/// distances. Exhaustive for up to 7 boxes, greedy beyond.
pub fn matching_distance(layout: &Layout, boxes: &[u16]) -> usize {
    let targets: Vec<usize> = layout.targets().collect();
    let n = boxes.len();
    let cost = |i: usize, j: usize| layout.manhattan(boxes[i] as usize, targets[j]);
    if n <= 7 {
        // Assignment DP over subsets of targets.
        let mut dp = vec![usize::MAX; 1 << n];
        dp[0] = 0;
        for mask in 0..(1usize << n) {
            if dp[mask] == usize::MAX {
                continue;
            }
            let i = mask.count_ones() as usize;
            if i == n {
                continue;
            }
            for j in 0..n {
                if mask & (1 << j) == 0 {
                    let v = dp[mask] + cost(i, j);
                    let m = mask | (1 << j);
                    if v < dp[m] {
                        dp[m] = v;
                    }
                }
            }
        }
        dp[(1 << n) - 1]
    } else {
        let mut used = vec![false; n];
        (0..n)
            .map(|i| {
                let (j, c) = (0..n)
                    .filter(|&j| !used[j])
                    .map(|j| (j, cost(i, j)))
                    .min_by_key(|&(_, c)| c)
                    .expect("as many targets as boxes");
                used[j] = true;
                c
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AStarOutcome {
    Solved(Vec<ActionId>),
    /// Node cap reached or no solution exists.
    Unsolved { expanded: usize },
}

/// Move-level A* with the matching heuristic. Successors with a box on a
/// dead square are pruned. Equal `f` prefers deeper nodes, then insertion
/// order.
pub fn solve_astar(env: &SokobanEnv, start: &SokobanState, node_cap: usize) -> AStarOutcome {
    let l = env.layout();
    let solved = |s: &SokobanState| s.boxes.iter().all(|&b| l.is_target(b as usize));
    if solved(start) {
        return AStarOutcome::Solved(Vec::new());
    }
    let mut nodes: Vec<(SokobanState, usize, u8)> = vec![(start.clone(), usize::MAX, 0)];
    let mut best_g: HashMap<SokobanState, usize> = HashMap::from([(start.clone(), 0)]);
    let live = live_squares(l);
    let mut open = BinaryHeap::new();
    open.push(Reverse((matching_distance(l, &start.boxes), Reverse(0usize), 0usize)));
    let mut expanded = 0;
    while let Some(Reverse((_, Reverse(g), id))) = open.pop() {
        let s = nodes[id].0.clone();
        if best_g.get(&s).is_some_and(|&b| b < g) {
            continue;
        }
        expanded += 1;
        if expanded > node_cap {
            return AStarOutcome::Unsolved { expanded };
        }
        for d in 0..4 {
            let Ok(t) = env.push_step(&s, d) else {
                continue;
            };
            if t.boxes != s.boxes && t.boxes.iter().any(|&b| !live[b as usize]) {
                continue;
            }
            let ng = g + 1;
            if best_g.get(&t).is_some_and(|&b| b <= ng) {
                continue;
            }
            best_g.insert(t.clone(), ng);
            let tid = nodes.len();
            nodes.push((t.clone(), id, d as u8));
            if solved(&t) {
                let mut path = Vec::new();
                let mut k = tid;
                while nodes[k].1 != usize::MAX {
                    path.push(ActionId(nodes[k].2 as u32));
                    k = nodes[k].1;
                }
                path.reverse();
                return AStarOutcome::Solved(path);
            }
            open.push(Reverse((ng + matching_distance(l, &t.boxes), Reverse(ng), tid)));
        }
    }
    AStarOutcome::Unsolved { expanded }
}

#[cfg(test)]
mod tests {
    use super::super::{generate, GeneratorConfig};
    use super::*;
    use crate::env::Environment;

    #[test]
    fn one_push_board() {
        let (env, s) = SokobanEnv::parse_level("#####\n#@$.#\n#####").unwrap();
        assert_eq!(solve_astar(&env, &s, 100), AStarOutcome::Solved(vec![ActionId(1)]));
    }

    #[test]
    fn matching_prefers_cheaper_assignment() {
        let (env, s) = SokobanEnv::parse_level("#######\n#@$ $ #\n#  .. #\n#######").unwrap();
        // Boxes at columns 2 and 4, targets at 3 and 4 one row below.
        assert_eq!(matching_distance(env.layout(), &s.boxes), 2 + 1);
    }

    #[test]
    fn generated_boards_solve_and_replay() {
        let cfg = GeneratorConfig::default();
        for seed in 0..10 {
            let (env, s) = generate(seed, &cfg);
            if let AStarOutcome::Solved(p) = solve_astar(&env, &s, 200_000) {
                assert!(env.is_solved(&env.replay(&s, &p).unwrap()));
            }
        }
    }
}
