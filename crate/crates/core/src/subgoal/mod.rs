//! Subgoal search over generators with different distances.
//!
//! The frontier holds one entry per (node, generator) and pops the largest
//! distance first, then the highest value, then the oldest entry. A popped
//! entry asks its generator for proposals; each unseen proposal is reached
//! with [`cllp_reach`], every state materialized on the way is charged as
//! low-level, and a reached subgoal is promoted to a high-level node.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use serde::{Deserialize, Serialize};

use crate::env::{ActionId, BudgetLedger, Environment, NodeKind};
use crate::guidance::{
    cllp_reach, Reach, SubgoalGenerator, ValueFn, DEFAULT_CLLP_MULTIPLIER,
};
use crate::scalar::{total_cmp, Scalar};
use crate::search::{SearchResult, SearchStatus, TreeStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgoalConfig {
    pub budget_cap: usize,
    /// Proposals kept from each generator call, in generator order.
    pub proposals_per_generator: usize,
    /// Reaching expansions per unit of `k` for proposals without a witness.
    pub cllp_multiplier: usize,
    pub trace: bool,
}

impl SubgoalConfig {
    pub fn new(budget_cap: usize) -> Self {
        SubgoalConfig {
            budget_cap,
            proposals_per_generator: 1,
            cllp_multiplier: DEFAULT_CLLP_MULTIPLIER,
            trace: false,
        }
    }
}

/// A node of the subgoal tree.
#[derive(Debug, Clone)]
pub struct HighLevelNode<T> {
    pub state: T,
    pub parent: Option<usize>,
    /// Actions from the parent's state to this state.
    pub segment: Vec<ActionId>,
    /// Distance class of the generator that proposed it (0 for the root).
    pub k: usize,
}

/// Concatenated segments from the root to `goal`.
pub fn extract_low_level_trajectory<T>(nodes: &[HighLevelNode<T>], goal: usize) -> Vec<ActionId> {
    let mut chain = Vec::new();
    let mut i = goal;
    while let Some(p) = nodes[i].parent {
        chain.push(i);
        i = p;
    }
    chain
        .iter()
        .rev()
        .flat_map(|&j| nodes[j].segment.iter().copied())
        .collect()
}

struct Entry<S> {
    k: usize,
    key: S,
    counter: u64,
    node: usize,
    generator: usize,
}

impl<S: Scalar> Ord for Entry<S> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.k
            .cmp(&o.k)
            .then(total_cmp(self.key, o.key))
            .then(o.counter.cmp(&self.counter))
    }
}

impl<S: Scalar> PartialOrd for Entry<S> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl<S: Scalar> PartialEq for Entry<S> {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl<S: Scalar> Eq for Entry<S> {}

/// Adaptive subgoal search over `generators`.
pub fn adasubs_solve<S, E, V>(
    env: &E,
    root: &E::State,
    generators: &[&dyn SubgoalGenerator<E>],
    value: &V,
    cfg: &SubgoalConfig,
) -> SearchResult
where
    S: Scalar,
    E: Environment,
    V: ValueFn<E, S> + ?Sized,
{
    let mut ledger = BudgetLedger::new(cfg.budget_cap);
    let mut nodes: Vec<HighLevelNode<E::State>> = Vec::new();
    let mut expanded = Vec::new();

    let finish = |status: SearchStatus,
                  ledger: &BudgetLedger,
                  nodes: &[HighLevelNode<E::State>],
                  goal: Option<usize>,
                  expanded: Vec<String>| {
        let parents: Vec<Option<usize>> = nodes.iter().map(|n| n.parent).collect();
        let (solution, ks) = match goal {
            Some(g) => {
                let mut ks = Vec::new();
                let mut i = g;
                while let Some(p) = nodes[i].parent {
                    ks.push(nodes[i].k);
                    i = p;
                }
                ks.reverse();
                (extract_low_level_trajectory(nodes, g), ks)
            }
            None => (Vec::new(), Vec::new()),
        };
        let mut r = SearchResult::new(
            status,
            ledger,
            TreeStats::from_parents(&parents, solution.len(), ks.len()),
        );
        r.solution = solution;
        r.subgoal_ks_used = ks;
        r.expanded = expanded;
        r
    };

    if ledger.charge(NodeKind::HighLevel).is_err() {
        return finish(SearchStatus::BudgetExhausted, &ledger, &nodes, None, expanded);
    }
    nodes.push(HighLevelNode {
        state: root.clone(),
        parent: None,
        segment: Vec::new(),
        k: 0,
    });
    if env.is_solved(root) {
        return finish(SearchStatus::Solved, &ledger, &nodes, Some(0), expanded);
    }

    let mut seen = HashSet::from([root.clone()]);
    let mut charged = HashSet::from([root.clone()]);
    let mut heap = BinaryHeap::new();
    let mut counter = 0u64;
    let mut push_all = |heap: &mut BinaryHeap<Entry<S>>, node: usize, key: S| {
        for (g, gen) in generators.iter().enumerate() {
            heap.push(Entry {
                k: gen.k(),
                key,
                counter,
                node,
                generator: g,
            });
            counter += 1;
        }
    };
    push_all(&mut heap, 0, value.value(env, root));

    while let Some(e) = heap.pop() {
        if cfg.trace {
            expanded.push(env.encode(&nodes[e.node].state));
        }
        let source = nodes[e.node].state.clone();
        let mut proposals = generators[e.generator].propose(env, &source);
        proposals.truncate(cfg.proposals_per_generator);
        for p in proposals {
            if seen.contains(&p.subgoal) {
                continue;
            }
            let mut visit = |s: &E::State| {
                if charged.contains(s) {
                    return Ok(());
                }
                ledger.charge_state(env, s, NodeKind::LowLevel)?;
                charged.insert(s.clone());
                Ok(())
            };
            let (segment, end) = match cllp_reach(env, &source, &p, cfg.cllp_multiplier, &mut visit) {
                Reach::BudgetExhausted => {
                    return finish(SearchStatus::BudgetExhausted, &ledger, &nodes, None, expanded)
                }
                Reach::Unreachable => continue,
                Reach::Reached(path) => (path, p.subgoal),
                Reach::SolvedOnTheWay(path) => {
                    let end = env.replay(&source, &path).expect("reaching path replays");
                    (path, end)
                }
            };
            if segment.is_empty() {
                continue;
            }
            ledger.promote();
            seen.insert(end.clone());
            let solved = env.is_solved(&end);
            let v = value.value(env, &end);
            nodes.push(HighLevelNode {
                state: end,
                parent: Some(e.node),
                segment,
                k: p.k,
            });
            let j = nodes.len() - 1;
            if solved {
                return finish(SearchStatus::Solved, &ledger, &nodes, Some(j), expanded);
            }
            push_all(&mut heap, j, v);
        }
    }
    finish(SearchStatus::FrontierEmpty, &ledger, &nodes, None, expanded)
}

/// Subgoal search with a single generator.
pub fn ksubs_solve<S, E, V>(
    env: &E,
    root: &E::State,
    generator: &dyn SubgoalGenerator<E>,
    value: &V,
    cfg: &SubgoalConfig,
) -> SearchResult
where
    S: Scalar,
    E: Environment,
    V: ValueFn<E, S> + ?Sized,
{
    adasubs_solve(env, root, &[generator], value, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experts::{BeginnerExpert, Expert, Memo, ScrambleReversal};
    use crate::guidance::{
        ChildSelect, ConstantValue, ExpertRollout, HeuristicValue, PolicyChildren, SoftmaxPolicy,
        SubgoalProposal,
    };
    use crate::rubik::{scramble, Cube, RubikEnv};
    use crate::search::{best_first_search, BestFsConfig};

    fn reversal(moves: &[ActionId], k: usize) -> ExpertRollout<RubikEnv> {
        ExpertRollout::new(vec![Box::new(ScrambleReversal::new(moves)) as Box<dyn Expert<RubikEnv>>], k)
    }

    #[test]
    fn solved_root() {
        let g = reversal(&[], 3);
        let r = ksubs_solve::<f64, _, _>(&RubikEnv, &Cube::solved(), &g, &HeuristicValue, &SubgoalConfig::new(10));
        assert_eq!((r.status, r.nodes_total, r.nodes_high_level), (SearchStatus::Solved, 1, 1));
        assert!(r.solution.is_empty());
    }

    #[test]
    fn distance_six_with_k_three_takes_two_subgoals() {
        let mut done = 0;
        for seed in 0..40 {
            let (c, moves) = scramble(seed, 6);
            let g = reversal(&moves, 3);
            let r = ksubs_solve::<f64, _, _>(&RubikEnv, &c, &g, &HeuristicValue, &SubgoalConfig::new(1000));
            assert!(r.is_solved());
            assert!(RubikEnv.replay(&c, &r.solution).unwrap().is_solved());
            assert_eq!(r.subgoals_on_path(), 2);
            assert_eq!(r.subgoal_ks_used, vec![3, 3]);
            // Witness verification charges every segment state once.
            assert_eq!(r.nodes_total, r.nodes_high_level + 2 * 2);
            done += 1;
            if done == 5 {
                break;
            }
        }
    }

    #[test]
    fn largest_k_is_popped_first() {
        let (c, moves) = scramble(9, 12);
        let g8 = reversal(&moves, 8);
        let g4 = reversal(&moves, 4);
        let r = adasubs_solve::<f64, _, _>(&RubikEnv, &c, &[&g8, &g4], &ConstantValue(0.0), &SubgoalConfig::new(1000));
        assert!(r.is_solved());
        assert_eq!(r.subgoal_ks_used[0], 8);
    }

    #[test]
    fn ksubs_is_adasubs_with_one_generator() {
        for seed in 0..20 {
            let (c, _) = scramble(seed, 10);
            let g = ExpertRollout::<RubikEnv>::new(vec![Box::new(BeginnerExpert)], 4);
            let cfg = SubgoalConfig { trace: true, ..SubgoalConfig::new(500) };
            let a = ksubs_solve::<f64, _, _>(&RubikEnv, &c, &g, &HeuristicValue, &cfg);
            let b = adasubs_solve::<f64, _, _>(&RubikEnv, &c, &[&g], &HeuristicValue, &cfg);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn ledger_decomposes() {
        let (c, _) = scramble(3, 14);
        // Replanning from mid-macro states can cycle; the memo keeps one plan.
        let g = ExpertRollout::<RubikEnv>::new(vec![Box::new(Memo::new(BeginnerExpert))], 4);
        let r = ksubs_solve::<f64, _, _>(&RubikEnv, &c, &g, &HeuristicValue, &SubgoalConfig::new(10_000));
        assert!(r.is_solved(), "{:?} {} {}", r.status, r.nodes_total, r.tree.size);
        assert_eq!(r.nodes_total, r.nodes_high_level + r.nodes_low_level());
        assert_eq!(r.nodes_high_level, r.tree.size);
    }

    #[test]
    fn k_one_children_match_best_first() {
        let p = SoftmaxPolicy::new(HeuristicValue, 1.0);
        let mode = ChildSelect::Confidence(0.6);
        for seed in 0..10 {
            let (c, _) = scramble(seed, 8);
            let g = PolicyChildren::new(p.clone(), mode);
            let cfg = SubgoalConfig {
                proposals_per_generator: usize::MAX,
                trace: true,
                ..SubgoalConfig::new(300)
            };
            let a = ksubs_solve::<f64, _, _>(&RubikEnv, &c, &g, &HeuristicValue, &cfg);
            let b = best_first_search::<f64, _, _, _>(
                &RubikEnv,
                &c,
                &HeuristicValue,
                &p,
                &BestFsConfig { child_mode: mode, budget_cap: 300, trace: true },
            );
            assert_eq!(a.expanded, b.expanded);
            assert_eq!(a.nodes_total, b.nodes_total);
            assert_eq!(a.status, b.status);
        }
    }

    #[test]
    fn trajectory_concatenates_segments() {
        let s = Cube::solved();
        let nodes = vec![
            HighLevelNode { state: s.clone(), parent: None, segment: vec![], k: 0 },
            HighLevelNode { state: s.clone(), parent: Some(0), segment: vec![ActionId(1); 3], k: 3 },
            HighLevelNode { state: s, parent: Some(1), segment: vec![ActionId(2); 2], k: 2 },
        ];
        assert_eq!(extract_low_level_trajectory(&nodes, 2).len(), 5);
        assert!(extract_low_level_trajectory(&nodes, 0).is_empty());
    }

    #[test]
    fn rejected_reaching_work_stays_charged() {
        struct Far;
        impl SubgoalGenerator<RubikEnv> for Far {
            fn k(&self) -> usize {
                2
            }
            fn propose(&self, _: &RubikEnv, s: &Cube) -> Vec<SubgoalProposal<Cube>> {
                vec![SubgoalProposal { subgoal: s.turn(0).turn(2).turn(4), k: 2, witness: None }]
            }
        }
        let (c, _) = scramble(1, 9);
        let r = ksubs_solve::<f64, _, _>(&RubikEnv, &c, &Far, &HeuristicValue, &SubgoalConfig::new(1000));
        assert_eq!(r.status, SearchStatus::FrontierEmpty);
        assert_eq!(r.nodes_high_level, 1);
        assert!(r.nodes_total > 1);
    }
}
