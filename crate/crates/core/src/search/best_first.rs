use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use serde::{Deserialize, Serialize};

use super::{select_children, ChildSelect, SearchResult, SearchStatus, TreeStats};
use crate::env::{ActionId, BudgetLedger, Environment, NodeKind};
use crate::guidance::{Policy, ValueFn};
use crate::scalar::{total_cmp, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestFsConfig {
    pub child_mode: ChildSelect,
    pub budget_cap: usize,
    /// Record the encoding of every expanded state.
    pub trace: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AStarConfig {
    /// Weight of the depth term.
    pub lambda: f64,
    pub child_mode: ChildSelect,
    pub budget_cap: usize,
    pub trace: bool,
}

/// Max-heap entry: higher key first, then earlier insertion.
struct Entry<S> {
    key: S,
    counter: u64,
    node: usize,
}

impl<S: Scalar> PartialEq for Entry<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S: Scalar> Eq for Entry<S> {}

impl<S: Scalar> PartialOrd for Entry<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for Entry<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        total_cmp(self.key, other.key).then(other.counter.cmp(&self.counter))
    }
}

struct Node<T> {
    state: T,
    parent: Option<usize>,
    action: ActionId,
    depth: usize,
}

fn path_to<T>(nodes: &[Node<T>], mut i: usize) -> Vec<ActionId> {
    let mut p = Vec::new();
    while let Some(parent) = nodes[i].parent {
        p.push(nodes[i].action);
        i = parent;
    }
    p.reverse();
    p
}

/// Shared loop: pops the highest key, generates the policy-selected
/// children not seen before, and stops as soon as a solved child appears.
#[allow(clippy::too_many_arguments)]
fn search<E, S, V, P, K>(
    env: &E,
    root: &E::State,
    value: &V,
    policy: &P,
    mode: ChildSelect,
    cap: usize,
    trace: bool,
    key: K,
) -> SearchResult
where
    E: Environment,
    S: Scalar,
    V: ValueFn<E, S> + ?Sized,
    P: Policy<E, S> + ?Sized,
    K: Fn(S, usize) -> S,
{
    let mut ledger = BudgetLedger::new(cap);
    let mut nodes: Vec<Node<E::State>> = Vec::new();
    let mut expanded = Vec::new();
    let finish = |status, ledger: &BudgetLedger, nodes: &[Node<E::State>], sol: Option<usize>, expanded| {
        let parents: Vec<Option<usize>> = nodes.iter().map(|n| n.parent).collect();
        let solution = sol.map(|i| path_to(nodes, i)).unwrap_or_default();
        let mut r = SearchResult::new(
            status,
            ledger,
            TreeStats::from_parents(&parents, solution.len(), 0),
        );
        r.solution = solution;
        r.expanded = expanded;
        r
    };
    if ledger.charge(NodeKind::HighLevel).is_err() {
        return finish(SearchStatus::BudgetExhausted, &ledger, &nodes, None, expanded);
    }
    nodes.push(Node {
        state: root.clone(),
        parent: None,
        action: ActionId(0),
        depth: 0,
    });
    if env.is_solved(root) {
        return finish(SearchStatus::Solved, &ledger, &nodes, Some(0), expanded);
    }
    let mut seen = HashSet::from([root.clone()]);
    let mut counter = 0u64;
    let mut heap = BinaryHeap::from([Entry {
        key: key(value.value(env, root), 0),
        counter,
        node: 0,
    }]);
    while let Some(Entry { node, .. }) = heap.pop() {
        if trace {
            expanded.push(env.encode(&nodes[node].state));
        }
        let probs = policy.probs(env, &nodes[node].state);
        for i in select_children(&probs, mode) {
            let a = ActionId::from(i);
            let Ok(child) = env.step(&nodes[node].state, a) else {
                continue;
            };
            if seen.contains(&child) {
                continue;
            }
            if ledger.charge(NodeKind::HighLevel).is_err() {
                return finish(SearchStatus::BudgetExhausted, &ledger, &nodes, None, expanded);
            }
            seen.insert(child.clone());
            let depth = nodes[node].depth + 1;
            let solved = env.is_solved(&child);
            let v = value.value(env, &child);
            nodes.push(Node {
                state: child,
                parent: Some(node),
                action: a,
                depth,
            });
            let j = nodes.len() - 1;
            if solved {
                return finish(SearchStatus::Solved, &ledger, &nodes, Some(j), expanded);
            }
            counter += 1;
            heap.push(Entry {
                key: key(v, depth),
                counter,
                node: j,
            });
        }
    }
    finish(SearchStatus::FrontierEmpty, &ledger, &nodes, None, expanded)
}

/// Expands the highest-valued frontier node first.
pub fn best_first_search<S, E, V, P>(
    env: &E,
    root: &E::State,
    value: &V,
    policy: &P,
    cfg: &BestFsConfig,
) -> SearchResult
where
    E: Environment,
    S: Scalar,
    V: ValueFn<E, S> + ?Sized,
    P: Policy<E, S> + ?Sized,
{
    search(env, root, value, policy, cfg.child_mode, cfg.budget_cap, cfg.trace, |v, _| v)
}

/// Expands the lowest `lambda * depth + h` first, with `h = max(0, -value)`.
pub fn astar_search<S, E, V, P>(
    env: &E,
    root: &E::State,
    value: &V,
    policy: &P,
    cfg: &AStarConfig,
) -> SearchResult
where
    E: Environment,
    S: Scalar,
    V: ValueFn<E, S> + ?Sized,
    P: Policy<E, S> + ?Sized,
{
    assert!(cfg.lambda >= 0.0, "A* depth weight must be non-negative");
    let lambda = S::lit(cfg.lambda);
    let warned = std::cell::Cell::new(false);
    let key = |v: S, depth: usize| {
        let mut h = -v;
        if h < S::zero() {
            if !warned.replace(true) {
                log::warn!("negative distance estimate {h} clamped to 0");
            }
            h = S::zero();
        }
        -(lambda * S::from_count(depth) + h)
    };
    search(env, root, value, policy, cfg.child_mode, cfg.budget_cap, cfg.trace, key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::Inflated;
    use crate::guidance::{ConstantValue, HeuristicValue, OracleValue, SoftmaxPolicy, UniformPolicy};
    use crate::npuzzle::{shuffle, NPuzzleEnv, NPuzzleTable};
    use crate::rubik::{scramble, Cube, DistanceTable, RubikEnv};

    fn cfg(mode: ChildSelect, cap: usize) -> BestFsConfig {
        BestFsConfig {
            child_mode: mode,
            budget_cap: cap,
            trace: true,
        }
    }

    #[test]
    fn solved_root_costs_one() {
        let r = best_first_search::<f64, _, _, _>(&RubikEnv, &Cube::solved(), &HeuristicValue, &UniformPolicy, &cfg(ChildSelect::TopK(3), 10));
        assert_eq!((r.status, r.nodes_total, r.solution.len()), (SearchStatus::Solved, 1, 0));
        let a = astar_search::<f64, _, _, _>(
            &RubikEnv,
            &Cube::solved(),
            &HeuristicValue,
            &UniformPolicy,
            &AStarConfig { lambda: 1.0, child_mode: ChildSelect::TopK(3), budget_cap: 10, trace: false },
        );
        assert_eq!(a.nodes_total, 1);
    }

    #[test]
    fn confidence_generates_exactly_the_prefix() {
        let policy = |_: &RubikEnv, _: &Cube| {
            let mut p = vec![0.0; 12];
            p[..4].copy_from_slice(&[0.5, 0.3, 0.15, 0.05]);
            p
        };
        let (c, _) = scramble(1, 9);
        let r = best_first_search::<f64, _, _, _>(&RubikEnv, &c, &ConstantValue(0.0), &policy, &cfg(ChildSelect::Confidence(0.7), 3));
        // Root plus the two children of the first expansion.
        assert_eq!(r.status, SearchStatus::BudgetExhausted);
        assert_eq!(r.tree.size, 3);
        assert_eq!(r.expanded.len(), 2);
    }

    #[test]
    fn oracle_descends_distance_three() {
        let table = DistanceTable::build(3).unwrap();
        let v = OracleValue::new(table);
        let p = SoftmaxPolicy::new(HeuristicValue, 1.0);
        for seed in 0..20 {
            let (c, _) = scramble(seed, 3);
            let d = DistanceTable::build(3).unwrap().distance(&c).unwrap();
            let r = best_first_search::<f64, _, _, _>(&RubikEnv, &c, &v, &p, &cfg(ChildSelect::Confidence(0.99), 10_000));
            assert!(r.is_solved());
            assert_eq!(r.solution.len(), d as usize);
            assert!(RubikEnv.replay(&c, &r.solution).unwrap().is_solved());
            assert_eq!(r.nodes_high_level, r.nodes_total);
        }
    }

    #[test]
    fn astar_lambda_zero_matches_best_first() {
        let p = SoftmaxPolicy::new(HeuristicValue, 2.0);
        for seed in 0..10 {
            let (c, _) = scramble(seed, 7);
            let b = best_first_search::<f64, _, _, _>(&RubikEnv, &c, &HeuristicValue, &p, &cfg(ChildSelect::TopK(4), 500));
            let a = astar_search::<f64, _, _, _>(
                &RubikEnv,
                &c,
                &HeuristicValue,
                &p,
                &AStarConfig { lambda: 0.0, child_mode: ChildSelect::TopK(4), budget_cap: 500, trace: true },
            );
            assert_eq!(a.expanded, b.expanded);
            assert_eq!(a.nodes_total, b.nodes_total);
        }
    }

    #[test]
    fn astar_is_optimal_on_eight_puzzle() {
        let env = NPuzzleEnv::new(3);
        let table = std::sync::Arc::new(NPuzzleTable::build(3).unwrap());
        let v = OracleValue::new(table.clone());
        for seed in 0..30 {
            let t = shuffle(seed, 3, 60);
            let r = astar_search::<f64, _, _, _>(
                &env,
                &t,
                &v,
                &UniformPolicy,
                &AStarConfig { lambda: 1.0, child_mode: ChildSelect::TopK(4), budget_cap: 100_000, trace: false },
            );
            assert_eq!(r.solution.len(), table.distance(&t).unwrap() as usize);
        }
    }

    #[test]
    fn inflation_with_topk_narrows_the_tree() {
        let env = Inflated::new(RubikEnv, 4);
        let p = SoftmaxPolicy::new(HeuristicValue, 1.0);
        let (c, _) = scramble(3, 6);
        let mode = ChildSelect::TopK(3);
        let base = best_first_search::<f64, _, _, _>(&RubikEnv, &c, &HeuristicValue, &p, &cfg(mode, 200));
        let wide = best_first_search::<f64, _, _, _>(&env, &c, &HeuristicValue, &p, &cfg(mode, 200));
        assert!(wide.tree.branching < base.tree.branching);
    }

    #[test]
    fn budget_is_never_exceeded() {
        let (c, _) = scramble(5, 15);
        for cap in [1, 2, 7, 50] {
            let r = best_first_search::<f64, _, _, _>(&RubikEnv, &c, &HeuristicValue, &UniformPolicy, &cfg(ChildSelect::TopK(12), cap));
            assert!(r.nodes_total <= cap);
            assert_eq!(r.status, SearchStatus::BudgetExhausted);
        }
    }
}
