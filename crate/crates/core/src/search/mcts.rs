use std::collections::HashSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{SearchResult, SearchStatus, TreeStats};
use crate::env::{ActionId, BudgetExhausted, BudgetLedger, Environment, NodeKind};
use crate::guidance::{Policy, ValueFn};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MctsConfig {
    pub n_simulations: usize,
    pub c_puct: f64,
    /// Visit-count temperature for picking real moves; 0 is argmax.
    pub temperature: f64,
    pub gamma: f64,
    pub max_episode_steps: usize,
    pub budget_cap: usize,
    pub seed: u64,
}

impl Default for MctsConfig {
    fn default() -> Self {
        MctsConfig {
            n_simulations: 50,
            c_puct: 1.0,
            temperature: 0.0,
            gamma: 1.0,
            max_episode_steps: 100,
            budget_cap: 10_000,
            seed: 0,
        }
    }
}

struct Node<T, S> {
    state: T,
    parent: Option<usize>,
    action: ActionId,
    prior: S,
    value: S,
    visits: u32,
    total: S,
    lo: S,
    hi: S,
    children: Vec<usize>,
    expanded: bool,
}

/// Search tree with PUCT selection and value-network leaf evaluation.
/// States are charged the first time any node holds them.
pub struct MctsTree<'a, S, E: Environment, V: ?Sized, P: ?Sized> {
    env: &'a E,
    value: &'a V,
    policy: &'a P,
    c_puct: S,
    gamma: S,
    nodes: Vec<Node<E::State, S>>,
    root: usize,
    ledger: BudgetLedger,
    charged: HashSet<E::State>,
}

impl<'a, S, E, V, P> MctsTree<'a, S, E, V, P>
where
    E: Environment,
    S: Scalar,
    V: ValueFn<E, S> + ?Sized,
    P: Policy<E, S> + ?Sized,
{
    /// Charges the root.
    pub fn new(
        env: &'a E,
        root: &E::State,
        value: &'a V,
        policy: &'a P,
        cfg: &MctsConfig,
    ) -> Result<Self, BudgetExhausted> {
        assert!(cfg.gamma > 0.0 && cfg.gamma <= 1.0, "discount must lie in (0, 1]");
        let mut ledger = BudgetLedger::new(cfg.budget_cap);
        ledger.charge(NodeKind::HighLevel)?;
        let v = value.value(env, root);
        Ok(MctsTree {
            env,
            value,
            policy,
            c_puct: S::lit(cfg.c_puct),
            gamma: S::lit(cfg.gamma),
            nodes: vec![Node {
                state: root.clone(),
                parent: None,
                action: ActionId(0),
                prior: S::one(),
                value: v,
                visits: 0,
                total: S::zero(),
                lo: S::infinity(),
                hi: S::neg_infinity(),
                children: Vec::new(),
                expanded: false,
            }],
            root: 0,
            ledger,
            charged: HashSet::from([root.clone()]),
        })
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn state(&self, node: usize) -> &E::State {
        &self.nodes[node].state
    }

    pub fn children(&self, node: usize) -> &[usize] {
        &self.nodes[node].children
    }

    pub fn visits(&self, node: usize) -> u32 {
        self.nodes[node].visits
    }

    pub fn action(&self, node: usize) -> ActionId {
        self.nodes[node].action
    }

    /// Mean backed-up value, or the node's own estimate before any visit.
    pub fn q(&self, node: usize) -> S {
        let n = &self.nodes[node];
        if n.visits == 0 {
            n.value
        } else {
            n.total / S::from_count(n.visits as usize)
        }
    }

    /// Smallest and largest value ever backed up through `node`.
    pub fn backed_range(&self, node: usize) -> (S, S) {
        (self.nodes[node].lo, self.nodes[node].hi)
    }

    pub fn ledger(&self) -> &BudgetLedger {
        &self.ledger
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Actions from the current root to `node`.
    pub fn path_from_root(&self, mut node: usize) -> Vec<ActionId> {
        let mut p = Vec::new();
        while node != self.root {
            p.push(self.nodes[node].action);
            node = self.nodes[node].parent.expect("node below root");
        }
        p.reverse();
        p
    }

    fn puct(&self, parent: usize, child: usize) -> S {
        let sqrt_n = S::from_count(self.nodes[parent].visits as usize).sqrt();
        let c = &self.nodes[child];
        self.q(child) + self.c_puct * c.prior * sqrt_n / (S::one() + S::from_count(c.visits as usize))
    }

    /// Creates and charges every child with positive prior. Returns the
    /// first solved child.
    fn expand(&mut self, node: usize) -> Result<Option<usize>, BudgetExhausted> {
        self.nodes[node].expanded = true;
        let probs = self.policy.probs(self.env, &self.nodes[node].state);
        for (i, &p) in probs.iter().enumerate() {
            if p <= S::zero() {
                continue;
            }
            let a = ActionId::from(i);
            let Ok(s) = self.env.step(&self.nodes[node].state, a) else {
                continue;
            };
            if !self.charged.contains(&s) {
                self.ledger.charge(NodeKind::HighLevel)?;
                self.charged.insert(s.clone());
            }
            let solved = self.env.is_solved(&s);
            let v = self.value.value(self.env, &s);
            let j = self.nodes.len();
            self.nodes.push(Node {
                state: s,
                parent: Some(node),
                action: a,
                prior: p,
                value: v,
                visits: 0,
                total: S::zero(),
                lo: S::infinity(),
                hi: S::neg_infinity(),
                children: Vec::new(),
                expanded: false,
            });
            self.nodes[node].children.push(j);
            if solved {
                return Ok(Some(j));
            }
        }
        Ok(None)
    }

    /// One select, expand, evaluate, back up pass. Returns a solved node
    /// if expansion produced one.
    pub fn simulate(&mut self) -> Result<Option<usize>, BudgetExhausted> {
        let mut node = self.root;
        while self.nodes[node].expanded && !self.nodes[node].children.is_empty() {
            let kids = &self.nodes[node].children;
            let mut best = kids[0];
            let mut best_score = self.puct(node, best);
            for &c in &kids[1..] {
                let sc = self.puct(node, c);
                if sc > best_score {
                    best = c;
                    best_score = sc;
                }
            }
            node = best;
        }
        if !self.nodes[node].expanded {
            if let Some(j) = self.expand(node)? {
                return Ok(Some(j));
            }
        }
        let mut v = self.nodes[node].value;
        let mut cur = Some(node);
        while let Some(i) = cur {
            let n = &mut self.nodes[i];
            n.visits += 1;
            n.total = n.total + v;
            n.lo = n.lo.min(v);
            n.hi = n.hi.max(v);
            if i == self.root {
                break;
            }
            v = -S::one() + self.gamma * v;
            cur = n.parent;
        }
        Ok(None)
    }

    /// Root child to play: visit counts raised to `1/temperature`, sampled;
    /// temperature 0 takes the most visited (first on ties).
    pub fn choose_move(&self, temperature: f64, rng: &mut ChaCha8Rng) -> Option<usize> {
        let kids = &self.nodes[self.root].children;
        let first_max = || {
            let mut best = *kids.first()?;
            for &c in kids {
                if self.nodes[c].visits > self.nodes[best].visits {
                    best = c;
                }
            }
            Some(best)
        };
        if temperature == 0.0 {
            return first_max();
        }
        let w: Vec<f64> = kids
            .iter()
            .map(|&c| (self.nodes[c].visits as f64).powf(1.0 / temperature))
            .collect();
        match WeightedIndex::new(&w) {
            Ok(d) => Some(kids[d.sample(rng)]),
            Err(_) => first_max(),
        }
    }

    /// Makes `child` of the root the new root, keeping its subtree.
    pub fn advance(&mut self, child: usize) {
        assert_eq!(self.nodes[child].parent, Some(self.root), "not a root child");
        self.root = child;
    }

    fn stats(&self, solution_len: usize) -> TreeStats {
        let parents: Vec<Option<usize>> = self.nodes.iter().map(|n| n.parent).collect();
        TreeStats::from_parents(&parents, solution_len, 0)
    }
}

/// Plays real moves from `root`, running `n_simulations` per move.
pub fn mcts_solve<S, E, V, P>(
    env: &E,
    root: &E::State,
    value: &V,
    policy: &P,
    cfg: &MctsConfig,
) -> SearchResult
where
    E: Environment,
    S: Scalar,
    V: ValueFn<E, S> + ?Sized,
    P: Policy<E, S> + ?Sized,
{
    assert!(cfg.n_simulations >= 1, "at least one simulation per move");
    let Ok(mut tree) = MctsTree::new(env, root, value, policy, cfg) else {
        return SearchResult::new(
            SearchStatus::BudgetExhausted,
            &BudgetLedger::new(cfg.budget_cap),
            TreeStats::default(),
        );
    };
    if env.is_solved(root) {
        return SearchResult::new(SearchStatus::Solved, tree.ledger(), tree.stats(0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut played = Vec::new();
    let finish = |tree: &MctsTree<S, E, V, P>, status, solution: Vec<ActionId>| {
        let mut r = SearchResult::new(status, tree.ledger(), tree.stats(solution.len()));
        r.solution = solution;
        r
    };
    for _ in 0..cfg.max_episode_steps {
        for _ in 0..cfg.n_simulations {
            match tree.simulate() {
                Ok(Some(j)) => {
                    let mut sol = played.clone();
                    sol.extend(tree.path_from_root(j));
                    return finish(&tree, SearchStatus::Solved, sol);
                }
                Ok(None) => {}
                Err(_) => return finish(&tree, SearchStatus::BudgetExhausted, Vec::new()),
            }
        }
        let Some(c) = tree.choose_move(cfg.temperature, &mut rng) else {
            return finish(&tree, SearchStatus::FrontierEmpty, Vec::new());
        };
        played.push(tree.action(c));
        tree.advance(c);
    }
    finish(&tree, SearchStatus::StepLimit, Vec::new())
}
