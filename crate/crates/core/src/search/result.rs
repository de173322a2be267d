use serde::{Deserialize, Serialize};

use crate::env::{ActionId, BudgetLedger};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Solved,
    BudgetExhausted,
    FrontierEmpty,
    /// MCTS used all of its real moves without solving.
    StepLimit,
}

impl SearchStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchStatus::Solved => "solved",
            SearchStatus::BudgetExhausted => "budget_exhausted",
            SearchStatus::FrontierEmpty => "frontier_empty",
            SearchStatus::StepLimit => "step_limit",
        }
    }
}

/// Shape of the tree a search built.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TreeStats {
    pub size: usize,
    pub leaves: usize,
    /// Mean number of children over nodes that have any.
    pub branching: f64,
    pub solution_len: usize,
    pub subgoals_on_path: usize,
}

impl TreeStats {
    /// Stats of the tree given by `parents` (`None` marks the root).
    pub fn from_parents(
        parents: &[Option<usize>],
        solution_len: usize,
        subgoals_on_path: usize,
    ) -> Self {
        let mut children = vec![0usize; parents.len()];
        for p in parents.iter().flatten() {
            children[*p] += 1;
        }
        let internal = children.iter().filter(|&&c| c > 0).count();
        let edges: usize = children.iter().sum();
        TreeStats {
            size: parents.len(),
            leaves: children.iter().filter(|&&c| c == 0).count(),
            branching: if internal == 0 {
                0.0
            } else {
                edges as f64 / internal as f64
            },
            solution_len,
            subgoals_on_path,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub status: SearchStatus,
    pub solution: Vec<ActionId>,
    pub nodes_total: usize,
    pub nodes_high_level: usize,
    pub tree: TreeStats,
    /// Distance class of each subgoal on the solution path.
    #[serde(default)]
    pub subgoal_ks_used: Vec<usize>,
    /// Encodings of expanded states in expansion order, when traced.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expanded: Vec<String>,
}

impl SearchResult {
    pub(crate) fn new(status: SearchStatus, ledger: &BudgetLedger, tree: TreeStats) -> Self {
        SearchResult {
            status,
            solution: Vec::new(),
            nodes_total: ledger.total(),
            nodes_high_level: ledger.high_level(),
            tree,
            subgoal_ks_used: Vec::new(),
            expanded: Vec::new(),
        }
    }

    pub fn is_solved(&self) -> bool {
        self.status == SearchStatus::Solved
    }

    pub fn nodes_low_level(&self) -> usize {
        self.nodes_total - self.nodes_high_level
    }

    pub fn subgoals_on_path(&self) -> usize {
        self.tree.subgoals_on_path
    }
}
