//! Low-level searches over single actions: best-first, A* and MCTS.
//!
//! Every search books each state it materializes in a [`BudgetLedger`]
//! exactly once, as a high-level node.
//!
//! [`BudgetLedger`]: crate::env::BudgetLedger

mod best_first;
mod mcts;
mod result;

pub use best_first::{astar_search, best_first_search, AStarConfig, BestFsConfig};
pub use mcts::{mcts_solve, MctsConfig, MctsTree};
pub use result::{SearchResult, SearchStatus, TreeStats};

pub use crate::guidance::{select_children, ChildSelect};
