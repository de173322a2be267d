//! Environment abstraction shared by every puzzle.
//!
//! An environment exposes a fixed, enumerable action set, a deterministic
//! transition function and a goal predicate. States are typed per puzzle but
//! each has a canonical text encoding; two states are equal iff their
//! encodings are byte-equal, so seen-sets keyed on typed states and on
//! encodings agree.

mod inflate;
mod ledger;
mod trajectory;

use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use inflate::Inflated;
pub use ledger::{BudgetExhausted, BudgetLedger, NodeKind};
pub use trajectory::{read_jsonl, write_jsonl, Trajectory, TrajectoryError, TrajectoryRecord};

/// Index into an environment's action table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionId(pub u32);

impl ActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for ActionId {
    fn from(i: usize) -> Self {
        ActionId(i as u32)
    }
}

impl Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which puzzle an encoding belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvKind {
    Rubik,
    Sokoban,
    Npuzzle,
}

impl EnvKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EnvKind::Rubik => "rubik",
            EnvKind::Sokoban => "sokoban",
            EnvKind::Npuzzle => "npuzzle",
        }
    }
}

impl Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EnvKind {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rubik" => Ok(EnvKind::Rubik),
            "sokoban" => Ok(EnvKind::Sokoban),
            "npuzzle" => Ok(EnvKind::Npuzzle),
            other => Err(ParseError::new(format!("unknown environment `{other}`"))),
        }
    }
}

/// Canonical serialized configuration tagged with its environment.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnvState {
    pub env: EnvKind,
    pub encoding: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("action {index} out of range (action count {count})")]
    InvalidAction { index: u32, count: usize },
    /// The action is in range but has no effect in this state (push into a
    /// wall, slide off the border).
    #[error("action is not applicable in this state")]
    NoOp,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed state encoding: {0}")]
pub struct ParseError(pub String);

impl ParseError {
    pub fn new(msg: impl Into<String>) -> Self {
        ParseError(msg.into())
    }
}

/// A deterministic puzzle.
pub trait Environment: Send + Sync {
    type State: Clone + Eq + Hash + Debug + Send + Sync;

    fn kind(&self) -> EnvKind;

    fn action_count(&self) -> usize;

    /// Successor of `state` under `action`. Pure.
    fn step(&self, state: &Self::State, action: ActionId) -> Result<Self::State, StepError>;

    fn is_solved(&self, state: &Self::State) -> bool;

    fn encode(&self, state: &Self::State) -> String;

    fn decode(&self, encoding: &str) -> Result<Self::State, ParseError>;

    /// Goal-conditioned mismatch count used by low-level reaching searches.
    fn mismatch(&self, a: &Self::State, b: &Self::State) -> usize {
        let (ea, eb) = (self.encode(a), self.encode(b));
        let common = ea.bytes().zip(eb.bytes()).filter(|(x, y)| x != y).count();
        common + ea.len().abs_diff(eb.len())
    }

    fn env_state(&self, state: &Self::State) -> EnvState {
        EnvState {
            env: self.kind(),
            encoding: self.encode(state),
        }
    }

    fn check_action(&self, action: ActionId) -> Result<(), StepError> {
        if action.index() < self.action_count() {
            Ok(())
        } else {
            Err(StepError::InvalidAction {
                index: action.0,
                count: self.action_count(),
            })
        }
    }

    /// All applicable `(action, successor)` pairs in action order.
    fn successors(&self, state: &Self::State) -> Vec<(ActionId, Self::State)> {
        (0..self.action_count())
            .filter_map(|i| {
                let a = ActionId::from(i);
                self.step(state, a).ok().map(|s| (a, s))
            })
            .collect()
    }

    /// Folds `step` over `actions`; `None` if any step fails.
    fn replay(&self, start: &Self::State, actions: &[ActionId]) -> Option<Self::State> {
        actions
            .iter()
            .try_fold(start.clone(), |s, &a| self.step(&s, a).ok())
    }
}

impl<E: Environment + ?Sized> Environment for &E {
    type State = E::State;

    fn kind(&self) -> EnvKind {
        (**self).kind()
    }
    fn action_count(&self) -> usize {
        (**self).action_count()
    }
    fn step(&self, state: &Self::State, action: ActionId) -> Result<Self::State, StepError> {
        (**self).step(state, action)
    }
    fn is_solved(&self, state: &Self::State) -> bool {
        (**self).is_solved(state)
    }
    fn encode(&self, state: &Self::State) -> String {
        (**self).encode(state)
    }
    fn decode(&self, encoding: &str) -> Result<Self::State, ParseError> {
        (**self).decode(encoding)
    }
    fn mismatch(&self, a: &Self::State, b: &Self::State) -> usize {
        (**self).mismatch(a, b)
    }
}
