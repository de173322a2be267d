//! Subgoal and low-level search benchmarks on Rubik's Cube, Sokoban and the
//! sliding-tile puzzle, with budget accounting over every visited state.

pub mod env;
pub mod experts;
pub mod guidance;
pub mod harness;
pub mod npuzzle;
pub mod rubik;
pub mod scalar;
pub mod search;
pub mod seed;
pub mod sokoban;
pub mod subgoal;

/// Scalar used by the concrete front ends.
pub type Real = f64;
pub type Value = Real;
pub type Probability = Real;
