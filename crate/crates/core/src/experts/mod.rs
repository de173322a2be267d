//! Expert solvers: the sources of demonstration trajectories and of
//! subgoal proposals.

mod dataset;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::env::{ActionId, Environment, Inflated, Trajectory};
use crate::npuzzle::{solve_ascending, NPuzzleEnv, Tiles};
use crate::rubik::{self, solve_beginner, BeginnerError, Cube, DistanceTable, RubikEnv};
use crate::sokoban::{solve_astar, AStarOutcome, SokobanEnv, SokobanState};

pub use dataset::{
    assemble_dataset, generate_records, load_manifest, manifest_sha256, read_dataset, DatasetError,
    DatasetManifest, ExpertSpec, ManifestEntry,
};

pub const SOKOBAN_NODE_CAP: usize = 200_000;

/// Something that knows how to act toward the goal.
pub trait Expert<E: Environment> {
    fn name(&self) -> &str;

    /// The first `max_len` actions of this expert's solution from `state`
    /// (fewer if it reaches the goal sooner). `None` when it has no plan.
    fn solve(&self, env: &E, state: &E::State, max_len: usize) -> Option<Vec<ActionId>>;
}

impl<E: Environment, X: Expert<E> + ?Sized> Expert<E> for Box<X> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn solve(&self, env: &E, state: &E::State, max_len: usize) -> Option<Vec<ActionId>> {
        (**self).solve(env, state, max_len)
    }
}

impl<E: Environment, X: Expert<E> + ?Sized> Expert<E> for std::rc::Rc<X> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn solve(&self, env: &E, state: &E::State, max_len: usize) -> Option<Vec<ActionId>> {
        (**self).solve(env, state, max_len)
    }
}

impl<E: Environment, X: Expert<E> + ?Sized> Expert<E> for Arc<X> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn solve(&self, env: &E, state: &E::State, max_len: usize) -> Option<Vec<ActionId>> {
        (**self).solve(env, state, max_len)
    }
}

fn truncate(mut v: Vec<ActionId>, max_len: usize) -> Vec<ActionId> {
    v.truncate(max_len);
    v
}

fn to_actions(moves: &[u8]) -> Vec<ActionId> {
    moves.iter().map(|&m| ActionId(m as u32)).collect()
}

/// Reverse of `depth` random quarter turns; loops are kept as scrambled.
pub fn rubik_random_expert(seed: u64, depth: usize) -> Trajectory<Cube> {
    let (start, moves) = rubik::scramble(seed, depth);
    Trajectory::from_actions(&RubikEnv, start, rubik::invert(&moves), "rubik-random")
        .expect("inverse scramble solves")
}

pub fn rubik_beginner_expert(state: &Cube) -> Result<Trajectory<Cube>, BeginnerError> {
    let sol = solve_beginner(state)?;
    Ok(
        Trajectory::from_actions(&RubikEnv, state.clone(), to_actions(&sol.moves), "rubik-beginner")
            .expect("beginner solutions replay"),
    )
}

pub fn npuzzle_ascending_expert(env: &NPuzzleEnv, state: &Tiles) -> Option<Trajectory<Tiles>> {
    let path = solve_ascending(state)?;
    Some(
        Trajectory::from_actions(env, state.clone(), path, "npuzzle-ascending")
            .expect("ascending solutions replay"),
    )
}

pub fn sokoban_search_expert(
    env: &SokobanEnv,
    state: &SokobanState,
    node_cap: usize,
) -> Option<Trajectory<SokobanState>> {
    match solve_astar(env, state, node_cap) {
        AStarOutcome::Solved(p) => Some(
            Trajectory::from_actions(env, state.clone(), p, "sokoban-astar")
                .expect("A* solutions replay"),
        ),
        AStarOutcome::Unsolved { .. } => None,
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BeginnerExpert;

impl Expert<RubikEnv> for BeginnerExpert {
    fn name(&self) -> &str {
        "rubik-beginner"
    }
    fn solve(&self, _: &RubikEnv, state: &Cube, max_len: usize) -> Option<Vec<ActionId>> {
        let sol = solve_beginner(state).ok()?;
        Some(truncate(to_actions(&sol.moves), max_len))
    }
}

/// Shortest solutions read off a distance table; no plan outside it.
#[derive(Debug, Clone)]
pub struct OracleDescent {
    table: Arc<DistanceTable>,
}

impl OracleDescent {
    pub fn new(table: Arc<DistanceTable>) -> Self {
        OracleDescent { table }
    }
}

impl Expert<RubikEnv> for OracleDescent {
    fn name(&self) -> &str {
        "rubik-oracle"
    }
    fn solve(&self, _: &RubikEnv, state: &Cube, max_len: usize) -> Option<Vec<ActionId>> {
        let moves = self.table.optimal_solution(state)?;
        Some(truncate(to_actions(&moves), max_len))
    }
}

/// Knows exactly one recorded scramble and undoes it from any state on it.
#[derive(Debug, Clone)]
pub struct ScrambleReversal {
    on_path: HashMap<Cube, usize>,
    moves: Vec<ActionId>,
}

impl ScrambleReversal {
    pub fn new(moves: &[ActionId]) -> Self {
        let mut on_path = HashMap::new();
        let mut c = Cube::solved();
        on_path.insert(c.clone(), 0);
        for (i, m) in moves.iter().enumerate() {
            c = c.turn(m.index());
            on_path.entry(c.clone()).or_insert(i + 1);
        }
        ScrambleReversal {
            on_path,
            moves: moves.to_vec(),
        }
    }
}

impl Expert<RubikEnv> for ScrambleReversal {
    fn name(&self) -> &str {
        "rubik-random"
    }
    fn solve(&self, _: &RubikEnv, state: &Cube, max_len: usize) -> Option<Vec<ActionId>> {
        let &j = self.on_path.get(state)?;
        Some(truncate(rubik::invert(&self.moves[..j]), max_len))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AscendingExpert;

impl Expert<NPuzzleEnv> for AscendingExpert {
    fn name(&self) -> &str {
        "npuzzle-ascending"
    }
    fn solve(&self, _: &NPuzzleEnv, state: &Tiles, max_len: usize) -> Option<Vec<ActionId>> {
        Some(truncate(solve_ascending(state)?, max_len))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SokobanAStarExpert {
    pub node_cap: usize,
}

impl Default for SokobanAStarExpert {
    fn default() -> Self {
        SokobanAStarExpert {
            node_cap: SOKOBAN_NODE_CAP,
        }
    }
}

impl Expert<SokobanEnv> for SokobanAStarExpert {
    fn name(&self) -> &str {
        "sokoban-astar"
    }
    fn solve(&self, env: &SokobanEnv, state: &SokobanState, max_len: usize) -> Option<Vec<ActionId>> {
        match solve_astar(env, state, self.node_cap) {
            AStarOutcome::Solved(p) => Some(truncate(p, max_len)),
            AStarOutcome::Unsolved { .. } => None,
        }
    }
}

/// Runs a base-environment expert inside an inflated action space. Its
/// actions are base indices, which are valid inflated indices.
#[derive(Debug, Clone)]
pub struct OnBase<X>(pub X);

impl<E: Environment, X: Expert<E>> Expert<Inflated<E>> for OnBase<X> {
    fn name(&self) -> &str {
        self.0.name()
    }
    fn solve(&self, env: &Inflated<E>, state: &E::State, max_len: usize) -> Option<Vec<ActionId>> {
        self.0.solve(env.base(), state, max_len)
    }
}

type Suffix = (Arc<Vec<ActionId>>, usize);

/// Caches full solutions and every suffix along them, so following the
/// expert from a state on a cached path continues the same solution.
pub struct Memo<E: Environment, X> {
    inner: X,
    cache: Mutex<HashMap<E::State, Suffix>>,
}

impl<E: Environment, X: Expert<E>> Memo<E, X> {
    pub fn new(inner: X) -> Self {
        Memo {
            inner,
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl<E: Environment, X: Expert<E>> Expert<E> for Memo<E, X> {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn solve(&self, env: &E, state: &E::State, max_len: usize) -> Option<Vec<ActionId>> {
        let hit = self.cache.lock().expect("memo lock").get(state).cloned();
        let (path, off) = match hit {
            Some(h) => h,
            None => {
                let full = Arc::new(self.inner.solve(env, state, usize::MAX)?);
                let mut cache = self.cache.lock().expect("memo lock");
                let mut s = state.clone();
                cache.entry(s.clone()).or_insert((full.clone(), 0));
                for (i, &a) in full.iter().enumerate() {
                    s = env.step(&s, a).ok()?;
                    cache.entry(s.clone()).or_insert((full.clone(), i + 1));
                }
                (full, 0)
            }
        };
        let end = (off + max_len.min(path.len())).min(path.len());
        Some(path[off..end].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_expert_lengths() {
        let t = rubik_random_expert(1, 1);
        assert_eq!(t.len(), 1);
        assert!(t.states[1].is_solved());
        assert_eq!(rubik_random_expert(2, 20).len(), 20);
    }

    #[test]
    fn beginner_on_solved_is_empty() {
        assert!(rubik_beginner_expert(&Cube::solved()).unwrap().is_empty());
    }

    #[test]
    fn scramble_reversal_knows_its_path_only() {
        let (c, moves) = rubik::scramble(8, 6);
        let x = ScrambleReversal::new(&moves);
        let p = x.solve(&RubikEnv, &c, usize::MAX).unwrap();
        assert!(RubikEnv.replay(&c, &p).unwrap().is_solved());
        assert_eq!(x.solve(&RubikEnv, &c, 2).unwrap().len(), 2);
        let off = rubik::scramble(9, 6).0;
        assert!(x.solve(&RubikEnv, &off, 3).is_none() || off == c);
    }

    #[test]
    fn memo_continues_the_same_solution() {
        let m: Memo<RubikEnv, _> = Memo::new(BeginnerExpert);
        let (c, _) = rubik::scramble(4, 20);
        let full = m.solve(&RubikEnv, &c, usize::MAX).unwrap();
        let head = m.solve(&RubikEnv, &c, 5).unwrap();
        let mid = RubikEnv.replay(&c, &head).unwrap();
        let tail = m.solve(&RubikEnv, &mid, usize::MAX).unwrap();
        assert_eq!([head, tail].concat(), full);
    }

    #[test]
    fn on_base_runs_in_inflated_space() {
        let env = Inflated::new(RubikEnv, 3);
        let (c, moves) = rubik::scramble(5, 4);
        let x = OnBase(ScrambleReversal::new(&moves));
        let p = x.solve(&env, &c, usize::MAX).unwrap();
        assert!(env.replay(&c, &p).unwrap().is_solved());
    }
}
