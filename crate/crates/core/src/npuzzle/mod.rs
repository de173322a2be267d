//! Sliding-tile puzzle on an `N×N` frame.
//!
//! Tiles are listed row-major with `0` for the blank. The goal lists
//! `1, 2, …, N²−1` followed by the blank. Action `d` moves the blank
//! up/right/down/left (`0..4`); the tile there slides into the old blank.

mod ascending;

use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::env::{ActionId, EnvKind, Environment, ParseError, StepError};

pub use ascending::solve_ascending;

pub const DEFAULT_SIDE: usize = 5;
pub const DEFAULT_SHUFFLE: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tiles(Vec<u8>);

impl Tiles {
    pub fn goal(side: usize) -> Self {
        let n = side * side;
        Tiles((1..n).map(|t| t as u8).chain(std::iter::once(0)).collect())
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn side(&self) -> usize {
        (self.0.len() as f64).sqrt().round() as usize
    }

    pub fn blank(&self) -> usize {
        self.0.iter().position(|&t| t == 0).expect("one blank")
    }

    /// Cell where tile `t` belongs.
    pub fn home(side: usize, t: u8) -> usize {
        if t == 0 {
            side * side - 1
        } else {
            t as usize - 1
        }
    }

    pub fn manhattan(&self) -> usize {
        let side = self.side();
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &t)| t != 0)
            .map(|(i, &t)| {
                let h = Tiles::home(side, t);
                (i / side).abs_diff(h / side) + (i % side).abs_diff(h % side)
            })
            .sum()
    }

    pub fn misplaced(&self) -> usize {
        let side = self.side();
        self.0
            .iter()
            .enumerate()
            .filter(|(i, &t)| t != 0 && Tiles::home(side, t) != *i)
            .count()
    }

    /// Parity test: the permutation of all cells (blank included) must have
    /// the parity of the blank's taxicab distance to its home cell.
    pub fn is_solvable(&self) -> bool {
        let side = self.side();
        let n = self.0.len();
        // perm[cell] = home cell of the piece at `cell`.
        let perm: Vec<usize> = self.0.iter().map(|&t| Tiles::home(side, t)).collect();
        let mut seen = vec![false; n];
        let mut transpositions = 0;
        for s in 0..n {
            let mut len = 0;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                i = perm[i];
                len += 1;
            }
            if len > 0 {
                transpositions += len - 1;
            }
        }
        let b = self.blank();
        let h = n - 1;
        let dist = (b / side).abs_diff(h / side) + (b % side).abs_diff(h % side);
        transpositions % 2 == dist % 2
    }

    pub fn slide(&self, d: usize) -> Option<Tiles> {
        let side = self.side();
        let b = self.blank();
        let (r, c) = (b / side, b % side);
        let to = match d {
            0 if r > 0 => b - side,
            1 if c + 1 < side => b + 1,
            2 if r + 1 < side => b + side,
            3 if c > 0 => b - 1,
            _ => return None,
        };
        let mut t = self.0.clone();
        t.swap(b, to);
        Some(Tiles(t))
    }

    pub fn from_tiles(tiles: Vec<u8>) -> Result<Tiles, ParseError> {
        let n = tiles.len();
        let side = (n as f64).sqrt().round() as usize;
        if side < 2 || side * side != n {
            return Err(ParseError::new(format!("{n} tiles do not form a square")));
        }
        let mut seen = vec![false; n];
        for &t in &tiles {
            if t as usize >= n || std::mem::replace(&mut seen[t as usize], true) {
                return Err(ParseError::new("tiles are not a permutation"));
            }
        }
        Ok(Tiles(tiles))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NPuzzleEnv {
    side: usize,
}

impl NPuzzleEnv {
    pub fn new(side: usize) -> Self {
        assert!(side >= 2, "side must be at least 2");
        NPuzzleEnv { side }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn goal(&self) -> Tiles {
        Tiles::goal(self.side)
    }
}

impl Default for NPuzzleEnv {
    fn default() -> Self {
        NPuzzleEnv::new(DEFAULT_SIDE)
    }
}

/// `n` uniformly chosen legal slides from the goal.
pub fn shuffle(seed: u64, side: usize, n: usize) -> Tiles {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tiles::goal(side);
    for _ in 0..n {
        let legal: Vec<Tiles> = (0..4).filter_map(|d| t.slide(d)).collect();
        t = legal[rng.random_range(0..legal.len())].clone();
    }
    t
}

impl Environment for NPuzzleEnv {
    type State = Tiles;

    fn kind(&self) -> EnvKind {
        EnvKind::Npuzzle
    }

    fn action_count(&self) -> usize {
        4
    }

    fn step(&self, state: &Tiles, action: ActionId) -> Result<Tiles, StepError> {
        self.check_action(action)?;
        state.slide(action.index()).ok_or(StepError::NoOp)
    }

    fn is_solved(&self, state: &Tiles) -> bool {
        *state == self.goal()
    }

    fn encode(&self, state: &Tiles) -> String {
        state
            .0
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    fn decode(&self, encoding: &str) -> Result<Tiles, ParseError> {
        let tiles = encoding
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<u8>()
                    .map_err(|_| ParseError::new(format!("bad tile `{x}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let t = Tiles::from_tiles(tiles)?;
        if t.side() != self.side {
            return Err(ParseError::new(format!(
                "expected a {0}x{0} puzzle",
                self.side
            )));
        }
        Ok(t)
    }

    fn mismatch(&self, a: &Tiles, b: &Tiles) -> usize {
        a.0.iter().zip(&b.0).filter(|(x, y)| x != y).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("exact distance table for side {side} is too large")]
pub struct NPuzzleTableTooLarge {
    pub side: usize,
}

/// Exact distances to the goal for every solvable state (3×3 and smaller).
#[derive(Debug, Clone)]
pub struct NPuzzleTable {
    side: usize,
    dist: HashMap<u64, u8>,
}

fn pack(t: &Tiles) -> u64 {
    t.0.iter().fold(0u64, |k, &x| (k << 4) | x as u64)
}

impl NPuzzleTable {
    pub fn build(side: usize) -> Result<Self, NPuzzleTableTooLarge> {
        if side > 3 {
            return Err(NPuzzleTableTooLarge { side });
        }
        let start = Tiles::goal(side);
        let mut dist = HashMap::from([(pack(&start), 0u8)]);
        let mut q = VecDeque::from([start]);
        while let Some(t) = q.pop_front() {
            let d = dist[&pack(&t)];
            for dir in 0..4 {
                if let Some(n) = t.slide(dir) {
                    let k = pack(&n);
                    if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(k) {
                        e.insert(d + 1);
                        q.push_back(n);
                    }
                }
            }
        }
        Ok(NPuzzleTable { side, dist })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn distance(&self, t: &Tiles) -> Option<u8> {
        self.dist.get(&pack(t)).copied()
    }
}
