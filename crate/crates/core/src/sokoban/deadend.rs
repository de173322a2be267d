//! Dead-end detection.
//!
//! The exact oracle searches the push graph over `(player region, boxes)`.
//! The player's cell inside its reachable region does not affect which
//! pushes are possible, so a region is represented by its smallest cell.
//! Live states are usually found quickly by searching toward low matching
//! distance; a dead verdict needs the whole push closure, which is cut
//! down by never expanding states with a box on a dead square (a cell from
//! which no target can be reached even with every other box removed).

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use thiserror::Error;

use super::{matching_distance, Layout, SokobanEnv, SokobanState};
use crate::env::Environment;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictMethod {
    Exact,
    CornerHeuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeadEndVerdict {
    pub is_dead_end: bool,
    pub method: VerdictMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("dead-end search exceeded {max_states} push states")]
pub struct OracleLimit {
    pub max_states: usize,
}

/// A box on a non-target cell with walls on one vertical and one
/// horizontal side can never move again.
pub fn is_corner_dead(layout: &Layout, s: &SokobanState) -> bool {
    s.boxes.iter().any(|&b| {
        let b = b as usize;
        if layout.is_target(b) {
            return false;
        }
        let w = |d| layout.is_wall(layout.neighbor(b, d));
        (w(0) || w(2)) && (w(1) || w(3))
    })
}

type Key = (u16, Vec<u16>);

/// Exact dead-end oracle with a memo shared across queries of one level.
/// Not `Sync`; instantiate one per search run.
#[derive(Debug)]
pub struct DeadEndOracle {
    env: SokobanEnv,
    max_states: usize,
    memo: HashMap<Key, bool>,
    live_square: Vec<bool>,
}

/// Cells from which a lone box can be pushed onto some target: reverse
/// pulls from every target.
pub(crate) fn live_squares(l: &Layout) -> Vec<bool> {
    let mut live = vec![false; l.cells()];
    let mut stack: Vec<usize> = l.targets().collect();
    for &t in &stack {
        live[t] = true;
    }
    while let Some(c) = stack.pop() {
        for d in 0..4 {
            // Pull the box from `c` to `n`; the player stands beyond `n`.
            let n = l.neighbor(c, d);
            if l.is_wall(n) || live[n] {
                continue;
            }
            let p = l.neighbor(n, d);
            if !l.is_wall(p) {
                live[n] = true;
                stack.push(n);
            }
        }
    }
    live
}

impl DeadEndOracle {
    pub fn new(env: SokobanEnv, max_states: usize) -> Self {
        let live_square = live_squares(env.layout());
        DeadEndOracle {
            env,
            max_states,
            memo: HashMap::new(),
            live_square,
        }
    }

    /// Player region as a bitmap plus its smallest cell.
    fn region(&self, player: usize, boxes: &[u16]) -> (Vec<bool>, u16) {
        let l = self.env.layout();
        let mut seen = vec![false; l.cells()];
        let mut stack = vec![player];
        seen[player] = true;
        let mut min = player;
        while let Some(c) = stack.pop() {
            min = min.min(c);
            for d in 0..4 {
                let n = l.neighbor(c, d);
                if !seen[n] && !l.is_wall(n) && boxes.binary_search(&(n as u16)).is_err() {
                    seen[n] = true;
                    stack.push(n);
                }
            }
        }
        (seen, min as u16)
    }

    fn key(&self, s: &SokobanState) -> Key {
        (self.region(s.player as usize, &s.boxes).1, s.boxes.clone())
    }

    /// Push successors as `(player cell after push, boxes)`.
    fn pushes(&self, key: &Key) -> Vec<(usize, Vec<u16>)> {
        let l = self.env.layout();
        let (reach, _) = self.region(key.0 as usize, &key.1);
        let mut out = Vec::new();
        for (i, &b) in key.1.iter().enumerate() {
            let b = b as usize;
            for d in 0..4 {
                let from = l.neighbor(b, (d + 2) % 4);
                let to = l.neighbor(b, d);
                if reach[from] && !l.is_wall(to) && key.1.binary_search(&(to as u16)).is_err() {
                    let mut boxes = key.1.clone();
                    boxes[i] = to as u16;
                    boxes.sort_unstable();
                    out.push((b, boxes));
                }
            }
        }
        out
    }

    fn on_dead_square(&self, boxes: &[u16]) -> bool {
        boxes.iter().any(|&b| !self.live_square[b as usize])
    }

    pub fn is_dead_end(&mut self, s: &SokobanState) -> Result<bool, OracleLimit> {
        if self.env.is_solved(s) {
            return Ok(false);
        }
        if self.on_dead_square(&s.boxes) {
            return Ok(true);
        }
        let start = self.key(s);
        if let Some(&v) = self.memo.get(&start) {
            return Ok(v);
        }
        let l = self.env.layout();
        let solved = |boxes: &[u16]| boxes.iter().all(|&b| l.is_target(b as usize));
        let mut parent: HashMap<Key, Option<Key>> = HashMap::new();
        parent.insert(start.clone(), None);
        let mut keys = vec![start.clone()];
        let mut open = BinaryHeap::from([Reverse((matching_distance(l, &start.1), 0usize))]);
        let mut alive_at: Option<Key> = None;
        'search: while let Some(Reverse((_, id))) = open.pop() {
            let k = keys[id].clone();
            for (p, boxes) in self.pushes(&k) {
                if self.on_dead_square(&boxes) {
                    continue;
                }
                let nk = (self.region(p, &boxes).1, boxes);
                if parent.contains_key(&nk) {
                    continue;
                }
                let known = self.memo.get(&nk).copied();
                parent.insert(nk.clone(), Some(k.clone()));
                if known == Some(false) || solved(&nk.1) {
                    alive_at = Some(nk);
                    break 'search;
                }
                if known == Some(true) {
                    continue;
                }
                if parent.len() > self.max_states {
                    return Err(OracleLimit {
                        max_states: self.max_states,
                    });
                }
                open.push(Reverse((matching_distance(l, &nk.1), keys.len())));
                keys.push(nk);
            }
        }
        match alive_at {
            Some(mut k) => {
                // Every state on the path to a live state is live.
                while let Some(Some(prev)) = parent.get(&k) {
                    let prev = prev.clone();
                    self.memo.insert(k, false);
                    k = prev;
                }
                self.memo.insert(k, false);
                Ok(false)
            }
            None => {
                // Nothing reachable solves, so every explored state is dead.
                for k in parent.into_keys() {
                    self.memo.insert(k, true);
                }
                Ok(true)
            }
        }
    }

    /// Exact verdict, or the corner heuristic when the search is too large.
    pub fn verdict(&mut self, s: &SokobanState) -> DeadEndVerdict {
        match self.is_dead_end(s) {
            Ok(d) => DeadEndVerdict {
                is_dead_end: d,
                method: VerdictMethod::Exact,
            },
            Err(_) => DeadEndVerdict {
                is_dead_end: is_corner_dead(self.env.layout(), s),
                method: VerdictMethod::CornerHeuristic,
            },
        }
    }
}

/// Share of distinct visited states that are dead ends. Empty input gives 0.
pub fn dead_end_fraction<'a>(
    oracle: &mut DeadEndOracle,
    states: impl IntoIterator<Item = &'a SokobanState>,
) -> f64 {
    let mut seen = std::collections::HashSet::new();
    let mut dead = 0usize;
    for s in states {
        if seen.insert(s) && oracle.verdict(s).is_dead_end {
            dead += 1;
        }
    }
    if seen.is_empty() {
        0.0
    } else {
        dead as f64 / seen.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle(level: &str) -> (DeadEndOracle, SokobanState) {
        let (env, s) = SokobanEnv::parse_level(level).unwrap();
        (DeadEndOracle::new(env, 1_000_000), s)
    }

    #[test]
    fn corner_box_is_dead() {
        let (mut o, s) = oracle("#####\n#$  #\n#  @#\n#  .#\n#####");
        assert!(is_corner_dead(o.env.layout(), &s));
        assert!(o.is_dead_end(&s).unwrap());
    }

    #[test]
    fn solved_board_is_alive() {
        let (mut o, s) = oracle("#####\n#@* #\n#####");
        assert!(!o.is_dead_end(&s).unwrap());
    }

    #[test]
    fn box_against_wall_without_target_is_dead_but_not_a_corner() {
        // Box on the top wall line, target below it: it can slide sideways
        // but never leave the wall.
        let (mut o, s) = oracle("######\n#  $ #\n#    #\n# .@ #\n######");
        assert!(!is_corner_dead(o.env.layout(), &s));
        assert!(o.is_dead_end(&s).unwrap());
    }

    #[test]
    fn memo_agrees_with_fresh_oracle() {
        let lvl = "######\n#    #\n# $$ #\n#.@ .#\n######";
        let (mut o, s) = oracle(lvl);
        let env = o.env.clone();
        let states: Vec<SokobanState> = env.successors(&s).into_iter().map(|(_, t)| t).collect();
        let first: Vec<bool> = states.iter().map(|t| o.is_dead_end(t).unwrap()).collect();
        for (t, d) in states.iter().zip(first) {
            let (mut fresh, _) = oracle(lvl);
            assert_eq!(fresh.is_dead_end(t).unwrap(), d);
        }
    }

    #[test]
    fn limit_falls_back_to_corner_rule() {
        let (env, s) = SokobanEnv::parse_level("######\n#    #\n# $$ #\n#.@ .#\n######").unwrap();
        let mut o = DeadEndOracle::new(env, 1);
        assert!(o.is_dead_end(&s).is_err());
        assert_eq!(o.verdict(&s).method, VerdictMethod::CornerHeuristic);
    }

    #[test]
    fn fraction_counts_distinct_states() {
        let (env, s) = SokobanEnv::parse_level("#####\n#@$.#\n#####").unwrap();
        let mut o = DeadEndOracle::new(env.clone(), 1000);
        let t = env.push_step(&s, 1).unwrap();
        assert_eq!(dead_end_fraction(&mut o, [&s, &t, &s]), 0.0);
        assert_eq!(dead_end_fraction(&mut o, std::iter::empty()), 0.0);
    }
}
