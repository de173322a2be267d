//! Places tiles in ascending order: each of the top `N-2` rows left to
//! right (the last two tiles of a row together), then the bottom two rows
//! column by column (both tiles of a column together), then the final 2×2
//! block. Each placement is a shortest blank route over the unfixed cells
//! that tracks only the tiles being placed.

use std::collections::{HashMap, VecDeque};

use super::Tiles;
use crate::env::ActionId;

fn groups(side: usize) -> Vec<Vec<usize>> {
    let cell = |r: usize, c: usize| r * side + c;
    let mut out = Vec::new();
    for r in 0..side.saturating_sub(2) {
        for c in 0..side - 2 {
            out.push(vec![cell(r, c)]);
        }
        out.push(vec![cell(r, side - 2), cell(r, side - 1)]);
    }
    for c in 0..side.saturating_sub(2) {
        out.push(vec![cell(side - 2, c), cell(side - 1, c)]);
    }
    out.push(vec![
        cell(side - 2, side - 2),
        cell(side - 2, side - 1),
        cell(side - 1, side - 2),
    ]);
    out
}

/// Shortest blank route moving each tracked tile onto its target.
/// `key = [blank, tile positions…]`.
fn route(side: usize, fixed: &[bool], start: Vec<u8>, targets: &[u8]) -> Option<Vec<u8>> {
    let goal = |k: &[u8]| k[1..] == *targets;
    if goal(&start) {
        return Some(Vec::new());
    }
    let mut parent: HashMap<Vec<u8>, (Vec<u8>, u8)> = HashMap::new();
    let mut q = VecDeque::from([start.clone()]);
    parent.insert(start.clone(), (Vec::new(), 0));
    while let Some(k) = q.pop_front() {
        let b = k[0] as usize;
        let (r, c) = (b / side, b % side);
        for d in 0..4u8 {
            let to = match d {
                0 if r > 0 => b - side,
                1 if c + 1 < side => b + 1,
                2 if r + 1 < side => b + side,
                3 if c > 0 => b - 1,
                _ => continue,
            };
            if fixed[to] {
                continue;
            }
            let mut n = k.clone();
            n[0] = to as u8;
            for p in n[1..].iter_mut() {
                if *p as usize == to {
                    *p = b as u8;
                }
            }
            if parent.contains_key(&n) {
                continue;
            }
            parent.insert(n.clone(), (k.clone(), d));
            if goal(&n) {
                let mut path = Vec::new();
                let mut cur = n;
                while cur != start {
                    let (p, d) = parent[&cur].clone();
                    path.push(d);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            q.push_back(n);
        }
    }
    None
}

/// Blank moves solving `start`, or `None` for an unsolvable input.
pub fn solve_ascending(start: &Tiles) -> Option<Vec<ActionId>> {
    if !start.is_solvable() {
        return None;
    }
    let side = start.side();
    let mut cur = start.clone();
    let mut fixed = vec![false; side * side];
    let mut moves = Vec::new();
    for g in groups(side) {
        let tiles: Vec<u8> = g.iter().map(|&cell| Tiles::goal(side).as_slice()[cell]).collect();
        let pos = |t: &Tiles, tile: u8| t.as_slice().iter().position(|&x| x == tile).expect("tile") as u8;
        let mut key = vec![cur.blank() as u8];
        key.extend(tiles.iter().map(|&tile| pos(&cur, tile)));
        let targets: Vec<u8> = g.iter().map(|&c| c as u8).collect();
        let path = route(side, &fixed, key, &targets)?;
        for &d in &path {
            cur = cur.slide(d as usize).expect("route stays on the board");
            moves.push(ActionId(d as u32));
        }
        for &c in &g {
            fixed[c] = true;
        }
    }
    debug_assert_eq!(cur, Tiles::goal(side));
    Some(moves)
}

#[cfg(test)]
mod tests {
    use super::super::{shuffle, NPuzzleEnv, NPuzzleTable};
    use super::*;
    use crate::env::Environment;

    #[test]
    fn goal_gives_empty_path() {
        assert_eq!(solve_ascending(&Tiles::goal(5)), Some(vec![]));
    }

    #[test]
    fn groups_cover_every_tile_once() {
        for side in 2..=6 {
            let mut cells: Vec<usize> = groups(side).concat();
            cells.sort_unstable();
            assert_eq!(cells, (0..side * side - 1).collect::<Vec<_>>());
        }
    }

    #[test]
    fn solves_and_is_no_shorter_than_optimal_on_3x3() {
        let env = NPuzzleEnv::new(3);
        let table = NPuzzleTable::build(3).unwrap();
        for seed in 0..100 {
            let t = shuffle(seed, 3, 40);
            let path = solve_ascending(&t).unwrap();
            assert!(env.is_solved(&env.replay(&t, &path).unwrap()));
            assert!(path.len() >= table.distance(&t).unwrap() as usize);
        }
    }

    #[test]
    fn solves_five_by_five() {
        let env = NPuzzleEnv::new(5);
        for seed in 0..10 {
            let t = shuffle(seed, 5, 200);
            let path = solve_ascending(&t).unwrap();
            assert!(env.is_solved(&env.replay(&t, &path).unwrap()));
        }
    }

    #[test]
    fn rejects_unsolvable() {
        let t = Tiles::from_tiles(vec![2, 1, 3, 4, 5, 6, 7, 8, 0]).unwrap();
        assert_eq!(solve_ascending(&t), None);
    }
}
