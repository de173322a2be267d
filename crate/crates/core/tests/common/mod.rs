#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use subgoal_bench::env::Environment;
use subgoal_bench::sokoban::{SokobanEnv, SokobanState};

/// Two modes of a length histogram split at its widest empty stretch.
#[derive(Debug)]
pub struct Modes {
    pub low: usize,
    pub high: usize,
    pub low_mean: f64,
    /// Empty bins between the two modes.
    pub gap_bins: usize,
}

/// Splits `lengths` at the longest run of empty `width`-wide bins and
/// reports the most frequent bin on each side. `None` without such a run.
pub fn two_modes(lengths: &[usize], width: usize) -> Option<Modes> {
    let max = *lengths.iter().max()?;
    let mut hist = vec![0usize; max / width + 1];
    for &l in lengths {
        hist[l / width] += 1;
    }
    let (mut best, mut run_start, mut run) = ((0, 0), 0, 0);
    for (i, &h) in hist.iter().enumerate() {
        if h == 0 {
            if run == 0 {
                run_start = i;
            }
            run += 1;
            if run > best.1 {
                best = (run_start, run);
            }
        } else {
            run = 0;
        }
    }
    if best.1 == 0 {
        return None;
    }
    let split = best.0 * width;
    let mode = |lo: usize, hi: usize| {
        (lo..hi).max_by_key(|&b| (hist[b], std::cmp::Reverse(b))).map(|b| b * width + width / 2)
    };
    let low: Vec<usize> = lengths.iter().copied().filter(|&l| l < split).collect();
    Some(Modes {
        low: mode(0, best.0)?,
        high: mode(best.0 + best.1, hist.len())?,
        low_mean: low.iter().sum::<usize>() as f64 / low.len().max(1) as f64,
        gap_bins: best.1,
    })
}

pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Every placement of the board's boxes on floor cells, with every free
/// player cell.
pub fn all_states(env: &SokobanEnv, boxes: usize) -> Vec<SokobanState> {
    let l = env.layout();
    let floor: Vec<usize> = (0..l.cells()).filter(|&c| !l.is_wall(c)).collect();
    let mut placements: Vec<Vec<usize>> = Vec::new();
    match boxes {
        1 => placements.extend(floor.iter().map(|&a| vec![a])),
        2 => {
            for (i, &a) in floor.iter().enumerate() {
                for &b in &floor[i + 1..] {
                    placements.push(vec![a, b]);
                }
            }
        }
        n => panic!("{n} boxes"),
    }
    let mut out = Vec::new();
    for bx in placements {
        for &p in &floor {
            if !bx.contains(&p) {
                out.push(SokobanState::new(p, bx.clone()));
            }
        }
    }
    out
}

/// Liveness by backward breadth-first search from solved states over the
/// full move graph.
pub fn brute_force_live(env: &SokobanEnv, states: &[SokobanState]) -> Vec<bool> {
    let index: HashMap<&SokobanState, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); states.len()];
    for (i, s) in states.iter().enumerate() {
        for (_, t) in env.successors(s) {
            preds[index[&t]].push(i);
        }
    }
    let mut live = vec![false; states.len()];
    let mut queue = VecDeque::new();
    for (i, s) in states.iter().enumerate() {
        if env.is_solved(s) {
            live[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        for &p in &preds[i] {
            if !live[p] {
                live[p] = true;
                queue.push_back(p);
            }
        }
    }
    live
}

/// Takes the heaviest remaining action (lowest index on ties) until the
/// taken mass reaches `t`.
pub fn greedy_prefix(p: &[f64], t: f64) -> Vec<usize> {
    let mut left: Vec<usize> = (0..p.len()).filter(|&i| p[i] > 0.0).collect();
    let mut out = Vec::new();
    let mut mass = 0.0;
    while !left.is_empty() && (out.is_empty() || mass < t) {
        let mut best = 0;
        for j in 1..left.len() {
            if p[left[j]] > p[left[best]] {
                best = j;
            }
        }
        let i = left.remove(best);
        mass += p[i];
        out.push(i);
    }
    out
}
