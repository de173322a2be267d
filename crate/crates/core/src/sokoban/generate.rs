use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Layout, SokobanEnv, SokobanState};

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub side: usize,
    pub boxes: usize,
    /// Probability that an interior cell starts as a wall.
    pub wall_density: f64,
    /// Reverse-play steps applied from the solved placement.
    pub reverse_steps: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            side: 12,
            boxes: 4,
            wall_density: 0.15,
            reverse_steps: 400,
        }
    }
}

/// A solvable level: random walls, boxes placed on targets, then the board
/// is played backwards (walks and pulls) so the forward pushes undo it.
pub fn generate(seed: u64, cfg: &GeneratorConfig) -> (SokobanEnv, SokobanState) {
    assert!(cfg.side >= 4 && cfg.boxes >= 1, "board too small");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        if let Some(level) = attempt(&mut rng, cfg) {
            return level;
        }
    }
}

fn attempt(rng: &mut ChaCha8Rng, cfg: &GeneratorConfig) -> Option<(SokobanEnv, SokobanState)> {
    let side = cfg.side;
    let cells = side * side;
    let interior = |i: usize| {
        let (r, c) = (i / side, i % side);
        r > 0 && c > 0 && r < side - 1 && c < side - 1
    };
    let mut walls: Vec<bool> = (0..cells)
        .map(|i| !interior(i) || rng.random_bool(cfg.wall_density))
        .collect();

    // Keep the largest open component.
    let mut comp = vec![usize::MAX; cells];
    let mut best: Vec<usize> = Vec::new();
    for start in 0..cells {
        if walls[start] || comp[start] != usize::MAX {
            continue;
        }
        let mut members = vec![start];
        comp[start] = start;
        let mut k = 0;
        while k < members.len() {
            let c = members[k];
            k += 1;
            for n in [c - side, c + 1, c + side, c - 1] {
                if !walls[n] && comp[n] == usize::MAX {
                    comp[n] = start;
                    members.push(n);
                }
            }
        }
        if members.len() > best.len() {
            best = members;
        }
    }
    if best.len() < cfg.boxes + 4 {
        return None;
    }
    let keep: std::collections::HashSet<usize> = best.iter().copied().collect();
    for (i, w) in walls.iter_mut().enumerate() {
        if !keep.contains(&i) {
            *w = true;
        }
    }

    let mut floor = best.clone();
    floor.sort_unstable();
    floor.shuffle(rng);
    let targets_at: Vec<usize> = floor[..cfg.boxes].to_vec();
    let mut targets = vec![false; cells];
    for &t in &targets_at {
        targets[t] = true;
    }
    let layout = Layout::new(side, walls, targets);
    let env = SokobanEnv::new(layout);
    let l = env.layout();
    let mut player = floor[cfg.boxes];
    let mut boxes: Vec<usize> = targets_at;

    for _ in 0..cfg.reverse_steps {
        let d = rng.random_range(0..4);
        let to = l.neighbor(player, d);
        if l.is_wall(to) || boxes.contains(&to) {
            continue;
        }
        let behind = l.neighbor(player, (d + 2) % 4);
        // Pull the box behind the player most of the time.
        if let Some(i) = boxes.iter().position(|&b| b == behind) {
            if rng.random_bool(0.8) {
                boxes[i] = player;
            }
        }
        player = to;
    }
    let on_target = boxes.iter().filter(|&&b| l.is_target(b)).count();
    if on_target > 1 {
        return None;
    }
    let state = SokobanState::new(player, boxes);
    Some((env, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::Environment;

    #[test]
    fn deterministic_in_seed() {
        let cfg = GeneratorConfig::default();
        let (e1, s1) = generate(9, &cfg);
        let (e2, s2) = generate(9, &cfg);
        assert_eq!(e1.encode(&s1), e2.encode(&s2));
    }

    #[test]
    fn boards_are_valid_and_unsolved() {
        let cfg = GeneratorConfig::default();
        for seed in 0..30 {
            let (env, s) = generate(seed, &cfg);
            let enc = env.encode(&s);
            assert_eq!(enc.len(), 144);
            assert_eq!(env.decode(&enc).unwrap(), s);
            assert_eq!(s.boxes.len(), 4);
            assert!(!env.is_solved(&s));
        }
    }
}
