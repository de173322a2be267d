use crate::env::{Environment, Inflated};
use crate::npuzzle::NPuzzleEnv;
use crate::rubik::{stage_progress, Cube, RubikEnv, STAGES};
use crate::sokoban::{matching_distance, SokobanEnv, SokobanState};

/// Hand-made state descriptors for fitted guidance, plus a cheap distance
/// estimate used wherever nothing better is available.
pub trait Featurize: Environment {
    fn features(&self, state: &Self::State) -> Vec<i32>;

    /// Non-negative estimate of the remaining steps; 0 on solved states.
    fn heuristic(&self, state: &Self::State) -> f64;
}

fn face_counts(c: &Cube) -> [i32; 6] {
    let s = c.stickers();
    let mut out = [0; 6];
    for (f, n) in out.iter_mut().enumerate() {
        let center = s[f * 9 + 4];
        *n = s[f * 9..f * 9 + 9].iter().filter(|&&x| x == center).count() as i32;
    }
    out
}

impl Featurize for RubikEnv {
    /// Solved corners and edges, then solved pieces of each layer-by-layer
    /// stage in order, then a solved flag.
    fn features(&self, c: &Cube) -> Vec<i32> {
        let (corners, edges) = c.solved_pieces();
        let mut f = vec![corners as i32, edges as i32];
        f.extend(STAGES[..4].iter().map(|&s| stage_progress(c, s) as i32));
        f.push(c.is_solved() as i32);
        f
    }

    /// A quarter turn changes the face of at most 12 stickers.
    fn heuristic(&self, c: &Cube) -> f64 {
        let wrong: i32 = face_counts(c).iter().map(|n| 9 - n).sum();
        (wrong as f64 / 12.0).ceil()
    }
}

impl Featurize for NPuzzleEnv {
    fn features(&self, t: &Self::State) -> Vec<i32> {
        vec![t.manhattan() as i32, t.misplaced() as i32]
    }

    fn heuristic(&self, t: &Self::State) -> f64 {
        t.manhattan() as f64
    }
}

fn nearest_loose_box(env: &SokobanEnv, s: &SokobanState) -> usize {
    let l = env.layout();
    s.boxes
        .iter()
        .filter(|&&b| !l.is_target(b as usize))
        .map(|&b| l.manhattan(s.player as usize, b as usize))
        .min()
        .unwrap_or(0)
}

impl Featurize for SokobanEnv {
    fn features(&self, s: &SokobanState) -> Vec<i32> {
        vec![
            matching_distance(self.layout(), &s.boxes) as i32,
            nearest_loose_box(self, s) as i32,
        ]
    }

    fn heuristic(&self, s: &SokobanState) -> f64 {
        matching_distance(self.layout(), &s.boxes) as f64
    }
}

impl<E: Featurize> Featurize for Inflated<E> {
    fn features(&self, s: &Self::State) -> Vec<i32> {
        self.base().features(s)
    }

    fn heuristic(&self, s: &Self::State) -> f64 {
        self.base().heuristic(s)
    }
}

impl<E: Featurize + ?Sized> Featurize for &E {
    fn features(&self, s: &Self::State) -> Vec<i32> {
        (**self).features(s)
    }

    fn heuristic(&self, s: &Self::State) -> f64 {
        (**self).heuristic(s)
    }
}
