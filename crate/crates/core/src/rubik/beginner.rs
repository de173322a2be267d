//! Layer-by-layer solver built from fixed macro tables.
//!
//! Each stage places its pieces one at a time. For a piece, the solver
//! simulates a short list of candidate macro words (an optional extraction
//! macro, a U-layer setup, an insertion macro) and keeps the shortest word
//! that solves the piece without disturbing earlier stages. Macros are
//! written for the front slot and relabeled `F→R→B→L` for the other slots.

use thiserror::Error;

use super::geometry::{stickers, V3};
use super::{parse_moves, Cube};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Cross,
    FirstLayerCorners,
    MiddleEdges,
    LastLayerOrient,
    LastLayerPermute,
}

pub const STAGES: [Stage; 5] = [
    Stage::Cross,
    Stage::FirstLayerCorners,
    Stage::MiddleEdges,
    Stage::LastLayerOrient,
    Stage::LastLayerPermute,
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("beginner solver found no macro for stage {stage:?}")]
pub struct BeginnerError {
    pub stage: Stage,
}

const CROSS_INSERT: [&str; 2] = ["F2", "U' R' F R"];
const CROSS_EXTRACT: [&str; 2] = ["F2", "R U R'"];
const SEXY: &str = "R U R' U'";
const MIDDLE_RIGHT: &str = "U R U' R' U' F' U F";
const MIDDLE_LEFT: &str = "U' L' U L U F U' F'";
const ORIENT_EDGES: &str = "F R U R' U' F'";
const SUNE: &str = "R U R' U R U2 R'";
const A_PERM: &str = "R' F R' B2 R F' R' B2 R2";
const U_PERM: &str = "R U' R U R U R U' R' U' R2";

/// Quarter-turn words for `U^a`, `a = 0..4`.
const U_SETUPS: [&[u8]; 4] = [&[], &[0], &[0, 0], &[1]];

fn relabel(alg: &str, slot: usize) -> Vec<u8> {
    let cycle = ['F', 'R', 'B', 'L'];
    let mapped: String = alg
        .chars()
        .map(|ch| match cycle.iter().position(|&c| c == ch) {
            Some(i) => cycle[(i + slot) % 4],
            None => ch,
        })
        .collect();
    parse_moves(&mapped).expect("macro tables are well-formed")
}

fn all_slots(alg: &str) -> Vec<Vec<u8>> {
    (0..4).map(|s| relabel(alg, s)).collect()
}

/// Sticker indices of the piece at the front-slot position `pos`, rotated
/// `slot` quarter turns about the vertical axis (F→R→B→L).
fn piece(pos: V3, slot: usize) -> Vec<usize> {
    let mut p = pos;
    for _ in 0..slot {
        p = [p[2], p[1], -p[0]];
    }
    stickers()
        .iter()
        .enumerate()
        .filter(|(_, &(q, _))| q == p)
        .map(|(i, _)| i)
        .collect()
}

fn pieces_for(stage: Stage) -> Vec<Vec<usize>> {
    match stage {
        Stage::Cross => (0..4).map(|s| piece([0, -1, 1], s)).collect(),
        Stage::FirstLayerCorners => (0..4).map(|s| piece([1, -1, 1], s)).collect(),
        Stage::MiddleEdges => (0..4).map(|s| piece([1, 0, 1], s)).collect(),
        // Stickers of the top face only; positions are fixed by the last stage.
        Stage::LastLayerOrient => (0..9).map(|i| vec![i]).collect(),
        Stage::LastLayerPermute => vec![(0..54).collect()],
    }
}

fn sticker_set_solved(c: &Cube, idx: &[usize]) -> bool {
    let h = Cube::solved();
    idx.iter().all(|&i| c.stickers()[i] == h.stickers()[i])
}

/// True when every piece owned by `stage` is solved.
pub fn stage_solved(c: &Cube, stage: Stage) -> bool {
    pieces_for(stage).iter().all(|p| sticker_set_solved(c, p))
}

/// Number of solved pieces owned by `stage` (stickers for the last-layer
/// orientation stage).
pub fn stage_progress(c: &Cube, stage: Stage) -> usize {
    pieces_for(stage).iter().filter(|p| sticker_set_solved(c, p)).count()
}

/// True when `stage` and all earlier stages are solved.
pub fn stages_solved_through(c: &Cube, stage: Stage) -> bool {
    STAGES
        .iter()
        .take_while(|&&s| s != stage)
        .chain(std::iter::once(&stage))
        .all(|&s| stage_solved(c, s))
}

/// Shortest word `pre ++ U^a ++ insert` reaching `goal`, trying words
/// without extraction first.
fn place(
    c: &Cube,
    goal: &dyn Fn(&Cube) -> bool,
    inserts: &[Vec<u8>],
    extracts: &[Vec<u8>],
) -> Option<Vec<u8>> {
    if goal(c) {
        return Some(Vec::new());
    }
    let empty: Vec<u8> = Vec::new();
    for pres in [std::slice::from_ref(&empty), extracts] {
        let mut best: Option<Vec<u8>> = None;
        for pre in pres {
            let c1 = c.apply(pre);
            for setup in U_SETUPS {
                let c2 = c1.apply(setup);
                for ins in inserts {
                    let len = pre.len() + setup.len() + ins.len();
                    if best.as_ref().is_some_and(|b| b.len() <= len) {
                        continue;
                    }
                    if goal(&c2.apply(ins)) {
                        best = Some([pre.as_slice(), setup, ins].concat());
                    }
                }
            }
        }
        if best.is_some() {
            return best;
        }
    }
    None
}

/// Breadth-first over words of `letters` (up to `depth`) for the shortest
/// word that reaches `goal`.
fn word_search(
    c: &Cube,
    goal: &dyn Fn(&Cube) -> bool,
    letters: &[Vec<u8>],
    depth: usize,
) -> Option<Vec<u8>> {
    if goal(c) {
        return Some(Vec::new());
    }
    let mut layer = vec![(c.clone(), Vec::<u8>::new())];
    for _ in 0..depth {
        let mut next = Vec::new();
        let mut best: Option<Vec<u8>> = None;
        for (cube, word) in &layer {
            for l in letters {
                let n = cube.apply(l);
                let w = [word.as_slice(), l].concat();
                if goal(&n) {
                    if best.as_ref().is_none_or(|b| w.len() < b.len()) {
                        best = Some(w);
                    }
                } else {
                    next.push((n, w));
                }
            }
        }
        if best.is_some() {
            return best;
        }
        layer = next;
    }
    None
}

/// A beginner-method solution with the move index at which each stage ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeginnerSolution {
    pub moves: Vec<u8>,
    pub stage_ends: [usize; 5],
}

pub fn solve_beginner(start: &Cube) -> Result<BeginnerSolution, BeginnerError> {
    let mut cube = start.clone();
    let mut moves: Vec<u8> = Vec::new();
    let mut stage_ends = [0usize; 5];
    // Sticker groups of every piece placed so far.
    let mut fixed: Vec<Vec<usize>> = Vec::new();

    let slot_stages = [
        (
            Stage::Cross,
            CROSS_EXTRACT.iter().flat_map(|a| all_slots(a)).collect::<Vec<_>>(),
        ),
        (Stage::FirstLayerCorners, all_slots(SEXY)),
        (Stage::MiddleEdges, all_slots(MIDDLE_RIGHT)),
    ];
    for (si, (stage, extracts)) in slot_stages.iter().enumerate() {
        for (slot, target) in pieces_for(*stage).into_iter().enumerate() {
            let inserts: Vec<Vec<u8>> = match stage {
                Stage::Cross => CROSS_INSERT.iter().map(|a| relabel(a, slot)).collect(),
                Stage::FirstLayerCorners => {
                    let sexy = relabel(SEXY, slot);
                    (1..=5).map(|n| sexy.repeat(n)).collect()
                }
                _ => vec![relabel(MIDDLE_RIGHT, slot), relabel(MIDDLE_LEFT, slot + 1)],
            };
            let goal = |c: &Cube| {
                sticker_set_solved(c, &target) && fixed.iter().all(|p| sticker_set_solved(c, p))
            };
            let w = place(&cube, &goal, &inserts, extracts)
                .ok_or(BeginnerError { stage: *stage })?;
            cube = cube.apply(&w);
            moves.extend(w);
            fixed.push(target);
        }
        stage_ends[si] = moves.len();
    }

    let f2l: Vec<usize> = fixed.concat();
    let keeps_f2l = |c: &Cube| sticker_set_solved(c, &f2l);
    let with_setups = |alg: &str| -> Vec<Vec<u8>> {
        let m = parse_moves(alg).expect("macro tables are well-formed");
        U_SETUPS.iter().map(|u| [*u, m.as_slice()].concat()).collect()
    };

    // Top edges yellow, then top corners yellow.
    let edges_up = |c: &Cube| keeps_f2l(c) && [1, 3, 5, 7].iter().all(|&i| c.stickers()[i] == b'y');
    let w = word_search(&cube, &edges_up, &with_setups(ORIENT_EDGES), 3)
        .ok_or(BeginnerError { stage: Stage::LastLayerOrient })?;
    cube = cube.apply(&w);
    moves.extend(w);
    let top_up = |c: &Cube| keeps_f2l(c) && stage_solved(c, Stage::LastLayerOrient);
    let w = word_search(&cube, &top_up, &with_setups(SUNE), 4)
        .ok_or(BeginnerError { stage: Stage::LastLayerOrient })?;
    cube = cube.apply(&w);
    moves.extend(w);
    stage_ends[3] = moves.len();

    // Corners into place (A-perm with setups), then edges (U-perm).
    let corners: Vec<usize> = (0..4).flat_map(|s| piece([1, 1, 1], s)).collect();
    let corners_done = |c: &Cube| keeps_f2l(c) && sticker_set_solved(c, &corners);
    let mut letters: Vec<Vec<u8>> = Vec::new();
    for slot in 0..4 {
        let a = relabel(A_PERM, slot);
        letters.extend(U_SETUPS.iter().map(|u| [*u, a.as_slice()].concat()));
    }
    letters.extend(U_SETUPS[1..].iter().map(|u| u.to_vec()));
    let w = word_search(&cube, &corners_done, &letters, 3)
        .ok_or(BeginnerError { stage: Stage::LastLayerPermute })?;
    cube = cube.apply(&w);
    moves.extend(w);
    let w = word_search(&cube, &|c: &Cube| c.is_solved(), &all_slots(U_PERM), 3)
        .ok_or(BeginnerError { stage: Stage::LastLayerPermute })?;
    cube = cube.apply(&w);
    moves.extend(w);
    stage_ends[4] = moves.len();

    debug_assert!(cube.is_solved());
    Ok(BeginnerSolution { moves, stage_ends })
}
