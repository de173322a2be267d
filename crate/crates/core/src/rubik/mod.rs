//! 3×3×3 cube in the quarter-turn metric.
//!
//! A state is 54 sticker colors, faces in the order U F R B L D, each face
//! row-major. Solved colors: U=y, F=b, R=r, B=g, L=o, D=w.
//!
//! ```text
//!              U (seen from above, B at the top)
//!              0  1  2
//!              3  4  5
//!              6  7  8
//!   L 36..44   F  9..17   R 18..26   B 27..35
//!   (each side face seen from outside, U at the top)
//!              D 45..53 (seen from below, F at the top)
//! ```
//!
//! Actions 0..12 are `U U' F F' R R' B B' L L' D D'`; the inverse of action
//! `m` is `m ^ 1`. Clockwise is as seen looking at the face.

mod beginner;
mod cubie;
mod geometry;
mod table;

use std::fmt;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::env::{ActionId, EnvKind, Environment, ParseError, StepError};

pub use beginner::{
    solve_beginner, stage_progress, stage_solved, stages_solved_through, BeginnerError, BeginnerSolution, Stage,
    STAGES,
};
pub use cubie::{check_reachable, CubieError};
pub use table::{DistanceTable, TableTooLarge, DEFAULT_MAX_ENTRIES};

pub const STICKERS: usize = 54;
pub const MOVE_COUNT: usize = 12;
pub const FACE_NAMES: [char; 6] = ['U', 'F', 'R', 'B', 'L', 'D'];
pub const FACE_COLORS: [u8; 6] = *b"ybrgow";
pub const MOVE_NAMES: [&str; MOVE_COUNT] =
    ["U", "U'", "F", "F'", "R", "R'", "B", "B'", "L", "L'", "D", "D'"];

const SOLVED: &str = "yyyyyyyyybbbbbbbbbrrrrrrrrrgggggggggooooooooowwwwwwwww";

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube([u8; STICKERS]);

impl Cube {
    pub fn solved() -> Self {
        let mut s = [0u8; STICKERS];
        s.copy_from_slice(SOLVED.as_bytes());
        Cube(s)
    }

    pub fn stickers(&self) -> &[u8; STICKERS] {
        &self.0
    }

    pub fn is_solved(&self) -> bool {
        self.0 == *SOLVED.as_bytes()
    }

    /// Corners and edges whose stickers all match the solved cube.
    pub fn solved_pieces(&self) -> (usize, usize) {
        let h = SOLVED.as_bytes();
        let ok = |idx: &[usize]| idx.iter().all(|&i| self.0[i] == h[i]);
        let sl = cubie::slots();
        (
            sl.corners.iter().filter(|c| ok(&c[..])).count(),
            sl.edges.iter().filter(|e| ok(&e[..])).count(),
        )
    }

    /// Applies move `m` (0..12).
    pub fn turn(&self, m: usize) -> Cube {
        let perm = &move_tables()[m];
        let mut out = [0u8; STICKERS];
        for (dst, &src) in out.iter_mut().zip(perm.iter()) {
            *dst = self.0[src as usize];
        }
        Cube(out)
    }

    pub fn apply(&self, moves: &[u8]) -> Cube {
        moves.iter().fold(self.clone(), |c, &m| c.turn(m as usize))
    }

    /// Parses the encoding without the reachability check.
    pub fn from_stickers(s: &str) -> Result<Cube, ParseError> {
        let b = s.as_bytes();
        if b.len() != STICKERS {
            return Err(ParseError::new(format!(
                "cube encoding has {} characters, expected 54",
                b.len()
            )));
        }
        let mut counts = [0usize; 6];
        for &c in b {
            match color_index(c) {
                Some(i) => counts[i] += 1,
                None => {
                    return Err(ParseError::new(format!(
                        "invalid sticker color `{}`",
                        c as char
                    )))
                }
            }
        }
        if counts.iter().any(|&n| n != 9) {
            return Err(ParseError::new("each color must appear exactly 9 times"));
        }
        let mut s2 = [0u8; STICKERS];
        s2.copy_from_slice(b);
        Ok(Cube(s2))
    }
}

impl fmt::Debug for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cube({})", self)
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(std::str::from_utf8(&self.0).expect("ascii stickers"))
    }
}

pub(crate) fn color_index(c: u8) -> Option<usize> {
    FACE_COLORS.iter().position(|&x| x == c)
}

pub fn inverse_move(m: usize) -> usize {
    m ^ 1
}

/// Inverse of a move sequence.
pub fn invert(moves: &[ActionId]) -> Vec<ActionId> {
    moves
        .iter()
        .rev()
        .map(|a| ActionId::from(inverse_move(a.index())))
        .collect()
}

/// Sticker permutation per move: `after[i] = before[table[m][i]]`.
pub(crate) fn move_tables() -> &'static [[u8; STICKERS]; MOVE_COUNT] {
    static TABLES: OnceLock<[[u8; STICKERS]; MOVE_COUNT]> = OnceLock::new();
    TABLES.get_or_init(geometry::build_move_tables)
}

/// State after `n` uniform i.i.d. quarter turns from solved, with the moves.
/// Immediate cancellations (`U` then `U'`) are allowed.
pub fn scramble(seed: u64, n: usize) -> (Cube, Vec<ActionId>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let moves: Vec<ActionId> = (0..n)
        .map(|_| ActionId::from(rng.random_range(0..MOVE_COUNT)))
        .collect();
    let mut c = Cube::solved();
    for m in &moves {
        c = c.turn(m.index());
    }
    (c, moves)
}

/// Parses move notation (`R U2 R' F`) into quarter-turn indices. Half
/// turns expand to two quarter turns.
pub fn parse_moves(alg: &str) -> Result<Vec<u8>, ParseError> {
    let mut out = Vec::new();
    for tok in alg.split_whitespace() {
        let mut chars = tok.chars();
        let face = chars.next().expect("non-empty token");
        let f = FACE_NAMES
            .iter()
            .position(|&x| x == face)
            .ok_or_else(|| ParseError::new(format!("unknown face in `{tok}`")))?
            as u8;
        match chars.as_str() {
            "" => out.push(2 * f),
            "'" => out.push(2 * f + 1),
            "2" | "2'" => out.extend([2 * f, 2 * f]),
            _ => return Err(ParseError::new(format!("bad move token `{tok}`"))),
        }
    }
    Ok(out)
}

pub fn format_moves(moves: &[ActionId]) -> String {
    moves
        .iter()
        .map(|m| MOVE_NAMES[m.index()])
        .collect::<Vec<_>>()
        .join(" ")
}

/// The puzzle with its twelve quarter turns.
#[derive(Debug, Clone, Copy, Default)]
pub struct RubikEnv;

impl Environment for RubikEnv {
    type State = Cube;

    fn kind(&self) -> EnvKind {
        EnvKind::Rubik
    }

    fn action_count(&self) -> usize {
        MOVE_COUNT
    }

    fn step(&self, state: &Cube, action: ActionId) -> Result<Cube, StepError> {
        self.check_action(action)?;
        Ok(state.turn(action.index()))
    }

    fn is_solved(&self, state: &Cube) -> bool {
        state.is_solved()
    }

    fn encode(&self, state: &Cube) -> String {
        state.to_string()
    }

    fn decode(&self, encoding: &str) -> Result<Cube, ParseError> {
        let c = Cube::from_stickers(encoding)?;
        check_reachable(&c).map_err(|e| ParseError::new(e.to_string()))?;
        Ok(c)
    }

    fn mismatch(&self, a: &Cube, b: &Cube) -> usize {
        a.0.iter().zip(b.0.iter()).filter(|(x, y)| x != y).count()
    }
}
