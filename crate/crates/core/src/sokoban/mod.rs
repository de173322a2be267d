//! Sokoban on square boards.
//!
//! The static part of a level (walls, targets) lives in [`Layout`]; a
//! [`SokobanState`] is the player cell plus the sorted box cells. The
//! canonical encoding is the row-major grid in the standard level symbols
//! (`#` wall, `@` player, `+` player on target, `$` box, `*` box on target,
//! `.` target, space floor) with no line breaks; the side length is the
//! square root of its length.

mod deadend;
mod generate;
mod solver;

use std::fmt;
use std::sync::Arc;

use crate::env::{ActionId, EnvKind, Environment, ParseError, StepError};

pub use deadend::{
    dead_end_fraction, is_corner_dead, DeadEndOracle, DeadEndVerdict, OracleLimit, VerdictMethod,
};
pub use generate::{generate, GeneratorConfig};
pub use solver::{matching_distance, solve_astar, AStarOutcome};

pub const DIRECTIONS: [&str; 4] = ["up", "right", "down", "left"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    side: usize,
    walls: Vec<bool>,
    targets: Vec<bool>,
}

impl Layout {
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn cells(&self) -> usize {
        self.side * self.side
    }

    pub fn is_wall(&self, cell: usize) -> bool {
        self.walls[cell]
    }

    pub fn is_target(&self, cell: usize) -> bool {
        self.targets[cell]
    }

    pub fn targets(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.cells()).filter(|&c| self.targets[c])
    }

    /// Neighbor of `cell` in direction `d` (0 up, 1 right, 2 down, 3 left).
    /// Only called on interior cells, which the closed border guarantees.
    pub fn neighbor(&self, cell: usize, d: usize) -> usize {
        match d {
            0 => cell - self.side,
            1 => cell + 1,
            2 => cell + self.side,
            3 => cell - 1,
            _ => unreachable!("four directions"),
        }
    }

    pub fn row_col(&self, cell: usize) -> (usize, usize) {
        (cell / self.side, cell % self.side)
    }

    pub fn manhattan(&self, a: usize, b: usize) -> usize {
        let (ra, ca) = self.row_col(a);
        let (rb, cb) = self.row_col(b);
        ra.abs_diff(rb) + ca.abs_diff(cb)
    }

    pub(crate) fn new(side: usize, walls: Vec<bool>, targets: Vec<bool>) -> Self {
        Layout {
            side,
            walls,
            targets,
        }
    }
}

/// Player cell and sorted box cells.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SokobanState {
    pub player: u16,
    pub boxes: Vec<u16>,
}

impl SokobanState {
    pub fn new(player: usize, mut boxes: Vec<usize>) -> Self {
        boxes.sort_unstable();
        SokobanState {
            player: player as u16,
            boxes: boxes.into_iter().map(|b| b as u16).collect(),
        }
    }

    pub fn has_box(&self, cell: usize) -> bool {
        self.boxes.binary_search(&(cell as u16)).is_ok()
    }
}

#[derive(Debug, Clone)]
pub struct SokobanEnv {
    layout: Arc<Layout>,
}

impl SokobanEnv {
    pub fn new(layout: Layout) -> Self {
        SokobanEnv {
            layout: Arc::new(layout),
        }
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// Parses a flat canonical encoding into its layout and state.
    pub fn from_encoding(enc: &str) -> Result<(SokobanEnv, SokobanState), ParseError> {
        let n = enc.len();
        let side = (n as f64).sqrt().round() as usize;
        if side * side != n || side < 3 {
            return Err(ParseError::new(format!(
                "sokoban encoding length {n} is not a square"
            )));
        }
        let rows: Vec<&str> = (0..side).map(|r| &enc[r * side..(r + 1) * side]).collect();
        parse_grid(&rows, false)
    }

    /// Parses a standard multi-line level. Ragged or non-square levels are
    /// padded with walls; floor outside the outer wall becomes wall.
    pub fn parse_level(text: &str) -> Result<(SokobanEnv, SokobanState), ParseError> {
        let rows: Vec<&str> = text
            .lines()
            .map(|l| l.trim_end_matches('\r'))
            .filter(|l| !l.trim().is_empty())
            .collect();
        parse_grid(&rows, true)
    }

    /// Pushes or walks in direction `d`. Blocked moves are `NoOp`.
    pub fn push_step(&self, s: &SokobanState, d: usize) -> Result<SokobanState, StepError> {
        let l = &*self.layout;
        let p = s.player as usize;
        let to = l.neighbor(p, d);
        if l.is_wall(to) {
            return Err(StepError::NoOp);
        }
        if let Ok(i) = s.boxes.binary_search(&(to as u16)) {
            let beyond = l.neighbor(to, d);
            if l.is_wall(beyond) || s.has_box(beyond) {
                return Err(StepError::NoOp);
            }
            let mut boxes = s.boxes.clone();
            boxes[i] = beyond as u16;
            boxes.sort_unstable();
            return Ok(SokobanState {
                player: to as u16,
                boxes,
            });
        }
        Ok(SokobanState {
            player: to as u16,
            boxes: s.boxes.clone(),
        })
    }

    pub fn render(&self, s: &SokobanState) -> Vec<String> {
        let l = &*self.layout;
        (0..l.side)
            .map(|r| {
                (0..l.side)
                    .map(|c| symbol(l, s, r * l.side + c))
                    .collect()
            })
            .collect()
    }
}

fn symbol(l: &Layout, s: &SokobanState, cell: usize) -> char {
    let t = l.is_target(cell);
    if l.is_wall(cell) {
        '#'
    } else if s.player as usize == cell {
        if t {
            '+'
        } else {
            '@'
        }
    } else if s.has_box(cell) {
        if t {
            '*'
        } else {
            '$'
        }
    } else if t {
        '.'
    } else {
        ' '
    }
}

fn parse_grid(rows: &[&str], pad: bool) -> Result<(SokobanEnv, SokobanState), ParseError> {
    let height = rows.len();
    let width = rows.iter().map(|r| r.chars().count()).max().unwrap_or(0);
    let side = height.max(width);
    if side < 3 {
        return Err(ParseError::new("board too small"));
    }
    let cells = side * side;
    let mut walls = vec![true; cells];
    let mut targets = vec![false; cells];
    let mut player = None;
    let mut boxes = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        for (c, ch) in row.chars().enumerate() {
            let i = r * side + c;
            match ch {
                '#' => continue,
                ' ' | '-' | '_' => {}
                '.' => targets[i] = true,
                '$' => boxes.push(i),
                '*' => {
                    targets[i] = true;
                    boxes.push(i);
                }
                '@' | '+' => {
                    if player.replace(i).is_some() {
                        return Err(ParseError::new("more than one player"));
                    }
                    targets[i] = ch == '+';
                }
                other => return Err(ParseError::new(format!("unknown cell symbol `{other}`"))),
            }
            walls[i] = false;
        }
    }
    let player = player.ok_or_else(|| ParseError::new("no player"))?;
    if boxes.len() != targets.iter().filter(|&&t| t).count() {
        return Err(ParseError::new("box count differs from target count"));
    }
    // Seal floor that touches the border; fail if anything live is outside.
    let on_border = |i: usize| {
        let (r, c) = (i / side, i % side);
        r == 0 || c == 0 || r == side - 1 || c == side - 1
    };
    let mut outside: Vec<usize> = (0..cells).filter(|&i| on_border(i) && !walls[i]).collect();
    if !outside.is_empty() && !pad {
        return Err(ParseError::new("board boundary is not wall-closed"));
    }
    let mut seen = vec![false; cells];
    while let Some(i) = outside.pop() {
        if seen[i] || walls[i] {
            continue;
        }
        seen[i] = true;
        if targets[i] || player == i || boxes.contains(&i) {
            return Err(ParseError::new("board boundary is not wall-closed"));
        }
        walls[i] = true;
        let (r, c) = (i / side, i % side);
        if r > 0 {
            outside.push(i - side);
        }
        if r + 1 < side {
            outside.push(i + side);
        }
        if c > 0 {
            outside.push(i - 1);
        }
        if c + 1 < side {
            outside.push(i + 1);
        }
    }
    let env = SokobanEnv::new(Layout::new(side, walls, targets));
    Ok((env, SokobanState::new(player, boxes)))
}

impl Environment for SokobanEnv {
    type State = SokobanState;

    fn kind(&self) -> EnvKind {
        EnvKind::Sokoban
    }

    fn action_count(&self) -> usize {
        4
    }

    fn step(&self, state: &SokobanState, action: ActionId) -> Result<SokobanState, StepError> {
        self.check_action(action)?;
        self.push_step(state, action.index())
    }

    fn is_solved(&self, state: &SokobanState) -> bool {
        state
            .boxes
            .iter()
            .all(|&b| self.layout.is_target(b as usize))
    }

    fn encode(&self, state: &SokobanState) -> String {
        self.render(state).concat()
    }

    fn decode(&self, encoding: &str) -> Result<SokobanState, ParseError> {
        let (env, s) = SokobanEnv::from_encoding(encoding)?;
        if *env.layout != *self.layout {
            return Err(ParseError::new("encoding belongs to a different level"));
        }
        Ok(s)
    }

    fn mismatch(&self, a: &SokobanState, b: &SokobanState) -> usize {
        let player = usize::from(a.player != b.player);
        let only_a = a.boxes.iter().filter(|x| !b.boxes.contains(x)).count();
        player + 2 * only_a
    }
}

impl fmt::Display for SokobanState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "player {} boxes {:?}", self.player, self.boxes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const ONE_PUSH: &str = "\
#####
#@$.#
#####";

    #[test]
    fn push_advances_box_and_solves() {
        let (env, s) = SokobanEnv::parse_level(ONE_PUSH).unwrap();
        assert_eq!(env.layout().side(), 5);
        assert!(!env.is_solved(&s));
        let t = env.push_step(&s, 1).unwrap();
        assert_eq!(t.player, s.player + 1);
        assert_eq!(t.boxes, vec![s.boxes[0] + 1]);
        assert!(env.is_solved(&t));
        assert_eq!(env.push_step(&t, 1), Err(StepError::NoOp));
    }

    #[test]
    fn push_into_wall_is_noop() {
        let (env, s) = SokobanEnv::parse_level("#####\n#@$ #\n#.  #\n#####").unwrap();
        assert_eq!(env.push_step(&s, 0), Err(StepError::NoOp));
        assert_eq!(env.push_step(&s, 3), Err(StepError::NoOp));
    }

    #[test]
    fn encoding_round_trips_and_marks_targets() {
        let (env, s) = SokobanEnv::parse_level("#####\n#+$ #\n# *.#\n#  $#\n#####").unwrap();
        let enc = env.encode(&s);
        assert_eq!(enc.len(), 25);
        assert_eq!(&enc[5..10], "#+$ #");
        assert_eq!(env.decode(&enc).unwrap(), s);
    }

    #[test]
    fn exterior_floor_is_sealed() {
        let (env, _) = SokobanEnv::parse_level("  ####\n###@.#\n# $  #\n######").unwrap();
        assert_eq!(env.layout().side(), 6);
        assert!(env.layout().is_wall(0));
        assert!(SokobanEnv::parse_level("#@$.\n####").is_err());
    }

    #[test]
    fn rejects_unbalanced_boxes() {
        assert!(SokobanEnv::parse_level("#####\n#@$$#\n#.  #\n#####").is_err());
    }
}
