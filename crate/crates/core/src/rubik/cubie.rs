//! Cubie-level view of a sticker state, used to reject unreachable
//! encodings and by the beginner solver to locate pieces.

use std::sync::OnceLock;

use thiserror::Error;

use super::geometry::{cross, dot, stickers, V3};
use super::{Cube, STICKERS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CubieError {
    #[error("center stickers are not in their fixed positions")]
    Centers,
    #[error("sticker colors do not form a valid set of pieces")]
    Pieces,
    #[error("corner twist sum is not divisible by 3")]
    Twist,
    #[error("edge flip sum is odd")]
    Flip,
    #[error("corner and edge permutation parities differ")]
    Parity,
}

/// Sticker indices per slot, in a fixed cyclic order.
pub(crate) struct Slots {
    /// First sticker faces U or D; the other two follow counter-clockwise
    /// seen from outside the corner.
    pub corners: Vec<[usize; 3]>,
    /// First sticker faces U or D if the slot touches those faces, else F or B.
    pub edges: Vec<[usize; 2]>,
    pub centers: [usize; 6],
}

pub(crate) fn slots() -> &'static Slots {
    static SLOTS: OnceLock<Slots> = OnceLock::new();
    SLOTS.get_or_init(build_slots)
}

fn build_slots() -> Slots {
    let geo = stickers();
    let nonzero = |p: V3| p.iter().filter(|&&x| x != 0).count();
    let at = |pos: V3| -> Vec<usize> { (0..STICKERS).filter(|&i| geo[i].0 == pos).collect() };

    let mut corners = Vec::new();
    let mut edges = Vec::new();
    let mut centers = [0usize; 6];
    // Positions visited in sticker order so slot numbering is stable.
    let mut seen: Vec<V3> = Vec::new();
    for &(pos, _) in &geo {
        if seen.contains(&pos) {
            continue;
        }
        seen.push(pos);
        let idx = at(pos);
        match nonzero(pos) {
            1 => centers[idx[0] / 9] = idx[0],
            2 => {
                let axis_rank = |i: usize| {
                    let n = geo[i].1;
                    if n[1] != 0 {
                        0
                    } else if n[2] != 0 {
                        1
                    } else {
                        2
                    }
                };
                let mut e = [idx[0], idx[1]];
                e.sort_by_key(|&i| axis_rank(i));
                edges.push(e);
            }
            3 => {
                let first = *idx.iter().find(|&&i| geo[i].1[1] != 0).expect("U/D sticker");
                let rest: Vec<usize> = idx.iter().copied().filter(|&i| i != first).collect();
                let (a, b) = (rest[0], rest[1]);
                let det = dot(cross(geo[first].1, geo[a].1), geo[b].1);
                corners.push(if det > 0 { [first, a, b] } else { [first, b, a] });
            }
            _ => unreachable!("no sticker at the cube center"),
        }
    }
    Slots {
        corners,
        edges,
        centers,
    }
}

/// Position and orientation of every piece.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Cubies {
    /// `corner_perm[slot]` = piece (home slot) currently in `slot`.
    pub corner_perm: [u8; 8],
    pub corner_twist: [u8; 8],
    pub edge_perm: [u8; 12],
    pub edge_flip: [u8; 12],
}

fn sorted<const N: usize>(mut a: [u8; N]) -> [u8; N] {
    a.sort_unstable();
    a
}

pub(crate) fn decompose(c: &Cube) -> Result<Cubies, CubieError> {
    let s = c.stickers();
    let solved = Cube::solved();
    let h = solved.stickers();
    let sl = slots();

    for (face, &i) in sl.centers.iter().enumerate() {
        if s[i] != h[sl.centers[face]] {
            return Err(CubieError::Centers);
        }
    }
    let is_ud = |x: u8| x == b'y' || x == b'w';

    let mut corner_perm = [0u8; 8];
    let mut corner_twist = [0u8; 8];
    let mut used = [false; 8];
    for (slot, st) in sl.corners.iter().enumerate() {
        let colors = [s[st[0]], s[st[1]], s[st[2]]];
        let key = sorted(colors);
        let piece = sl
            .corners
            .iter()
            .position(|hs| sorted([h[hs[0]], h[hs[1]], h[hs[2]]]) == key)
            .ok_or(CubieError::Pieces)?;
        if std::mem::replace(&mut used[piece], true) {
            return Err(CubieError::Pieces);
        }
        let twist = colors.iter().position(|&x| is_ud(x)).ok_or(CubieError::Pieces)?;
        // The piece's own cyclic color order must match its home order.
        let home = sl.corners[piece];
        let home_colors = [h[home[0]], h[home[1]], h[home[2]]];
        let rotated = [colors[twist], colors[(twist + 1) % 3], colors[(twist + 2) % 3]];
        if rotated != home_colors {
            return Err(CubieError::Pieces);
        }
        corner_perm[slot] = piece as u8;
        corner_twist[slot] = twist as u8;
    }

    let mut edge_perm = [0u8; 12];
    let mut edge_flip = [0u8; 12];
    let mut used = [false; 12];
    for (slot, st) in sl.edges.iter().enumerate() {
        let colors = [s[st[0]], s[st[1]]];
        let piece = sl
            .edges
            .iter()
            .position(|hs| {
                let hc = [h[hs[0]], h[hs[1]]];
                hc == colors || hc == [colors[1], colors[0]]
            })
            .ok_or(CubieError::Pieces)?;
        if std::mem::replace(&mut used[piece], true) {
            return Err(CubieError::Pieces);
        }
        let home = sl.edges[piece];
        edge_perm[slot] = piece as u8;
        edge_flip[slot] = u8::from(colors[0] != h[home[0]]);
    }

    Ok(Cubies {
        corner_perm,
        corner_twist,
        edge_perm,
        edge_flip,
    })
}

fn parity(perm: &[u8]) -> bool {
    let mut seen = vec![false; perm.len()];
    let mut odd = false;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i] as usize;
            len += 1;
        }
        if len % 2 == 0 {
            odd = !odd;
        }
    }
    odd
}

/// Checks that a sticker state is reachable from solved by face turns.
pub fn check_reachable(c: &Cube) -> Result<(), CubieError> {
    let cb = decompose(c)?;
    if cb.corner_twist.iter().map(|&t| t as u32).sum::<u32>() % 3 != 0 {
        return Err(CubieError::Twist);
    }
    if cb.edge_flip.iter().map(|&t| t as u32).sum::<u32>() % 2 != 0 {
        return Err(CubieError::Flip);
    }
    if parity(&cb.corner_perm) != parity(&cb.edge_perm) {
        return Err(CubieError::Parity);
    }
    Ok(())
}
