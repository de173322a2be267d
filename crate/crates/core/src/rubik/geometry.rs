//! Sticker coordinates and move tables derived from 3D rotations.
//!
//! Axes: x toward R, y toward U, z toward F. Every sticker has a cubie
//! position in {-1,0,1}^3 and an outward normal.

use super::{MOVE_COUNT, STICKERS};

pub(crate) type V3 = [i32; 3];

pub(crate) const NORMALS: [V3; 6] = [
    [0, 1, 0],
    [0, 0, 1],
    [1, 0, 0],
    [0, 0, -1],
    [-1, 0, 0],
    [0, -1, 0],
];

fn facelet_pos(face: usize, r: i32, c: i32) -> V3 {
    match face {
        0 => [c - 1, 1, r - 1],
        1 => [c - 1, 1 - r, 1],
        2 => [1, 1 - r, 1 - c],
        3 => [1 - c, 1 - r, -1],
        4 => [-1, 1 - r, c - 1],
        5 => [c - 1, -1, 1 - r],
        _ => unreachable!("six faces"),
    }
}

/// `(position, normal)` of every sticker index.
pub(crate) fn stickers() -> Vec<(V3, V3)> {
    (0..STICKERS)
        .map(|i| {
            let face = i / 9;
            let (r, c) = ((i % 9 / 3) as i32, (i % 3) as i32);
            (facelet_pos(face, r, c), NORMALS[face])
        })
        .collect()
}

pub(crate) fn dot(a: V3, b: V3) -> i32 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Quarter turn clockwise as seen from outside along `n`.
fn rotate_cw(n: V3, v: V3) -> V3 {
    let c = cross(n, v);
    let d = dot(n, v);
    [-c[0] + n[0] * d, -c[1] + n[1] * d, -c[2] + n[2] * d]
}

pub(crate) fn build_move_tables() -> [[u8; STICKERS]; MOVE_COUNT] {
    let geo = stickers();
    let find = |pos: V3, normal: V3| {
        geo.iter()
            .position(|&(p, n)| p == pos && n == normal)
            .expect("rotation maps stickers onto stickers")
    };
    let mut out = [[0u8; STICKERS]; MOVE_COUNT];
    for (face, &n) in NORMALS.iter().enumerate() {
        let mut cw = [0u8; STICKERS];
        for (src, &(p, nn)) in geo.iter().enumerate() {
            let dst = if dot(p, n) == 1 {
                find(rotate_cw(n, p), rotate_cw(n, nn))
            } else {
                src
            };
            cw[dst] = src as u8;
        }
        // Counter-clockwise is three clockwise turns.
        let mut ccw = [0u8; STICKERS];
        for (i, slot) in ccw.iter_mut().enumerate() {
            *slot = cw[cw[cw[i] as usize] as usize];
        }
        out[2 * face] = cw;
        out[2 * face + 1] = ccw;
    }
    out
}
