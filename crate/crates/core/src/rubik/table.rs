use std::collections::HashMap;

use thiserror::Error;

use super::{color_index, Cube, MOVE_COUNT};

/// Entry bound for radius 7 (about 9.2M states) with some headroom.
pub const DEFAULT_MAX_ENTRIES: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("distance table would exceed {max_entries} entries")]
pub struct TableTooLarge {
    pub max_entries: usize,
}

/// Exact quarter-turn distances from solved for every state within a radius.
#[derive(Debug, Clone)]
pub struct DistanceTable {
    dist: HashMap<u128, u8>,
    radius: u8,
    layers: Vec<usize>,
}

/// Base-6 packing of the 48 non-center stickers (6^48 < 2^125).
fn key(c: &Cube) -> u128 {
    let s = c.stickers();
    let mut k: u128 = 0;
    for (i, &x) in s.iter().enumerate() {
        if i % 9 == 4 {
            continue;
        }
        k = k * 6 + color_index(x).expect("valid sticker") as u128;
    }
    k
}

impl DistanceTable {
    pub fn build(radius: u8) -> Result<Self, TableTooLarge> {
        Self::build_capped(radius, DEFAULT_MAX_ENTRIES)
    }

    pub fn build_capped(radius: u8, max_entries: usize) -> Result<Self, TableTooLarge> {
        let start = Cube::solved();
        let mut dist = HashMap::new();
        dist.insert(key(&start), 0u8);
        let mut layers = vec![1usize];
        let mut frontier = vec![start];
        for d in 1..=radius {
            let mut next = Vec::new();
            for c in &frontier {
                for m in 0..MOVE_COUNT {
                    let n = c.turn(m);
                    let k = key(&n);
                    if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(k) {
                        e.insert(d);
                        if next.len() + layers.iter().sum::<usize>() >= max_entries {
                            return Err(TableTooLarge { max_entries });
                        }
                        next.push(n);
                    }
                }
            }
            layers.push(next.len());
            frontier = next;
        }
        Ok(Self {
            dist,
            radius,
            layers,
        })
    }

    pub fn radius(&self) -> u8 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    /// States at each distance `0..=radius`.
    pub fn layer_counts(&self) -> &[usize] {
        &self.layers
    }

    pub fn distance(&self, c: &Cube) -> Option<u8> {
        self.dist.get(&key(c)).copied()
    }

    /// A shortest solution for a state inside the table: at each step the
    /// lowest-index move that decreases the distance.
    pub fn optimal_solution(&self, c: &Cube) -> Option<Vec<u8>> {
        let mut d = self.distance(c)?;
        let mut cur = c.clone();
        let mut out = Vec::with_capacity(d as usize);
        while d > 0 {
            let m = (0..MOVE_COUNT).find(|&m| self.distance(&cur.turn(m)) == Some(d - 1))?;
            cur = cur.turn(m);
            out.push(m as u8);
            d -= 1;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    #[test]
    fn first_layers() {
        let t = DistanceTable::build(3).unwrap();
        assert_eq!(t.distance(&Cube::solved()), Some(0));
        assert_eq!(t.layer_counts(), &[1, 12, 114, 1068]);
        assert_eq!(t.distance(&Cube::solved().turn(4)), Some(1));
    }

    #[test]
    fn layer_two_matches_enumerate_and_dedupe() {
        // Independent route: all 144 two-move words, dedupe, drop states
        // already at distance 0 or 1.
        let s = Cube::solved();
        let near: HashSet<Cube> = std::iter::once(s.clone())
            .chain((0..MOVE_COUNT).map(|m| s.turn(m)))
            .collect();
        let two: HashSet<Cube> = (0..MOVE_COUNT)
            .flat_map(|a| (0..MOVE_COUNT).map(move |b| (a, b)))
            .map(|(a, b)| s.turn(a).turn(b))
            .filter(|c| !near.contains(c))
            .collect();
        let t = DistanceTable::build(2).unwrap();
        assert_eq!(two.len(), t.layer_counts()[2]);
        assert!(two.iter().all(|c| t.distance(c) == Some(2)));
    }

    #[test]
    fn cap_is_enforced() {
        assert_eq!(
            DistanceTable::build_capped(3, 100).unwrap_err(),
            TableTooLarge { max_entries: 100 }
        );
    }

    #[test]
    fn optimal_solution_has_table_length() {
        let t = DistanceTable::build(4).unwrap();
        let (c, _) = super::super::scramble(5, 4);
        let d = t.distance(&c).unwrap();
        let sol = t.optimal_solution(&c).unwrap();
        assert_eq!(sol.len(), d as usize);
        assert!(c.apply(&sol).is_solved());
    }
}
