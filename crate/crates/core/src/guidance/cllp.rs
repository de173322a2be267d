use std::collections::{BinaryHeap, HashMap};
use std::cmp::Reverse;

use super::SubgoalProposal;
use crate::env::{ActionId, BudgetExhausted, Environment};

/// Expansions allowed per unit of `k` when no witness is attached.
pub const DEFAULT_CLLP_MULTIPLIER: usize = 4;

/// Outcome of trying to reach a subgoal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reach {
    Reached(Vec<ActionId>),
    /// A solved state turned up before the subgoal; the path ends there.
    SolvedOnTheWay(Vec<ActionId>),
    Unreachable,
    BudgetExhausted,
}

/// Finds a path of at most `proposal.k` actions from `start` to the
/// proposed subgoal. A witness is checked step by step; otherwise a
/// best-first search on the mismatch to the subgoal runs for at most
/// `multiplier * k` expansions. `visit` sees every state materialized on
/// the way (the caller charges it) and may stop the attempt.
pub fn cllp_reach<E: Environment>(
    env: &E,
    start: &E::State,
    proposal: &SubgoalProposal<E::State>,
    multiplier: usize,
    visit: &mut dyn FnMut(&E::State) -> Result<(), BudgetExhausted>,
) -> Reach {
    let k = proposal.k.max(1);
    if *start == proposal.subgoal {
        return Reach::Reached(Vec::new());
    }
    if let Some(w) = &proposal.witness {
        if w.len() > k {
            return Reach::Unreachable;
        }
        let mut s = start.clone();
        for (i, &a) in w.iter().enumerate() {
            let Ok(n) = env.step(&s, a) else {
                return Reach::Unreachable;
            };
            if visit(&n).is_err() {
                return Reach::BudgetExhausted;
            }
            if env.is_solved(&n) && i + 1 < w.len() {
                return Reach::SolvedOnTheWay(w[..=i].to_vec());
            }
            s = n;
        }
        return if s == proposal.subgoal {
            Reach::Reached(w.clone())
        } else {
            Reach::Unreachable
        };
    }

    struct Node<T> {
        state: T,
        parent: usize,
        action: ActionId,
        depth: usize,
    }
    let path_to = |nodes: &[Node<E::State>], mut i: usize| {
        let mut p = Vec::new();
        while i != 0 {
            p.push(nodes[i].action);
            i = nodes[i].parent;
        }
        p.reverse();
        p
    };
    let mut nodes = vec![Node {
        state: start.clone(),
        parent: 0,
        action: ActionId(0),
        depth: 0,
    }];
    let mut index = HashMap::from([(start.clone(), 0usize)]);
    let mut open = BinaryHeap::from([Reverse((env.mismatch(start, &proposal.subgoal), 0usize))]);
    let mut expansions = 0;
    while let Some(Reverse((_, i))) = open.pop() {
        if expansions >= multiplier * k {
            break;
        }
        expansions += 1;
        if nodes[i].depth >= k {
            continue;
        }
        for (a, n) in env.successors(&nodes[i].state) {
            if index.contains_key(&n) {
                continue;
            }
            if visit(&n).is_err() {
                return Reach::BudgetExhausted;
            }
            let j = nodes.len();
            index.insert(n.clone(), j);
            let hit = n == proposal.subgoal;
            let solved = env.is_solved(&n);
            let h = env.mismatch(&n, &proposal.subgoal);
            nodes.push(Node {
                state: n,
                parent: i,
                action: a,
                depth: nodes[i].depth + 1,
            });
            if hit {
                return Reach::Reached(path_to(&nodes, j));
            }
            if solved {
                return Reach::SolvedOnTheWay(path_to(&nodes, j));
            }
            open.push(Reverse((h, j)));
        }
    }
    Reach::Unreachable
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rubik::{scramble, Cube, RubikEnv};
    use crate::sokoban::{SokobanEnv, SokobanState};

    fn count_visits<E: Environment>(
        env: &E,
        s: &E::State,
        p: &SubgoalProposal<E::State>,
    ) -> (Reach, usize) {
        let mut n = 0;
        let r = cllp_reach(env, s, p, DEFAULT_CLLP_MULTIPLIER, &mut |_| {
            n += 1;
            Ok(())
        });
        (r, n)
    }

    #[test]
    fn same_state_is_empty_path() {
        let (c, _) = scramble(1, 5);
        let p = SubgoalProposal { subgoal: c.clone(), k: 3, witness: None };
        assert_eq!(count_visits(&RubikEnv, &c, &p), (Reach::Reached(vec![]), 0));
    }

    #[test]
    fn witness_of_three_charges_three() {
        let (c, _) = scramble(2, 8);
        let w = vec![ActionId(0), ActionId(4), ActionId(6)];
        let p = SubgoalProposal {
            subgoal: RubikEnv.replay(&c, &w).unwrap(),
            k: 3,
            witness: Some(w.clone()),
        };
        assert_eq!(count_visits(&RubikEnv, &c, &p), (Reach::Reached(w), 3));
    }

    #[test]
    fn search_finds_nearby_subgoal() {
        let c = Cube::solved().turn(2).turn(5).turn(7);
        let sub = c.turn(0).turn(8);
        let p = SubgoalProposal { subgoal: sub.clone(), k: 2, witness: None };
        let mut budget = 0;
        let r = cllp_reach(&RubikEnv, &c, &p, 100, &mut |_| {
            budget += 1;
            Ok(())
        });
        let Reach::Reached(path) = r else { panic!("{r:?}") };
        assert!(path.len() <= 2);
        assert_eq!(RubikEnv.replay(&c, &path).unwrap(), sub);
    }

    #[test]
    fn teleported_box_is_unreachable_but_charged() {
        let (env, s) = SokobanEnv::parse_level("#######\n#@ $ .#\n#######").unwrap();
        let moved = SokobanState::new(s.player as usize, vec![s.boxes[0] as usize - 1]);
        let p = SubgoalProposal { subgoal: moved, k: 2, witness: None };
        let (r, n) = count_visits(&env, &s, &p);
        assert_eq!(r, Reach::Unreachable);
        assert!(n >= 1);
    }

    #[test]
    fn bad_witness_is_unreachable() {
        let (c, _) = scramble(5, 6);
        let p = SubgoalProposal {
            subgoal: c.turn(0),
            k: 2,
            witness: Some(vec![ActionId(2)]),
        };
        assert_eq!(count_visits(&RubikEnv, &c, &p).0, Reach::Unreachable);
    }

    #[test]
    fn budget_stop_propagates() {
        let (c, _) = scramble(6, 6);
        let p = SubgoalProposal { subgoal: c.turn(0).turn(2), k: 2, witness: None };
        let r = cllp_reach(&RubikEnv, &c, &p, 4, &mut |_| Err(BudgetExhausted { cap: 0 }));
        assert_eq!(r, Reach::BudgetExhausted);
    }
}
