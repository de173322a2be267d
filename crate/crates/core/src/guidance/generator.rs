use super::{select_children, ChildSelect, Policy, SubgoalGenerator, SubgoalProposal};
use crate::env::{ActionId, Environment};
use crate::experts::Expert;

/// Proposes, for each expert, the state that expert reaches after `k` of
/// its own steps, with those steps as the witness.
pub struct ExpertRollout<E: Environment> {
    experts: Vec<Box<dyn Expert<E>>>,
    k: usize,
}

impl<E: Environment> ExpertRollout<E> {
    pub fn new(experts: Vec<Box<dyn Expert<E>>>, k: usize) -> Self {
        assert!(k >= 1, "subgoal distance must be at least 1");
        ExpertRollout { experts, k }
    }
}

impl<E: Environment> SubgoalGenerator<E> for ExpertRollout<E> {
    fn k(&self) -> usize {
        self.k
    }

    fn propose(&self, env: &E, state: &E::State) -> Vec<SubgoalProposal<E::State>> {
        if env.is_solved(state) {
            return Vec::new();
        }
        let mut out: Vec<SubgoalProposal<E::State>> = Vec::new();
        for x in &self.experts {
            let Some(path) = x.solve(env, state, self.k) else {
                continue;
            };
            if path.is_empty() {
                continue;
            }
            let Some(sub) = env.replay(state, &path) else {
                log::warn!("expert {} produced an invalid path", x.name());
                continue;
            };
            if out.iter().any(|p| p.subgoal == sub) {
                continue;
            }
            out.push(SubgoalProposal {
                subgoal: sub,
                k: self.k,
                witness: Some(path),
            });
        }
        out
    }
}

/// One-step proposals: the policy-selected children of a state.
#[derive(Debug, Clone)]
pub struct PolicyChildren<P> {
    policy: P,
    mode: ChildSelect,
}

impl<P> PolicyChildren<P> {
    pub fn new(policy: P, mode: ChildSelect) -> Self {
        PolicyChildren { policy, mode }
    }
}

impl<E: Environment, P: Policy<E>> SubgoalGenerator<E> for PolicyChildren<P> {
    fn k(&self) -> usize {
        1
    }

    fn propose(&self, env: &E, state: &E::State) -> Vec<SubgoalProposal<E::State>> {
        let probs = self.policy.probs(env, state);
        select_children(&probs, self.mode)
            .into_iter()
            .filter_map(|i| {
                let a = ActionId::from(i);
                env.step(state, a).ok().map(|s| SubgoalProposal {
                    subgoal: s,
                    k: 1,
                    witness: Some(vec![a]),
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experts::{BeginnerExpert, ScrambleReversal};
    use crate::guidance::UniformPolicy;
    use crate::rubik::{scramble, Cube, RubikEnv};

    #[test]
    fn solved_state_gets_no_proposals() {
        let g = ExpertRollout::new(vec![Box::new(BeginnerExpert)], 4);
        assert!(g.propose(&RubikEnv, &Cube::solved()).is_empty());
    }

    #[test]
    fn one_expert_one_proposal() {
        let (c, moves) = scramble(2, 10);
        let g = ExpertRollout::new(vec![Box::new(ScrambleReversal::new(&moves))], 4);
        let p = g.propose(&RubikEnv, &c);
        assert_eq!(p.len(), 1);
        let w = p[0].witness.as_ref().unwrap();
        assert!(w.len() <= 4);
        assert_eq!(RubikEnv.replay(&c, w).unwrap(), p[0].subgoal);
    }

    #[test]
    fn witnesses_replay_on_many_states() {
        let g = ExpertRollout::<RubikEnv>::new(vec![Box::new(BeginnerExpert)], 5);
        for seed in 0..1000 {
            let (c, _) = scramble(seed, 1 + seed as usize % 25);
            for p in g.propose(&RubikEnv, &c) {
                let w = p.witness.unwrap();
                assert!(!w.is_empty() && w.len() <= 5);
                assert_eq!(RubikEnv.replay(&c, &w).unwrap(), p.subgoal);
            }
        }
    }

    #[test]
    fn identical_proposals_are_merged() {
        let g = ExpertRollout::<RubikEnv>::new(
            vec![Box::new(BeginnerExpert), Box::new(BeginnerExpert)],
            3,
        );
        assert_eq!(g.propose(&RubikEnv, &scramble(1, 12).0).len(), 1);
    }

    #[test]
    fn policy_children_have_unit_witnesses() {
        let g = PolicyChildren::new(UniformPolicy, ChildSelect::TopK(5));
        let p = g.propose(&RubikEnv, &Cube::solved());
        assert_eq!(p.len(), 5);
        assert!(p.iter().all(|x| x.witness.as_ref().unwrap().len() == 1));
    }
}
