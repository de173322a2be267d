use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Policy, ValueFn};
use crate::env::{ActionId, EnvKind, Environment, ParseError, TrajectoryRecord};
use crate::experts::Expert;
use crate::scalar::{total_cmp, Scalar};

/// How many policy-ranked children an expansion generates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode", content = "param")]
pub enum ChildSelect {
    /// The `k` most probable actions.
    TopK(usize),
    /// The shortest most-probable-first prefix with total mass `>= t`.
    Confidence(f64),
}

impl fmt::Display for ChildSelect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChildSelect::TopK(k) => write!(f, "topk:{k}"),
            ChildSelect::Confidence(t) => write!(f, "confidence:{t}"),
        }
    }
}

/// `topk:3` or `confidence:0.7`.
impl FromStr for ChildSelect {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseError::new(format!("bad child mode `{s}`"));
        let (mode, param) = s.split_once(':').ok_or_else(bad)?;
        match mode {
            "topk" => match param.parse() {
                Ok(k) if k >= 1 => Ok(ChildSelect::TopK(k)),
                _ => Err(bad()),
            },
            "confidence" => match param.parse::<f64>() {
                Ok(t) if t > 0.0 && t <= 1.0 => Ok(ChildSelect::Confidence(t)),
                _ => Err(bad()),
            },
            _ => Err(bad()),
        }
    }
}

/// Action indices chosen by `mode`, most probable first (index breaks ties).
/// Zero-mass actions are never chosen; if rounding leaves the total below
/// the threshold, every positive action is taken.
pub fn select_children<S: Scalar>(probs: &[S], mode: ChildSelect) -> Vec<usize> {
    let mut order: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > S::zero()).collect();
    order.sort_by(|&a, &b| total_cmp(probs[b], probs[a]).then(a.cmp(&b)));
    match mode {
        ChildSelect::TopK(k) => order.truncate(k),
        ChildSelect::Confidence(t) => {
            let t = S::lit(t);
            let mut mass = S::zero();
            let mut n = 0;
            for &i in &order {
                mass = mass + probs[i];
                n += 1;
                if mass >= t {
                    break;
                }
            }
            order.truncate(n);
        }
    }
    order
}

fn normalize<S: Scalar>(mut w: Vec<S>) -> Vec<S> {
    let z: S = w.iter().copied().sum();
    if z > S::zero() {
        for x in w.iter_mut() {
            *x = *x / z;
        }
    }
    w
}

/// Equal mass on every applicable action.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformPolicy;

impl<E: Environment, S: Scalar> Policy<E, S> for UniformPolicy {
    fn probs(&self, env: &E, state: &E::State) -> Vec<S> {
        let mut w = vec![S::zero(); env.action_count()];
        for (a, _) in env.successors(state) {
            w[a.index()] = S::one();
        }
        normalize(w)
    }
}

/// Softmax of successor values divided by a temperature. Aliased actions
/// lead to the same successor and so get equal mass.
#[derive(Debug, Clone)]
pub struct SoftmaxPolicy<V> {
    value: V,
    temperature: f64,
}

impl<V> SoftmaxPolicy<V> {
    pub fn new(value: V, temperature: f64) -> Self {
        assert!(temperature > 0.0, "softmax temperature must be positive");
        SoftmaxPolicy { value, temperature }
    }
}

impl<E: Environment, S: Scalar, V: ValueFn<E, S>> Policy<E, S> for SoftmaxPolicy<V> {
    fn probs(&self, env: &E, state: &E::State) -> Vec<S> {
        let succ = env.successors(state);
        let logits: Vec<(usize, f64)> = succ
            .iter()
            .map(|(a, s)| (a.index(), self.value.value(env, s).as_f64() / self.temperature))
            .collect();
        let top = logits.iter().map(|l| l.1).fold(f64::NEG_INFINITY, f64::max);
        let mut w = vec![S::zero(); env.action_count()];
        for (i, l) in logits {
            w[i] = S::lit((l - top).exp());
        }
        normalize(w)
    }
}

/// Action counts per state encoding, read off expert trajectories.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PolicyCounts {
    pub env: Option<EnvKind>,
    pub counts: BTreeMap<String, BTreeMap<u32, u32>>,
}

impl PolicyCounts {
    pub fn fit(records: &[TrajectoryRecord]) -> Self {
        let mut out = PolicyCounts {
            env: records.first().map(|r| r.env),
            counts: BTreeMap::new(),
        };
        for r in records {
            for (s, &a) in r.states.iter().zip(&r.actions) {
                *out.counts.entry(s.clone()).or_default().entry(a).or_insert(0) += 1;
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Normalized dataset counts for states seen in the data, `fallback`
/// elsewhere.
#[derive(Debug, Clone)]
pub struct DatasetPolicy<P> {
    counts: Arc<PolicyCounts>,
    fallback: P,
}

impl<P> DatasetPolicy<P> {
    pub fn new(counts: Arc<PolicyCounts>, fallback: P) -> Self {
        DatasetPolicy { counts, fallback }
    }
}

impl<E: Environment, S: Scalar, P: Policy<E, S>> Policy<E, S> for DatasetPolicy<P> {
    fn probs(&self, env: &E, state: &E::State) -> Vec<S> {
        let Some(c) = self.counts.counts.get(&env.encode(state)) else {
            return self.fallback.probs(env, state);
        };
        let mut w = vec![S::zero(); env.action_count()];
        for (&a, &n) in c {
            let a = ActionId(a);
            if (a.index()) < w.len() && env.step(state, a).is_ok() {
                w[a.index()] = S::from_count(n as usize);
            }
        }
        if w.iter().all(|&x| x == S::zero()) {
            return self.fallback.probs(env, state);
        }
        normalize(w)
    }
}

/// Follows a policy greedily, never returning to a state it already
/// visited in the same rollout.
#[derive(Debug, Clone)]
pub struct PolicyRollout<P> {
    policy: P,
}

impl<P> PolicyRollout<P> {
    pub fn new(policy: P) -> Self {
        PolicyRollout { policy }
    }
}

impl<E: Environment, P: Policy<E>> Expert<E> for PolicyRollout<P> {
    fn name(&self) -> &str {
        "policy"
    }

    fn solve(&self, env: &E, state: &E::State, max_len: usize) -> Option<Vec<ActionId>> {
        let mut visited = HashSet::from([state.clone()]);
        let mut s = state.clone();
        let mut path = Vec::new();
        while path.len() < max_len && !env.is_solved(&s) {
            let probs = self.policy.probs(env, &s);
            let next = select_children(&probs, ChildSelect::Confidence(1.0))
                .into_iter()
                .find_map(|i| {
                    let a = ActionId::from(i);
                    let n = env.step(&s, a).ok()?;
                    (!visited.contains(&n)).then_some((a, n))
                });
            let Some((a, n)) = next else { break };
            visited.insert(n.clone());
            path.push(a);
            s = n;
        }
        (!path.is_empty()).then_some(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::Inflated;
    use crate::guidance::{HeuristicValue, OracleValue};
    use crate::npuzzle::NPuzzleEnv;
    use crate::rubik::{scramble, Cube, DistanceTable, RubikEnv};

    #[test]
    fn confidence_prefix_example() {
        let p = [0.05, 0.5, 0.15, 0.3];
        assert_eq!(select_children(&p, ChildSelect::Confidence(0.7)), vec![1, 3]);
        assert_eq!(select_children(&p, ChildSelect::TopK(3)), vec![1, 3, 2]);
        assert_eq!(select_children(&[0.0, 1.0], ChildSelect::TopK(2)), vec![1]);
    }

    #[test]
    fn child_mode_parsing() {
        assert_eq!("topk:4".parse::<ChildSelect>().unwrap(), ChildSelect::TopK(4));
        assert_eq!(
            "confidence:0.7".parse::<ChildSelect>().unwrap(),
            ChildSelect::Confidence(0.7)
        );
        assert!("confidence:0".parse::<ChildSelect>().is_err());
        assert!("topk:0".parse::<ChildSelect>().is_err());
    }

    #[test]
    fn softmax_is_normalized_and_sharpens() {
        let env = NPuzzleEnv::new(4);
        let pol = SoftmaxPolicy::new(HeuristicValue, 1.0);
        for seed in 0..1000 {
            let t = crate::npuzzle::shuffle(seed, 4, 30);
            let p: Vec<f64> = pol.probs(&env, &t);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            for (i, &x) in p.iter().enumerate() {
                assert!(x >= 0.0);
                if env.step(&t, ActionId::from(i)).is_err() {
                    assert_eq!(x, 0.0);
                }
            }
        }
        let table = DistanceTable::build(2).unwrap();
        let cold = SoftmaxPolicy::new(OracleValue::new(table), 1e-3);
        let c = Cube::solved().turn(0);
        let p: Vec<f64> = cold.probs(&RubikEnv, &c);
        assert!(p[1] > 1.0 - 1e-9);
    }

    #[test]
    fn softmax_splits_mass_across_aliases() {
        let env = Inflated::new(RubikEnv, 3);
        let pol = SoftmaxPolicy::new(HeuristicValue, 1.0);
        let (c, _) = scramble(3, 5);
        let p: Vec<f64> = pol.probs(&env, &c);
        for i in 0..12 {
            assert_eq!(p[i], p[i + 12]);
            assert_eq!(p[i], p[i + 24]);
        }
    }

    #[test]
    fn dataset_policy_one_hot_on_seen_state() {
        let rec = crate::experts::rubik_random_expert(4, 5).to_record(&RubikEnv);
        let counts = Arc::new(PolicyCounts::fit(std::slice::from_ref(&rec)));
        let pol = DatasetPolicy::new(counts, UniformPolicy);
        let s = RubikEnv.decode(&rec.states[0]).unwrap();
        let p: Vec<f64> = pol.probs(&RubikEnv, &s);
        let mut want = vec![0.0; 12];
        want[rec.actions[0] as usize] = 1.0;
        assert_eq!(p, want);
        let q: Vec<f64> = pol.probs(&RubikEnv, &scramble(99, 9).0);
        assert!(q.iter().all(|&x| (x - 1.0 / 12.0).abs() < 1e-12));
    }

    #[test]
    fn policy_rollout_descends_with_oracle() {
        let table = DistanceTable::build(3).unwrap();
        let x = PolicyRollout::new(SoftmaxPolicy::new(OracleValue::new(table), 0.1));
        let (c, _) = scramble(11, 3);
        let p = x.solve(&RubikEnv, &c, 10).unwrap();
        assert!(RubikEnv.replay(&c, &p).unwrap().is_solved());
        assert!(p.len() <= 3);
    }
}
