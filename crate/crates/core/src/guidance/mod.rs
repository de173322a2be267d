//! Pluggable search guidance: value estimators, policies, subgoal
//! generators and the low-level policy that reaches proposed subgoals.
//!
//! Values follow one convention everywhere: an estimate is the negated
//! number of remaining steps, so larger is better and a solved state is 0.

mod bundle;
mod cllp;
mod features;
mod generator;
mod policy;
mod value;

use crate::env::{ActionId, Environment};
use crate::scalar::Scalar;

pub use bundle::{BundleError, GuidanceBundle, BUNDLE_VERSION};
pub use cllp::{cllp_reach, Reach, DEFAULT_CLLP_MULTIPLIER};
pub use features::Featurize;
pub use generator::{ExpertRollout, PolicyChildren};
pub use policy::{
    select_children, ChildSelect, DatasetPolicy, PolicyCounts, PolicyRollout, SoftmaxPolicy,
    UniformPolicy,
};
pub use value::{
    ConstantValue, DistanceOracle, FitError, FittedValue, HeuristicValue, Noisy, OracleValue,
};

/// Estimated value of a state (negated remaining steps).
pub trait ValueFn<E: Environment, S: Scalar = f64> {
    fn value(&self, env: &E, state: &E::State) -> S;
}

impl<E: Environment, S: Scalar, F: Fn(&E, &E::State) -> S> ValueFn<E, S> for F {
    fn value(&self, env: &E, state: &E::State) -> S {
        self(env, state)
    }
}

/// Distribution over an environment's actions. Returned vectors have one
/// entry per action, sum to 1 and put no mass on inapplicable actions.
pub trait Policy<E: Environment, S: Scalar = f64> {
    fn probs(&self, env: &E, state: &E::State) -> Vec<S>;
}

impl<E: Environment, S: Scalar, F: Fn(&E, &E::State) -> Vec<S>> Policy<E, S> for F {
    fn probs(&self, env: &E, state: &E::State) -> Vec<S> {
        self(env, state)
    }
}

/// A proposed intermediate state about `k` steps ahead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgoalProposal<T> {
    pub subgoal: T,
    pub k: usize,
    /// Actions that lead from the source state to `subgoal`, when known.
    pub witness: Option<Vec<ActionId>>,
}

pub trait SubgoalGenerator<E: Environment> {
    /// Intended distance of this generator's proposals.
    fn k(&self) -> usize;

    fn propose(&self, env: &E, state: &E::State) -> Vec<SubgoalProposal<E::State>>;
}

impl<E: Environment, G: SubgoalGenerator<E> + ?Sized> SubgoalGenerator<E> for Box<G> {
    fn k(&self) -> usize {
        (**self).k()
    }
    fn propose(&self, env: &E, state: &E::State) -> Vec<SubgoalProposal<E::State>> {
        (**self).propose(env, state)
    }
}

impl<E: Environment, S: Scalar, P: Policy<E, S> + ?Sized> Policy<E, S> for std::sync::Arc<P> {
    fn probs(&self, env: &E, state: &E::State) -> Vec<S> {
        (**self).probs(env, state)
    }
}

impl<E: Environment, S: Scalar, V: ValueFn<E, S> + ?Sized> ValueFn<E, S> for std::sync::Arc<V> {
    fn value(&self, env: &E, state: &E::State) -> S {
        (**self).value(env, state)
    }
}

impl<E: Environment, S: Scalar, P: Policy<E, S> + ?Sized> Policy<E, S> for std::rc::Rc<P> {
    fn probs(&self, env: &E, state: &E::State) -> Vec<S> {
        (**self).probs(env, state)
    }
}

impl<E: Environment, S: Scalar, V: ValueFn<E, S> + ?Sized> ValueFn<E, S> for std::rc::Rc<V> {
    fn value(&self, env: &E, state: &E::State) -> S {
        (**self).value(env, state)
    }
}
