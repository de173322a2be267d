use super::{ActionId, EnvKind, Environment, ParseError, StepError};

/// Wraps an environment so that every base action appears `factor` times.
///
/// Inflated index `i` behaves exactly like base action `i mod n`, where `n`
/// is the base action count. States, encodings and the goal predicate are
/// unchanged.
#[derive(Debug, Clone)]
pub struct Inflated<E> {
    base: E,
    factor: usize,
}

impl<E: Environment> Inflated<E> {
    pub fn new(base: E, factor: usize) -> Self {
        assert!(factor >= 1, "inflation factor must be positive");
        Self { base, factor }
    }

    pub fn base(&self) -> &E {
        &self.base
    }

    pub fn factor(&self) -> usize {
        self.factor
    }

    pub fn base_action(&self, action: ActionId) -> ActionId {
        ActionId::from(action.index() % self.base.action_count())
    }
}

impl<E: Environment> Environment for Inflated<E> {
    type State = E::State;

    fn kind(&self) -> EnvKind {
        self.base.kind()
    }

    fn action_count(&self) -> usize {
        self.base.action_count() * self.factor
    }

    fn step(&self, state: &Self::State, action: ActionId) -> Result<Self::State, StepError> {
        self.check_action(action)?;
        self.base.step(state, self.base_action(action))
    }

    fn is_solved(&self, state: &Self::State) -> bool {
        self.base.is_solved(state)
    }

    fn encode(&self, state: &Self::State) -> String {
        self.base.encode(state)
    }

    fn decode(&self, encoding: &str) -> Result<Self::State, ParseError> {
        self.base.decode(encoding)
    }

    fn mismatch(&self, a: &Self::State, b: &Self::State) -> usize {
        self.base.mismatch(a, b)
    }
}
