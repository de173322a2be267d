use thiserror::Error;

use super::Environment;

/// Tier a visited state is booked under.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// A node of the (sub)goal tree. Every node of a low-level search
    /// (BestFS, A*, MCTS) is booked here.
    HighLevel,
    /// A state materialized while reaching a subgoal.
    LowLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("search budget of {cap} states exhausted")]
pub struct BudgetExhausted {
    pub cap: usize,
}

/// Counts states visited by one search run.
///
/// The caller charges a state once, when the search first materializes it.
/// A charge that would push `total` above `cap` is refused and leaves the
/// counters untouched, so `total <= cap` always holds.
#[derive(Debug, Clone)]
pub struct BudgetLedger {
    total: usize,
    high: usize,
    cap: usize,
    log: Option<Vec<String>>,
}

impl BudgetLedger {
    pub fn new(cap: usize) -> Self {
        Self {
            total: 0,
            high: 0,
            cap,
            log: None,
        }
    }

    /// Ledger that also keeps the encoding of every charged state.
    pub fn with_log(cap: usize) -> Self {
        Self {
            log: Some(Vec::new()),
            ..Self::new(cap)
        }
    }

    pub fn charge(&mut self, kind: NodeKind) -> Result<(), BudgetExhausted> {
        if self.total >= self.cap {
            return Err(BudgetExhausted { cap: self.cap });
        }
        self.total += 1;
        if kind == NodeKind::HighLevel {
            self.high += 1;
        }
        Ok(())
    }

    pub fn charge_state<E: Environment + ?Sized>(
        &mut self,
        env: &E,
        state: &E::State,
        kind: NodeKind,
    ) -> Result<(), BudgetExhausted> {
        self.charge(kind)?;
        if let Some(log) = self.log.as_mut() {
            log.push(env.encode(state));
        }
        Ok(())
    }

    /// Re-books an already charged low-level state as high-level (an
    /// accepted subgoal that was materialized by its reaching path).
    pub fn promote(&mut self) {
        assert!(
            self.high < self.total,
            "promote without a low-level state to promote"
        );
        self.high += 1;
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn high_level(&self) -> usize {
        self.high
    }

    pub fn low_level(&self) -> usize {
        self.total - self.high
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn is_exhausted(&self) -> bool {
        self.total >= self.cap
    }

    pub fn log(&self) -> Option<&[String]> {
        self.log.as_deref()
    }

    pub fn take_log(&mut self) -> Option<Vec<String>> {
        self.log.take()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_high_and_low() {
        let mut l = BudgetLedger::new(10);
        l.charge(NodeKind::HighLevel).unwrap();
        l.charge(NodeKind::LowLevel).unwrap();
        l.charge(NodeKind::LowLevel).unwrap();
        assert_eq!(l.total(), 3);
        assert_eq!(l.high_level(), 1);
        assert_eq!(l.low_level(), 2);
    }

    #[test]
    fn third_charge_over_cap_two_is_refused() {
        let mut l = BudgetLedger::new(2);
        l.charge(NodeKind::LowLevel).unwrap();
        l.charge(NodeKind::LowLevel).unwrap();
        assert_eq!(l.charge(NodeKind::HighLevel), Err(BudgetExhausted { cap: 2 }));
        assert_eq!(l.total(), 2);
        assert_eq!(l.high_level(), 0);
    }

    #[test]
    fn promote_keeps_total() {
        let mut l = BudgetLedger::new(5);
        l.charge(NodeKind::LowLevel).unwrap();
        l.promote();
        assert_eq!((l.total(), l.high_level(), l.low_level()), (1, 1, 0));
    }

    #[test]
    #[should_panic]
    fn promote_requires_low_level_state() {
        let mut l = BudgetLedger::new(5);
        l.charge(NodeKind::HighLevel).unwrap();
        l.promote();
    }
}
