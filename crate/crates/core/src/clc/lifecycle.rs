//! Contract lifecycle (`INIT -> EXECUTION -> EVALUATION -> COMPLETED`) with
//! an orthogonal phase that is only meaningful mid-contract.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Lifecycle {
    Init,
    Execution,
    Evaluation,
    Completed,
}

impl Lifecycle {
    pub fn rank(self) -> u8 {
        self as u8
    }
}

impl fmt::Display for Lifecycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lifecycle::Init => "INIT",
            Lifecycle::Execution => "EXECUTION",
            Lifecycle::Evaluation => "EVALUATION",
            Lifecycle::Completed => "COMPLETED",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Phase {
    None,
    AwaitingInspection,
    AwaitingTenantDecision,
    Approved,
    Disputed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LifecycleEvent {
    /// The commitment was inserted into the ledger's tree.
    CommitmentRegistered,
    /// Evidence reached the enclave and evaluation ran.
    EvidenceSubmitted,
    Approved,
    Disputed,
    /// The settlement transaction succeeded.
    Settled,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("event {event:?} not allowed in {from}/{phase:?}")]
pub struct FsmError {
    pub from: Lifecycle,
    pub phase: Phase,
    pub event: LifecycleEvent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LifecycleState {
    pub lifecycle: Lifecycle,
    pub phase: Phase,
}

impl Default for LifecycleState {
    fn default() -> Self {
        Self::init()
    }
}

impl LifecycleState {
    pub fn init() -> Self {
        Self { lifecycle: Lifecycle::Init, phase: Phase::None }
    }

    /// Result of applying `event`, or `None` if the transition is illegal.
    pub fn next(&self, event: LifecycleEvent) -> Option<LifecycleState> {
        use Lifecycle::*;
        use LifecycleEvent as E;
        let (lifecycle, phase) = match (self.lifecycle, self.phase, event) {
            (Init, Phase::None, E::CommitmentRegistered) => (Execution, Phase::AwaitingInspection),
            (Execution, Phase::AwaitingInspection, E::EvidenceSubmitted) => (Evaluation, Phase::AwaitingTenantDecision),
            (Evaluation, Phase::AwaitingTenantDecision, E::Approved) => (Evaluation, Phase::Approved),
            (Evaluation, Phase::AwaitingTenantDecision, E::Disputed) => (Evaluation, Phase::Disputed),
            (Evaluation, Phase::Approved | Phase::Disputed, E::Settled) => (Completed, Phase::None),
            _ => return None,
        };
        Some(LifecycleState { lifecycle, phase })
    }

    /// Applies `event`; on error the state is unchanged.
    pub fn apply(&mut self, event: LifecycleEvent) -> Result<(), FsmError> {
        match self.next(event) {
            Some(s) => {
                *self = s;
                Ok(())
            }
            None => Err(FsmError { from: self.lifecycle, phase: self.phase, event }),
        }
    }

    /// Phase is set only while executing or evaluating.
    pub fn is_consistent(&self) -> bool {
        match self.lifecycle {
            Lifecycle::Execution | Lifecycle::Evaluation => self.phase != Phase::None,
            Lifecycle::Init | Lifecycle::Completed => self.phase == Phase::None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use LifecycleEvent as E;

    #[test]
    fn happy_path() {
        let mut s = LifecycleState::init();
        for ev in [E::CommitmentRegistered, E::EvidenceSubmitted, E::Disputed, E::Settled] {
            s.apply(ev).unwrap();
            assert!(s.is_consistent());
        }
        assert_eq!(s.lifecycle, Lifecycle::Completed);
    }

    #[test]
    fn illegal_event_leaves_state() {
        let mut s = LifecycleState::init();
        let err = s.apply(E::Settled).unwrap_err();
        assert_eq!(err.from, Lifecycle::Init);
        assert_eq!(s, LifecycleState::init());
    }

    #[test]
    fn cannot_settle_before_decision() {
        let mut s = LifecycleState::init();
        s.apply(E::CommitmentRegistered).unwrap();
        s.apply(E::EvidenceSubmitted).unwrap();
        assert!(s.apply(E::Settled).is_err());
        assert!(s.apply(E::CommitmentRegistered).is_err());
    }
}
