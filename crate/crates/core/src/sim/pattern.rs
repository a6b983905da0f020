//! The transaction-pattern state machine every transaction instance follows:
//! request/promise/execute/state/accept with decline, quit, reject and stop
//! branches.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::ontology::StepKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum TransactionState {
    Initial,
    Requested,
    Promised,
    Declined,
    Quit,
    Executed,
    Stated,
    Accepted,
    Rejected,
    Stopped,
}

impl TransactionState {
    /// Accepted, Quit and Stopped end an instance.
    pub fn is_terminal(&self) -> bool {
        matches!(
            self,
            TransactionState::Accepted | TransactionState::Quit | TransactionState::Stopped
        )
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TransactionState::Initial => "Initial",
            TransactionState::Requested => "Requested",
            TransactionState::Promised => "Promised",
            TransactionState::Declined => "Declined",
            TransactionState::Quit => "Quit",
            TransactionState::Executed => "Executed",
            TransactionState::Stated => "Stated",
            TransactionState::Accepted => "Accepted",
            TransactionState::Rejected => "Rejected",
            TransactionState::Stopped => "Stopped",
        }
    }
}

impl fmt::Display for TransactionState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A step that is not admissible in the given state.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("step {step} is not valid in state {state}")]
pub struct InvalidTransition {
    pub state: TransactionState,
    pub step: StepKind,
}

/// The happy path: the unique five-step accepting trace.
pub const HAPPY_PATH: [StepKind; 5] = [
    StepKind::Rq,
    StepKind::Pm,
    StepKind::Ex,
    StepKind::St,
    StepKind::Ac,
];

/// Advances the pattern by one step, or reports the invalid transition.
pub fn pattern_next(
    state: TransactionState,
    step: StepKind,
) -> Result<TransactionState, InvalidTransition> {
    use StepKind::*;
    use TransactionState::*;
    match (state, step) {
        (Initial, Rq) => Ok(Requested),
        (Requested, Pm) => Ok(Promised),
        (Requested, Dc) => Ok(Declined),
        (Declined, Qt) => Ok(Quit),
        (Declined, Rq) => Ok(Requested), // renegotiate
        (Promised, Ex) => Ok(Executed),
        (Executed, St) => Ok(Stated),
        (Stated, Ac) => Ok(Accepted),
        (Stated, Rj) => Ok(Rejected),
        (Rejected, St) => Ok(Stated), // restate
        (Rejected, Sp) => Ok(Stopped),
        _ => Err(InvalidTransition { state, step }),
    }
}

/// True when folding [`pattern_next`] from `Initial` over the whole
/// sequence never hits an invalid transition. The empty trace is valid.
pub fn trace_valid(steps: &[StepKind]) -> bool {
    let mut state = TransactionState::Initial;
    for step in steps {
        match pattern_next(state, *step) {
            Ok(next) => state = next,
            Err(_) => return false,
        }
    }
    true
}
