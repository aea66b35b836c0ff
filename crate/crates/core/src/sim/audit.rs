//! Run audits: inverse replay, injectivity witness, erasure count.

use super::engine::EngineRun;
use super::micro::{apply_micro, MicroOp};
use super::EngineError;
use std::collections::HashMap;

#[derive(Debug, Clone)]
pub struct AuditReport {
    pub ops_checked: usize,
    pub states_checked: usize,
    pub erased_bits: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum AuditError {
    /// Applying the registered inverse of `op` did not reproduce the state
    /// recorded before it.
    #[error("inverse replay diverged at op {index} ({op:?})")]
    InverseReplayDiverged { index: usize, op: MicroOp },
    /// The inverse could not even be applied.
    #[error("inverse replay failed at op {index} ({op:?}): {source}")]
    InverseReplayFailed {
        index: usize,
        op: MicroOp,
        source: EngineError,
    },
    /// Two recorded states coincide, so the recorded step relation is not
    /// injective.
    #[error("recorded states {first} and {second} are identical")]
    DuplicateState { first: usize, second: usize },
}

/// Audits a recorded run against the registered inverses:
///
/// 1. applying each operation's inverse in reverse order reproduces every
///    recorded intermediate state and finally the initial state, bit-exactly;
/// 2. all recorded states (the initial one included) are pairwise
///    distinct, witnessing injectivity of the recorded step relation;
/// 3. the erased-bit count equals the sum over operations flagged
///    irreversible — zero for every registered opcode.
pub fn reversibility_audit(run: &EngineRun) -> Result<AuditReport, AuditError> {
    audit_with_inverses(run, MicroOp::inverse)
}

/// Same audit with a caller-supplied inverse registry; used to verify the
/// audit itself catches a misregistered inverse.
pub fn audit_with_inverses(
    run: &EngineRun,
    inverse_of: impl Fn(MicroOp) -> MicroOp,
) -> Result<AuditReport, AuditError> {
    let mut seen: HashMap<Vec<u8>, usize> = HashMap::new();
    seen.insert(run.initial.encode(), 0);
    for (i, encoded) in run.states.iter().enumerate() {
        if let Some(&first) = seen.get(encoded) {
            return Err(AuditError::DuplicateState {
                first,
                second: i + 1,
            });
        }
        seen.insert(encoded.clone(), i + 1);
    }

    let initial_encoded = run.initial.encode();
    let mut state = run.final_state.clone();
    for index in (0..run.ops.len()).rev() {
        let op = run.ops[index];
        apply_micro(&mut state, &run.program, inverse_of(op)).map_err(|source| {
            AuditError::InverseReplayFailed { index, op, source }
        })?;
        let expected = if index == 0 {
            &initial_encoded
        } else {
            &run.states[index - 1]
        };
        if &state.encode() != expected {
            return Err(AuditError::InverseReplayDiverged { index, op });
        }
    }

    Ok(AuditReport {
        ops_checked: run.ops.len(),
        states_checked: run.states.len() + 1,
        erased_bits: run.ops.iter().map(|op| op.erased_bits()).sum(),
    })
}
