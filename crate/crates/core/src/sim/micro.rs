//! Micro-operations: the primitive state transformations engines are
//! built from. Every opcode has a registered inverse opcode such that
//! applying the inverse after the operation restores the state exactly;
//! the audit machinery replays inverses through the same interpreter.

use super::state::{xor_into, Phase, SimMachineState, Slot};
use super::EngineError;
use crate::machine::{Action, MachineProgram, RuleId, StepError, Trigger};
use crate::pebble::PebbleId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MicroOp {
    /// One traversal step, the swap permutation followed by the rotation
    /// permutation: cross the `cross` half-edge — forward along the step
    /// direction when it is the outgoing slot, backward otherwise —
    /// arriving on `arrive`, then rotate to `land`. The counter moves with
    /// the crossing direction.
    WalkStep { cross: Slot, arrive: Slot, land: Slot },
    /// The reverse traversal step, anti-rotation followed by the swap:
    /// rotate from `land` back to `arrive`, then cross back onto `cross`.
    WalkBack { cross: Slot, arrive: Slot, land: Slot },
    /// History-tape step: apply rule `r` and push its id.
    HistStep(RuleId),
    /// History-tape retrace: pop rule id `r` and apply its pre-image.
    HistUnstep(RuleId),
    /// `sim ^= store[section]`.
    XorSim(PebbleId),
    /// `store[section] ^= sim`.
    XorSection(PebbleId),
    /// `output ^= sim`.
    XorOutput,
    SetPhase { from: Phase, to: Phase },
    /// `schedule_pos += 1`: the next bridge call begins.
    ScheduleAdvance,
    /// `schedule_pos -= 1`: a bridge call of an undo replay begins.
    ScheduleRetreat,
}

impl MicroOp {
    /// The opcode undoing this one.
    pub fn inverse(self) -> MicroOp {
        match self {
            MicroOp::WalkStep { cross, arrive, land } => MicroOp::WalkBack { cross, arrive, land },
            MicroOp::WalkBack { cross, arrive, land } => MicroOp::WalkStep { cross, arrive, land },
            MicroOp::HistStep(r) => MicroOp::HistUnstep(r),
            MicroOp::HistUnstep(r) => MicroOp::HistStep(r),
            op @ (MicroOp::XorSim(_) | MicroOp::XorSection(_) | MicroOp::XorOutput) => op,
            MicroOp::SetPhase { from, to } => MicroOp::SetPhase { from: to, to: from },
            MicroOp::ScheduleAdvance => MicroOp::ScheduleRetreat,
            MicroOp::ScheduleRetreat => MicroOp::ScheduleAdvance,
        }
    }

    /// Bits irreversibly destroyed by this operation. Every registered
    /// opcode is information preserving, so engines built from them erase
    /// nothing; the hook exists for the erasure ledger.
    pub fn erased_bits(self) -> u64 {
        0
    }

    pub fn name(self) -> &'static str {
        match self {
            MicroOp::WalkStep { .. } => "walk-step",
            MicroOp::WalkBack { .. } => "walk-back",
            MicroOp::HistStep(_) => "hist-step",
            MicroOp::HistUnstep(_) => "hist-unstep",
            MicroOp::XorSim(_) => "xor-sim",
            MicroOp::XorSection(_) => "xor-section",
            MicroOp::XorOutput => "xor-output",
            MicroOp::SetPhase { .. } => "set-phase",
            MicroOp::ScheduleAdvance => "sched-adv",
            MicroOp::ScheduleRetreat => "sched-ret",
        }
    }
}

/// Applies rule `r` to a decoded simulation register in place.
fn apply_rule(
    state: &mut SimMachineState,
    program: &MachineProgram,
    r: RuleId,
) -> Result<(), EngineError> {
    let mut config = state
        .sim_config()
        .ok_or_else(|| EngineError::Internal("rule applied to a free simulation register".into()))?;
    let rule = program
        .rules
        .get(r)
        .ok_or_else(|| EngineError::Internal(format!("rule id {r} out of range")))?;
    if rule.from != config.state {
        return Err(EngineError::Internal(format!(
            "rule {r} does not fire from state {}",
            config.state.0
        )));
    }
    match (rule.trigger, rule.action) {
        (Trigger::Scan(a), Action::Write(b)) => {
            if config.scanned() != a {
                return Err(EngineError::Internal(format!("rule {r} trigger mismatch")));
            }
            config.tape[config.head] = b;
        }
        (Trigger::Any, Action::Move(d)) => {
            let pos = config.head as isize + d.delta();
            if pos < 0 || pos as usize >= config.tape.len() {
                return Err(EngineError::Step(StepError::MarkerViolation {
                    side: if pos < 0 { "left" } else { "right" },
                    head: config.head,
                    space: config.tape.len(),
                }));
            }
            config.head = pos as usize;
        }
        _ => return Err(EngineError::Internal(format!("rule {r} is malformed"))),
    }
    config.state = rule.to;
    super::state::encode_config(&config, &mut state.sim);
    Ok(())
}

/// Applies the unique pre-image of rule `r` to the simulation register.
fn unapply_rule(
    state: &mut SimMachineState,
    program: &MachineProgram,
    r: RuleId,
) -> Result<(), EngineError> {
    let mut config = state
        .sim_config()
        .ok_or_else(|| EngineError::Internal("rule unapplied on a free simulation register".into()))?;
    let rule = program
        .rules
        .get(r)
        .ok_or_else(|| EngineError::Internal(format!("rule id {r} out of range")))?;
    if rule.to != config.state {
        return Err(EngineError::Internal(format!(
            "rule {r} did not produce state {}",
            config.state.0
        )));
    }
    match (rule.trigger, rule.action) {
        (Trigger::Scan(a), Action::Write(b)) => {
            if config.scanned() != b {
                return Err(EngineError::Internal(format!(
                    "rule {r} did not write the scanned symbol"
                )));
            }
            config.tape[config.head] = a;
        }
        (Trigger::Any, Action::Move(d)) => {
            let pos = config.head as isize - d.delta();
            if pos < 0 || pos as usize >= config.tape.len() {
                return Err(EngineError::Step(StepError::MarkerViolation {
                    side: if pos < 0 { "left" } else { "right" },
                    head: config.head,
                    space: config.tape.len(),
                }));
            }
            config.head = pos as usize;
        }
        _ => return Err(EngineError::Internal(format!("rule {r} is malformed"))),
    }
    config.state = rule.from;
    super::state::encode_config(&config, &mut state.sim);
    Ok(())
}

/// Performs the swap half of a walk step: cross from slot `cross`,
/// arriving on `arrive`.
fn swap(
    state: &mut SimMachineState,
    program: &MachineProgram,
    cross: Slot,
    arrive: Slot,
) -> Result<(), EngineError> {
    match (cross, arrive) {
        (Slot::Out, Slot::In(r)) => {
            apply_rule(state, program, r)?;
            state.counter += 1;
        }
        (Slot::In(r), Slot::Out) => {
            unapply_rule(state, program, r)?;
            state.counter -= 1;
        }
        _ => {
            return Err(EngineError::Internal(format!(
                "swap across {cross:?} cannot arrive on {arrive:?}"
            )))
        }
    }
    Ok(())
}

/// The single interpreter for micro-operations; engines and audits both
/// go through here.
pub fn apply_micro(
    state: &mut SimMachineState,
    program: &MachineProgram,
    op: MicroOp,
) -> Result<(), EngineError> {
    match op {
        MicroOp::WalkStep { cross, arrive, land } => {
            if state.slot != cross {
                return Err(EngineError::Internal(format!(
                    "walk step crossing {cross:?} but standing on {:?}",
                    state.slot
                )));
            }
            swap(state, program, cross, arrive)?;
            state.slot = land;
        }
        MicroOp::WalkBack { cross, arrive, land } => {
            if state.slot != land {
                return Err(EngineError::Internal(format!(
                    "walk back from {land:?} but standing on {:?}",
                    state.slot
                )));
            }
            // Anti-rotate to the arrival slot, then cross back: the swap
            // inverse exchanges the roles of `cross` and `arrive`.
            swap(state, program, arrive, cross)?;
            state.slot = cross;
        }
        MicroOp::HistStep(r) => {
            apply_rule(state, program, r)?;
            state.history.push(r);
        }
        MicroOp::HistUnstep(r) => {
            match state.history.pop() {
                Some(top) if top == r => {}
                other => {
                    return Err(EngineError::Internal(format!(
                        "history top {other:?} does not match unstep of rule {r}"
                    )))
                }
            }
            unapply_rule(state, program, r)?;
        }
        MicroOp::XorSim(section) => {
            let bytes = state.store.section(section).to_vec();
            xor_into(&mut state.sim, &bytes);
        }
        MicroOp::XorSection(section) => {
            let sim = state.sim.clone();
            xor_into(state.store.section_mut(section), &sim);
        }
        MicroOp::XorOutput => {
            let sim = state.sim.clone();
            xor_into(&mut state.output, &sim);
        }
        MicroOp::SetPhase { from, to } => {
            if state.phase != from {
                return Err(EngineError::Internal(format!(
                    "phase is {:?}, transition expected {:?}",
                    state.phase, from
                )));
            }
            state.phase = to;
        }
        MicroOp::ScheduleAdvance => {
            state.schedule_pos += 1;
        }
        MicroOp::ScheduleRetreat => {
            state.schedule_pos = state.schedule_pos.checked_sub(1).ok_or_else(|| {
                EngineError::Internal("schedule register underflow".into())
            })?;
        }
    }
    Ok(())
}
