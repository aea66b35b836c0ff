//! Reversible traversal of the configuration tree, and the bridge
//! procedure built on it.
//!
//! The tree has machine configurations as nodes and an edge between a
//! configuration and its unique successor. Each edge consists of two
//! half-edges; the walk alternates a swap permutation (cross the edge the
//! current half-edge belongs to) with a rotation permutation (advance to
//! the next half-edge around the configuration just reached, incoming
//! half-edges in canonical rule order followed by the outgoing one).
//! Crossing an edge along the step direction increments a counter,
//! crossing it against decrements, so the counter always equals the
//! current configuration's forward distance from the start, and the first
//! time it reaches `m` the walk stands on the configuration exactly `m`
//! steps ahead. Rewinding applies the inverse permutations in the
//! opposite order until the counter is back to zero on the start
//! configuration.
//!
//! A walk that reaches the halting configuration before covering the
//! requested distance stops there: the halting configuration has no
//! outgoing edge, and the bank/rewind logic is oblivious to which of the
//! two conditions ended the outward walk.

use super::engine::Engine;
use super::micro::MicroOp;
use super::state::{decode_config, encode_config, is_zero, Phase, Slot};
use super::EngineError;
use crate::machine::{Configuration, MachineProgram, StepOutcome};
use crate::pebble::PebbleId;

/// Hard cap on swap/rotate pairs per bridge: `factor` times the number of
/// configurations the connected component can possibly contain, times the
/// space for the per-node half-edge fan-out.
pub fn traversal_budget(program: &MachineProgram, factor: u64) -> u64 {
    let configs = (program.alphabet.len() as u64)
        .checked_pow(program.space as u32)
        .and_then(|t| t.checked_mul(program.state_names.len() as u64))
        .and_then(|t| t.checked_mul(program.space as u64))
        .unwrap_or(u64::MAX);
    configs.saturating_mul(factor)
}

/// The cyclic order of half-edge slots around a configuration.
fn slot_cycle(program: &MachineProgram, config: &Configuration) -> Vec<Slot> {
    let mut slots: Vec<Slot> = program
        .predecessors(config)
        .into_iter()
        .map(|(rule, _)| Slot::In(rule))
        .collect();
    if matches!(program.step_forward(config), Ok(StepOutcome::Next(..))) {
        slots.push(Slot::Out);
    }
    slots
}

fn cycle_position(cycle: &[Slot], slot: Slot) -> Result<usize, EngineError> {
    cycle
        .iter()
        .position(|&s| s == slot)
        .ok_or_else(|| EngineError::Internal(format!("slot {slot:?} not on this configuration")))
}

/// The arrival slot for crossing `cross` from `config`, and the
/// configuration on the other side.
fn crossing(
    program: &MachineProgram,
    config: &Configuration,
    cross: Slot,
) -> Result<(Slot, Configuration), EngineError> {
    match cross {
        Slot::Out => match program.step_forward(config) {
            Ok(StepOutcome::Next(rule, next)) => Ok((Slot::In(rule), next)),
            Ok(StepOutcome::Halted) => Err(EngineError::Internal(
                "walk asked to advance past the halting configuration".into(),
            )),
            Err(e) => Err(EngineError::Step(e)),
        },
        Slot::In(rule) => {
            let preds = program.predecessors(config);
            preds
                .into_iter()
                .find(|(r, _)| *r == rule)
                .map(|(_, prev)| (Slot::Out, prev))
                .ok_or_else(|| {
                    EngineError::Internal(format!("no predecessor through rule {rule}"))
                })
        }
    }
}

/// One outward walk step: cross the current half-edge, then rotate at the
/// configuration just reached (one fused micro-operation).
fn pair_forward(engine: &mut Engine) -> Result<(), EngineError> {
    let config = engine
        .state
        .sim_config()
        .ok_or_else(|| EngineError::Internal("walk on a free simulation register".into()))?;
    let cross = engine.state.slot;
    let (arrive, landed) = crossing(engine.program, &config, cross)?;
    let cycle = slot_cycle(engine.program, &landed);
    let here = cycle_position(&cycle, arrive)?;
    let land = cycle[(here + 1) % cycle.len()];
    engine.emit(MicroOp::WalkStep {
        cross,
        arrive,
        land,
    })
}

/// One rewind step: rotate back at the current configuration, then cross
/// the half-edge rotated onto (the fused inverse micro-operation).
fn pair_backward(engine: &mut Engine) -> Result<(), EngineError> {
    let config = engine
        .state
        .sim_config()
        .ok_or_else(|| EngineError::Internal("walk on a free simulation register".into()))?;
    let cycle = slot_cycle(engine.program, &config);
    let here = cycle_position(&cycle, engine.state.slot)?;
    let arrive = cycle[(here + cycle.len() - 1) % cycle.len()];
    let land = engine.state.slot;
    let (cross, _) = crossing(engine.program, &config, arrive)?;
    engine.emit(MicroOp::WalkBack {
        cross,
        arrive,
        land,
    })
}

fn at_halt(engine: &Engine) -> bool {
    engine
        .state
        .sim_config()
        .map(|c| c.state == engine.program.halt)
        .unwrap_or(false)
}

/// Walks outward until the counter reaches `distance` or the halting
/// configuration is met, whichever first. Returns the distance covered.
fn walk_out(engine: &mut Engine, distance: u64, budget: u64) -> Result<u64, EngineError> {
    let mut pairs = 0u64;
    while engine.state.counter < distance as i64 && !at_halt(engine) {
        if pairs >= budget {
            return Err(EngineError::TraversalBudget { limit: budget });
        }
        pair_forward(engine)?;
        pairs += 1;
    }
    Ok(engine.state.counter as u64)
}

/// Rewinds until the walk stands on the start configuration again with a
/// zero counter.
fn walk_back(engine: &mut Engine, start_bytes: &[u8], budget: u64) -> Result<(), EngineError> {
    let mut pairs = 0u64;
    while !(engine.state.counter == 0 && engine.state.sim == start_bytes) {
        if pairs >= budget {
            return Err(EngineError::TraversalBudget { limit: budget });
        }
        pair_backward(engine)?;
        pairs += 1;
    }
    Ok(())
}

/// The bridge procedure: read the configuration checkpointed in section
/// `src`, walk `distance` steps ahead of it, exclusive-or the reached
/// configuration into section `dst`, rewind, and clear the simulation
/// register again. Self-inverse: a second call with the same arguments
/// restores the store.
pub fn bridge(
    engine: &mut Engine,
    src: PebbleId,
    dst: PebbleId,
    distance: u64,
    budget: u64,
    retreat: bool,
) -> Result<(), EngineError> {
    if engine.state.store.is_free(src) {
        return Err(EngineError::FreeSource { section: src });
    }
    debug_assert!(engine.state.slot == Slot::Out && engine.state.counter == 0);
    debug_assert!(is_zero(&engine.state.sim));

    engine.emit(if retreat {
        MicroOp::ScheduleRetreat
    } else {
        MicroOp::ScheduleAdvance
    })?;
    engine.emit(MicroOp::SetPhase {
        from: Phase::Idle,
        to: Phase::BridgeCopy,
    })?;
    engine.emit(MicroOp::XorSim(src))?;
    let start_bytes = engine.state.sim.clone();

    engine.emit(MicroOp::SetPhase {
        from: Phase::BridgeCopy,
        to: Phase::BridgeWalk,
    })?;
    let covered = walk_out(engine, distance, budget)?;

    engine.emit(MicroOp::SetPhase {
        from: Phase::BridgeWalk,
        to: Phase::BridgeBank,
    })?;
    engine.emit(MicroOp::XorSection(dst))?;

    engine.emit(MicroOp::SetPhase {
        from: Phase::BridgeBank,
        to: Phase::BridgeRewind,
    })?;
    if covered > 0 {
        walk_back(engine, &start_bytes, budget)?;
    }

    engine.emit(MicroOp::SetPhase {
        from: Phase::BridgeRewind,
        to: Phase::BridgeClear,
    })?;
    engine.emit(MicroOp::XorSim(src))?;
    engine.emit(MicroOp::SetPhase {
        from: Phase::BridgeClear,
        to: Phase::Idle,
    })?;
    engine.ledger.bridge_calls += 1;
    Ok(())
}

/// Stand-alone traversal: the configuration `distance` forward steps from
/// `start` (or the halting configuration, if it comes first), computed by
/// the swap-and-rotate walk rather than by iterated stepping.
pub fn traverse_configuration_tree(
    start: &Configuration,
    distance: u64,
    program: &MachineProgram,
    budget_factor: u64,
) -> Result<Configuration, EngineError> {
    if !super::convert::is_alternating(program) {
        return Err(EngineError::NotAlternating);
    }
    let width = super::state::encoding_width(program.space);
    let mut state = super::state::SimMachineState::new(width, super::state::CheckpointStore::empty());
    encode_config(start, &mut state.sim);
    let mut engine = Engine::new(program, state, super::SimLedger::default(), false);
    let budget = traversal_budget(program, budget_factor);
    walk_out(&mut engine, distance, budget)?;
    decode_config(&engine.state.sim)
        .ok_or_else(|| EngineError::Internal("walk left the register free".into()))
}
