//! The simulation engines.
//!
//! All engines reversibly compute the pair (input, output) of the
//! simulated machine: the input is preserved verbatim (on the simulation
//! register or in the permanent checkpoint section) and the output is
//! exclusive-or'd into the output register, so the overall step relation
//! stays injective and an inverse replay restores the initial state
//! bit-exactly.

use super::convert::{convert_to_alternating, Conversion};
use super::engine::Engine;
use super::micro::MicroOp;
use super::state::{
    counter_bits, encode_config, encoding_width, CheckpointStore, Phase, SimMachineState,
};
use super::walk::{bridge, traversal_budget};
use super::{EngineError, EngineKind, KPolicy, OutputPair, SimLedger, SimOptions, SimResult};
use crate::machine::{MachineProgram, StepOutcome, Symbol};
use crate::pebble::{bridge_schedule, PebbleId};

/// History-tape simulation: run forward recording each rule id, copy the
/// result into the output register, then retrace backwards erasing the
/// record. Time stays linear in the simulated steps while space grows
/// with them, and the history register peaks at exactly one rule id per
/// simulated step.
pub fn simulate_bennett73(
    program: &MachineProgram,
    input: &str,
    opts: &SimOptions,
) -> Result<SimResult, EngineError> {
    if !program.check_deterministic().ok() {
        return Err(EngineError::NotDeterministic);
    }
    let symbols = program.input_symbols(input).map_err(EngineError::Step)?;
    let init = program
        .initial_configuration(&symbols)
        .map_err(EngineError::Step)?;
    let width = encoding_width(program.space);
    let mut state = SimMachineState::new(width, CheckpointStore::empty());
    encode_config(&init, &mut state.sim);
    let ledger = SimLedger {
        engine: EngineKind::Bennett73,
        s_cells: program.space as u64,
        ..SimLedger::default()
    };
    let mut engine = Engine::new(program, state, ledger, opts.record);

    engine.emit(MicroOp::SetPhase {
        from: Phase::Idle,
        to: Phase::Compute,
    })?;
    let mut steps = 0u64;
    loop {
        let config = engine.state.sim_config().expect("register stays valid");
        match program.step_forward(&config).map_err(EngineError::Step)? {
            StepOutcome::Halted => break,
            StepOutcome::Next(rule, _) => {
                if steps >= opts.max_steps {
                    return Err(EngineError::Timeout { steps });
                }
                engine.emit(MicroOp::HistStep(rule))?;
                steps += 1;
            }
        }
    }
    engine.ledger.t_steps = steps;
    engine.ledger.history_peak = engine.state.history.len() as u64;

    engine.emit(MicroOp::SetPhase {
        from: Phase::Compute,
        to: Phase::CopyOutput,
    })?;
    engine.emit(MicroOp::XorOutput)?;
    engine.emit(MicroOp::SetPhase {
        from: Phase::CopyOutput,
        to: Phase::Retrace,
    })?;
    while let Some(&rule) = engine.state.history.last() {
        engine.emit(MicroOp::HistUnstep(rule))?;
    }
    engine.emit(MicroOp::SetPhase {
        from: Phase::Retrace,
        to: Phase::Done,
    })?;

    let restored = engine.state.sim_config().expect("input restored");
    debug_assert_eq!(restored, init);
    let out = super::state::decode_config(&engine.state.output)
        .ok_or_else(|| EngineError::Internal("output register left free".into()))?;
    let pair = OutputPair {
        input: program.render_tape(&restored.tape),
        output: program.render_tape(&out.tape),
    };
    let (final_state, ledger, run) = engine.into_result();
    Ok(SimResult {
        pair,
        ledger,
        final_state,
        run,
        epochs: Vec::new(),
    })
}

/// Shared driver for the checkpointed engines: runs the recursive bridge
/// schedule for `k` pebbles over segments of `seg` steps against an
/// already-converted program, then banks the final checkpoint into the
/// output register. `t_cap` limits segment boundary times (the walk also
/// stops at the halting configuration on its own).
fn run_schedule(
    engine: &mut Engine,
    k: u32,
    seg: u64,
    t_cap: Option<u64>,
    budget: u64,
    retreat: bool,
) -> Result<(), EngineError> {
    // The schedule reads the same forwards and backwards (each level is
    // sub-schedule, sibling, sub-schedule), so an undo replay issues the
    // same call sequence while the schedule register counts back down.
    for call in bridge_schedule(k) {
        let src_time = call.src_node * seg;
        let dst_time = src_time + seg;
        let distance = match t_cap {
            Some(cap) => dst_time.min(cap).saturating_sub(src_time.min(cap)),
            None => seg,
        };
        bridge(engine, call.src, call.dst, distance, budget, retreat)?;
    }
    Ok(())
}

fn bank_output(engine: &mut Engine, section: PebbleId) -> Result<(), EngineError> {
    engine.emit(MicroOp::XorSim(section))?;
    engine.emit(MicroOp::XorOutput)?;
    engine.emit(MicroOp::XorSim(section))
}

fn render_pair(conv: &Conversion, state: &SimMachineState) -> Result<OutputPair, EngineError> {
    let input_cfg = super::state::decode_config(state.store.section(-1))
        .ok_or_else(|| EngineError::Internal("permanent section corrupted".into()))?;
    let output_cfg = super::state::decode_config(&state.output)
        .ok_or_else(|| EngineError::Internal("output register left free".into()))?;
    Ok(OutputPair {
        input: conv.program.render_tape(&input_cfg.tape[..conv.orig_space]),
        output: conv.program.render_tape(&output_cfg.tape[..conv.orig_space]),
    })
}

fn ceil_log2(n: u64) -> u32 {
    match n {
        0 | 1 => 0,
        n => 64 - (n - 1).leading_zeros(),
    }
}

fn converted_input(
    conv: &Conversion,
    input: &str,
) -> Result<(Vec<Symbol>, crate::machine::Configuration), EngineError> {
    let symbols = conv.program.input_symbols(input).map_err(EngineError::Step)?;
    let init = conv
        .program
        .initial_configuration(&symbols)
        .map_err(EngineError::Step)?;
    Ok((symbols, init))
}

/// Checkpoint/recompute simulation: the recursive pebble schedule over
/// `2^k` segments of the computation, each segment bridged by the
/// configuration-tree walk. Exactly `3^k` bridge calls; on completion
/// every checkpoint section is free except the permanent input section
/// and the output checkpoint.
pub fn simulate_hybrid(
    program: &MachineProgram,
    input: &str,
    k: u32,
    opts: &SimOptions,
) -> Result<SimResult, EngineError> {
    if !program.check_deterministic().ok() {
        return Err(EngineError::NotDeterministic);
    }
    let conv = convert_to_alternating(program);
    let (symbols, init) = converted_input(&conv, input)?;

    // The construction is parameterized by the halting time, so discover
    // it first; the step budget applies to the simulated machine's own
    // steps.
    let conv_budget = opts
        .max_steps
        .saturating_mul(4)
        .saturating_add(4)
        .min(usize::MAX as u64) as usize;
    let trace = conv
        .program
        .run(&symbols, conv_budget)
        .map_err(EngineError::Step)?;
    let t_orig = trace
        .steps
        .iter()
        .filter(|(rule, _)| conv.rule_origin[*rule].is_some())
        .count() as u64;
    if !trace.halted || t_orig > opts.max_steps {
        return Err(EngineError::Timeout { steps: t_orig });
    }
    let t_conv = trace.len() as u64;
    if k > ceil_log2(t_conv.max(1)) {
        return Err(EngineError::Parameter(format!(
            "k = {k} exceeds ceil(log2 T) = {} for T = {t_conv}",
            ceil_log2(t_conv.max(1))
        )));
    }
    let m = if t_conv == 0 {
        0
    } else {
        t_conv.div_ceil(1u64 << k)
    };

    let width = encoding_width(conv.program.space);
    let mut store = CheckpointStore::new(width, k);
    encode_config(&init, store.section_mut(-1));
    let state = SimMachineState::new(width, store);
    let ledger = SimLedger {
        engine: EngineKind::Hybrid,
        k,
        m,
        t_steps: t_conv,
        s_cells: conv.program.space as u64,
        ..SimLedger::default()
    };
    let mut engine = Engine::new(&conv.program, state, ledger, opts.record);
    engine.counter_bits = counter_bits(m);
    engine.schedule_bits = super::state::schedule_bits(k);
    let budget = traversal_budget(&conv.program, opts.traverse_factor);

    run_schedule(&mut engine, k, m, Some(t_conv), budget, false)?;
    bank_output(&mut engine, k as PebbleId)?;
    engine.emit(MicroOp::SetPhase {
        from: Phase::Idle,
        to: Phase::Done,
    })?;

    let pair = render_pair(&conv, &engine.state)?;
    let (final_state, ledger, run) = engine.into_result();
    Ok(SimResult {
        pair,
        ledger,
        final_state,
        run,
        epochs: Vec::new(),
    })
}

/// Space-parsimonious simulation: the `k = 0` boundary case, a single
/// bridge spanning the whole computation.
pub fn simulate_lmt(
    program: &MachineProgram,
    input: &str,
    opts: &SimOptions,
) -> Result<SimResult, EngineError> {
    let mut result = simulate_hybrid(program, input, 0, opts)?;
    result.ledger.engine = EngineKind::Lmt;
    Ok(result)
}

/// One doubling epoch of the unknown-time wrapper.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpochInfo {
    /// Step budget of this epoch.
    pub t_budget: u64,
    pub k: u32,
    pub m: u64,
    /// Micro-operations spent in this epoch (failed epochs include the
    /// undo replay).
    pub sim_steps: u64,
    pub halted: bool,
    /// For failed epochs: whether the undo replay restored the epoch's
    /// initial simulator state bit-exactly.
    pub restored: bool,
}

/// Unknown-time simulation: run the checkpointed simulation with step
/// budgets 2, 4, 8, ... and, whenever the budget proves too small,
/// replay the self-inverse schedule to undo the epoch completely before
/// doubling. No prior knowledge of the halting time is needed; the total
/// cost is dominated by the final, successful epoch.
pub fn simulate_unknown_t(
    program: &MachineProgram,
    input: &str,
    policy: KPolicy,
    opts: &SimOptions,
) -> Result<SimResult, EngineError> {
    if !program.check_deterministic().ok() {
        return Err(EngineError::NotDeterministic);
    }
    let conv = convert_to_alternating(program);
    let (symbols, init) = converted_input(&conv, input)?;
    let width = encoding_width(conv.program.space);
    let budget = traversal_budget(&conv.program, opts.traverse_factor);
    // Budgets count converted steps here; the conversion inflates the
    // original step budget by at most 4x.
    let epoch_cap = opts.max_steps.saturating_mul(4).saturating_add(4);

    let mut epochs = Vec::new();
    let mut total_steps = 0u64;
    let mut t_budget = 2u64;
    loop {
        let k = match policy {
            KPolicy::Fixed(k) => k.min(ceil_log2(t_budget)),
            KPolicy::Log => ceil_log2(t_budget),
        };
        let m = t_budget >> k; // t is a power of two and k <= log2 t
        let mut store = CheckpointStore::new(width, k);
        encode_config(&init, store.section_mut(-1));
        let state = SimMachineState::new(width, store);
        let epoch_initial = state.clone();
        let ledger = SimLedger {
            engine: EngineKind::Auto,
            k,
            m,
            s_cells: conv.program.space as u64,
            ..SimLedger::default()
        };
        let mut engine = Engine::new(&conv.program, state, ledger, opts.record);
        engine.counter_bits = counter_bits(m);
        engine.schedule_bits = super::state::schedule_bits(k);

        run_schedule(&mut engine, k, m, None, budget, false)?;
        let halted = super::state::decode_config(engine.state.store.section(k as PebbleId))
            .map(|c| c.state == conv.program.halt)
            .unwrap_or(false);

        if halted {
            bank_output(&mut engine, k as PebbleId)?;
            engine.emit(MicroOp::SetPhase {
                from: Phase::Idle,
                to: Phase::Done,
            })?;
            let pair = render_pair(&conv, &engine.state)?;
            let (final_state, mut ledger, run) = engine.into_result();
            epochs.push(EpochInfo {
                t_budget,
                k,
                m,
                sim_steps: ledger.sim_steps,
                halted: true,
                restored: true,
            });
            // Bookkeeping: the halting time for the ledger row.
            let trace = conv
                .program
                .run(&symbols, t_budget as usize)
                .map_err(EngineError::Step)?;
            ledger.t_steps = trace.len() as u64;
            ledger.sim_steps += total_steps;
            return Ok(SimResult {
                pair,
                ledger,
                final_state,
                run,
                epochs,
            });
        }

        // Too small: replay the self-inverse schedule to undo the epoch.
        run_schedule(&mut engine, k, m, None, budget, true)?;
        let restored = engine.state == epoch_initial;
        let (_, ledger, _) = engine.into_result();
        total_steps += ledger.sim_steps;
        epochs.push(EpochInfo {
            t_budget,
            k,
            m,
            sim_steps: ledger.sim_steps,
            halted: false,
            restored,
        });
        if !restored {
            return Err(EngineError::Internal(
                "undo replay failed to restore the epoch state".into(),
            ));
        }
        if t_budget >= epoch_cap {
            return Err(EngineError::Timeout { steps: t_budget });
        }
        t_budget *= 2;
    }
}
