//! Instrumented op application: ledger counters, peak-space tracking and
//! optional full recording for audits.

use super::micro::{apply_micro, MicroOp};
use super::state::SimMachineState;
use super::{EngineError, PebbleEvent, SimLedger};
use crate::machine::MachineProgram;

/// Complete record of one engine run, sufficient to audit it offline:
/// the program it interpreted, the initial state, every micro-operation,
/// and the state encoding after each.
#[derive(Debug, Clone)]
pub struct EngineRun {
    pub program: MachineProgram,
    pub initial: SimMachineState,
    pub ops: Vec<MicroOp>,
    /// `states[i]` encodes the state after `ops[i]`.
    pub states: Vec<Vec<u8>>,
    /// Trace annotations: phase and counter after each op, plus the
    /// checkpoint toggle if the op banked or cleared a section.
    pub annotations: Vec<(u8, i64, Option<PebbleEvent>)>,
    pub final_state: SimMachineState,
}

pub struct Engine<'p> {
    pub program: &'p MachineProgram,
    pub state: SimMachineState,
    pub ledger: SimLedger,
    pub counter_bits: u32,
    pub schedule_bits: u32,
    recording: Option<Recording>,
}

struct Recording {
    initial: SimMachineState,
    ops: Vec<MicroOp>,
    states: Vec<Vec<u8>>,
    annotations: Vec<(u8, i64, Option<PebbleEvent>)>,
}

impl<'p> Engine<'p> {
    pub fn new(
        program: &'p MachineProgram,
        state: SimMachineState,
        ledger: SimLedger,
        record: bool,
    ) -> Self {
        let recording = record.then(|| Recording {
            initial: state.clone(),
            ops: Vec::new(),
            states: Vec::new(),
            annotations: Vec::new(),
        });
        let mut engine = Engine {
            program,
            state,
            ledger,
            counter_bits: 1,
            schedule_bits: 0,
            recording,
        };
        engine.note_space();
        engine
    }

    fn note_space(&mut self) {
        let bits = self.state.space_bits(self.counter_bits, self.schedule_bits);
        if bits > self.ledger.peak_space_bits {
            self.ledger.peak_space_bits = bits;
        }
    }

    /// Applies one micro-operation, counting it and recording it.
    pub fn emit(&mut self, op: MicroOp) -> Result<(), EngineError> {
        // A section toggle flips between free and occupied; note which.
        let pebble_event = if let MicroOp::XorSection(id) = op {
            Some(if self.state.store.is_free(id) {
                PebbleEvent::Place(id)
            } else if self.state.sim == self.state.store.section(id) {
                PebbleEvent::Remove(id)
            } else {
                PebbleEvent::Overwrite(id)
            })
        } else {
            None
        };
        apply_micro(&mut self.state, self.program, op)?;
        self.ledger.sim_steps += 1;
        self.ledger.erased_bits += op.erased_bits();
        self.note_space();
        if let Some(rec) = &mut self.recording {
            rec.ops.push(op);
            rec.states.push(self.state.encode());
            rec.annotations
                .push((self.state.phase.code(), self.state.counter, pebble_event));
        }
        Ok(())
    }

    pub fn into_result(self) -> (SimMachineState, SimLedger, Option<EngineRun>) {
        let run = self.recording.map(|rec| EngineRun {
            program: self.program.clone(),
            initial: rec.initial,
            ops: rec.ops,
            states: rec.states,
            annotations: rec.annotations,
            final_state: self.state.clone(),
        });
        (self.state, self.ledger, run)
    }
}
