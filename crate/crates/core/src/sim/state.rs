//! Simulator state: typed tapes with a fixed-width binary encoding of
//! configurations so that checkpoint sections support exclusive-or
//! writing and "free" is exactly the all-zero pattern.

use crate::machine::{Configuration, MachineProgram, RuleId, StateId, Symbol};
use crate::pebble::PebbleId;

/// Fixed encoding width in bytes for one configuration of a machine with
/// `space` tape cells: a presence byte, 16-bit state and head, then one
/// byte per cell. Valid encodings never equal the all-zero pattern.
pub fn encoding_width(space: usize) -> usize {
    5 + space
}

pub fn encode_config(config: &Configuration, buf: &mut [u8]) {
    buf[0] = 1;
    buf[1..3].copy_from_slice(&config.state.0.to_le_bytes());
    buf[3..5].copy_from_slice(&(config.head as u16).to_le_bytes());
    for (cell, byte) in config.tape.iter().zip(&mut buf[5..]) {
        *byte = cell.0;
    }
}

pub fn decode_config(buf: &[u8]) -> Option<Configuration> {
    if buf[0] != 1 {
        return None;
    }
    let state = StateId(u16::from_le_bytes([buf[1], buf[2]]));
    let head = u16::from_le_bytes([buf[3], buf[4]]) as usize;
    let tape = buf[5..].iter().map(|&b| Symbol(b)).collect();
    Some(Configuration { state, tape, head })
}

pub fn is_zero(buf: &[u8]) -> bool {
    buf.iter().all(|&b| b == 0)
}

pub fn xor_into(dst: &mut [u8], src: &[u8]) {
    debug_assert_eq!(dst.len(), src.len());
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// One reserved tape section per checkpoint pebble. Section `-1` holds the
/// initial configuration permanently; a section is free exactly when its
/// bytes are all zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckpointStore {
    pub width: usize,
    sections: Vec<Vec<u8>>,
}

impl CheckpointStore {
    /// Store with sections for pebbles `-1..=k`.
    pub fn new(width: usize, k: u32) -> Self {
        CheckpointStore {
            width,
            sections: vec![vec![0; width]; k as usize + 2],
        }
    }

    pub fn empty() -> Self {
        CheckpointStore {
            width: 0,
            sections: Vec::new(),
        }
    }

    fn index(&self, id: PebbleId) -> usize {
        let idx = id + 1;
        debug_assert!(idx >= 0 && (idx as usize) < self.sections.len());
        idx as usize
    }

    pub fn section(&self, id: PebbleId) -> &[u8] {
        &self.sections[self.index(id)]
    }

    pub fn section_mut(&mut self, id: PebbleId) -> &mut Vec<u8> {
        let idx = self.index(id);
        &mut self.sections[idx]
    }

    pub fn is_free(&self, id: PebbleId) -> bool {
        is_zero(self.section(id))
    }

    pub fn section_count(&self) -> usize {
        self.sections.len()
    }

    /// Pebble ids of all non-free sections.
    pub fn occupied_ids(&self) -> Vec<PebbleId> {
        (0..self.sections.len())
            .filter(|&i| !is_zero(&self.sections[i]))
            .map(|i| i as PebbleId - 1)
            .collect()
    }

    pub fn total_bytes(&self) -> usize {
        self.width * self.sections.len()
    }
}

/// Which half-edge of the configuration tree the traversal currently
/// stands on: the outgoing edge toward the successor, or the incoming
/// edge labelled by the rule that produced this configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Out,
    In(RuleId),
}

/// Engine phase tag. The engines move through these in a fixed order per
/// run (and per bridge call), recorded so trace exports and audits can
/// locate where an operation happened.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Idle,
    Compute,
    CopyOutput,
    Retrace,
    BridgeCopy,
    BridgeWalk,
    BridgeBank,
    BridgeRewind,
    BridgeClear,
    Done,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Idle => "idle",
            Phase::Compute => "compute",
            Phase::CopyOutput => "copy-output",
            Phase::Retrace => "retrace",
            Phase::BridgeCopy => "bridge-copy",
            Phase::BridgeWalk => "bridge-walk",
            Phase::BridgeBank => "bridge-bank",
            Phase::BridgeRewind => "bridge-rewind",
            Phase::BridgeClear => "bridge-clear",
            Phase::Done => "done",
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Phase::Idle => 0,
            Phase::Compute => 1,
            Phase::CopyOutput => 2,
            Phase::Retrace => 3,
            Phase::BridgeCopy => 4,
            Phase::BridgeWalk => 5,
            Phase::BridgeBank => 6,
            Phase::BridgeRewind => 7,
            Phase::BridgeClear => 8,
            Phase::Done => 9,
        }
    }
}

/// Complete state of a simulation engine: everything an inverse replay
/// must restore bit-exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimMachineState {
    /// Simulation tape register: an encoded configuration, or all zero.
    pub sim: Vec<u8>,
    /// Rule ids recorded by the history-tape engine.
    pub history: Vec<RuleId>,
    pub store: CheckpointStore,
    /// Difference between forward and backward steps walked in the
    /// current bridge. Dips below zero while the traversal explores
    /// configurations behind its starting point.
    pub counter: i64,
    pub slot: Slot,
    /// Output register, exclusive-or written like a section.
    pub output: Vec<u8>,
    pub phase: Phase,
    /// Position in the recursive bridge schedule; stands in for the
    /// reversible recursion stack and keeps otherwise identical bridge
    /// states apart when several checkpoints hold the same configuration.
    pub schedule_pos: u64,
}

impl SimMachineState {
    pub fn new(width: usize, store: CheckpointStore) -> Self {
        SimMachineState {
            sim: vec![0; width],
            history: Vec::new(),
            store,
            counter: 0,
            slot: Slot::Out,
            output: vec![0; width],
            phase: Phase::Idle,
            schedule_pos: 0,
        }
    }

    pub fn sim_config(&self) -> Option<Configuration> {
        decode_config(&self.sim)
    }

    /// Canonical byte encoding of the whole state, used for the pairwise
    /// distinctness checks of audits and the counting lower bound.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(
            self.sim.len() + self.output.len() + self.store.total_bytes() + 8 * self.history.len() + 24,
        );
        out.extend_from_slice(&self.schedule_pos.to_le_bytes());
        out.extend_from_slice(&self.counter.to_le_bytes());
        out.push(match self.slot {
            Slot::Out => 0,
            Slot::In(_) => 1,
        });
        if let Slot::In(r) = self.slot {
            out.extend_from_slice(&(r as u32).to_le_bytes());
        }
        out.push(self.phase.code());
        out.extend_from_slice(&self.sim);
        out.extend_from_slice(&self.output);
        for id in 0..self.store.section_count() {
            out.extend_from_slice(self.store.section(id as PebbleId - 1));
        }
        out.extend_from_slice(&(self.history.len() as u64).to_le_bytes());
        for r in &self.history {
            out.extend_from_slice(&(*r as u32).to_le_bytes());
        }
        out
    }

    /// Occupied storage in bits across all simulator tapes: the simulation
    /// register, the history tape (one rule id per recorded step), every
    /// checkpoint section, the output register, the step counter and the
    /// schedule register (the recursion stack's worth of bits).
    pub fn space_bits(&self, counter_bits: u32, schedule_bits: u32) -> u64 {
        let rule_bits = 16;
        (self.sim.len() as u64) * 8
            + (self.history.len() as u64) * rule_bits
            + (self.store.total_bytes() as u64) * 8
            + (self.output.len() as u64) * 8
            + u64::from(counter_bits)
            + u64::from(schedule_bits)
    }
}

/// Bit width of the schedule register for a `k`-pebble run: it counts up
/// to `3^k` bridge calls.
pub fn schedule_bits(k: u32) -> u32 {
    let calls = 3u64.saturating_pow(k);
    64 - calls.leading_zeros() + 1
}

/// Bit width needed for a counter that must reach `m`, plus a sign bit
/// for the below-start excursions of the traversal.
pub fn counter_bits(m: u64) -> u32 {
    64 - (m.max(1)).leading_zeros() + 1
}

/// Nominal control-state count of the simulator, used by the counting
/// lower bound: a phase tag combined with a half-edge slot (one per rule,
/// plus the outgoing slot).
pub fn nominal_control_states(program: &MachineProgram) -> u64 {
    10 * (program.rules.len() as u64 + 2)
}
