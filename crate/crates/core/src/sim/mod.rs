//! Reversible simulation engines and their shared plumbing.

mod audit;
mod convert;
mod engine;
mod micro;
mod state;
mod walk;

pub mod engines;

pub use audit::{audit_with_inverses, reversibility_audit, AuditError, AuditReport};
pub use convert::{convert_to_alternating, is_alternating, Conversion};
pub use engine::{Engine, EngineRun};
pub use engines::{
    simulate_bennett73, simulate_hybrid, simulate_lmt, simulate_unknown_t, EpochInfo,
};
pub use micro::{apply_micro, MicroOp};
pub use state::{
    counter_bits, decode_config, encode_config, encoding_width, nominal_control_states,
    schedule_bits, CheckpointStore, Phase, SimMachineState, Slot,
};
pub use walk::{bridge, traversal_budget, traverse_configuration_tree};

use crate::machine::StepError;

/// Default multiplier for the per-bridge traversal cap; the cap is this
/// factor times an upper bound on the size of the configuration space.
/// Overridable per run (the CLI reads REVSIM_TRAVERSE_BUDGET).
pub const DEFAULT_TRAVERSE_FACTOR: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EngineKind {
    #[default]
    Bennett73,
    Lmt,
    Hybrid,
    Auto,
}

impl EngineKind {
    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Bennett73 => "b73",
            EngineKind::Lmt => "lmt",
            EngineKind::Hybrid => "hybrid",
            EngineKind::Auto => "auto",
        }
    }
}

impl std::fmt::Display for EngineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Epoch budget policy for the unknown-time wrapper.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KPolicy {
    /// Always use this many pebbles (clamped to log2 of the budget).
    Fixed(u32),
    /// One-step segments: pebble count grows with the budget.
    Log,
}

#[derive(Debug, Clone)]
pub struct SimOptions {
    /// Budget on the simulated machine's own steps.
    pub max_steps: u64,
    /// Record the full run for auditing.
    pub record: bool,
    /// Traversal cap multiplier, see [`DEFAULT_TRAVERSE_FACTOR`].
    pub traverse_factor: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            max_steps: 1 << 20,
            record: false,
            traverse_factor: DEFAULT_TRAVERSE_FACTOR,
        }
    }
}

/// The reversibly computed pair: the preserved input and the simulated
/// machine's output, both rendered with trailing blanks trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputPair {
    pub input: String,
    pub output: String,
}

/// Resource ledger of one engine run.
#[derive(Debug, Clone, Copy, Default)]
pub struct SimLedger {
    pub engine: EngineKind,
    pub k: u32,
    /// Segment length in simulated steps (checkpointed engines).
    pub m: u64,
    /// Steps of the simulated program as executed by this engine.
    pub t_steps: u64,
    /// Tape cells of the program as executed.
    pub s_cells: u64,
    /// Micro-operations spent (simulation time T').
    pub sim_steps: u64,
    /// Peak bits held across all simulator tapes (simulation space S').
    pub peak_space_bits: u64,
    pub bridge_calls: u64,
    pub erased_bits: u64,
    /// High-water mark of the history register (history engine only).
    pub history_peak: u64,
}

impl SimLedger {
    pub const CSV_HEADER: &'static str =
        "engine,k,m,T,S,T_prime,S_prime,bridges,erased_bits";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.engine,
            self.k,
            self.m,
            self.t_steps,
            self.s_cells,
            self.sim_steps,
            self.peak_space_bits,
            self.bridge_calls,
            self.erased_bits
        )
    }
}

/// Why a pebble-level event was attached to a micro-operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PebbleEvent {
    /// A free section received a checkpoint.
    Place(crate::pebble::PebbleId),
    /// A section was zeroed by the matching checkpoint.
    Remove(crate::pebble::PebbleId),
    /// A section changed to some third value (never produced by the
    /// engines; kept so traces expose it if it ever happens).
    Overwrite(crate::pebble::PebbleId),
}

impl std::fmt::Display for PebbleEvent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PebbleEvent::Place(id) => write!(f, "P{id}"),
            PebbleEvent::Remove(id) => write!(f, "R{id}"),
            PebbleEvent::Overwrite(id) => write!(f, "X{id}"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("program is not deterministic")]
    NotDeterministic,
    #[error("program does not alternate write and move steps")]
    NotAlternating,
    #[error("step budget exhausted after {steps} steps")]
    Timeout { steps: u64 },
    #[error(transparent)]
    Step(#[from] StepError),
    #[error("bridge source section {section} is free")]
    FreeSource { section: crate::pebble::PebbleId },
    #[error("traversal budget of {limit} walk pairs exceeded")]
    TraversalBudget { limit: u64 },
    #[error("{0}")]
    Parameter(String),
    #[error("engine invariant violated: {0}")]
    Internal(String),
}

/// Everything a single engine run produces.
#[derive(Debug, Clone)]
pub struct SimResult {
    pub pair: OutputPair,
    pub ledger: SimLedger,
    /// Simulator state at completion (the pair remains readable from it).
    pub final_state: SimMachineState,
    /// Full recording, present when requested in the options.
    pub run: Option<EngineRun>,
    /// Doubling-wrapper epochs, empty for the fixed-budget engines.
    pub epochs: Vec<EpochInfo>,
}

/// Writes a recorded run as line-delimited trace records:
/// `phase op counter pebble-event`.
pub fn export_trace(run: &EngineRun) -> String {
    let mut out = String::new();
    for (op, (phase, counter, event)) in run.ops.iter().zip(&run.annotations) {
        let phase = PHASE_NAMES[*phase as usize];
        let event = event.map(|e| e.to_string()).unwrap_or_else(|| "-".into());
        out.push_str(&format!("{phase} {} {counter} {event}\n", op.name()));
    }
    out
}

const PHASE_NAMES: [&str; 10] = [
    "idle",
    "compute",
    "copy-output",
    "retrace",
    "bridge-copy",
    "bridge-walk",
    "bridge-bank",
    "bridge-rewind",
    "bridge-clear",
    "done",
];

#[cfg(test)]
mod tests;
