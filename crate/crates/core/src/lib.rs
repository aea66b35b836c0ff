//! Reversible execution of irreversible single-tape Turing machines.
//!
//! The crate is organized around four pieces:
//!
//! * [`machine`] — the simulated machine model: quadruple programs over a
//!   bounded marker-delimited tape, determinism/reversibility checks,
//!   forward and backward stepping.
//! * [`pebble`] — the reversible pebble game used to schedule checkpoints:
//!   move legality, replay validation, the recursive checkpointing
//!   strategies and brute-force solvers.
//! * [`sim`] — the reversible simulation engines themselves (history tape,
//!   configuration-tree traversal, hybrid checkpoint/recompute, and the
//!   doubling wrapper for unknown running time), built from micro-operations
//!   with registered inverses so every run can be audited.
//! * [`accounting`] — cost models, calibration, erasure tradeoff tables and
//!   the configuration-counting lower-bound check.

pub mod accounting;
pub mod corpus;
pub mod machine;
pub mod pebble;
pub mod sim;

pub use machine::{
    Action, Configuration, Dir, MachineProgram, Quadruple, StateId, StepOutcome, StepTrace, Symbol,
    Trigger,
};
pub use pebble::{GameLedger, PebbleMove, PebbleState, Strategy};
pub use sim::{EngineKind, OutputPair, SimLedger};
