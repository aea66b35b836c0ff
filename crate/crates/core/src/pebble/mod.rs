//! The reversible pebble game on a linear list of nodes `1..=board`.
//!
//! Node 0 is permanently pebbled by a fixed extra pebble. A free pebble may
//! be placed on node `i` only if node `i-1` carries a pebble, and a pebble
//! may be removed from node `i` only under the same condition. The erasure
//! variant additionally allows removing a pebble from any node `i > 1`
//! without support, spending one unit of a fixed erasure budget; each such
//! erasure models the irreversible loss of a full checkpoint.
//!
//! Placing a pebble corresponds to writing a checkpoint of a simulated
//! computation and removing it to reversibly cancelling that checkpoint,
//! so pebble budgets translate into simulation space and erasures into
//! irreversibly erased bits.

mod solve;
mod strategy;

pub use solve::{is_realizable, is_strongly_solvable, is_weakly_solvable};
pub use strategy::{bennett_strategy, bridge_schedule, chain_out, erasure_strategy, BridgeCall};

use std::collections::BTreeSet;
use std::fmt;

/// Identifier of a checkpoint pebble in the recursive schedule: `-1` is the
/// permanent pebble on node 0, `0..=k` are the working pebbles.
pub type PebbleId = i32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PebbleMove {
    /// Put a free pebble on node `i` (requires node `i-1` pebbled).
    Place(u64),
    /// Lift the pebble from node `i` back into the pool (requires node
    /// `i-1` pebbled).
    Remove(u64),
    /// Lift the pebble from node `i > 1` without support, spending one
    /// erasure.
    Erase(u64),
}

impl PebbleMove {
    pub fn node(&self) -> u64 {
        match *self {
            PebbleMove::Place(i) | PebbleMove::Remove(i) | PebbleMove::Erase(i) => i,
        }
    }

    /// The move undoing this one. Erasures cannot be undone within the
    /// rules of the game.
    pub fn inverse(&self) -> Option<PebbleMove> {
        match *self {
            PebbleMove::Place(i) => Some(PebbleMove::Remove(i)),
            PebbleMove::Remove(i) => Some(PebbleMove::Place(i)),
            PebbleMove::Erase(_) => None,
        }
    }
}

impl fmt::Display for PebbleMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PebbleMove::Place(i) => write!(f, "P {i}"),
            PebbleMove::Remove(i) => write!(f, "R {i}"),
            PebbleMove::Erase(i) => write!(f, "E {i}"),
        }
    }
}

/// A position of the game: which of `1..=board` carry pebbles, out of a
/// pool of `total` pebbles. Node 0 is implicitly always pebbled and never
/// a member of `occupied`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PebbleState {
    pub board: u64,
    pub total: u32,
    pub occupied: BTreeSet<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MoveError {
    #[error("node {0} outside the board")]
    NodeOutOfRange(u64),
    #[error("node {0} has no pebbled predecessor")]
    PredecessorUnpebbled(u64),
    #[error("node {0} already occupied")]
    AlreadyOccupied(u64),
    #[error("node {0} not occupied")]
    NotOccupied(u64),
    #[error("no free pebble left (budget {0})")]
    NoFreePebble(u32),
    #[error("erasure budget exhausted")]
    EraseBudgetExhausted,
    #[error("node 1 may not be erased; removing it is always legal")]
    EraseNodeOne,
}

/// Replay failure: which move broke which rule.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("illegal move at index {index} ({mv}): {reason}")]
pub struct IllegalMove {
    pub index: usize,
    pub mv: PebbleMove,
    pub reason: MoveError,
}

/// State-space guard for the exhaustive searches.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("search guard exceeded: {0}")]
pub struct ResourceLimit(pub String);

impl PebbleState {
    pub fn empty(board: u64, total: u32) -> Self {
        PebbleState {
            board,
            total,
            occupied: BTreeSet::new(),
        }
    }

    pub fn placed(&self) -> u32 {
        self.occupied.len() as u32
    }

    pub fn free(&self) -> u32 {
        self.total - self.placed()
    }

    /// Node 0 counts as pebbled.
    pub fn pebbled(&self, node: u64) -> bool {
        node == 0 || self.occupied.contains(&node)
    }

    fn check(&self, mv: PebbleMove, erasures_left: u32) -> Result<(), MoveError> {
        let node = mv.node();
        if node == 0 || node > self.board {
            return Err(MoveError::NodeOutOfRange(node));
        }
        match mv {
            PebbleMove::Place(i) => {
                if !self.pebbled(i - 1) {
                    Err(MoveError::PredecessorUnpebbled(i))
                } else if self.occupied.contains(&i) {
                    Err(MoveError::AlreadyOccupied(i))
                } else if self.free() == 0 {
                    Err(MoveError::NoFreePebble(self.total))
                } else {
                    Ok(())
                }
            }
            PebbleMove::Remove(i) => {
                if !self.pebbled(i - 1) {
                    Err(MoveError::PredecessorUnpebbled(i))
                } else if !self.occupied.contains(&i) {
                    Err(MoveError::NotOccupied(i))
                } else {
                    Ok(())
                }
            }
            PebbleMove::Erase(i) => {
                if i == 1 {
                    Err(MoveError::EraseNodeOne)
                } else if !self.occupied.contains(&i) {
                    Err(MoveError::NotOccupied(i))
                } else if erasures_left == 0 {
                    Err(MoveError::EraseBudgetExhausted)
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Applies a move after checking its precondition.
    pub fn apply(&mut self, mv: PebbleMove, erasures_left: u32) -> Result<(), MoveError> {
        self.check(mv, erasures_left)?;
        match mv {
            PebbleMove::Place(i) => {
                self.occupied.insert(i);
            }
            PebbleMove::Remove(i) | PebbleMove::Erase(i) => {
                self.occupied.remove(&i);
            }
        }
        Ok(())
    }

    /// Exactly the moves permitted from this position, ordered Place <
    /// Remove < Erase and by node within each kind.
    pub fn legal_moves(&self, erasures_left: u32) -> Vec<PebbleMove> {
        let mut moves = Vec::new();
        for i in 1..=self.board {
            if self.check(PebbleMove::Place(i), erasures_left).is_ok() {
                moves.push(PebbleMove::Place(i));
            }
        }
        for i in 1..=self.board {
            if self.check(PebbleMove::Remove(i), erasures_left).is_ok() {
                moves.push(PebbleMove::Remove(i));
            }
        }
        for i in 1..=self.board {
            if self.check(PebbleMove::Erase(i), erasures_left).is_ok() {
                moves.push(PebbleMove::Erase(i));
            }
        }
        moves
    }
}

/// Counters collected while replaying a strategy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GameLedger {
    pub moves_used: u64,
    /// Peak number of pebbles on the board, the permanent node-0 pebble
    /// excluded.
    pub peak_pebbles: u32,
    pub erasures_used: u32,
    pub max_node_pebbled: u64,
}

impl GameLedger {
    /// Peak count with the permanent node-0 pebble included.
    pub fn peak_pebbles_with_base(&self) -> u32 {
        self.peak_pebbles + 1
    }
}

/// A recorded move sequence together with its declared budgets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    pub moves: Vec<PebbleMove>,
    /// Declared pebble budget n.
    pub pebbles: u32,
    /// Declared erasure budget E.
    pub erasures: u32,
    /// Board length the strategy plays on.
    pub board: u64,
}

impl Strategy {
    /// The strategy undoing this one: moves reversed with Place and Remove
    /// exchanged. Only defined for erasure-free strategies.
    pub fn inverse(&self) -> Option<Strategy> {
        let moves = self
            .moves
            .iter()
            .rev()
            .map(|m| m.inverse())
            .collect::<Option<Vec<_>>>()?;
        Some(Strategy {
            moves,
            ..self.clone()
        })
    }

    /// Serializes to the line format: budget headers, then one move per
    /// line as `P <i>`, `R <i>` or `E <i>`.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "pebbles {}\nerasures {}\nboard {}\n",
            self.pebbles, self.erasures, self.board
        );
        for mv in &self.moves {
            out.push_str(&mv.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Strategy, String> {
        let mut pebbles = None;
        let mut erasures = None;
        let mut board = None;
        let mut moves = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let head = it.next().unwrap();
            let arg = it.next().ok_or_else(|| format!("line {}: missing value", idx + 1))?;
            if it.next().is_some() {
                return Err(format!("line {}: trailing tokens", idx + 1));
            }
            let parse_u64 =
                |s: &str| s.parse::<u64>().map_err(|_| format!("line {}: bad number `{s}`", idx + 1));
            match head {
                "pebbles" => pebbles = Some(parse_u64(arg)? as u32),
                "erasures" => erasures = Some(parse_u64(arg)? as u32),
                "board" => board = Some(parse_u64(arg)?),
                "P" => moves.push(PebbleMove::Place(parse_u64(arg)?)),
                "R" => moves.push(PebbleMove::Remove(parse_u64(arg)?)),
                "E" => moves.push(PebbleMove::Erase(parse_u64(arg)?)),
                other => return Err(format!("line {}: unknown token `{other}`", idx + 1)),
            }
        }
        Ok(Strategy {
            moves,
            pebbles: pebbles.ok_or("missing `pebbles` header")?,
            erasures: erasures.ok_or("missing `erasures` header")?,
            board: board.ok_or("missing `board` header")?,
        })
    }
}

/// Replays a strategy from the empty position, enforcing every rule and
/// both declared budgets, and returns the collected ledger. Fails on the
/// first illegal move.
pub fn validate_strategy(strategy: &Strategy, board_length: u64) -> Result<GameLedger, IllegalMove> {
    let mut state = PebbleState::empty(board_length, strategy.pebbles);
    let mut ledger = GameLedger::default();
    for (index, &mv) in strategy.moves.iter().enumerate() {
        let erasures_left = strategy.erasures - ledger.erasures_used;
        state.apply(mv, erasures_left).map_err(|reason| IllegalMove {
            index,
            mv,
            reason,
        })?;
        ledger.moves_used += 1;
        if matches!(mv, PebbleMove::Erase(_)) {
            ledger.erasures_used += 1;
        }
        if matches!(mv, PebbleMove::Place(_)) {
            ledger.max_node_pebbled = ledger.max_node_pebbled.max(mv.node());
        }
        ledger.peak_pebbles = ledger.peak_pebbles.max(state.placed());
    }
    Ok(ledger)
}

/// Replays a strategy and returns the final position as well.
pub fn replay(strategy: &Strategy, board_length: u64) -> Result<(PebbleState, GameLedger), IllegalMove> {
    let mut state = PebbleState::empty(board_length, strategy.pebbles);
    let mut ledger = GameLedger::default();
    for (index, &mv) in strategy.moves.iter().enumerate() {
        let erasures_left = strategy.erasures - ledger.erasures_used;
        state.apply(mv, erasures_left).map_err(|reason| IllegalMove {
            index,
            mv,
            reason,
        })?;
        ledger.moves_used += 1;
        if matches!(mv, PebbleMove::Erase(_)) {
            ledger.erasures_used += 1;
        }
        if matches!(mv, PebbleMove::Place(_)) {
            ledger.max_node_pebbled = ledger.max_node_pebbled.max(mv.node());
        }
        ledger.peak_pebbles = ledger.peak_pebbles.max(state.placed());
    }
    Ok((state, ledger))
}

/// Exhaustive breadth-first search over every position reachable from the
/// empty board with `n` pebbles and no erasures. Returns the set of
/// positions as bitmasks (bit `i-1` set when node `i` is occupied).
pub fn reachable_states(n: u32, board: u64) -> Result<BTreeSet<u64>, ResourceLimit> {
    if n > 5 || board > 40 {
        return Err(ResourceLimit(format!(
            "reachability search limited to n <= 5, board <= 40 (got n={n}, board={board})"
        )));
    }
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    let mut frontier = vec![0u64];
    seen.insert(0);
    while let Some(mask) = frontier.pop() {
        let placed = mask.count_ones();
        for i in 1..=board {
            let below = i == 1 || mask & (1 << (i - 2)) != 0;
            if !below {
                continue;
            }
            let bit = 1u64 << (i - 1);
            let next = if mask & bit != 0 {
                mask & !bit
            } else if placed < n {
                mask | bit
            } else {
                continue;
            };
            if seen.insert(next) {
                frontier.push(next);
            }
        }
    }
    Ok(seen)
}

/// The largest node ever pebbled over all positions reachable with `n`
/// pebbles, found by brute-force search. This is the independent oracle
/// for the closed form `2^n - 1`.
pub fn max_reachable_bfs(n: u32, board: u64) -> Result<u64, ResourceLimit> {
    let states = reachable_states(n, board)?;
    Ok(states
        .iter()
        .map(|mask| 64 - u64::from(mask.leading_zeros()))
        .max()
        .unwrap_or(0))
}

/// Converts a bitmask position into a full state.
pub fn state_from_mask(mask: u64, board: u64, total: u32) -> PebbleState {
    let occupied = (1..=board).filter(|i| mask & (1 << (i - 1)) != 0).collect();
    PebbleState {
        board,
        total,
        occupied,
    }
}
