//! The simulated machine model.
//!
//! Programs are deterministic single-tape Turing machines in quadruple form.
//! A rule is either a read/write quadruple `(p, a, write b, q)` — in state
//! `p` scanning `a`, write `b` and enter `q` — or a move quadruple
//! `(p, *, move d, q)` which shifts the head one cell left or right
//! regardless of the scanned symbol. The tape holds exactly `space` cells
//! between two boundary markers the machine may never cross.
//!
//! Two rules *overlap in domain* when they can fire on the same
//! (state, scanned symbol) pair; a program with no such pair is
//! deterministic. Two rules *overlap in range* when, entering the same
//! state, their effects cannot be told apart backwards: that is the case
//! unless both write and the written symbols differ. A deterministic
//! program with no range overlaps is reversible and its step function is
//! injective.

mod parse;

pub use parse::{parse_program, ParseError};

use std::collections::BTreeSet;
use std::fmt;

/// A tape symbol, identified by its index in the program alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub u8);

/// A cell value as seen by the head, including the two boundary markers.
///
/// Markers are not part of any program alphabet and cannot be written.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TapeSymbol {
    Sym(Symbol),
    /// Left boundary marker, conventionally printed `†`.
    LeftMarker,
    /// Right boundary marker, conventionally printed `‡`.
    RightMarker,
}

/// A control state, identified by its index in the program state list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u16);

/// Index of a rule in the program's declaration order.
///
/// Declaration order is part of the semantics: it fixes the predecessor
/// enumeration order and thereby the rotation permutation used by the
/// configuration-tree traversal.
pub type RuleId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Left,
    Right,
}

impl Dir {
    pub fn delta(self) -> isize {
        match self {
            Dir::Left => -1,
            Dir::Right => 1,
        }
    }
}

/// What a rule fires on: a specific scanned symbol, or any symbol at all.
///
/// Move rules always use [`Trigger::Any`]; read/write rules always scan a
/// concrete symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trigger {
    Scan(Symbol),
    Any,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Write(Symbol),
    Move(Dir),
}

/// A single transition rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quadruple {
    pub from: StateId,
    pub trigger: Trigger,
    pub action: Action,
    pub to: StateId,
}

impl Quadruple {
    pub fn is_move(&self) -> bool {
        matches!(self.action, Action::Move(_))
    }

    pub fn is_write(&self) -> bool {
        matches!(self.action, Action::Write(_))
    }
}

/// A complete machine description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineProgram {
    pub state_names: Vec<String>,
    pub start: StateId,
    pub halt: StateId,
    /// Display characters for the alphabet; `Symbol(i)` prints as `alphabet[i]`.
    pub alphabet: Vec<char>,
    pub blank: Symbol,
    /// Number of tape cells between the markers.
    pub space: usize,
    pub rules: Vec<Quadruple>,
}

/// A complete instantaneous description: control state, the `space` tape
/// cells between the markers, and the head position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub state: StateId,
    pub tape: Vec<Symbol>,
    pub head: usize,
}

impl Configuration {
    pub fn scanned(&self) -> Symbol {
        self.tape[self.head]
    }

    /// The cell value at a signed position, markers included.
    pub fn at(&self, pos: isize) -> TapeSymbol {
        if pos < 0 {
            TapeSymbol::LeftMarker
        } else if pos as usize >= self.tape.len() {
            TapeSymbol::RightMarker
        } else {
            TapeSymbol::Sym(self.tape[pos as usize])
        }
    }
}

/// Validation failure for a machine description.
#[derive(Debug, Clone, thiserror::Error)]
pub enum ProgramError {
    #[error("rule {rule}: undeclared state id {state}")]
    UndeclaredState { rule: RuleId, state: u16 },
    #[error("rule {rule}: undeclared symbol id {symbol}")]
    UndeclaredSymbol { rule: RuleId, symbol: u8 },
    #[error("rule {rule}: a move rule must use the wildcard trigger")]
    MoveNeedsWildcard { rule: RuleId },
    #[error("rule {rule}: a write rule cannot use the wildcard trigger")]
    WriteNeedsSymbol { rule: RuleId },
    #[error("field {field}: {message}")]
    Field { field: &'static str, message: String },
}

/// Error raised while stepping a configuration.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StepError {
    #[error("no rule applies in non-halt state {state:?} scanning {symbol:?}")]
    Stuck { state: StateId, symbol: Symbol },
    #[error("head would cross the {side} marker (head {head}, space {space})")]
    MarkerViolation {
        side: &'static str,
        head: usize,
        space: usize,
    },
    #[error("input of length {len} exceeds the {space}-cell tape")]
    InputTooLong { len: usize, space: usize },
    #[error("input symbol {0:?} not in the program alphabet")]
    BadInputSymbol(char),
}

/// Result of one forward step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    /// The rule applied and the configuration after it.
    Next(RuleId, Configuration),
    /// The configuration is in the halt state; nothing fires.
    Halted,
}

/// A recorded forward execution.
#[derive(Debug, Clone)]
pub struct StepTrace {
    pub start: Configuration,
    /// `(rule applied, configuration after)` for each step, in order.
    pub steps: Vec<(RuleId, Configuration)>,
    pub halted: bool,
}

impl StepTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Final configuration of the trace.
    pub fn last(&self) -> &Configuration {
        self.steps.last().map(|(_, c)| c).unwrap_or(&self.start)
    }

    /// Checks that consecutive entries are connected by exactly the
    /// recorded rule. Used as a test oracle.
    pub fn verify(&self, program: &MachineProgram) -> bool {
        let mut cur = self.start.clone();
        for (rule, next) in &self.steps {
            match program.step_forward(&cur) {
                Ok(StepOutcome::Next(r, c)) if r == *rule && c == *next => cur = c,
                _ => return false,
            }
        }
        true
    }
}

/// Report of pairwise domain-overlap violations. Empty means deterministic.
#[derive(Debug, Clone, Default)]
pub struct DeterminismReport {
    pub overlaps: Vec<(RuleId, RuleId)>,
}

impl DeterminismReport {
    pub fn ok(&self) -> bool {
        self.overlaps.is_empty()
    }
}

/// Report of pairwise range-overlap violations. Empty means reversible.
#[derive(Debug, Clone, Default)]
pub struct ReversibilityReport {
    pub overlaps: Vec<(RuleId, RuleId)>,
}

impl ReversibilityReport {
    pub fn ok(&self) -> bool {
        self.overlaps.is_empty()
    }
}

fn triggers_overlap(a: Trigger, b: Trigger) -> bool {
    match (a, b) {
        (Trigger::Any, _) | (_, Trigger::Any) => true,
        (Trigger::Scan(x), Trigger::Scan(y)) => x == y,
    }
}

/// Two rules overlap in range when they enter the same state and cannot be
/// distinguished backwards: that is, unless both write different symbols.
fn ranges_overlap(a: &Quadruple, b: &Quadruple) -> bool {
    if a.to != b.to {
        return false;
    }
    match (a.action, b.action) {
        (Action::Write(x), Action::Write(y)) => x == y,
        // At least one of them moves the head.
        _ => true,
    }
}

impl MachineProgram {
    /// Structural validation: every rule references declared states and
    /// symbols and pairs its trigger kind with its action kind.
    pub fn validate(&self) -> Result<(), ProgramError> {
        if self.space == 0 {
            return Err(ProgramError::Field {
                field: "space",
                message: "must be positive".into(),
            });
        }
        if self.alphabet.is_empty() {
            return Err(ProgramError::Field {
                field: "alphabet",
                message: "must be non-empty".into(),
            });
        }
        let states = self.state_names.len() as u16;
        let symbols = self.alphabet.len() as u8;
        let check_state = |rule: RuleId, s: StateId| {
            if s.0 >= states {
                Err(ProgramError::UndeclaredState { rule, state: s.0 })
            } else {
                Ok(())
            }
        };
        let check_symbol = |rule: RuleId, s: Symbol| {
            if s.0 >= symbols {
                Err(ProgramError::UndeclaredSymbol { rule, symbol: s.0 })
            } else {
                Ok(())
            }
        };
        check_state(usize::MAX, self.start).map_err(|_| ProgramError::Field {
            field: "start",
            message: "undeclared state".into(),
        })?;
        check_state(usize::MAX, self.halt).map_err(|_| ProgramError::Field {
            field: "halt",
            message: "undeclared state".into(),
        })?;
        check_symbol(usize::MAX, self.blank).map_err(|_| ProgramError::Field {
            field: "blank",
            message: "not in alphabet".into(),
        })?;
        for (i, rule) in self.rules.iter().enumerate() {
            check_state(i, rule.from)?;
            check_state(i, rule.to)?;
            match (rule.trigger, rule.action) {
                (Trigger::Any, Action::Write(_)) => {
                    return Err(ProgramError::WriteNeedsSymbol { rule: i })
                }
                (Trigger::Scan(_), Action::Move(_)) => {
                    return Err(ProgramError::MoveNeedsWildcard { rule: i })
                }
                (Trigger::Scan(s), Action::Write(w)) => {
                    check_symbol(i, s)?;
                    check_symbol(i, w)?;
                }
                (Trigger::Any, Action::Move(_)) => {}
            }
        }
        Ok(())
    }

    /// Lists every pair of rules that overlap in domain. The program is
    /// deterministic iff the report is empty.
    pub fn check_deterministic(&self) -> DeterminismReport {
        let mut report = DeterminismReport::default();
        for i in 0..self.rules.len() {
            for j in i + 1..self.rules.len() {
                let (a, b) = (&self.rules[i], &self.rules[j]);
                if a.from == b.from && triggers_overlap(a.trigger, b.trigger) {
                    report.overlaps.push((i, j));
                }
            }
        }
        report
    }

    /// Lists every pair of rules that overlap in range. A deterministic
    /// program with an empty report is reversible.
    pub fn check_reversible(&self) -> ReversibilityReport {
        let mut report = ReversibilityReport::default();
        for i in 0..self.rules.len() {
            for j in i + 1..self.rules.len() {
                if ranges_overlap(&self.rules[i], &self.rules[j]) {
                    report.overlaps.push((i, j));
                }
            }
        }
        report
    }

    /// Marks each rule whose range overlaps some other rule's range.
    /// Steps taken by marked rules are the irreversible steps of a run.
    pub fn irreversible_rules(&self) -> Vec<bool> {
        let mut marked = vec![false; self.rules.len()];
        for (i, j) in self.check_reversible().overlaps {
            marked[i] = true;
            marked[j] = true;
        }
        marked
    }

    /// Applies the unique applicable rule, if any.
    pub fn step_forward(&self, config: &Configuration) -> Result<StepOutcome, StepError> {
        if config.state == self.halt {
            return Ok(StepOutcome::Halted);
        }
        let scanned = config.scanned();
        for (id, rule) in self.rules.iter().enumerate() {
            if rule.from != config.state {
                continue;
            }
            let fires = match rule.trigger {
                Trigger::Any => true,
                Trigger::Scan(s) => s == scanned,
            };
            if !fires {
                continue;
            }
            let mut next = config.clone();
            match rule.action {
                Action::Write(s) => next.tape[next.head] = s,
                Action::Move(d) => {
                    let pos = next.head as isize + d.delta();
                    if pos < 0 {
                        return Err(StepError::MarkerViolation {
                            side: "left",
                            head: config.head,
                            space: self.space,
                        });
                    }
                    if pos as usize >= self.space {
                        return Err(StepError::MarkerViolation {
                            side: "right",
                            head: config.head,
                            space: self.space,
                        });
                    }
                    next.head = pos as usize;
                }
            }
            next.state = rule.to;
            return Ok(StepOutcome::Next(id, next));
        }
        Err(StepError::Stuck {
            state: config.state,
            symbol: scanned,
        })
    }

    /// All configurations that step forward to `config`, each paired with
    /// the rule used, in canonical (declaration) rule order.
    ///
    /// A predecessor through a move rule must have had its head inside the
    /// markers, so configurations with the head at a boundary only admit
    /// moving predecessors from the inner side. For reversible programs the
    /// list has at most one entry.
    pub fn predecessors(&self, config: &Configuration) -> Vec<(RuleId, Configuration)> {
        let mut preds = Vec::new();
        for (id, rule) in self.rules.iter().enumerate() {
            if rule.to != config.state {
                continue;
            }
            let candidate = match (rule.trigger, rule.action) {
                (Trigger::Scan(a), Action::Write(b)) => {
                    if config.scanned() != b {
                        continue;
                    }
                    let mut prev = config.clone();
                    prev.tape[prev.head] = a;
                    prev.state = rule.from;
                    prev
                }
                (Trigger::Any, Action::Move(d)) => {
                    let pos = config.head as isize - d.delta();
                    if pos < 0 || pos as usize >= self.space {
                        continue;
                    }
                    let mut prev = config.clone();
                    prev.head = pos as usize;
                    prev.state = rule.from;
                    prev
                }
                _ => continue,
            };
            // Confirm by stepping forward; this also screens out candidates
            // masked by an earlier rule in a non-deterministic program.
            if matches!(self.step_forward(&candidate),
                        Ok(StepOutcome::Next(r, ref c)) if r == id && c == config)
            {
                preds.push((id, candidate));
            }
        }
        preds
    }

    /// Parses an input string over the alphabet into symbols.
    pub fn input_symbols(&self, input: &str) -> Result<Vec<Symbol>, StepError> {
        input
            .chars()
            .map(|ch| {
                self.alphabet
                    .iter()
                    .position(|&a| a == ch)
                    .map(|i| Symbol(i as u8))
                    .ok_or(StepError::BadInputSymbol(ch))
            })
            .collect()
    }

    /// The start configuration for an input: input written left adjusted,
    /// blanks elsewhere, head on cell 0.
    pub fn initial_configuration(&self, input: &[Symbol]) -> Result<Configuration, StepError> {
        if input.len() > self.space {
            return Err(StepError::InputTooLong {
                len: input.len(),
                space: self.space,
            });
        }
        let mut tape = vec![self.blank; self.space];
        tape[..input.len()].copy_from_slice(input);
        Ok(Configuration {
            state: self.start,
            tape,
            head: 0,
        })
    }

    /// Runs the program from an input for at most `max_steps` steps.
    pub fn run(&self, input: &[Symbol], max_steps: usize) -> Result<StepTrace, StepError> {
        let start = self.initial_configuration(input)?;
        let mut trace = StepTrace {
            start,
            steps: Vec::new(),
            halted: false,
        };
        let mut cur = trace.start.clone();
        for _ in 0..max_steps {
            match self.step_forward(&cur)? {
                StepOutcome::Halted => {
                    trace.halted = true;
                    return Ok(trace);
                }
                StepOutcome::Next(rule, next) => {
                    trace.steps.push((rule, next.clone()));
                    cur = next;
                }
            }
        }
        if matches!(self.step_forward(&cur), Ok(StepOutcome::Halted)) {
            trace.halted = true;
        }
        Ok(trace)
    }

    /// Number of steps of a trace taken by irreversible rules.
    pub fn count_irreversible_steps(&self, trace: &StepTrace) -> usize {
        let marked = self.irreversible_rules();
        trace.steps.iter().filter(|(rule, _)| marked[*rule]).count()
    }

    /// Renders a tape as text, trailing blanks trimmed.
    pub fn render_tape(&self, tape: &[Symbol]) -> String {
        let end = tape
            .iter()
            .rposition(|&s| s != self.blank)
            .map(|i| i + 1)
            .unwrap_or(0);
        tape[..end]
            .iter()
            .map(|s| self.alphabet[s.0 as usize])
            .collect()
    }

    /// Iterates over every configuration of the program's bounded tape.
    /// The count is |states| * space * |alphabet|^space, so this is only
    /// usable for small instances; solver and audit code guards sizes.
    pub fn enumerate_configurations(&self) -> impl Iterator<Item = Configuration> + '_ {
        let nstates = self.state_names.len() as u16;
        let nsyms = self.alphabet.len() as u64;
        let space = self.space;
        let tapes = nsyms.checked_pow(space as u32).expect("tape space too large");
        (0..nstates).flat_map(move |state| {
            (0..space).flat_map(move |head| {
                (0..tapes).map(move |mut code| {
                    let mut tape = Vec::with_capacity(space);
                    for _ in 0..space {
                        tape.push(Symbol((code % nsyms) as u8));
                        code /= nsyms;
                    }
                    Configuration {
                        state: StateId(state),
                        tape,
                        head,
                    }
                })
            })
        })
    }

    pub fn state_name(&self, id: StateId) -> &str {
        &self.state_names[id.0 as usize]
    }

    pub fn symbol_char(&self, s: Symbol) -> char {
        self.alphabet[s.0 as usize]
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "state {} head {} tape ", self.state.0, self.head)?;
        for s in &self.tape {
            write!(f, "{}", s.0)?;
        }
        Ok(())
    }
}

/// Set of distinct state/tape/head triples seen in a trace; test helper for
/// loop detection.
pub fn distinct_configurations(trace: &StepTrace) -> usize {
    let mut seen: BTreeSet<(u16, Vec<u8>, usize)> = BTreeSet::new();
    let key = |c: &Configuration| (c.state.0, c.tape.iter().map(|s| s.0).collect(), c.head);
    seen.insert(key(&trace.start));
    for (_, c) in &trace.steps {
        seen.insert(key(c));
    }
    seen.len()
}

#[cfg(test)]
mod tests;
