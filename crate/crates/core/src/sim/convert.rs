//! Rewriting a program so that write and move steps strictly alternate,
//! which the configuration-tree traversal assumes.
//!
//! Determinism forces every state to be either a write state (only
//! read/write rules leave it) or a move state (a single wildcard move rule
//! leaves it), so alternation only breaks on edges between two states of
//! the same kind. Two gadgets repair them:
//!
//! * move state -> move state: an identity write (rewrite the scanned
//!   symbol) is inserted before the second move;
//! * write state -> write state: a three-step excursion — move right,
//!   identity-write the neighbour cell, move back — is inserted before the
//!   second write, and the tape is extended by one scratch cell on the
//!   right so the excursion can never touch the right marker.
//!
//! The rewritten program computes the same function on the original cells
//! and inflates the step count by at most a small constant factor.

use crate::machine::{Action, Dir, MachineProgram, Quadruple, RuleId, StateId, Symbol, Trigger};

/// Kind of rules leaving a state, fixed by determinism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum OutKind {
    Write,
    Move,
    None,
}

fn out_kind(program: &MachineProgram, state: StateId) -> OutKind {
    if state == program.halt {
        return OutKind::None;
    }
    let mut kind = OutKind::None;
    for rule in &program.rules {
        if rule.from != state {
            continue;
        }
        kind = match rule.action {
            Action::Write(_) => OutKind::Write,
            Action::Move(_) => OutKind::Move,
        };
    }
    kind
}

fn rule_kind(rule: &Quadruple) -> OutKind {
    match rule.action {
        Action::Write(_) => OutKind::Write,
        Action::Move(_) => OutKind::Move,
    }
}

/// True when no rule enters a state that fires a rule of the same kind,
/// so every execution strictly alternates writes and moves.
pub fn is_alternating(program: &MachineProgram) -> bool {
    program.rules.iter().all(|entering| {
        let kind = out_kind(program, entering.to);
        kind == OutKind::None || kind != rule_kind(entering)
    })
}

/// The converted program plus the bookkeeping to relate its steps back to
/// the original.
#[derive(Debug, Clone)]
pub struct Conversion {
    pub program: MachineProgram,
    /// Space of the program before conversion; the converted tape may have
    /// one extra scratch cell.
    pub orig_space: usize,
    /// For every converted rule, the original rule it realizes; `None` for
    /// inserted gadget rules.
    pub rule_origin: Vec<Option<RuleId>>,
}

impl Conversion {
    /// Identity conversion for an already alternating program.
    fn identity(program: &MachineProgram) -> Conversion {
        Conversion {
            program: program.clone(),
            orig_space: program.space,
            rule_origin: (0..program.rules.len()).map(Some).collect(),
        }
    }

    /// Converted step indices at which each original step completes, read
    /// off a converted trace: entry `i` is the 1-based converted step
    /// count after `i + 1` original steps.
    pub fn step_map(&self, trace: &crate::machine::StepTrace) -> Vec<u64> {
        let mut map = Vec::new();
        for (idx, (rule, _)) in trace.steps.iter().enumerate() {
            if self.rule_origin[*rule].is_some() {
                map.push(idx as u64 + 1);
            }
        }
        map
    }
}

/// Rewrites `program` into a strictly alternating equivalent. Programs
/// that already alternate are returned unchanged.
pub fn convert_to_alternating(program: &MachineProgram) -> Conversion {
    if is_alternating(program) {
        return Conversion::identity(program);
    }

    let nsyms = program.alphabet.len() as u8;
    let mut state_names: Vec<String> = program.state_names.clone();
    let mut rules: Vec<(Quadruple, Option<RuleId>)> = Vec::new();

    // Gadget entry states, allocated lazily per target state.
    let mut write_pad: Vec<Option<StateId>> = vec![None; state_names.len()];
    let mut move_pad: Vec<Option<StateId>> = vec![None; state_names.len()];
    let mut needs_scratch = false;

    let fresh = |names: &mut Vec<String>, name: String| -> StateId {
        names.push(name);
        StateId(names.len() as u16 - 1)
    };

    // First pass: reroute original rules through pads where the kinds of
    // the entering rule and the target state's rules collide.
    for (id, rule) in program.rules.iter().enumerate() {
        let target_kind = out_kind(program, rule.to);
        let clash = target_kind != OutKind::None && target_kind == rule_kind(rule);
        let to = if !clash {
            rule.to
        } else if target_kind == OutKind::Write {
            needs_scratch = true;
            *write_pad[rule.to.0 as usize].get_or_insert_with(|| {
                fresh(
                    &mut state_names,
                    format!("{}~w", program.state_names[rule.to.0 as usize]),
                )
            })
        } else {
            *move_pad[rule.to.0 as usize].get_or_insert_with(|| {
                fresh(
                    &mut state_names,
                    format!("{}~m", program.state_names[rule.to.0 as usize]),
                )
            })
        };
        rules.push((Quadruple { to, ..*rule }, Some(id)));
    }

    // Second pass: the gadget bodies.
    for q in 0..program.state_names.len() {
        if let Some(pad) = write_pad[q] {
            // move right, rewrite the neighbour in place, move back, then
            // fall through to the original write rules of q.
            let g1 = fresh(&mut state_names, format!("{}~w1", program.state_names[q]));
            let g2 = fresh(&mut state_names, format!("{}~w2", program.state_names[q]));
            rules.push((
                Quadruple {
                    from: pad,
                    trigger: Trigger::Any,
                    action: Action::Move(Dir::Right),
                    to: g1,
                },
                None,
            ));
            for s in 0..nsyms {
                rules.push((
                    Quadruple {
                        from: g1,
                        trigger: Trigger::Scan(Symbol(s)),
                        action: Action::Write(Symbol(s)),
                        to: g2,
                    },
                    None,
                ));
            }
            rules.push((
                Quadruple {
                    from: g2,
                    trigger: Trigger::Any,
                    action: Action::Move(Dir::Left),
                    to: StateId(q as u16),
                },
                None,
            ));
        }
        if let Some(pad) = move_pad[q] {
            // rewrite the scanned symbol in place, then fall through to the
            // single move rule of q.
            for s in 0..nsyms {
                rules.push((
                    Quadruple {
                        from: pad,
                        trigger: Trigger::Scan(Symbol(s)),
                        action: Action::Write(Symbol(s)),
                        to: StateId(q as u16),
                    },
                    None,
                ));
            }
        }
    }

    let converted = MachineProgram {
        state_names,
        start: program.start,
        halt: program.halt,
        alphabet: program.alphabet.clone(),
        blank: program.blank,
        space: program.space + usize::from(needs_scratch),
        rules: rules.iter().map(|(r, _)| *r).collect(),
    };
    debug_assert!(converted.validate().is_ok());
    debug_assert!(converted.check_deterministic().ok());
    debug_assert!(is_alternating(&converted));
    Conversion {
        program: converted,
        orig_space: program.space,
        rule_origin: rules.into_iter().map(|(_, o)| o).collect(),
    }
}
