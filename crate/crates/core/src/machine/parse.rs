//! Line-oriented machine file format.
//!
//! ```text
//! # zero every 1 on the tape
//! states s m h
//! start s
//! halt h
//! alphabet 0 1 _
//! blank _
//! space 6
//! rule s 1 -> write 0 s
//! rule s 0 -> write 0 m
//! rule s _ -> write _ h
//! rule m * -> move R s
//! ```
//!
//! Header lines may appear in any order but must all precede use; `#`
//! starts a comment. Rule triggers are a single alphabet character or `*`
//! (move rules only); actions are `write <sym>` or `move L|R`.

use super::{Action, Dir, MachineProgram, Quadruple, StateId, Symbol, Trigger};

#[derive(Debug, Clone, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

/// Parses a machine description from text. Errors carry the 1-based line
/// number of the offending line.
pub fn parse_program(text: &str) -> Result<MachineProgram, ParseError> {
    let mut state_names: Option<Vec<String>> = None;
    let mut start: Option<String> = None;
    let mut halt: Option<String> = None;
    let mut alphabet: Option<Vec<char>> = None;
    let mut blank: Option<char> = None;
    let mut space: Option<usize> = None;
    let mut rule_lines: Vec<(usize, Vec<String>)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<String> = line.split_whitespace().map(str::to_string).collect();
        match tokens[0].as_str() {
            "states" => {
                if tokens.len() < 2 {
                    return err(line_no, "states: expected at least one state name");
                }
                state_names = Some(tokens[1..].to_vec());
            }
            "start" | "halt" => {
                if tokens.len() != 2 {
                    return err(line_no, format!("{}: expected one state name", tokens[0]));
                }
                if tokens[0] == "start" {
                    start = Some(tokens[1].clone());
                } else {
                    halt = Some(tokens[1].clone());
                }
            }
            "alphabet" => {
                let mut syms = Vec::new();
                for tok in &tokens[1..] {
                    let mut chars = tok.chars();
                    let (Some(c), None) = (chars.next(), chars.next()) else {
                        return err(line_no, format!("alphabet: symbol `{tok}` must be one character"));
                    };
                    if syms.contains(&c) {
                        return err(line_no, format!("alphabet: duplicate symbol `{c}`"));
                    }
                    syms.push(c);
                }
                if syms.is_empty() {
                    return err(line_no, "alphabet: expected at least one symbol");
                }
                alphabet = Some(syms);
            }
            "blank" => {
                if tokens.len() != 2 || tokens[1].chars().count() != 1 {
                    return err(line_no, "blank: expected one symbol character");
                }
                blank = tokens[1].chars().next();
            }
            "space" => {
                if tokens.len() != 2 {
                    return err(line_no, "space: expected one positive integer");
                }
                match tokens[1].parse::<usize>() {
                    Ok(n) if n > 0 => space = Some(n),
                    _ => return err(line_no, "space: expected one positive integer"),
                }
            }
            "rule" => rule_lines.push((line_no, tokens)),
            other => return err(line_no, format!("unknown directive `{other}`")),
        }
    }

    let state_names = state_names.ok_or(ParseError {
        line: 0,
        message: "missing `states` header".into(),
    })?;
    let find_state = |name: &str, line: usize| -> Result<StateId, ParseError> {
        state_names
            .iter()
            .position(|s| s == name)
            .map(|i| StateId(i as u16))
            .ok_or(ParseError {
                line,
                message: format!("undeclared state `{name}`"),
            })
    };
    let alphabet = alphabet.ok_or(ParseError {
        line: 0,
        message: "missing `alphabet` header".into(),
    })?;
    let find_symbol = |tok: &str, line: usize| -> Result<Symbol, ParseError> {
        let c = tok.chars().next().unwrap_or(' ');
        if tok.chars().count() != 1 {
            return err(line, format!("symbol `{tok}` must be one character"));
        }
        alphabet
            .iter()
            .position(|&a| a == c)
            .map(|i| Symbol(i as u8))
            .ok_or(ParseError {
                line,
                message: format!("symbol `{c}` not in alphabet"),
            })
    };

    let missing = |field: &str| ParseError {
        line: 0,
        message: format!("missing `{field}` header"),
    };
    let start = find_state(&start.ok_or_else(|| missing("start"))?, 0)?;
    let halt = find_state(&halt.ok_or_else(|| missing("halt"))?, 0)?;
    let blank_char = blank.ok_or_else(|| missing("blank"))?;
    let blank = alphabet
        .iter()
        .position(|&a| a == blank_char)
        .map(|i| Symbol(i as u8))
        .ok_or(ParseError {
            line: 0,
            message: format!("blank `{blank_char}` not in alphabet"),
        })?;
    let space = space.ok_or_else(|| missing("space"))?;

    let mut rules = Vec::new();
    for (line, tokens) in rule_lines {
        // rule <p> <sym|*> -> write <sym> <q>  |  rule <p> * -> move <L|R> <q>
        if tokens.len() != 7 || tokens[3] != "->" {
            return err(
                line,
                "rule: expected `rule <state> <sym|*> -> (write <sym> | move <L|R>) <state>`",
            );
        }
        let from = find_state(&tokens[1], line)?;
        let to = find_state(&tokens[6], line)?;
        let (trigger, action) = match tokens[4].as_str() {
            "write" => {
                if tokens[2] == "*" {
                    return err(line, "rule: a write rule cannot use the `*` trigger");
                }
                (
                    Trigger::Scan(find_symbol(&tokens[2], line)?),
                    Action::Write(find_symbol(&tokens[5], line)?),
                )
            }
            "move" => {
                if tokens[2] != "*" {
                    return err(line, "rule: a move rule must use the `*` trigger");
                }
                let dir = match tokens[5].as_str() {
                    "L" => Dir::Left,
                    "R" => Dir::Right,
                    other => return err(line, format!("rule: bad direction `{other}`")),
                };
                (Trigger::Any, Action::Move(dir))
            }
            other => return err(line, format!("rule: bad action `{other}`")),
        };
        rules.push(Quadruple {
            from,
            trigger,
            action,
            to,
        });
    }

    let program = MachineProgram {
        state_names,
        start,
        halt,
        alphabet,
        blank,
        space,
        rules,
    };
    program.validate().map_err(|e| ParseError {
        line: 0,
        message: e.to_string(),
    })?;
    Ok(program)
}
