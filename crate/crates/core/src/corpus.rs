//! Built-in sample machines used by tests, benchmarks and the CLI docs.
//! The same files live under `machines/` at the repository root.

use crate::machine::{parse_program, MachineProgram};

pub struct Fixture {
    pub name: &'static str,
    pub text: &'static str,
}

pub const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "identity",
        text: include_str!("../../../machines/identity.tm"),
    },
    Fixture {
        name: "zero",
        text: include_str!("../../../machines/zero.tm"),
    },
    Fixture {
        name: "flip",
        text: include_str!("../../../machines/flip.tm"),
    },
    Fixture {
        name: "inc",
        text: include_str!("../../../machines/inc.tm"),
    },
    Fixture {
        name: "loop",
        text: include_str!("../../../machines/loop.tm"),
    },
];

pub fn load(name: &str) -> MachineProgram {
    let fixture = FIXTURES
        .iter()
        .find(|f| f.name == name)
        .unwrap_or_else(|| panic!("no fixture named {name}"));
    parse_program(fixture.text).expect("fixture machines parse")
}

pub fn all() -> Vec<(&'static str, MachineProgram)> {
    FIXTURES.iter().map(|f| (f.name, load(f.name))).collect()
}

/// Every input string over the machine's non-blank alphabet with length
/// at most `max_len`, in length-then-lexicographic order.
pub fn inputs_up_to(program: &MachineProgram, max_len: usize) -> Vec<String> {
    let symbols: Vec<char> = program
        .alphabet
        .iter()
        .copied()
        .filter(|&c| c != program.symbol_char(program.blank))
        .collect();
    let mut out = Vec::new();
    for len in 0..=max_len {
        let mut word = vec![0usize; len];
        loop {
            out.push(word.iter().map(|&i| symbols[i]).collect::<String>());
            let mut pos = len;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                word[pos] += 1;
                if word[pos] < symbols.len() {
                    break;
                }
                word[pos] = 0;
            }
            if word.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    out
}
