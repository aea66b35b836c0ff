use super::*;
use proptest::prelude::*;
use std::collections::HashMap;

fn sym(i: u8) -> Symbol {
    Symbol(i)
}

fn write_rule(from: u16, scan: u8, write: u8, to: u16) -> Quadruple {
    Quadruple {
        from: StateId(from),
        trigger: Trigger::Scan(sym(scan)),
        action: Action::Write(sym(write)),
        to: StateId(to),
    }
}

fn move_rule(from: u16, dir: Dir, to: u16) -> Quadruple {
    Quadruple {
        from: StateId(from),
        trigger: Trigger::Any,
        action: Action::Move(dir),
        to: StateId(to),
    }
}

fn program(states: u16, alphabet: u8, space: usize, rules: Vec<Quadruple>) -> MachineProgram {
    let program = MachineProgram {
        state_names: (0..states).map(|i| format!("q{i}")).collect(),
        start: StateId(0),
        halt: StateId(states - 1),
        alphabet: (0..alphabet).map(|i| (b'0' + i) as char).collect(),
        blank: sym(0),
        space,
        rules,
    };
    program.validate().expect("test program must validate");
    program
}

#[test]
fn deterministic_on_disjoint_triggers() {
    let p = program(2, 2, 2, vec![write_rule(0, 0, 1, 1), write_rule(0, 1, 0, 1)]);
    assert!(p.check_deterministic().ok());
}

#[test]
fn move_rule_overlaps_any_rule_sharing_state() {
    let p = program(
        3,
        2,
        2,
        vec![write_rule(0, 0, 1, 1), move_rule(0, Dir::Right, 2)],
    );
    let report = p.check_deterministic();
    assert_eq!(report.overlaps, vec![(0, 1)]);
}

#[test]
fn empty_rule_list_is_deterministic() {
    let p = program(1, 1, 1, vec![]);
    assert!(p.check_deterministic().ok());
}

#[test]
fn reversible_when_writes_into_same_state_differ() {
    let p = program(3, 2, 2, vec![write_rule(0, 0, 0, 2), write_rule(1, 1, 1, 2)]);
    assert!(p.check_reversible().ok());
}

#[test]
fn move_into_shared_state_overlaps_in_range() {
    let p = program(
        3,
        2,
        2,
        vec![move_rule(0, Dir::Right, 2), write_rule(1, 0, 0, 2)],
    );
    let report = p.check_reversible();
    assert_eq!(report.overlaps, vec![(0, 1)]);
}

#[test]
fn single_rule_program_is_reversible() {
    let p = program(2, 2, 2, vec![move_rule(0, Dir::Right, 1)]);
    assert!(p.check_reversible().ok());
}

#[test]
fn step_applies_write_rule() {
    let p = program(3, 2, 3, vec![write_rule(0, 0, 1, 1)]);
    let config = Configuration {
        state: StateId(0),
        tape: vec![sym(0), sym(0), sym(0)],
        head: 0,
    };
    match p.step_forward(&config).unwrap() {
        StepOutcome::Next(rule, next) => {
            assert_eq!(rule, 0);
            assert_eq!(next.state, StateId(1));
            assert_eq!(next.tape, vec![sym(1), sym(0), sym(0)]);
            assert_eq!(next.head, 0);
        }
        other => panic!("expected a step, got {other:?}"),
    }
}

#[test]
fn halt_state_yields_halted() {
    let p = program(2, 2, 2, vec![]);
    let config = Configuration {
        state: StateId(1),
        tape: vec![sym(0), sym(0)],
        head: 0,
    };
    assert_eq!(p.step_forward(&config).unwrap(), StepOutcome::Halted);
}

#[test]
fn move_off_right_marker_is_a_violation() {
    let p = program(2, 2, 3, vec![move_rule(0, Dir::Right, 0)]);
    let config = Configuration {
        state: StateId(0),
        tape: vec![sym(0); 3],
        head: 2,
    };
    assert_eq!(
        p.step_forward(&config),
        Err(StepError::MarkerViolation {
            side: "right",
            head: 2,
            space: 3
        })
    );
}

#[test]
fn stuck_in_non_halt_state_is_an_error() {
    let p = program(3, 2, 2, vec![write_rule(0, 0, 1, 1)]);
    let config = Configuration {
        state: StateId(0),
        tape: vec![sym(1), sym(0)],
        head: 0,
    };
    assert!(matches!(
        p.step_forward(&config),
        Err(StepError::Stuck { .. })
    ));
}

#[test]
fn predecessor_inverts_a_write() {
    let p = program(3, 2, 2, vec![write_rule(0, 0, 1, 1)]);
    let config = Configuration {
        state: StateId(1),
        tape: vec![sym(1), sym(0)],
        head: 0,
    };
    let preds = p.predecessors(&config);
    assert_eq!(preds.len(), 1);
    assert_eq!(preds[0].0, 0);
    assert_eq!(preds[0].1.state, StateId(0));
    assert_eq!(preds[0].1.tape, vec![sym(0), sym(0)]);
}

#[test]
fn two_preimages_listed_in_rule_order() {
    // Both rules write symbol 1 into state 2 from different origins.
    let p = program(3, 2, 3, vec![write_rule(0, 0, 1, 2), write_rule(1, 1, 1, 2)]);
    let config = Configuration {
        state: StateId(2),
        tape: vec![sym(1), sym(0), sym(0)],
        head: 0,
    };
    let preds = p.predecessors(&config);
    assert_eq!(preds.len(), 2);
    assert_eq!(preds[0].0, 0);
    assert_eq!(preds[0].1.state, StateId(0));
    assert_eq!(preds[0].1.scanned(), sym(0));
    assert_eq!(preds[1].0, 1);
    assert_eq!(preds[1].1.state, StateId(1));
    assert_eq!(preds[1].1.scanned(), sym(1));
}

/// Exhaustive adjointness on a small machine: c' is a predecessor of c
/// exactly when stepping c' forward yields c.
#[test]
fn predecessors_adjoint_to_step_forward() {
    let p = program(
        3,
        2,
        3,
        vec![
            write_rule(0, 0, 1, 1),
            write_rule(0, 1, 0, 0),
            move_rule(1, Dir::Right, 0),
        ],
    );
    let configs: Vec<_> = p.enumerate_configurations().collect();
    for c in &configs {
        let preds = p.predecessors(c);
        for (rule, prev) in &preds {
            match p.step_forward(prev) {
                Ok(StepOutcome::Next(r, next)) => {
                    assert_eq!(r, *rule);
                    assert_eq!(&next, c);
                }
                other => panic!("predecessor does not step back: {other:?}"),
            }
        }
        // Completeness: every c' stepping to c is listed.
        for prev in &configs {
            if let Ok(StepOutcome::Next(_, next)) = p.step_forward(prev) {
                if &next == c {
                    assert!(
                        preds.iter().any(|(_, q)| q == prev),
                        "missing predecessor {prev}"
                    );
                }
            }
        }
    }
}

#[test]
fn reversible_program_has_at_most_one_predecessor() {
    // Scan 0/1 and flip, then move right: injective.
    let p = program(
        3,
        2,
        3,
        vec![
            write_rule(0, 0, 1, 1),
            write_rule(0, 1, 0, 1),
            move_rule(1, Dir::Right, 0),
        ],
    );
    assert!(p.check_deterministic().ok());
    // Writes into state 1 differ (1 vs 0); single move rule into 0.
    assert!(p.check_reversible().ok());
    for c in p.enumerate_configurations() {
        assert!(p.predecessors(&c).len() <= 1, "two predecessors of {c}");
    }
}

/// Reversibility (no range overlaps) coincides with injectivity of the
/// forward step on non-stuck configurations, checked by brute force.
fn injective_on_small_machine(p: &MachineProgram) -> bool {
    let mut image: HashMap<Configuration, Configuration> = HashMap::new();
    for c in p.enumerate_configurations() {
        if let Ok(StepOutcome::Next(_, next)) = p.step_forward(&c) {
            if let Some(prev) = image.get(&next) {
                if prev != &c {
                    return false;
                }
            }
            image.insert(next, c);
        }
    }
    true
}

#[test]
fn reversibility_check_matches_injectivity_oracle() {
    let reversible = program(
        3,
        2,
        3,
        vec![
            write_rule(0, 0, 1, 1),
            write_rule(0, 1, 0, 1),
            move_rule(1, Dir::Right, 0),
        ],
    );
    assert!(reversible.check_reversible().ok());
    assert!(injective_on_small_machine(&reversible));

    let merging = program(3, 2, 3, vec![write_rule(0, 0, 0, 1), write_rule(0, 1, 0, 1)]);
    assert!(!merging.check_reversible().ok());
    assert!(!injective_on_small_machine(&merging));
}

#[test]
fn irreversible_step_count_zero_for_reversible_program() {
    let p = program(
        3,
        2,
        3,
        vec![
            write_rule(0, 0, 1, 1),
            write_rule(0, 1, 0, 1),
            move_rule(1, Dir::Right, 0),
        ],
    );
    let trace = p.run(&[sym(1), sym(1)], 5).unwrap();
    assert!(trace.len() > 0);
    assert_eq!(p.count_irreversible_steps(&trace), 0);
}

#[test]
fn irreversible_step_count_equals_length_when_all_rules_overlap() {
    let p = program(2, 2, 2, vec![write_rule(0, 0, 0, 0), write_rule(0, 1, 0, 0)]);
    let trace = p.run(&[sym(1)], 10).unwrap();
    assert_eq!(trace.len(), 10);
    assert_eq!(p.count_irreversible_steps(&trace), trace.len());
}

#[test]
fn irreversible_count_monotone_over_prefixes() {
    let p = program(
        3,
        2,
        4,
        vec![
            write_rule(0, 1, 0, 0), // merges with rule 2
            move_rule(1, Dir::Right, 0),
            write_rule(0, 0, 0, 0),
        ],
    );
    let trace = p.run(&[sym(1), sym(1), sym(0)], 6).unwrap();
    let mut last = 0;
    for k in 0..=trace.len() {
        let prefix = StepTrace {
            start: trace.start.clone(),
            steps: trace.steps[..k].to_vec(),
            halted: false,
        };
        let count = p.count_irreversible_steps(&prefix);
        assert!(count >= last);
        last = count;
    }
}

#[test]
fn run_identity_program_halts_immediately() {
    // Start state is the halt state.
    let mut p = program(2, 2, 5, vec![]);
    p.halt = StateId(0);
    let input = p.input_symbols("101").unwrap();
    let trace = p.run(&input, 100).unwrap();
    assert!(trace.halted);
    assert_eq!(trace.len(), 0);
    assert_eq!(p.render_tape(&trace.last().tape), "101");
}

#[test]
fn run_budget_exhaustion_reports_not_halted() {
    let p = program(
        3,
        2,
        4,
        vec![move_rule(0, Dir::Right, 1), move_rule(1, Dir::Left, 0)],
    );
    let trace = p.run(&[], 10).unwrap();
    assert!(!trace.halted);
    assert_eq!(trace.len(), 10);
    assert!(trace.verify(&p));
}

#[test]
fn run_rejects_overlong_input() {
    let p = program(2, 2, 2, vec![]);
    assert!(matches!(
        p.run(&[sym(0); 3], 10),
        Err(StepError::InputTooLong { .. })
    ));
}

#[test]
fn parse_round_trip_zeroing_machine() {
    let text = "\
# zero every 1
states s m h
start s
halt h
alphabet 0 1 _
blank _
space 6
rule s 1 -> write 0 s
rule s 0 -> write 0 m
rule s _ -> write _ h
rule m * -> move R s
";
    let p = parse_program(text).unwrap();
    assert_eq!(p.state_names, vec!["s", "m", "h"]);
    assert_eq!(p.space, 6);
    assert_eq!(p.rules.len(), 4);
    assert!(p.check_deterministic().ok());
    let input = p.input_symbols("11").unwrap();
    let trace = p.run(&input, 100).unwrap();
    assert!(trace.halted);
    assert_eq!(p.render_tape(&trace.last().tape), "00");
}

#[test]
fn parse_errors_carry_line_numbers() {
    let text = "states a b\nstart a\nhalt b\nalphabet 0 1\nblank 0\nspace 2\nrule a 0 -> write 2 b\n";
    let e = parse_program(text).unwrap_err();
    assert_eq!(e.line, 7);
    assert!(e.message.contains("not in alphabet"), "{}", e.message);

    let e = parse_program("bogus x\n").unwrap_err();
    assert_eq!(e.line, 1);

    let e = parse_program("states a\nstart a\nhalt a\nblank 0\nspace 1\n").unwrap_err();
    assert!(e.message.contains("alphabet"));
}

#[test]
fn wildcard_trigger_on_write_rule_rejected() {
    let text = "states a b\nstart a\nhalt b\nalphabet 0\nblank 0\nspace 1\nrule a * -> write 0 b\n";
    let e = parse_program(text).unwrap_err();
    assert_eq!(e.line, 7);
}

// Random small programs: determinism report agrees with a brute-force
// "at most one rule fires" check, and deterministic programs never
// produce two different successors for one configuration.
fn arb_rule(states: u16, symbols: u8) -> impl Strategy<Value = Quadruple> {
    (
        0..states,
        0..states,
        prop_oneof![
            (0..symbols, 0..symbols).prop_map(|(s, w)| (Some(s), Some(w), None)),
            prop_oneof![Just(Dir::Left), Just(Dir::Right)].prop_map(|d| (None, None, Some(d))),
        ],
    )
        .prop_map(|(from, to, kind)| match kind {
            (Some(s), Some(w), None) => write_rule(from, s, w, to),
            (None, None, Some(d)) => move_rule(from, d, to),
            _ => unreachable!(),
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn determinism_report_matches_enumeration(rules in prop::collection::vec(arb_rule(3, 2), 0..6)) {
        let p = program(3, 2, 3, rules);
        let deterministic = p.check_deterministic().ok();
        let mut clash = false;
        for c in p.enumerate_configurations() {
            let firing: Vec<_> = p
                .rules
                .iter()
                .enumerate()
                .filter(|(_, r)| {
                    r.from == c.state
                        && match r.trigger {
                            Trigger::Any => true,
                            Trigger::Scan(s) => s == c.scanned(),
                        }
                })
                .collect();
            if firing.len() > 1 {
                clash = true;
                break;
            }
        }
        prop_assert_eq!(deterministic, !clash);
    }

    #[test]
    fn reversible_reports_imply_injectivity(rules in prop::collection::vec(arb_rule(3, 2), 0..6)) {
        let p = program(3, 2, 3, rules);
        if p.check_deterministic().ok() && p.check_reversible().ok() {
            prop_assert!(injective_on_small_machine(&p));
        }
    }
}
