use super::*;
use crate::corpus;
use crate::machine::{Configuration, MachineProgram};

fn opts() -> SimOptions {
    SimOptions {
        max_steps: 4096,
        record: false,
        traverse_factor: DEFAULT_TRAVERSE_FACTOR,
    }
}

fn record_opts() -> SimOptions {
    SimOptions {
        record: true,
        ..opts()
    }
}

fn config_after(program: &MachineProgram, input: &str, steps: usize) -> Configuration {
    let symbols = program.input_symbols(input).unwrap();
    let trace = program.run(&symbols, steps).unwrap();
    assert!(trace.len() >= steps, "machine halted before {steps} steps");
    trace.last().clone()
}

#[test]
fn b73_identity_pairs_input_with_itself() {
    let program = corpus::load("identity");
    let result = simulate_bennett73(&program, "101", &opts()).unwrap();
    assert_eq!(result.pair.input, "101");
    assert_eq!(result.pair.output, "101");
    assert!(result.final_state.history.is_empty());
    assert_eq!(result.ledger.erased_bits, 0);
}

#[test]
fn b73_zeroing_pairs_input_with_zeros() {
    let program = corpus::load("zero");
    let result = simulate_bennett73(&program, "11", &opts()).unwrap();
    assert_eq!(result.pair.input, "11");
    assert_eq!(result.pair.output, "00");
}

#[test]
fn b73_history_peaks_at_the_simulated_step_count() {
    let program = corpus::load("zero");
    let symbols = program.input_symbols("111").unwrap();
    let trace = program.run(&symbols, 4096).unwrap();
    let result = simulate_bennett73(&program, "111", &opts()).unwrap();
    assert_eq!(result.ledger.history_peak, trace.len() as u64);
    assert_eq!(result.ledger.t_steps, trace.len() as u64);
}

#[test]
fn b73_times_out_cleanly() {
    let text = "states a b\nstart a\nhalt b\nalphabet 0\nblank 0\nspace 4\n\
                rule a * -> move R a\n";
    let program = crate::machine::parse_program(text).unwrap();
    // Never halts (bounces off the marker eventually, but budget first).
    let err = simulate_bennett73(&program, "", &SimOptions { max_steps: 2, ..opts() });
    assert!(matches!(err, Err(EngineError::Timeout { steps: 2 })));
}

#[test]
fn conversion_leaves_alternating_programs_unchanged() {
    for name in ["identity", "flip", "inc"] {
        let program = corpus::load(name);
        assert!(is_alternating(&program), "{name} should alternate");
        let conv = convert_to_alternating(&program);
        assert_eq!(conv.program, program);
    }
}

#[test]
fn conversion_repairs_consecutive_writes() {
    let program = corpus::load("zero");
    assert!(!is_alternating(&program));
    let conv = convert_to_alternating(&program);
    assert!(is_alternating(&conv.program));
    assert!(conv.program.check_deterministic().ok());
    assert_eq!(conv.program.space, program.space + 1);
}

#[test]
fn conversion_preserves_the_computed_function() {
    for (name, program) in corpus::all() {
        let conv = convert_to_alternating(&program);
        for input in corpus::inputs_up_to(&program, 4) {
            let symbols = program.input_symbols(&input).unwrap();
            let orig = program.run(&symbols, 4096).unwrap();
            let conv_symbols = conv.program.input_symbols(&input).unwrap();
            let converted = conv.program.run(&conv_symbols, 16384).unwrap();
            assert!(orig.halted && converted.halted, "{name} {input}");
            assert_eq!(
                program.render_tape(&orig.last().tape),
                conv.program
                    .render_tape(&converted.last().tape[..conv.orig_space]),
                "{name} on {input:?}"
            );
        }
    }
}

#[test]
fn conversion_inflation_stays_below_two() {
    for (name, program) in corpus::all() {
        let conv = convert_to_alternating(&program);
        for input in corpus::inputs_up_to(&program, 4) {
            let symbols = program.input_symbols(&input).unwrap();
            let orig = program.run(&symbols, 4096).unwrap();
            let conv_symbols = conv.program.input_symbols(&input).unwrap();
            let converted = conv.program.run(&conv_symbols, 16384).unwrap();
            assert!(
                converted.len() as f64 <= 2.0 * orig.len() as f64 + 1.0,
                "{name} on {input:?}: {} converted vs {} original",
                converted.len(),
                orig.len()
            );
            // The step map relates original step indices to converted ones.
            let map = conv.step_map(&converted);
            assert_eq!(map.len(), orig.len(), "{name} on {input:?}");
        }
    }
}

#[test]
fn traverse_matches_iterated_stepping() {
    let program = corpus::load("flip");
    let symbols = program.input_symbols("10").unwrap();
    let start = program.initial_configuration(&symbols).unwrap();
    assert_eq!(
        traverse_configuration_tree(&start, 0, &program, 64).unwrap(),
        start
    );
    for m in 1..=5u64 {
        let want = config_after(&program, "10", m as usize);
        let got = traverse_configuration_tree(&start, m, &program, 64).unwrap();
        assert_eq!(got, want, "m = {m}");
    }
}

#[test]
fn traverse_stops_at_the_halting_configuration() {
    let program = corpus::load("flip");
    let symbols = program.input_symbols("1").unwrap();
    let start = program.initial_configuration(&symbols).unwrap();
    let trace = program.run(&symbols, 4096).unwrap();
    let got = traverse_configuration_tree(&start, 10_000, &program, 64).unwrap();
    assert_eq!(&got, trace.last());
}

#[test]
fn traverse_rejects_non_alternating_programs() {
    let program = corpus::load("zero");
    let symbols = program.input_symbols("1").unwrap();
    let start = program.initial_configuration(&symbols).unwrap();
    assert!(matches!(
        traverse_configuration_tree(&start, 1, &program, 64),
        Err(EngineError::NotAlternating)
    ));
}

fn bridge_fixture(input: &str) -> (Conversion, SimMachineState, u64) {
    let program = corpus::load("flip");
    let conv = convert_to_alternating(&program);
    let symbols = conv.program.input_symbols(input).unwrap();
    let init = conv.program.initial_configuration(&symbols).unwrap();
    let width = encoding_width(conv.program.space);
    let mut store = CheckpointStore::new(width, 1);
    encode_config(&init, store.section_mut(-1));
    let state = SimMachineState::new(width, store);
    let budget = traversal_budget(&conv.program, 64);
    (conv, state, budget)
}

#[test]
fn bridge_banks_the_segment_endpoint_and_is_self_inverse() {
    let (conv, state, budget) = bridge_fixture("10");
    let mut engine = Engine::new(&conv.program, state, SimLedger::default(), false);
    bridge(&mut engine, -1, 0, 3, budget, false).unwrap();

    let want = config_after(&conv.program, "10", 3);
    let banked = decode_config(engine.state.store.section(0)).unwrap();
    assert_eq!(banked, want);
    // Auxiliary tapes restored.
    assert!(engine.state.sim.iter().all(|&b| b == 0));
    assert_eq!(engine.state.counter, 0);
    assert_eq!(engine.ledger.bridge_calls, 1);

    // Second call with identical arguments zeroes the section again.
    bridge(&mut engine, -1, 0, 3, budget, false).unwrap();
    assert!(engine.state.store.is_free(0));
    assert_eq!(engine.ledger.bridge_calls, 2);
}

#[test]
fn bridge_from_a_free_section_is_an_error() {
    let (conv, state, budget) = bridge_fixture("10");
    let mut engine = Engine::new(&conv.program, state, SimLedger::default(), false);
    assert!(matches!(
        bridge(&mut engine, 0, 1, 1, budget, false),
        Err(EngineError::FreeSource { section: 0 })
    ));
}

#[test]
fn bridge_respects_the_traversal_budget() {
    let (conv, state, _) = bridge_fixture("10");
    let mut engine = Engine::new(&conv.program, state, SimLedger::default(), false);
    assert!(matches!(
        bridge(&mut engine, -1, 0, 5, 2, false),
        Err(EngineError::TraversalBudget { limit: 2 })
    ));
}

#[test]
fn hybrid_makes_exactly_three_to_the_k_bridge_calls() {
    let program = corpus::load("zero");
    for k in 0..=3u32 {
        let result = simulate_hybrid(&program, "1111", k, &opts()).unwrap();
        assert_eq!(result.ledger.bridge_calls, 3u64.pow(k), "k = {k}");
        assert_eq!(result.pair.output, "0000");
        assert_eq!(result.pair.input, "1111");
    }
}

#[test]
fn hybrid_checkpoint_hygiene() {
    let program = corpus::load("zero");
    let result = simulate_hybrid(&program, "101", 2, &opts()).unwrap();
    let store = &result.final_state.store;
    let occupied = store.occupied_ids();
    assert_eq!(occupied, vec![-1, 2]);
}

#[test]
fn hybrid_segment_length_covers_the_run() {
    let program = corpus::load("zero");
    let result = simulate_hybrid(&program, "1111", 2, &opts()).unwrap();
    let l = &result.ledger;
    assert!(l.m * 4 >= l.t_steps, "m 2^k covers T");
    assert!(l.m * 2 < l.t_steps.max(2) * 2, "m not absurdly large");
    assert_eq!(l.s_cells, program.space as u64 + 1);
}

#[test]
fn hybrid_rejects_oversized_k() {
    let program = corpus::load("flip");
    let err = simulate_hybrid(&program, "1", 20, &opts());
    assert!(matches!(err, Err(EngineError::Parameter(_))));
}

#[test]
fn lmt_is_the_k_zero_boundary_case() {
    let program = corpus::load("flip");
    let result = simulate_lmt(&program, "01", &opts()).unwrap();
    assert_eq!(result.ledger.engine, EngineKind::Lmt);
    assert_eq!(result.ledger.k, 0);
    assert_eq!(result.ledger.bridge_calls, 1);
    assert_eq!(result.pair.output, "10");
}

#[test]
fn engines_agree_with_the_direct_run() {
    for (name, program) in corpus::all() {
        for input in ["", "1", "11"] {
            if program.input_symbols(input).is_err() {
                continue;
            }
            let symbols = program.input_symbols(input).unwrap();
            let trace = program.run(&symbols, 4096).unwrap();
            let want = program.render_tape(&trace.last().tape);
            let k = if trace.len() <= 1 { 0 } else { 1 };
            let b73 = simulate_bennett73(&program, input, &opts()).unwrap();
            let hybrid = simulate_hybrid(&program, input, k, &opts()).unwrap();
            assert_eq!(b73.pair.output, want, "{name} b73 on {input:?}");
            assert_eq!(hybrid.pair.output, want, "{name} hybrid on {input:?}");
            assert_eq!(b73.pair.input, input, "{name} b73 input on {input:?}");
            assert_eq!(hybrid.pair.input, input, "{name} hybrid input on {input:?}");
        }
    }
}

#[test]
fn doubling_wrapper_doubles_until_success_and_restores_between_epochs() {
    let program = corpus::load("zero");
    let result = simulate_unknown_t(&program, "111", KPolicy::Log, &opts()).unwrap();
    assert_eq!(result.pair.output, "000");
    assert!(result.epochs.len() > 1);
    for (i, epoch) in result.epochs.iter().enumerate() {
        assert_eq!(epoch.t_budget, 2u64 << i);
        assert!(epoch.restored, "epoch {i} not undone cleanly");
        assert_eq!(epoch.halted, i == result.epochs.len() - 1);
    }
}

#[test]
fn doubling_wrapper_cost_is_dominated_by_the_final_epoch() {
    let program = corpus::load("zero");
    for policy in [KPolicy::Log, KPolicy::Fixed(1)] {
        let result = simulate_unknown_t(&program, "1111", policy, &opts()).unwrap();
        let total = result.ledger.sim_steps;
        let last = result.epochs.last().unwrap().sim_steps;
        assert!(
            total <= 4 * last,
            "{policy:?}: total {total} vs successful epoch {last}"
        );
    }
}

#[test]
fn audit_passes_on_recorded_runs() {
    let program = corpus::load("zero");
    for result in [
        simulate_bennett73(&program, "11", &record_opts()).unwrap(),
        simulate_hybrid(&program, "11", 1, &record_opts()).unwrap(),
        simulate_lmt(&program, "11", &record_opts()).unwrap(),
    ] {
        let run = result.run.as_ref().expect("recorded");
        let report = reversibility_audit(run).unwrap();
        assert_eq!(report.erased_bits, 0);
        assert_eq!(report.ops_checked, run.ops.len());
    }
}

#[test]
fn audit_detects_a_misregistered_inverse() {
    let program = corpus::load("flip");
    let result = simulate_bennett73(&program, "10", &record_opts()).unwrap();
    let run = result.run.as_ref().unwrap();
    // Swap the registered inverses of the history ops: undoing a HistStep
    // now replays it instead.
    let err = audit_with_inverses(run, |op| match op {
        MicroOp::HistStep(r) => MicroOp::HistStep(r),
        other => other.inverse(),
    });
    assert!(err.is_err());
}

#[test]
fn trace_export_emits_one_line_per_op() {
    let program = corpus::load("flip");
    let result = simulate_hybrid(&program, "1", 1, &record_opts()).unwrap();
    let run = result.run.as_ref().unwrap();
    let text = export_trace(run);
    assert_eq!(text.lines().count(), run.ops.len());
    assert!(text.lines().all(|l| l.split_whitespace().count() == 4));
}


