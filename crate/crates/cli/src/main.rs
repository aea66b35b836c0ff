//! Command-line front end: parse machine files, run checks and engines,
//! execute sweeps, emit CSV and trace artifacts.
//!
//! Exit codes: 0 success, 1 engine or check failure, 2 usage/parse error,
//! 3 resource guard tripped.

use clap::{Args, Parser, Subcommand};
use revtm_core::accounting::{self, TradeoffPoint};
use revtm_core::machine::{parse_program, MachineProgram};
use revtm_core::pebble::{
    self, bennett_strategy, erasure_strategy, validate_strategy, Strategy,
};
use revtm_core::sim::{
    export_trace, reversibility_audit, simulate_bennett73, simulate_hybrid, simulate_lmt,
    simulate_unknown_t, EngineError, KPolicy, SimLedger, SimOptions, SimResult,
    DEFAULT_TRAVERSE_FACTOR,
};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "revtm", version, about = "Reversible simulation of irreversible Turing machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a machine for determinism and reversibility.
    Check { machine: PathBuf },
    /// Run a machine directly (irreversibly) and print the trace summary.
    Run {
        machine: PathBuf,
        input: String,
        #[arg(long, default_value_t = 1 << 20)]
        max_steps: u64,
    },
    /// Reversibly simulate a machine and print the output pair and ledger.
    Simulate(SimulateArgs),
    /// Sweep the tradeoff parameter k over a set of inputs, one CSV row per cell.
    Sweep(SweepArgs),
    /// Pebble game strategies and brute-force search.
    Pebble(PebbleArgs),
    /// Run an engine with full recording and audit its reversibility.
    Audit(AuditArgs),
    /// Cost-model tables and calibration.
    Tradeoff(TradeoffArgs),
}

#[derive(Args)]
struct SimulateArgs {
    machine: PathBuf,
    input: String,
    /// b73 | lmt | hybrid | auto
    #[arg(long, default_value = "b73")]
    engine: String,
    /// Pebble count for the hybrid engine.
    #[arg(long, default_value_t = 0)]
    k: u32,
    #[arg(long, default_value_t = 1 << 20)]
    max_steps: u64,
    /// Append the ledger as a CSV row to this file.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the micro-operation trace to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    machine: PathBuf,
    /// Comma-separated input strings.
    #[arg(long, value_delimiter = ',')]
    inputs: Vec<String>,
    /// Sweep all inputs up to this length instead.
    #[arg(long)]
    all_inputs: Option<usize>,
    /// Inclusive range of k, e.g. 0..4.
    #[arg(long)]
    k_range: String,
    #[arg(long, default_value_t = 1 << 20)]
    max_steps: u64,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct PebbleArgs {
    /// Pebble budget n.
    #[arg(long)]
    n: u32,
    /// Board length for --bfs (defaults to 2^n).
    #[arg(long)]
    board: Option<u64>,
    /// Emit the springboard strategy spending this many erasures
    /// (reaches (erasures+1) * 2^n) instead of the erasure-free play.
    #[arg(long)]
    erasures: Option<u32>,
    /// Write the strategy to this file.
    #[arg(long)]
    emit: Option<PathBuf>,
    /// Exhaustive reachability search instead of strategy emission.
    #[arg(long)]
    bfs: bool,
    /// Replay a strategy file and print its ledger.
    #[arg(long)]
    replay: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    machine: PathBuf,
    input: String,
    #[arg(long, default_value = "b73")]
    engine: String,
    #[arg(long, default_value_t = 0)]
    k: u32,
    #[arg(long, default_value_t = 1 << 20)]
    max_steps: u64,
}

#[derive(Args)]
struct TradeoffArgs {
    /// Print the space-vs-erasure exchange table for `n,k_max,S`.
    #[arg(long, value_name = "N,KMAX,S")]
    erasure_table: Option<String>,
    /// Fit the cost-model constants from a sweep CSV file.
    #[arg(long)]
    calibrate: Option<PathBuf>,
}

/// Failure with a chosen process exit code.
struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Failure {
        let code = match e {
            EngineError::TraversalBudget { .. } => 3,
            EngineError::Parameter(_) => 2,
            _ => 1,
        };
        fail(code, e.to_string())
    }
}

fn load_machine(path: &Path) -> Result<MachineProgram, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| fail(2, format!("{}: {e}", path.display())))?;
    parse_program(&text).map_err(|e| fail(2, format!("{}: {e}", path.display())))
}

fn sim_options(max_steps: u64, record: bool) -> SimOptions {
    let traverse_factor = std::env::var("REVSIM_TRAVERSE_BUDGET")
        .ok()
        .and_then(|v| v.parse::<u64>().ok())
        .unwrap_or(DEFAULT_TRAVERSE_FACTOR);
    SimOptions {
        max_steps,
        record,
        traverse_factor,
    }
}

fn run_engine(
    program: &MachineProgram,
    input: &str,
    engine: &str,
    k: u32,
    opts: &SimOptions,
) -> Result<SimResult, Failure> {
    match engine {
        "b73" => Ok(simulate_bennett73(program, input, opts)?),
        "lmt" => Ok(simulate_lmt(program, input, opts)?),
        "hybrid" => Ok(simulate_hybrid(program, input, k, opts)?),
        "auto" => Ok(simulate_unknown_t(program, input, KPolicy::Log, opts)?),
        other => Err(fail(2, format!("unknown engine `{other}`"))),
    }
}

fn append_csv(path: &Path, ledger: &SimLedger) -> Result<(), Failure> {
    let mut text = match fs::read_to_string(path) {
        Ok(existing) if !existing.trim().is_empty() => existing,
        _ => format!("{}\n", SimLedger::CSV_HEADER),
    };
    text.push_str(&ledger.csv_row());
    text.push('\n');
    fs::write(path, text).map_err(|e| fail(1, format!("{}: {e}", path.display())))
}

fn print_ledger(ledger: &SimLedger) {
    println!(
        "ledger: engine={} k={} m={} T={} S={} T'={} S'={} bridges={} erased_bits={}",
        ledger.engine,
        ledger.k,
        ledger.m,
        ledger.t_steps,
        ledger.s_cells,
        ledger.sim_steps,
        ledger.peak_space_bits,
        ledger.bridge_calls,
        ledger.erased_bits
    );
}

fn cmd_check(machine: &Path) -> Result<(), Failure> {
    let program = load_machine(machine)?;
    let det = program.check_deterministic();
    let rev = program.check_reversible();
    println!(
        "deterministic: {}, reversible: {}",
        if det.ok() { "yes" } else { "no" },
        if rev.ok() { "yes" } else { "no" }
    );
    for (i, j) in &det.overlaps {
        println!("domain overlap: rules {i} and {j}");
    }
    for (i, j) in &rev.overlaps {
        println!("range overlap: rules {i} and {j}");
    }
    if det.ok() {
        Ok(())
    } else {
        Err(fail(1, "program is not deterministic"))
    }
}

fn cmd_run(machine: &Path, input: &str, max_steps: u64) -> Result<(), Failure> {
    let program = load_machine(machine)?;
    let symbols = program
        .input_symbols(input)
        .map_err(|e| fail(2, e.to_string()))?;
    let trace = program
        .run(&symbols, max_steps as usize)
        .map_err(|e| fail(1, e.to_string()))?;
    let irreversible = program.count_irreversible_steps(&trace);
    println!(
        "steps: {}, halted: {}, irreversible steps: {}",
        trace.len(),
        trace.halted,
        irreversible
    );
    println!("tape: {}", program.render_tape(&trace.last().tape));
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let program = load_machine(&args.machine)?;
    let record = args.trace.is_some();
    let opts = sim_options(args.max_steps, record);
    let result = run_engine(&program, &args.input, &args.engine, args.k, &opts)?;
    println!("pair: <{}, {}>", result.pair.input, result.pair.output);
    print_ledger(&result.ledger);
    if let Some(path) = &args.csv {
        append_csv(path, &result.ledger)?;
    }
    if let Some(path) = &args.trace {
        let run = result
            .run
            .as_ref()
            .ok_or_else(|| fail(1, "engine did not record a trace"))?;
        fs::write(path, export_trace(run))
            .map_err(|e| fail(1, format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn parse_k_range(text: &str) -> Result<(u32, u32), Failure> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| fail(2, format!("bad k range `{text}`, expected LO..HI")))?;
    let lo: u32 = lo
        .trim()
        .parse()
        .map_err(|_| fail(2, format!("bad k range bound `{lo}`")))?;
    let hi: u32 = hi
        .trim()
        .parse()
        .map_err(|_| fail(2, format!("bad k range bound `{hi}`")))?;
    if lo > hi {
        return Err(fail(2, format!("empty k range {lo}..{hi}")));
    }
    Ok((lo, hi))
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let program = load_machine(&args.machine)?;
    let (lo, hi) = parse_k_range(&args.k_range)?;
    let mut inputs = if let Some(len) = args.all_inputs {
        revtm_core::corpus::inputs_up_to(&program, len)
    } else {
        args.inputs.clone()
    };
    if inputs.is_empty() {
        return Err(fail(2, "no inputs given; use --inputs or --all-inputs"));
    }
    inputs.sort();
    inputs.dedup();
    let opts = sim_options(args.max_steps, false);
    let mut rows = Vec::new();
    for input in &inputs {
        for k in lo..=hi {
            let result = simulate_hybrid(&program, input, k, &opts)?;
            rows.push(result.ledger);
        }
    }
    println!("{}", SimLedger::CSV_HEADER);
    for ledger in &rows {
        println!("{}", ledger.csv_row());
    }
    if let Some(path) = &args.csv {
        for ledger in &rows {
            append_csv(path, ledger)?;
        }
    }
    Ok(())
}

fn cmd_pebble(args: &PebbleArgs) -> Result<(), Failure> {
    if let Some(path) = &args.replay {
        let text = fs::read_to_string(path)
            .map_err(|e| fail(2, format!("{}: {e}", path.display())))?;
        let strategy = Strategy::from_text(&text).map_err(|e| fail(2, e))?;
        let ledger = validate_strategy(&strategy, strategy.board)
            .map_err(|e| fail(1, e.to_string()))?;
        println!(
            "moves: {}, peak pebbles: {} ({} with the base pebble), erasures: {}, max node: {}",
            ledger.moves_used,
            ledger.peak_pebbles,
            ledger.peak_pebbles_with_base(),
            ledger.erasures_used,
            ledger.max_node_pebbled
        );
        return Ok(());
    }
    if args.bfs {
        let board = args.board.unwrap_or(1u64 << args.n);
        let states = pebble::reachable_states(args.n, board)
            .map_err(|e| fail(3, e.to_string()))?;
        let max_node = pebble::max_reachable_bfs(args.n, board)
            .map_err(|e| fail(3, e.to_string()))?;
        println!("max node {max_node}");
        println!("reachable states {}", states.len());
        return Ok(());
    }
    let strategy = match args.erasures {
        None | Some(0) => bennett_strategy(args.n),
        Some(e) => erasure_strategy(args.n, u64::from(e) + 1),
    };
    let ledger = validate_strategy(&strategy, strategy.board)
        .map_err(|e| fail(1, e.to_string()))?;
    match &args.emit {
        Some(path) => {
            fs::write(path, strategy.to_text())
                .map_err(|e| fail(1, format!("{}: {e}", path.display())))?;
            println!(
                "wrote {} moves (board {}, peak {}, erasures {}, max node {})",
                ledger.moves_used,
                strategy.board,
                ledger.peak_pebbles,
                ledger.erasures_used,
                ledger.max_node_pebbled
            );
        }
        None => print!("{}", strategy.to_text()),
    }
    Ok(())
}

fn cmd_audit(args: &AuditArgs) -> Result<(), Failure> {
    let program = load_machine(&args.machine)?;
    let opts = sim_options(args.max_steps, true);
    let result = run_engine(&program, &args.input, &args.engine, args.k, &opts)?;
    let run = result
        .run
        .as_ref()
        .ok_or_else(|| fail(1, "engine did not record"))?;
    let report = reversibility_audit(run).map_err(|e| fail(1, e.to_string()))?;
    println!(
        "audit ok: {} ops, {} distinct states, {} erased bits",
        report.ops_checked, report.states_checked, report.erased_bits
    );
    print_ledger(&result.ledger);
    Ok(())
}

fn cmd_tradeoff(args: &TradeoffArgs) -> Result<(), Failure> {
    if let Some(spec) = &args.erasure_table {
        let parts: Vec<&str> = spec.split(',').collect();
        if parts.len() != 3 {
            return Err(fail(2, "expected --erasure-table N,KMAX,S"));
        }
        let parse = |s: &str| -> Result<u64, Failure> {
            s.trim()
                .parse::<u64>()
                .map_err(|_| fail(2, format!("bad number `{s}`")))
        };
        let (n, k_max, s) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
        println!("k,pebbles,erasures,space_cells,erased_bits");
        for row in accounting::erasure_tradeoff_table(n as u32, k_max as u32, s) {
            println!(
                "{},{},{},{},{}",
                row.k, row.pebbles, row.erasures, row.space_cells, row.erased_bits
            );
        }
        return Ok(());
    }
    if let Some(path) = &args.calibrate {
        let text = fs::read_to_string(path)
            .map_err(|e| fail(2, format!("{}: {e}", path.display())))?;
        let points = TradeoffPoint::from_csv(&text).map_err(|e| fail(2, e))?;
        let model = accounting::calibrate(&points).map_err(|e| fail(1, e.to_string()))?;
        println!(
            "c1 = {:.4}, c2 = {:.4}, c3 = {:.4}",
            model.c1, model.c2, model.c3
        );
        println!(
            "time residual (log2 rms) = {:.4}, space residual (rms bits) = {:.2}",
            model.time_residual_log2, model.space_residual
        );
        return Ok(());
    }
    Err(fail(2, "expected --erasure-table or --calibrate"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Check { machine } => cmd_check(machine),
        Command::Run {
            machine,
            input,
            max_steps,
        } => cmd_run(machine, input, *max_steps),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Pebble(args) => cmd_pebble(args),
        Command::Audit(args) => cmd_audit(args),
        Command::Tradeoff(args) => cmd_tradeoff(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
