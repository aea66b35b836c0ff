//! Cost models and resource audits over collected ledgers: prediction of
//! simulation time/space from the tradeoff parameter, calibration of the
//! model's hidden constants from measurements, the space-versus-erasure
//! exchange table, and the configuration-counting lower-bound check.

use crate::sim::{EngineRun, SimLedger};
use std::collections::HashMap;

/// One measured sweep cell: parameters and measured costs of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffPoint {
    pub k: u32,
    pub m: u64,
    pub t: u64,
    pub s: u64,
    pub t_prime: u64,
    pub s_prime: u64,
    pub erased_bits: u64,
}

impl TradeoffPoint {
    pub fn from_ledger(ledger: &SimLedger) -> TradeoffPoint {
        TradeoffPoint {
            k: ledger.k,
            m: ledger.m,
            t: ledger.t_steps,
            s: ledger.s_cells,
            t_prime: ledger.sim_steps,
            s_prime: ledger.peak_space_bits,
            erased_bits: ledger.erased_bits,
        }
    }

    /// Parses rows in the engine CSV schema
    /// (`engine,k,m,T,S,T_prime,S_prime,bridges,erased_bits`), header line
    /// optional.
    pub fn from_csv(text: &str) -> Result<Vec<TradeoffPoint>, String> {
        let mut out = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with("engine,") {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 9 {
                return Err(format!("line {}: expected 9 fields", idx + 1));
            }
            let num = |i: usize| -> Result<u64, String> {
                fields[i]
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| format!("line {}: bad number `{}`", idx + 1, fields[i]))
            };
            out.push(TradeoffPoint {
                k: num(1)? as u32,
                m: num(2)?,
                t: num(3)?,
                s: num(4)?,
                t_prime: num(5)?,
                s_prime: num(6)?,
                erased_bits: num(8)?,
            });
        }
        Ok(out)
    }
}

/// The cost model with its hidden constants made explicit:
/// `T' = c1 * S * 3^k * 2^(c2 * m)` and `S' = S * (1 + c3 * k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibratedModel {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Root-mean-square residual of the time fit, in log2 units.
    pub time_residual_log2: f64,
    /// Root-mean-square residual of the space fit, in cells.
    pub space_residual: f64,
}

/// Model predictions; time is reported in log2 because the exponential
/// regime overflows common scales quickly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub log2_time: f64,
    pub time: f64,
    pub space: f64,
    pub m: u64,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum CalibrationError {
    #[error("need at least 4 points, got {0}")]
    TooFewPoints(usize),
    #[error("points must span at least two distinct values of {0}")]
    Unidentifiable(&'static str),
}

/// Evaluates the calibrated model at `(t, s, k)` with `m = ceil(t / 2^k)`.
pub fn predict(model: &CalibratedModel, t: u64, s: u64, k: u32) -> Prediction {
    let m = if t == 0 { 0 } else { t.div_ceil(1u64 << k) };
    let log2_time =
        model.c1.log2() + (s as f64).log2() + f64::from(k) * 3f64.log2() + model.c2 * m as f64;
    Prediction {
        log2_time,
        time: log2_time.exp2(),
        space: s as f64 * (1.0 + model.c3 * f64::from(k)),
        m,
    }
}

/// Least-squares fit of the hidden constants from measured sweep points,
/// in log space for the time model. Needs points spanning at least two
/// distinct `k`, two distinct `s`, and two distinct `m`.
pub fn calibrate(points: &[TradeoffPoint]) -> Result<CalibratedModel, CalibrationError> {
    if points.len() < 4 {
        return Err(CalibrationError::TooFewPoints(points.len()));
    }
    let distinct = |f: fn(&TradeoffPoint) -> u64, name: &'static str| {
        let mut values: Vec<u64> = points.iter().map(f).collect();
        values.sort_unstable();
        values.dedup();
        if values.len() < 2 {
            Err(CalibrationError::Unidentifiable(name))
        } else {
            Ok(())
        }
    };
    distinct(|p| u64::from(p.k), "k")?;
    distinct(|p| p.s, "S")?;
    distinct(|p| p.m, "m")?;

    // y = log2 T' - log2 S - k log2 3 = log2 c1 + c2 m: simple linear
    // regression in (1, m).
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.m as f64).collect();
    let ys: Vec<f64> = points
        .iter()
        .map(|p| (p.t_prime as f64).log2() - (p.s as f64).log2() - f64::from(p.k) * 3f64.log2())
        .collect();
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let c2 = sxy / sxx;
    let intercept = mean_y - c2 * mean_x;
    let c1 = intercept.exp2();
    let time_residual_log2 = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + c2 * x)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();

    // S'/S - 1 = c3 k: regression through the origin.
    let mut num = 0.0;
    let mut den = 0.0;
    for p in points {
        let k = f64::from(p.k);
        num += k * (p.s_prime as f64 / p.s as f64 - 1.0);
        den += k * k;
    }
    if den == 0.0 {
        return Err(CalibrationError::Unidentifiable("k"));
    }
    let c3 = num / den;
    let space_residual = (points
        .iter()
        .map(|p| {
            let want = p.s as f64 * (1.0 + c3 * f64::from(p.k));
            (p.s_prime as f64 - want).powi(2)
        })
        .sum::<f64>()
        / n)
        .sqrt();

    Ok(CalibratedModel {
        c1,
        c2,
        c3,
        time_residual_log2,
        space_residual,
    })
}

/// One row of the space-versus-erasure exchange around a winning strategy
/// with `n` pebbles: giving up `k` pebbles costs `2^{k+2} - 1` erasures,
/// each erasure destroying a full checkpoint of `s` cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ErasureRow {
    pub k: u32,
    pub pebbles: u32,
    pub erasures: u64,
    pub space_cells: u64,
    pub erased_bits: u64,
}

pub fn erasure_tradeoff_table(n: u32, k_max: u32, s: u64) -> Vec<ErasureRow> {
    let mut rows = vec![ErasureRow {
        k: 0,
        pebbles: n,
        erasures: 0,
        space_cells: u64::from(n) * s,
        erased_bits: 0,
    }];
    for k in 1..=k_max.min(n) {
        let erasures = (1u64 << (k + 2)) - 1;
        rows.push(ErasureRow {
            k,
            pebbles: n - k,
            erasures,
            space_cells: u64::from(n - k) * s,
            erased_bits: erasures * s,
        });
    }
    rows
}

/// Outcome of the configuration-counting check over a family of runs.
#[derive(Debug, Clone)]
pub struct LowerBoundReport {
    pub input_length: u32,
    pub runs: usize,
    pub states_checked: usize,
    /// Uniform average steps over all inputs.
    pub t_avg: f64,
    /// Minimum measured space over the runs, in bits.
    pub s_prime_min: u64,
    /// Measured slack `S' - (n + log2 T_avg)`, reported not asserted.
    pub slack_bits: f64,
    /// Whether `q' * 2^{S'} * S' >= 2^n * T` held for every run
    /// (checked in log2 to avoid overflow).
    pub counting_bound_ok: bool,
    /// Whether `T' >= T` held for every run.
    pub time_bound_ok: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum LowerBoundError {
    #[error("runs for 2^{0} inputs expected, got {1}")]
    WrongRunCount(u32, usize),
    #[error("duplicate simulator state between run {run_a} (state {state_a}) and run {run_b} (state {state_b})")]
    DuplicateState {
        run_a: usize,
        state_a: usize,
        run_b: usize,
        state_b: usize,
    },
    #[error("run {0} was not recorded")]
    NotRecorded(usize),
}

/// Checks the counting argument on recorded runs of one engine over all
/// `2^n` inputs of length `n`: every recorded simulator state across
/// (input, micro-step) pairs must be pairwise distinct, the counting
/// inequality `q' * 2^{S'} * S' >= 2^n * T` must hold for the engine's
/// nominal control-state count `q'`, and `T' >= T` per run.
pub fn lower_bound_check(
    input_length: u32,
    runs: &[(SimLedger, EngineRun)],
) -> Result<LowerBoundReport, LowerBoundError> {
    let expected = 1usize << input_length;
    if runs.len() != expected {
        return Err(LowerBoundError::WrongRunCount(input_length, runs.len()));
    }
    let mut seen: HashMap<Vec<u8>, (usize, usize)> = HashMap::new();
    let mut states_checked = 0usize;
    for (run_idx, (_, run)) in runs.iter().enumerate() {
        for (state_idx, encoded) in std::iter::once(run.initial.encode())
            .chain(run.states.iter().cloned())
            .enumerate()
        {
            if let Some(&(run_b, state_b)) = seen.get(&encoded) {
                return Err(LowerBoundError::DuplicateState {
                    run_a: run_b,
                    state_a: state_b,
                    run_b: run_idx,
                    state_b: state_idx,
                });
            }
            seen.insert(encoded, (run_idx, state_idx));
            states_checked += 1;
        }
    }

    let t_avg = runs.iter().map(|(l, _)| l.t_steps as f64).sum::<f64>() / runs.len() as f64;
    let s_prime_min = runs
        .iter()
        .map(|(l, _)| l.peak_space_bits)
        .min()
        .unwrap_or(0);
    let slack_bits = s_prime_min as f64 - (f64::from(input_length) + t_avg.max(1.0).log2());

    let mut counting_bound_ok = true;
    let mut time_bound_ok = true;
    for (ledger, run) in runs {
        let q = crate::sim::nominal_control_states(&run.program) as f64;
        let s_prime = ledger.peak_space_bits as f64;
        // log2(q' 2^{S'} S') >= log2(2^n T)
        let lhs = q.log2() + s_prime + s_prime.max(1.0).log2();
        let rhs = f64::from(input_length) + (ledger.t_steps.max(1) as f64).log2();
        if lhs < rhs {
            counting_bound_ok = false;
        }
        if ledger.sim_steps < ledger.t_steps {
            time_bound_ok = false;
        }
    }

    Ok(LowerBoundReport {
        input_length,
        runs: runs.len(),
        states_checked,
        t_avg,
        s_prime_min,
        slack_bits,
        counting_bound_ok,
        time_bound_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic_points(c1: f64, c2: f64, c3: f64) -> Vec<TradeoffPoint> {
        let mut points = Vec::new();
        for &s in &[4u64, 5, 6, 8] {
            for &k in &[1u32, 2, 3, 4] {
                let t = 32u64;
                let m = t.div_ceil(1 << k);
                let log2_tp =
                    c1.log2() + (s as f64).log2() + f64::from(k) * 3f64.log2() + c2 * m as f64;
                points.push(TradeoffPoint {
                    k,
                    m,
                    t,
                    s,
                    t_prime: log2_tp.exp2().round() as u64,
                    s_prime: (s as f64 * (1.0 + c3 * f64::from(k))).round() as u64,
                    erased_bits: 0,
                });
            }
        }
        points
    }

    #[test]
    fn calibration_recovers_planted_constants() {
        let (c1, c2, c3) = (2.5, 0.8, 1.5);
        let model = calibrate(&synthetic_points(c1, c2, c3)).unwrap();
        assert!((model.c1 - c1).abs() / c1 < 0.05, "c1 = {}", model.c1);
        assert!((model.c2 - c2).abs() / c2 < 0.05, "c2 = {}", model.c2);
        assert!((model.c3 - c3).abs() / c3 < 0.05, "c3 = {}", model.c3);
    }

    #[test]
    fn calibration_rejects_single_k() {
        let points: Vec<TradeoffPoint> = synthetic_points(2.0, 0.5, 1.0)
            .into_iter()
            .filter(|p| p.k == 2)
            .collect();
        assert!(matches!(
            calibrate(&points),
            Err(CalibrationError::Unidentifiable("k"))
        ));
    }

    #[test]
    fn calibration_rejects_tiny_datasets() {
        let points = synthetic_points(2.0, 0.5, 1.0);
        assert!(matches!(
            calibrate(&points[..3]),
            Err(CalibrationError::TooFewPoints(3))
        ));
    }

    #[test]
    fn predict_moves_between_the_two_regimes() {
        let model = CalibratedModel {
            c1: 2.0,
            c2: 1.0,
            c3: 1.0,
            time_residual_log2: 0.0,
            space_residual: 0.0,
        };
        let t = 64u64;
        let s = 4u64;
        // Exponential regime: k = 0 puts the whole computation in the
        // exponent.
        let lmt = predict(&model, t, s, 0);
        assert_eq!(lmt.m, 64);
        // Checkpoint regime: one-step segments leave only the 3^k factor.
        let bennett = predict(&model, t, s, 6);
        assert_eq!(bennett.m, 1);
        assert!(bennett.log2_time < lmt.log2_time);
        // Raising k by one trades a factor 3 for halving the exponent
        // argument.
        let a = predict(&model, t, s, 2);
        let b = predict(&model, t, s, 3);
        let want = a.log2_time + 3f64.log2() - model.c2 * (a.m - b.m) as f64;
        assert!((b.log2_time - want).abs() < 1e-9);
        // Space grows linearly in k.
        assert!(bennett.space > lmt.space);
    }

    #[test]
    fn erasure_table_matches_the_closed_forms() {
        let rows = erasure_tradeoff_table(5, 3, 4);
        assert_eq!(rows[0].k, 0);
        assert_eq!(rows[0].erased_bits, 0);
        let k1 = &rows[1];
        assert_eq!(k1.pebbles, 4);
        assert_eq!(k1.erasures, 7);
        assert_eq!(k1.erased_bits, 28);
        let k3 = &rows[3];
        assert_eq!(k3.pebbles, 2);
        assert_eq!(k3.erasures, 31);
        assert_eq!(k3.erased_bits, 124);
    }

    #[test]
    fn csv_round_trip() {
        let ledger = SimLedger {
            engine: crate::sim::EngineKind::Hybrid,
            k: 2,
            m: 4,
            t_steps: 16,
            s_cells: 6,
            sim_steps: 1234,
            peak_space_bits: 456,
            bridge_calls: 9,
            erased_bits: 0,
            history_peak: 0,
        };
        let text = format!("{}\n{}\n", SimLedger::CSV_HEADER, ledger.csv_row());
        let points = TradeoffPoint::from_csv(&text).unwrap();
        assert_eq!(points.len(), 1);
        assert_eq!(points[0], TradeoffPoint::from_ledger(&ledger));
    }
}
