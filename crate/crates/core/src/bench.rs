//! Wall-clock comparison of the moment recursion with the wavefunction
//! oracle on the nodeless ground state.

use crate::error::BenchError;
use crate::potential::{PotentialFamily, PotentialKind, QuantumState};
use crate::rspt::rspt_series_with_limit;
use crate::series::energy_series;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::time::Instant;

/// Oracle limit used for benchmarking; larger than the default so that the
/// customary `r0 = 40` column is reachable.
pub const BENCH_ORACLE_LIMIT: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Hfhv,
    Rspt,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Hfhv => "HFHV method",
            Method::Rspt => "RSPT method",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub method: Method,
    pub r0: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub family: PotentialFamily,
    pub state: QuantumState,
    pub orders: Vec<usize>,
    pub rows: Vec<BenchRow>,
    pub environment: String,
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    /// Timed runs per cell; the fastest is reported.
    pub repeats: usize,
    pub oracle_limit: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            repeats: 3,
            oracle_limit: BENCH_ORACLE_LIMIT,
        }
    }
}

impl BenchReport {
    pub fn seconds(&self, method: Method, r0: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|row| row.method == method && row.r0 == r0)
            .map(|row| row.seconds)
    }

    /// RSPT time over HFHV time at `r0`.
    pub fn ratio(&self, r0: usize) -> Option<f64> {
        let hfhv = self.seconds(Method::Hfhv, r0)?;
        let rspt = self.seconds(Method::Rspt, r0)?;
        (hfhv > 0.0).then(|| rspt / hfhv)
    }

    pub fn title(&self) -> String {
        let system = match (self.family.kind(), self.family.power()) {
            (PotentialKind::CoulombPlusPower, 1) => "the Cornell potential".to_owned(),
            (PotentialKind::OscillatorPlusEvenPower, 2) => {
                "the quartic anharmonic oscillator".to_owned()
            }
            _ => format!("U = {}", self.family),
        };
        format!(
            "Wall time (in seconds) for the calculation of eps(k) (k = 0..r0) in the case of {} for the {} state.",
            system,
            self.state.label()
        )
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}\n", self.title());
        out.push('|');
        for r0 in &self.orders {
            let _ = write!(out, " | r0={r0}");
        }
        out.push_str(" |\n|---");
        for _ in &self.orders {
            out.push_str("|---:");
        }
        out.push_str("|\n");
        for method in [Method::Rspt, Method::Hfhv] {
            let _ = write!(out, "| {}", method.label());
            for &r0 in &self.orders {
                match self.seconds(method, r0) {
                    Some(s) => {
                        let _ = write!(out, " | {s:.6}");
                    }
                    None => out.push_str(" | -"),
                }
            }
            out.push_str(" |\n");
        }
        out.push_str("| RSPT/HFHV");
        for &r0 in &self.orders {
            match self.ratio(r0) {
                Some(r) => {
                    let _ = write!(out, " | {r:.1}");
                }
                None => out.push_str(" | -"),
            }
        }
        out.push_str(" |\n");
        let _ = writeln!(out, "\n{}", self.environment);
        out
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

fn best_of<T>(repeats: usize, mut run: impl FnMut() -> T) -> (T, f64) {
    let mut best = f64::INFINITY;
    let mut last = None;
    for _ in 0..repeats {
        let start = Instant::now();
        let value = run();
        best = best.min(start.elapsed().as_secs_f64());
        last = Some(value);
    }
    (last.expect("repeats > 0"), best)
}

/// Times both methods for the `(0, 0)` state at every order in `orders`
/// (one untimed warm-up run, then the fastest of `repeats`), checking that
/// they return identical coefficients.
pub fn run_bench(
    family: PotentialFamily,
    orders: &[usize],
    options: &BenchOptions,
) -> Result<BenchReport, BenchError> {
    if orders.is_empty() {
        return Err(BenchError::NoOrders);
    }
    if options.repeats == 0 {
        return Err(BenchError::NoRepeats);
    }
    let state = QuantumState::new(0, 0);
    if let Some(&r0) = orders.iter().find(|&&r0| r0 > options.oracle_limit) {
        return Err(crate::error::OracleError::OrderLimit {
            order: r0,
            limit: options.oracle_limit,
        }
        .into());
    }
    let warm = orders[0].min(5);
    energy_series(family, state, warm)?;
    rspt_series_with_limit(family, 0, warm, options.oracle_limit)?;

    let mut rows = Vec::with_capacity(2 * orders.len());
    for &r0 in orders {
        let (hfhv, hfhv_time) = best_of(options.repeats, || energy_series(family, state, r0));
        let (rspt, rspt_time) = best_of(options.repeats, || {
            rspt_series_with_limit(family, 0, r0, options.oracle_limit)
        });
        if hfhv? != rspt? {
            return Err(BenchError::Disagreement { r0 });
        }
        rows.push(BenchRow {
            method: Method::Rspt,
            r0,
            seconds: rspt_time,
        });
        rows.push(BenchRow {
            method: Method::Hfhv,
            r0,
            seconds: hfhv_time,
        });
    }
    Ok(BenchReport {
        family,
        state,
        orders: orders.to_vec(),
        rows,
        environment: environment_note(options.repeats),
    })
}

fn environment_note(repeats: usize) -> String {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    format!(
        "{}-{}, {} hardware thread(s) available, single-threaded runs; wall clock, best of {}, warm-up excluded; hypervirial {}",
        std::env::consts::OS,
        std::env::consts::ARCH,
        threads,
        repeats,
        env!("CARGO_PKG_VERSION")
    )
}
