//! One PASS/FAIL line per acceptance criterion. Criteria 5 and 6 build two
//! order-1000 series and dominate the running time.

use hypervirial::analysis::{
    default_window, direct_eigenvalue, fit_gamma_growth, optimal_truncation, SolverSettings,
};
use hypervirial::bench::{BenchReport, Method};
use hypervirial::document::{series_from_csv, CacheOutcome, SeriesCache, SeriesDocument};
use hypervirial::{
    energy_series, rspt_series, EnergySeries, MomentTable, PotentialFamily, QuantumState,
};
use rug::{Float, Rational};
use serde_json::Value;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

const TABLES: &str = include_str!("../../core/tests/fixtures/reference_tables.json");
const FAMILIES: [PotentialFamily; 2] = [PotentialFamily::CORNELL, PotentialFamily::QUARTIC];
const LARGE_ORDER: usize = 1000;
const LARGE_ORDER_BUDGET: Duration = Duration::from_secs(30 * 60);

type Outcome = Result<String, String>;

fn ensure(condition: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if condition {
        Ok(())
    } else {
        Err(message())
    }
}

fn reference_table(name: &str, family: PotentialFamily) -> Outcome {
    let fixture: Value = serde_json::from_str(TABLES).map_err(|e| e.to_string())?;
    let table = &fixture[name];
    let scaled = table["scaling"] == "powers_of_four";
    let mut matched = 0;
    for entry in table["states"].as_array().ok_or("fixture has no states")? {
        let state = QuantumState::new(
            entry["n"].as_u64().unwrap_or(0) as u32,
            entry["l"].as_u64().unwrap_or(0) as u32,
        );
        let series = energy_series(family, state, 7).map_err(|e| e.to_string())?;
        let values = if scaled {
            series.scaled_by_powers_of_four()
        } else {
            series.coefficients().to_vec()
        };
        for (k, expected) in entry["values"].as_array().ok_or("no values")?.iter().enumerate() {
            let expected: Rational = expected
                .as_str()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| format!("bad fixture value {expected}"))?;
            ensure(values[k] == expected, || {
                format!("{} k={k}: got {}, expected {expected}", state.label(), values[k])
            })?;
            matched += 1;
        }
    }
    ensure(matched == 24, || format!("only {matched} reference values"))?;
    Ok(format!("{matched} values exact"))
}

fn oracle_equivalence() -> Outcome {
    let mut compared = 0;
    for family in FAMILIES {
        for l in 0..=3 {
            let state = QuantumState::new(0, l);
            let engine = energy_series(family, state, 15).map_err(|e| e.to_string())?;
            let oracle = rspt_series(family, l, 15).map_err(|e| e.to_string())?;
            for (k, (a, b)) in engine.coefficients().iter().zip(oracle.coefficients()).enumerate() {
                ensure(a == b, || format!("{family} l={l} k={k}: {a} vs {b}"))?;
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} coefficients identical"))
}

fn residual_suite() -> Outcome {
    let mut balances = 0;
    for family in FAMILIES {
        for (n, l) in [(0, 0), (1, 0), (0, 1), (2, 1)] {
            let table = MomentTable::build(family, QuantumState::new(n, l), 40)
                .map_err(|e| e.to_string())?;
            table.verify_normalization().map_err(|e| e.to_string())?;
            table.verify_hellmann_feynman().map_err(|e| e.to_string())?;
            balances += table.verify_hypervirial().map_err(|e| e.to_string())?;
        }
    }
    Ok(format!("{balances} balances with zero residual"))
}

fn large_order(series: &Result<(EnergySeries, Duration), String>) -> Outcome {
    let (series, elapsed) = series.as_ref().map_err(Clone::clone)?;
    ensure(series.order() == LARGE_ORDER, || format!("order {}", series.order()))?;
    ensure(*elapsed <= LARGE_ORDER_BUDGET, || format!("took {elapsed:.1?}"))?;
    series.check_sign_alternation().map_err(|e| e.to_string())?;
    Ok(format!("order {LARGE_ORDER} in {:.1} s, signs alternate", elapsed.as_secs_f64()))
}

fn asymptotic_constants(
    cornell: &Result<(EnergySeries, Duration), String>,
    quartic: &Result<(EnergySeries, Duration), String>,
) -> Outcome {
    let mut report = Vec::new();
    for (series, a_ref, b_ref) in [(cornell, 6.0, 2.0), (quartic, 1.5, 1.5)] {
        let (series, _) = series.as_ref().map_err(Clone::clone)?;
        let fit = fit_gamma_growth(series, default_window(LARGE_ORDER)).map_err(|e| e.to_string())?;
        let label = series.family().to_string();
        ensure((fit.a - a_ref).abs() <= 0.02 * a_ref, || format!("{label}: a = {}", fit.a))?;
        ensure((fit.b - b_ref).abs() <= 0.05 * b_ref, || format!("{label}: b = {}", fit.b))?;
        report.push(format!("a={:.6} b={:.6}", fit.a, fit.b));
    }
    Ok(format!("cornell {}, quartic {}", report[0], report[1]))
}

fn cross_method() -> Outcome {
    let state = QuantumState::new(0, 0);
    let mut worst = 0.0f64;
    for family in FAMILIES {
        let series = energy_series(family, state, 60).map_err(|e| e.to_string())?;
        for g in [1e-4, 1e-3, 1e-2] {
            let truncated = optimal_truncation(&series, g).map_err(|e| e.to_string())?;
            let settings = SolverSettings {
                tolerance: truncated.error_bound_f64() / 1000.0 / truncated.value_f64().abs(),
                ..SolverSettings::for_state(family, state)
            };
            let direct = direct_eigenvalue(family, state, g, &settings).map_err(|e| e.to_string())?;
            let precision = direct.value.prec().max(truncated.value.prec());
            let difference = Float::with_val(precision, &direct.value - &truncated.value).abs();
            ensure(difference <= truncated.error_bound, || {
                format!(
                    "{family} g={g:e}: |diff| {:.3e} > bound {:.3e}",
                    difference.to_f64(),
                    truncated.error_bound_f64()
                )
            })?;
            worst = worst.max(difference.to_f64() / truncated.error_bound_f64());
        }
    }
    Ok(format!("6 couplings within bound, worst |diff|/bound = {worst:.2}"))
}

fn bench() -> Outcome {
    let mut ratios = Vec::new();
    for name in ["cornell", "quartic"] {
        let mut out = Vec::new();
        hypervirial_cli::run(
            ["hypervirial", "bench", name, "--orders", "10,20,30,40", "--format", "json"],
            &mut out,
        )
        .map_err(|f| format!("bench {name} exited {}: {f}", f.code))?;
        let report: BenchReport = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
        ensure(report.orders == [10, 20, 30, 40] && report.rows.len() == 8, || {
            format!("{name}: malformed report")
        })?;
        for r0 in [10, 20, 30, 40] {
            for method in [Method::Rspt, Method::Hfhv] {
                ensure(report.seconds(method, r0).is_some_and(|s| s > 0.0), || {
                    format!("{name}: no {method:?} timing at r0={r0}")
                })?;
            }
        }
        let ratio = report.ratio(40).ok_or("no ratio at r0=40")?;
        ensure(ratio > 1.0, || format!("{name}: ratio {ratio:.2} at r0=40"))?;
        ratios.push(format!("{name} {ratio:.1}"));
    }
    Ok(format!("RSPT/HFHV at r0=40: {}", ratios.join(", ")))
}

fn round_trip_and_cache() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cache = SeriesCache::new(dir.path());
    let state = QuantumState::new(0, 0);
    for family in FAMILIES {
        let series = energy_series(family, state, 60).map_err(|e| e.to_string())?;
        let document = SeriesDocument::from_series(&series);
        let json = document.to_json().map_err(|e| e.to_string())?;
        let back = SeriesDocument::from_json(&json)
            .and_then(|d| d.to_series())
            .map_err(|e| e.to_string())?;
        ensure(back == series, || format!("{family}: JSON round trip differs"))?;
        let back = series_from_csv(&document.to_csv(), family, state).map_err(|e| e.to_string())?;
        ensure(back == series, || format!("{family}: CSV round trip differs"))?;

        let (_, first) = cache.get_or_compute(family, state, 40).map_err(|e| e.to_string())?;
        ensure(first == CacheOutcome::Computed, || format!("{family}: {first:?}"))?;
        let (extended, outcome) = cache.get_or_compute(family, state, 60).map_err(|e| e.to_string())?;
        ensure(outcome == CacheOutcome::Extended { cached_order: 40 }, || {
            format!("{family}: {outcome:?}")
        })?;
        ensure(extended == series, || format!("{family}: extended cache differs from a fresh run"))?;
        let (_, again) = cache.get_or_compute(family, state, 50).map_err(|e| e.to_string())?;
        ensure(again == CacheOutcome::Hit { cached_order: 60 }, || format!("{family}: {again:?}"))?;
    }
    Ok("JSON and CSV exact at order 60, cache 40 -> 60 prefix-stable".to_owned())
}

fn timed_series(family: PotentialFamily) -> Result<(EnergySeries, Duration), String> {
    let start = Instant::now();
    let series = energy_series(family, QuantumState::new(0, 0), LARGE_ORDER).map_err(|e| e.to_string())?;
    Ok((series, start.elapsed()))
}

fn main() -> ExitCode {
    let mut failures = 0;
    let mut report = |number: u32, title: &str, check: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".to_owned()));
        let seconds = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {number} {title}: {detail} [{seconds:.1} s]"),
            Err(detail) => {
                failures += 1;
                println!("FAIL {number} {title}: {detail} [{seconds:.1} s]");
            }
        }
    };

    report(1, "Cornell table", &mut || reference_table("cornell", PotentialFamily::CORNELL));
    report(2, "quartic table (4^k scaling)", &mut || {
        reference_table("quartic", PotentialFamily::QUARTIC)
    });
    report(3, "oracle equivalence", &mut oracle_equivalence);
    report(4, "hypervirial residuals", &mut residual_suite);

    let cornell = timed_series(PotentialFamily::CORNELL);
    report(5, "Cornell 1S to order 1000", &mut || large_order(&cornell));
    let quartic = timed_series(PotentialFamily::QUARTIC);
    report(6, "asymptotic constants", &mut || asymptotic_constants(&cornell, &quartic));
    drop((cornell, quartic));

    report(7, "cross-method validation", &mut cross_method);
    report(8, "benchmark harness", &mut bench);
    report(9, "round trip and cache", &mut round_trip_and_cache);

    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
