//! Ratio analysis under the growth law `ε(k) ~ (-1)^{k+1} Γ(k+b) a^k`,
//! for which `r_k = -ε(k+1)/ε(k) = a(k+b) + O(1/k)`.

use crate::error::AnalysisError;
use crate::series::EnergySeries;
use rug::ops::PowAssign;
use rug::{Float, Rational};
use serde::Serialize;

pub const DEFAULT_RICHARDSON_ORDER: usize = 2;

/// Working precision of the fit; ratios are rounded once from exact values.
const FIT_PRECISION: u32 = 256;

const MIN_WINDOW: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticFit {
    pub a: f64,
    pub b: f64,
    pub window: (usize, usize),
    pub diagnostics: FitDiagnostics,
}

/// Raw and extrapolated tail values, indexed by `ks`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FitDiagnostics {
    pub richardson_order: usize,
    pub ks: Vec<usize>,
    /// `r_k`.
    pub ratios: Vec<f64>,
    /// `r_{k+1} - r_k`.
    pub differences: Vec<f64>,
    /// `r_k / a - k`; empty when `a` could not be determined.
    pub shifted: Vec<f64>,
    /// Richardson estimate of `a` started at `ks[i]` (shorter than `ks`).
    pub a_estimates: Vec<f64>,
    pub b_estimates: Vec<f64>,
    /// `r_k - a(k + b)`.
    pub residuals: Vec<f64>,
}

/// `r_k = -ε(k+1)/ε(k)` for `k = 1..=order-1`; element `i` holds `r_{i+1}`.
pub fn ratio_sequence(series: &EnergySeries) -> Result<Vec<f64>, AnalysisError> {
    Ok(exact_ratios(series)?
        .iter()
        .map(|r| Float::with_val(53, r).to_f64())
        .collect())
}

/// As [`ratio_sequence`], rounded to `precision` bits instead of `f64`.
pub fn ratio_sequence_with_precision(
    series: &EnergySeries,
    precision: u32,
) -> Result<Vec<Float>, AnalysisError> {
    Ok(exact_ratios(series)?
        .iter()
        .map(|r| Float::with_val(precision, r))
        .collect())
}

fn exact_ratios(series: &EnergySeries) -> Result<Vec<Rational>, AnalysisError> {
    let c = series.coefficients();
    if c.len() < 3 {
        return Err(AnalysisError::SeriesTooShort {
            len: c.len(),
            needed: 3,
        });
    }
    if let Some(k) = (1..c.len()).find(|&k| c[k] == 0) {
        return Err(AnalysisError::DegenerateSeries { k });
    }
    Ok((1..c.len() - 1)
        .map(|k| -Rational::from(&c[k + 1] / &c[k]))
        .collect())
}

/// `(⌊0.8·order⌋, order - 2)`: the last fifth of the usable ratio range.
pub fn default_window(order: usize) -> (usize, usize) {
    (order * 4 / 5, order.saturating_sub(2))
}

/// Richardson extrapolation of `S_k = S + c₁/k + ... + c_N/k^N + ...` from
/// `samples[j] = S_{k+j}`, `j = 0..=order`.
pub fn richardson(samples: &[Float], k: usize, order: usize) -> Float {
    assert!(samples.len() > order, "need order + 1 samples");
    let precision = samples[0].prec();
    let mut acc = Float::new(precision);
    let mut factorial = vec![Float::with_val(precision, 1)];
    for j in 1..=order {
        let next = Float::with_val(precision, &factorial[j - 1] * j as u32);
        factorial.push(next);
    }
    for (j, sample) in samples.iter().take(order + 1).enumerate() {
        let mut weight = Float::with_val(precision, (k + j) as u64);
        weight.pow_assign(order as u32);
        weight /= &factorial[j];
        weight /= &factorial[order - j];
        if (order - j) % 2 == 1 {
            weight = -weight;
        }
        acc += weight * sample;
    }
    acc
}

pub fn fit_gamma_growth(
    series: &EnergySeries,
    window: (usize, usize),
) -> Result<AsymptoticFit, AnalysisError> {
    fit_gamma_growth_with_order(series, window, DEFAULT_RICHARDSON_ORDER)
}

/// Extrapolates `a = lim (r_{k+1} - r_k)` and `b = lim (r_k/a - k)` with
/// Richardson extrapolation of the given order, ending at `k_hi`.
pub fn fit_gamma_growth_with_order(
    series: &EnergySeries,
    window: (usize, usize),
    order: usize,
) -> Result<AsymptoticFit, AnalysisError> {
    let (k_lo, k_hi) = window;
    if k_lo == 0 || k_hi < k_lo {
        return Err(AnalysisError::InvalidWindow(format!(
            "window ({k_lo}, {k_hi}) must satisfy 1 <= k_lo <= k_hi"
        )));
    }
    let len = k_hi - k_lo + 1;
    if len < MIN_WINDOW {
        return Err(AnalysisError::InvalidWindow(format!(
            "window ({k_lo}, {k_hi}) has {len} points, need at least {MIN_WINDOW}"
        )));
    }
    if k_hi + 2 > series.order() {
        return Err(AnalysisError::InvalidWindow(format!(
            "window end {k_hi} needs coefficients up to order {}, series has {}",
            k_hi + 2,
            series.order()
        )));
    }
    if order == 0 || order >= len {
        return Err(AnalysisError::InvalidWindow(format!(
            "Richardson order {order} needs between 1 and {} for this window",
            len - 1
        )));
    }

    let all = ratio_sequence_with_precision(&series.truncated(k_hi + 2), FIT_PRECISION)?;
    // all[i] = r_{i+1}
    let r: Vec<&Float> = (k_lo..=k_hi + 1).map(|k| &all[k - 1]).collect();
    let d: Vec<Float> = r.windows(2).map(|w| Float::with_val(FIT_PRECISION, w[1] - w[0])).collect();

    let mut diagnostics = FitDiagnostics {
        richardson_order: order,
        ks: (k_lo..=k_hi).collect(),
        ratios: r[..len].iter().map(|v| v.to_f64()).collect(),
        differences: d.iter().map(Float::to_f64).collect(),
        ..FitDiagnostics::default()
    };

    if let Some(i) = d.iter().position(|v| !v.is_sign_positive() || v.is_zero()) {
        return Err(AnalysisError::FitUnreliable {
            reason: format!("ratio tail is not increasing at k = {}", k_lo + i),
            diagnostics: Box::new(diagnostics),
        });
    }

    let a_est: Vec<Float> = (0..len - order)
        .map(|i| richardson(&d[i..=i + order], k_lo + i, order))
        .collect();
    diagnostics.a_estimates = a_est.iter().map(Float::to_f64).collect();
    let a = a_est.last().expect("window longer than order").clone();
    if !a.is_sign_positive() || a.is_zero() || !a.is_finite() {
        return Err(AnalysisError::FitUnreliable {
            reason: format!("extrapolated growth base a = {} is not positive", a.to_f64()),
            diagnostics: Box::new(diagnostics),
        });
    }

    let s: Vec<Float> = (0..len)
        .map(|i| Float::with_val(FIT_PRECISION, r[i] / &a) - (k_lo + i) as u64)
        .collect();
    diagnostics.shifted = s.iter().map(Float::to_f64).collect();
    let b_est: Vec<Float> = (0..len - order)
        .map(|i| richardson(&s[i..=i + order], k_lo + i, order))
        .collect();
    diagnostics.b_estimates = b_est.iter().map(Float::to_f64).collect();
    let b = b_est.last().expect("window longer than order").clone();

    diagnostics.residuals = (0..len)
        .map(|i| {
            let model = Float::with_val(FIT_PRECISION, &b + (k_lo + i) as u64) * &a;
            Float::with_val(FIT_PRECISION, r[i] - &model).to_f64()
        })
        .collect();

    Ok(AsymptoticFit {
        a: a.to_f64(),
        b: b.to_f64(),
        window,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{PotentialFamily, QuantumState};
    use crate::series::energy_series;

    /// `(-1)^{k+1} Γ(k+b) a^k` up to a constant factor, for `b ∈ {1/2, 1, 2}`
    /// and rational `a`.
    fn synthetic(a: Rational, twice_b: u32, order: usize) -> EnergySeries {
        let mut coefficients = Vec::with_capacity(order + 1);
        let mut gamma = Rational::from(1);
        let mut power = Rational::from(1);
        for k in 0..=order {
            if k > 0 {
                // Γ(k+b) = (k-1+b) Γ(k-1+b)
                gamma *= Rational::from((2 * (k as i64 - 1) + i64::from(twice_b), 2));
                power *= &a;
            }
            let mut term = Rational::from(&gamma * &power);
            if k % 2 == 0 {
                term = -term;
            }
            coefficients.push(term);
        }
        EnergySeries::new(PotentialFamily::CORNELL, QuantumState::new(0, 0), coefficients)
    }

    #[test]
    fn ratios_of_low_order_coefficients() {
        let s = energy_series(PotentialFamily::CORNELL, QuantumState::new(0, 0), 3).unwrap();
        assert_eq!(ratio_sequence(&s).unwrap(), vec![4.0, 18.0]);
        let s = energy_series(PotentialFamily::QUARTIC, QuantumState::new(0, 0), 2).unwrap();
        assert_eq!(ratio_sequence(&s).unwrap(), vec![2.75]);
    }

    #[test]
    fn ratio_preconditions() {
        let short = synthetic(Rational::from(6), 4, 1);
        assert_eq!(
            ratio_sequence(&short),
            Err(AnalysisError::SeriesTooShort { len: 2, needed: 3 })
        );
        let zero = EnergySeries::new(
            PotentialFamily::CORNELL,
            QuantumState::new(0, 0),
            vec![Rational::from(1), Rational::from(2), Rational::new(), Rational::from(3)],
        );
        assert_eq!(ratio_sequence(&zero), Err(AnalysisError::DegenerateSeries { k: 2 }));
    }

    #[test]
    fn ratio_precision_only_enters_at_rounding() {
        let s = energy_series(PotentialFamily::QUARTIC, QuantumState::new(0, 1), 30).unwrap();
        let low = ratio_sequence_with_precision(&s, 64).unwrap();
        let high = ratio_sequence_with_precision(&s, 512).unwrap();
        for (lo, hi) in low.iter().zip(&high) {
            assert_eq!(*lo, Float::with_val(64, hi));
        }
    }

    #[test]
    fn richardson_removes_inverse_powers() {
        let samples: Vec<Float> = (10..13u32)
            .map(|k| {
                let k = Float::with_val(128, k);
                Float::with_val(128, 3 + Float::with_val(128, 5 / &k))
                    - Float::with_val(128, 7 / Float::with_val(128, &k * &k))
            })
            .collect();
        let extrapolated = richardson(&samples, 10, 2);
        assert!((extrapolated.to_f64() - 3.0).abs() < 1e-30);
    }

    #[test]
    fn exact_gamma_law_is_recovered() {
        let s = synthetic(Rational::from(6), 4, 40);
        let fit = fit_gamma_growth(&s, (20, 38)).unwrap();
        assert!((fit.a - 6.0).abs() < 1e-14);
        assert!((fit.b - 2.0).abs() < 1e-14);
        assert!(fit.diagnostics.residuals.iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn half_integer_shift_and_rational_base() {
        let s = synthetic(Rational::from((3, 2)), 1, 130);
        let fit = fit_gamma_growth(&s, default_window(130)).unwrap();
        assert!((fit.a - 1.5).abs() < 1.5e-6);
        assert!((fit.b - 0.5).abs() < 0.5e-6);
        assert_eq!(fit.window, (104, 128));
    }

    #[test]
    fn subleading_corrections_are_extrapolated_away() {
        // ε(k) = (-1)^{k+1} Γ(k+1) 2^k (1 + 3/k)
        let order = 150;
        let base = synthetic(Rational::from(2), 2, order);
        let coefficients = base
            .coefficients()
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k == 0 {
                    c.clone()
                } else {
                    c * Rational::from((k as i64 + 3, k as i64))
                }
            })
            .collect();
        let s = EnergySeries::new(base.family(), base.state(), coefficients);
        let fit = fit_gamma_growth_with_order(&s, (100, 148), 4).unwrap();
        assert!((fit.a - 2.0).abs() < 1e-6, "{}", fit.a);
        assert!((fit.b - 1.0).abs() < 1e-5, "{}", fit.b);
        let last = fit.diagnostics.differences.last().unwrap();
        assert!((last - 2.0).abs() > 1e-6);
    }

    #[test]
    fn window_validation() {
        let s = synthetic(Rational::from(6), 4, 40);
        assert!(matches!(
            fit_gamma_growth(&s, (20, 25)),
            Err(AnalysisError::InvalidWindow(_))
        ));
        assert!(matches!(
            fit_gamma_growth(&s, (20, 39)),
            Err(AnalysisError::InvalidWindow(_))
        ));
        assert!(matches!(
            fit_gamma_growth(&s, (0, 30)),
            Err(AnalysisError::InvalidWindow(_))
        ));
    }

    #[test]
    fn non_monotone_tail_is_unreliable() {
        // Constant ratios: geometric series with alternating sign.
        let coefficients = (0..30)
            .map(|k| Rational::from(if k % 2 == 1 { 5 } else { -5 }))
            .collect();
        let s = EnergySeries::new(PotentialFamily::QUARTIC, QuantumState::new(0, 0), coefficients);
        match fit_gamma_growth(&s, (5, 25)) {
            Err(AnalysisError::FitUnreliable { diagnostics, .. }) => {
                assert_eq!(diagnostics.ratios.len(), 21);
                assert!(diagnostics.a_estimates.is_empty());
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
