use crate::error::AnalysisError;
use crate::series::EnergySeries;
use rug::float::Round;
use rug::{Float, Rational};
use std::cmp::Ordering;

/// Lower bound on the mantissa of [`TruncationResult::value`].
pub const MIN_PRECISION: u32 = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct TruncationResult {
    pub g: f64,
    /// `Σ_{k ≤ K*} ε(k) g^k`.
    pub value: Float,
    pub k_star: usize,
    /// `|ε(K*+1) g^{K*+1}|`.
    pub error_bound: Float,
}

impl TruncationResult {
    pub fn value_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn error_bound_f64(&self) -> f64 {
        self.error_bound.to_f64()
    }
}

/// Sums the series up to its smallest term (`K*` ranges over orders whose
/// successor is available; ties go to the smaller order).
///
/// Terms are formed and summed exactly; the sum is rounded once, at a
/// precision of at least [`MIN_PRECISION`] bits and at least 16 bits finer
/// than `error_bound / |value|`.
pub fn optimal_truncation(series: &EnergySeries, g: f64) -> Result<TruncationResult, AnalysisError> {
    if !(g.is_finite() && g >= 0.0) {
        return Err(AnalysisError::InvalidArgument(format!(
            "coupling must be finite and non-negative, got {g}"
        )));
    }
    let c = series.coefficients();
    if g == 0.0 {
        return Ok(TruncationResult {
            g,
            value: Float::with_val(MIN_PRECISION, &c[0]),
            k_star: 0,
            error_bound: Float::new(MIN_PRECISION),
        });
    }
    if c.len() < 2 {
        return Err(AnalysisError::SeriesTooShort {
            len: c.len(),
            needed: 2,
        });
    }

    let g_exact = Rational::from_f64(g).expect("finite");
    let mut power = Rational::from(1);
    let mut terms = Vec::with_capacity(c.len());
    for coefficient in c {
        terms.push(Rational::from(coefficient * &power));
        power *= &g_exact;
    }

    let mut k_star = 0;
    for k in 1..terms.len() - 1 {
        if terms[k].cmp_abs(&terms[k_star]) == Ordering::Less {
            k_star = k;
        }
    }
    let sum: Rational = terms[..=k_star].iter().sum();
    let omitted = Rational::from(terms[k_star + 1].abs_ref());

    let precision = precision_for(&sum, &omitted);
    let (value, _) = Float::with_val_round(precision, &sum, Round::Nearest);
    let (error_bound, _) = Float::with_val_round(precision, &omitted, Round::Nearest);
    Ok(TruncationResult {
        g,
        value,
        k_star,
        error_bound,
    })
}

fn precision_for(sum: &Rational, bound: &Rational) -> u32 {
    if *sum == 0 || *bound == 0 {
        return MIN_PRECISION;
    }
    let magnitude = |r: &Rational| i64::from(r.numer().significant_bits()) - i64::from(r.denom().significant_bits());
    let needed = magnitude(sum) - magnitude(bound) + 16;
    needed.clamp(i64::from(MIN_PRECISION), i64::from(u32::MAX >> 2)) as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{PotentialFamily, QuantumState};
    use crate::series::energy_series;

    fn series(values: &[i64]) -> EnergySeries {
        EnergySeries::new(
            PotentialFamily::CORNELL,
            QuantumState::new(0, 0),
            values.iter().map(|&v| Rational::from(v)).collect(),
        )
    }

    #[test]
    fn zero_coupling_is_the_unperturbed_value() {
        let s = energy_series(PotentialFamily::CORNELL, QuantumState::new(0, 0), 5).unwrap();
        let t = optimal_truncation(&s, 0.0).unwrap();
        assert_eq!(t.k_star, 0);
        assert_eq!(t.value_f64(), -0.25);
        assert_eq!(t.error_bound, 0);
    }

    #[test]
    fn two_term_series() {
        let t = optimal_truncation(&series(&[1, 3]), 0.5).unwrap();
        assert_eq!(t.k_star, 0);
        assert_eq!(t.value, 1);
        assert_eq!(t.error_bound, 1.5);
        let t = optimal_truncation(&series(&[-1, 3]), 0.25).unwrap();
        assert_eq!(t.k_star, 0);
        assert_eq!(t.error_bound, 0.75);
    }

    #[test]
    fn smallest_term_with_ties_to_lower_order() {
        // |terms| at g = 1/2: 8, 4, 2, 2, 2, 4
        let t = optimal_truncation(&series(&[8, -8, 8, -16, 32, -128]), 0.5).unwrap();
        assert_eq!(t.k_star, 2);
        assert_eq!(t.value, 6);
        assert_eq!(t.error_bound, 2);
    }

    #[test]
    fn last_coefficient_only_serves_as_the_bound() {
        let t = optimal_truncation(&series(&[1, 1, 1, 1]), 0.5).unwrap();
        assert_eq!(t.k_star, 2);
        assert_eq!(t.value, 1.75);
        assert_eq!(t.error_bound, 0.125);
    }

    #[test]
    fn precision_tracks_the_bound() {
        let s = energy_series(PotentialFamily::QUARTIC, QuantumState::new(0, 0), 60).unwrap();
        let t = optimal_truncation(&s, 1e-4).unwrap();
        assert_eq!(t.k_star, 59);
        assert!(t.value.prec() > MIN_PRECISION);
        let ulp = Float::with_val(64, t.value.prec()).exp2();
        let resolution = Float::with_val(64, &t.value / ulp).abs();
        assert!(resolution < Float::with_val(64, &t.error_bound / 100u32));
    }

    #[test]
    fn invalid_arguments() {
        assert!(matches!(
            optimal_truncation(&series(&[1, 2]), -1.0),
            Err(AnalysisError::InvalidArgument(_))
        ));
        assert!(matches!(
            optimal_truncation(&series(&[1]), 0.1),
            Err(AnalysisError::SeriesTooShort { .. })
        ));
    }
}
