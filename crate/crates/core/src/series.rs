use crate::error::EngineError;
use crate::moments::MomentTable;
use crate::potential::{eps0, PotentialFamily, QuantumState};
use rug::{Integer, Rational};

/// Energy coefficients `ε(0..=r0)` of one state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnergySeries {
    family: PotentialFamily,
    state: QuantumState,
    coefficients: Vec<Rational>,
}

impl EnergySeries {
    /// # Panics
    ///
    /// If `coefficients` is empty.
    pub fn new(family: PotentialFamily, state: QuantumState, coefficients: Vec<Rational>) -> Self {
        assert!(!coefficients.is_empty(), "a series holds at least eps(0)");
        EnergySeries {
            family,
            state,
            coefficients,
        }
    }

    pub fn family(&self) -> PotentialFamily {
        self.family
    }

    pub fn state(&self) -> QuantumState {
        self.state
    }

    /// Highest order `r0`.
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn get(&self, k: usize) -> Option<&Rational> {
        self.coefficients.get(k)
    }

    pub fn into_coefficients(self) -> Vec<Rational> {
        self.coefficients
    }

    /// The first `r0 + 1` coefficients.
    pub fn truncated(&self, r0: usize) -> EnergySeries {
        let end = (r0 + 1).min(self.coefficients.len());
        EnergySeries::new(self.family, self.state, self.coefficients[..end].to_vec())
    }

    pub fn is_prefix_of(&self, other: &EnergySeries) -> bool {
        self.family == other.family
            && self.state == other.state
            && other.coefficients.starts_with(&self.coefficients)
    }

    /// `4^k ε(k)`, the normalization customary for quartic oscillator tables.
    pub fn scaled_by_powers_of_four(&self) -> Vec<Rational> {
        let mut scale = Integer::from(1);
        self.coefficients
            .iter()
            .map(|c| {
                let v = Rational::from(c * &scale);
                scale <<= 2;
                v
            })
            .collect()
    }

    /// Checks `sign ε(k) = (-1)^{k+1}` for every `k ≥ 1`.
    pub fn check_sign_alternation(&self) -> Result<(), EngineError> {
        for (k, c) in self.coefficients.iter().enumerate().skip(1) {
            let expected = if k % 2 == 1 {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Less
            };
            if c.cmp0() != expected {
                return Err(EngineError::SignAlternation { k });
            }
        }
        Ok(())
    }

    pub fn check_unperturbed(&self) -> bool {
        self.coefficients[0] == eps0(self.family, self.state)
    }
}

/// Perturbation coefficients `ε(0..=r0)` from the moment recursion.
pub fn energy_series(
    family: PotentialFamily,
    state: QuantumState,
    r0: usize,
) -> Result<EnergySeries, EngineError> {
    Ok(MomentTable::build(family, state, r0)?.into_series())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(values: &[i64]) -> Vec<Rational> {
        values.iter().map(|&v| Rational::from(v)).collect()
    }

    #[test]
    fn cornell_ground_state_through_seventh_order() {
        let series = energy_series(PotentialFamily::CORNELL, QuantumState::new(0, 0), 7).unwrap();
        let mut expected = vec![Rational::from((-1, 4))];
        expected.extend(ints(&[3, -12, 216, -6360, 245952, -11433984, 610773696]));
        assert_eq!(series.coefficients(), expected.as_slice());
    }

    #[test]
    fn cornell_1p_low_orders() {
        let series = energy_series(PotentialFamily::CORNELL, QuantumState::new(0, 1), 3).unwrap();
        let mut expected = vec![Rational::from((-1, 16))];
        expected.extend(ints(&[10, -480, 99840]));
        assert_eq!(series.coefficients(), expected.as_slice());
    }

    #[test]
    fn quartic_2s_low_orders() {
        let series = energy_series(PotentialFamily::QUARTIC, QuantumState::new(1, 0), 3).unwrap();
        let expected = [
            Rational::from(7),
            Rational::from((75, 4)),
            Rational::from((-1575, 16)),
            Rational::from((66825, 64)),
        ];
        assert_eq!(series.coefficients(), expected.as_slice());
        assert_eq!(series.scaled_by_powers_of_four(), ints(&[7, 75, -1575, 66825]));
    }

    #[test]
    fn order_zero_is_just_the_unperturbed_value() {
        for family in [PotentialFamily::CORNELL, PotentialFamily::QUARTIC] {
            let state = QuantumState::new(2, 1);
            let series = energy_series(family, state, 0).unwrap();
            assert_eq!(series.coefficients(), &[eps0(family, state)]);
            assert!(series.check_unperturbed());
        }
    }

    #[test]
    fn sign_check_flags_wrong_sign() {
        let bad = EnergySeries::new(
            PotentialFamily::CORNELL,
            QuantumState::new(0, 0),
            ints(&[-1, 3, 12]),
        );
        assert_eq!(bad.check_sign_alternation(), Err(EngineError::SignAlternation { k: 2 }));
    }
}
