//! Coefficients of the hypervirial moment relation.
//!
//! Substituting `U(x)` into the hypervirial identity for `Θ = x^{j+1} d/dx`
//! and dividing by `2(j+1)` gives, for the Coulomb kind,
//!
//! ```text
//! ε ⟨x^j⟩ = α_j ⟨x^{j-2}⟩ + β_j ⟨x^{j-1}⟩ + g γ_j ⟨x^{j+p}⟩
//! α_j = j((2l+1)² - j²)/(4j+4),  β_j = -(2j+1)/(2j+2),  γ_j = (2j+2+p)/(2j+2)
//! ```
//!
//! and for the oscillator kind, with `j = 2i` and `x̂_i = ⟨x^{2i}⟩`,
//!
//! ```text
//! ε x̂_i = α_i x̂_{i-1} + β_i x̂_{i+1} + g γ_i x̂_{i+p}
//! α_i = i((2l+1)² - 4i²)/(4i+2),  β_i = (2i+2)/(2i+1),  γ_i = (2i+1+p)/(2i+1)
//! ```

use crate::error::EngineError;
use crate::potential::{PotentialFamily, PotentialKind};
use rug::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecursionCoefficients {
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
    /// Index offset of the moment multiplied by `g`.
    pub step: i64,
}

pub fn recursion_coefficients(
    family: PotentialFamily,
    index: i64,
    l: u32,
) -> Result<RecursionCoefficients, EngineError> {
    if index < 0 {
        return Err(EngineError::InvalidIndex { index });
    }
    let p = i64::from(family.power());
    let two_l_plus_one_sq = (2 * i64::from(l) + 1).pow(2);
    let coefficients = match family.kind() {
        PotentialKind::CoulombPlusPower => {
            let j = index;
            RecursionCoefficients {
                alpha: Rational::from((j * (two_l_plus_one_sq - j * j), 4 * j + 4)),
                beta: Rational::from((-(2 * j + 1), 2 * j + 2)),
                gamma: Rational::from((2 * j + 2 + p, 2 * j + 2)),
                step: p,
            }
        }
        PotentialKind::OscillatorPlusEvenPower => {
            let i = index;
            RecursionCoefficients {
                alpha: Rational::from((i * (two_l_plus_one_sq - 4 * i * i), 4 * i + 2)),
                beta: Rational::from((2 * i + 2, 2 * i + 1)),
                gamma: Rational::from((2 * i + 1 + p, 2 * i + 1)),
                step: p,
            }
        }
    };
    Ok(coefficients)
}

/// Coefficients for indices `0..=max_index`, precomputed once per table.
pub(crate) fn coefficient_table(
    family: PotentialFamily,
    max_index: i64,
    l: u32,
) -> Vec<RecursionCoefficients> {
    (0..=max_index.max(0))
        .map(|index| recursion_coefficients(family, index, l).expect("index is non-negative"))
        .collect()
}
