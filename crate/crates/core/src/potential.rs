//! Potential families, bound-state labels and physical parameter scaling.
//!
//! Every family is written in the scaled radial form
//! `H = -d²/dx² + V₀(x) + l(l+1)/x² + g·V₁(x)`:
//!
//! * [`PotentialKind::CoulombPlusPower`]: `V₀ = -1/x`, `V₁ = x^p` (`p ≥ 1`;
//!   the Cornell potential is `p = 1`).
//! * [`PotentialKind::OscillatorPlusEvenPower`]: `V₀ = x²`, `V₁ = x^{2p}`
//!   (`p ≥ 2`; the quartic anharmonic oscillator is `p = 2`).

use crate::error::ModelError;
use rug::Rational;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    CoulombPlusPower,
    OscillatorPlusEvenPower,
}

impl PotentialKind {
    fn min_power(self) -> u32 {
        match self {
            PotentialKind::CoulombPlusPower => 1,
            PotentialKind::OscillatorPlusEvenPower => 2,
        }
    }
}

impl fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PotentialKind::CoulombPlusPower => "coulomb_plus_power",
            PotentialKind::OscillatorPlusEvenPower => "oscillator_plus_even_power",
        })
    }
}

#[derive(Deserialize)]
struct RawFamily {
    kind: PotentialKind,
    p: u32,
}

/// A scaled potential: unperturbed part fixed by `kind`, perturbation
/// exponent fixed by `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawFamily")]
pub struct PotentialFamily {
    kind: PotentialKind,
    p: u32,
}

impl TryFrom<RawFamily> for PotentialFamily {
    type Error = ModelError;

    fn try_from(raw: RawFamily) -> Result<Self, Self::Error> {
        PotentialFamily::new(raw.kind, raw.p)
    }
}

impl PotentialFamily {
    /// `-1/x + l(l+1)/x² + g·x`.
    pub const CORNELL: PotentialFamily = PotentialFamily {
        kind: PotentialKind::CoulombPlusPower,
        p: 1,
    };

    /// `x² + l(l+1)/x² + g·x⁴`.
    pub const QUARTIC: PotentialFamily = PotentialFamily {
        kind: PotentialKind::OscillatorPlusEvenPower,
        p: 2,
    };

    pub fn new(kind: PotentialKind, p: u32) -> Result<Self, ModelError> {
        if p < kind.min_power() {
            return Err(ModelError::InvalidPower {
                kind,
                p,
                min: kind.min_power(),
            });
        }
        Ok(PotentialFamily { kind, p })
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn power(&self) -> u32 {
        self.p
    }

    pub fn is_coulomb(&self) -> bool {
        self.kind == PotentialKind::CoulombPlusPower
    }

    /// True for the two families with tabulated reference values.
    pub fn is_reference(&self) -> bool {
        *self == Self::CORNELL || *self == Self::QUARTIC
    }

    /// Offset between a moment index and the moment multiplied by `g` in the
    /// hypervirial relation. Equal to `p` for both kinds (in `j` for the
    /// Coulomb kind, in `i = j/2` for the oscillator kind).
    pub fn step(&self) -> i64 {
        i64::from(self.p)
    }

    /// Index of the moment `⟨V₁⟩ = dε/dg`.
    pub fn hellmann_feynman_index(&self) -> i64 {
        i64::from(self.p)
    }

    /// Smallest moment index stored in a table column.
    pub fn lowest_index(&self) -> i64 {
        match self.kind {
            PotentialKind::CoulombPlusPower => -1,
            PotentialKind::OscillatorPlusEvenPower => 0,
        }
    }

    /// Largest moment index needed in column `k` to reach order `r0`.
    ///
    /// `r0 - k` (Cornell) and `r0 - k + 1` (quartic); in general
    /// `p (r0 - k)` and `(p - 1)(r0 - k) + 1`.
    pub fn column_top(&self, r0: usize, k: usize) -> i64 {
        debug_assert!(k < r0);
        let span = (r0 - k) as i64;
        let p = i64::from(self.p);
        match self.kind {
            PotentialKind::CoulombPlusPower => p * span,
            PotentialKind::OscillatorPlusEvenPower => (p - 1) * span + 1,
        }
    }

    /// Short CLI-style name.
    pub fn label(&self) -> String {
        match (self.kind, self.p) {
            (PotentialKind::CoulombPlusPower, 1) => "cornell".to_owned(),
            (PotentialKind::OscillatorPlusEvenPower, 2) => "quartic".to_owned(),
            (PotentialKind::CoulombPlusPower, p) => format!("coulomb-p{p}"),
            (PotentialKind::OscillatorPlusEvenPower, p) => format!("oscillator-p{p}"),
        }
    }
}

impl fmt::Display for PotentialFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PotentialKind::CoulombPlusPower => {
                write!(f, "-1/x + l(l+1)/x^2 + g x^{}", self.p)
            }
            PotentialKind::OscillatorPlusEvenPower => {
                write!(f, "x^2 + l(l+1)/x^2 + g x^{}", 2 * self.p)
            }
        }
    }
}

/// Radial and orbital quantum numbers of a bound state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuantumState {
    pub n: u32,
    pub l: u32,
}

impl QuantumState {
    pub const fn new(n: u32, l: u32) -> Self {
        QuantumState { n, l }
    }

    /// Spectroscopic label such as `1S`, `2S`, `1P`.
    pub fn label(&self) -> String {
        const LETTERS: &[u8] = b"SPDFGHIKLMNOQRTUVWXYZ";
        let letter = LETTERS
            .get(self.l as usize)
            .map(|&b| (b as char).to_string())
            .unwrap_or_else(|| format!("[l={}]", self.l));
        format!("{}{}", self.n + 1, letter)
    }
}

impl fmt::Display for QuantumState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}, l={}", self.n, self.l)
    }
}

/// Unperturbed eigenvalue: `-1/(4(n+l+1)²)` for the Coulomb kind and
/// `3 + 4n + 2l` for the oscillator kind.
pub fn eps0(family: PotentialFamily, state: QuantumState) -> Rational {
    match family.kind() {
        PotentialKind::CoulombPlusPower => {
            let big_n = u64::from(state.n) + u64::from(state.l) + 1;
            Rational::from((-1, 4 * big_n * big_n))
        }
        PotentialKind::OscillatorPlusEvenPower => {
            Rational::from(3 + 4 * u64::from(state.n) + 2 * u64::from(state.l))
        }
    }
}

/// Physical potential strengths.
///
/// For the Coulomb kind `V(r) = -α/r + β r`; for the oscillator kind
/// `V(r) = a r² + b r⁴`. `unperturbed` holds `α` (resp. `a`) and
/// `perturbation` holds `β` (resp. `b`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub mu: f64,
    pub unperturbed: f64,
    pub perturbation: f64,
}

/// Dimensionless coupling and the factor converting a scaled eigenvalue
/// `ε` into a physical energy `E = energy_scale · ε`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledCoupling {
    pub g: f64,
    pub energy_scale: f64,
}

impl ScaledCoupling {
    pub fn energy(&self, scaled_eigenvalue: f64) -> f64 {
        self.energy_scale * scaled_eigenvalue
    }
}

/// Converts physical strengths to the dimensionless coupling.
///
/// Cornell: `g = β/((2μ)² α³)`, `E = 2μα² ε`.
/// Quartic: `g = b/(√(2μ) a^{3/2})`, `E = √(a/(2μ)) ε`.
pub fn physical_to_scaled(
    kind: PotentialKind,
    params: PhysicalParams,
) -> Result<ScaledCoupling, ModelError> {
    let PhysicalParams {
        mu,
        unperturbed,
        perturbation,
    } = params;
    if !(mu.is_finite() && mu > 0.0) {
        return Err(ModelError::InvalidParameter { name: "mu", value: mu });
    }
    if !(unperturbed.is_finite() && unperturbed > 0.0) {
        return Err(ModelError::InvalidParameter {
            name: "unperturbed strength",
            value: unperturbed,
        });
    }
    if !(perturbation.is_finite() && perturbation >= 0.0) {
        return Err(ModelError::InvalidParameter {
            name: "perturbation strength",
            value: perturbation,
        });
    }
    let two_mu = 2.0 * mu;
    Ok(match kind {
        PotentialKind::CoulombPlusPower => ScaledCoupling {
            g: perturbation / (two_mu * two_mu * unperturbed.powi(3)),
            energy_scale: two_mu * unperturbed * unperturbed,
        },
        PotentialKind::OscillatorPlusEvenPower => ScaledCoupling {
            g: perturbation / (two_mu.sqrt() * unperturbed.powf(1.5)),
            energy_scale: (unperturbed / two_mu).sqrt(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unperturbed_eigenvalues() {
        let cornell = PotentialFamily::CORNELL;
        let quartic = PotentialFamily::QUARTIC;
        assert_eq!(eps0(cornell, QuantumState::new(0, 0)), Rational::from((-1, 4)));
        assert_eq!(eps0(cornell, QuantumState::new(1, 0)), Rational::from((-1, 16)));
        assert_eq!(eps0(cornell, QuantumState::new(0, 1)), Rational::from((-1, 16)));
        assert_eq!(eps0(quartic, QuantumState::new(0, 1)), 5);
        assert_eq!(eps0(quartic, QuantumState::new(1, 0)), 7);
    }

    #[test]
    fn family_power_bounds() {
        assert!(PotentialFamily::new(PotentialKind::CoulombPlusPower, 0).is_err());
        assert!(PotentialFamily::new(PotentialKind::OscillatorPlusEvenPower, 1).is_err());
        assert_eq!(
            PotentialFamily::new(PotentialKind::CoulombPlusPower, 1).unwrap(),
            PotentialFamily::CORNELL
        );
        let bad: Result<PotentialFamily, _> =
            serde_json::from_str(r#"{"kind":"oscillator_plus_even_power","p":1}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn column_widths_follow_the_triangle() {
        assert_eq!(PotentialFamily::CORNELL.column_top(7, 0), 7);
        assert_eq!(PotentialFamily::CORNELL.column_top(7, 6), 1);
        assert_eq!(PotentialFamily::QUARTIC.column_top(7, 0), 8);
        assert_eq!(PotentialFamily::QUARTIC.column_top(7, 6), 2);
        let coulomb3 = PotentialFamily::new(PotentialKind::CoulombPlusPower, 3).unwrap();
        assert_eq!(coulomb3.column_top(5, 4), 3);
        let osc3 = PotentialFamily::new(PotentialKind::OscillatorPlusEvenPower, 3).unwrap();
        assert_eq!(osc3.column_top(5, 4), 3);
    }

    #[test]
    fn scaling_examples() {
        let hydrogen = physical_to_scaled(
            PotentialKind::CoulombPlusPower,
            PhysicalParams { mu: 0.5, unperturbed: 1.0, perturbation: 0.0 },
        )
        .unwrap();
        assert_eq!(hydrogen.g, 0.0);
        assert_eq!(hydrogen.energy(-0.25), -0.25);

        let unit = physical_to_scaled(
            PotentialKind::OscillatorPlusEvenPower,
            PhysicalParams { mu: 0.5, unperturbed: 1.0, perturbation: 1.0 },
        )
        .unwrap();
        assert_eq!(unit.g, 1.0);
        assert_eq!(unit.energy_scale, 1.0);

        let cornell = physical_to_scaled(
            PotentialKind::CoulombPlusPower,
            PhysicalParams { mu: 1.0, unperturbed: 1.0, perturbation: 4.0 },
        )
        .unwrap();
        assert_eq!(cornell.g, 1.0);
    }

    #[test]
    fn scaling_rejects_non_positive_strength() {
        for alpha in [0.0, -1.0, f64::NAN] {
            let r = physical_to_scaled(
                PotentialKind::CoulombPlusPower,
                PhysicalParams { mu: 1.0, unperturbed: alpha, perturbation: 1.0 },
            );
            assert!(matches!(r, Err(ModelError::InvalidParameter { .. })));
        }
        let r = physical_to_scaled(
            PotentialKind::OscillatorPlusEvenPower,
            PhysicalParams { mu: 1.0, unperturbed: 1.0, perturbation: -0.5 },
        );
        assert!(r.is_err());
    }

    #[test]
    fn state_labels() {
        assert_eq!(QuantumState::new(0, 0).label(), "1S");
        assert_eq!(QuantumState::new(1, 0).label(), "2S");
        assert_eq!(QuantumState::new(0, 1).label(), "1P");
    }
}
