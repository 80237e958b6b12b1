//! Rayleigh-Schrödinger perturbation theory for nodeless states, carried out
//! on an explicit polynomial-times-envelope wavefunction.
//!
//! The order-`k` correction is written `y_k = f(x) P_k(x)` with the
//! unperturbed envelope `f`. Dividing the order-`k` equation
//!
//! ```text
//! (H₀ - ε(0)) y_k = Σ_{q=1}^{k} ε(q) y_{k-q} - V₁ y_{k-1}
//! ```
//!
//! by `f` leaves a linear relation between polynomial coefficients that is
//! triangular once `P_k(0) = 0` (intermediate normalization) is imposed.
//!
//! * Coulomb kind, `f = x^{l+1} e^{-cx}`, `c = 1/(2(l+1))`, `P = Σ a_m x^m`:
//!   `[x^s]: -(s+2)(s+2l+3) a_{s+2} + 2c(s+1) a_{s+1} = RHS_s`, `s ≥ -1`.
//! * Oscillator kind, `f = x^{l+1} e^{-x²/2}`, `P = Σ a_m x^{2m}`:
//!   `[x^{2s}]: -2(s+1)(2s+2l+3) a_{s+1} + 4s a_s = RHS_s`, `s ≥ 0`.
//!
//! Nothing here touches the moment recursion; the two computations share
//! only the scalar type and the unperturbed eigenvalue.

use crate::error::OracleError;
use crate::potential::{eps0, PotentialFamily, PotentialKind, QuantumState};
use crate::series::EnergySeries;
use rug::Rational;

/// Default cap on the order accepted by [`rspt_series`].
pub const DEFAULT_ORACLE_LIMIT: usize = 30;

/// Unperturbed envelope of a nodeless state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Envelope {
    /// `x^{l+1} e^{-x/(2N)}`, `N = l + 1`.
    CoulombExponential { big_n: u32 },
    /// `x^{l+1} e^{-x²/2}`.
    Gaussian,
}

/// Perturbed wavefunction coefficients, `y = envelope · Σ_k g^k P_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WavefunctionAnsatz {
    pub family: PotentialFamily,
    pub l: u32,
    pub envelope: Envelope,
    /// `corrections[k][m]` is the coefficient of `x^m` (Coulomb kind) or
    /// `x^{2m}` (oscillator kind) in `P_k`.
    pub corrections: Vec<Vec<Rational>>,
}

/// Energy coefficients of the nodeless state `(0, l)` up to order `r0`.
pub fn rspt_series(family: PotentialFamily, l: u32, r0: usize) -> Result<EnergySeries, OracleError> {
    rspt_series_with_limit(family, l, r0, DEFAULT_ORACLE_LIMIT)
}

pub fn rspt_series_with_limit(
    family: PotentialFamily,
    l: u32,
    r0: usize,
    limit: usize,
) -> Result<EnergySeries, OracleError> {
    if r0 > limit {
        return Err(OracleError::OrderLimit { order: r0, limit });
    }
    Ok(rspt_expand(family, QuantumState::new(0, l), r0)?.0)
}

/// Runs the expansion and also returns the wavefunction corrections.
pub fn rspt_expand(
    family: PotentialFamily,
    state: QuantumState,
    r0: usize,
) -> Result<(EnergySeries, WavefunctionAnsatz), OracleError> {
    if state.n != 0 {
        return Err(OracleError::UnsupportedState { n: state.n });
    }
    let l = state.l;
    let mut energies = vec![eps0(family, state)];
    let mut corrections: Vec<Vec<Rational>> = vec![vec![Rational::from(1)]];
    for k in 1..=r0 {
        let (energy, poly) = match family.kind() {
            PotentialKind::CoulombPlusPower => coulomb_order(family, l, k, &energies, &corrections)?,
            PotentialKind::OscillatorPlusEvenPower => {
                oscillator_order(family, l, k, &energies, &corrections)?
            }
        };
        energies.push(energy);
        corrections.push(poly);
    }
    let envelope = match family.kind() {
        PotentialKind::CoulombPlusPower => Envelope::CoulombExponential { big_n: l + 1 },
        PotentialKind::OscillatorPlusEvenPower => Envelope::Gaussian,
    };
    Ok((
        EnergySeries::new(family, state, energies),
        WavefunctionAnsatz {
            family,
            l,
            envelope,
            corrections,
        },
    ))
}

fn coeff(poly: &[Rational], m: i64) -> Option<&Rational> {
    usize::try_from(m).ok().and_then(|m| poly.get(m))
}

/// `[x^s]` of `Σ_{q=1}^{k} ε(q) P_{k-q} - x^{shift} P_{k-1}`, leaving out the
/// `ε(k) P_0` term (unknown while solving).
fn known_rhs(
    s: i64,
    shift: i64,
    k: usize,
    energies: &[Rational],
    corrections: &[Vec<Rational>],
) -> Rational {
    let mut rhs = Rational::new();
    for q in 1..k {
        if let Some(a) = coeff(&corrections[k - q], s) {
            rhs += Rational::from(&energies[q] * a);
        }
    }
    if let Some(a) = coeff(&corrections[k - 1], s - shift) {
        rhs -= a;
    }
    rhs
}

fn check_counting(k: usize, unknowns: usize, equations: usize) -> Result<(), OracleError> {
    if unknowns != equations {
        return Err(OracleError::Counting {
            order: k,
            unknowns,
            equations,
        });
    }
    Ok(())
}

fn coulomb_order(
    family: PotentialFamily,
    l: u32,
    k: usize,
    energies: &[Rational],
    corrections: &[Vec<Rational>],
) -> Result<(Rational, Vec<Rational>), OracleError> {
    let p = i64::from(family.power());
    let l = i64::from(l);
    // c = 1/(2(l+1))
    let c = Rational::from((1, 2 * (l + 1)));
    let previous_degree = corrections[k - 1].len() as i64 - 1;
    let degree = previous_degree + p + 1;
    // Unknowns a_1..a_degree and ε(k); equations [x^s] for s = -1..degree-1.
    check_counting(k, degree as usize + 1, (degree + 1) as usize)?;

    let lhs_upper = |s: i64| Rational::from((s + 2) * (s + 2 * l + 3));
    let lhs_lower = |s: i64| Rational::from(2 * (s + 1)) * &c;

    let mut a = vec![Rational::new(); degree as usize + 2];
    for s in (1..degree).rev() {
        // lhs_lower(s) a_{s+1} = RHS_s + lhs_upper(s) a_{s+2}
        let mut v = known_rhs(s, p, k, energies, corrections);
        v += lhs_upper(s) * &a[(s + 2) as usize];
        v /= lhs_lower(s);
        a[(s + 1) as usize] = v;
    }
    // [x^{-1}]: -(2l+2) a_1 = 0
    a[1] = Rational::new();
    // [x^0]: -2(2l+3) a_2 + 2c a_1 = ε(k) + known
    let mut energy = -lhs_upper(0) * &a[2];
    energy += lhs_lower(0) * &a[1];
    energy -= known_rhs(0, p, k, energies, corrections);
    a.truncate(degree as usize + 1);

    let mut all_energies = energies.to_vec();
    all_energies.push(energy.clone());
    for s in -1..=degree + 1 {
        let mut lhs = -lhs_upper(s) * coeff(&a, s + 2).cloned().unwrap_or_default();
        if s + 1 >= 0 {
            lhs += lhs_lower(s) * coeff(&a, s + 1).cloned().unwrap_or_default();
        }
        let mut rhs = known_rhs(s, p, k, &all_energies, corrections);
        if s == 0 {
            rhs += &energy;
        }
        if lhs != rhs {
            return Err(OracleError::Residual {
                order: k,
                power: s,
            });
        }
    }
    Ok((energy, a))
}

fn oscillator_order(
    family: PotentialFamily,
    l: u32,
    k: usize,
    energies: &[Rational],
    corrections: &[Vec<Rational>],
) -> Result<(Rational, Vec<Rational>), OracleError> {
    let p = i64::from(family.power());
    let l = i64::from(l);
    let previous_degree = corrections[k - 1].len() as i64 - 1;
    let degree = previous_degree + p;
    // Unknowns a_1..a_degree and ε(k); equations [x^{2s}] for s = 0..degree.
    check_counting(k, degree as usize + 1, (degree + 1) as usize)?;

    let lhs_upper = |s: i64| Rational::from(2 * (s + 1) * (2 * s + 2 * l + 3));
    let lhs_diag = |s: i64| Rational::from(4 * s);

    let mut a = vec![Rational::new(); degree as usize + 2];
    for s in (1..=degree).rev() {
        // 4s a_s = RHS_s + 2(s+1)(2s+2l+3) a_{s+1}
        let mut v = known_rhs(s, p, k, energies, corrections);
        v += lhs_upper(s) * &a[(s + 1) as usize];
        v /= lhs_diag(s);
        a[s as usize] = v;
    }
    // [x^0]: -2(2l+3) a_1 = ε(k) + known
    let energy = -lhs_upper(0) * &a[1] - known_rhs(0, p, k, energies, corrections);
    a.truncate(degree as usize + 1);

    let mut all_energies = energies.to_vec();
    all_energies.push(energy.clone());
    for s in 0..=degree + 1 {
        let lhs = -lhs_upper(s) * coeff(&a, s + 1).cloned().unwrap_or_default()
            + lhs_diag(s) * coeff(&a, s).cloned().unwrap_or_default();
        let mut rhs = known_rhs(s, p, k, &all_energies, corrections);
        if s == 0 {
            rhs += &energy;
        }
        if lhs != rhs {
            return Err(OracleError::Residual {
                order: k,
                power: 2 * s,
            });
        }
    }
    Ok((energy, a))
}
