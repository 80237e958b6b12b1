//! Triangular table of moment expansion coefficients.
//!
//! Entry `(j, k)` is the coefficient of `g^k` in `⟨x^j⟩` (Coulomb kind) or in
//! `⟨x^{2j}⟩` (oscillator kind). Columns are built in increasing `k`; column
//! `k` only depends on earlier columns and on its own lower entries.
//!
//! Coulomb kind, column `k ≥ 1`:
//!
//! ```text
//! x_0 = 0,   x_{-1} = (2 + p - 2/k) x_p^{(k-1)}
//! ε(0) x_j = α_j x_{j-2} + β_j x_{j-1} + δ(j,k)
//! δ(j,k) = -Σ_{q=1}^{k} ε(q) x_j^{(k-q)} + γ_j x_{j+p}^{(k-1)}
//! ```
//!
//! Oscillator kind, column `k ≥ 1`:
//!
//! ```text
//! x̂_0 = 0,   x̂_1 = (1/k - (1 + p))/2 · x̂_p^{(k-1)}
//! β_i x̂_{i+1} = ε(0) x̂_i - α_i x̂_{i-1} + δ(i,k)
//! δ(i,k) = -γ_i x̂_{i+p}^{(k-1)} + Σ_{q=1}^{k} ε(q) x̂_i^{(k-q)}
//! ```
//!
//! with `ε(q) = x_p^{(q-1)}/q` in both cases (Hellmann-Feynman).

use crate::error::EngineError;
use crate::exact;
use crate::potential::{eps0, PotentialFamily, PotentialKind, QuantumState};
use crate::recursion::{coefficient_table, RecursionCoefficients};
use crate::series::EnergySeries;
use rug::Rational;
use std::ops::RangeInclusive;

#[derive(Clone, Debug)]
pub struct MomentTable {
    family: PotentialFamily,
    state: QuantumState,
    order: usize,
    eps0: Rational,
    coefficients: Vec<RecursionCoefficients>,
    /// `columns[k][j - lowest_index]`.
    columns: Vec<Vec<Rational>>,
    /// `energies[k] = ε(k)`; always one longer than `columns`.
    energies: Vec<Rational>,
}

impl MomentTable {
    /// An empty table targeting coefficients up to `ε(order)`.
    pub fn new(family: PotentialFamily, state: QuantumState, order: usize) -> Self {
        let max_index = if order == 0 {
            0
        } else {
            family.column_top(order, 0)
        };
        MomentTable {
            family,
            state,
            order,
            eps0: eps0(family, state),
            coefficients: coefficient_table(family, max_index, state.l),
            columns: Vec::with_capacity(order),
            energies: vec![eps0(family, state)],
        }
    }

    /// Builds every column needed for `ε(0..=order)`.
    pub fn build(
        family: PotentialFamily,
        state: QuantumState,
        order: usize,
    ) -> Result<Self, EngineError> {
        let mut table = MomentTable::new(family, state, order);
        for k in 0..order {
            if k == 0 {
                let top = family.column_top(order, 0);
                let column = order0_column(family, state, top)?;
                table.push_column(column);
            } else {
                orderk_column(&mut table, k)?;
            }
        }
        Ok(table)
    }

    pub fn family(&self) -> PotentialFamily {
        self.family
    }

    pub fn state(&self) -> QuantumState {
        self.state
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of completed columns.
    pub fn columns(&self) -> usize {
        self.columns.len()
    }

    pub fn is_complete(&self) -> bool {
        self.columns.len() == self.order
    }

    /// Index range of column `k` in the full triangle.
    pub fn column_range(&self, k: usize) -> RangeInclusive<i64> {
        self.family.lowest_index()..=self.family.column_top(self.order, k)
    }

    pub fn get(&self, j: i64, k: usize) -> Option<&Rational> {
        let column = self.columns.get(k)?;
        let offset = usize::try_from(j - self.family.lowest_index()).ok()?;
        column.get(offset)
    }

    fn entry(&self, j: i64, k: usize) -> Result<&Rational, EngineError> {
        self.get(j, k).ok_or(EngineError::MissingEntry { j, k })
    }

    /// `ε(0..=columns())`, the coefficients fixed so far.
    pub fn energies(&self) -> &[Rational] {
        &self.energies
    }

    pub fn into_series(self) -> EnergySeries {
        EnergySeries::new(self.family, self.state, self.energies)
    }

    pub fn series(&self) -> EnergySeries {
        EnergySeries::new(self.family, self.state, self.energies.clone())
    }

    fn coefficients(&self, index: i64) -> &RecursionCoefficients {
        &self.coefficients[index as usize]
    }

    fn push_column(&mut self, column: Vec<Rational>) {
        let k = self.columns.len();
        let hf = self.family.hellmann_feynman_index();
        let offset = (hf - self.family.lowest_index()) as usize;
        let next: Rational = &column[offset] / Rational::from(k + 1);
        self.columns.push(column);
        self.energies.push(next);
    }

    /// Checks `x_0^{(0)} = 1` and `x_0^{(k)} = 0` for `k ≥ 1`.
    pub fn verify_normalization(&self) -> Result<(), EngineError> {
        for k in 0..self.columns.len() {
            let expected = if k == 0 { 1 } else { 0 };
            if *self.entry(0, k)? != expected {
                return Err(EngineError::Normalization { k });
            }
        }
        Ok(())
    }

    /// Checks `k ε(k)` against the stored Hellmann-Feynman moment of column
    /// `k - 1`.
    pub fn verify_hellmann_feynman(&self) -> Result<(), EngineError> {
        let hf = self.family.hellmann_feynman_index();
        for k in 1..self.energies.len() {
            let scaled: Rational = &self.energies[k] * Rational::from(k);
            if scaled != *self.entry(hf, k - 1)? {
                return Err(EngineError::HellmannFeynman { k });
            }
        }
        Ok(())
    }

    /// Re-evaluates the expanded hypervirial balance
    ///
    /// ```text
    /// Σ_{q=0}^{k} ε(q) x_j^{(k-q)} = α x_{j-2}^{(k)} + β x_{j-1}^{(k)} + [k≥1] γ x_{j+p}^{(k-1)}
    /// ```
    ///
    /// (with `x_{i-1}`, `x_{i+1}` in place of `x_{j-2}`, `x_{j-1}` for the
    /// oscillator kind) at every interior point of the triangle, directly
    /// from the stored entries. Returns the number of balances checked.
    pub fn verify_hypervirial(&self) -> Result<usize, EngineError> {
        let step = self.family.step();
        let mut checked = 0;
        for k in 0..self.columns.len() {
            let top = self.family.column_top(self.order, k);
            let last = match self.family.kind() {
                PotentialKind::CoulombPlusPower => top,
                PotentialKind::OscillatorPlusEvenPower => top - 1,
            };
            for j in 0..=last {
                let c = self.coefficients(j);
                let mut lhs = Rational::new();
                for q in 0..=k {
                    lhs += Rational::from(&self.energies[q] * self.entry(j, k - q)?);
                }
                let (lower, upper) = match self.family.kind() {
                    PotentialKind::CoulombPlusPower => (j - 2, j - 1),
                    PotentialKind::OscillatorPlusEvenPower => (j - 1, j + 1),
                };
                let mut rhs = Rational::new();
                if c.alpha != 0 {
                    rhs += Rational::from(&c.alpha * self.entry(lower, k)?);
                }
                rhs += Rational::from(&c.beta * self.entry(upper, k)?);
                if k >= 1 {
                    rhs += Rational::from(&c.gamma * self.entry(j + step, k - 1)?);
                }
                if lhs != rhs {
                    return Err(EngineError::HypervirialResidual { j, k });
                }
                checked += 1;
            }
        }
        Ok(checked)
    }
}

/// Order-zero moments up to index `j_max`.
///
/// Coulomb kind: `x_{-1}, x_0, ..., x_{j_max}` with `x_{-1} = -2ε(0)`,
/// `x_0 = 1`. Oscillator kind: `x̂_0, ..., x̂_{j_max}` with `x̂_0 = 1`,
/// `x̂_1 = ε(0)/2`.
pub fn order0_column(
    family: PotentialFamily,
    state: QuantumState,
    j_max: i64,
) -> Result<Vec<Rational>, EngineError> {
    if j_max < 1 {
        return Err(EngineError::InvalidColumn(format!(
            "order-0 column needs j_max >= 1, got {j_max}"
        )));
    }
    let e0 = eps0(family, state);
    let coefficients = coefficient_table(family, j_max, state.l);
    let mut column = Vec::with_capacity(j_max as usize + 2);
    match family.kind() {
        PotentialKind::CoulombPlusPower => {
            column.push(Rational::from(-2 * &e0));
            column.push(Rational::from(1));
            let inv_e0 = Rational::from(e0.recip_ref());
            for j in 1..=j_max {
                let c = &coefficients[j as usize];
                // column[j + 1] holds x_j
                let idx = j as usize + 1;
                let mut v = Rational::from(&c.alpha * &column[idx - 2]);
                v += Rational::from(&c.beta * &column[idx - 1]);
                v *= &inv_e0;
                column.push(v);
            }
        }
        PotentialKind::OscillatorPlusEvenPower => {
            column.push(Rational::from(1));
            column.push(Rational::from(&e0 / 2u32));
            for i in 1..j_max {
                let c = &coefficients[i as usize];
                let idx = i as usize;
                let mut v = Rational::from(&e0 * &column[idx]);
                v -= Rational::from(&c.alpha * &column[idx - 1]);
                v /= &c.beta;
                column.push(v);
            }
        }
    }
    Ok(column)
}

/// The inhomogeneous term `δ(j, k)` of the column-`k` recursion, built from
/// columns `0..k` of `table`.
pub fn inhomogeneous_term(table: &MomentTable, j: i64, k: usize) -> Result<Rational, EngineError> {
    if k == 0 {
        return Err(EngineError::InvalidColumn(
            "the inhomogeneous term is defined for k >= 1".into(),
        ));
    }
    if table.columns.len() < k {
        return Err(EngineError::MissingEntry { j, k: k - 1 });
    }
    let offset = usize::try_from(j - table.family.lowest_index())
        .map_err(|_| EngineError::MissingEntry { j, k: 0 })?;
    for p in 0..k {
        if table.columns[p].len() <= offset {
            return Err(EngineError::MissingEntry { j, k: p });
        }
    }
    let convolution = exact::dot(
        (1..=k).map(|q| (&table.energies[q], &table.columns[k - q][offset])),
    );
    let c = table.coefficients(j);
    let coupled = Rational::from(&c.gamma * table.entry(j + c.step, k - 1)?);
    Ok(match table.family.kind() {
        PotentialKind::CoulombPlusPower => coupled - convolution,
        PotentialKind::OscillatorPlusEvenPower => convolution - coupled,
    })
}

/// Appends column `k ≥ 1` to `table`; columns `0..k` must be complete.
pub fn orderk_column(table: &mut MomentTable, k: usize) -> Result<(), EngineError> {
    if k == 0 {
        return Err(EngineError::InvalidColumn(
            "column 0 is built by order0_column".into(),
        ));
    }
    if table.columns.len() != k {
        return Err(EngineError::InvalidColumn(format!(
            "column {k} requested but {} columns are complete",
            table.columns.len()
        )));
    }
    if k >= table.order {
        return Err(EngineError::InvalidColumn(format!(
            "column {k} is not needed for order {}",
            table.order
        )));
    }
    let top = table.family.column_top(table.order, k);
    let hf = table.family.hellmann_feynman_index();
    let p = Rational::from(table.family.power());
    let previous_hf = table.entry(hf, k - 1)?.clone();
    let mut column = Vec::with_capacity(top as usize + 2);
    match table.family.kind() {
        PotentialKind::CoulombPlusPower => {
            if table.eps0 == 0 {
                return Err(EngineError::DivisionHazard { j: 1, k });
            }
            let inv_e0 = Rational::from(table.eps0.recip_ref());
            // x_{-1} = (2 + p - 2/k) x_p^{(k-1)}
            let seed = (2 + p) - Rational::from((2u32, k as u32));
            column.push(seed * previous_hf);
            column.push(Rational::new());
            for j in 1..=top {
                let delta = inhomogeneous_term(table, j, k)?;
                let c = table.coefficients(j);
                let idx = j as usize + 1;
                let mut v = delta;
                v += Rational::from(&c.alpha * &column[idx - 2]);
                v += Rational::from(&c.beta * &column[idx - 1]);
                v *= &inv_e0;
                column.push(v);
            }
        }
        PotentialKind::OscillatorPlusEvenPower => {
            // x̂_1 = (1/k - (1 + p))/2 · x̂_p^{(k-1)}
            let seed = (Rational::from((1, k)) - (1 + p)) / 2u32;
            column.push(Rational::new());
            column.push(seed * previous_hf);
            for i in 1..top {
                let delta = inhomogeneous_term(table, i, k)?;
                let c = table.coefficients(i);
                if c.beta <= 0 {
                    return Err(EngineError::DivisionHazard { j: i, k });
                }
                let idx = i as usize;
                let mut v = delta;
                v += Rational::from(&table.eps0 * &column[idx]);
                v -= Rational::from(&c.alpha * &column[idx - 1]);
                v /= &c.beta;
                column.push(v);
            }
        }
    }
    table.push_column(column);
    Ok(())
}
