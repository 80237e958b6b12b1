//! Direct solution of `-y'' + U(x) y = ε y`, `y(0) = 0`, by shooting.
//!
//! A Numerov integration on a uniform grid selects the state by its node
//! count and brackets the eigenvalue to `f64` accuracy. The bracket is then
//! narrowed to the requested tolerance by shooting with the convergent power
//! series of the regular solution, evaluated at a boundary `X` far enough out
//! that the Dirichlet condition `y(X) = 0` shifts the eigenvalue by less than
//! the tolerance:
//!
//! ```text
//! Coulomb kind:    y = x^{l+1} Σ c_m x^m,
//!                  m(m+2l+1) c_m = -c_{m-1} - ε c_{m-2} + g c_{m-p-2}
//! oscillator kind: y = x^{l+1} Σ c_m x^{2m},
//!                  2m(2m+2l+1) c_m = -ε c_{m-1} + c_{m-2} + g c_{m-p-1}
//! ```

use crate::error::AnalysisError;
use crate::potential::{eps0, PotentialFamily, PotentialKind, QuantumState};
use rug::float::Round;
use rug::ops::PowAssign;
use rug::{Assign, Float};

#[derive(Clone, Debug, PartialEq)]
pub struct SolverSettings {
    /// Outer boundary of the Numerov grid.
    pub x_max: f64,
    pub step: f64,
    /// Relative tolerance on the eigenvalue.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Narrow the Numerov bracket with the series shooting.
    pub refine: bool,
}

impl SolverSettings {
    /// `x_max = 40(n+l+1)` (Coulomb kind) or `10 + 2(n+l)` (oscillator
    /// kind), `h = 1e-3`, relative tolerance `1e-10`.
    pub fn for_state(family: PotentialFamily, state: QuantumState) -> Self {
        let nl = f64::from(state.n + state.l);
        let x_max = match family.kind() {
            PotentialKind::CoulombPlusPower => 40.0 * (nl + 1.0),
            PotentialKind::OscillatorPlusEvenPower => 10.0 + 2.0 * nl,
        };
        SolverSettings {
            x_max,
            step: 1e-3,
            tolerance: 1e-10,
            max_iterations: 2000,
            refine: true,
        }
    }

    fn validate(&self) -> Result<(), AnalysisError> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(AnalysisError::InvalidArgument(format!("{name} must be positive, got {v}")))
            }
        };
        positive("x_max", self.x_max)?;
        positive("step", self.step)?;
        positive("tolerance", self.tolerance)?;
        if self.step * 4.0 > self.x_max {
            return Err(AnalysisError::InvalidArgument(format!(
                "step {} is too coarse for x_max {}",
                self.step, self.x_max
            )));
        }
        if self.max_iterations == 0 {
            return Err(AnalysisError::InvalidArgument("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirectSolution {
    pub value: Float,
    /// Midpoint of the final Numerov bracket.
    pub numerov_value: f64,
    /// Sign changes of the Numerov solution in `(0, x_max)` at the lower end
    /// of the bracket.
    pub nodes: usize,
    /// Boundary used by the series shooting, if it ran.
    pub series_boundary: Option<f64>,
}

impl DirectSolution {
    pub fn value_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

#[derive(Clone, Copy, Debug)]
struct Problem {
    kind: PotentialKind,
    p: i32,
    l: u32,
    g: f64,
}

impl Problem {
    fn new(family: PotentialFamily, l: u32, g: f64) -> Self {
        Problem {
            kind: family.kind(),
            p: family.power() as i32,
            l,
            g,
        }
    }

    fn potential(&self, x: f64) -> f64 {
        let centrifugal = f64::from(self.l * (self.l + 1)) / (x * x);
        match self.kind {
            PotentialKind::CoulombPlusPower => -1.0 / x + centrifugal + self.g * x.powi(self.p),
            PotentialKind::OscillatorPlusEvenPower => {
                x * x + centrifugal + self.g * x.powi(2 * self.p)
            }
        }
    }

    /// Regular solution near the origin from the first terms of its series.
    fn small_x(&self, x: f64, e: f64) -> f64 {
        let l = f64::from(self.l);
        let p = self.p as usize;
        let mut c = [0.0f64; 8];
        c[0] = 1.0;
        let mut sum = 1.0;
        let (t, lag) = match self.kind {
            PotentialKind::CoulombPlusPower => (x, p + 2),
            PotentialKind::OscillatorPlusEvenPower => (x * x, p + 1),
        };
        let mut power = 1.0;
        for m in 1..c.len() {
            let mf = m as f64;
            let back = |i: usize| if m >= i { c[m - i] } else { 0.0 };
            c[m] = match self.kind {
                PotentialKind::CoulombPlusPower => {
                    (-back(1) - e * back(2) + self.g * back(lag)) / (mf * (mf + 2.0 * l + 1.0))
                }
                PotentialKind::OscillatorPlusEvenPower => {
                    (-e * back(1) + back(2) + self.g * back(lag))
                        / (2.0 * mf * (2.0 * mf + 2.0 * l + 1.0))
                }
            };
            power *= t;
            sum += c[m] * power;
        }
        x.powi(self.l as i32 + 1) * sum
    }
}

/// Numerov solution `y(x_i)`, `x_i = i·step`, `i = 0..=N`, unnormalized.
pub fn numerov_solution(
    family: PotentialFamily,
    l: u32,
    g: f64,
    energy: f64,
    settings: &SolverSettings,
) -> Vec<f64> {
    let problem = Problem::new(family, l, g);
    let mut y = Vec::new();
    integrate(&problem, energy, settings, |v| y.push(v));
    y
}

/// Sign changes in the interior of `values`, ignoring exact zeros.
pub fn count_nodes(values: &[f64]) -> usize {
    let mut nodes = 0;
    let mut last = 0.0f64;
    for &v in values {
        if v != 0.0 {
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                nodes += 1;
            }
            last = v;
        }
    }
    nodes
}

/// Runs the Numerov recursion, handing every grid value to `visit`. Values
/// are rescaled when they grow large, which preserves signs.
fn integrate(problem: &Problem, e: f64, settings: &SolverSettings, mut visit: impl FnMut(f64)) {
    let h = settings.step;
    let n = (settings.x_max / h).round() as usize;
    let h2 = h * h / 12.0;
    let f = |i: usize| problem.potential(i as f64 * h) - e;
    visit(0.0);
    let mut y_prev = problem.small_x(h, e);
    let mut y = problem.small_x(2.0 * h, e);
    visit(y_prev);
    visit(y);
    let mut f_prev = f(1);
    let mut f_cur = f(2);
    for i in 2..n {
        let f_next = f(i + 1);
        let mut y_next =
            (2.0 * (1.0 + 5.0 * h2 * f_cur) * y - (1.0 - h2 * f_prev) * y_prev) / (1.0 - h2 * f_next);
        let scale = y_next.abs();
        if scale > 1e200 {
            y_next /= scale;
            y /= scale;
        }
        visit(y_next);
        y_prev = y;
        y = y_next;
        f_prev = f_cur;
        f_cur = f_next;
    }
}

fn nodes_at(problem: &Problem, e: f64, settings: &SolverSettings) -> usize {
    let mut nodes = 0;
    let mut last = 0.0f64;
    integrate(problem, e, settings, |v| {
        if v != 0.0 {
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                nodes += 1;
            }
            last = v;
        }
    });
    nodes
}

/// Eigenvalue of the state with `state.n` interior nodes at coupling `g`.
pub fn direct_eigenvalue(
    family: PotentialFamily,
    state: QuantumState,
    g: f64,
    settings: &SolverSettings,
) -> Result<DirectSolution, AnalysisError> {
    if !(g.is_finite() && g >= 0.0) {
        return Err(AnalysisError::InvalidArgument(format!(
            "coupling must be finite and non-negative, got {g}"
        )));
    }
    settings.validate()?;
    let problem = Problem::new(family, state.l, g);
    let n = state.n as usize;
    let e0 = eps0(family, state).to_f64();
    let above = |e: f64| nodes_at(&problem, e, settings) > n;

    // Eigenvalues only rise with g ≥ 0 and with a finite box.
    let mut lo = e0 - 0.5 * e0.abs().max(1.0);
    let mut width = 0.25 * e0.abs().max(1.0);
    let mut hi = e0 + width;
    let mut expansions = 0;
    while above(lo) {
        lo -= width;
        expansions += 1;
        if expansions > 60 {
            return Err(AnalysisError::BracketNotFound(format!("no energy below the state near {e0}")));
        }
    }
    while !above(hi) {
        width *= 2.0;
        hi += width;
        expansions += 1;
        if expansions > 60 || !hi.is_finite() {
            return Err(AnalysisError::BracketNotFound(format!(
                "state with {n} nodes not found below {hi}"
            )));
        }
    }

    let numerov_tolerance = settings.tolerance.max(1e-13);
    let mut iterations = 0;
    while hi - lo > numerov_tolerance * lo.abs().max(hi.abs()).max(1e-3) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
        if iterations >= settings.max_iterations {
            return Err(AnalysisError::NonConvergence(format!(
                "Numerov bisection stopped at [{lo}, {hi}]"
            )));
        }
    }
    let numerov_value = 0.5 * (lo + hi);
    let nodes = count_nodes(&numerov_solution(family, state.l, g, lo, settings));

    if !settings.refine {
        return Ok(DirectSolution {
            value: Float::with_val(53, numerov_value),
            numerov_value,
            nodes,
            series_boundary: None,
        });
    }
    let (value, boundary) = refine(&problem, numerov_value, settings)?;
    Ok(DirectSolution {
        value,
        numerov_value,
        nodes,
        series_boundary: Some(boundary),
    })
}

/// Boundary beyond which the bound state has decayed by `e^{-target}`
/// (WKB estimate `2∫κ dx ≥ target` measured from the outer turning point).
fn boundary_for(problem: &Problem, e: f64, target: f64) -> f64 {
    let dx = 1e-3;
    let mut x = dx;
    let mut integral = 0.0;
    loop {
        let excess = problem.potential(x) - e;
        if excess <= 0.0 {
            integral = 0.0;
        } else {
            integral += 2.0 * excess.sqrt() * dx;
        }
        if integral >= target {
            return x;
        }
        x += dx;
    }
}

struct SeriesShooter {
    problem: Problem,
    boundary: f64,
    precision: u32,
}

/// Sum of the series at the boundary together with its largest term's
/// binary exponent.
struct Evaluation {
    sum: Float,
    max_exp: i32,
    terms: usize,
}

impl Evaluation {
    /// Whether cancellation may have destroyed the sign of the sum.
    fn reliable(&self, precision: u32) -> bool {
        if self.sum.is_zero() {
            return false;
        }
        let noise = self.max_exp - precision as i32 + (usize::BITS - self.terms.leading_zeros()) as i32 + 8;
        self.sum.get_exp().is_some_and(|e| e > noise)
    }
}

impl SeriesShooter {
    /// `Σ d_m` with `d_m = c_m X^m` (or `c_m X^{2m}`).
    fn evaluate(&self, e: &Float) -> Evaluation {
        let prec = self.precision;
        let pr = &self.problem;
        let x = Float::with_val(prec, self.boundary);
        let x2 = Float::with_val(prec, &x * &x);
        let l = i64::from(pr.l);
        let (a1, a2, ag, lag) = match pr.kind {
            // d_m = (-X d_{m-1} - ε X² d_{m-2} + g X^{p+2} d_{m-p-2}) / (m(m+2l+1))
            PotentialKind::CoulombPlusPower => {
                let mut xg = x.clone();
                xg.pow_assign(pr.p + 2);
                xg *= pr.g;
                (-x.clone(), -Float::with_val(prec, e * &x2), xg, pr.p as usize + 2)
            }
            // d_m = (-ε X² d_{m-1} + X⁴ d_{m-2} + g X^{2p+2} d_{m-p-1}) / (2m(2m+2l+1))
            PotentialKind::OscillatorPlusEvenPower => {
                let mut xg = x.clone();
                xg.pow_assign(2 * pr.p + 2);
                xg *= pr.g;
                let x4 = Float::with_val(prec, &x2 * &x2);
                (-Float::with_val(prec, e * &x2), x4, xg, pr.p as usize + 1)
            }
        };
        let mut d: Vec<Float> = vec![Float::with_val(prec, 1)];
        let mut sum = Float::with_val(prec, 1);
        let mut max_exp = 1;
        let mut quiet = 0usize;
        let mut m = 1usize;
        let mut scratch = Float::new(prec);
        loop {
            let back = |i: usize| if m >= i { Some(&d[m - i]) } else { None };
            let mut v = Float::new(prec);
            if let Some(b) = back(1) {
                scratch.assign(&a1 * b);
                v += &scratch;
            }
            if let Some(b) = back(2) {
                scratch.assign(&a2 * b);
                v += &scratch;
            }
            if pr.g != 0.0 {
                if let Some(b) = back(lag) {
                    scratch.assign(&ag * b);
                    v += &scratch;
                }
            }
            let mi = m as i64;
            let denominator = match pr.kind {
                PotentialKind::CoulombPlusPower => mi * (mi + 2 * l + 1),
                PotentialKind::OscillatorPlusEvenPower => 2 * mi * (2 * mi + 2 * l + 1),
            };
            v /= denominator;
            sum += &v;
            match v.get_exp() {
                Some(exp) if exp > max_exp - prec as i32 - 8 => {
                    max_exp = max_exp.max(exp);
                    quiet = 0;
                }
                _ => quiet += 1,
            }
            d.push(v);
            m += 1;
            if quiet > lag + 1 || m > 4_000_000 {
                break;
            }
        }
        Evaluation {
            sum,
            max_exp,
            terms: m,
        }
    }

    /// Sign of `y(X)`, raising the precision until it is trustworthy.
    fn sign(&mut self, e: &Float) -> Result<bool, AnalysisError> {
        for _ in 0..12 {
            let eval = self.evaluate(&Float::with_val(self.precision, e));
            if eval.reliable(self.precision) {
                return Ok(eval.sum.is_sign_positive());
            }
            let lost = eval.max_exp - eval.sum.get_exp().unwrap_or(eval.max_exp - self.precision as i32);
            self.precision += lost.max(32) as u32 + 64;
        }
        Err(AnalysisError::NonConvergence(
            "series shooting lost the sign of the boundary value".into(),
        ))
    }
}

fn refine(problem: &Problem, estimate: f64, settings: &SolverSettings) -> Result<(Float, f64), AnalysisError> {
    let scale = estimate.abs().max(1e-3);
    let absolute = settings.tolerance * scale;
    let target = (1.0 / absolute).ln().max(0.0) + 40.0;
    let boundary = boundary_for(problem, estimate, target);
    let bits_tol = (1.0 / absolute).log2().max(0.0).ceil() as u32;
    let growth = (target / std::f64::consts::LN_2).ceil() as u32;
    let precision = 64 + bits_tol + growth;
    let mut shooter = SeriesShooter {
        problem: *problem,
        boundary,
        precision,
    };

    let mut half_width = 1e-7 * scale;
    let (mut lo, mut hi);
    let mut attempts = 0;
    loop {
        lo = Float::with_val(precision, estimate - half_width);
        hi = Float::with_val(precision, estimate + half_width);
        if shooter.sign(&lo)? != shooter.sign(&hi)? {
            break;
        }
        half_width *= 8.0;
        attempts += 1;
        if attempts > 8 {
            return Err(AnalysisError::BracketNotFound(format!(
                "series shooting found no sign change within {half_width} of {estimate}"
            )));
        }
    }
    let lo_sign = shooter.sign(&lo)?;
    let mut iterations = 0;
    loop {
        let width = Float::with_val(shooter.precision, &hi - &lo);
        if width.to_f64() <= absolute {
            break;
        }
        let mut mid = Float::with_val(shooter.precision, &lo + &hi);
        mid /= 2;
        if shooter.sign(&mid)? == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
        if iterations >= settings.max_iterations {
            return Err(AnalysisError::NonConvergence(format!(
                "series bisection did not reach tolerance {absolute:e}"
            )));
        }
    }
    let mut value = Float::with_val_round(shooter.precision, &lo + &hi, Round::Nearest).0;
    value /= 2;
    Ok((value, boundary))
}
