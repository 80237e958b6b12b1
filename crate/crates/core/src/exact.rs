//! Exact rational scalar used throughout the engine.
//!
//! Values are GMP rationals, which are kept in canonical form (positive
//! denominator, coprime numerator and denominator) after every operation.

use rug::{Assign, Integer, Rational};
use std::fmt;

/// Arbitrary-precision rational number.
pub type ExactRational = Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError {
    input: String,
    reason: &'static str,
}

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational {:?}: {}", self.input, self.reason)
    }
}

impl std::error::Error for ParseRationalError {}

/// Formats `value` as `numerator/denominator` in base 10, always with an
/// explicit denominator (`3/1`, `-165/16`).
pub fn to_fraction_string(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Parses the strict `numerator/denominator` form produced by
/// [`to_fraction_string`]. Non-canonical input (shared factors, a
/// non-positive denominator, a missing slash) is rejected.
pub fn parse_fraction(input: &str) -> Result<Rational, ParseRationalError> {
    let err = |reason| ParseRationalError {
        input: input.to_owned(),
        reason,
    };
    let (num, den) = input
        .trim()
        .split_once('/')
        .ok_or_else(|| err("expected numerator/denominator"))?;
    let valid_digits = |s: &str, signed: bool| {
        let digits = if signed {
            s.strip_prefix('-').unwrap_or(s)
        } else {
            s
        };
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid_digits(num, true) || !valid_digits(den, false) {
        return Err(err("expected base-10 integers"));
    }
    let num = Integer::from_str_radix(num, 10).map_err(|_| err("bad numerator"))?;
    let den = Integer::from_str_radix(den, 10).map_err(|_| err("bad denominator"))?;
    if den <= 0 {
        return Err(err("denominator must be positive"));
    }
    if Integer::from(num.gcd_ref(&den)) != 1 {
        return Err(err("fraction is not in lowest terms"));
    }
    Ok(Rational::from((num, den)))
}

/// Exact value of a finite `f64`.
pub fn from_f64(value: f64) -> Option<Rational> {
    Rational::from_f64(value)
}

/// Computes `sum a_i * b_i` exactly.
///
/// All products are brought onto one common denominator so that the inner
/// loop runs as integer multiply-accumulate; the result is reduced once.
pub fn dot<'a, I>(pairs: I) -> Rational
where
    I: IntoIterator<Item = (&'a Rational, &'a Rational)>,
    I::IntoIter: Clone,
{
    let pairs = pairs.into_iter();
    let mut common = Integer::from(1);
    let mut scratch = Integer::new();
    for (a, b) in pairs.clone() {
        if *a.denom() == 1 && *b.denom() == 1 {
            continue;
        }
        scratch.assign(a.denom() * b.denom());
        if !common.is_divisible(&scratch) {
            common.lcm_mut(&scratch);
        }
    }

    let mut acc = Integer::new();
    if common == 1 {
        for (a, b) in pairs {
            acc += a.numer() * b.numer();
        }
        return Rational::from(acc);
    }

    let mut product = Integer::new();
    for (a, b) in pairs {
        if a.numer().is_zero() || b.numer().is_zero() {
            continue;
        }
        scratch.assign(a.denom() * b.denom());
        if scratch == common {
            acc += a.numer() * b.numer();
            continue;
        }
        let factor = Integer::from(common.div_exact_ref(&scratch));
        product.assign(a.numer() * b.numer());
        if factor.is_power_of_two() {
            product <<= factor.significant_bits() - 1;
        } else {
            product *= &factor;
        }
        acc += &product;
    }
    Rational::from((acc, common))
}
