//! Exact arithmetic: big integers and rationals, sparse multivariate
//! polynomials over Q, reduced rational functions, and linear solving over
//! rational-function fields.

mod gcd;
mod linsolve;
mod poly;
mod ratfunc;

pub use gcd::{gcd, lcm};
pub use linsolve::{null_space_fraction_free, solve_linear, LinearSolution};
pub use poly::{Monomial, MultiPoly, Vars};
pub use ratfunc::RatFunc;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary precision signed integer.
pub type Integer = BigInt;
/// Reduced fraction of [`Integer`]s with positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("gcd(0, 0) is undefined")]
    BothZero,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` is not available in the target variable list")]
    MissingVariable(String),
    #[error("inconsistent linear system (row {row} reduces to 0 = {value})")]
    Inconsistent { row: usize, value: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub fn int(v: i64) -> Integer {
    Integer::from(v)
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(Integer::from(num), Integer::from(den))
}

pub fn rat_int(v: i64) -> Rational {
    Rational::from_integer(Integer::from(v))
}

/// gcd of two rationals: gcd of numerators over lcm of denominators.
/// Always nonnegative.
pub fn rational_gcd(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    let num = a.numer().gcd(b.numer());
    let den = a.denom().lcm(b.denom());
    Rational::new(num, den)
}

/// Natural logarithm of a positive big integer, accurate to f64 precision at
/// any magnitude.
pub fn ln_integer(v: &Integer) -> f64 {
    assert!(v.is_positive(), "ln of nonpositive integer");
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    let top: Integer = v >> shift;
    top.to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural logarithm of a positive rational without overflow or underflow.
pub fn ln_rational(v: &Rational) -> f64 {
    ln_integer(v.numer()) - ln_integer(v.denom())
}

/// f64 approximation of a rational of any size (saturates to 0 or ±inf only
/// when the true value is outside the f64 range).
pub fn rational_to_f64(v: &Rational) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    if let Some(f) = v.to_f64() {
        if f.is_finite() && f != 0.0 {
            return f;
        }
    }
    let sign = if v.is_negative() { -1.0 } else { 1.0 };
    sign * ln_rational(&v.abs()).exp()
}

/// Parse "p", "-p", "p/q" into a rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    match t.split_once('/') {
        Some((p, q)) => {
            let p: Integer = p.trim().parse().ok()?;
            let q: Integer = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rational::new(p, q))
            }
        }
        None => t.parse::<Integer>().ok().map(Rational::from_integer),
    }
}

pub fn is_integer(v: &Rational) -> bool {
    v.denom().is_one()
}
