use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{Integer, Rational};

/// A rational approximation `value` with `|value − true| ≤ bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedValue {
    pub value: Rational,
    pub bound: Rational,
}

impl CertifiedValue {
    pub fn lower(&self) -> Rational {
        &self.value - &self.bound
    }

    pub fn upper(&self) -> Rational {
        &self.value + &self.bound
    }

    /// True iff the certified interval lies within `10^-digits` of `value`.
    pub fn meets(&self, digits: u32) -> bool {
        self.bound <= ten_pow_neg(digits)
    }
}

pub(crate) fn ten_pow_neg(digits: u32) -> Rational {
    Rational::new(Integer::one(), BigInt::from(10u32).pow(digits))
}

/// `Σ_{j=0}^k (-1)^j / j!` with the alternating-series bound `1/(k+1)!`.
pub fn inv_e_partial(k: u32) -> CertifiedValue {
    let mut value = Rational::zero();
    let mut fact = Integer::one();
    for j in 0..=k {
        if j > 0 {
            fact *= j;
        }
        let term = Rational::new(Integer::one(), fact.clone());
        if j % 2 == 0 {
            value += term;
        } else {
            value -= term;
        }
    }
    fact *= k + 1;
    CertifiedValue { value, bound: Rational::new(Integer::one(), fact) }
}

/// `e⁻¹` to within `10^-digits`.
pub fn constant_inv_e(digits: u32) -> CertifiedValue {
    let target = ten_pow_neg(digits.max(1));
    let mut k = 1;
    let mut fact = Integer::from(2);
    while Rational::new(Integer::one(), fact.clone()) > target {
        k += 1;
        fact *= k + 1;
    }
    inv_e_partial(k)
}

/// `arctan(1/m)` summed until the first omitted term is at most `tol`.
fn arctan_inv(m: u32, tol: &Rational) -> CertifiedValue {
    let m2 = Integer::from(m) * m;
    let mut power = Integer::from(m);
    let mut value = Rational::zero();
    let mut j: u64 = 0;
    loop {
        let term = Rational::new(Integer::one(), &power * (2 * j + 1));
        if &term <= tol {
            return CertifiedValue { value, bound: term };
        }
        if j.is_multiple_of(2) {
            value += term;
        } else {
            value -= term;
        }
        power *= &m2;
        j += 1;
    }
}

/// `π` to within `10^-digits` by Machin's formula.
pub fn constant_pi(digits: u32) -> CertifiedValue {
    let tol = ten_pow_neg(digits.max(1)) / Rational::from_integer(40.into());
    let a = arctan_inv(5, &tol);
    let b = arctan_inv(239, &tol);
    let c16 = Rational::from_integer(16.into());
    let c4 = Rational::from_integer(4.into());
    CertifiedValue { value: &a.value * &c16 - &b.value * &c4, bound: &a.bound * &c16 + &b.bound * &c4 }
}

/// Decimal expansion of `v` truncated toward zero after `digits` places.
pub fn decimal_string(v: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (v.abs() * Rational::from_integer(scale)).to_integer();
    let mut s = scaled.to_string();
    let d = digits as usize;
    if s.len() <= d {
        s = format!("{}{s}", "0".repeat(d + 1 - s.len()));
    }
    let (int, frac) = s.split_at(s.len() - d);
    let sign = if v.is_negative() { "-" } else { "" };
    if d == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}
