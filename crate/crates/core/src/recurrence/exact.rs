use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::RecurrenceError;
use crate::arith::{MultiPoly, Rational, Vars};
use crate::expr::parse_polynomial;

/// The symbolic constant attached to an [`ExactNumber`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstTag {
    None,
    InvE,
    Pi,
}

impl ConstTag {
    pub fn name(self) -> &'static str {
        match self {
            ConstTag::None => "none",
            ConstTag::InvE => "inv_e",
            ConstTag::Pi => "pi",
        }
    }
}

impl FromStr for ConstTag {
    type Err = RecurrenceError;

    fn from_str(s: &str) -> Result<ConstTag, RecurrenceError> {
        match s {
            "none" => Ok(ConstTag::None),
            "inv_e" => Ok(ConstTag::InvE),
            "pi" => Ok(ConstTag::Pi),
            _ => Err(RecurrenceError::Parse(format!("unknown constant tag `{s}`"))),
        }
    }
}

/// `rational + coeff · c` for one symbolic constant `c`.
///
/// A zero coefficient always carries [`ConstTag::None`]. Arithmetic between
/// numbers with different nonzero constants fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactNumber {
    rational: Rational,
    coeff: Rational,
    tag: ConstTag,
}

impl ExactNumber {
    pub fn new(rational: Rational, coeff: Rational, tag: ConstTag) -> ExactNumber {
        if coeff.is_zero() || tag == ConstTag::None {
            ExactNumber { rational, coeff: Rational::zero(), tag: ConstTag::None }
        } else {
            ExactNumber { rational, coeff, tag }
        }
    }

    pub fn rational(r: Rational) -> ExactNumber {
        ExactNumber::new(r, Rational::zero(), ConstTag::None)
    }

    pub fn zero() -> ExactNumber {
        ExactNumber::rational(Rational::zero())
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rational
    }

    pub fn const_coeff(&self) -> &Rational {
        &self.coeff
    }

    pub fn tag(&self) -> ConstTag {
        self.tag
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.coeff.is_zero()
    }

    fn joint_tag(&self, other: &ExactNumber) -> Result<ConstTag, RecurrenceError> {
        match (self.tag, other.tag) {
            (ConstTag::None, t) | (t, ConstTag::None) => Ok(t),
            (s, t) if s == t => Ok(s),
            (s, t) => Err(RecurrenceError::MixedConstantTags(s.name(), t.name())),
        }
    }

    pub fn try_add(&self, other: &ExactNumber) -> Result<ExactNumber, RecurrenceError> {
        let tag = self.joint_tag(other)?;
        Ok(ExactNumber::new(&self.rational + &other.rational, &self.coeff + &other.coeff, tag))
    }

    pub fn try_sub(&self, other: &ExactNumber) -> Result<ExactNumber, RecurrenceError> {
        self.try_add(&-other)
    }

    pub fn scale(&self, c: &Rational) -> ExactNumber {
        ExactNumber::new(&self.rational * c, &self.coeff * c, self.tag)
    }

    /// Substitute a rational value for the constant.
    pub fn evaluate(&self, inv_e: &Rational, pi: &Rational) -> Rational {
        match self.tag {
            ConstTag::None => self.rational.clone(),
            ConstTag::InvE => &self.rational + &self.coeff * inv_e,
            ConstTag::Pi => &self.rational + &self.coeff * pi,
        }
    }

    fn constant_vars() -> Vars {
        Vars::new(["inv_e", "pi"])
    }
}

impl Neg for &ExactNumber {
    type Output = ExactNumber;
    fn neg(self) -> ExactNumber {
        ExactNumber::new(-&self.rational, -&self.coeff, self.tag)
    }
}

impl Add for &ExactNumber {
    type Output = ExactNumber;
    /// Panics on mixed constants; use [`ExactNumber::try_add`] otherwise.
    fn add(self, rhs: &ExactNumber) -> ExactNumber {
        self.try_add(rhs).expect("same constant")
    }
}

impl Sub for &ExactNumber {
    type Output = ExactNumber;
    fn sub(self, rhs: &ExactNumber) -> ExactNumber {
        self.try_sub(rhs).expect("same constant")
    }
}

impl Mul<&Rational> for &ExactNumber {
    type Output = ExactNumber;
    fn mul(self, rhs: &Rational) -> ExactNumber {
        self.scale(rhs)
    }
}

impl fmt::Display for ExactNumber {
    /// Canonical polynomial text such as `-426 + 1158*inv_e`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = ExactNumber::constant_vars();
        let mut p = MultiPoly::constant(&vars, self.rational.clone());
        if self.tag != ConstTag::None {
            let c = MultiPoly::var(&vars, self.tag.name()).expect("known name");
            p = &p + &c.scale(&self.coeff);
        }
        write!(f, "{p}")
    }
}

impl FromStr for ExactNumber {
    type Err = RecurrenceError;

    /// Accepts any expression affine in one of `inv_e`, `pi`.
    fn from_str(text: &str) -> Result<ExactNumber, RecurrenceError> {
        let vars = ExactNumber::constant_vars();
        let p = parse_polynomial(text, &vars).map_err(|e| RecurrenceError::Parse(e.to_string()))?;
        if p.total_degree().unwrap_or(0) > 1 || (p.uses_var(0) && p.uses_var(1)) {
            return Err(RecurrenceError::Parse(format!("`{text}` is not of the form a + b*inv_e or a + b*pi")));
        }
        let coeffs = |i: usize| p.coeffs_in(i);
        let rational = p.eval(&[Rational::zero(), Rational::zero()]);
        for (i, tag) in [(0, ConstTag::InvE), (1, ConstTag::Pi)] {
            if let Some(c) = coeffs(i).get(1) {
                let c = c.constant_value().expect("affine");
                return Ok(ExactNumber::new(rational, c, tag));
            }
        }
        Ok(ExactNumber::rational(rational))
    }
}
