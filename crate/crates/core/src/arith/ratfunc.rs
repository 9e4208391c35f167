use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer as _;
use num_traits::{One, Zero};

use super::gcd::gcd_up_to_unit;
use super::{ArithError, MultiPoly, Rational, Vars};

/// Reduced quotient of two polynomials.
///
/// Canonical form: numerator and denominator are coprime, both have integer
/// coefficients, their integer contents are coprime, and the denominator's
/// graded-lex leading coefficient is positive. Equal functions therefore have
/// structurally equal representations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    num: MultiPoly,
    den: MultiPoly,
}

impl RatFunc {
    pub fn normalize(num: MultiPoly, den: MultiPoly) -> Result<RatFunc, ArithError> {
        if den.is_zero() {
            return Err(ArithError::ZeroDenominator);
        }
        if num.is_zero() {
            let vars = num.vars().clone();
            return Ok(RatFunc { num: MultiPoly::zero(&vars), den: MultiPoly::one(&vars) });
        }
        let (num, den) = if den.is_constant() || num.is_constant() {
            (num, den)
        } else {
            let g = gcd_up_to_unit(&num, &den);
            if g.is_constant() {
                (num, den)
            } else {
                (num.exact_div(&g).expect("gcd divides numerator"), den.exact_div(&g).expect("gcd divides denominator"))
            }
        };
        let (cn, pn) = num.integer_normalize();
        let (cd, pd) = den.integer_normalize();
        // cd carries the sign that makes pd's leading coefficient positive
        let c = cn / cd;
        let u = c.numer().clone();
        let v = c.denom().clone();
        debug_assert!(u.gcd(&v).is_one());
        Ok(RatFunc { num: pn.scale(&Rational::from_integer(u)), den: pd.scale(&Rational::from_integer(v)) })
    }

    pub fn from_poly(p: MultiPoly) -> RatFunc {
        let vars = p.vars().clone();
        RatFunc::normalize(p, MultiPoly::one(&vars)).expect("unit denominator")
    }

    pub fn zero(vars: &Vars) -> RatFunc {
        RatFunc::from_poly(MultiPoly::zero(vars))
    }

    pub fn one(vars: &Vars) -> RatFunc {
        RatFunc::from_poly(MultiPoly::one(vars))
    }

    pub fn constant(vars: &Vars, c: Rational) -> RatFunc {
        RatFunc::from_poly(MultiPoly::constant(vars, c))
    }

    pub fn from_int(vars: &Vars, c: i64) -> RatFunc {
        RatFunc::from_poly(MultiPoly::from_int(vars, c))
    }

    pub fn var(vars: &Vars, name: &str) -> Result<RatFunc, ArithError> {
        MultiPoly::var(vars, name).map(RatFunc::from_poly)
    }

    pub fn numer(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denom(&self) -> &MultiPoly {
        &self.den
    }

    pub fn vars(&self) -> &Vars {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The polynomial this function equals, if its denominator is constant.
    pub fn to_poly(&self) -> Option<MultiPoly> {
        self.den.constant_value().map(|c| self.num.scale(&c.recip()))
    }

    pub fn constant_value(&self) -> Option<Rational> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        Some(n / d)
    }

    pub fn uses_var(&self, i: usize) -> bool {
        self.num.uses_var(i) || self.den.uses_var(i)
    }

    pub fn is_free_of(&self, name: &str) -> bool {
        match self.vars().index(name) {
            Some(i) => !self.uses_var(i),
            None => true,
        }
    }

    pub fn inv(&self) -> Result<RatFunc, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        RatFunc::normalize(self.den.clone(), self.num.clone())
    }

    pub fn try_div(&self, rhs: &RatFunc) -> Result<RatFunc, ArithError> {
        if rhs.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        RatFunc::normalize(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn scale(&self, c: &Rational) -> RatFunc {
        RatFunc::normalize(self.num.scale(c), self.den.clone()).expect("nonzero denominator")
    }

    pub fn pow(&self, e: i64) -> Result<RatFunc, ArithError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs() as u32;
        Ok(RatFunc { num: base.num.pow(k), den: base.den.pow(k) }.renormalized())
    }

    fn renormalized(self) -> RatFunc {
        RatFunc::normalize(self.num, self.den).expect("nonzero denominator")
    }

    pub fn derivative(&self, var: &str) -> Result<RatFunc, ArithError> {
        let i = self.vars().require(var)?;
        Ok(self.derivative_index(i))
    }

    pub fn derivative_index(&self, i: usize) -> RatFunc {
        if !self.uses_var(i) {
            return RatFunc::zero(self.vars());
        }
        let dn = self.num.derivative(i);
        if !self.den.uses_var(i) {
            return RatFunc::normalize(dn, self.den.clone()).expect("nonzero denominator");
        }
        let dd = self.den.derivative(i);
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        RatFunc::normalize(num, self.den.pow(2)).expect("nonzero denominator")
    }

    /// Replace `var` by `var + k`.
    pub fn shift(&self, var: &str, k: i64) -> Result<RatFunc, ArithError> {
        let i = self.vars().require(var)?;
        Ok(self.shift_index(i, k))
    }

    pub fn shift_index(&self, i: usize, k: i64) -> RatFunc {
        if k == 0 || !self.uses_var(i) {
            return self.clone();
        }
        let k = Rational::from_integer(k.into());
        RatFunc::normalize(self.num.shift(i, &k), self.den.shift(i, &k))
            .expect("shift of nonzero polynomial is nonzero")
    }

    /// Substitute `var := replacement`.
    pub fn compose(&self, i: usize, replacement: &RatFunc) -> Result<RatFunc, ArithError> {
        let num = compose_poly(&self.num, i, replacement);
        let den = compose_poly(&self.den, i, replacement);
        num.try_div(&den)
    }

    /// Substitute a rational value; errors when the denominator vanishes
    /// identically after substitution.
    pub fn specialize(&self, i: usize, value: &Rational) -> Result<RatFunc, ArithError> {
        RatFunc::normalize(self.num.specialize(i, value), self.den.specialize(i, value))
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational, ArithError> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(self.num.eval(point) / d)
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.num.eval_f64(point) / self.den.eval_f64(point)
    }

    pub fn with_vars(&self, target: &Vars) -> Result<RatFunc, ArithError> {
        // the grlex leading term can change with the variable order
        RatFunc::normalize(self.num.with_vars(target)?, self.den.with_vars(target)?)
    }

    pub fn into_parts(self) -> (MultiPoly, MultiPoly) {
        (self.num, self.den)
    }
}

fn compose_poly(p: &MultiPoly, i: usize, rep: &RatFunc) -> RatFunc {
    let coeffs = p.coeffs_in(i);
    let mut acc = RatFunc::zero(p.vars());
    for c in coeffs.iter().rev() {
        acc = &(&acc * rep) + &RatFunc::from_poly(c.clone());
    }
    acc
}

fn needs_parens_num(p: &MultiPoly) -> bool {
    p.num_terms() > 1
}

fn needs_parens_den(p: &MultiPoly) -> bool {
    if p.num_terms() > 1 {
        return true;
    }
    match p.leading_term() {
        Some((m, c)) => !(m.is_one() && c.is_integer() || c.is_one() && m.0.iter().filter(|&&e| e > 0).count() == 1),
        None => false,
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if needs_parens_num(&self.num) {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        if needs_parens_den(&self.den) {
            write!(f, "/({})", self.den)
        } else {
            write!(f, "/{}", self.den)
        }
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RatFunc::normalize(&self.num + &rhs.num, self.den.clone()).expect("nonzero denominator");
        }
        RatFunc::normalize(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
            .expect("nonzero denominator")
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero(self.vars());
        }
        RatFunc::normalize(&self.num * &rhs.num, &self.den * &rhs.den).expect("nonzero denominator")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_int};

    fn rf(v: &Vars, s: &str) -> RatFunc {
        crate::expr::parse_ratfunc(s, v).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let v = Vars::new(["n", "x"]);
        assert_eq!(rf(&v, "(x^2 - 1)/(x - 1)"), rf(&v, "x + 1"));
        let z = rf(&v, "0/(x + 5)");
        assert!(z.is_zero());
        assert!(z.denom().is_one());
        let half = rf(&v, "(2*n + 2)/(4*n + 4)");
        assert_eq!(half.constant_value(), Some(rat(1, 2)));
        assert_eq!(half.to_string(), "1/2");
        let x = MultiPoly::var(&v, "x").unwrap();
        assert_eq!(RatFunc::normalize(x.clone(), MultiPoly::zero(&v)), Err(ArithError::ZeroDenominator));
    }

    #[test]
    fn canonical_sign_and_content() {
        let v = Vars::new(["n", "x"]);
        let f = rf(&v, "(3*x)/(-6*x^2 + 3)");
        assert_eq!(f.to_string(), "-x/(-1 + 2*x^2)");
        assert!(f.denom().leading_coefficient() > rat_int(0));
        let g = rf(&v, "(x/2 + 1/3)/(x + 1)");
        assert_eq!(g.to_string(), "(2 + 3*x)/(6 + 6*x)");
    }

    #[test]
    fn derivative_examples() {
        let v = Vars::new(["n", "x"]);
        assert_eq!(rf(&v, "1/x").derivative("x").unwrap(), rf(&v, "-1/x^2"));
        assert_eq!(rf(&v, "-x").derivative("x").unwrap(), rf(&v, "-1"));
        assert_eq!(rf(&v, "(1 - 2*x)*(x*(1 - x))").derivative("x").unwrap(), rf(&v, "6*x^2 - 6*x + 1"));
        assert_eq!(rf(&v, "x").derivative("y"), Err(ArithError::UnknownVariable("y".into())));
    }

    #[test]
    fn shift_examples() {
        let v = Vars::new(["n", "x"]);
        assert_eq!(rf(&v, "n/(n + 1)").shift("n", 1).unwrap(), rf(&v, "(n + 1)/(n + 2)"));
        assert_eq!(rf(&v, "x^2").shift("n", 3).unwrap(), rf(&v, "x^2"));
        assert_eq!(rf(&v, "x^2/(x^2 + 1)").shift("n", 1).unwrap(), rf(&v, "x^2/(x^2 + 1)"));
        assert!(rf(&v, "x").shift("m", 1).is_err());
    }

    #[test]
    fn display_reparses() {
        let v = Vars::new(["n", "x"]);
        for s in ["1/(2*x)", "-x/(x + 1)", "(1 + n)/(2*(2*n + 3))", "3/x^2", "-1/2", "1/(n*x)", "x/(n^2*x^3)"] {
            let f = rf(&v, s);
            assert_eq!(rf(&v, &f.to_string()), f, "{s} printed as {f}");
        }
    }
}
