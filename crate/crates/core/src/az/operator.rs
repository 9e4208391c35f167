use std::fmt;

use num_traits::{One, Signed, Zero};

use super::AzError;
use crate::arith::{gcd, lcm, MultiPoly, RatFunc, Rational, Vars};
use crate::expr::{parse, to_ratfunc, ParamValues, VarSpec};

/// Name of the forward shift in operator text.
pub const SHIFT: &str = "N";

/// Linear recurrence operator `Σ p_k(n) N^k`.
///
/// Coefficients live over the variable list of a [`VarSpec`] (discrete index
/// first) and must not involve the continuous variable. They are kept as
/// rational functions so that scaled forms such as `N - (n+1)/(2*(2*n+3))`
/// can be represented; [`RecOperator::normalized`] clears denominators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecOperator {
    coeffs: Vec<RatFunc>,
    vars: Vars,
}

impl RecOperator {
    /// Trailing zero coefficients are dropped; an all-zero list is an error.
    pub fn from_coefficients(mut coeffs: Vec<RatFunc>) -> Result<RecOperator, AzError> {
        while coeffs.last().is_some_and(RatFunc::is_zero) {
            coeffs.pop();
        }
        let vars =
            coeffs.first().map(|c| c.vars().clone()).ok_or_else(|| AzError::InvalidOperator("zero operator".into()))?;
        if coeffs.iter().any(|c| c.vars() != &vars) {
            return Err(AzError::InvalidOperator("coefficients over different variables".into()));
        }
        Ok(RecOperator { coeffs, vars })
    }

    pub fn from_polys(coeffs: Vec<MultiPoly>) -> Result<RecOperator, AzError> {
        RecOperator::from_coefficients(coeffs.into_iter().map(RatFunc::from_poly).collect())
    }

    /// Parse `p_0 + p_1*N + ... + p_d*N^d`; any arrangement that is a
    /// polynomial in `N` with coefficients rational in the index and
    /// parameters is accepted.
    pub fn parse(text: &str, spec: &VarSpec) -> Result<RecOperator, AzError> {
        let mut names = vec![SHIFT.to_string()];
        names.extend(spec.vars().names().iter().cloned());
        let with_shift = Vars::new(names);
        let f = to_ratfunc(&parse(text)?, &with_shift)?;
        if f.denom().uses_var(0) {
            return Err(AzError::InvalidOperator(format!("`{text}` is not polynomial in {SHIFT}")));
        }
        let x = spec.vars().len();
        if f.uses_var(x) {
            return Err(AzError::InvalidOperator(format!("operator coefficients depend on {}", spec.x())));
        }
        let den = f.denom().clone();
        let coeffs = f
            .numer()
            .coeffs_in(0)
            .into_iter()
            .map(|c| RatFunc::normalize(c, den.clone())?.with_vars(spec.vars()))
            .collect::<Result<Vec<_>, _>>()?;
        RecOperator::from_coefficients(coeffs)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[RatFunc] {
        &self.coeffs
    }

    pub fn coefficient(&self, k: usize) -> &RatFunc {
        &self.coeffs[k]
    }

    pub fn leading(&self) -> &RatFunc {
        self.coeffs.last().expect("nonempty")
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn is_polynomial(&self) -> bool {
        self.coeffs.iter().all(RatFunc::is_polynomial)
    }

    /// Polynomial coefficients, when every coefficient is a polynomial.
    pub fn polynomial_coefficients(&self) -> Option<Vec<MultiPoly>> {
        self.coeffs.iter().map(RatFunc::to_poly).collect()
    }

    pub fn scale(&self, s: &RatFunc) -> RecOperator {
        RecOperator { coeffs: self.coeffs.iter().map(|c| c * s).collect(), vars: self.vars.clone() }
    }

    /// Re-embed the coefficients into another variable list (by name).
    pub fn with_vars(&self, target: &Vars) -> Result<RecOperator, AzError> {
        let coeffs = self.coeffs.iter().map(|c| c.with_vars(target)).collect::<Result<Vec<_>, _>>()?;
        RecOperator::from_coefficients(coeffs)
    }

    /// Clear denominators, divide by the polynomial gcd of the coefficients
    /// and make the graded-lex leading coefficient of `p_d` positive.
    /// Returns the normalized operator and the factor `s` with
    /// `normalized = s · self`.
    pub fn normalized(&self) -> (RecOperator, RatFunc) {
        let vars = &self.vars;
        let mut den = MultiPoly::one(vars);
        for c in &self.coeffs {
            den = lcm(&den, c.denom()).expect("nonzero denominators");
        }
        let polys: Vec<MultiPoly> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * &den.exact_div(c.denom()).expect("lcm is a common multiple"))
            .collect();
        let mut g = MultiPoly::zero(vars);
        for p in &polys {
            if !p.is_zero() {
                g = if g.is_zero() { p.clone() } else { gcd(&g, p).expect("not both zero") };
            }
        }
        let mut polys: Vec<MultiPoly> = polys.iter().map(|p| p.exact_div(&g).expect("gcd divides")).collect();
        let mut sign = Rational::one();
        if polys.last().expect("nonempty").leading_coefficient().is_negative() {
            sign = -sign;
            polys = polys.iter().map(|p| -p).collect();
        }
        let s = RatFunc::normalize(den.scale(&sign), g).expect("nonzero gcd");
        let op = RecOperator { coeffs: polys.into_iter().map(RatFunc::from_poly).collect(), vars: vars.clone() };
        (op, s)
    }

    /// True iff the two operators are proportional over the rational-function
    /// field: `p_k · q_j = p_j · q_k` for all `j, k`.
    pub fn equivalent(&self, other: &RecOperator) -> bool {
        if self.order() != other.order() {
            return false;
        }
        let Ok(other) = other.with_vars(&self.vars) else {
            return false;
        };
        let d = self.coeffs.len();
        (0..d).all(|j| (j + 1..d).all(|k| &self.coeffs[k] * &other.coeffs[j] == &self.coeffs[j] * &other.coeffs[k]))
    }

    /// Substitute parameter values.
    pub fn specialize(&self, values: &ParamValues) -> Result<RecOperator, AzError> {
        let coeffs = self.coeffs.iter().map(|c| values.substitute(c)).collect::<Result<Vec<_>, _>>()?;
        RecOperator::from_coefficients(coeffs)
    }

    /// Names of symbolic variables other than the index that occur in some
    /// coefficient.
    pub fn free_symbols(&self) -> Vec<String> {
        (1..self.vars.len())
            .filter(|&i| self.coeffs.iter().any(|c| c.uses_var(i)))
            .map(|i| self.vars.name(i).to_string())
            .collect()
    }

    /// Coefficient values at index `m`; every other variable must be absent.
    pub fn eval_coefficients(&self, m: &Rational) -> Result<Vec<Rational>, AzError> {
        let free = self.free_symbols();
        if !free.is_empty() {
            return Err(AzError::UnspecializedParameters(free));
        }
        let mut point = vec![Rational::zero(); self.vars.len()];
        point[0] = m.clone();
        self.coeffs.iter().map(|c| c.eval(&point).map_err(AzError::from)).collect()
    }

    /// The operator as one rational function in `N` and the other variables.
    fn as_ratfunc(&self) -> RatFunc {
        let mut names = vec![SHIFT.to_string()];
        names.extend(self.vars.names().iter().cloned());
        let v = Vars::new(names);
        let shift = RatFunc::from_poly(MultiPoly::var_index(&v, 0));
        let mut acc = RatFunc::zero(&v);
        for c in self.coeffs.iter().rev() {
            let c = c.with_vars(&v).expect("superset of variables");
            acc = &(&acc * &shift) + &c;
        }
        acc
    }
}

/// Canonical text: the operator expanded as a rational function of `N` and
/// the index, with `N` ordered first.
impl fmt::Display for RecOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_ratfunc())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> VarSpec {
        VarSpec::with_params(&["r"])
    }

    fn op(s: &str) -> RecOperator {
        RecOperator::parse(s, &spec()).unwrap()
    }

    #[test]
    fn parse_and_print() {
        let l = op("N - n - 1");
        assert_eq!(l.order(), 1);
        assert_eq!(l.to_string(), "-1 - n + N");
        assert_eq!(op(&l.to_string()), l);
        let e = op("N^2 + 2*(2*n + 3)*(n + 2)*N - (n + 1)*(n + 2)");
        assert_eq!(e.order(), 2);
        assert_eq!(op(&e.to_string()), e);
        let scaled = op("N - (n + 1)/(2*(2*n + 3))");
        assert!(!scaled.is_polynomial());
        assert_eq!(op(&scaled.to_string()), scaled);
    }

    #[test]
    fn parse_errors() {
        assert!(RecOperator::parse("x*N", &spec()).is_err());
        assert!(RecOperator::parse("1/N", &spec()).is_err());
        assert!(RecOperator::parse("0", &spec()).is_err());
        assert!(RecOperator::parse("N +", &spec()).is_err());
    }

    #[test]
    fn equivalence() {
        assert!(op("N - (n + 1)").equivalent(&op("2*N - 2*n - 2")));
        assert!(op("(n + 1) + (-4*n - 6)*N").equivalent(&op("-(n + 1)/(4*n + 6) + N")));
        assert!(!op("N - (n + 1)").equivalent(&op("N - n")));
        assert!(!op("N - 1").equivalent(&op("N^2 - 1")));
    }

    #[test]
    fn normalization() {
        let (l, s) = op("N - (n + 1)/(2*(2*n + 3))").normalized();
        assert_eq!(l, op("-(n + 1) + (4*n + 6)*N"));
        assert_eq!(s.to_string(), "6 + 4*n");
        let (l, s) = op("(n + 1) + (-n - r - 1)*N").normalized();
        assert_eq!(l, op("-(n + 1) + (n + r + 1)*N"));
        assert_eq!(s.to_string(), "-1");
        let (l, _) = op("(2*n + 2)*N^2 - (4*n + 4)").normalized();
        assert_eq!(l, op("N^2 - 2"));
    }

    #[test]
    fn evaluation_and_specialization() {
        let l = op("(n + 1) + (-n - r - 1)*N");
        assert_eq!(l.free_symbols(), vec!["r".to_string()]);
        assert!(l.eval_coefficients(&Rational::one()).is_err());
        let l = l.specialize(&ParamValues::new().with("r", Rational::new(3.into(), 2.into()))).unwrap();
        assert_eq!(
            l.eval_coefficients(&Rational::one()).unwrap(),
            vec![Rational::from_integer(2.into()), Rational::new((-7).into(), 2.into())]
        );
    }
}
