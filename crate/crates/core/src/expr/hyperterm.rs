use std::fmt;

use num_traits::One;

use super::{parse, to_ratfunc, ExprError, ExprTree, VarSpec};
use crate::arith::{is_integer, MultiPoly, RatFunc, Rational};

/// Exponent `slope·n + offset` with an integer slope and an offset that is a
/// polynomial in the symbolic parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exponent {
    pub slope: i64,
    pub offset: MultiPoly,
}

impl Exponent {
    pub fn constant(spec: &VarSpec, c: Rational) -> Exponent {
        Exponent { slope: 0, offset: MultiPoly::constant(spec.vars(), c) }
    }

    pub fn is_zero(&self) -> bool {
        self.slope == 0 && self.offset.is_zero()
    }

    /// `Some(k)` when the exponent is the integer constant `k`.
    pub fn as_integer(&self) -> Option<i64> {
        if self.slope != 0 {
            return None;
        }
        let c = self.offset.constant_value()?;
        if is_integer(&c) {
            c.numer().try_into().ok()
        } else {
            None
        }
    }

    pub fn as_poly(&self, spec: &VarSpec) -> MultiPoly {
        let n = MultiPoly::var_index(spec.vars(), spec.n_index());
        &n.scale(&Rational::from_integer(self.slope.into())) + &self.offset
    }

    fn add(&self, other: &Exponent) -> Exponent {
        Exponent { slope: self.slope + other.slope, offset: &self.offset + &other.offset }
    }

    fn scale_int(&self, k: i64) -> Exponent {
        Exponent { slope: self.slope * k, offset: self.offset.scale(&Rational::from_integer(k.into())) }
    }
}

/// One `base^exponent` factor; the base is a rational function of `x` and
/// the parameters (never of `n`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub base: RatFunc,
    pub exponent: Exponent,
}

/// A hyperexponential term `F_n(x)` in canonical factor-list form, together
/// with its shift quotient `R1 = F(n+1)/F(n)` and logarithmic derivative
/// `R2 = F'(x)/F(x)`.
///
/// Canonical form: distinct bases; all factors with an integer constant
/// exponent collapsed into a single factor with exponent 1 (or into the
/// prefactor when free of `x`); factors sorted by their printed form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperTerm {
    spec: VarSpec,
    prefactor: RatFunc,
    factors: Vec<Factor>,
    exp_arg: RatFunc,
    shift_quotient: RatFunc,
    log_derivative: RatFunc,
}

fn not_hyper(reason: impl Into<String>, subterm: &ExprTree) -> ExprError {
    ExprError::NotHyperexponential { reason: reason.into(), subterm: subterm.to_string() }
}

/// Intermediate product form while walking the tree.
struct Partial {
    prefactor: RatFunc,
    factors: Vec<Factor>,
    exp_arg: RatFunc,
}

impl Partial {
    fn one(spec: &VarSpec) -> Partial {
        Partial { prefactor: RatFunc::one(spec.vars()), factors: Vec::new(), exp_arg: RatFunc::zero(spec.vars()) }
    }

    fn mul(mut self, other: Partial) -> Partial {
        self.prefactor = &self.prefactor * &other.prefactor;
        self.factors.extend(other.factors);
        self.exp_arg = &self.exp_arg + &other.exp_arg;
        self
    }

    fn inv(self) -> Result<Partial, ExprError> {
        Ok(Partial {
            prefactor: self.prefactor.inv()?,
            factors: self
                .factors
                .into_iter()
                .map(|f| Factor { base: f.base, exponent: f.exponent.scale_int(-1) })
                .collect(),
            exp_arg: -self.exp_arg,
        })
    }
}

enum Rationality {
    Rational(RatFunc),
    NotRational,
}

fn try_rational(tree: &ExprTree, spec: &VarSpec) -> Result<Rationality, ExprError> {
    match to_ratfunc(tree, spec.vars()) {
        Ok(f) => Ok(Rationality::Rational(f)),
        Err(ExprError::NotRational(_)) => Ok(Rationality::NotRational),
        Err(e) => Err(e),
    }
}

fn to_exponent(tree: &ExprTree, spec: &VarSpec) -> Result<Exponent, ExprError> {
    let f = match try_rational(tree, spec)? {
        Rationality::Rational(f) => f,
        Rationality::NotRational => return Err(not_hyper("exponent is not a polynomial", tree)),
    };
    if f.uses_var(spec.x_index()) {
        return Err(not_hyper(format!("exponent depends on {}", spec.x()), tree));
    }
    let p = f.to_poly().ok_or_else(|| not_hyper("exponent is not a polynomial", tree))?;
    let ni = spec.n_index();
    let coeffs = p.coeffs_in(ni);
    if coeffs.len() > 2 {
        return Err(not_hyper(format!("exponent is nonlinear in {}", spec.n()), tree));
    }
    let slope = match coeffs.get(1) {
        None => 0,
        Some(c) => {
            let v = c
                .constant_value()
                .filter(is_integer)
                .ok_or_else(|| not_hyper(format!("slope in {} must be an integer", spec.n()), tree))?;
            v.numer().try_into().map_err(|_| not_hyper("slope too large", tree))?
        }
    };
    let offset = coeffs.into_iter().next().unwrap_or_else(|| MultiPoly::zero(spec.vars()));
    Ok(Exponent { slope, offset })
}

fn normalize_tree(tree: &ExprTree, spec: &VarSpec) -> Result<Partial, ExprError> {
    let xi = spec.x_index();
    let ni = spec.n_index();
    if let Rationality::Rational(f) = try_rational(tree, spec)? {
        let has_x = f.uses_var(xi);
        let has_n = f.uses_var(ni);
        if !has_x {
            let mut p = Partial::one(spec);
            p.prefactor = f;
            return Ok(p);
        }
        if !has_n {
            let mut p = Partial::one(spec);
            p.factors.push(Factor { base: f, exponent: Exponent::constant(spec, Rational::one()) });
            return Ok(p);
        }
        // mixes n and x: only products can be split further
        if !matches!(tree, ExprTree::Mul(..) | ExprTree::Div(..) | ExprTree::Neg(..) | ExprTree::Pow(..)) {
            return Err(not_hyper(format!("sum mixing {} and {}", spec.n(), spec.x()), tree));
        }
    }
    match tree {
        ExprTree::Num(_) | ExprTree::Var(_) => unreachable!("atoms are rational"),
        ExprTree::Neg(a) => {
            let mut p = normalize_tree(a, spec)?;
            p.prefactor = -p.prefactor;
            Ok(p)
        }
        ExprTree::Mul(a, b) => Ok(normalize_tree(a, spec)?.mul(normalize_tree(b, spec)?)),
        ExprTree::Div(a, b) => Ok(normalize_tree(a, spec)?.mul(normalize_tree(b, spec)?.inv()?)),
        ExprTree::Add(..) | ExprTree::Sub(..) => Err(not_hyper("sum of non-rational terms", tree)),
        ExprTree::Exp(arg) => {
            let u = match try_rational(arg, spec)? {
                Rationality::Rational(u) => u,
                Rationality::NotRational => return Err(not_hyper("exp argument must be rational in x", tree)),
            };
            if u.uses_var(ni) {
                return Err(not_hyper(format!("exp argument depends on {}", spec.n()), tree));
            }
            let mut p = Partial::one(spec);
            p.exp_arg = u;
            Ok(p)
        }
        ExprTree::Pow(base, e) => {
            let exponent = to_exponent(e, spec)?;
            let inner = normalize_tree(base, spec)?;
            if let Some(k) = exponent.as_integer() {
                return Ok(Partial {
                    prefactor: inner.prefactor.pow(k)?,
                    factors: inner
                        .factors
                        .into_iter()
                        .map(|f| Factor { base: f.base, exponent: f.exponent.scale_int(k) })
                        .collect(),
                    exp_arg: inner.exp_arg.scale(&Rational::from_integer(k.into())),
                });
            }
            raise_symbolic(inner, &exponent, spec, tree)
        }
    }
}

/// `inner^(slope·n + offset)` for a non-integer or n-dependent exponent.
fn raise_symbolic(inner: Partial, exponent: &Exponent, spec: &VarSpec, tree: &ExprTree) -> Result<Partial, ExprError> {
    let mut out = Partial::one(spec);
    let mut factors = inner.factors;
    if inner.prefactor.uses_var(spec.n_index()) {
        return Err(not_hyper(format!("{}-dependent base raised to a symbolic power", spec.n()), tree));
    }
    if !inner.prefactor.is_one() {
        factors.push(Factor { base: inner.prefactor, exponent: Exponent::constant(spec, Rational::one()) });
    }
    if !inner.exp_arg.is_zero() {
        if exponent.slope != 0 {
            return Err(not_hyper(format!("exp(...) raised to a power depending on {}", spec.n()), tree));
        }
        out.exp_arg = &inner.exp_arg * &RatFunc::from_poly(exponent.offset.clone());
    }
    for f in factors {
        let (s1, o1) = (f.exponent.slope, &f.exponent.offset);
        let (s2, o2) = (exponent.slope, &exponent.offset);
        if s1 != 0 && s2 != 0 {
            return Err(not_hyper(format!("exponent quadratic in {}", spec.n()), tree));
        }
        // (s1 n + o1)(s2 n + o2) with s1 s2 = 0
        let slope_poly = &o2.scale(&Rational::from_integer(s1.into())) + &o1.scale(&Rational::from_integer(s2.into()));
        let slope = slope_poly
            .constant_value()
            .filter(is_integer)
            .and_then(|c| i64::try_from(c.numer()).ok())
            .ok_or_else(|| not_hyper(format!("slope in {} must be an integer", spec.n()), tree))?;
        out.factors.push(Factor { base: f.base, exponent: Exponent { slope, offset: o1 * o2 } });
    }
    Ok(out)
}

impl HyperTerm {
    pub fn parse(text: &str, spec: &VarSpec) -> Result<HyperTerm, ExprError> {
        HyperTerm::from_tree(&parse(text)?, spec)
    }

    /// Normalize an expression tree into canonical hyperexponential form.
    pub fn from_tree(tree: &ExprTree, spec: &VarSpec) -> Result<HyperTerm, ExprError> {
        let p = normalize_tree(tree, spec)?;
        HyperTerm::from_parts(spec, p.prefactor, p.factors, p.exp_arg)
    }

    /// Build from components, canonicalizing and deriving `R1`, `R2`.
    pub fn from_parts(
        spec: &VarSpec,
        prefactor: RatFunc,
        factors: Vec<Factor>,
        exp_arg: RatFunc,
    ) -> Result<HyperTerm, ExprError> {
        let xi = spec.x_index();
        let ni = spec.n_index();
        let whole = ExprTree::Var("<term>".into());
        if prefactor.is_zero() {
            return Err(not_hyper("identically zero", &whole));
        }
        if prefactor.uses_var(xi) {
            return Err(not_hyper(format!("prefactor depends on {}", spec.x()), &whole));
        }
        if exp_arg.uses_var(ni) {
            return Err(not_hyper(format!("exp argument depends on {}", spec.n()), &whole));
        }

        // merge equal bases
        let mut merged: Vec<Factor> = Vec::new();
        for f in factors {
            if f.base.uses_var(ni) {
                return Err(not_hyper(format!("base `{}` depends on {}", f.base, spec.n()), &whole));
            }
            if f.base.is_zero() {
                return Err(not_hyper("zero base", &whole));
            }
            if f.base.is_one() || f.exponent.is_zero() {
                continue;
            }
            match merged.iter_mut().find(|g| g.base == f.base) {
                Some(g) => g.exponent = g.exponent.add(&f.exponent),
                None => merged.push(f),
            }
        }
        merged.retain(|f| !f.exponent.is_zero());

        // collapse integer-exponent factors
        let mut prefactor = prefactor;
        let mut rational = RatFunc::one(spec.vars());
        let mut symbolic = Vec::new();
        for f in merged {
            match f.exponent.as_integer() {
                Some(k) => {
                    let p = f.base.pow(k)?;
                    if p.uses_var(xi) {
                        rational = &rational * &p;
                    } else {
                        prefactor = &prefactor * &p;
                    }
                }
                None => symbolic.push(f),
            }
        }
        if !rational.uses_var(xi) {
            prefactor = &prefactor * &rational;
        } else if let Some(g) = symbolic.iter_mut().find(|g| g.base == rational) {
            g.exponent = g.exponent.add(&Exponent::constant(spec, Rational::one()));
        } else {
            symbolic.push(Factor { base: rational, exponent: Exponent::constant(spec, Rational::one()) });
        }
        symbolic.retain(|f| !f.exponent.is_zero());
        symbolic.sort_by_cached_key(|f| (f.base.to_string(), f.exponent.as_poly(spec).to_string()));

        let mut h = HyperTerm {
            spec: spec.clone(),
            prefactor,
            factors: symbolic,
            exp_arg,
            shift_quotient: RatFunc::one(spec.vars()),
            log_derivative: RatFunc::zero(spec.vars()),
        };
        h.shift_quotient = h.compute_shift_quotient()?;
        h.log_derivative = h.compute_log_derivative();
        Ok(h)
    }

    fn compute_shift_quotient(&self) -> Result<RatFunc, ExprError> {
        let ni = self.spec.n_index();
        let mut r = self.prefactor.shift_index(ni, 1).try_div(&self.prefactor)?;
        for f in &self.factors {
            if f.exponent.slope != 0 {
                r = &r * &f.base.pow(f.exponent.slope)?;
            }
        }
        Ok(r)
    }

    fn compute_log_derivative(&self) -> RatFunc {
        let xi = self.spec.x_index();
        let mut r = self.exp_arg.derivative_index(xi);
        for f in &self.factors {
            if !f.base.uses_var(xi) {
                continue;
            }
            let e = RatFunc::from_poly(f.exponent.as_poly(&self.spec));
            let dlog = f.base.derivative_index(xi).try_div(&f.base).expect("nonzero base");
            r = &r + &(&e * &dlog);
        }
        r
    }

    pub fn spec(&self) -> &VarSpec {
        &self.spec
    }

    pub fn prefactor(&self) -> &RatFunc {
        &self.prefactor
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn exp_arg(&self) -> &RatFunc {
        &self.exp_arg
    }

    /// `F(n+j+1)/F(n+j)`, i.e. `R1` with `n` shifted by `j`.
    pub fn shift_quotient(&self, j: u32) -> RatFunc {
        self.shift_quotient.shift_index(self.spec.n_index(), j as i64)
    }

    /// `R2 = F'(x)/F(x)`.
    pub fn log_derivative(&self) -> &RatFunc {
        &self.log_derivative
    }
}

impl fmt::Display for HyperTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.prefactor.is_one() {
            parts.push(format!("({})", self.prefactor));
        }
        for fac in &self.factors {
            let e = fac.exponent.as_poly(&self.spec);
            if e.is_one() {
                parts.push(format!("({})", fac.base));
            } else {
                parts.push(format!("({})^({})", fac.base, e));
            }
        }
        if !self.exp_arg.is_zero() {
            parts.push(format!("exp({})", self.exp_arg));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" * "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_ratfunc;

    fn spec() -> VarSpec {
        VarSpec::with_params(&["r"])
    }

    fn rf(s: &str) -> RatFunc {
        parse_ratfunc(s, spec().vars()).unwrap()
    }

    fn exps(h: &HyperTerm) -> Vec<(String, String)> {
        h.factors().iter().map(|f| (f.base.to_string(), f.exponent.as_poly(h.spec()).to_string())).collect()
    }

    #[test]
    fn e_case_factor_list() {
        let h = HyperTerm::parse("(x*(1-x))^n * exp(-x)", &spec()).unwrap();
        assert_eq!(exps(&h), vec![("x - x^2".to_string(), "n".to_string())]);
        assert_eq!(h.exp_arg(), &rf("-x"));
        assert!(h.prefactor().is_one());
    }

    #[test]
    fn complicated_integral_factor_list() {
        let h = HyperTerm::parse("x^n / (x+1)^(n+r+1)", &spec()).unwrap();
        assert_eq!(exps(&h), vec![("1 + x".to_string(), "-1 - r - n".to_string()), ("x".to_string(), "n".to_string())]);
    }

    #[test]
    fn rejects_non_hyperexponential() {
        for s in ["x^(n^2)", "x^(n/2)", "(x + n)^2 + 1", "exp(n*x)", "exp(-x)^n", "x^x", "(n+1)^n"] {
            let err = HyperTerm::parse(s, &spec()).unwrap_err();
            assert!(matches!(err, ExprError::NotHyperexponential { .. }), "{s}: {err:?}");
        }
        assert!(matches!(HyperTerm::parse("x^y", &spec()), Err(ExprError::UnknownIdentifier(_))));
    }

    #[test]
    fn shift_quotients() {
        let s = spec();
        assert_eq!(HyperTerm::parse("x^n*exp(-x)", &s).unwrap().shift_quotient(0), rf("x"));
        assert_eq!(HyperTerm::parse("(x*(1-x))^n", &s).unwrap().shift_quotient(0), rf("x*(1-x)"));
        let intro = HyperTerm::parse("x^(2*n)/(x^2+1)^(n+1)", &s).unwrap();
        assert_eq!(intro.shift_quotient(0), rf("x^2/(x^2+1)"));
        let pref = HyperTerm::parse("(n+1)*x^n", &s).unwrap();
        assert_eq!(pref.shift_quotient(2), rf("(n+4)*x/(n+3)"));
    }

    #[test]
    fn log_derivatives() {
        let s = spec();
        assert_eq!(HyperTerm::parse("x^n*exp(-x)", &s).unwrap().log_derivative(), &rf("(n - x)/x"));
        assert_eq!(HyperTerm::parse("(x*(1-x))^n", &s).unwrap().log_derivative(), &rf("n*(1-2*x)/(x*(1-x))"));
        assert_eq!(HyperTerm::parse("x^n/(x+1)^(n+r+1)", &s).unwrap().log_derivative(), &rf("n/x - (n+r+1)/(x+1)"));
    }

    #[test]
    fn canonical_merging() {
        let s = spec();
        let a = HyperTerm::parse("x^n * x * x^2/(x+1)", &s).unwrap();
        let b = HyperTerm::parse("x^(n+1) * (x^2/(x+1))", &s).unwrap();
        assert_eq!(a.log_derivative(), b.log_derivative());
        let c = HyperTerm::parse("x^n*x", &s).unwrap();
        assert_eq!(exps(&c), vec![("x".to_string(), "1 + n".to_string())]);
        let d = HyperTerm::parse("2^n * 3 * x^2 * (n+1)", &s).unwrap();
        assert_eq!(d.shift_quotient(0), rf("2*(n+2)/(n+1)"));
        assert_eq!(d.log_derivative(), &rf("2/x"));
    }

    #[test]
    fn printed_form_reparses() {
        let s = spec();
        for t in [
            "(x*(1-x))^n * exp(-x)",
            "x^n/(x+1)^(n+r+1)",
            "x^(2*n)/(x^2+1)^(n+1)",
            "-3/(n+1) * x^(n+2) * (x+1) * exp(x^2/2 - r*x)",
            "2^n * (x^2+r)^(r/2 - n)",
            "7",
        ] {
            let h = HyperTerm::parse(t, &s).unwrap();
            let again = HyperTerm::parse(&h.to_string(), &s).unwrap();
            assert_eq!(again, h, "{t} printed as {h}");
        }
    }
}
