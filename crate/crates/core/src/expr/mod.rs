//! Expression front end: parsing, exact conversion of expressions to
//! polynomials and rational functions, and normalization of integrands into
//! hyperexponential terms.
//!
//! The accepted integrand class is a product of
//! `base(x)^(α·n + β)` factors (rational bases in `x`, integer slopes `α`,
//! `β` polynomial in the declared parameters), one `exp(u(x))` with `u`
//! rational, and a prefactor free of `x`. That is exactly the class on which
//! both `F(n+1)/F(n)` and `F'(x)/F(x)` are rational functions. It is a chosen
//! concretization of "hypergeometric in n and x"; other closed forms with
//! rational ratios (e.g. `Γ(n)` prefactors) are not recognized.

mod hyperterm;
mod numeric;
mod parser;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::arith::{is_integer, parse_rational, ArithError, MultiPoly, RatFunc, Rational, Vars};

pub use hyperterm::{Exponent, Factor, HyperTerm};
pub use numeric::EvalError;
pub use parser::{parse, ExprTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { message: String, offset: usize },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("not a rational expression: {0}")]
    NotRational(String),
    #[error("not a polynomial: {0}")]
    NotPolynomial(String),
    #[error("not hyperexponential: {reason} (in `{subterm}`)")]
    NotHyperexponential { reason: String, subterm: String },
    #[error("invalid variable declaration: {0}")]
    InvalidDeclaration(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Names of the continuous variable, the discrete parameter, and any extra
/// symbolic parameters. Polynomials built for one integrand share the
/// variable list `[n, params..., x]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarSpec {
    x: String,
    n: String,
    params: Vec<String>,
    vars: Vars,
}

const RESERVED: &[&str] = &["exp", "N", "inv_e", "pi"];

fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl VarSpec {
    pub fn new(x: &str, n: &str, params: &[String]) -> Result<VarSpec, ExprError> {
        let mut all: Vec<&str> = vec![n];
        all.extend(params.iter().map(String::as_str));
        all.push(x);
        for (i, name) in all.iter().enumerate() {
            if !valid_ident(name) {
                return Err(ExprError::InvalidDeclaration(format!("`{name}` is not an identifier")));
            }
            if RESERVED.contains(name) {
                return Err(ExprError::InvalidDeclaration(format!("`{name}` is reserved")));
            }
            if all[..i].contains(name) {
                return Err(ExprError::InvalidDeclaration(format!("`{name}` declared twice")));
            }
        }
        Ok(VarSpec { x: x.to_string(), n: n.to_string(), params: params.to_vec(), vars: Vars::new(all) })
    }

    /// `x`, `n`, and the given parameters.
    pub fn with_params(params: &[&str]) -> VarSpec {
        let params: Vec<String> = params.iter().map(|s| s.to_string()).collect();
        VarSpec::new("x", "n", &params).expect("valid default names")
    }

    pub fn x(&self) -> &str {
        &self.x
    }

    pub fn n(&self) -> &str {
        &self.n
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn n_index(&self) -> usize {
        0
    }

    pub fn x_index(&self) -> usize {
        self.vars.len() - 1
    }

    pub fn param_indices(&self) -> std::ops::Range<usize> {
        1..self.vars.len() - 1
    }

    /// True when the function involves at least one declared parameter.
    pub fn involves_params(&self, f: &RatFunc) -> bool {
        self.param_indices().any(|i| f.uses_var(i))
    }
}

impl Default for VarSpec {
    fn default() -> Self {
        VarSpec::with_params(&[])
    }
}

/// Numeric values for symbolic parameters, e.g. `r=3/2`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParamValues(BTreeMap<String, Rational>);

impl ParamValues {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: Rational) -> Self {
        self.0.insert(name.to_string(), value);
        self
    }

    pub fn insert(&mut self, name: &str, value: Rational) {
        self.0.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<&Rational> {
        self.0.get(name)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Rational)> {
        self.0.iter()
    }

    /// Parse `name=value` pairs separated by commas.
    pub fn parse(text: &str) -> Result<ParamValues, ExprError> {
        let mut out = ParamValues::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| ExprError::InvalidDeclaration(format!("expected name=value, got `{item}`")))?;
            let v = parse_rational(value)
                .ok_or_else(|| ExprError::InvalidDeclaration(format!("bad rational `{value}`")))?;
            out.insert(name.trim(), v);
        }
        Ok(out)
    }

    /// Substitute every known parameter value into `f`.
    pub fn substitute(&self, f: &RatFunc) -> Result<RatFunc, ArithError> {
        let mut g = f.clone();
        for (name, value) in &self.0 {
            if let Some(i) = g.vars().index(name) {
                g = g.specialize(i, value)?;
            }
        }
        Ok(g)
    }
}

impl fmt::Display for ParamValues {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Exact conversion of an expression tree into a rational function over
/// `vars`. Fails on `exp` and on non-integer exponents.
pub fn to_ratfunc(tree: &ExprTree, vars: &Vars) -> Result<RatFunc, ExprError> {
    Ok(match tree {
        ExprTree::Num(r) => RatFunc::constant(vars, r.clone()),
        ExprTree::Var(name) => RatFunc::var(vars, name).map_err(|_| ExprError::UnknownIdentifier(name.clone()))?,
        ExprTree::Neg(a) => -to_ratfunc(a, vars)?,
        ExprTree::Add(a, b) => &to_ratfunc(a, vars)? + &to_ratfunc(b, vars)?,
        ExprTree::Sub(a, b) => &to_ratfunc(a, vars)? - &to_ratfunc(b, vars)?,
        ExprTree::Mul(a, b) => &to_ratfunc(a, vars)? * &to_ratfunc(b, vars)?,
        ExprTree::Div(a, b) => to_ratfunc(a, vars)?.try_div(&to_ratfunc(b, vars)?)?,
        ExprTree::Pow(a, b) => {
            let e = to_ratfunc(b, vars)?;
            let k = e
                .constant_value()
                .filter(is_integer)
                .ok_or_else(|| ExprError::NotRational(format!("non-integer exponent in `{tree}`")))?;
            let k: i64 =
                k.numer().try_into().map_err(|_| ExprError::NotRational(format!("exponent too large in `{tree}`")))?;
            to_ratfunc(a, vars)?.pow(k)?
        }
        ExprTree::Exp(_) => return Err(ExprError::NotRational(format!("`{tree}`"))),
    })
}

pub fn parse_ratfunc(text: &str, vars: &Vars) -> Result<RatFunc, ExprError> {
    to_ratfunc(&parse(text)?, vars)
}

pub fn parse_polynomial(text: &str, vars: &Vars) -> Result<MultiPoly, ExprError> {
    parse_ratfunc(text, vars)?.to_poly().ok_or_else(|| ExprError::NotPolynomial(text.to_string()))
}
