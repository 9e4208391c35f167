//! Almkvist–Zeilberger creative telescoping.
//!
//! For a hyperexponential `F_n(x)` with `F(n+1)/F(n) = R1` and
//! `F'/F = R2 = A/B`, [`az_derive`] searches for `p_0..p_d` and a rational
//! `R(n, x)` with
//!
//! ```text
//! Σ_k p_k(n) F_{n+k}(x) = d/dx (R(n, x) F_n(x)).
//! ```
//!
//! Dividing by `F_n`, the left side is `T = Σ q_k S_k` with `S_0 = 1`,
//! `S_k = S_{k-1} R1(n+k-1)`, and the right side is `R' + R·R2`. With `V`
//! the common denominator of the `S_k` the ansatz `R = z(x)/W`,
//! `W = B·V`, turns the identity into a polynomial identity in `x` that is
//! linear in the coefficients of `z` and in the `q_k`. Its null space is
//! computed over `Q(n, params)`. Every returned pair is verified exactly.

mod endpoint;
mod operator;

use std::fmt;

use thiserror::Error;

use crate::arith::{lcm, null_space_fraction_free, ArithError, MultiPoly, RatFunc, Rational, Vars};
use crate::expr::{parse_ratfunc, ExprError, HyperTerm, VarSpec};

pub use endpoint::{endpoint_report, EndpointConfig, EndpointReport};
pub use operator::{RecOperator, SHIFT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AzError {
    #[error("no telescoper found up to order {max_order} ({attempts} ansatz attempts)")]
    NotFound { max_order: usize, attempts: usize },
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("parameters {0:?} must be given values")]
    UnspecializedParameters(Vec<String>),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// The rational function `R(n, x)` of a telescoping identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate(pub RatFunc);

impl Certificate {
    pub fn parse(text: &str, spec: &VarSpec) -> Result<Certificate, AzError> {
        Ok(Certificate(parse_ratfunc(text, spec.vars())?))
    }

    pub fn as_ratfunc(&self) -> &RatFunc {
        &self.0
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Caps for the ansatz search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_order: usize,
    /// Extra attempts with a larger numerator degree, per order.
    pub degree_retries: usize,
    pub degree_step: usize,
    /// How many times the candidate denominator is multiplied by `V`.
    pub denominator_boosts: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_order: 4, degree_retries: 3, degree_step: 2, denominator_boosts: 1 }
    }
}

/// One solved ansatz system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attempt {
    pub order: usize,
    /// Numerator degree bounds covered by this attempt.
    pub numerator_degrees: Vec<usize>,
    /// Exponent of `V` in the candidate denominator `W = B·V^k`.
    pub denominator_power: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SearchStats {
    pub orders_tried: Vec<usize>,
    pub attempts: Vec<Attempt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AzResult {
    pub operator: RecOperator,
    pub certificate: Certificate,
    pub stats: SearchStats,
    /// Parameter-dependent polynomials (leading coefficient of the operator,
    /// denominator of the certificate) that must not vanish identically in
    /// `n` after parameter values are substituted.
    pub genericity: Vec<MultiPoly>,
}

/// `T = Σ q_k S_k`, the left side of the identity divided by `F_n`.
pub fn telescoper_lhs(h: &HyperTerm, q: &[RatFunc]) -> RatFunc {
    let vars = h.spec().vars();
    let mut s = RatFunc::one(vars);
    let mut t = RatFunc::zero(vars);
    for (k, qk) in q.iter().enumerate() {
        if k > 0 {
            s = &s * &h.shift_quotient(k as u32 - 1);
        }
        if !qk.is_zero() {
            t = &t + &(qk * &s);
        }
    }
    t
}

/// Outcome of [`verify_certificate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub verified: bool,
    /// `T − (R' + R·R2)`; zero iff verified.
    pub residual: RatFunc,
    /// When the pair fails but `T = c · (R' + R·R2)` with `c` free of `x`,
    /// the factor `c`: replacing `R` by `c·R` repairs the pair.
    pub factor: Option<RatFunc>,
}

/// Exact check of `L F = d/dx (R F)`.
pub fn verify_certificate(h: &HyperTerm, op: &RecOperator, cert: &Certificate) -> Result<Verification, AzError> {
    let spec = h.spec();
    let vars = spec.vars();
    let op = op.with_vars(vars)?;
    let r = cert.0.with_vars(vars)?;
    if op.coefficients().iter().any(|c| c.uses_var(spec.x_index())) {
        return Err(AzError::InvalidOperator(format!("coefficients depend on {}", spec.x())));
    }
    let t = telescoper_lhs(h, op.coefficients());
    let rhs = &r.derivative_index(spec.x_index()) + &(&r * h.log_derivative());
    let residual = &t - &rhs;
    let verified = residual.is_zero();
    let factor = if verified || t.is_zero() || rhs.is_zero() {
        None
    } else {
        let c = t.try_div(&rhs)?;
        (!c.uses_var(spec.x_index())).then_some(c)
    };
    Ok(Verification { verified, residual, factor })
}

fn x_coeffs(p: &MultiPoly, xi: usize) -> Vec<MultiPoly> {
    p.coeffs_in(xi)
}

fn degree_x(p: &MultiPoly, xi: usize) -> usize {
    p.degree_in(xi).unwrap_or(0) as usize
}

/// Ansatz data for one order `d` and one denominator power.
struct Ansatz {
    w: MultiPoly,
    /// Coefficients in `x` of `G = A·(W/B) − W'`.
    g: Vec<MultiPoly>,
    w_coeffs: Vec<MultiPoly>,
    /// Coefficients in `x` of `−(W²/V)·U_k`.
    q_cols: Vec<Vec<MultiPoly>>,
}

impl Ansatz {
    fn new(a: &MultiPoly, b: &MultiPoly, v: &MultiPoly, u: &[MultiPoly], power: usize, xi: usize) -> Ansatz {
        let vp = v.pow(power as u32);
        let w = b * &vp;
        let w_over_b = vp.clone();
        let w2_over_v = &(&b.pow(2) * &vp) * &v.pow(power as u32 - 1);
        let g = &(a * &w_over_b) - &w.derivative(xi);
        let q_cols = u.iter().map(|uk| x_coeffs(&-(&w2_over_v * uk), xi)).collect();
        Ansatz { g: x_coeffs(&g, xi), w_coeffs: x_coeffs(&w, xi), w, q_cols }
    }

    /// Columns `[c_0..c_D, q_0..q_d]`, each as coefficients in `x`.
    fn columns(&self, dz: usize, vars: &Vars) -> Vec<Vec<MultiPoly>> {
        let zero = MultiPoly::zero(vars);
        let mut cols = Vec::with_capacity(dz + 1 + self.q_cols.len());
        for i in 0..=dz {
            let len = (self.g.len() + i).max(self.w_coeffs.len() + i);
            let mut col = vec![zero.clone(); len];
            for (j, c) in self.g.iter().enumerate() {
                col[i + j] = &col[i + j] + c;
            }
            if i > 0 {
                let s = crate::arith::rat_int(i as i64);
                for (j, c) in self.w_coeffs.iter().enumerate() {
                    col[i - 1 + j] = &col[i - 1 + j] + &c.scale(&s);
                }
            }
            cols.push(col);
        }
        cols.extend(self.q_cols.iter().cloned());
        cols
    }
}

struct Candidate {
    z: Vec<RatFunc>,
    q: Vec<RatFunc>,
}

/// Rational values substituted for the index and parameters in the quick
/// solvability test.
const PROBES: [(i64, i64); 2] = [(8191, 97), (7919, 113)];

/// Specializing the index and parameters can only enlarge the null space, so
/// no solution with some `q_k != 0` at a probe point means none generically.
fn solvable_at_probe(matrix: &[Vec<MultiPoly>], dz: usize, xi: usize, probe: usize) -> Result<bool, AzError> {
    let (p, q) = PROBES[probe];
    let point: Vec<Rational> =
        (0..xi).map(|i| Rational::new((p + 37 * i as i64).into(), (q + 11 * i as i64).into())).collect();
    let special: Vec<Vec<MultiPoly>> = matrix
        .iter()
        .map(|row| {
            row.iter().map(|e| point.iter().enumerate().fold(e.clone(), |acc, (i, v)| acc.specialize(i, v))).collect()
        })
        .collect();
    let (basis, _) = null_space_fraction_free(&special)?;
    Ok(basis.iter().any(|v| v[dz + 1..].iter().any(|e| !e.is_zero())))
}

fn solve_ansatz(ansatz: &Ansatz, dz: usize, vars: &Vars) -> Result<Option<Candidate>, AzError> {
    let cols = ansatz.columns(dz, vars);
    let nrows = cols.iter().map(Vec::len).max().unwrap_or(0);
    let zero = MultiPoly::zero(vars);
    let mut matrix: Vec<Vec<MultiPoly>> =
        (0..nrows).map(|r| cols.iter().map(|c| c.get(r).cloned().unwrap_or_else(|| zero.clone())).collect()).collect();
    matrix.retain(|row| row.iter().any(|e| !e.is_zero()));
    if matrix.is_empty() {
        return Ok(None);
    }
    let xi = vars.len() - 1;
    let mut possible = false;
    for probe in 0..PROBES.len() {
        if solvable_at_probe(&matrix, dz, xi, probe)? {
            possible = true;
            break;
        }
    }
    if !possible {
        return Ok(None);
    }
    let (basis, _) = null_space_fraction_free(&matrix)?;
    let best = basis
        .into_iter()
        .filter_map(|v| {
            let nz = v[dz + 1..].iter().filter(|e| !e.is_zero()).count();
            (nz > 0).then_some((nz, v))
        })
        .min_by_key(|(nz, _)| *nz);
    Ok(best.map(|(_, mut v)| {
        let q = v.split_off(dz + 1);
        Candidate { z: v, q }
    }))
}

/// Find the lowest-order telescoper and its certificate.
pub fn az_derive(h: &HyperTerm, config: &SearchConfig) -> Result<AzResult, AzError> {
    let spec = h.spec();
    let vars = spec.vars();
    let xi = spec.x_index();
    let r2 = h.log_derivative();
    let (a, b) = (r2.numer(), r2.denom());
    let mut stats = SearchStats::default();

    let mut s = vec![RatFunc::one(vars)];
    for d in 0..=config.max_order {
        if d > 0 {
            let next = &s[d - 1] * &h.shift_quotient(d as u32 - 1);
            s.push(next);
        }
        stats.orders_tried.push(d);
        let mut v = MultiPoly::one(vars);
        for sk in &s {
            v = lcm(&v, sk.denom())?;
        }
        let u: Vec<MultiPoly> =
            s.iter().map(|sk| sk.numer() * &v.exact_div(sk.denom()).expect("lcm is a common multiple")).collect();
        let boosts = if v.is_constant() { 0 } else { config.denominator_boosts };
        for power in 1..=1 + boosts {
            let ansatz = Ansatz::new(a, b, &v, &u, power, xi);
            let start = degree_x(&ansatz.w, xi) + degree_x(a, xi).max(degree_x(b, xi)) + d + 2;
            // solutions with a smaller numerator degree are solutions at the
            // largest bound too, so one solve covers the whole schedule
            let retries = if power == 1 { config.degree_retries } else { 0 };
            let dz = start + config.degree_retries * config.degree_step;
            stats.attempts.push(Attempt {
                order: d,
                numerator_degrees: (0..=retries).map(|k| dz - (retries - k) * config.degree_step).collect(),
                denominator_power: power,
            });
            let Some(cand) = solve_ansatz(&ansatz, dz, vars)? else {
                continue;
            };
            if let Some(result) = finish(h, &ansatz, cand, &stats)? {
                return Ok(result);
            }
        }
    }
    Err(AzError::NotFound { max_order: config.max_order, attempts: stats.attempts.len() })
}

fn finish(h: &HyperTerm, ansatz: &Ansatz, cand: Candidate, stats: &SearchStats) -> Result<Option<AzResult>, AzError> {
    let spec = h.spec();
    let vars = spec.vars();
    let xi = spec.x_index();
    let raw = RecOperator::from_coefficients(cand.q)?;
    let (operator, scale) = raw.normalized();
    let mut den = scale.denom().clone();
    for c in &cand.z {
        den = lcm(&den, c.denom())?;
    }
    let x = MultiPoly::var_index(vars, xi);
    let mut num = MultiPoly::zero(vars);
    for c in cand.z.iter().rev() {
        let c = c.numer() * &den.exact_div(c.denom()).expect("lcm is a common multiple");
        num = &(&num * &x) + &c;
    }
    let num = &num * scale.numer();
    let den = &den.exact_div(scale.denom()).expect("lcm is a common multiple") * &ansatz.w;
    let r = RatFunc::normalize(num, den)?;
    let certificate = Certificate(r);
    if !verify_certificate(h, &operator, &certificate)?.verified {
        return Ok(None);
    }
    let mut genericity: Vec<MultiPoly> = Vec::new();
    for p in [operator.leading().numer(), certificate.0.denom()] {
        let involves = spec.param_indices().any(|i| p.uses_var(i));
        if involves && !genericity.contains(p) {
            genericity.push(p.clone());
        }
    }
    Ok(Some(AzResult { operator, certificate, stats: stats.clone(), genericity }))
}
