//! Adaptive Gauss–Legendre quadrature of hyperexponential integrands over
//! finite, half-infinite and full-line intervals.
//!
//! Infinite intervals are mapped onto bounded ones; the rule is open, so the
//! integrand is never evaluated at an interval end. Panels are refined one at
//! a time (largest error first) and summed in order of position, so results
//! are bitwise reproducible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use once_cell::sync::Lazy;
use thiserror::Error;

use crate::arith::{parse_rational, rational_to_f64, Rational};
use crate::expr::{EvalError, HyperTerm, ParamValues};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadError {
    #[error("no convergence: error estimate {estimate} above tolerance after {panels} panels")]
    NonConvergence { estimate: String, panels: usize },
    #[error("integrand evaluation failed at x = {x}: {source}")]
    Evaluation { x: String, source: EvalError },
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("tolerance must be positive")]
    InvalidTolerance,
}

/// Integration domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Interval {
    Finite(Rational, Rational),
    HalfInfinite(Rational),
    FullLine,
}

impl Interval {
    pub fn finite(a: Rational, b: Rational) -> Result<Interval, QuadError> {
        if a < b {
            Ok(Interval::Finite(a, b))
        } else {
            Err(QuadError::InvalidInterval(format!("[{a}, {b}] is empty")))
        }
    }

    /// Endpoint labels and values; `None` stands for an infinite end.
    pub fn endpoints(&self) -> [Option<Rational>; 2] {
        match self {
            Interval::Finite(a, b) => [Some(a.clone()), Some(b.clone())],
            Interval::HalfInfinite(a) => [Some(a.clone()), None],
            Interval::FullLine => [None, None],
        }
    }
}

impl FromStr for Interval {
    type Err = QuadError;

    /// `a,b`, `a,inf` or `-inf,inf`.
    fn from_str(text: &str) -> Result<Interval, QuadError> {
        let bad = || QuadError::InvalidInterval(format!("`{text}`; expected a,b | a,inf | -inf,inf"));
        let (lo, hi) = text.split_once(',').ok_or_else(bad)?;
        let (lo, hi) = (lo.trim(), hi.trim());
        let inf = |s: &str| matches!(s, "inf" | "+inf" | "oo");
        match (lo, hi) {
            ("-inf" | "-oo", h) if inf(h) => Ok(Interval::FullLine),
            (l, h) if inf(h) => Ok(Interval::HalfInfinite(parse_rational(l).ok_or_else(bad)?)),
            (l, h) => Interval::finite(parse_rational(l).ok_or_else(bad)?, parse_rational(h).ok_or_else(bad)?),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interval::Finite(a, b) => write!(f, "{a},{b}"),
            Interval::HalfInfinite(a) => write!(f, "{a},inf"),
            Interval::FullLine => write!(f, "-inf,inf"),
        }
    }
}

/// Change of variables `x = φ(t)` onto a bounded parameter range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transform {
    interval: Interval,
}

/// Substitution for `interval`: `[a,b]` affinely from `(0,1)`,
/// `[a,∞)` via `x = a + t/(1−t)` on `(0,1)` and `(−∞,∞)` via
/// `x = t/(1−t²)` on `(−1,1)`.
pub fn transform(interval: &Interval) -> Transform {
    Transform { interval: interval.clone() }
}

impl Transform {
    pub fn parameter_range(&self) -> (f64, f64) {
        match self.interval {
            Interval::FullLine => (-1.0, 1.0),
            _ => (0.0, 1.0),
        }
    }

    /// `(x, dx/dt)` at `t`.
    pub fn map(&self, t: f64) -> (f64, f64) {
        match &self.interval {
            Interval::Finite(a, b) => {
                let (a, b) = (rational_to_f64(a), rational_to_f64(b));
                (a + (b - a) * t, b - a)
            }
            Interval::HalfInfinite(a) => {
                let s = 1.0 - t;
                (rational_to_f64(a) + t / s, 1.0 / (s * s))
            }
            Interval::FullLine => {
                let s = 1.0 - t * t;
                (t / s, (1.0 + t * t) / (s * s))
            }
        }
    }

    /// Exact `(x, dx/dt)`; `None` where the substitution is singular.
    pub fn map_exact(&self, t: &Rational) -> Option<(Rational, Rational)> {
        let one = Rational::from_integer(1.into());
        match &self.interval {
            Interval::Finite(a, b) => Some((a + (b - a) * t, b - a)),
            Interval::HalfInfinite(a) => {
                let s = &one - t;
                if s == Rational::from_integer(0.into()) {
                    return None;
                }
                Some((a + t / &s, &one / (&s * &s)))
            }
            Interval::FullLine => {
                let s = &one - t * t;
                if s == Rational::from_integer(0.into()) {
                    return None;
                }
                Some((t / &s, (&one + t * t) / (&s * &s)))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadConfig {
    pub tol: f64,
    /// Maximum number of bisections of any one panel.
    pub max_depth: u32,
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { tol: 1e-12, max_depth: 40, max_panels: 200_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

const ORDER: usize = 20;

/// Nodes and weights of the Gauss–Legendre rule on `[-1, 1]`.
static RULE: Lazy<Vec<(f64, f64)>> = Lazy::new(|| {
    let n = ORDER;
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-17 {
                break;
            }
        }
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule
});

fn gauss<F>(f: &mut F, a: f64, b: f64) -> Result<f64, QuadError>
where
    F: FnMut(f64) -> Result<f64, QuadError>,
{
    let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
    let mut s = 0.0;
    for &(x, w) in RULE.iter() {
        s += w * f(c + h * x)?;
    }
    Ok(s * h)
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
    id: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then_with(|| other.id.cmp(&self.id))
    }
}

fn make_panel<F>(f: &mut F, a: f64, b: f64, depth: u32, id: usize) -> Result<Panel, QuadError>
where
    F: FnMut(f64) -> Result<f64, QuadError>,
{
    let m = (a + b) / 2.0;
    let whole = gauss(f, a, b)?;
    let value = gauss(f, a, m)? + gauss(f, m, b)?;
    Ok(Panel { a, b, value, error: (whole - value).abs(), depth, id })
}

/// Neumaier-compensated sum.
fn stable_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let t = s + v;
        if s.abs() >= v.abs() {
            c += (s - t) + v;
        } else {
            c += (v - t) + s;
        }
        s = t;
    }
    s + c
}

/// Adaptive integration of `f` over `(lo, hi)`.
///
/// Refinement stops once the summed panel error is below `tol` or below the
/// rounding floor `1e3·ε·Σ|panel|`, whichever is larger.
pub fn integrate_fn<F>(mut f: F, lo: f64, hi: f64, config: &QuadConfig) -> Result<QuadResult, QuadError>
where
    F: FnMut(f64) -> Result<f64, QuadError>,
{
    if config.tol.is_nan() || config.tol <= 0.0 {
        return Err(QuadError::InvalidTolerance);
    }
    let mut next_id = 0;
    let mut heap = BinaryHeap::new();
    heap.push(make_panel(&mut f, lo, hi, 0, next_id)?);
    next_id += 1;
    loop {
        let error: f64 = stable_sum(heap.iter().map(|p| p.error));
        let magnitude: f64 = stable_sum(heap.iter().map(|p| p.value.abs()));
        let floor = 1e3 * f64::EPSILON * magnitude;
        if error <= config.tol.max(floor) {
            let mut panels: Vec<Panel> = heap.into_vec();
            panels.sort_by(|p, q| p.a.total_cmp(&q.a));
            return Ok(QuadResult {
                value: stable_sum(panels.iter().map(|p| p.value)),
                error_estimate: error,
                panels: panels.len(),
            });
        }
        let worst = heap.pop().expect("nonempty");
        if worst.depth >= config.max_depth || heap.len() + 2 > config.max_panels {
            return Err(QuadError::NonConvergence { estimate: format!("{error:e}"), panels: heap.len() + 1 });
        }
        let m = (worst.a + worst.b) / 2.0;
        heap.push(make_panel(&mut f, worst.a, m, worst.depth + 1, next_id)?);
        heap.push(make_panel(&mut f, m, worst.b, worst.depth + 1, next_id + 1)?);
        next_id += 2;
    }
}

/// `∫ F_n(x) dx` over `interval`.
pub fn integrate(
    h: &HyperTerm,
    n: i64,
    interval: &Interval,
    params: &ParamValues,
    config: &QuadConfig,
) -> Result<QuadResult, QuadError> {
    let tr = transform(interval);
    let (lo, hi) = tr.parameter_range();
    integrate_fn(
        |t| {
            let (x, jac) = tr.map(t);
            let v = h
                .evaluate_numeric(n, x, params)
                .map_err(|source| QuadError::Evaluation { x: x.to_string(), source })?;
            Ok(if v == 0.0 { 0.0 } else { v * jac })
        },
        lo,
        hi,
        config,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::expr::VarSpec;

    fn h(s: &str) -> HyperTerm {
        HyperTerm::parse(s, &VarSpec::default()).unwrap()
    }

    fn quad(s: &str, n: i64, iv: &str) -> f64 {
        integrate(&h(s), n, &iv.parse().unwrap(), &ParamValues::new(), &QuadConfig::default()).unwrap().value
    }

    #[test]
    fn rule_integrates_polynomials() {
        let s: f64 = RULE.iter().map(|(_, w)| w).sum();
        assert!((s - 2.0).abs() < 1e-14);
        let x38: f64 = RULE.iter().map(|(x, w)| w * x.powi(38)).sum();
        assert!((x38 - 2.0 / 39.0).abs() < 1e-14);
    }

    #[test]
    fn examples() {
        assert!((quad("x*(1-x)", 0, "0,1") - 1.0 / 6.0).abs() < 1e-12);
        assert!((quad("exp(-x)*x^n", 3, "0,inf") - 6.0).abs() < 1e-11);
        assert!((quad("1/(x^2+1)", 0, "-inf,inf") - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn transforms() {
        let t = transform(&"0,inf".parse().unwrap());
        assert_eq!(t.map_exact(&rat(1, 2)), Some((rat(1, 1), rat(4, 1))));
        assert_eq!(t.map(0.5), (1.0, 4.0));
        assert_eq!(t.map_exact(&rat(1, 1)), None);
        let t = transform(&"0,1".parse().unwrap());
        assert_eq!(t.map_exact(&rat(1, 3)), Some((rat(1, 3), rat(1, 1))));
        let t = transform(&Interval::FullLine);
        assert_eq!(t.map_exact(&rat(0, 1)), Some((rat(0, 1), rat(1, 1))));
        assert_eq!(t.parameter_range(), (-1.0, 1.0));
    }

    #[test]
    fn interval_parsing() {
        assert_eq!("-inf,inf".parse::<Interval>().unwrap(), Interval::FullLine);
        assert_eq!("1/2, inf".parse::<Interval>().unwrap(), Interval::HalfInfinite(rat(1, 2)));
        assert!("1,0".parse::<Interval>().is_err());
        assert!("0".parse::<Interval>().is_err());
        assert!("-inf,0".parse::<Interval>().is_err());
        assert_eq!(Interval::finite(rat(0, 1), rat(1, 1)).unwrap().to_string(), "0,1");
    }

    #[test]
    fn evaluation_failure_is_reported() {
        let err =
            integrate(&h("(x - 1/2)^(1/2)"), 0, &"0,1".parse().unwrap(), &ParamValues::new(), &QuadConfig::default());
        assert!(matches!(err, Err(QuadError::Evaluation { .. })));
    }

    #[test]
    fn deterministic() {
        let a = quad("x^n/(x+1)^(n+3)", 4, "0,inf");
        let b = quad("x^n/(x+1)^(n+3)", 4, "0,inf");
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
