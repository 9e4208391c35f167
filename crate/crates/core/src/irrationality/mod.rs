//! Integer approximants to `e⁻¹`, certified constants, decay and
//! approximation-exponent checks, and leading-coefficient analysis of
//! recurrence operators.
//!
//! Exponent estimates are taken on the reduced fractions `p/q = −a_n/b_n`.
//! The raw `b_n` carry a common factor with `a_n` that grows like `n!`, so
//! exponents measured against `|b_n|` collapse toward 1; both are reported.

mod constants;
mod poincare;

use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::arith::{ln_integer, ln_rational, Integer, Rational};
use crate::az::{az_derive, AzError, AzResult, RecOperator, SearchConfig};
use crate::expr::{HyperTerm, VarSpec};
use crate::recurrence::{unroll_integers, RecurrenceError};

pub use constants::{constant_inv_e, constant_pi, decimal_string, inv_e_partial, CertifiedValue};
pub use poincare::{poincare_leading, root_count, PoincareReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IrrationalityError {
    #[error("precision of {digits} digits is insufficient at n = {n}")]
    InsufficientPrecision { n: i64, digits: u32 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Recurrence(#[from] RecurrenceError),
    #[error(transparent)]
    Az(#[from] AzError),
}

/// Integrand whose integrals over `[0, 1]` are `a_n + b_n e⁻¹`.
pub const E_INTEGRAND: &str = "(x*(1 - x))^n*exp(-x)";
pub const E_OPERATOR: &str = "N^2 + 2*(2*n + 3)*(n + 2)*N - (n + 1)*(n + 2)";
pub const E_START: i64 = 1;
pub const E_A_INITIALS: [i64; 2] = [-1, 14];
pub const E_B_INITIALS: [i64; 2] = [3, -38];

/// Both integer sequences, indexed from `start`.
pub fn integer_pair_sequence(
    op: &RecOperator,
    a_initials: &[Integer],
    b_initials: &[Integer],
    start: i64,
    count: usize,
) -> Result<(Vec<Integer>, Vec<Integer>), IrrationalityError> {
    Ok((unroll_integers(op, a_initials, start, count)?, unroll_integers(op, b_initials, start, count)?))
}

/// One row of the approximation analysis.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxRecord {
    pub n: i64,
    pub a: Integer,
    pub b: Integer,
    pub g: Integer,
    /// `−a/b` in lowest terms, `q > 0`.
    pub p: Integer,
    pub q: Integer,
    /// Certified enclosure of `|e⁻¹ − p/q|`.
    pub error_lower: Rational,
    pub error_upper: Rational,
    /// Certified upper bound on `|a + b e⁻¹|`.
    pub residual_upper: Rational,
    /// Certified lower bound on `(1 − e⁻¹)·4⁻ⁿ`.
    pub decay_bound: Rational,
    pub decay_holds: bool,
    /// `−ln|e⁻¹ − p/q| / ln q`; absent when `q = 1`.
    pub exponent: Option<f64>,
    /// The same with `|b|` in place of `q`.
    pub raw_exponent: Option<f64>,
}

impl ApproxRecord {
    pub fn fraction(&self) -> Rational {
        Rational::new(self.p.clone(), self.q.clone())
    }

    pub fn to_json(&self, digits: u32) -> Value {
        json!({
            "n": self.n,
            "a": self.a.to_string(),
            "b": self.b.to_string(),
            "gcd": self.g.to_string(),
            "p": self.p.to_string(),
            "q": self.q.to_string(),
            "decimal": { "digits": digits, "value": decimal_string(&self.fraction(), digits) },
            "errorUpper": rational_sci(&self.error_upper),
            "residualUpper": rational_sci(&self.residual_upper),
            "decayBound": rational_sci(&self.decay_bound),
            "decayHolds": self.decay_holds,
            "exponent": self.exponent,
            "rawExponent": self.raw_exponent,
        })
    }
}

/// Short scientific rendering of a positive rational, e.g. `3.2e-41`.
pub fn rational_sci(v: &Rational) -> String {
    if v.is_zero() {
        return "0".into();
    }
    let l10 = ln_rational(&v.abs()) / std::f64::consts::LN_10;
    let e = l10.floor();
    let m = 10f64.powf(l10 - e);
    let sign = if v.is_negative() { "-" } else { "" };
    format!("{sign}{m:.4}e{}", e as i64)
}

fn abs_interval(lo: &Rational, hi: &Rational) -> (Rational, Rational) {
    if lo.is_positive() {
        (lo.clone(), hi.clone())
    } else if hi.is_negative() {
        (-hi, -lo)
    } else {
        (Rational::zero(), lo.abs().max(hi.abs()))
    }
}

/// Ratio of certified error to measured quantity above which estimates are
/// refused.
fn precision_ratio() -> Rational {
    Rational::new(Integer::one(), Integer::from(1_000_000))
}

fn record(n: i64, a: Integer, b: Integer, c: &CertifiedValue, digits: u32) -> Result<ApproxRecord, IrrationalityError> {
    let insufficient = || IrrationalityError::InsufficientPrecision { n, digits };
    if b.is_zero() {
        return Err(IrrationalityError::InvalidArgument(format!("b_{n} = 0")));
    }
    let g = a.gcd(&b);
    let frac = Rational::new(-a.clone(), b.clone());
    let (p, q) = (frac.numer().clone(), frac.denom().clone());

    // a + b t is monotone in t, so the extremes sit at the interval ends.
    let ra = Rational::from_integer(a.clone());
    let rb = Rational::from_integer(b.clone());
    let at_lo = &ra + &rb * c.lower();
    let at_hi = &ra + &rb * c.upper();
    let (res_lo, res_hi) = abs_interval(&at_lo.clone().min(at_hi.clone()), &at_lo.max(at_hi));

    let four_n = Rational::from_integer(Integer::from(4).pow(n.unsigned_abs() as u32));
    let decay_bound = (Rational::one() - c.upper()) / &four_n;
    let decay_upper = (Rational::one() - c.lower()) / &four_n;
    let decay_holds = if res_hi <= decay_bound {
        true
    } else if res_lo > decay_upper {
        false
    } else {
        return Err(insufficient());
    };

    let (error_lower, error_upper) = abs_interval(&(c.lower() - &frac), &(c.upper() - &frac));
    let measured = (&c.value - &frac).abs();
    if measured.is_zero() || c.bound > &measured * precision_ratio() {
        return Err(insufficient());
    }
    let ln_err = ln_rational(&measured);
    let exponent = (!q.is_one()).then(|| -ln_err / ln_integer(&q));
    let babs = b.abs();
    let raw_exponent = (!babs.is_one()).then(|| -ln_err / ln_integer(&babs));
    Ok(ApproxRecord {
        n,
        a,
        b,
        g,
        p,
        q,
        error_lower,
        error_upper,
        residual_upper: res_hi,
        decay_bound,
        decay_holds,
        exponent,
        raw_exponent,
    })
}

/// Records for `n = start..=n_max` with `e⁻¹` certified to `digits` places.
/// About `4·n_max` digits suffice.
pub fn approximation_report(
    op: &RecOperator,
    a_initials: &[Integer],
    b_initials: &[Integer],
    start: i64,
    n_max: i64,
    digits: u32,
) -> Result<Vec<ApproxRecord>, IrrationalityError> {
    if n_max < start {
        return Err(IrrationalityError::InvalidArgument(format!("n_max {n_max} < start {start}")));
    }
    let count = (n_max - start + 1) as usize;
    let (a, b) = integer_pair_sequence(op, a_initials, b_initials, start, count)?;
    let c = constant_inv_e(digits);
    a.into_iter().zip(b).enumerate().map(|(i, (a, b))| record(start + i as i64, a, b, &c, digits)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GcdRow {
    pub n: i64,
    pub g: Integer,
    pub a_reduced: Integer,
    pub b_reduced: Integer,
}

pub fn gcd_structure(records: &[ApproxRecord]) -> Vec<GcdRow> {
    records.iter().map(|r| GcdRow { n: r.n, g: r.g.clone(), a_reduced: &r.a / &r.g, b_reduced: &r.b / &r.g }).collect()
}

/// Whether `|e⁻¹ − p/q| ≤ C / q^(1+δ)` holds for each record, decided from
/// the certified enclosure.
pub fn irrationality_criterion_check(
    records: &[ApproxRecord],
    c: &Rational,
    delta: &Rational,
) -> Result<Vec<(i64, bool)>, IrrationalityError> {
    if !c.is_positive() || !delta.is_positive() {
        return Err(IrrationalityError::InvalidArgument("C and delta must be positive".into()));
    }
    let too_big = || IrrationalityError::InvalidArgument(format!("delta {delta} is too large"));
    let u = delta.numer().to_u32().ok_or_else(too_big)?;
    let v = delta.denom().to_u32().ok_or_else(too_big)?;
    // E ≤ C q^-(1+u/v)  ⇔  E^v q^(u+v) ≤ C^v
    let cv = c.pow(v as i32);
    records
        .iter()
        .map(|r| {
            let qp = Rational::from_integer(r.q.pow(u + v));
            if r.error_upper.pow(v as i32) * &qp <= cv {
                Ok((r.n, true))
            } else if r.error_lower.pow(v as i32) * &qp > cv {
                Ok((r.n, false))
            } else {
                Err(IrrationalityError::InsufficientPrecision { n: r.n, digits: 0 })
            }
        })
        .collect()
}

/// The full `e⁻¹` analysis: operator derivation, records, gcd structure and
/// leading-coefficient report.
pub struct EAnalysis {
    pub derivation: AzResult,
    pub matches_known_operator: bool,
    pub records: Vec<ApproxRecord>,
    pub gcds: Vec<GcdRow>,
    pub poincare: PoincareReport,
    pub digits: u32,
}

pub fn analyze_e(count: usize, digits: u32) -> Result<EAnalysis, IrrationalityError> {
    if count == 0 {
        return Err(IrrationalityError::InvalidArgument("count must be positive".into()));
    }
    let spec = VarSpec::default();
    let h = HyperTerm::parse(E_INTEGRAND, &spec).map_err(AzError::from)?;
    let derivation = az_derive(&h, &SearchConfig::default())?;
    let known = RecOperator::parse(E_OPERATOR, &spec)?;
    let matches_known_operator = derivation.operator.equivalent(&known);
    let op = derivation.operator.normalized().0;
    let ints = |v: [i64; 2]| v.map(Integer::from).to_vec();
    let records = approximation_report(
        &op,
        &ints(E_A_INITIALS),
        &ints(E_B_INITIALS),
        E_START,
        E_START + count as i64 - 1,
        digits,
    )?;
    let gcds = gcd_structure(&records);
    let poincare = poincare_leading(&op);
    Ok(EAnalysis { derivation, matches_known_operator, records, gcds, poincare, digits })
}

impl PoincareReport {
    pub fn to_json(&self) -> Value {
        json!({
            "operator": self.operator.to_string(),
            "components": self.components.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "top": self.top.to_string(),
            "roots": self.roots.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "unsolvedDegree": self.unsolved_degree,
            "degenerate": self.degenerate,
        })
    }
}

impl EAnalysis {
    pub fn to_json(&self) -> Value {
        json!({
            "operator": self.derivation.operator.to_string(),
            "certificate": self.derivation.certificate.as_ratfunc().to_string(),
            "matchesKnownOperator": self.matches_known_operator,
            "precisionDigits": self.digits,
            "records": self.records.iter().map(|r| r.to_json(self.digits.min(60))).collect::<Vec<_>>(),
            "gcd": self.gcds.iter().map(|g| json!({
                "n": g.n,
                "g": g.g.to_string(),
                "aReduced": g.a_reduced.to_string(),
                "bReduced": g.b_reduced.to_string(),
            })).collect::<Vec<_>>(),
            "poincare": self.poincare.to_json(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn e_op() -> RecOperator {
        RecOperator::parse(E_OPERATOR, &VarSpec::default()).unwrap()
    }

    fn records(n_max: i64, digits: u32) -> Vec<ApproxRecord> {
        approximation_report(&e_op(), &[int(-1), int(14)], &[int(3), int(-38)], 1, n_max, digits).unwrap()
    }

    #[test]
    fn pair_sequence() {
        let (a, b) = integer_pair_sequence(&e_op(), &[int(-1), int(14)], &[int(3), int(-38)], 1, 4).unwrap();
        assert_eq!(a, vec![int(-1), int(14), int(-426), int(24024)]);
        assert_eq!(b, vec![int(3), int(-38), int(1158), int(-65304)]);
        let f = RecOperator::parse("N - (n + 1)", &VarSpec::default()).unwrap();
        let (a, _) = integer_pair_sequence(&f, &[int(1)], &[int(1)], 0, 5).unwrap();
        assert_eq!(a, vec![int(1), int(1), int(2), int(6), int(24)]);
    }

    #[test]
    fn small_records() {
        let r = records(4, 40);
        assert_eq!(r[3].fraction(), rat(24024, 65304));
        assert_eq!(decimal_string(&r[3].fraction(), 8), "0.36787945");
        assert!(r.iter().all(|x| x.decay_holds));
        let g: Vec<Integer> = gcd_structure(&r).into_iter().map(|g| g.g).collect();
        assert_eq!(g, vec![int(1), int(2), int(6), int(24)]);
    }

    #[test]
    fn criterion_small_cases() {
        let r = records(20, 80);
        assert_eq!(r[0].fraction(), rat(1, 3));
        let one = rat(1, 1);
        let t = irrationality_criterion_check(&r, &one, &one).unwrap();
        assert!(t.iter().all(|&(_, ok)| ok));
        let t = irrationality_criterion_check(&r[15..], &one, &rat(100, 1)).unwrap();
        assert!(t.iter().all(|&(_, ok)| !ok));
        assert!(irrationality_criterion_check(&r, &one, &rat(0, 1)).is_err());
    }

    #[test]
    fn precision_is_checked() {
        let err = approximation_report(&e_op(), &[int(-1), int(14)], &[int(3), int(-38)], 1, 20, 10);
        assert!(matches!(err, Err(IrrationalityError::InsufficientPrecision { .. })));
    }

    #[test]
    fn sci_rendering() {
        assert_eq!(rational_sci(&rat(1, 1000)), "1.0000e-3");
        assert_eq!(rational_sci(&rat(-25, 1)), "-2.5000e1");
    }
}
