//! Exact unrolling of recurrences over `Q + Q·c`, closed-form ratio checks
//! and the binomial sum identity.

mod exact;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::arith::{RatFunc, Rational};
use crate::az::{AzError, RecOperator};
use crate::expr::{parse_ratfunc, VarSpec};

pub use exact::{ConstTag, ExactNumber};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecurrenceError {
    #[error("leading coefficient vanishes at index {0}")]
    SingularLeadingCoefficient(i64),
    #[error("cannot combine constants {0} and {1}")]
    MixedConstantTags(&'static str, &'static str),
    #[error("operator of order {order} needs {order} initial values, got {given}")]
    InitialCount { order: usize, given: usize },
    #[error("step to index {0} is not integral")]
    NonIntegralStep(i64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Operator(#[from] AzError),
}

/// Exact values `u(start), u(start+1), ...` of a sequence annihilated by
/// `operator`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceTable {
    pub operator: RecOperator,
    pub start: i64,
    pub values: Vec<ExactNumber>,
}

impl SequenceTable {
    pub fn get(&self, index: i64) -> Option<&ExactNumber> {
        usize::try_from(index - self.start).ok().and_then(|i| self.values.get(i))
    }

    /// Check `Σ p_k(m) u(m+k) = 0` for every window of the table.
    pub fn satisfies_recurrence(&self) -> Result<bool, RecurrenceError> {
        let d = self.operator.order();
        for (i, w) in self.values.windows(d + 1).enumerate() {
            let m = self.start + i as i64;
            let p = self.operator.eval_coefficients(&Rational::from_integer(m.into()))?;
            let mut s = ExactNumber::zero();
            for (pk, v) in p.iter().zip(w) {
                s = s.try_add(&v.scale(pk))?;
            }
            if !s.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "operator": self.operator.to_string(),
            "startIndex": self.start,
            "values": self.values.iter().map(|v| json!({
                "rational": v.rational_part().to_string(),
                "constCoeff": v.const_coeff().to_string(),
                "constTag": v.tag().name(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(value: &Value, spec: &VarSpec) -> Result<SequenceTable, RecurrenceError> {
        let bad = |what: &str| RecurrenceError::Parse(format!("sequence table: {what}"));
        let operator = RecOperator::parse(value["operator"].as_str().ok_or_else(|| bad("missing operator"))?, spec)?;
        let start = value["startIndex"].as_i64().ok_or_else(|| bad("missing startIndex"))?;
        let values = value["values"]
            .as_array()
            .ok_or_else(|| bad("missing values"))?
            .iter()
            .map(|v| {
                let field = |k: &str| v[k].as_str().ok_or_else(|| bad(k));
                let r = crate::arith::parse_rational(field("rational")?).ok_or_else(|| bad("rational"))?;
                let c = crate::arith::parse_rational(field("constCoeff")?).ok_or_else(|| bad("constCoeff"))?;
                let t: ConstTag = field("constTag")?.parse()?;
                Ok(ExactNumber::new(r, c, t))
            })
            .collect::<Result<Vec<_>, RecurrenceError>>()?;
        Ok(SequenceTable { operator, start, values })
    }
}

/// Unroll `operator` from `initials` (exactly `order` values at indices
/// `start..start+order`) to `count` values in total. Parameters must have
/// been specialized.
pub fn unroll(
    operator: &RecOperator,
    initials: &[ExactNumber],
    start: i64,
    count: usize,
) -> Result<SequenceTable, RecurrenceError> {
    let d = operator.order();
    if initials.len() != d || d == 0 {
        return Err(RecurrenceError::InitialCount { order: d, given: initials.len() });
    }
    let mut values: Vec<ExactNumber> = initials.to_vec();
    let mut m = start;
    while values.len() < count {
        let p = operator.eval_coefficients(&Rational::from_integer(m.into()))?;
        let lead = &p[d];
        if lead.is_zero() {
            return Err(RecurrenceError::SingularLeadingCoefficient(m));
        }
        let base = values.len() - d;
        let mut s = ExactNumber::zero();
        for k in 0..d {
            s = s.try_add(&values[base + k].scale(&p[k]))?;
        }
        values.push(s.scale(&(-Rational::one() / lead)));
        m += 1;
    }
    values.truncate(count);
    Ok(SequenceTable { operator: operator.clone(), start, values })
}

/// Integer-valued unrolling; fails when a step leaves the integers.
pub fn unroll_integers(
    operator: &RecOperator,
    initials: &[BigInt],
    start: i64,
    count: usize,
) -> Result<Vec<BigInt>, RecurrenceError> {
    let d = operator.order();
    if initials.len() != d || d == 0 {
        return Err(RecurrenceError::InitialCount { order: d, given: initials.len() });
    }
    let mut values: Vec<BigInt> = initials.to_vec();
    let mut m = start;
    while values.len() < count {
        let p = operator.eval_coefficients(&Rational::from_integer(m.into()))?;
        if p[d].is_zero() {
            return Err(RecurrenceError::SingularLeadingCoefficient(m));
        }
        let base = values.len() - d;
        let mut s = Rational::zero();
        for k in 0..d {
            s += &p[k] * Rational::from_integer(values[base + k].clone());
        }
        let next = -s / &p[d];
        if !next.is_integer() {
            return Err(RecurrenceError::NonIntegralStep(m + d as i64));
        }
        values.push(next.to_integer());
        m += 1;
    }
    values.truncate(count);
    Ok(values)
}

/// Ratio `c(n+1)/c(n)` of a hypergeometric sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperSeqRatio(RatFunc);

impl HyperSeqRatio {
    pub fn new(ratio: RatFunc) -> Result<HyperSeqRatio, RecurrenceError> {
        if ratio.is_zero() {
            return Err(RecurrenceError::Parse("zero ratio".into()));
        }
        Ok(HyperSeqRatio(ratio))
    }

    pub fn parse(text: &str, spec: &VarSpec) -> Result<HyperSeqRatio, RecurrenceError> {
        let r = parse_ratfunc(text, spec.vars()).map_err(|e| RecurrenceError::Parse(e.to_string()))?;
        if r.uses_var(spec.x_index()) {
            return Err(RecurrenceError::Parse(format!("ratio depends on {}", spec.x())));
        }
        HyperSeqRatio::new(r)
    }

    pub fn as_ratfunc(&self) -> &RatFunc {
        &self.0
    }
}

/// True iff `Σ_k p_k(n) Π_{j<k} ratio(n+j)` vanishes identically, i.e. every
/// sequence with this ratio is annihilated by `operator`.
pub fn check_solution(operator: &RecOperator, ratio: &HyperSeqRatio) -> Result<bool, RecurrenceError> {
    let r = ratio.0.with_vars(operator.vars()).map_err(AzError::from)?;
    let mut prod = RatFunc::one(operator.vars());
    let mut sum = RatFunc::zero(operator.vars());
    for (k, pk) in operator.coefficients().iter().enumerate() {
        if k > 0 {
            prod = &prod * &r.shift_index(0, k as i64 - 1);
        }
        sum = &sum + &(pk * &prod);
    }
    Ok(sum.is_zero())
}

/// `(Σ_{k=0}^n C(n,k)(-1)^k/(n+k+1), 1/((2n+1) C(2n,n)), equal)`.
pub fn binomial_sum_identity(n: u64) -> (Rational, Rational, bool) {
    let big = |v: u64| BigInt::from(v);
    let mut lhs = Rational::zero();
    for k in 0..=n {
        let c = Rational::from_integer(num_integer::binomial(big(n), big(k)));
        let term = c / Rational::from_integer(big(n + k + 1));
        if k % 2 == 0 {
            lhs += term;
        } else {
            lhs -= term;
        }
    }
    let rhs = Rational::one() / Rational::from_integer(big(2 * n + 1) * num_integer::binomial(big(2 * n), big(n)));
    let eq = lhs == rhs;
    (lhs, rhs, eq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat, rat_int};

    fn spec() -> VarSpec {
        VarSpec::with_params(&["r"])
    }

    fn op(s: &str) -> RecOperator {
        RecOperator::parse(s, &spec()).unwrap()
    }

    fn x(s: &str) -> ExactNumber {
        s.parse().unwrap()
    }

    fn ratio(s: &str) -> HyperSeqRatio {
        HyperSeqRatio::parse(s, &spec()).unwrap()
    }

    #[test]
    fn fibonacci() {
        let t = unroll(&op("N^2 - N - 1"), &[x("1"), x("1")], 1, 6).unwrap();
        let v: Vec<String> = t.values.iter().map(ToString::to_string).collect();
        assert_eq!(v, ["1", "1", "2", "3", "5", "8"]);
        assert!(t.satisfies_recurrence().unwrap());
    }

    #[test]
    fn factorials() {
        let t = unroll(&op("N - (n + 1)"), &[x("1")], 0, 6).unwrap();
        let v: Vec<String> = t.values.iter().map(ToString::to_string).collect();
        assert_eq!(v, ["1", "1", "2", "6", "24", "120"]);
    }

    #[test]
    fn e_family_terms() {
        let l = op("N^2 + 2*(2*n + 3)*(n + 2)*N - (n + 1)*(n + 2)");
        let t = unroll(&l, &[x("-1 + 3*inv_e"), x("14 - 38*inv_e")], 1, 4).unwrap();
        assert_eq!(t.get(3), Some(&x("-426 + 1158*inv_e")));
        assert_eq!(t.get(4), Some(&x("24024 - 65304*inv_e")));
        assert!(t.satisfies_recurrence().unwrap());
        let ints = unroll_integers(&l, &[int(-1), int(14)], 1, 4).unwrap();
        assert_eq!(ints, vec![int(-1), int(14), int(-426), int(24024)]);
    }

    #[test]
    fn errors() {
        assert!(matches!(unroll(&op("n*N - 1"), &[x("1")], 0, 3), Err(RecurrenceError::SingularLeadingCoefficient(0))));
        assert!(matches!(unroll(&op("N^2 - 1"), &[x("1")], 0, 3), Err(RecurrenceError::InitialCount { .. })));
        assert!(matches!(
            unroll(&op("N^2 - N - 1"), &[x("inv_e"), x("pi")], 0, 3),
            Err(RecurrenceError::MixedConstantTags(..))
        ));
        assert!(matches!(
            unroll(&op("N - r"), &[x("1")], 0, 3),
            Err(RecurrenceError::Operator(AzError::UnspecializedParameters(_)))
        ));
        assert!(matches!(unroll_integers(&op("2*N - 1"), &[int(1)], 0, 3), Err(RecurrenceError::NonIntegralStep(1))));
    }

    #[test]
    fn json_round_trip() {
        let l = op("N^2 + 2*(2*n + 3)*(n + 2)*N - (n + 1)*(n + 2)");
        let t = unroll(&l, &[x("-1 + 3*inv_e"), x("14 - 38*inv_e")], 1, 5).unwrap();
        let j = t.to_json();
        assert_eq!(j["values"][2]["constTag"], "inv_e");
        assert_eq!(j["values"][2]["rational"], "-426");
        assert_eq!(SequenceTable::from_json(&j, &spec()).unwrap(), t);
    }

    #[test]
    fn closed_forms() {
        assert!(check_solution(&op("(2*n + 2)*N - (2*n + 1)"), &ratio("(2*n + 1)/(2*(n + 1))")).unwrap());
        assert!(check_solution(&op("(n + 1) - (n + r + 1)*N"), &ratio("(n + 1)/(n + r + 1)")).unwrap());
        assert!(!check_solution(&op("N - (n + 1)"), &ratio("n + 2")).unwrap());
        assert!(check_solution(&op("N^2 - (n+2)*(n+1)"), &ratio("n + 1")).unwrap());
    }

    #[test]
    fn binomial_identity() {
        assert_eq!(binomial_sum_identity(0), (rat_int(1), rat_int(1), true));
        assert_eq!(binomial_sum_identity(1), (rat(1, 6), rat(1, 6), true));
        assert_eq!(binomial_sum_identity(2), (rat(1, 30), rat(1, 30), true));
    }
}
