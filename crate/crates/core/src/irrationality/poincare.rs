use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{Integer, MultiPoly, RatFunc, Rational, Vars};
use crate::az::{RecOperator, SHIFT};

/// The operator regrouped as `Σ_j n^j q_j(N)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoincareReport {
    /// The analyzed operator; equal to the input when its coefficients are
    /// polynomials, otherwise its denominator-free normal form.
    pub operator: RecOperator,
    /// `q_j` for `j = 0..=deg_n`, over `[N, params..]`.
    pub components: Vec<MultiPoly>,
    /// `q_top`, the component of highest `n`-degree.
    pub top: MultiPoly,
    /// Distinct rational roots of `q_top` in increasing order.
    pub roots: Vec<Rational>,
    /// `deg_N q_top` minus the number of rational roots with multiplicity.
    pub unsolved_degree: usize,
    pub degenerate: bool,
}

impl PoincareReport {
    /// Re-expand `Σ_j n^j q_j(N)` into an operator.
    pub fn reconstruct(&self) -> RecOperator {
        let vars = self.operator.vars();
        let order = self.operator.order();
        let n = MultiPoly::var_index(vars, 0);
        let mut coeffs = vec![MultiPoly::zero(vars); order + 1];
        for (j, q) in self.components.iter().enumerate() {
            let nj = n.pow(j as u32);
            for (k, c) in q.coeffs_in(0).into_iter().enumerate() {
                let c = c.with_vars(vars).expect("subset of operator variables");
                coeffs[k] = &coeffs[k] + &(&nj * &c);
            }
        }
        RecOperator::from_polys(coeffs).expect("nonzero operator")
    }
}

fn component_vars(op: &RecOperator) -> Vars {
    let mut names = vec![SHIFT.to_string()];
    names.extend(op.vars().names()[1..].iter().cloned());
    Vars::new(names)
}

/// Regroup `L` by powers of the index and locate the rational roots of the
/// top component.
pub fn poincare_leading(op: &RecOperator) -> PoincareReport {
    let operator = if op.is_polynomial() { op.clone() } else { op.normalized().0 };
    let polys = operator.polynomial_coefficients().expect("polynomial coefficients");
    let qvars = component_vars(&operator);
    let deg = polys.iter().filter_map(|p| p.degree_in(0)).max().unwrap_or(0) as usize;
    let shift = MultiPoly::var_index(&qvars, 0);
    let mut components = vec![MultiPoly::zero(&qvars); deg + 1];
    for (k, p) in polys.iter().enumerate() {
        let nk = shift.pow(k as u32);
        for (j, c) in p.coeffs_in(0).into_iter().enumerate() {
            // c is free of n; move it into the component variables by name.
            let c =
                RatFunc::from_poly(c).with_vars(&qvars).expect("index-free coefficient").to_poly().expect("polynomial");
            components[j] = &components[j] + &(&nk * &c);
        }
    }
    let top = components[deg].clone();
    let top_degree = top.degree_in(0).unwrap_or(0) as usize;
    let degenerate = top_degree == 0;
    let (roots, found) = if degenerate {
        (Vec::new(), 0)
    } else {
        univariate_coefficients(&top).map_or((Vec::new(), 0), |c| rational_roots(&c))
    };
    PoincareReport { operator, components, top, roots, unsolved_degree: top_degree - found, degenerate }
}

/// Coefficients in `N` when the polynomial involves nothing else.
fn univariate_coefficients(p: &MultiPoly) -> Option<Vec<Rational>> {
    p.coeffs_in(0).iter().map(MultiPoly::constant_value).collect()
}

fn eval_int(coeffs: &[Integer], x: &Rational) -> Rational {
    coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + Rational::from_integer(c.clone()))
}

/// Divide by `(q·N − p)` given an exact root `p/q`.
fn deflate(coeffs: &[Integer], root: &Rational) -> Vec<Integer> {
    let mut out = vec![Rational::zero(); coeffs.len() - 1];
    let mut carry = Rational::zero();
    for i in (1..coeffs.len()).rev() {
        carry = Rational::from_integer(coeffs[i].clone()) + carry * root;
        out[i - 1] = carry.clone();
    }
    let lcm = out.iter().fold(Integer::one(), |l, c| l.lcm(c.denom()));
    out.into_iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect()
}

const TRIAL_LIMIT: u64 = 1_000_000;

/// Positive divisors, or `None` when `v` has a prime factor beyond the trial
/// division range.
fn divisors(v: &Integer) -> Option<Vec<Integer>> {
    let mut rest = v.abs();
    let mut primes: Vec<(Integer, u32)> = Vec::new();
    let mut p: u64 = 2;
    while !rest.is_one() {
        let pb = BigInt::from(p);
        if &pb * &pb > rest {
            primes.push((rest.clone(), 1));
            break;
        }
        if p > TRIAL_LIMIT {
            return None;
        }
        let mut e = 0;
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            e += 1;
        }
        if e > 0 {
            primes.push((pb, e));
        }
        p += 1;
    }
    let mut divs = vec![Integer::one()];
    for (p, e) in primes {
        let mut next = Vec::new();
        for d in &divs {
            let mut pk = Integer::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    Some(divs)
}

/// Distinct rational roots and the count with multiplicity.
fn rational_roots(coeffs: &[Rational]) -> (Vec<Rational>, usize) {
    let lcm = coeffs.iter().fold(Integer::one(), |l, c| l.lcm(c.denom()));
    let mut ints: Vec<Integer> =
        coeffs.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let mut roots = Vec::new();
    let mut count = 0;
    while ints.len() > 1 && ints[0].is_zero() {
        ints.remove(0);
        count += 1;
    }
    if count > 0 {
        roots.push(Rational::zero());
    }
    let mut candidates = Vec::new();
    if ints.len() > 1 {
        let (Some(ps), Some(qs)) = (divisors(&ints[0]), divisors(ints.last().expect("nonempty"))) else {
            return (roots, count);
        };
        for p in &ps {
            for q in &qs {
                let r = Rational::new(p.clone(), q.clone());
                candidates.push(r.clone());
                candidates.push(-r);
            }
        }
        candidates.sort();
        candidates.dedup();
    }
    for r in candidates {
        let mut hit = false;
        while ints.len() > 1 && eval_int(&ints, &r).is_zero() {
            ints = deflate(&ints, &r);
            count += 1;
            hit = true;
        }
        if hit {
            roots.push(r);
        }
    }
    roots.sort();
    (roots, count)
}

/// Root count helper for callers that only need the number of solutions.
pub fn root_count(report: &PoincareReport) -> usize {
    report.top.degree_in(0).and_then(|d| d.to_usize()).unwrap_or(0) - report.unsolved_degree
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::expr::VarSpec;

    fn report(s: &str, params: &[&str]) -> PoincareReport {
        poincare_leading(&RecOperator::parse(s, &VarSpec::with_params(params)).unwrap())
    }

    #[test]
    fn e_operator() {
        let r = report("N^2 + 2*(2*n + 3)*(n + 2)*N - (n + 1)*(n + 2)", &[]);
        assert_eq!(r.top.to_string(), "-1 + 4*N");
        assert_eq!(r.roots, vec![rat(1, 4)]);
        assert!(!r.degenerate);
        assert_eq!(r.unsolved_degree, 0);
        assert_eq!(r.reconstruct(), r.operator);
    }

    #[test]
    fn central_binomial_operator() {
        let r = report("n + 1 + (-4*n - 6)*N", &[]);
        assert_eq!(r.top.to_string(), "1 - 4*N");
        assert_eq!(r.roots, vec![rat(1, 4)]);
        assert_eq!(r.reconstruct(), r.operator);
    }

    #[test]
    fn factorial_operator_is_degenerate() {
        let r = report("N - n - 1", &[]);
        assert_eq!(r.top.to_string(), "-1");
        assert!(r.degenerate);
        assert!(r.roots.is_empty());
        assert_eq!(r.reconstruct(), r.operator);
    }

    #[test]
    fn parameters_and_irrational_roots() {
        let r = report("(n + 1) + (-n - r - 1)*N", &["r"]);
        assert_eq!(r.top.to_string(), "1 - N");
        assert_eq!(r.roots, vec![rat(1, 1)]);
        assert_eq!(r.reconstruct(), r.operator);
        let r = report("n*N^2 - 2*n", &[]);
        assert!(r.roots.is_empty());
        assert_eq!(r.unsolved_degree, 2);
        let r = report("n*(N - 1)^2*(2*N + 3)", &[]);
        assert_eq!(r.roots, vec![rat(-3, 2), rat(1, 1)]);
        assert_eq!(r.unsolved_degree, 0);
        assert_eq!(root_count(&r), 3);
    }

    #[test]
    fn rational_coefficients_are_cleared() {
        let r = report("N - (n + 1)/(2*(2*n + 3))", &[]);
        assert!(r.operator.is_polynomial());
        assert!(r.operator.equivalent(&RecOperator::parse("N - (n + 1)/(2*(2*n + 3))", &VarSpec::default()).unwrap()));
        assert_eq!(r.roots, vec![rat(1, 4)]);
    }

    #[test]
    fn divisor_enumeration() {
        assert_eq!(divisors(&BigInt::from(12)).unwrap().len(), 6);
        assert_eq!(divisors(&BigInt::from(-7)).unwrap(), vec![BigInt::from(1), BigInt::from(7)]);
        assert_eq!(divisors(&BigInt::from(1)).unwrap(), vec![BigInt::from(1)]);
    }
}
