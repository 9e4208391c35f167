#![allow(dead_code)]

use azd::arith::{rational_to_f64, MultiPoly, Rational, Vars};
use azd::az::{Certificate, RecOperator};
use azd::expr::{parse_polynomial, HyperTerm, ParamValues, VarSpec};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

/// One integrand family with its known recurrence data.
pub struct Family {
    pub name: &'static str,
    pub integrand: &'static str,
    pub params: &'static [&'static str],
    pub operator: &'static str,
    pub certificate: &'static str,
    pub interval: &'static str,
}

pub const FAMILIES: [Family; 5] = [
    Family {
        name: "rational full line",
        integrand: "x^(2*n)/(x^2+1)^(n+1)",
        params: &[],
        operator: "-2*n - 1 + (2*n + 2)*N",
        certificate: "-x",
        interval: "-inf,inf",
    },
    Family {
        name: "factorial",
        integrand: "exp(-x)*x^n",
        params: &[],
        operator: "N - n - 1",
        certificate: "-x",
        interval: "0,inf",
    },
    Family {
        name: "beta with parameter",
        integrand: "x^n/(x+1)^(n+r+1)",
        params: &["r"],
        operator: "(n + 1) + (-n - r - 1)*N",
        certificate: "x",
        interval: "0,inf",
    },
    Family {
        name: "central binomial",
        integrand: "(x*(1-x))^n",
        params: &[],
        operator: "n + 1 + (-4*n - 6)*N",
        certificate: "(-1 + 2*x)*(-1 + x)*x",
        interval: "0,1",
    },
    Family {
        name: "e approximants",
        integrand: "(x*(1-x))^n*exp(-x)",
        params: &[],
        operator: "N^2 + 2*(2*n + 3)*(n + 2)*N - (n + 1)*(n + 2)",
        certificate: "-2*n*x^3 - x^4 + 3*n*x^2 - 2*x^3 - n*x + 5*x^2 - 2*x",
        interval: "0,1",
    },
];

impl Family {
    pub fn spec(&self) -> VarSpec {
        VarSpec::with_params(self.params)
    }

    pub fn term(&self) -> HyperTerm {
        HyperTerm::parse(self.integrand, &self.spec()).unwrap()
    }

    pub fn operator(&self) -> RecOperator {
        RecOperator::parse(self.operator, &self.spec()).unwrap()
    }

    pub fn certificate(&self) -> Certificate {
        Certificate::parse(self.certificate, &self.spec()).unwrap()
    }
}

fn pick<'a, T>(rng: &mut StdRng, xs: &'a [T]) -> &'a T {
    xs.choose(rng).expect("nonempty")
}

/// A small random hyperexponential term in `x` and `n`, as text.
pub fn random_hyperterm(rng: &mut StdRng) -> String {
    let mut parts = Vec::new();
    let pref = *pick(rng, &["1", "x", "(n + 1)", "(2*x + 1)", "(x^2 + 3)"]);
    parts.push(pref.to_string());
    let bases = ["x", "(x + 1)", "(x + 2)", "(1 - x)", "(x^2 + 1)", "(2*x + 3)"];
    let nfactors = rng.gen_range(1..=2);
    let mut used = Vec::new();
    for _ in 0..nfactors {
        let b = *pick(rng, &bases);
        if used.contains(&b) {
            continue;
        }
        used.push(b);
        let low = if used.len() == 1 { 1 } else { 0 };
        let slope = rng.gen_range(low..=2);
        let offset: i64 = rng.gen_range(-1..=1);
        parts.push(format!("{b}^({slope}*n{offset:+})"));
    }
    if rng.gen_bool(0.4) {
        let k = *pick(rng, &["-x", "x", "2*x", "-x/2"]);
        parts.push(format!("exp({k})"));
    }
    parts.join("*")
}

/// Polynomial with small random integer coefficients in `vars`, total degree
/// at most `deg`.
pub fn random_poly(rng: &mut StdRng, vars: &Vars, deg: u32) -> MultiPoly {
    let names = vars.names();
    let mut terms = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let c: i64 = rng.gen_range(-5..=5);
        let mut t = c.to_string();
        let mut left = rng.gen_range(0..=deg);
        for name in names {
            if left == 0 {
                break;
            }
            let e = rng.gen_range(0..=left);
            left -= e;
            if e > 0 {
                t.push_str(&format!("*{name}^{e}"));
            }
        }
        terms.push(t);
    }
    parse_polynomial(&terms.join(" + "), vars).unwrap()
}

/// Numeric spot check of `L F = d/dx (R F)` at `(n, x)` using a central
/// difference; returns the relative discrepancy.
pub fn identity_discrepancy(h: &HyperTerm, op: &RecOperator, cert: &Certificate, n: i64, x: f64) -> Option<f64> {
    let params = ParamValues::new();
    let spec = h.spec();
    let coeffs = op.eval_coefficients(&Rational::from_integer(n.into())).ok()?;
    let mut lhs = 0.0;
    for (k, c) in coeffs.iter().enumerate() {
        lhs += rational_to_f64(c) * h.evaluate_numeric(n + k as i64, x, &params).ok()?;
    }
    let rf = cert.as_ratfunc();
    let g = |t: f64| -> Option<f64> {
        let mut point = vec![n as f64];
        point.extend(spec.params().iter().map(|_| 0.0));
        point.push(t);
        let den = rf.denom().eval_f64(&point);
        if den == 0.0 {
            return None;
        }
        Some(rf.numer().eval_f64(&point) / den * h.evaluate_numeric(n, t, &params).ok()?)
    };
    let step = 1e-5;
    let rhs = (8.0 * (g(x + step)? - g(x - step)?) - (g(x + 2.0 * step)? - g(x - 2.0 * step)?)) / (12.0 * step);
    let scale = lhs.abs().max(rhs.abs()).max(1e-12);
    Some((lhs - rhs).abs() / scale)
}
