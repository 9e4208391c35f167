use thiserror::Error;

use super::{HyperTerm, ParamValues};
use crate::arith::{rational_to_f64, MultiPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("pole at x = {0}")]
    Pole(String),
    #[error("negative base `{base}` with non-integer exponent {exponent}")]
    NegativeBase { base: String, exponent: String },
    #[error("no value given for parameter `{0}`")]
    MissingParameter(String),
    #[error("index n = {0} is negative")]
    NegativeIndex(i64),
}

/// Running product kept as sign and logarithm of the magnitude.
struct LogProduct {
    sign: f64,
    log: f64,
    zero: bool,
    pole: bool,
}

impl LogProduct {
    /// Multiply by `v^e`.
    fn push(&mut self, v: f64, e: f64, integral: bool) -> Result<(), ()> {
        if e == 0.0 {
            return Ok(());
        }
        if v == 0.0 {
            if e > 0.0 {
                self.zero = true;
            } else {
                self.pole = true;
            }
            return Ok(());
        }
        if v < 0.0 {
            if !integral {
                return Err(());
            }
            if (e.abs() % 2.0) == 1.0 {
                self.sign = -self.sign;
            }
        }
        self.log += e * v.abs().ln();
        Ok(())
    }
}

fn eval_poly(p: &MultiPoly, point: &[f64]) -> f64 {
    p.eval_f64(point)
}

impl HyperTerm {
    fn uses_var(&self, i: usize) -> bool {
        self.prefactor().uses_var(i)
            || self.exp_arg().uses_var(i)
            || self.factors().iter().any(|f| f.base.uses_var(i) || f.exponent.offset.uses_var(i))
    }

    /// Numerical value of `F_n(x)` in double precision. Bases are combined in
    /// log space so large exponents neither overflow nor underflow early.
    pub fn evaluate_numeric(&self, n: i64, x: f64, params: &ParamValues) -> Result<f64, EvalError> {
        if n < 0 {
            return Err(EvalError::NegativeIndex(n));
        }
        let spec = self.spec();
        let mut point = Vec::with_capacity(spec.vars().len());
        point.push(n as f64);
        for (name, i) in spec.params().iter().zip(spec.param_indices()) {
            match params.get(name) {
                Some(v) => point.push(rational_to_f64(v)),
                None if self.uses_var(i) => return Err(EvalError::MissingParameter(name.clone())),
                None => point.push(0.0),
            }
        }
        point.push(x);

        let mut acc = LogProduct { sign: 1.0, log: 0.0, zero: false, pole: false };
        let pole = || EvalError::Pole(x.to_string());

        let pden = eval_poly(self.prefactor().denom(), &point);
        if pden == 0.0 {
            return Err(pole());
        }
        let pnum = eval_poly(self.prefactor().numer(), &point);
        acc.push(pnum, 1.0, true).ok();
        acc.push(pden, -1.0, true).ok();

        for f in self.factors() {
            let e = f.exponent.offset.eval_f64(&point) + f.exponent.slope as f64 * n as f64;
            let integral = e.fract() == 0.0;
            let num = eval_poly(f.base.numer(), &point);
            let den = eval_poly(f.base.denom(), &point);
            let neg = || EvalError::NegativeBase { base: f.base.to_string(), exponent: e.to_string() };
            acc.push(num, e, integral).map_err(|_| neg())?;
            acc.push(den, -e, integral).map_err(|_| neg())?;
        }

        if !self.exp_arg().is_zero() {
            let uden = eval_poly(self.exp_arg().denom(), &point);
            if uden == 0.0 {
                return Err(pole());
            }
            acc.log += eval_poly(self.exp_arg().numer(), &point) / uden;
        }

        if acc.pole {
            return Err(pole());
        }
        if acc.zero {
            return Ok(0.0);
        }
        Ok(acc.sign * acc.log.exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::expr::VarSpec;

    fn h(s: &str) -> HyperTerm {
        HyperTerm::parse(s, &VarSpec::with_params(&["r"])).unwrap()
    }

    fn r32() -> ParamValues {
        ParamValues::new().with("r", rat(3, 2))
    }

    #[test]
    fn basic_values() {
        let p = r32();
        assert!((h("(x*(1-x))^n").evaluate_numeric(1, 0.5, &p).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(h("x^n*exp(-x)").evaluate_numeric(0, 0.0, &p).unwrap(), 1.0);
        assert!((h("x^(2*n)/(x^2+1)^(n+1)").evaluate_numeric(1, 1.0, &p).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn zero_and_poles() {
        let p = r32();
        assert_eq!(h("x^n*exp(-x)").evaluate_numeric(3, 0.0, &p).unwrap(), 0.0);
        assert!(matches!(h("1/x").evaluate_numeric(0, 0.0, &p), Err(EvalError::Pole(_))));
        assert!(matches!(h("x^n/(x+1)^(n+r+1)").evaluate_numeric(1, -2.0, &p), Err(EvalError::NegativeBase { .. })));
        assert!((h("x^n").evaluate_numeric(3, -2.0, &p).unwrap() + 8.0).abs() < 1e-12);
        assert!(matches!(
            h("x^n/(x+1)^(n+r+1)").evaluate_numeric(1, 1.0, &ParamValues::new()),
            Err(EvalError::MissingParameter(_))
        ));
        assert!(matches!(h("x^n").evaluate_numeric(-1, 1.0, &p), Err(EvalError::NegativeIndex(-1))));
    }

    #[test]
    fn parameter_exponent() {
        let v = h("x^n/(x+1)^(n+r+1)").evaluate_numeric(2, 3.0, &r32()).unwrap();
        assert!((v - 9.0 / 4f64.powf(4.5)).abs() < 1e-14);
    }

    #[test]
    fn large_exponent_no_overflow() {
        let v = h("(x*(1-x))^n*exp(-x)").evaluate_numeric(400, 0.5, &ParamValues::new()).unwrap();
        let expect = (400.0 * 0.25f64.ln() - 0.5).exp();
        assert!(((v - expect) / expect).abs() < 1e-12);
    }
}
