use super::Certificate;
use crate::arith::{rational_to_f64, RatFunc};
use crate::expr::{HyperTerm, ParamValues};
use crate::quadrature::Interval;

#[derive(Clone, Debug, PartialEq)]
pub struct EndpointConfig {
    /// Approach offsets are `10^-k` (finite ends) or `10^k` (infinite ends)
    /// for `k = 1..=steps`.
    pub steps: u32,
    pub tol: f64,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        EndpointConfig { steps: 12, tol: 1e-8 }
    }
}

/// Behavior of `R·F` approaching one end of the interval at one `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct EndpointReport {
    /// `"-inf"`, `"inf"` or the rational endpoint.
    pub endpoint: String,
    pub n: i64,
    pub samples: Vec<(f64, f64)>,
    /// Value at the closest sample point.
    pub limit: f64,
    pub vanishes: bool,
    /// Evaluation failure on the approach path, if any.
    pub error: Option<String>,
}

fn eval_rf(r: &RatFunc, h: &HyperTerm, n: i64, x: f64, params: &ParamValues) -> Result<f64, String> {
    let spec = h.spec();
    let mut point = vec![n as f64];
    for name in spec.params() {
        point.push(params.get(name).map_or(0.0, rational_to_f64));
    }
    point.push(x);
    let den = r.denom().eval_f64(&point);
    if den == 0.0 {
        return Err(format!("certificate has a pole at x = {x}"));
    }
    Ok(r.numer().eval_f64(&point) / den)
}

/// Sample `R·F` along a geometric approach to each endpoint.
pub fn endpoint_report(
    h: &HyperTerm,
    cert: &Certificate,
    interval: &Interval,
    ns: &[i64],
    params: &ParamValues,
    config: &EndpointConfig,
) -> Vec<EndpointReport> {
    let ends = interval.endpoints();
    let mut out = Vec::new();
    for (side, end) in ends.iter().enumerate() {
        let toward = if side == 0 { 1.0 } else { -1.0 };
        let label = match end {
            Some(a) => a.to_string(),
            None if side == 0 => "-inf".to_string(),
            None => "inf".to_string(),
        };
        for &n in ns {
            let mut samples = Vec::new();
            let mut error = None;
            for k in 1..=config.steps {
                let x = match end {
                    Some(a) => rational_to_f64(a) + toward * 10f64.powi(-(k as i32)),
                    None => -toward * 10f64.powi(k as i32),
                };
                let value = h.evaluate_numeric(n, x, params).map_err(|e| e.to_string()).and_then(|f| {
                    if f == 0.0 {
                        Ok(0.0)
                    } else {
                        eval_rf(cert.as_ratfunc(), h, n, x, params).map(|r| r * f)
                    }
                });
                match value {
                    Ok(v) => samples.push((x, v)),
                    Err(e) => {
                        error = Some(e);
                        break;
                    }
                }
            }
            let limit = samples.last().map_or(f64::NAN, |s| s.1);
            let tail: Vec<f64> = samples.iter().rev().take(3).map(|s| s.1.abs()).collect();
            let settled = tail.windows(2).all(|w| w[0] <= w[1]);
            let vanishes = error.is_none() && limit.abs() <= config.tol && settled;
            out.push(EndpointReport { endpoint: label.clone(), n, samples, limit, vanishes, error });
        }
    }
    out
}
