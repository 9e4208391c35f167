//! The `azd` command line.
//!
//! Exit codes: 0 on success, 1 when the mathematics says no (no telescoper
//! found, a pair or ratio that fails its check, a boundary term that does not
//! vanish, a failed integration), 2 on usage errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::arith::{parse_rational, Rational};
use crate::az::{
    az_derive, endpoint_report, verify_certificate, AzError, Certificate, EndpointConfig, RecOperator, SearchConfig,
};
use crate::expr::{ExprError, HyperTerm, ParamValues, VarSpec};
use crate::irrationality::{
    analyze_e, decimal_string, irrationality_criterion_check, rational_sci, IrrationalityError,
};
use crate::quadrature::{integrate, Interval, QuadConfig, QuadError};
use crate::recurrence::{check_solution, unroll, ExactNumber, HyperSeqRatio, RecurrenceError};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "azd", version, about = "Creative telescoping for hyperexponential integrands")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Continuous variable.
    #[arg(long, global = true, default_value = "x")]
    pub var: String,
    /// Discrete variable.
    #[arg(long, global = true, default_value = "n")]
    pub disc: String,
    /// Symbolic parameters, optionally with values: `r` or `r=3/2,s`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub params: Vec<String>,
    /// Highest recurrence order searched.
    #[arg(long, global = true)]
    pub max_order: Option<usize>,
    /// `a,b`, `a,inf` or `-inf,inf`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub interval: Option<String>,
    /// Absolute tolerance for numerical integration.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Decimal digits for certified constants.
    #[arg(long, global = true, env = "AZD_PRECISION")]
    pub precision: Option<u32>,
    /// Emit a JSON document instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive a recurrence operator and certificate for an integrand.
    Az {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        /// Indices at which boundary terms are sampled when an interval is given.
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3", allow_hyphen_values = true)]
        endpoint_n: Vec<i64>,
    },
    /// Check an operator and certificate against an integrand.
    Verify {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(allow_hyphen_values = true)]
        operator: String,
        #[arg(allow_hyphen_values = true)]
        certificate: String,
    },
    /// Unroll a recurrence from initial values.
    Terms {
        #[arg(allow_hyphen_values = true)]
        operator: String,
        /// Initial values, e.g. `-1 + 3*inv_e,14 - 38*inv_e`.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        initials: Vec<String>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        start: i64,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Check that a hypergeometric ratio solves a recurrence.
    Checksol {
        #[arg(allow_hyphen_values = true)]
        operator: String,
        #[arg(allow_hyphen_values = true)]
        ratio: String,
    },
    /// Integrate an integrand numerically at one index.
    Quad {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
    /// Integer approximants to 1/e from (x(1-x))^n e^-x on [0, 1].
    AnalyzeE {
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Az { .. } => "az",
            Command::Verify { .. } => "verify",
            Command::Terms { .. } => "terms",
            Command::Checksol { .. } => "checksol",
            Command::Quad { .. } => "quad",
            Command::AnalyzeE { .. } => "analyze-e",
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Math(String),
}

impl From<ExprError> for Failure {
    fn from(e: ExprError) -> Failure {
        Failure::Usage(e.to_string())
    }
}

impl From<AzError> for Failure {
    fn from(e: AzError) -> Failure {
        match e {
            AzError::NotFound { .. } | AzError::Arith(_) => Failure::Math(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<RecurrenceError> for Failure {
    fn from(e: RecurrenceError) -> Failure {
        match e {
            RecurrenceError::Parse(_) | RecurrenceError::InitialCount { .. } => Failure::Usage(e.to_string()),
            RecurrenceError::Operator(a) => a.into(),
            _ => Failure::Math(e.to_string()),
        }
    }
}

impl From<QuadError> for Failure {
    fn from(e: QuadError) -> Failure {
        match e {
            QuadError::InvalidInterval(_) | QuadError::InvalidTolerance => Failure::Usage(e.to_string()),
            _ => Failure::Math(e.to_string()),
        }
    }
}

impl From<IrrationalityError> for Failure {
    fn from(e: IrrationalityError) -> Failure {
        match e {
            IrrationalityError::InvalidArgument(_) => Failure::Usage(e.to_string()),
            IrrationalityError::Recurrence(r) => r.into(),
            IrrationalityError::Az(a) => a.into(),
            _ => Failure::Math(e.to_string()),
        }
    }
}

/// A finished report: text, JSON body and whether the answer was positive.
struct Report {
    text: String,
    json: Map<String, Value>,
    ok: bool,
}

fn json_map(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("reports are JSON objects"),
    }
}

struct Context {
    spec: VarSpec,
    values: ParamValues,
}

fn context(common: &Common) -> Result<Context, Failure> {
    let mut names = Vec::new();
    let mut values = ParamValues::new();
    for item in common.params.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        match item.split_once('=') {
            Some((name, value)) => {
                let v =
                    parse_rational(value).ok_or_else(|| Failure::Usage(format!("bad parameter value `{value}`")))?;
                names.push(name.trim().to_string());
                values.insert(name.trim(), v);
            }
            None => names.push(item.to_string()),
        }
    }
    let spec = VarSpec::new(&common.var, &common.disc, &names)?;
    Ok(Context { spec, values })
}

fn interval(common: &Common) -> Result<Option<Interval>, Failure> {
    common.interval.as_deref().map(str::parse).transpose().map_err(|e: QuadError| Failure::Usage(e.to_string()))
}

fn search_config(common: &Common) -> SearchConfig {
    let mut c = SearchConfig::default();
    if let Some(m) = common.max_order {
        c.max_order = m;
    }
    c
}

fn cmd_az(common: &Common, expr: &str, ns: &[i64]) -> Result<Report, Failure> {
    let cx = context(common)?;
    let h = HyperTerm::parse(expr, &cx.spec)?;
    let iv = interval(common)?;
    let res = az_derive(&h, &search_config(common))?;
    let mut text =
        format!("operator: {}\ncertificate: {}\norder: {}\n", res.operator, res.certificate, res.operator.order());
    for g in &res.genericity {
        text.push_str(&format!("assumes nonzero: {g}\n"));
    }
    let mut ok = true;
    let mut endpoints = Vec::new();
    if let Some(iv) = &iv {
        let missing: Vec<&String> = cx.spec.params().iter().filter(|p| cx.values.get(p).is_none()).collect();
        if missing.is_empty() {
            let reps = endpoint_report(&h, &res.certificate, iv, ns, &cx.values, &EndpointConfig::default());
            for r in &reps {
                let verdict = match (&r.error, r.vanishes) {
                    (Some(e), _) => format!("fails ({e})"),
                    (None, true) => "vanishes".to_string(),
                    (None, false) => format!("does not vanish (last value {:e})", r.limit),
                };
                text.push_str(&format!("boundary {} at {}={}: {verdict}\n", r.endpoint, cx.spec.n(), r.n));
                ok &= r.vanishes;
                endpoints.push(json!({
                    "endpoint": r.endpoint,
                    "n": r.n,
                    "limit": r.limit,
                    "vanishes": r.vanishes,
                    "error": r.error,
                }));
            }
        } else {
            text.push_str("boundary check skipped: give parameter values with --params name=value\n");
        }
    }
    Ok(Report {
        text,
        json: json_map(json!({
            "input": expr,
            "interval": iv.map(|i| i.to_string()),
            "operator": res.operator.to_string(),
            "certificate": res.certificate.to_string(),
            "order": res.operator.order(),
            "verified": true,
            "attempts": res.stats.attempts.iter().map(|a| json!({
                "order": a.order,
                "numeratorDegrees": a.numerator_degrees,
                "denominatorPower": a.denominator_power,
            })).collect::<Vec<_>>(),
            "genericity": res.genericity.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "endpoints": endpoints,
        })),
        ok,
    })
}

fn cmd_verify(common: &Common, expr: &str, op: &str, cert: &str) -> Result<Report, Failure> {
    let cx = context(common)?;
    let h = HyperTerm::parse(expr, &cx.spec)?;
    let op = RecOperator::parse(op, &cx.spec)?;
    let cert = Certificate::parse(cert, &cx.spec)?;
    let v = verify_certificate(&h, &op, &cert)?;
    let mut text = format!("verified: {}\n", v.verified);
    if !v.verified {
        text.push_str(&format!("residual: {}\n", v.residual));
        if let Some(f) = &v.factor {
            text.push_str(&format!("certificate times {f} verifies\n"));
        }
    }
    Ok(Report {
        text,
        json: json_map(json!({
            "input": expr,
            "operator": op.to_string(),
            "certificate": cert.to_string(),
            "verified": v.verified,
            "residual": v.residual.to_string(),
            "factor": v.factor.map(|f| f.to_string()),
        })),
        ok: v.verified,
    })
}

fn cmd_terms(common: &Common, op: &str, initials: &[String], start: i64, count: usize) -> Result<Report, Failure> {
    let cx = context(common)?;
    let op = RecOperator::parse(op, &cx.spec)?.specialize(&cx.values)?;
    let init = initials.iter().map(|s| s.parse::<ExactNumber>()).collect::<Result<Vec<_>, _>>()?;
    let table = unroll(&op, &init, start, count)?;
    let mut text = String::new();
    for (i, v) in table.values.iter().enumerate() {
        text.push_str(&format!("{}: {v}\n", start + i as i64));
    }
    Ok(Report { text, json: json_map(table.to_json()), ok: true })
}

fn cmd_checksol(common: &Common, op: &str, ratio: &str) -> Result<Report, Failure> {
    let cx = context(common)?;
    let op = RecOperator::parse(op, &cx.spec)?;
    let ratio = HyperSeqRatio::parse(ratio, &cx.spec)?;
    let ok = check_solution(&op, &ratio)?;
    Ok(Report {
        text: format!("solution: {ok}\n"),
        json: json_map(json!({
            "operator": op.to_string(),
            "ratio": ratio.as_ratfunc().to_string(),
            "solution": ok,
        })),
        ok,
    })
}

fn cmd_quad(common: &Common, expr: &str, n: i64) -> Result<Report, Failure> {
    let cx = context(common)?;
    let h = HyperTerm::parse(expr, &cx.spec)?;
    let iv = interval(common)?.ok_or_else(|| Failure::Usage("quad needs --interval".into()))?;
    let mut config = QuadConfig::default();
    if let Some(t) = common.tol {
        config.tol = t;
    }
    let r = integrate(&h, n, &iv, &cx.values, &config)?;
    Ok(Report {
        text: format!("value: {}\nerror estimate: {:e}\npanels: {}\n", r.value, r.error_estimate, r.panels),
        json: json_map(json!({
            "input": expr,
            "n": n,
            "interval": iv.to_string(),
            "tol": config.tol,
            "value": r.value,
            "errorEstimate": r.error_estimate,
            "panels": r.panels,
        })),
        ok: true,
    })
}

/// Default digits for `analyze-e`: comfortably above `4·count`.
pub fn default_precision(count: usize) -> u32 {
    (4 * count + 40) as u32
}

fn cmd_analyze_e(common: &Common, count: usize) -> Result<Report, Failure> {
    let digits = common.precision.unwrap_or_else(|| default_precision(count));
    if digits == 0 {
        return Err(Failure::Usage("--precision must be positive".into()));
    }
    let an = analyze_e(count, digits)?;
    let one = Rational::from_integer(1.into());
    let criterion = irrationality_criterion_check(&an.records, &one, &one)?;
    let shown = digits.min(60);
    let mut text = format!(
        "operator: {}\ncertificate: {}\nmatches known operator: {}\nleading component: {} (rational roots: {})\nprecision: {digits} digits\n",
        an.derivation.operator,
        an.derivation.certificate,
        an.matches_known_operator,
        an.poincare.top,
        if an.poincare.roots.is_empty() {
            "none".to_string()
        } else {
            an.poincare.roots.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
        },
    );
    for (r, (_, crit)) in an.records.iter().zip(&criterion) {
        let raw = Rational::new(-r.a.clone(), r.b.clone());
        let raw_text =
            if r.b < 0.into() { format!("{}/{}", r.a, -r.b.clone()) } else { format!("{}/{}", -r.a.clone(), r.b) };
        text.push_str(&format!(
            "n={}: a={} b={} gcd={} -a/b={} p/q={} ~ {} |1/e - p/q|<={} exponent={} raw exponent={} decay={} criterion(C=1,delta=1)={}\n",
            r.n,
            r.a,
            r.b,
            r.g,
            raw_text,
            r.fraction(),
            decimal_string(&raw, shown),
            rational_sci(&r.error_upper),
            r.exponent.map_or("-".into(), |e| format!("{e:.6}")),
            r.raw_exponent.map_or("-".into(), |e| format!("{e:.6}")),
            if r.decay_holds { "ok" } else { "violated" },
            crit,
        ));
    }
    let ok = an.matches_known_operator && an.records.iter().all(|r| r.decay_holds);
    let mut json = json_map(an.to_json());
    json.insert(
        "criterion".into(),
        json!({ "C": "1", "delta": "1", "holds": criterion.iter().map(|&(n, b)| json!({"n": n, "holds": b})).collect::<Vec<_>>() }),
    );
    Ok(Report { text, json, ok })
}

fn dispatch(cli: &Cli) -> Result<Report, Failure> {
    let c = &cli.common;
    match &cli.command {
        Command::Az { expr, endpoint_n } => cmd_az(c, expr, endpoint_n),
        Command::Verify { expr, operator, certificate } => cmd_verify(c, expr, operator, certificate),
        Command::Terms { operator, initials, start, count } => cmd_terms(c, operator, initials, *start, *count),
        Command::Checksol { operator, ratio } => cmd_checksol(c, operator, ratio),
        Command::Quad { expr, n } => cmd_quad(c, expr, *n),
        Command::AnalyzeE { count } => cmd_analyze_e(c, *count),
    }
}

fn emit(cli: &Cli, body: &str, out: &mut dyn Write, err: &mut dyn Write) -> Option<i32> {
    match &cli.common.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, body) {
                let _ = writeln!(err, "azd: cannot write {}: {e}", path.display());
                return Some(2);
            }
        }
        None => {
            let _ = out.write_all(body.as_bytes());
        }
    }
    None
}

/// Run the command line with `args` (program name first) and return the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let command = cli.command.name();
    let result = dispatch(&cli);
    let (body, code) = match result {
        Ok(rep) => {
            let code = if rep.ok { 0 } else { 1 };
            if cli.common.json {
                let mut doc = Map::new();
                doc.insert("schemaVersion".into(), json!(SCHEMA_VERSION));
                doc.insert("command".into(), json!(command));
                doc.insert("status".into(), json!(if rep.ok { "success" } else { "failure" }));
                doc.extend(rep.json);
                (format!("{}\n", serde_json::to_string_pretty(&Value::Object(doc)).expect("serializable")), code)
            } else {
                (rep.text, code)
            }
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "azd {command}: {msg}");
            return 2;
        }
        Err(Failure::Math(msg)) => {
            if cli.common.json {
                let doc = json!({
                    "schemaVersion": SCHEMA_VERSION,
                    "command": command,
                    "status": "failure",
                    "reason": msg,
                });
                (format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializable")), 1)
            } else {
                let _ = writeln!(err, "azd {command}: {msg}");
                return 1;
            }
        }
    };
    emit(&cli, &body, out, err).unwrap_or(code)
}
