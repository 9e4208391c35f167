//! The eleven acceptance criteria, each reported on its own line.

mod common;

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use azd::arith::{int, rat, rational_to_f64, RatFunc, Rational, Vars};
use azd::az::{az_derive, verify_certificate, RecOperator, SearchConfig};
use azd::expr::{HyperTerm, ParamValues, VarSpec};
use azd::irrationality::{
    approximation_report, constant_inv_e, constant_pi, poincare_leading, E_A_INITIALS, E_B_INITIALS, E_OPERATOR,
};
use azd::quadrature::{integrate, QuadConfig};
use azd::recurrence::{binomial_sum_identity, check_solution, unroll, ExactNumber, HyperSeqRatio};
use common::{identity_discrepancy, random_hyperterm, random_poly, FAMILIES};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::SeedableRng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e_initials(v: [i64; 2]) -> Vec<BigInt> {
    v.map(BigInt::from).to_vec()
}

fn exact(s: &str) -> ExactNumber {
    s.parse().unwrap()
}

fn c1_operator_reproduction() -> Outcome {
    let mut worst = 0.0f64;
    for fam in &FAMILIES {
        let h = fam.term();
        let t = Instant::now();
        let res = az_derive(&h, &SearchConfig::default()).map_err(|e| format!("{}: {e}", fam.name))?;
        let secs = t.elapsed().as_secs_f64();
        worst = worst.max(secs);
        ensure(res.operator.equivalent(&fam.operator()), || {
            format!("{}: got {} expected {}", fam.name, res.operator, fam.operator)
        })?;
        let v = verify_certificate(&h, &res.operator, &res.certificate).map_err(|e| e.to_string())?;
        ensure(v.verified, || format!("{}: certificate {} fails", fam.name, res.certificate))?;
        ensure(secs < 1.0, || format!("{}: took {secs:.3} s", fam.name))?;
    }
    Ok(format!("5/5 operators equivalent, certificates verified, slowest {worst:.3} s"))
}

fn c2_certificate_ground_truth() -> Outcome {
    let mut last = String::new();
    for fam in &FAMILIES {
        let v = verify_certificate(&fam.term(), &fam.operator(), &fam.certificate()).map_err(|e| e.to_string())?;
        if fam.name == "e approximants" {
            last = match (&v.verified, &v.factor) {
                (true, _) => "quartic certificate exact".into(),
                (false, Some(f)) => format!("quartic certificate off by factor {f}"),
                (false, None) => return Err(format!("quartic certificate fails: residual {}", v.residual)),
            };
            ensure(v.verified, || last.clone())?;
        } else {
            ensure(v.verified, || format!("{}: printed pair fails", fam.name))?;
        }
    }
    Ok(format!("4 printed pairs verified; {last}"))
}

fn c3_term_tables() -> Outcome {
    let spec = VarSpec::default();
    let op = RecOperator::parse("n + 1 + (-4*n - 6)*N", &spec).unwrap();
    let t = unroll(&op, &[exact("1/6")], 1, 7).map_err(|e| e.to_string())?;
    let expected = ["1/6", "1/30", "1/140", "1/630", "1/2772", "1/12012", "1/51480"];
    let got: Vec<String> = t.values.iter().map(ToString::to_string).collect();
    ensure(got == expected, || format!("central binomial terms {got:?}"))?;
    let op = RecOperator::parse("N - n - 1", &spec).unwrap();
    let t = unroll(&op, &[exact("1")], 0, 21).map_err(|e| e.to_string())?;
    let mut f = BigInt::one();
    for (n, v) in t.values.iter().enumerate() {
        if n > 0 {
            f *= n;
        }
        ensure(v == &ExactNumber::rational(Rational::from_integer(f.clone())), || format!("{n}! gave {v}"))?;
    }
    Ok("1/6 .. 1/51480 and n! for n <= 20 reproduced exactly".into())
}

fn c4_e_bit_exactness() -> Outcome {
    let op = RecOperator::parse(E_OPERATOR, &VarSpec::default()).unwrap();
    let t = unroll(&op, &[exact("-1 + 3*inv_e"), exact("14 - 38*inv_e")], 1, 20).map_err(|e| e.to_string())?;
    ensure(t.get(3) == Some(&exact("-426 + 1158*inv_e")), || format!("I(3) = {:?}", t.get(3)))?;
    ensure(t.get(4) == Some(&exact("24024 - 65304*inv_e")), || format!("I(4) = {:?}", t.get(4)))?;
    let i20 = t.get(20).unwrap();
    let a = i20.rational_part().to_integer();
    let b = i20.const_coeff().to_integer();
    // -a/b written with a positive denominator
    let (num, den) = if b < BigInt::zero() { (a, -b) } else { (-a, b) };
    let shown = format!("{num}/{den}");
    ensure(
        shown == "493294164866383351699429534601141833239920640000/1340912564441170249019237618446466016434749440000",
        || format!("n = 20 gives {shown}"),
    )?;
    Ok("I(3), I(4) exact; -a_20/b_20 matches the 48/49-digit display".into())
}

fn e_records(n_max: i64, digits: u32) -> Result<Vec<azd::irrationality::ApproxRecord>, String> {
    let op = RecOperator::parse(E_OPERATOR, &VarSpec::default()).unwrap();
    approximation_report(&op, &e_initials(E_A_INITIALS), &e_initials(E_B_INITIALS), 1, n_max, digits)
        .map_err(|e| e.to_string())
}

fn c5_approximation_accuracy() -> Outcome {
    let r = e_records(20, 80)?;
    let r20 = &r[19];
    let bound = Rational::new(BigInt::one(), BigInt::from(10).pow(37));
    ensure(r20.error_upper < bound, || format!("certified error {}", r20.error_upper))?;
    Ok(format!("|-a_20/b_20 - 1/e| <= {} < 1e-37 (certified)", azd::irrationality::rational_sci(&r20.error_upper)))
}

fn c6_decay_bound() -> Outcome {
    let r = e_records(40, 200)?;
    let bad: Vec<i64> = r.iter().filter(|x| !x.decay_holds).map(|x| x.n).collect();
    ensure(bad.is_empty(), || format!("decay bound violated at {bad:?}"))?;
    Ok("|a_n + b_n/e| <= (1 - 1/e)/4^n certified for 1 <= n <= 40".into())
}

fn c7_closed_forms() -> Outcome {
    let spec = VarSpec::with_params(&["r"]);
    let op = |s: &str| RecOperator::parse(s, &spec).unwrap();
    let ratio = |s: &str| HyperSeqRatio::parse(s, &spec).unwrap();
    let cases = [
        ("-2*n - 1 + (2*n + 2)*N", "(2*n + 1)/(2*(n + 1))", true),
        ("N - n - 1", "n + 1", true),
        ("(n + 1) + (-n - r - 1)*N", "(n + 1)/(n + r + 1)", true),
        ("n + 1 + (-4*n - 6)*N", "(n + 1)/(2*(2*n + 3))", true),
        ("n + 1 + (-4*n - 6)*N", "(n + 2)/(2*(2*n + 3))", false),
    ];
    for (o, r, want) in cases {
        let got = check_solution(&op(o), &ratio(r)).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("{o} with ratio {r}: {got}"))?;
    }
    Ok("4 closed forms accepted, perturbed ratio rejected".into())
}

fn c8_corollary_identity() -> Outcome {
    for n in 0..=50 {
        let (l, r, eq) = binomial_sum_identity(n);
        ensure(eq && l == r, || format!("n = {n}: {l} vs {r}"))?;
    }
    Ok("identity exact for 0 <= n <= 50".into())
}

fn c9_quadrature_agreement() -> Outcome {
    let inv_e = constant_inv_e(30).value;
    let pi = constant_pi(30).value;
    let r_value = rat(3, 2);
    let cfg = QuadConfig { tol: 1e-12, ..QuadConfig::default() };
    let initials: [(i64, Vec<&str>); 5] = [
        (0, vec!["pi"]),
        (0, vec!["1"]),
        (0, vec!["2/3"]),
        (1, vec!["1/6"]),
        (1, vec!["-1 + 3*inv_e", "14 - 38*inv_e"]),
    ];
    let mut worst = 0.0f64;
    let mut checked = 0;
    for (fam, (start, init)) in FAMILIES.iter().zip(initials) {
        let values = ParamValues::new().with("r", r_value.clone());
        let op = fam.operator().specialize(&values).map_err(|e| e.to_string())?;
        let init: Vec<ExactNumber> = init.iter().map(|s| exact(s)).collect();
        let table = unroll(&op, &init, start, (9 - start) as usize).map_err(|e| e.to_string())?;
        let h = fam.term();
        for (i, v) in table.values.iter().enumerate() {
            let n = start + i as i64;
            let expected = rational_to_f64(&v.evaluate(&inv_e, &pi));
            let q = integrate(&h, n, &fam.interval.parse().unwrap(), &values, &cfg)
                .map_err(|e| format!("{} n={n}: {e}", fam.name))?;
            let diff = (q.value - expected).abs();
            worst = worst.max(diff);
            checked += 1;
            ensure(diff <= 1e-10, || format!("{} n={n}: quadrature {} vs {expected}", fam.name, q.value))?;
        }
    }
    Ok(format!("{checked} values agree, max deviation {worst:.2e}"))
}

fn c10_poincare() -> Outcome {
    let spec = VarSpec::default();
    let rep = |s: &str| poincare_leading(&RecOperator::parse(s, &spec).unwrap());
    let e = rep(E_OPERATOR);
    ensure(e.top.to_string() == "-1 + 4*N" && e.roots == vec![rat(1, 4)], || {
        format!("e operator: top {} roots {:?}", e.top, e.roots)
    })?;
    ensure(e.reconstruct() == e.operator, || "e operator reconstruction".into())?;
    let c = rep("n + 1 + (-4*n - 6)*N");
    ensure(c.roots == vec![rat(1, 4)], || format!("central binomial roots {:?}", c.roots))?;
    let f = rep("N - n - 1");
    ensure(f.degenerate && f.roots.is_empty(), || "factorial operator not degenerate".into())?;
    Ok("4N - 1 with root 1/4; central binomial root 1/4; factorial degenerate".into())
}

fn soundness_fuzz(cases: usize) -> Result<(usize, usize), String> {
    let mut rng = StdRng::seed_from_u64(0x05ee_da2d);
    let spec = VarSpec::default();
    let config = SearchConfig { max_order: 2, ..SearchConfig::default() };
    let mut found = 0;
    for _ in 0..cases {
        let text = random_hyperterm(&mut rng);
        let h = HyperTerm::parse(&text, &spec).map_err(|e| format!("{text}: {e}"))?;
        let Ok(res) = az_derive(&h, &config) else {
            continue;
        };
        found += 1;
        let v = verify_certificate(&h, &res.operator, &res.certificate).map_err(|e| e.to_string())?;
        ensure(v.verified, || format!("{text}: returned pair fails verification"))?;
        for (n, x) in [(2, 0.37), (3, 0.61)] {
            if let Some(d) = identity_discrepancy(&h, &res.operator, &res.certificate, n, x) {
                ensure(d < 1e-5, || format!("{text}: numeric identity off by {d:e} at n={n}, x={x}"))?;
            }
        }
    }
    Ok((cases, found))
}

fn algebraic_properties(cases: usize) -> Result<(), String> {
    let mut rng = StdRng::seed_from_u64(7);
    let vars = Vars::new(["n", "r", "x"]);
    for _ in 0..cases {
        let p = random_poly(&mut rng, &vars, 3);
        let q = random_poly(&mut rng, &vars, 3);
        let s = random_poly(&mut rng, &vars, 2);
        let dp = &(&p * &q).derivative(2);
        ensure(dp == &(&(&p.derivative(2) * &q) + &(&p * &q.derivative(2))), || format!("product rule for {p}, {q}"))?;
        if !p.is_zero() && !q.is_zero() {
            if !s.is_zero() {
                let ps = &p * &s;
                let qs = &q * &s;
                let g = azd::arith::gcd(&ps, &qs).map_err(|e| e.to_string())?;
                ensure(ps.exact_div(&g).is_some() && qs.exact_div(&g).is_some(), || format!("gcd of {ps}, {qs}"))?;
                ensure(g.exact_div(&s).is_some(), || format!("common factor {s} missing from {g}"))?;
            }
            let f = RatFunc::normalize(p.clone(), q.clone()).map_err(|e| e.to_string())?;
            ensure(f.shift_index(0, 3).shift_index(0, -3) == f, || format!("shift inverse for {f}"))?;
        }
        let k = Rational::from_integer(int(2));
        ensure(p.shift(0, &k).shift(0, &-k.clone()) == p, || format!("polynomial shift inverse for {p}"))?;
    }
    Ok(())
}

fn c11_property_suites() -> Outcome {
    let (cases, found) = soundness_fuzz(200)?;
    algebraic_properties(200)?;
    let r = e_records(40, 200)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for rec in r.iter().filter(|x| x.n >= 20) {
        let e = rec.exponent.ok_or("missing exponent")?;
        lo = lo.min(e);
        hi = hi.max(e);
    }
    ensure((1.9..=2.1).contains(&lo) && (1.9..=2.1).contains(&hi), || format!("exponents span [{lo}, {hi}]"))?;
    Ok(format!(
        "{found}/{cases} random terms derived and all verified; 200 algebraic cases; exponents in [{lo:.4}, {hi:.4}]"
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("1 operator reproduction", c1_operator_reproduction),
        ("2 certificate ground truth", c2_certificate_ground_truth),
        ("3 term tables", c3_term_tables),
        ("4 e-pipeline bit-exactness", c4_e_bit_exactness),
        ("5 approximation accuracy", c5_approximation_accuracy),
        ("6 decay bound", c6_decay_bound),
        ("7 closed-form checks", c7_closed_forms),
        ("8 corollary identity", c8_corollary_identity),
        ("9 quadrature agreement", c9_quadrature_agreement),
        ("10 Poincare analysis", c10_poincare),
        ("11 property suites", c11_property_suites),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout();
    for (name, f) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let line = match &outcome {
            Ok(detail) => format!("[PASS] criterion {name}: {detail}\n"),
            Err(detail) => {
                failed.push(name);
                format!("[FAIL] criterion {name}: {detail}\n")
            }
        };
        out.write_all(line.as_bytes()).unwrap();
    }
    out.flush().unwrap();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
