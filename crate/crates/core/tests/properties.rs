use azd::arith::{gcd, Monomial, MultiPoly, RatFunc, Rational, Vars};
use azd::az::{az_derive, RecOperator, SearchConfig};
use azd::expr::{parse_polynomial, parse_ratfunc, HyperTerm, VarSpec};
use azd::recurrence::{unroll, ConstTag, ExactNumber, SequenceTable};
use num_bigint::BigInt;
use proptest::prelude::*;

fn vars() -> Vars {
    Vars::new(["n", "r", "x"])
}

fn poly() -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((-6i64..=6, 0u32..=2, 0u32..=1, 0u32..=3), 0..5).prop_map(|terms| {
        MultiPoly::from_terms(
            &vars(),
            terms.into_iter().map(|(c, a, b, e)| (Monomial(vec![a, b, e]), Rational::from_integer(c.into()))),
        )
    })
}

fn nonzero_poly() -> impl Strategy<Value = MultiPoly> {
    poly().prop_filter("nonzero", |p| !p.is_zero())
}

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..=50, 1i64..=12).prop_map(|(a, b)| Rational::new(a.into(), b.into()))
}

fn exact_number() -> impl Strategy<Value = ExactNumber> {
    (rational(), rational(), prop::sample::select(vec![ConstTag::None, ConstTag::InvE, ConstTag::Pi]))
        .prop_map(|(r, c, t)| ExactNumber::new(r, c, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn product_rule(p in poly(), q in poly()) {
        let lhs = (&p * &q).derivative(2);
        let rhs = &(&p.derivative(2) * &q) + &(&p * &q.derivative(2));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gcd_divides_and_keeps_common_factor(p in nonzero_poly(), q in nonzero_poly(), s in nonzero_poly()) {
        let ps = &p * &s;
        let qs = &q * &s;
        let g = gcd(&ps, &qs).unwrap();
        prop_assert!(ps.exact_div(&g).is_some());
        prop_assert!(qs.exact_div(&g).is_some());
        prop_assert!(g.exact_div(&s).is_some());
    }

    #[test]
    fn shifts_invert(p in nonzero_poly(), q in nonzero_poly(), k in -4i64..=4) {
        let f = RatFunc::normalize(p.clone(), q).unwrap();
        prop_assert_eq!(f.shift_index(0, k).shift_index(0, -k), f);
        let k = Rational::from_integer(k.into());
        prop_assert_eq!(p.shift(0, &k).shift(0, &-k.clone()), p);
    }

    #[test]
    fn ratfunc_is_canonical(p in nonzero_poly(), q in nonzero_poly(), s in nonzero_poly()) {
        let f = RatFunc::normalize(p.clone(), q.clone()).unwrap();
        let g = RatFunc::normalize(&p * &s, &q * &s).unwrap();
        prop_assert_eq!(&f, &g);
        prop_assert_eq!(parse_ratfunc(&f.to_string(), &vars()).unwrap(), f);
    }

    #[test]
    fn polynomial_text_round_trips(p in poly()) {
        prop_assert_eq!(parse_polynomial(&p.to_string(), &vars()).unwrap(), p);
    }

    #[test]
    fn exact_number_text_round_trips(v in exact_number()) {
        prop_assert_eq!(v.to_string().parse::<ExactNumber>().unwrap(), v);
    }

    #[test]
    fn sequence_table_json_round_trips(a in exact_number(), b in rational(), start in 0i64..4) {
        let spec = VarSpec::default();
        let op = RecOperator::parse("N^2 + 2*(2*n + 3)*(n + 2)*N - (n + 1)*(n + 2)", &spec).unwrap();
        let b = ExactNumber::new(b, Rational::from_integer(BigInt::from(0)), ConstTag::None);
        let table = unroll(&op, &[a, b], start, 8).unwrap();
        prop_assert!(table.satisfies_recurrence().unwrap());
        prop_assert_eq!(SequenceTable::from_json(&table.to_json(), &spec).unwrap(), table);
    }
}

#[test]
fn derivation_is_deterministic() {
    let spec = VarSpec::default();
    let h = HyperTerm::parse("(x*(1-x))^n*exp(-x)", &spec).unwrap();
    let a = az_derive(&h, &SearchConfig::default()).unwrap();
    let b = az_derive(&h, &SearchConfig::default()).unwrap();
    assert_eq!(a.operator.to_string(), b.operator.to_string());
    assert_eq!(a.certificate.to_string(), b.certificate.to_string());
}
