//! Multivariate polynomial gcd over Q.
//!
//! Recursive content/primitive-part reduction: pick a variable shared by
//! both inputs, split off the contents (gcds of the coefficients, computed
//! recursively), and run a subresultant PRS on the primitive parts viewed as
//! univariate polynomials over Q[other variables].

use num_traits::Signed;

use super::{rational_gcd, ArithError, MultiPoly};

/// Greatest common divisor, normalized as `content · primitive` where the
/// content is the rational gcd of the inputs' coefficients and the primitive
/// part has coprime integer coefficients and positive leading coefficient.
///
/// `gcd(p, 0)` is the normalized `p`.
pub fn gcd(p: &MultiPoly, q: &MultiPoly) -> Result<MultiPoly, ArithError> {
    if p.is_zero() && q.is_zero() {
        return Err(ArithError::BothZero);
    }
    let content = rational_gcd(&p.content(), &q.content()).abs();
    let g = if p.is_zero() {
        q.clone()
    } else if q.is_zero() {
        p.clone()
    } else {
        gcd_up_to_unit(p, q)
    };
    let (_, prim) = g.integer_normalize();
    Ok(prim.scale(&content))
}

/// Least common multiple with positive leading coefficient.
pub fn lcm(p: &MultiPoly, q: &MultiPoly) -> Result<MultiPoly, ArithError> {
    if p.is_zero() || q.is_zero() {
        return Err(ArithError::BothZero);
    }
    let g = gcd_up_to_unit(p, q);
    let l = &p.exact_div(&g).expect("gcd divides") * q;
    if l.leading_coefficient().is_negative() {
        Ok(-l)
    } else {
        Ok(l)
    }
}

/// gcd determined up to a nonzero rational factor; both inputs nonzero.
pub(crate) fn gcd_up_to_unit(p: &MultiPoly, q: &MultiPoly) -> MultiPoly {
    let one = MultiPoly::one(p.vars());
    if p.is_constant() || q.is_constant() {
        return one;
    }
    let (_, p) = p.integer_normalize();
    let (_, q) = q.integer_normalize();
    if p == q {
        return p;
    }
    let used_q = q.used_vars();
    let v = match p.used_vars().into_iter().find(|i| used_q.contains(i)) {
        Some(v) => v,
        // no shared variable: only constants divide both
        None => return one,
    };
    let cp = content_in(&p, v);
    let cq = content_in(&q, v);
    let (_, pp) = p.exact_div(&cp).expect("content divides").integer_normalize();
    let (_, qq) = q.exact_div(&cq).expect("content divides").integer_normalize();
    let gc = gcd_up_to_unit(&cp, &cq);
    let gp = subresultant(&pp, &qq, v);
    let gp = if gp.uses_var(v) {
        let c = content_in(&gp, v);
        gp.exact_div(&c).expect("content divides")
    } else {
        one
    };
    (&gc * &gp).integer_normalize().1
}

/// gcd of the coefficients of `p` viewed as a polynomial in variable `v`.
fn content_in(p: &MultiPoly, v: usize) -> MultiPoly {
    let mut coeffs = p.coeffs_in(v).into_iter().filter(|c| !c.is_zero());
    let mut g = coeffs.next().expect("nonzero polynomial");
    for c in coeffs {
        if g.is_constant() {
            break;
        }
        g = gcd_up_to_unit(&g, &c);
    }
    if g.is_constant() {
        MultiPoly::one(p.vars())
    } else {
        g
    }
}

type UPoly = Vec<MultiPoly>;

fn trim(a: &mut UPoly) {
    while a.last().is_some_and(MultiPoly::is_zero) {
        a.pop();
    }
}

fn deg(a: &UPoly) -> usize {
    a.len() - 1
}

fn prem(a: &UPoly, b: &UPoly) -> UPoly {
    let db = deg(b);
    let lb = b[db].clone();
    let mut r = a.clone();
    let mut e = deg(a) as i64 - db as i64 + 1;
    while !r.is_empty() && deg(&r) >= db {
        let dr = deg(&r);
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c = &*c * &lb;
        }
        for (i, bc) in b.iter().enumerate() {
            let t = &lr * bc;
            r[i + dr - db] = &r[i + dr - db] - &t;
        }
        trim(&mut r);
        e -= 1;
    }
    if e > 0 {
        let f = lb.pow(e as u32);
        for c in r.iter_mut() {
            *c = &*c * &f;
        }
    }
    r
}

fn subresultant(p: &MultiPoly, q: &MultiPoly, v: usize) -> MultiPoly {
    let vars = p.vars().clone();
    let mut a: UPoly = p.coeffs_in(v);
    let mut b: UPoly = q.coeffs_in(v);
    if deg(&a) < deg(&b) {
        std::mem::swap(&mut a, &mut b);
    }
    let mut g = MultiPoly::one(&vars);
    let mut h = MultiPoly::one(&vars);
    loop {
        let delta = (deg(&a) - deg(&b)) as u32;
        let r = prem(&a, &b);
        if r.is_empty() {
            return MultiPoly::from_coeffs_in(&vars, v, &b);
        }
        if deg(&r) == 0 {
            return MultiPoly::one(&vars);
        }
        let divisor = &g * &h.pow(delta);
        a = b;
        b = r.iter().map(|c| c.exact_div(&divisor).expect("subresultant division is exact")).collect();
        g = a[deg(&a)].clone();
        h = if delta == 0 {
            h
        } else {
            g.pow(delta).exact_div(&h.pow(delta - 1)).expect("subresultant h update is exact")
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat_int, Vars};

    fn parse(v: &Vars, s: &str) -> MultiPoly {
        crate::expr::parse_polynomial(s, v).unwrap()
    }

    #[test]
    fn spec_examples() {
        let v = Vars::new(["x"]);
        assert_eq!(gcd(&parse(&v, "x^2 - 1"), &parse(&v, "x^2 - 2*x + 1")).unwrap(), parse(&v, "x - 1"));
        assert_eq!(gcd(&parse(&v, "6"), &parse(&v, "4")).unwrap(), MultiPoly::constant(&v, rat_int(2)));
        assert_eq!(gcd(&parse(&v, "x*(1-x)"), &parse(&v, "1-2*x")).unwrap(), MultiPoly::one(&v));
    }

    #[test]
    fn zero_cases() {
        let v = Vars::new(["x"]);
        let z = MultiPoly::zero(&v);
        assert_eq!(gcd(&z, &z), Err(ArithError::BothZero));
        assert_eq!(gcd(&parse(&v, "2 - 2*x"), &z).unwrap(), parse(&v, "2*x - 2"));
    }

    #[test]
    fn multivariate() {
        let v = Vars::new(["n", "r", "x"]);
        let a = parse(&v, "(n + r + 1)*(x^2 + n*x + 1)*(x - r)");
        let b = parse(&v, "(n + r + 1)*(x - r)^2*(n - 3)");
        assert_eq!(gcd(&a, &b).unwrap(), parse(&v, "(n + r + 1)*(r - x)"));
        let c = parse(&v, "(2*n + 3)*x");
        let d = parse(&v, "(4*n + 6)*x^2 + (2*n+3)");
        assert_eq!(gcd(&c, &d).unwrap(), parse(&v, "2*n + 3"));
    }

    #[test]
    fn lcm_basic() {
        let v = Vars::new(["x"]);
        assert_eq!(lcm(&parse(&v, "x^2 - 1"), &parse(&v, "1 - x")).unwrap(), parse(&v, "x^2 - 1"));
    }
}
