use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::atom::{Atom, Var};
use crate::error::SymError;
use crate::monomial::Monomial;
use crate::poly::{Poly, Q};
use crate::ratfunc::RatFunc;
use crate::scalar::Scalar;
use crate::upoly::UPoly;
use crate::Result;

fn not_integrable(v: Var, reason: impl Into<String>) -> SymError {
    SymError::NotIntegrable {
        var: v.label().to_string(),
        reason: reason.into(),
    }
}

/// `E` with `∂E/∂v = e`, integration constant zero.
///
/// Handles rational functions of `v` whose denominator splits into linear
/// factors over the coefficient field after square-free decomposition (a
/// square-free factor of higher degree is split only when its coefficients
/// are rational numbers and its roots rational),
/// first-order-or-higher derivative atoms `f⁽ᵏ⁾(v)`, and radicals free of
/// `v`.
pub fn antiderivative(e: &Scalar, v: Var) -> Result<Scalar> {
    let e = e.clone().check()?;
    if let Some((a, b, s)) = e.surd_parts() {
        if s.depends_on(v) {
            return Err(not_integrable(v, "radicand depends on the variable"));
        }
        let ia = integrate_rat(a, v)?;
        let ib = integrate_rat(b, v)?;
        let root = Scalar::rat(RatFunc::from_poly(s.clone())).sqrt();
        return Ok(&ia + &(&ib * &root));
    }
    integrate_rat(e.as_rat().unwrap(), v)
}

fn integrate_rat(r: &RatFunc, v: Var) -> Result<Scalar> {
    if !r.depends_on(v) {
        return Ok(Scalar::rat(r * &RatFunc::var(v)));
    }
    let opaque: Vec<Var> = r
        .vars()
        .into_iter()
        .filter(|&w| w != v && w.depends_on(v))
        .collect();
    if opaque.is_empty() {
        return integrate_rational(r, v);
    }
    if opaque.iter().any(|&w| r.den().depends_on(w)) {
        return Err(not_integrable(v, format!("denominator involves {}", opaque[0])));
    }
    // split the numerator by its power product in the opaque atoms
    let mut groups: Vec<(Monomial, Vec<(Monomial, Q)>)> = Vec::new();
    for (m, c) in r.num().terms() {
        let mut key = Monomial::one();
        let mut rest = m.clone();
        for &w in &opaque {
            let (e, r2) = rest.split_off(w);
            rest = r2;
            key = key.mul(&Monomial::var(w, e));
        }
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, ts)) => ts.push((rest, c.clone())),
            None => groups.push((key, vec![(rest, c.clone())])),
        }
    }
    let mut acc = Scalar::zero();
    for (key, terms) in groups {
        let coeff = RatFunc::new(Poly::from_terms(terms), r.den().clone());
        if key.is_one() {
            acc = &acc + &integrate_rational(&coeff, v)?;
            continue;
        }
        let [(w, 1)] = key.pairs() else {
            return Err(not_integrable(v, format!("product of {key:?}")));
        };
        let lowered = match w.atom() {
            Atom::Func { name, order, arg } if order >= 1 && arg == RatFunc::var(v) => {
                Var::func(&name, order - 1, arg)
            }
            _ => return Err(not_integrable(v, format!("{w} has no elementary antiderivative here"))),
        };
        if coeff.depends_on(v) {
            return Err(not_integrable(v, format!("{w} times a function of {v}")));
        }
        acc = &acc + &Scalar::rat(&coeff * &RatFunc::var(lowered));
    }
    Ok(acc)
}

/// Rational function in `v` with coefficients free of `v`.
fn integrate_rational(r: &RatFunc, v: Var) -> Result<Scalar> {
    let n = UPoly::from_poly(r.num(), v);
    let d = UPoly::from_poly(r.den(), v);
    let (q, rem) = n.divrem(&d);
    let mut out = RatFunc::zero();
    let x = RatFunc::var(v);
    let mut xp = x.clone();
    for (i, c) in q.0.iter().enumerate() {
        if !c.is_zero() {
            let k = Q::from_integer((i as i64 + 1).into());
            out = &out + &(&c.scale(&k.recip()) * &xp);
        }
        xp = &xp * &x;
    }
    let mut acc = Scalar::rat(out);
    if rem.is_zero() {
        return Ok(acc);
    }
    let lc_inv = d.lc().recip().unwrap();
    let dm = d.scale(&lc_inv);
    let rem = rem.scale(&lc_inv);

    let m0 = dm.0.iter().take_while(|c| c.is_zero()).count();
    let d1 = UPoly::new(dm.0[m0..].to_vec());
    let mut roots: Vec<(RatFunc, usize)> = Vec::new();
    if m0 > 0 {
        roots.push((RatFunc::zero(), m0));
    }
    for (p, mult) in d1.squarefree() {
        if p.degree() == Some(1) {
            roots.push((-&p.coeff(0), mult));
            continue;
        }
        let Some(rs) = rational_roots(&p) else {
            return Err(not_integrable(
                v,
                format!("denominator factor {} of degree > 1", p.to_ratfunc(v)),
            ));
        };
        roots.extend(rs.into_iter().map(|r| (RatFunc::constant(r), mult)));
    }
    for (root, m) in roots {
        let lin = UPoly::linear(-&root);
        let mut pw = UPoly::one();
        for _ in 0..m {
            pw = pw.mul(&lin);
        }
        let e = dm.div_exact(&pw);
        let series = rem.shift(&root).series_div(&e.shift(&root), m);
        let base = &x - &root;
        for k in 1..=m {
            let c = &series[m - k];
            if c.is_zero() {
                continue;
            }
            let term = if k == 1 {
                &Scalar::rat(c.clone()) * &Scalar::rat(base.clone()).ln()
            } else {
                let f = Q::from_integer((1 - k as i64).into());
                let den = base.pow(k as i64 - 1).unwrap().scale(&f);
                Scalar::rat(c / &den)
            };
            acc = &acc + &term;
        }
    }
    Ok(acc)
}

/// All roots of a square-free polynomial with rational coefficients, when
/// they are all rational.
fn rational_roots(p: &UPoly) -> Option<Vec<Q>> {
    let coeffs: Vec<Q> = p.0.iter().map(RatFunc::as_constant).collect::<Option<_>>()?;
    let lcm = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * Q::from_integer(lcm.clone())).to_integer()).collect();
    let a0 = ints[0].abs().to_u64()?;
    let an = ints.last()?.abs().to_u64()?;
    if a0 == 0 || a0 > 1_000_000 || an > 1_000_000 {
        return None;
    }
    let divisors = |n: u64| (1..=n).filter(move |d| n.is_multiple_of(*d));
    let mut roots = Vec::new();
    for num in divisors(a0) {
        for den in divisors(an) {
            for sign in [1i64, -1] {
                let r = Q::new(BigInt::from(num) * sign, BigInt::from(den));
                if roots.contains(&r) {
                    continue;
                }
                let value = coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * &r + c);
                if value.is_zero() {
                    roots.push(r);
                }
            }
        }
    }
    (roots.len() == p.degree()?).then_some(roots)
}

/// Potential `h` of a closed one-form: `∂h/∂vars[j] = components[j]`.
///
/// Integrates coordinate by coordinate with zero integration constants.
pub fn potential(components: &[Scalar], vars: &[Var]) -> Result<Scalar> {
    assert_eq!(components.len(), vars.len());
    for j in 0..vars.len() {
        for k in j + 1..vars.len() {
            let d = &components[j].diff(vars[k]) - &components[k].diff(vars[j]);
            if !d.is_zero()? {
                return Err(SymError::NotClosed {
                    a: vars[j].label().to_string(),
                    b: vars[k].label().to_string(),
                });
            }
        }
    }
    let mut h = Scalar::zero();
    for (j, &x) in vars.iter().enumerate() {
        let rest = &components[j] - &h.diff(x);
        if rest.is_zero()? {
            continue;
        }
        h = &h + &antiderivative(&rest, x)?;
    }
    h.check()
}
