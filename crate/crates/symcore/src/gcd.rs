//! Multivariate polynomial GCD over `Q`.
//!
//! Recursive primitive PRS, with cheaper routes tried first. Modular images
//! bound the degree of the gcd in each variable: all bounds zero proves
//! coprimality (the common case for the denominators produced by tensor
//! calculus), and a single zero bound removes that variable. Trial exact
//! division catches the case where one argument divides the other.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::atom::Var;
use crate::monomial::Monomial;
use crate::poly::{Poly, Q};

const P: u64 = (1 << 61) - 1;

/// Monic greatest common divisor. `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mg = ma.gcd(&mb);
    let a1 = a.div_monomial(&ma);
    let b1 = b.div_monomial(&mb);
    let g = gcd_reduced(&a1, &b1);
    g.mul_term(&mg, &Q::one()).monic()
}

/// Neither argument has monomial content.
fn gcd_reduced(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() || a.len() == 1 || b.len() == 1 {
        return Poly::one();
    }
    if a == b {
        return a.monic();
    }
    let va = a.vars();
    let vb = b.vars();
    let only_a: Vec<Var> = va.difference(&vb).copied().collect();
    let only_b: Vec<Var> = vb.difference(&va).copied().collect();
    if va.is_disjoint(&vb) {
        return Poly::one();
    }
    // a variable present on one side only cannot occur in the gcd, which
    // therefore divides every coefficient with respect to it
    if let Some(&x) = only_a.first() {
        return gcd_with_coeffs(b, a, x);
    }
    if let Some(&x) = only_b.first() {
        return gcd_with_coeffs(a, b, x);
    }
    let common: BTreeSet<Var> = va;
    let bounds = degree_bounds(a, b, &common);
    if let Some(bounds) = &bounds {
        if bounds.values().all(|&d| d == 0) {
            return Poly::one();
        }
    }
    let (small, big) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if big.div_exact(small).is_some() {
        return small.monic();
    }
    if let Some(h) = heu_gcd(a, b, bounds.as_ref()) {
        return h;
    }
    let Some(bounds) = bounds else {
        return prs_gcd(a, b, *common.iter().next().unwrap());
    };
    // the gcd is free of a variable with bound zero, so it divides every
    // coefficient in that variable
    let free = bounds
        .iter()
        .filter(|(_, &d)| d == 0)
        .max_by_key(|(&x, _)| a.degree(x) + b.degree(x));
    if let Some((&x, _)) = free {
        return gcd_with_coeffs(&content_in(&a.coeffs_in(x)), b, x);
    }
    let (&x, _) = bounds
        .iter()
        .min_by_key(|(&x, &d)| (d, a.degree(x).max(b.degree(x))))
        .expect("common variables");
    prs_gcd(a, b, x)
}

/// gcd(g, coefficients of `p` in `x`)
fn gcd_with_coeffs(g: &Poly, p: &Poly, x: Var) -> Poly {
    let mut acc = g.clone();
    let mut coeffs = p.coeffs_in(x);
    coeffs.retain(|c| !c.is_zero());
    coeffs.sort_by_key(|c| c.len());
    for c in coeffs {
        acc = gcd(&acc, &c);
        if acc.is_constant() {
            return Poly::one();
        }
    }
    acc.monic()
}

fn content_in(coeffs: &[Poly]) -> Poly {
    let mut nz: Vec<&Poly> = coeffs.iter().filter(|c| !c.is_zero()).collect();
    nz.sort_by_key(|c| c.len());
    let mut acc = Poly::zero();
    for c in nz {
        acc = gcd(&acc, c);
        if acc.is_constant() {
            return Poly::one();
        }
    }
    acc
}

fn primitive_part(coeffs: &[Poly]) -> Vec<Poly> {
    let cont = content_in(coeffs);
    let mut out: Vec<Poly> = if cont.is_one() {
        coeffs.to_vec()
    } else {
        coeffs
            .iter()
            .map(|c| c.div_exact(&cont).expect("content divides coefficient"))
            .collect()
    };
    // keep rational coefficients from growing across remainder steps
    let lead = out.iter().rev().find(|c| !c.is_zero()).map(Poly::lc);
    if let Some(l) = lead {
        let mut scale = Q::zero();
        for c in &out {
            for (_, q) in c.terms() {
                scale = if scale.is_zero() {
                    q.abs()
                } else {
                    q_gcd(&scale, q)
                };
            }
        }
        if l.is_negative() {
            scale = -scale;
        }
        if !scale.is_zero() && !scale.is_one() {
            let inv = scale.recip();
            out = out.iter().map(|c| c.scale(&inv)).collect();
        }
    }
    out
}

fn q_gcd(a: &Q, b: &Q) -> Q {
    use num_integer::Integer;
    let n = a.numer().gcd(b.numer());
    let d = a.denom().lcm(b.denom());
    Q::new(n, d)
}

fn degree(c: &[Poly]) -> Option<usize> {
    c.iter().rposition(|p| !p.is_zero())
}

fn prem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let db = degree(b).expect("nonzero divisor");
    let lcb = &b[db];
    let mut r: Vec<Poly> = a.to_vec();
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let lcr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = &*c * lcb;
        }
        for (i, bc) in b.iter().enumerate() {
            if !bc.is_zero() {
                r[i + shift] = &r[i + shift] - &(bc * &lcr);
            }
        }
        debug_assert!(r[dr].is_zero());
        r.truncate(dr);
    }
    r
}

fn prs_gcd(a: &Poly, b: &Poly, x: Var) -> Poly {
    let ca = a.coeffs_in(x);
    let cb = b.coeffs_in(x);
    let cont = gcd(&content_in(&ca), &content_in(&cb));
    let mut f = primitive_part(&ca);
    let mut g = primitive_part(&cb);
    if degree(&f) < degree(&g) {
        std::mem::swap(&mut f, &mut g);
    }
    let pp = loop {
        let r = prem(&f, &g);
        match degree(&r) {
            None => break g,
            Some(0) => break vec![Poly::one()],
            Some(_) => {
                f = g;
                g = primitive_part(&r);
            }
        }
    };
    let pp = primitive_part(&pp);
    (&Poly::from_coeffs(x, &pp) * &cont).monic()
}

/// Heuristic gcd: evaluate the last variable at a large integer, recurse,
/// and rebuild the candidate from its balanced digits.
///
/// A common divisor that reaches the modular degree bound in every variable
/// is the gcd, so with bounds at hand only the final candidate needs exact
/// division checks. Otherwise every level is checked.
fn heu_gcd(a: &Poly, b: &Poly, bounds: Option<&BTreeMap<Var, usize>>) -> Option<Poly> {
    let (_, pa) = a.primitive();
    let (_, pb) = b.primitive();
    let vars: Vec<Var> = pa.vars().union(&pb.vars()).copied().collect();
    let (fa, fb) = (to_int(&pa), to_int(&pb));
    if let Some(bounds) = bounds {
        if let Some(h) = heu_rec(&fa, &fb, &vars, false) {
            let h = to_poly(h);
            let sharp = bounds.iter().all(|(&x, &d)| h.degree(x) as usize == d);
            if sharp && pa.div_exact(&h).is_some() && pb.div_exact(&h).is_some() {
                return Some(h.monic());
            }
        }
    }
    let h = heu_rec(&fa, &fb, &vars, true)?;
    Some(to_poly(h).monic())
}

/// Integer polynomial, terms sorted by monomial and merged.
type IntPoly = Vec<(Monomial, BigInt)>;

fn to_int(p: &Poly) -> IntPoly {
    p.terms().iter().map(|(m, c)| (m.clone(), c.numer().clone())).collect()
}

fn to_poly(p: IntPoly) -> Poly {
    Poly::from_terms(p.into_iter().map(|(m, c)| (m, Q::from_integer(c))).collect())
}

fn merged(mut terms: IntPoly) -> IntPoly {
    terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    let mut out: IntPoly = Vec::with_capacity(terms.len());
    for (m, c) in terms {
        match out.last_mut() {
            Some((lm, lc)) if *lm == m => *lc += c,
            _ => out.push((m, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

fn max_norm(p: &IntPoly) -> BigInt {
    p.iter().map(|(_, c)| c.abs()).max().unwrap_or_default()
}

fn int_content(p: &IntPoly) -> BigInt {
    use num_integer::Integer;
    p.iter().fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c))
}

fn divide_ints(p: &IntPoly, k: &BigInt) -> IntPoly {
    p.iter().map(|(m, c)| (m.clone(), c / k)).collect()
}

/// `p` with `x = xi`.
fn eval_at(p: &IntPoly, x: Var, xi: &BigInt) -> IntPoly {
    let mut powers = vec![BigInt::one()];
    let terms = p
        .iter()
        .map(|(m, c)| {
            let (e, rest) = m.split_off(x);
            while powers.len() <= e as usize {
                let next = powers.last().unwrap() * xi;
                powers.push(next);
            }
            (rest, c * &powers[e as usize])
        })
        .collect();
    merged(terms)
}

/// Inverse of [`eval_at`] for a polynomial whose coefficients in `x` have
/// integer coefficients smaller than `xi / 2`.
fn interpolate(h: &IntPoly, x: Var, xi: &BigInt) -> IntPoly {
    let half = xi / 2;
    let mut terms = Vec::new();
    for (m, c) in h {
        let mut n = c.clone();
        let mut e = 0u32;
        while !n.is_zero() {
            let mut d = &n % xi;
            if d > half {
                d -= xi;
            } else if d < -&half {
                d += xi;
            }
            if !d.is_zero() {
                terms.push((m.mul(&Monomial::var(x, e)), d.clone()));
            }
            n = (n - d) / xi;
            e += 1;
        }
    }
    merged(terms)
}

fn divides(d: &IntPoly, p: &IntPoly) -> bool {
    to_poly(p.clone()).div_exact(&to_poly(d.clone())).is_some()
}

/// Integer gcd of two integer polynomials in `vars`; without `check` the
/// result is only a candidate.
fn heu_rec(f: &IntPoly, g: &IntPoly, vars: &[Var], check: bool) -> Option<IntPoly> {
    use num_integer::Integer;
    if f.is_empty() || g.is_empty() {
        return None;
    }
    let content = int_content(f).gcd(&int_content(g));
    let Some((&x, rest)) = vars.split_last() else {
        return Some(vec![(Monomial::one(), content)]);
    };
    let (f, g) = (divide_ints(f, &content), divide_ints(g, &content));
    let has_x = |p: &IntPoly| p.iter().any(|(m, _)| m.degree(x) > 0);
    if !has_x(&f) && !has_x(&g) {
        let h = heu_rec(&f, &g, rest, check)?;
        return Some(h.into_iter().map(|(m, c)| (m, c * &content)).collect());
    }
    let mut xi = max_norm(&f).min(max_norm(&g)) * 2 + 29;
    for _ in 0..6 {
        let (ff, gg) = (eval_at(&f, x, &xi), eval_at(&g, x, &xi));
        if !ff.is_empty() && !gg.is_empty() {
            if let Some(h) = heu_rec(&ff, &gg, rest, check) {
                let big_h = interpolate(&h, x, &xi);
                if !big_h.is_empty() {
                    let big_h = divide_ints(&big_h, &int_content(&big_h));
                    if !check || (divides(&big_h, &f) && divides(&big_h, &g)) {
                        return Some(big_h.into_iter().map(|(m, c)| (m, c * &content)).collect());
                    }
                }
            }
        }
        xi = xi * 73794 / 27011;
    }
    None
}

fn mod_q(q: &Q) -> Option<u64> {
    let n = mod_int(q.numer());
    if q.denom().is_one() {
        return Some(n);
    }
    let d = mod_int(q.denom());
    if d == 0 {
        return None;
    }
    Some(mulmod(n, powmod(d, P - 2)))
}

fn mod_int(n: &BigInt) -> u64 {
    if let Some(k) = n.to_i64() {
        return k.rem_euclid(P as i64) as u64;
    }
    let p = BigInt::from(P);
    let mut r = n % &p;
    if r.is_negative() {
        r += &p;
    }
    r.to_u64().unwrap()
}

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powmod(mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b);
        }
        b = mulmod(b, b);
        e >>= 1;
    }
    acc
}

/// A polynomial reduced mod `P`, exponents indexed by position in `vars`.
struct ModPoly {
    terms: Vec<(u64, Vec<u32>)>,
}

impl ModPoly {
    fn new(p: &Poly, vars: &[Var]) -> Option<ModPoly> {
        let mut terms = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            let mut exps = vec![0u32; vars.len()];
            for &(v, e) in m.pairs() {
                exps[vars.binary_search(&v).ok()?] = e;
            }
            terms.push((mod_q(c)?, exps));
        }
        Some(ModPoly { terms })
    }

    /// Univariate images in every variable at once, all other variables
    /// taking the values in `point`.
    fn images(&self, point: &[u64], degrees: &[usize]) -> Vec<Vec<u64>> {
        let n = point.len();
        let mut out: Vec<Vec<u64>> = degrees.iter().map(|&d| vec![0u64; d + 1]).collect();
        let mut pw = vec![1u64; n];
        let mut suffix = vec![1u64; n + 1];
        for (c, exps) in &self.terms {
            for k in 0..n {
                pw[k] = powmod(point[k], exps[k] as u64);
            }
            for k in (0..n).rev() {
                suffix[k] = mulmod(suffix[k + 1], pw[k]);
            }
            let mut prefix = *c;
            for k in 0..n {
                let t = mulmod(prefix, suffix[k + 1]);
                let slot = &mut out[k][exps[k] as usize];
                *slot = (*slot + t) % P;
                prefix = mulmod(prefix, pw[k]);
            }
        }
        out
    }
}

fn upoly_gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    let trim = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a mod b
        let inv = powmod(*b.last().unwrap(), P - 2);
        while a.len() >= b.len() {
            let f = mulmod(*a.last().unwrap(), inv);
            let shift = a.len() - b.len();
            for (i, bc) in b.iter().enumerate() {
                a[i + shift] = (a[i + shift] + P - mulmod(f, *bc)) % P;
            }
            trim(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Upper bounds on the degree of the gcd in each common variable, read off
/// modular images whose leading coefficients survive the evaluation. A
/// variable whose images never kept both degrees gets its trivial bound.
fn degree_bounds(a: &Poly, b: &Poly, common: &BTreeSet<Var>) -> Option<BTreeMap<Var, usize>> {
    let mut rng = StdRng::seed_from_u64(0x5eed_9c0d);
    let all: Vec<Var> = a.vars().union(&b.vars()).copied().collect();
    let (ma, mb) = (ModPoly::new(a, &all)?, ModPoly::new(b, &all)?);
    let da: Vec<usize> = all.iter().map(|&v| a.degree(v) as usize).collect();
    let db: Vec<usize> = all.iter().map(|&v| b.degree(v) as usize).collect();
    let mut bounds = BTreeMap::new();
    let mut open: BTreeSet<Var> = common.clone();
    for _attempt in 0..3 {
        if open.is_empty() {
            break;
        }
        let point: Vec<u64> = all.iter().map(|_| rng.gen_range(2..P)).collect();
        let (ia, ib) = (ma.images(&point, &da), mb.images(&point, &db));
        for (k, v) in all.iter().enumerate() {
            if !open.contains(v) {
                continue;
            }
            // the evaluation must keep both degrees in v
            if ia[k].last() == Some(&0) || ib[k].last() == Some(&0) {
                continue;
            }
            bounds.insert(*v, upoly_gcd_degree(ia[k].clone(), ib[k].clone()));
            open.remove(v);
        }
    }
    for v in open {
        bounds.insert(v, a.degree(v).min(b.degree(v)) as usize);
    }
    Some(bounds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &str) -> Poly {
        Poly::var(Var::symbol(v))
    }

    #[test]
    fn coprime_polynomials() {
        let (u, v) = (p("gu"), p("gv"));
        let a = &(&u * &u) + &v;
        let b = &u + &Poly::from_int(1);
        assert!(gcd(&a, &b).is_one());
    }

    #[test]
    fn recovers_common_factor() {
        let (u, v, w) = (p("gu"), p("gv"), p("gw"));
        let g = &(&u * &v) + &(&w * &Poly::from_int(3));
        let a = &g * &(&u + &w);
        let b = &g * &(&(&v * &v) - &u);
        assert_eq!(gcd(&a, &b), g.monic());
        let b2 = &(&g * &g) * &(&v + &Poly::from_int(2));
        assert_eq!(gcd(&(&a * &g), &b2), (&g * &g).monic());
    }

    #[test]
    fn monomial_content_is_kept() {
        let (u, v) = (p("gu"), p("gv"));
        let a = &(&u * &u) * &(&v + &Poly::one());
        let b = &u * &(&(&v * &v) - &Poly::one());
        assert_eq!(gcd(&a, &b), (&u * &(&v + &Poly::one())).monic());
    }

    #[test]
    fn factor_free_of_a_shared_variable() {
        let (u, v, w) = (p("gu"), p("gv"), p("gw"));
        let g = &(&u * &v) + &Poly::from_int(2);
        let a = &g * &(&w + &u);
        let b = &g * &(&(&w * &w) - &v);
        assert_eq!(gcd(&a, &b), g.monic());
    }

    #[test]
    fn heuristic_agrees_with_prs() {
        let mut rng = StdRng::seed_from_u64(11);
        let vars = ["gu", "gv", "gw"].map(p);
        let mut random = |terms: usize| {
            let mut acc = Poly::zero();
            for _ in 0..terms {
                let mut t = Poly::from_int(rng.gen_range(-9..=9));
                for v in &vars {
                    t = &t * &v.pow(rng.gen_range(0..=2));
                }
                acc = &acc + &t;
            }
            acc
        };
        for _ in 0..40 {
            let g = random(3);
            let (a, b) = (&g * &random(3), &g * &random(4));
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let x = *a.vars().union(&b.vars()).next().unwrap();
            let want = prs_gcd(&a, &b, x);
            if let Some(h) = heu_gcd(&a, &b, None) {
                assert_eq!(h, want, "{a} / {b}");
            }
            assert_eq!(gcd(&a, &b), want);
        }
    }
}
