use std::collections::BTreeSet;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::atom::{Atom, Var};
use crate::error::SymError;
use crate::poly::{Poly, Q};
use crate::probe;
use crate::ratfunc::RatFunc;
use crate::render::display_lc;

/// Normalized scalar: `a + b·√s` with `a`, `b` reduced rational functions
/// and `s` a canonical radicand, or an error value that absorbs every
/// operation it takes part in.
///
/// Cloning is cheap.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar(Arc<Repr>);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Rat(RatFunc),
    Surd { a: RatFunc, b: RatFunc, s: Arc<Poly> },
    Invalid(SymError),
}

impl Scalar {
    pub fn zero() -> Self {
        Self::rat(RatFunc::zero())
    }

    pub fn one() -> Self {
        Self::rat(RatFunc::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::rat(RatFunc::from_int(n))
    }

    pub fn from_q(q: Q) -> Self {
        Self::rat(RatFunc::constant(q))
    }

    /// `n / d`
    pub fn ratio(n: i64, d: i64) -> Self {
        Self::from_q(Q::new(n.into(), d.into()))
    }

    pub fn var(v: Var) -> Self {
        Self::rat(RatFunc::var(v))
    }

    pub fn symbol(name: &str) -> Self {
        Self::var(Var::symbol(name))
    }

    pub fn rat(r: RatFunc) -> Self {
        Scalar(Arc::new(Repr::Rat(r)))
    }

    pub fn invalid(e: SymError) -> Self {
        Scalar(Arc::new(Repr::Invalid(e)))
    }

    fn surd(a: RatFunc, b: RatFunc, s: Arc<Poly>) -> Self {
        if b.is_zero() {
            Self::rat(a)
        } else {
            Scalar(Arc::new(Repr::Surd { a, b, s }))
        }
    }

    /// Formal function application `name⁽ᵒʳᵈᵉʳ⁾(arg)`.
    pub fn func(name: &str, order: u32, arg: &Scalar) -> Self {
        match &*arg.0 {
            Repr::Rat(r) => Self::var(Var::func(name, order, r.clone())),
            Repr::Surd { .. } => Self::invalid(SymError::Undefined(format!(
                "function argument with a radical: {name}({arg})"
            ))),
            Repr::Invalid(e) => Self::invalid(e.clone()),
        }
    }

    pub fn as_rat(&self) -> Option<&RatFunc> {
        match &*self.0 {
            Repr::Rat(r) => Some(r),
            _ => None,
        }
    }

    /// `(a, b, s)` for a value carrying a radical.
    pub fn surd_parts(&self) -> Option<(&RatFunc, &RatFunc, &Poly)> {
        match &*self.0 {
            Repr::Surd { a, b, s } => Some((a, b, s)),
            _ => None,
        }
    }

    pub fn error(&self) -> Option<&SymError> {
        match &*self.0 {
            Repr::Invalid(e) => Some(e),
            _ => None,
        }
    }

    pub fn check(self) -> Result<Scalar, SymError> {
        match &*self.0 {
            Repr::Invalid(e) => Err(e.clone()),
            _ => Ok(self),
        }
    }

    pub fn as_constant(&self) -> Option<Q> {
        self.as_rat().and_then(RatFunc::as_constant)
    }

    pub fn radicand(&self) -> Option<&Poly> {
        self.surd_parts().map(|(_, _, s)| s)
    }

    /// Identically zero as a function of its atoms.
    ///
    /// Errors when an earlier operation failed, e.g. on two incompatible
    /// radicands.
    pub fn is_zero(&self) -> Result<bool, SymError> {
        let z = match &*self.0 {
            Repr::Rat(r) => r.is_zero(),
            // b is never stored as zero, and a + b√s = 0 with b ≠ 0 would
            // make s a square, which canonical radicands exclude
            Repr::Surd { .. } => false,
            Repr::Invalid(e) => return Err(e.clone()),
        };
        probe::record(self);
        Ok(z)
    }

    pub(crate) fn addr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    /// Structural zero test without recording or error reporting.
    pub fn is_structurally_zero(&self) -> bool {
        matches!(&*self.0, Repr::Rat(r) if r.is_zero())
    }

    /// Every atom appearing directly in the normal form.
    pub fn vars(&self) -> BTreeSet<Var> {
        match &*self.0 {
            Repr::Rat(r) => r.vars(),
            Repr::Surd { a, b, s } => {
                let mut out = a.vars();
                out.extend(b.vars());
                out.extend(s.vars());
                out
            }
            Repr::Invalid(_) => BTreeSet::new(),
        }
    }

    /// Symbol atoms the value depends on, looking inside function and
    /// logarithm arguments.
    pub fn symbols(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for v in self.vars() {
            out.extend(v.symbols());
        }
        out
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.vars().into_iter().any(|w| w.depends_on(v))
    }

    pub fn recip(&self) -> Scalar {
        match &*self.0 {
            Repr::Rat(r) => match r.recip() {
                Some(i) => Self::rat(i),
                None => Self::invalid(SymError::DivisionByZero),
            },
            Repr::Surd { a, b, s } => {
                let s_r = RatFunc::from_poly((**s).clone());
                let norm = &(a * a) - &(&(b * b) * &s_r);
                match norm.recip() {
                    Some(inv) => Self::surd(&inv * a, -&(&inv * b), s.clone()),
                    None => Self::invalid(SymError::DivisionByZero),
                }
            }
            Repr::Invalid(_) => self.clone(),
        }
    }

    pub fn pow(&self, k: i64) -> Scalar {
        if let Repr::Rat(r) = &*self.0 {
            return match r.pow(k) {
                Some(p) => Self::rat(p),
                None => Self::invalid(SymError::DivisionByZero),
            };
        }
        let base = if k < 0 { self.recip() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Scalar::one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        acc
    }

    /// Square root of a radical-free value.
    pub fn sqrt(&self) -> Scalar {
        match &*self.0 {
            Repr::Rat(r) => {
                // √(n/d) = √(n·d)/d
                let prod = r.num() * r.den();
                let den = RatFunc::from_poly(r.den().clone());
                match sqrt_poly(&prod) {
                    PolySqrt::Exact(root) => Self::rat(&RatFunc::from_poly(root) / &den),
                    PolySqrt::Surd(coef, s) => {
                        Self::surd(RatFunc::zero(), &RatFunc::from_poly(coef) / &den, Arc::new(s))
                    }
                }
            }
            Repr::Surd { .. } => Self::invalid(SymError::NestedRadical(self.to_string())),
            Repr::Invalid(_) => self.clone(),
        }
    }

    /// Natural logarithm of a radical-free value, split over the visible
    /// multiplicative structure so that `ln(u²v) = 2 ln u + ln v`.
    pub fn ln(&self) -> Scalar {
        let r = match &*self.0 {
            Repr::Rat(r) => r,
            Repr::Surd { .. } => {
                return Self::invalid(SymError::Undefined(format!("ln of radical: {self}")))
            }
            Repr::Invalid(_) => return self.clone(),
        };
        if r.is_zero() {
            return Self::invalid(SymError::Undefined("ln(0)".into()));
        }
        let mut acc = Scalar::zero();
        let mut constant = Q::one();
        for (p, sign) in [(r.num(), 1i64), (r.den(), -1i64)] {
            let m = p.monomial_content();
            for &(v, e) in m.pairs() {
                let l = Scalar::var(Var::log(RatFunc::var(v)));
                acc = &acc + &(&l * &Scalar::from_int(sign * e as i64));
            }
            let rest = p.div_monomial(&m);
            // normalize by the displayed leading coefficient so the atom
            // does not depend on interning order
            let lc = display_lc(&rest);
            if sign > 0 {
                constant *= &lc;
            } else {
                constant /= &lc;
            }
            let rest = rest.scale(&lc.recip());
            if !rest.is_one() {
                let l = Scalar::var(Var::log(RatFunc::from_poly(rest)));
                acc = &acc + &(&l * &Scalar::from_int(sign));
            }
        }
        if !constant.is_one() {
            acc = &acc + &Scalar::var(Var::log(RatFunc::constant(constant)));
        }
        acc
    }

    /// Exact partial derivative with respect to the symbol `v`, applying the
    /// chain rule through function and logarithm atoms.
    pub fn diff(&self, v: Var) -> Scalar {
        match &*self.0 {
            Repr::Rat(r) => Self::rat(rat_diff(r, v)),
            Repr::Surd { a, b, s } => {
                let sr = RatFunc::from_poly((**s).clone());
                let ds = rat_diff(&sr, v);
                let da = rat_diff(a, v);
                let db = rat_diff(b, v);
                // d(b√s) = (b' + b s'/(2s)) √s
                let half = RatFunc::constant(Q::new(1.into(), 2.into()));
                let extra = &(&(b * &ds) * &half) / &sr;
                Self::surd(da, &db + &extra, s.clone())
            }
            Repr::Invalid(_) => self.clone(),
        }
    }

    /// Evaluate at a point assigning a rational to every atom. Returns
    /// `(a, b, s)` values; `None` at a pole.
    pub(crate) fn eval_parts(&self, value: &mut impl FnMut(Var) -> Q) -> Option<(Q, Q, Q)> {
        match &*self.0 {
            Repr::Rat(r) => Some((r.eval(value)?, Q::zero(), Q::zero())),
            Repr::Surd { a, b, s } => Some((a.eval(value)?, b.eval(value)?, s.eval(value))),
            Repr::Invalid(_) => None,
        }
    }

    fn binary(
        &self,
        rhs: &Scalar,
        rat: impl Fn(&RatFunc, &RatFunc) -> RatFunc,
        surd: impl Fn(&RatFunc, &RatFunc, &RatFunc, &RatFunc, &Arc<Poly>) -> Scalar,
    ) -> Scalar {
        match (&*self.0, &*rhs.0) {
            (Repr::Invalid(_), _) => self.clone(),
            (_, Repr::Invalid(_)) => rhs.clone(),
            (Repr::Rat(x), Repr::Rat(y)) => Self::rat(rat(x, y)),
            (Repr::Rat(x), Repr::Surd { a, b, s }) => surd(x, &RatFunc::zero(), a, b, s),
            (Repr::Surd { a, b, s }, Repr::Rat(y)) => surd(a, b, y, &RatFunc::zero(), s),
            (Repr::Surd { a, b, s }, Repr::Surd { a: c, b: d, s: t }) => {
                if s == t {
                    return surd(a, b, c, d, s);
                }
                // √t = k·√s when s·t is a perfect square
                match (&**s * &**t).sqrt_exact() {
                    Some(root) => {
                        let k = &RatFunc::from_poly(root) / &RatFunc::from_poly((**s).clone());
                        surd(a, b, c, &(d * &k), s)
                    }
                    None => Self::invalid(SymError::TwoRadicands(
                        render_poly_plain(s),
                        render_poly_plain(t),
                    )),
                }
            }
        }
    }
}

fn render_poly_plain(p: &Poly) -> String {
    RatFunc::from_poly(p.clone()).to_string()
}

/// Chain-rule derivative of a rational function with respect to a symbol.
pub(crate) fn rat_diff(r: &RatFunc, v: Var) -> RatFunc {
    let mut acc = RatFunc::zero();
    for w in r.vars() {
        if !w.depends_on(v) {
            continue;
        }
        let inner = atom_diff(w, v);
        if inner.is_zero() {
            continue;
        }
        let outer = r.partial(w);
        acc = &acc + &(&outer * &inner);
    }
    acc
}

/// d(atom)/d(symbol)
fn atom_diff(w: Var, v: Var) -> RatFunc {
    if w == v {
        return RatFunc::one();
    }
    match w.atom() {
        Atom::Symbol(_) => RatFunc::zero(),
        Atom::Func { name, order, arg } => {
            let d = rat_diff(&arg, v);
            if d.is_zero() {
                return d;
            }
            &RatFunc::var(Var::func(&name, order + 1, arg)) * &d
        }
        Atom::Log(arg) => {
            let d = rat_diff(&arg, v);
            &d / &arg
        }
    }
}

pub(crate) enum PolySqrt {
    Exact(Poly),
    /// `coef · √radicand` with a canonical radicand
    Surd(Poly, Poly),
}

/// Square root of a polynomial as an exact root or a multiple of a
/// canonical radicand: integer-primitive with positive leading coefficient
/// times a square-free integer.
pub(crate) fn sqrt_poly(p: &Poly) -> PolySqrt {
    if p.is_zero() {
        return PolySqrt::Exact(Poly::zero());
    }
    if let Some(r) = p.sqrt_exact() {
        return PolySqrt::Exact(r);
    }
    let (mut c, mut p0) = p.primitive();
    // sign fixed by display order, independent of interning order
    if display_lc(&p0).is_negative() {
        c = -c;
        p0 = -p0;
    }
    // √c = (sq/d)·√k for c = n/d and n·d = sq²·k
    let nd: BigInt = c.numer() * c.denom();
    let (sq, k) = split_square(&nd);
    let mult = Q::new(sq, c.denom().clone());
    match p0.sqrt_exact() {
        Some(root) => PolySqrt::Surd(root.scale(&mult), Poly::constant(Q::from_integer(k))),
        None => PolySqrt::Surd(
            Poly::constant(mult),
            p0.scale(&Q::from_integer(k)),
        ),
    }
}

/// `n = sq²·k` with `k` free of small square factors.
fn split_square(n: &BigInt) -> (BigInt, BigInt) {
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut rest = n.abs();
    let mut sq = BigInt::one();
    let mut p = 2u32;
    while p < 2000 {
        let pp = BigInt::from(p * p);
        while (&rest % &pp).is_zero() {
            rest /= &pp;
            sq *= p;
        }
        if BigInt::from(p) * BigInt::from(p) > rest {
            break;
        }
        p += 1;
    }
    let r = rest.sqrt();
    if &r * &r == rest && !rest.is_one() {
        sq *= &r;
        rest = BigInt::one();
    }
    (sq, rest * sign)
}

impl From<RatFunc> for Scalar {
    fn from(r: RatFunc) -> Self {
        Scalar::rat(r)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.is_structurally_zero() {
            return rhs.clone();
        }
        if rhs.is_structurally_zero() {
            return self.clone();
        }
        let out = self.binary(
            rhs,
            |x, y| x + y,
            |a, b, c, d, s| Scalar::surd(a + c, b + d, s.clone()),
        );
        probe::note(probe::Op::Add, self, rhs, &out);
        out
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        if rhs.is_structurally_zero() {
            return self.clone();
        }
        let out = self.binary(
            rhs,
            |x, y| x - y,
            |a, b, c, d, s| Scalar::surd(a - c, b - d, s.clone()),
        );
        probe::note(probe::Op::Sub, self, rhs, &out);
        out
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_structurally_zero() && rhs.error().is_none() {
            return self.clone();
        }
        if rhs.is_structurally_zero() && self.error().is_none() {
            return rhs.clone();
        }
        let out = self.binary(
            rhs,
            |x, y| x * y,
            |a, b, c, d, s| {
                let sr = RatFunc::from_poly((**s).clone());
                let re = &(a * c) + &(&(b * d) * &sr);
                let im = &(a * d) + &(b * c);
                Scalar::surd(re, im, s.clone())
            },
        );
        probe::note(probe::Op::Mul, self, rhs, &out);
        out
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        let out = match (&*self.0, &*rhs.0) {
            (Repr::Rat(x), Repr::Rat(y)) => match y.recip() {
                Some(inv) => Scalar::rat(x * &inv),
                None => Scalar::invalid(SymError::DivisionByZero),
            },
            _ => self * &rhs.recip(),
        };
        probe::note(probe::Op::Div, self, rhs, &out);
        out
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match &*self.0 {
            Repr::Rat(r) => Scalar::rat(-r),
            Repr::Surd { a, b, s } => Scalar::surd(-a, -b, s.clone()),
            Repr::Invalid(_) => self.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| &a + &b)
    }
}

impl<'a> Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| &a + b)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Repr::Rat(r) => write!(f, "{r}"),
            Repr::Surd { a, b, s } => {
                let s = render_poly_plain(s);
                let b_str = b.to_string();
                let b_part = if b.is_one() {
                    format!("sqrt({s})")
                } else if b.as_constant().is_some_and(|c| c == -Q::one()) {
                    format!("-sqrt({s})")
                } else {
                    format!("({b_str})*sqrt({s})")
                };
                if a.is_zero() {
                    f.write_str(&b_part)
                } else if let Some(rest) = b_part.strip_prefix('-') {
                    write!(f, "{a} - {rest}")
                } else {
                    write!(f, "{a} + {b_part}")
                }
            }
            Repr::Invalid(e) => write!(f, "<invalid: {e}>"),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}
