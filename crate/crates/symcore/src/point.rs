//! Exact evaluation at rational points.
//!
//! A value is `a + b√s` with rational `a`, `b`, `s`; `√s` is kept only when
//! it is irrational. Operations that leave this field (two unrelated
//! radicands, division by zero, a pole) produce an undefined value that
//! absorbs everything it touches, so a computation can be checked once at
//! the end.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::atom::Var;
use crate::poly::{rational_sqrt, Q};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Quad {
    a: Q,
    b: Q,
    s: Q,
}

/// `a + b√s` or undefined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Value(Option<Quad>);

impl Value {
    pub fn undefined() -> Self {
        Value(None)
    }

    pub fn from_q(q: Q) -> Self {
        Value(Some(Quad { a: q, b: Q::zero(), s: Q::zero() }))
    }

    pub fn zero() -> Self {
        Self::from_q(Q::zero())
    }

    pub fn one() -> Self {
        Self::from_q(Q::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_q(Q::from_integer(n.into()))
    }

    /// `a + b√s`, folding `√s` when it is rational. A negative `s` is fine:
    /// the arithmetic is that of `Q[x]/(x² − s)`.
    pub fn surd(a: Q, b: Q, s: Q) -> Self {
        if b.is_zero() {
            return Self::from_q(a);
        }
        match rational_sqrt(&s) {
            Some(r) => Self::from_q(a + b * r),
            None => Value(Some(Quad { a, b, s })),
        }
    }

    pub fn is_defined(&self) -> bool {
        self.0.is_some()
    }

    /// `Some(true)` for an exact zero, `None` when undefined.
    pub fn is_zero(&self) -> Option<bool> {
        self.0.as_ref().map(|q| q.a.is_zero() && q.b.is_zero())
    }

    pub fn recip(&self) -> Value {
        let Some(q) = &self.0 else {
            return Value(None);
        };
        // 1/(a + b√s) = (a − b√s)/(a² − b²s)
        let den = &q.a * &q.a - &q.b * &q.b * &q.s;
        if den.is_zero() {
            return Value(None);
        }
        Value::surd(&q.a / &den, -&q.b / &den, q.s.clone())
    }

    /// Both operands over one radicand.
    fn align(x: &Quad, y: &Quad) -> Option<(Quad, Quad, Q)> {
        if y.b.is_zero() {
            return Some((x.clone(), y.clone(), x.s.clone()));
        }
        if x.b.is_zero() || x.s == y.s {
            return Some((x.clone(), y.clone(), y.s.clone()));
        }
        // √t = (√(st)/s)·√s
        let k = rational_sqrt(&(&x.s * &y.s))? / &x.s;
        let y = Quad { a: y.a.clone(), b: &y.b * k, s: x.s.clone() };
        Some((x.clone(), y, x.s.clone()))
    }

    fn binary(&self, other: &Value, f: impl Fn(&Quad, &Quad, &Q) -> (Q, Q)) -> Value {
        let (Some(x), Some(y)) = (&self.0, &other.0) else {
            return Value(None);
        };
        match Value::align(x, y) {
            Some((x, y, s)) => {
                let (a, b) = f(&x, &y, &s);
                Value::surd(a, b, s)
            }
            None => Value(None),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            None => write!(f, "undefined"),
            Some(q) if q.b.is_zero() => write!(f, "{}", q.a),
            Some(q) if q.a.is_zero() => write!(f, "{}*sqrt({})", q.b, q.s),
            Some(q) => write!(f, "{} + {}*sqrt({})", q.a, q.b, q.s),
        }
    }
}

impl Add for &Value {
    type Output = Value;
    fn add(self, rhs: &Value) -> Value {
        self.binary(rhs, |x, y, _| (&x.a + &y.a, &x.b + &y.b))
    }
}

impl Sub for &Value {
    type Output = Value;
    fn sub(self, rhs: &Value) -> Value {
        self.binary(rhs, |x, y, _| (&x.a - &y.a, &x.b - &y.b))
    }
}

impl Mul for &Value {
    type Output = Value;
    fn mul(self, rhs: &Value) -> Value {
        self.binary(rhs, |x, y, s| (&x.a * &y.a + &x.b * &y.b * s, &x.a * &y.b + &x.b * &y.a))
    }
}

impl Div for &Value {
    type Output = Value;
    fn div(self, rhs: &Value) -> Value {
        self * &rhs.recip()
    }
}

impl Neg for &Value {
    type Output = Value;
    fn neg(self) -> Value {
        match &self.0 {
            Some(q) => Value(Some(Quad { a: -&q.a, b: -&q.b, s: q.s.clone() })),
            None => Value(None),
        }
    }
}

pub(crate) fn random_q(rng: &mut StdRng) -> Q {
    loop {
        let n: i64 = rng.gen_range(-60..=60);
        if n != 0 {
            let d: i64 = rng.gen_range(1..=11);
            return Q::new(n.into(), d.into());
        }
    }
}

/// A random rational point, assigned lazily: every atom (field, parameter,
/// function or logarithm atom) gets an independent value on first use.
pub struct Point {
    rng: StdRng,
    values: HashMap<Var, Q>,
}

impl Point {
    pub fn random(seed: u64) -> Self {
        Point { rng: StdRng::seed_from_u64(seed), values: HashMap::new() }
    }

    pub fn value(&mut self, v: Var) -> Q {
        if let Some(q) = self.values.get(&v) {
            return q.clone();
        }
        let q = random_q(&mut self.rng);
        self.values.insert(v, q.clone());
        q
    }

    /// Undefined at a pole or for an error value.
    pub fn eval(&mut self, e: &Scalar) -> Value {
        let mut lookup = |v: Var| self.value(v);
        match e.eval_parts(&mut lookup) {
            Some((a, b, s)) => Value::surd(a, b, s),
            None => Value::undefined(),
        }
    }

    /// `u = 1/2, v = -3` for the given atoms that have a value.
    pub fn describe(&self, vars: &[Var]) -> String {
        vars.iter()
            .filter_map(|v| self.values.get(v).map(|q| format!("{} = {q}", v.label())))
            .collect::<Vec<_>>()
            .join(", ")
    }
}
