use std::collections::HashMap;

use crate::atom::{Atom, Var};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::scalar::Scalar;

/// Simultaneous substitution of symbols and formal functions.
#[derive(Clone, Debug, Default)]
pub struct Substitution {
    symbols: HashMap<Var, Scalar>,
    functions: HashMap<String, (Var, Scalar)>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, v: Var, value: Scalar) -> Self {
        self.symbols.insert(v, value);
        self
    }

    pub fn bind_symbol(self, name: &str, value: Scalar) -> Self {
        self.bind(Var::symbol(name), value)
    }

    /// Replace `name(arg)` by `body` with `param := arg`; derivative atoms
    /// `name⁽ᵏ⁾(arg)` take the k-th derivative of `body` in `param`.
    pub fn bind_function(mut self, name: &str, param: Var, body: Scalar) -> Self {
        self.functions.insert(name.to_string(), (param, body));
        self
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty() && self.functions.is_empty()
    }

    fn atom_value(&self, v: Var, memo: &mut HashMap<Var, Scalar>) -> Scalar {
        if let Some(s) = memo.get(&v) {
            return s.clone();
        }
        let value = match v.atom() {
            Atom::Symbol(_) => self.symbols.get(&v).cloned().unwrap_or_else(|| Scalar::var(v)),
            Atom::Func { name, order, arg } => {
                let arg = self.ratfunc(&arg, memo);
                match self.functions.get(&*name) {
                    Some((param, body)) => {
                        let mut d = body.clone();
                        for _ in 0..order {
                            d = d.diff(*param);
                        }
                        d.substitute(&Substitution::new().bind(*param, arg))
                    }
                    None => Scalar::func(&name, order, &arg),
                }
            }
            Atom::Log(arg) => self.ratfunc(&arg, memo).ln(),
        };
        memo.insert(v, value.clone());
        value
    }

    fn poly(&self, p: &Poly, memo: &mut HashMap<Var, Scalar>) -> Scalar {
        let untouched = p.vars().into_iter().all(|v| {
            let value = self.atom_value(v, memo);
            value.as_rat().is_some_and(|r| *r == RatFunc::var(v))
        });
        if untouched {
            return Scalar::rat(RatFunc::from_poly(p.clone()));
        }
        let mut acc = Scalar::zero();
        for (m, c) in p.terms() {
            let mut t = Scalar::from_q(c.clone());
            for &(v, e) in m.pairs() {
                t = &t * &self.atom_value(v, memo).pow(e as i64);
            }
            acc = &acc + &t;
        }
        acc
    }

    fn ratfunc(&self, r: &RatFunc, memo: &mut HashMap<Var, Scalar>) -> Scalar {
        let n = self.poly(r.num(), memo);
        if r.den().is_one() {
            return n;
        }
        &n / &self.poly(r.den(), memo)
    }
}

impl Scalar {
    /// Apply all bindings simultaneously, then normalize.
    pub fn substitute(&self, s: &Substitution) -> Scalar {
        if s.is_empty() {
            return self.clone();
        }
        let mut memo = HashMap::new();
        if let Some(r) = self.as_rat() {
            return s.ratfunc(r, &mut memo);
        }
        match self.surd_parts() {
            Some((a, b, rad)) => {
                let a = s.ratfunc(a, &mut memo);
                let b = s.ratfunc(b, &mut memo);
                let rad = s.poly(rad, &mut memo);
                &a + &(&b * &rad.sqrt())
            }
            None => self.clone(),
        }
    }
}
