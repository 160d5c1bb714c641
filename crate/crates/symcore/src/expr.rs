use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::poly::{rational_sqrt, Q};
use crate::scalar::Scalar;

/// Parsed expression tree, before normalization.
#[derive(Clone, PartialEq, Debug)]
pub enum Expr {
    Num(Q),
    Symbol(String),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    /// `base ^ k` with an integer exponent
    Pow(Box<Expr>, i64),
    Sqrt(Box<Expr>),
    Ln(Box<Expr>),
    /// Declared function, differentiated `order` times.
    Func {
        name: String,
        order: u32,
        arg: Box<Expr>,
    },
}

impl Expr {
    pub fn neg(e: Expr) -> Expr {
        Expr::Mul(vec![Expr::Num(-Q::one()), e])
    }

    pub fn recip(e: Expr) -> Expr {
        Expr::Pow(Box::new(e), -1)
    }

    /// Normal form. Errors surface as an invalid [`Scalar`].
    pub fn normalize(&self) -> Scalar {
        match self {
            Expr::Num(q) => Scalar::from_q(q.clone()),
            Expr::Symbol(s) => Scalar::symbol(s),
            Expr::Add(terms) => terms.iter().map(Expr::normalize).sum(),
            Expr::Mul(factors) => factors
                .iter()
                .fold(Scalar::one(), |acc, f| &acc * &f.normalize()),
            Expr::Pow(b, k) => b.normalize().pow(*k),
            Expr::Sqrt(b) => b.normalize().sqrt(),
            Expr::Ln(b) => b.normalize().ln(),
            Expr::Func { name, order, arg } => Scalar::func(name, *order, &arg.normalize()),
        }
    }

    /// Direct evaluation of the tree at a rational point. `None` on a pole,
    /// an irrational square root or a logarithm or function atom.
    pub fn eval(&self, point: &HashMap<String, Q>) -> Option<Q> {
        Some(match self {
            Expr::Num(q) => q.clone(),
            Expr::Symbol(s) => point.get(s)?.clone(),
            Expr::Add(terms) => {
                let mut acc = Q::zero();
                for t in terms {
                    acc += t.eval(point)?;
                }
                acc
            }
            Expr::Mul(factors) => {
                let mut acc = Q::one();
                for f in factors {
                    acc *= f.eval(point)?;
                }
                acc
            }
            Expr::Pow(b, k) => {
                let b = b.eval(point)?;
                if *k < 0 && b.is_zero() {
                    return None;
                }
                let p = num_traits::pow(b, k.unsigned_abs() as usize);
                if *k < 0 {
                    p.recip()
                } else {
                    p
                }
            }
            Expr::Sqrt(b) => rational_sqrt(&b.eval(point)?)?,
            Expr::Ln(_) | Expr::Func { .. } => return None,
        })
    }
}
