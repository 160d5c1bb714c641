//! Exact symbolic kernel.
//!
//! Every scalar handled by the higher layers is an element of
//! `Q(atoms)(√s)`: a pair of multivariate rational functions `a + b·√s` over
//! the rationals, where the atoms are plain symbols, formal function
//! applications `f⁽ᵏ⁾(arg)` and logarithms `ln(arg)`. Rational functions are
//! kept GCD-reduced with a normalized denominator, so deciding whether an
//! expression vanishes identically is a syntactic check on the normal form.
//!
//! The entry points are [`Context`] (names, jets, parameter assumptions),
//! [`Expr`] (the parsed tree) and [`Scalar`] (the normal form).

mod atom;
mod calculus;
mod context;
mod error;
mod expr;
mod gcd;
mod monomial;
mod parse;
pub mod point;
mod poly;
pub mod probe;
mod ratfunc;
mod render;
mod scalar;
mod subst;
mod upoly;

pub use atom::{Atom, Var};
pub use calculus::{antiderivative, potential};
pub use context::{Context, ContextBuilder, SymbolKind};
pub use error::SymError;
pub use expr::Expr;
pub use monomial::Monomial;
pub use poly::{Poly, Q};
pub use ratfunc::RatFunc;
pub use scalar::Scalar;
pub use subst::Substitution;

pub type Result<T, E = SymError> = std::result::Result<T, E>;
