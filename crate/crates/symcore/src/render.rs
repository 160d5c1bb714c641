//! Deterministic text rendering.
//!
//! Atoms are ordered by label, never by interning order, so the same value
//! prints identically in every process. The output is accepted by the
//! parser.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed};

use crate::atom::Var;
use crate::poly::{Poly, Q};
use crate::ratfunc::RatFunc;

struct Term {
    coeff: Q,
    factors: Vec<(Arc<str>, u32)>,
    degree: u32,
}

/// Terms of `p` in display order.
fn display_terms(p: &Poly) -> Vec<Term> {
    let mut labels: Vec<(Var, Arc<str>)> = p.vars().into_iter().map(|v| (v, v.label())).collect();
    labels.sort_by(|a, b| a.1.cmp(&b.1));
    let mut terms: Vec<(Vec<u32>, Term)> = p
        .terms()
        .iter()
        .map(|(m, c)| {
            let exps: Vec<u32> = labels.iter().map(|(v, _)| m.degree(*v)).collect();
            let factors = labels
                .iter()
                .zip(&exps)
                .filter(|(_, e)| **e > 0)
                .map(|((_, l), e)| (l.clone(), *e))
                .collect();
            (
                exps,
                Term {
                    coeff: c.clone(),
                    factors,
                    degree: m.total_degree(),
                },
            )
        })
        .collect();
    terms.sort_by(|a, b| match b.1.degree.cmp(&a.1.degree) {
        Ordering::Equal => b.0.cmp(&a.0),
        o => o,
    });
    terms.into_iter().map(|(_, t)| t).collect()
}

/// Coefficient of the first term in display order.
pub(crate) fn display_lc(p: &Poly) -> Q {
    display_terms(p).first().map_or_else(Q::one, |t| t.coeff.clone())
}

fn write_q(out: &mut String, q: &Q) {
    if q.is_integer() {
        out.push_str(&q.numer().to_string());
    } else {
        out.push_str(&format!("{}/{}", q.numer(), q.denom()));
    }
}

fn write_terms(terms: &[Term], scale: &Q) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, t) in terms.iter().enumerate() {
        let c = &t.coeff * scale;
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let c = c.abs();
        let mut first = true;
        if !c.is_one() || t.factors.is_empty() {
            write_q(&mut out, &c);
            first = false;
        }
        for (label, e) in &t.factors {
            if !first {
                out.push('*');
            }
            first = false;
            out.push_str(label);
            if *e > 1 {
                out.push_str(&format!("^{e}"));
            }
        }
    }
    out
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_terms(&display_terms(self), &Q::one()))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = display_terms(self.num());
        if self.den().is_one() {
            return f.write_str(&write_terms(&num, &Q::one()));
        }
        let den = display_terms(self.den());
        // make the first displayed denominator coefficient one
        let scale = den[0].coeff.recip();
        let num_s = write_terms(&num, &scale);
        let den_s = write_terms(&den, &scale);
        let num_s = if num.len() > 1 { format!("({num_s})") } else { num_s };
        // scaling made the single-term coefficient one
        let den_simple = den.len() == 1 && den[0].factors.len() == 1;
        if den_simple {
            write!(f, "{num_s}/{den_s}")
        } else {
            write!(f, "{num_s}/({den_s})")
        }
    }
}
