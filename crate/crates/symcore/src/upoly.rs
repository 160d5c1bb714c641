//! Univariate polynomials with rational-function coefficients, used by the
//! antiderivative.

use crate::atom::Var;
use crate::poly::Poly;
use crate::ratfunc::RatFunc;

/// Dense coefficients, index = degree, no trailing zeros.
#[derive(Clone, PartialEq, Debug)]
pub(crate) struct UPoly(pub Vec<RatFunc>);

impl UPoly {
    pub fn new(mut c: Vec<RatFunc>) -> Self {
        while c.last().is_some_and(RatFunc::is_zero) {
            c.pop();
        }
        UPoly(c)
    }

    pub fn one() -> Self {
        UPoly(vec![RatFunc::one()])
    }

    /// `t + r`
    pub fn linear(r: RatFunc) -> Self {
        UPoly::new(vec![r, RatFunc::one()])
    }

    pub fn from_poly(p: &Poly, v: Var) -> Self {
        UPoly::new(p.coeffs_in(v).into_iter().map(RatFunc::from_poly).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> RatFunc {
        self.0.get(i).cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn lc(&self) -> RatFunc {
        self.0.last().cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn scale(&self, c: &RatFunc) -> UPoly {
        UPoly::new(self.0.iter().map(|x| x * c).collect())
    }

    pub fn monic(&self) -> UPoly {
        match self.lc().recip() {
            Some(inv) => self.scale(&inv),
            None => self.clone(),
        }
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        UPoly::new((0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        UPoly::new((0..n).map(|i| &self.coeff(i) - &o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly(Vec::new());
        }
        let mut out = vec![RatFunc::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        UPoly::new(out)
    }

    pub fn deriv(&self) -> UPoly {
        UPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.scale(&crate::poly::Q::from_integer(i.into())))
                .collect(),
        )
    }

    pub fn divrem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = d.lc().recip().unwrap();
        let mut r = self.0.clone();
        let mut q = vec![RatFunc::zero(); self.0.len().saturating_sub(dd)];
        while r.len() > dd {
            let top = r.len() - 1;
            let f = &r[top] * &inv;
            if !f.is_zero() {
                let shift = top - dd;
                for (i, c) in d.0.iter().enumerate() {
                    r[i + shift] = &r[i + shift] - &(c * &f);
                }
                q[shift] = f;
            }
            r.pop();
            while r.last().is_some_and(RatFunc::is_zero) {
                r.pop();
            }
        }
        (UPoly::new(q), UPoly::new(r))
    }

    pub fn div_exact(&self, d: &UPoly) -> UPoly {
        let (q, r) = self.divrem(d);
        debug_assert!(r.is_zero());
        q
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Yun's square-free decomposition: `(factor, multiplicity)` pairs of
    /// positive degree.
    pub fn squarefree(&self) -> Vec<(UPoly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.deriv();
        let g = f.gcd(&df);
        let mut c = f.div_exact(&g);
        let mut d = df.div_exact(&g).sub(&c.deriv());
        let mut i = 1;
        while c.degree().unwrap_or(0) > 0 {
            let a = c.gcd(&d);
            c = c.div_exact(&a);
            d = d.div_exact(&a).sub(&c.deriv());
            if a.degree().unwrap_or(0) > 0 {
                out.push((a, i));
            }
            i += 1;
        }
        out
    }

    /// `p(t + r)`
    pub fn shift(&self, r: &RatFunc) -> UPoly {
        let lin = UPoly::linear(r.clone());
        let mut acc = UPoly(Vec::new());
        for c in self.0.iter().rev() {
            acc = acc.mul(&lin).add(&UPoly::new(vec![c.clone()]));
        }
        acc
    }

    /// First `m` coefficients of the power series `self / d`, `d(0) ≠ 0`.
    pub fn series_div(&self, d: &UPoly, m: usize) -> Vec<RatFunc> {
        let inv = d.coeff(0).recip().expect("series divisor vanishes at 0");
        let mut s: Vec<RatFunc> = Vec::with_capacity(m);
        for k in 0..m {
            let mut acc = self.coeff(k);
            for j in 1..=k {
                let dj = d.coeff(j);
                if !dj.is_zero() {
                    acc = &acc - &(&dj * &s[k - j]);
                }
            }
            s.push(&acc * &inv);
        }
        s
    }

    pub fn to_ratfunc(&self, v: Var) -> RatFunc {
        let x = RatFunc::var(v);
        let mut acc = RatFunc::zero();
        for c in self.0.iter().rev() {
            acc = &(&acc * &x) + c;
        }
        acc
    }
}
