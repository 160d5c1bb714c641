use std::collections::HashSet;
use std::sync::Arc;

use crate::atom::Var;
use crate::error::SymError;
use crate::expr::Expr;
use crate::parse::parse;
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::Result;

/// What a declared name stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    /// Field variable `u^i`.
    Field(usize),
    /// Jet variable: field index and derivative count per independent
    /// variable.
    Jet { field: usize, orders: Vec<u32> },
    Independent(usize),
    Parameter,
    /// Parameter treated as transcendental (a pencil parameter).
    Generic,
    /// Formal function of one argument.
    Function,
}

/// Declared names and parameter assumptions. Cheap to clone.
#[derive(Clone, Debug)]
pub struct Context {
    inner: Arc<Inner>,
}

#[derive(Debug)]
struct Inner {
    fields: Vec<String>,
    independents: Vec<String>,
    params: Vec<String>,
    generic: Vec<String>,
    functions: Vec<String>,
    assumptions: Vec<(String, Scalar)>,
}

#[derive(Clone, Debug, Default)]
pub struct ContextBuilder {
    fields: Vec<String>,
    independents: Vec<String>,
    params: Vec<String>,
    generic: Vec<String>,
    functions: Vec<String>,
    assumptions: Vec<String>,
}

impl ContextBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fields<S: Into<String>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        self.fields.extend(names.into_iter().map(Into::into));
        self
    }

    /// Independent variables, single letters. Defaults to `x` alone.
    pub fn independents<S: Into<String>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        self.independents.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn param(mut self, name: impl Into<String>) -> Self {
        self.params.push(name.into());
        self
    }

    pub fn params<S: Into<String>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        self.params.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn generic(mut self, name: impl Into<String>) -> Self {
        self.generic.push(name.into());
        self
    }

    pub fn function(mut self, name: impl Into<String>) -> Self {
        self.functions.push(name.into());
        self
    }

    /// Assert that an expression in the parameters never vanishes.
    pub fn assume_nonzero(mut self, expr: impl Into<String>) -> Self {
        self.assumptions.push(expr.into());
        self
    }

    pub fn build(self) -> Result<Context> {
        let independents = if self.independents.is_empty() {
            vec!["x".to_string()]
        } else {
            self.independents
        };
        let mut seen = HashSet::new();
        let all = self
            .fields
            .iter()
            .chain(&independents)
            .chain(&self.params)
            .chain(&self.generic)
            .chain(&self.functions);
        for name in all {
            if !is_identifier(name) {
                return Err(SymError::InvalidContext(format!("`{name}` is not an identifier")));
            }
            if name == "sqrt" || name == "ln" {
                return Err(SymError::InvalidContext(format!("`{name}` is reserved")));
            }
            if !seen.insert(name.clone()) {
                return Err(SymError::InvalidContext(format!("`{name}` declared twice")));
            }
        }
        if self.fields.is_empty() {
            return Err(SymError::InvalidContext("no field variables".into()));
        }
        for f in &self.fields {
            if f.contains('_') {
                return Err(SymError::InvalidContext(format!(
                    "field name `{f}` clashes with jet notation"
                )));
            }
        }
        for i in &independents {
            if i.len() != 1 {
                return Err(SymError::InvalidContext(format!(
                    "independent variable `{i}` must be a single letter"
                )));
            }
        }
        let mut ctx = Context {
            inner: Arc::new(Inner {
                fields: self.fields,
                independents,
                params: self.params,
                generic: self.generic,
                functions: self.functions,
                assumptions: Vec::new(),
            }),
        };
        let mut assumptions = Vec::new();
        for text in self.assumptions {
            let s = ctx.scalar(&text)?;
            if s.is_zero()? {
                return Err(SymError::InvalidContext(format!("assumption `{text}` is identically zero")));
            }
            if !ctx.is_parameter_only(&s) {
                return Err(SymError::InvalidContext(format!(
                    "assumption `{text}` involves more than parameters"
                )));
            }
            assumptions.push((text, s));
        }
        Arc::get_mut(&mut ctx.inner).unwrap().assumptions = assumptions;
        Ok(ctx)
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Context {
    pub fn builder() -> ContextBuilder {
        ContextBuilder::new()
    }

    fn rebuild(&self, f: impl FnOnce(&mut ContextBuilder)) -> Result<Context> {
        let i = &self.inner;
        let mut b = ContextBuilder {
            fields: i.fields.clone(),
            independents: i.independents.clone(),
            params: i.params.clone(),
            generic: i.generic.clone(),
            functions: i.functions.clone(),
            assumptions: i.assumptions.iter().map(|(t, _)| t.clone()).collect(),
        };
        f(&mut b);
        b.build()
    }

    /// Same context with one more generic parameter.
    pub fn with_generic(&self, name: &str) -> Result<Context> {
        if self.classify(name) == Some(SymbolKind::Generic) {
            return Ok(self.clone());
        }
        self.rebuild(|b| b.generic.push(name.to_string()))
    }

    /// Same context with more independent variables.
    pub fn with_independents(&self, names: &[&str]) -> Result<Context> {
        self.rebuild(|b| {
            for n in names {
                if !b.independents.iter().any(|i| i == n) {
                    b.independents.push(n.to_string());
                }
            }
        })
    }

    pub fn n(&self) -> usize {
        self.inner.fields.len()
    }

    pub fn fields(&self) -> &[String] {
        &self.inner.fields
    }

    pub fn independents(&self) -> &[String] {
        &self.inner.independents
    }

    pub fn params(&self) -> &[String] {
        &self.inner.params
    }

    pub fn generics(&self) -> &[String] {
        &self.inner.generic
    }

    pub fn functions(&self) -> &[String] {
        &self.inner.functions
    }

    /// Declared nonzero expressions with their source text.
    pub fn assumptions(&self) -> impl Iterator<Item = (&str, &Scalar)> {
        self.inner.assumptions.iter().map(|(t, s)| (t.as_str(), s))
    }

    pub fn field_var(&self, i: usize) -> Var {
        Var::symbol(&self.inner.fields[i])
    }

    pub fn field_vars(&self) -> Vec<Var> {
        (0..self.n()).map(|i| self.field_var(i)).collect()
    }

    pub fn independent_var(&self, j: usize) -> Var {
        Var::symbol(&self.inner.independents[j])
    }

    /// The first independent variable, conventionally `x`.
    pub fn x(&self) -> Var {
        self.independent_var(0)
    }

    /// Canonical jet name, e.g. `z_xt` for orders `[1, 1]` over `(x, t)`.
    pub fn jet_name(&self, field: usize, orders: &[u32]) -> String {
        let mut s = self.inner.fields[field].clone();
        if orders.iter().all(|&k| k == 0) {
            return s;
        }
        s.push('_');
        for (j, &k) in orders.iter().enumerate() {
            for _ in 0..k {
                s.push_str(&self.inner.independents[j]);
            }
        }
        s
    }

    pub fn jet_var(&self, field: usize, orders: &[u32]) -> Var {
        Var::symbol(&self.jet_name(field, orders))
    }

    /// Jet `u^i_{x…x}` with `k` derivatives in the first independent.
    pub fn x_jet(&self, field: usize, k: u32) -> Var {
        let mut orders = vec![0; self.inner.independents.len()];
        orders[0] = k;
        self.jet_var(field, &orders)
    }

    /// Kind and canonical spelling of a name.
    pub fn resolve(&self, name: &str) -> Option<(SymbolKind, String)> {
        let i = &self.inner;
        if let Some(k) = i.fields.iter().position(|f| f == name) {
            return Some((SymbolKind::Field(k), name.to_string()));
        }
        if let Some(k) = i.independents.iter().position(|f| f == name) {
            return Some((SymbolKind::Independent(k), name.to_string()));
        }
        if i.params.iter().any(|p| p == name) {
            return Some((SymbolKind::Parameter, name.to_string()));
        }
        if i.generic.iter().any(|p| p == name) {
            return Some((SymbolKind::Generic, name.to_string()));
        }
        if i.functions.iter().any(|p| p == name) {
            return Some((SymbolKind::Function, name.to_string()));
        }
        let (base, suffix) = name.split_once('_')?;
        let field = i.fields.iter().position(|f| f == base)?;
        if suffix.is_empty() {
            return None;
        }
        let mut orders = vec![0u32; i.independents.len()];
        for c in suffix.chars() {
            let j = i.independents.iter().position(|x| x.len() == 1 && x.starts_with(c))?;
            orders[j] += 1;
        }
        let canonical = self.jet_name(field, &orders);
        Some((SymbolKind::Jet { field, orders }, canonical))
    }

    pub fn classify(&self, name: &str) -> Option<SymbolKind> {
        self.resolve(name).map(|(k, _)| k)
    }

    pub fn classify_var(&self, v: Var) -> Option<SymbolKind> {
        if !v.is_symbol() {
            return None;
        }
        self.classify(&v.label())
    }

    /// Parse against the declared names.
    pub fn parse(&self, text: &str) -> Result<Expr> {
        parse(text, Some(self))
    }

    /// Parse and normalize, surfacing normalization errors.
    pub fn scalar(&self, text: &str) -> Result<Scalar> {
        self.parse(text)?.normalize().check()
    }

    fn is_parameter_only(&self, s: &Scalar) -> bool {
        s.symbols()
            .into_iter()
            .all(|v| matches!(self.classify_var(v), Some(SymbolKind::Parameter)))
    }

    /// Depends on no field, jet or independent variable.
    pub fn is_field_free(&self, s: &Scalar) -> bool {
        s.symbols().into_iter().all(|v| {
            !matches!(
                self.classify_var(v),
                Some(SymbolKind::Field(_) | SymbolKind::Jet { .. } | SymbolKind::Independent(_))
            )
        })
    }

    /// Total derivative with respect to independent variable `j`, for jets
    /// of any order.
    pub fn total_derivative(&self, e: &Scalar, j: usize) -> Result<Scalar> {
        let e = e.clone().check()?;
        let mut acc = Scalar::zero();
        for v in e.symbols() {
            let dv = match self.classify_var(v) {
                Some(SymbolKind::Field(k)) => {
                    let mut orders = vec![0; self.inner.independents.len()];
                    orders[j] = 1;
                    Scalar::var(self.jet_var(k, &orders))
                }
                Some(SymbolKind::Jet { field, mut orders }) => {
                    orders[j] += 1;
                    Scalar::var(self.jet_var(field, &orders))
                }
                Some(SymbolKind::Independent(k)) if k == j => Scalar::one(),
                _ => continue,
            };
            acc = &acc + &(&e.diff(v) * &dv);
        }
        acc.check()
    }

    /// `D_x` on expressions in `x`, fields and first jets.
    pub fn total_x_derivative(&self, e: &Scalar) -> Result<Scalar> {
        for v in e.symbols() {
            if let Some(SymbolKind::Jet { orders, .. }) = self.classify_var(v) {
                if orders.iter().sum::<u32>() >= 2 {
                    return Err(SymError::JetOrder(v.label().to_string()));
                }
            }
        }
        self.total_derivative(e, 0)
    }

    /// Prove that `s` never vanishes.
    ///
    /// Values depending on fields, jets, independents, generic parameters or
    /// function atoms only need to be nonzero as functions. Values in the
    /// declared parameters alone must equal a rational constant times a
    /// product of declared nonzero expressions.
    pub fn certify_nonzero(&self, s: &Scalar) -> Result<()> {
        if s.is_zero()? {
            return Err(SymError::DivisionByZero);
        }
        let Some(r) = s.as_rat() else {
            return Ok(());
        };
        let free = r.vars().into_iter().any(|v| {
            !v.is_symbol() || !matches!(self.classify_var(v), Some(SymbolKind::Parameter))
        });
        if free {
            return Ok(());
        }
        let mut rest: Poly = r.num().clone();
        for (_, a) in &self.inner.assumptions {
            let Some(ar) = a.as_rat() else { continue };
            for factor in [ar.num(), ar.den()] {
                if factor.is_constant() {
                    continue;
                }
                while let Some(q) = rest.div_exact(factor) {
                    rest = q;
                }
            }
        }
        if rest.is_constant() {
            Ok(())
        } else {
            Err(SymError::Uncertified(rest.to_string()))
        }
    }
}
