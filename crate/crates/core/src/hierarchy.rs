//! Flows generated by operators, Magri recursion and recursion operators.

use std::fmt;

use ndarray::Array2;
use pencil_forge_symcore::{antiderivative, potential, Context, Scalar, SymError, SymbolKind, Substitution};

use crate::operators::{ConstantOp, NonlocalIsometryOp};
use crate::{Error, Result};

fn reject_jets(ctx: &Context, e: &Scalar) -> Result<()> {
    for v in e.symbols() {
        if let Some(SymbolKind::Jet { .. }) = ctx.classify_var(v) {
            return Err(Error::JetNotAllowed(format!("{} in {e}", v.label())));
        }
    }
    Ok(())
}

/// Parse a density `h(x, u)`; jets are rejected.
pub fn parse_density(ctx: &Context, text: &str) -> Result<Scalar> {
    let h = ctx.scalar(text)?;
    reject_jets(ctx, &h)?;
    Ok(h)
}

/// `ψ_j = ∂h/∂u^j`.
pub fn variational_gradient(ctx: &Context, h: &Scalar) -> Result<Vec<Scalar>> {
    reject_jets(ctx, h)?;
    ctx.field_vars()
        .into_iter()
        .map(|v| Ok(h.diff(v).check()?))
        .collect()
}

/// `u^i_t = V^i_j u^j_x + σ^i` with jet-free `V` and `σ`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasilinearFlow {
    pub velocity: Array2<Scalar>,
    pub source: Vec<Scalar>,
}

impl QuasilinearFlow {
    pub fn new(velocity: Array2<Scalar>, source: Vec<Scalar>) -> Result<Self> {
        let (r, c) = velocity.dim();
        if r != c || source.len() != r {
            return Err(Error::Shape(format!(
                "flow has a {r}x{c} velocity matrix and {} source terms",
                source.len()
            )));
        }
        Ok(QuasilinearFlow { velocity, source })
    }

    pub fn zero(n: usize) -> Self {
        QuasilinearFlow {
            velocity: Array2::from_elem((n, n), Scalar::zero()),
            source: vec![Scalar::zero(); n],
        }
    }

    pub fn parse<R, S>(ctx: &Context, velocity: &[R], source: &[S]) -> Result<Self>
    where
        R: AsRef<[S]>,
        S: AsRef<str>,
    {
        let v = crate::diffgeo::parse_matrix(ctx, velocity)?;
        let s = source
            .iter()
            .map(|t| ctx.scalar(t.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        let flow = QuasilinearFlow::new(v, s)?;
        for e in flow.velocity.iter().chain(&flow.source) {
            reject_jets(ctx, e)?;
        }
        Ok(flow)
    }

    pub fn n(&self) -> usize {
        self.source.len()
    }

    pub fn neg(&self) -> QuasilinearFlow {
        QuasilinearFlow {
            velocity: self.velocity.mapv(|e| -e),
            source: self.source.iter().map(|e| -e.clone()).collect(),
        }
    }

    pub fn substitute(&self, sub: &Substitution) -> QuasilinearFlow {
        QuasilinearFlow {
            velocity: self.velocity.mapv(|e| e.substitute(sub)),
            source: self.source.iter().map(|e| e.substitute(sub)).collect(),
        }
    }

    /// Right-hand sides `V^i_j u^j_x + σ^i` as expressions in first jets.
    pub fn rhs(&self, ctx: &Context) -> Vec<Scalar> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut acc = self.source[i].clone();
                for j in 0..n {
                    acc = &acc + &(&self.velocity[[i, j]] * &Scalar::var(ctx.x_jet(j, 1)));
                }
                acc
            })
            .collect()
    }

    /// First entry where the flows differ.
    pub fn difference_witness(&self, other: &QuasilinearFlow) -> Result<Option<String>> {
        if self.n() != other.n() {
            return Ok(Some(format!("flows have {} and {} components", self.n(), other.n())));
        }
        for ((i, j), a) in self.velocity.indexed_iter() {
            let d = a - &other.velocity[[i, j]];
            if !d.is_zero()? {
                return Ok(Some(format!("V^{}_{} differs by {d} (have {a})", i + 1, j + 1)));
            }
        }
        for (i, a) in self.source.iter().enumerate() {
            let d = a - &other.source[i];
            if !d.is_zero()? {
                return Ok(Some(format!("source {} differs by {d} (have {a})", i + 1)));
            }
        }
        Ok(None)
    }

    /// Render as `u_t = ...` lines over the context's field names.
    pub fn display(&self, ctx: &Context) -> String {
        let rhs = self.rhs(ctx);
        ctx.fields()
            .iter()
            .zip(rhs)
            .map(|(f, r)| format!("{f}_t = {r}"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// `B ψ` split into velocity and source.
///
/// The tail `ε f^i ∂_x⁻¹(f^j ψ_j)` is resolved only when the kernel
/// `f^j ψ_j` involves no field, so that its antiderivative in `x` is
/// explicit.
pub fn apply_operator(b: &NonlocalIsometryOp, psi: &[Scalar]) -> Result<QuasilinearFlow> {
    let ctx = b.ctx();
    let n = b.n();
    if psi.len() != n {
        return Err(Error::Shape(format!("covector has {} components, expected {n}", psi.len())));
    }
    for p in psi {
        reject_jets(ctx, p)?;
    }
    if !b.c.is_zero()? {
        return Err(Error::NonlocalUnresolved(format!(
            "curvature tail with c = {} is not supported",
            b.c
        )));
    }
    let vars = ctx.field_vars();
    let x = ctx.x();
    let g = b.metric();
    let velocity = Array2::from_shape_fn((n, n), |(i, k)| {
        let mut acc = Scalar::zero();
        for j in 0..n {
            acc = &acc + &(g.get(i, j) * &psi[j].diff(vars[k]));
            acc = &acc + &(&b.gamma()[[i, j, k]] * &psi[j]);
        }
        acc
    });
    let kernel: Scalar = (0..n).map(|j| b.f.get(j) * &psi[j]).sum();
    let tail = if b.epsilon.is_zero()? || kernel.is_zero()? {
        Scalar::zero()
    } else {
        let on_fields = kernel.symbols().into_iter().any(|v| {
            matches!(ctx.classify_var(v), Some(SymbolKind::Field(_) | SymbolKind::Jet { .. }))
        });
        if on_fields {
            return Err(Error::NonlocalUnresolved(format!("kernel {kernel} depends on the fields")));
        }
        &b.epsilon * &antiderivative(&kernel, x)?
    };
    let source = (0..n)
        .map(|i| {
            let mut acc = b.f.get(i) * &tail;
            for j in 0..n {
                acc = &acc + &(g.get(i, j) * &psi[j].diff(x));
            }
            acc.check()
        })
        .collect::<Result<Vec<_>, _>>()?;
    for e in velocity.iter() {
        e.clone().check()?;
    }
    QuasilinearFlow::new(velocity, source)
}

/// `u^i_t = η^{ij} D_x(∂h/∂u^j)`.
pub fn flow_from_density(ctx: &Context, a: &ConstantOp, h: &Scalar) -> Result<QuasilinearFlow> {
    let n = ctx.n();
    if a.n() != n {
        return Err(Error::Shape("constant operator and context differ in size".into()));
    }
    let grad = variational_gradient(ctx, h)?;
    let vars = ctx.field_vars();
    let x = ctx.x();
    let velocity = Array2::from_shape_fn((n, n), |(i, k)| {
        (0..n).map(|j| &a.upper(i, j) * &grad[j].diff(vars[k])).sum::<Scalar>()
    });
    let source = (0..n)
        .map(|i| (0..n).map(|j| &a.upper(i, j) * &grad[j].diff(x)).sum::<Scalar>())
        .collect();
    QuasilinearFlow::new(velocity, source)
}

/// `h_{k+1}` with `A ∇h_{k+1} = B ∇h_k`, integration constants zero.
pub fn magri_step(a: &ConstantOp, b: &NonlocalIsometryOp, h: &Scalar) -> Result<Scalar> {
    let ctx = b.ctx();
    let n = b.n();
    let flow = apply_operator(b, &variational_gradient(ctx, h)?)?;
    let mut vars = vec![ctx.x()];
    vars.extend(ctx.field_vars());
    // φ^i with D_x φ^i = (Bψ)^i
    let phi = (0..n)
        .map(|i| {
            let mut comps = vec![flow.source[i].clone()];
            comps.extend((0..n).map(|k| flow.velocity[[i, k]].clone()));
            potential(&comps, &vars).map_err(|e| match e {
                SymError::NotClosed { a, b } => Error::NotExact {
                    component: i + 1,
                    reason: format!("mixed derivatives in {a} and {b} disagree"),
                },
                SymError::NotIntegrable { var, reason } => Error::NotExact {
                    component: i + 1,
                    reason: format!("no antiderivative in {var}: {reason}"),
                },
                e => e.into(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let grad: Vec<Scalar> = (0..n)
        .map(|j| (0..n).map(|i| &a.lower(j, i) * &phi[i]).sum::<Scalar>())
        .collect();
    Ok(potential(&grad, &ctx.field_vars())?)
}

/// `dx·∂_x + mult + Σ a ∂_x⁻¹ b`.
#[derive(Clone, Debug, PartialEq)]
pub struct OpSymbol {
    pub dx: Scalar,
    pub mult: Scalar,
    pub nonlocal: Vec<(Scalar, Scalar)>,
}

impl OpSymbol {
    pub fn zero() -> Self {
        OpSymbol { dx: Scalar::zero(), mult: Scalar::zero(), nonlocal: Vec::new() }
    }

    /// Differences in the local part, then in `Σ a(u) b(u')` evaluated on a
    /// renamed copy of the fields.
    pub fn difference_witness(&self, other: &OpSymbol, ctx: &Context) -> Result<Option<String>> {
        let d = &self.dx - &other.dx;
        if !d.is_zero()? {
            return Ok(Some(format!("Dx coefficient differs by {d} (have {})", self.dx)));
        }
        let d = &self.mult - &other.mult;
        if !d.is_zero()? {
            return Ok(Some(format!("multiplication part differs by {d} (have {})", self.mult)));
        }
        let copy = ctx.fields().iter().fold(Substitution::new(), |s, f| {
            s.bind_symbol(f, Scalar::symbol(&format!("{f}__2")))
        });
        let kernel = |pairs: &[(Scalar, Scalar)]| -> Scalar {
            pairs.iter().map(|(a, b)| a * &b.substitute(&copy)).sum()
        };
        let d = &kernel(&self.nonlocal) - &kernel(&other.nonlocal);
        if !d.is_zero()? {
            return Ok(Some(format!("nonlocal part differs by {d}")));
        }
        Ok(None)
    }

    pub fn substitute(&self, sub: &Substitution) -> OpSymbol {
        OpSymbol {
            dx: self.dx.substitute(sub),
            mult: self.mult.substitute(sub),
            nonlocal: self
                .nonlocal
                .iter()
                .map(|(a, b)| (a.substitute(sub), b.substitute(sub)))
                .collect(),
        }
    }
}

fn factor(c: &Scalar, what: &str) -> Option<String> {
    if c.is_structurally_zero() {
        return None;
    }
    if what.is_empty() {
        return Some(c.to_string());
    }
    let s = c.to_string();
    if s == "1" {
        return Some(what.to_string());
    }
    if s == "-1" {
        return Some(format!("-{what}"));
    }
    if s.contains([' ', '/']) {
        Some(format!("({s})*{what}"))
    } else {
        Some(format!("{s}*{what}"))
    }
}

impl fmt::Display for OpSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        parts.extend(factor(&self.dx, "Dx"));
        parts.extend(factor(&self.mult, ""));
        for (a, b) in &self.nonlocal {
            let right = b.to_string();
            let right = if right == "1" {
                String::new()
            } else if right.contains([' ', '/']) {
                format!("*({right})")
            } else {
                format!("*{right}")
            };
            parts.extend(factor(a, &format!("Dx^-1{right}")));
        }
        if parts.is_empty() {
            return f.write_str("0");
        }
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            match p.strip_prefix('-') {
                Some(rest) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                None => {
                    out.push_str(" + ");
                    out.push_str(p);
                }
            }
        }
        f.write_str(&out)
    }
}

/// Matrix of operator symbols followed by a formal trailing `∂_x⁻¹`.
#[derive(Clone, Debug, PartialEq)]
pub struct RecursionOperator {
    pub matrix: Array2<OpSymbol>,
}

impl RecursionOperator {
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn get(&self, i: usize, k: usize) -> &OpSymbol {
        &self.matrix[[i, k]]
    }

    pub fn difference_witness(&self, other: &RecursionOperator, ctx: &Context) -> Result<Option<String>> {
        if self.matrix.dim() != other.matrix.dim() {
            return Ok(Some("recursion operators differ in size".into()));
        }
        for ((i, k), s) in self.matrix.indexed_iter() {
            if let Some(w) = s.difference_witness(&other.matrix[[i, k]], ctx)? {
                return Ok(Some(format!("R^{}_{}: {w}", i + 1, k + 1)));
            }
        }
        Ok(None)
    }

    pub fn substitute(&self, sub: &Substitution) -> RecursionOperator {
        RecursionOperator { matrix: self.matrix.mapv(|s| s.substitute(sub)) }
    }
}

impl fmt::Display for RecursionOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n();
        let cells: Vec<Vec<String>> = (0..n)
            .map(|i| (0..n).map(|k| self.matrix[[i, k]].to_string()).collect())
            .collect();
        let width: Vec<usize> = (0..n)
            .map(|k| cells.iter().map(|r| r[k].chars().count()).max().unwrap_or(0))
            .collect();
        for (i, row) in cells.iter().enumerate() {
            let (open, close) = match (i, n) {
                (_, 1) => ("(", ")"),
                (0, _) => ("/", "\\"),
                (i, n) if i + 1 == n => ("\\", "/"),
                _ => ("|", "|"),
            };
            let body: Vec<String> = row
                .iter()
                .zip(&width)
                .map(|(c, &w)| format!("{c:<w$}"))
                .collect();
            write!(f, "{open} {} {close}", body.join("   "))?;
            if i + 1 == n {
                write!(f, " Dx^-1")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// `R = B ∘ A⁻¹` written as `M ∘ ∂_x⁻¹` with `M^i_k = B^{is} η_{sk}`.
pub fn recursion_operator(a: &ConstantOp, b: &NonlocalIsometryOp) -> Result<RecursionOperator> {
    let ctx = b.ctx();
    let n = b.n();
    if a.n() != n {
        return Err(Error::Shape("operators have different sizes".into()));
    }
    let jets: Vec<Scalar> = (0..n).map(|k| Scalar::var(ctx.x_jet(k, 1))).collect();
    let g = b.metric();
    let c_zero = b.c.is_zero()?;
    let mut matrix = Array2::from_elem((n, n), OpSymbol::zero());
    for i in 0..n {
        for k in 0..n {
            let mut sym = OpSymbol::zero();
            let mut f_tail = Scalar::zero();
            let mut c_tail = Scalar::zero();
            for s in 0..n {
                let e = a.lower(s, k);
                if e.is_structurally_zero() {
                    continue;
                }
                sym.dx = &sym.dx + &(g.get(i, s) * &e);
                let m: Scalar = (0..n).map(|l| &b.gamma()[[i, s, l]] * &jets[l]).sum();
                sym.mult = &sym.mult + &(&m * &e);
                f_tail = &f_tail + &(b.f.get(s) * &e);
                c_tail = &c_tail + &(&jets[s] * &e);
            }
            let lead = &b.epsilon * b.f.get(i);
            if !lead.is_zero()? && !f_tail.is_zero()? {
                sym.nonlocal.push((lead, f_tail));
            }
            if !c_zero && !c_tail.is_zero()? {
                sym.nonlocal.push((&b.c * &jets[i], c_tail));
            }
            sym.dx = sym.dx.check()?;
            sym.mult = sym.mult.check()?;
            matrix[[i, k]] = sym;
        }
    }
    Ok(RecursionOperator { matrix })
}

/// `D_{K1} K2 − D_{K2} K1` for the right-hand sides of two flows.
pub fn commutator(ctx: &Context, f1: &QuasilinearFlow, f2: &QuasilinearFlow) -> Result<Vec<Scalar>> {
    let n = ctx.n();
    if f1.n() != n || f2.n() != n {
        return Err(Error::Shape("flows and context differ in size".into()));
    }
    let k1 = f1.rhs(ctx);
    let k2 = f2.rhs(ctx);
    let dx = |k: &[Scalar]| -> Result<Vec<Scalar>> {
        k.iter().map(|e| Ok(ctx.total_derivative(e, 0)?)).collect()
    };
    let (dk1, dk2) = (dx(&k1)?, dx(&k2)?);
    let fields = ctx.field_vars();
    let jets: Vec<_> = (0..n).map(|j| ctx.x_jet(j, 1)).collect();
    let along = |k: &Scalar, dir: &[Scalar], ddir: &[Scalar]| -> Scalar {
        let mut acc = Scalar::zero();
        for j in 0..n {
            acc = &acc + &(&k.diff(fields[j]) * &dir[j]);
            acc = &acc + &(&k.diff(jets[j]) * &ddir[j]);
        }
        acc
    };
    (0..n)
        .map(|i| {
            let d = &along(&k2[i], &k1, &dk1) - &along(&k1[i], &k2, &dk2);
            Ok(d.check()?)
        })
        .collect()
}

/// First nonzero component of the commutator of two flows.
pub fn commute_witness(ctx: &Context, f1: &QuasilinearFlow, f2: &QuasilinearFlow) -> Result<Option<String>> {
    for (i, e) in commutator(ctx, f1, f2)?.iter().enumerate() {
        if !e.is_zero()? {
            return Ok(Some(format!("component {}: {e}", i + 1)));
        }
    }
    Ok(None)
}

pub fn commute_check(ctx: &Context, f1: &QuasilinearFlow, f2: &QuasilinearFlow) -> Result<bool> {
    Ok(commute_witness(ctx, f1, f2)?.is_none())
}

/// `a^i_t = η^{im} (∂²F/∂a^m ∂a^k)_x`, with `k` 0-based.
pub fn wdvv_flow(ctx: &Context, f: &Scalar, a: &ConstantOp, k: usize) -> Result<QuasilinearFlow> {
    let n = ctx.n();
    if k >= n || a.n() != n {
        return Err(Error::Shape(format!("flow index {} out of range for {n} fields", k + 1)));
    }
    reject_jets(ctx, f)?;
    let vars = ctx.field_vars();
    let fk = f.diff(vars[k]);
    let velocity = Array2::from_shape_fn((n, n), |(i, j)| {
        (0..n)
            .map(|m| &a.upper(i, m) * &fk.diff(vars[m]).diff(vars[j]))
            .sum::<Scalar>()
    });
    QuasilinearFlow::new(velocity, vec![Scalar::zero(); n])
}
