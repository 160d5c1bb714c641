//! Levi-Civita connection, curvature, Killing and cyclic conditions for
//! contravariant metrics given in flat-coordinate form.
//!
//! Index conventions:
//!
//! * `Γ^i_{jk}` from the covariant metric by the usual Christoffel formula,
//! * `Γ^{ij}_k = −g^{is} Γ^j_{sk}`,
//! * `R^i_{jkl} = ∂_k Γ^i_{lj} − ∂_l Γ^i_{kj} + Γ^i_{ks} Γ^s_{lj} − Γ^i_{ls} Γ^s_{kj}`,
//! * `R^{ij}_{kl} = g^{js} R^i_{skl}`, so that a metric of constant
//!   sectional curvature `c` has `R^{ij}_{kl} = c(δ^i_k δ^j_l − δ^i_l δ^j_k)`.
//!
//! Witness strings use 1-based indices.

use ndarray::{Array2, Array3, Array4};
use pencil_forge_symcore::{Context, Scalar, SymError, Substitution, Var};

use crate::{Error, Result};

/// Determinant by cofactor expansion.
pub fn determinant(m: &Array2<Scalar>) -> Scalar {
    let n = m.nrows();
    match n {
        0 => Scalar::one(),
        1 => m[[0, 0]].clone(),
        2 => &(&m[[0, 0]] * &m[[1, 1]]) - &(&m[[0, 1]] * &m[[1, 0]]),
        _ => (0..n)
            .filter(|&j| !m[[0, j]].is_structurally_zero())
            .map(|j| {
                let term = &m[[0, j]] * &determinant(&minor(m, 0, j));
                if j % 2 == 0 {
                    term
                } else {
                    -term
                }
            })
            .sum(),
    }
}

fn minor(m: &Array2<Scalar>, row: usize, col: usize) -> Array2<Scalar> {
    let n = m.nrows();
    Array2::from_shape_fn((n - 1, n - 1), |(i, j)| {
        let i = if i < row { i } else { i + 1 };
        let j = if j < col { j } else { j + 1 };
        m[[i, j]].clone()
    })
}

/// Transposed cofactor matrix, `m · adj(m) = det(m)·1`.
pub fn adjugate(m: &Array2<Scalar>) -> Array2<Scalar> {
    let n = m.nrows();
    if n == 1 {
        return Array2::from_elem((1, 1), Scalar::one());
    }
    Array2::from_shape_fn((n, n), |(i, j)| {
        let c = determinant(&minor(m, j, i));
        if (i + j) % 2 == 0 {
            c
        } else {
            -c
        }
    })
}

/// A nondegenerate contravariant metric `g^{ij}` over a context.
#[derive(Clone, Debug)]
pub struct Metric {
    ctx: Context,
    g: Array2<Scalar>,
    det: Scalar,
}

impl Metric {
    /// Checks the shape and that the determinant is certified nonzero under
    /// the context's assumptions. Symmetry is left to the validators.
    pub fn new(ctx: &Context, g: Array2<Scalar>) -> Result<Self> {
        let n = ctx.n();
        if g.dim() != (n, n) {
            let (r, c) = g.dim();
            return Err(Error::Shape(format!("metric is {r}x{c}, context has {n} fields")));
        }
        for e in g.iter() {
            e.clone().check()?;
        }
        let det = determinant(&g);
        match ctx.certify_nonzero(&det) {
            Ok(()) => {}
            Err(SymError::DivisionByZero) => {
                return Err(Error::DegenerateMetric {
                    det: "0".into(),
                    reason: "vanishes identically".into(),
                })
            }
            Err(SymError::Uncertified(_)) => {
                return Err(Error::DegenerateMetric {
                    det: det.to_string(),
                    reason: "is not certified nonzero by the declared assumptions".into(),
                })
            }
            Err(e) => return Err(e.into()),
        }
        Ok(Metric { ctx: ctx.clone(), g, det })
    }

    /// Parse row-major entry texts.
    pub fn parse<R, S>(ctx: &Context, rows: &[R]) -> Result<Self>
    where
        R: AsRef<[S]>,
        S: AsRef<str>,
    {
        Metric::new(ctx, parse_matrix(ctx, rows)?)
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.g.nrows()
    }

    pub fn entries(&self) -> &Array2<Scalar> {
        &self.g
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.g[[i, j]]
    }

    pub fn determinant(&self) -> &Scalar {
        &self.det
    }

    /// Covariant metric `g_{ij}`.
    pub fn inverse(&self) -> Array2<Scalar> {
        let inv = self.det.recip();
        adjugate(&self.g).mapv(|e| &e * &inv)
    }

    /// First pair `(i, j)` with `g^{ij} ≠ g^{ji}`.
    pub fn symmetry_witness(&self) -> Result<Option<String>> {
        let n = self.n();
        for i in 0..n {
            for j in i + 1..n {
                let d = &self.g[[i, j]] - &self.g[[j, i]];
                if !d.is_zero()? {
                    return Ok(Some(format!("g^{{{}{}}} - g^{{{}{}}} = {d}", i + 1, j + 1, j + 1, i + 1)));
                }
            }
        }
        Ok(None)
    }

    pub fn is_symmetric(&self) -> Result<bool> {
        Ok(self.symmetry_witness()?.is_none())
    }

    /// Same entries over another context with the same fields.
    pub fn in_context(&self, ctx: &Context) -> Result<Metric> {
        Metric::new(ctx, self.g.clone())
    }

    pub fn substitute(&self, ctx: &Context, sub: &Substitution) -> Result<Metric> {
        Metric::new(ctx, self.g.mapv(|e| e.substitute(sub)))
    }
}

pub(crate) fn parse_matrix<R, S>(ctx: &Context, rows: &[R]) -> Result<Array2<Scalar>>
where
    R: AsRef<[S]>,
    S: AsRef<str>,
{
    let n = rows.len();
    let mut out = Array2::from_elem((n, n), Scalar::zero());
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_ref();
        if row.len() != n {
            return Err(Error::Shape(format!("row {} has {} entries, expected {n}", i + 1, row.len())));
        }
        for (j, text) in row.iter().enumerate() {
            out[[i, j]] = ctx.scalar(text.as_ref())?;
        }
    }
    Ok(out)
}

/// Vector field `f^i(u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField(Vec<Scalar>);

impl VectorField {
    pub fn new(ctx: &Context, components: Vec<Scalar>) -> Result<Self> {
        if components.len() != ctx.n() {
            return Err(Error::Shape(format!(
                "vector field has {} components, context has {} fields",
                components.len(),
                ctx.n()
            )));
        }
        for c in &components {
            c.clone().check()?;
        }
        Ok(VectorField(components))
    }

    pub fn parse<S: AsRef<str>>(ctx: &Context, components: &[S]) -> Result<Self> {
        let cs = components
            .iter()
            .map(|t| ctx.scalar(t.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        VectorField::new(ctx, cs)
    }

    pub fn components(&self) -> &[Scalar] {
        &self.0
    }

    pub fn get(&self, i: usize) -> &Scalar {
        &self.0[i]
    }

    pub fn scale(&self, k: &Scalar) -> VectorField {
        VectorField(self.0.iter().map(|c| c * k).collect())
    }

    pub fn substitute(&self, sub: &Substitution) -> VectorField {
        VectorField(self.0.iter().map(|c| c.substitute(sub)).collect())
    }
}

/// Contravariant symbols `Γ^{ij}_k` (`upper[[i, j, k]]`) together with
/// `Γ^i_{jk}` (`lower[[i, j, k]]`).
#[derive(Clone, Debug)]
pub struct Connection {
    pub upper: Array3<Scalar>,
    pub lower: Array3<Scalar>,
}

impl Connection {
    /// Lower a given set of contravariant symbols: `Γ^j_{sk} = −g_{si} Γ^{ij}_k`.
    pub fn from_upper(g: &Metric, upper: Array3<Scalar>) -> Connection {
        let n = g.n();
        let low = g.inverse();
        let lower = Array3::from_shape_fn((n, n, n), |(j, s, k)| {
            -(0..n).map(|i| &low[[s, i]] * &upper[[i, j, k]]).sum::<Scalar>()
        });
        Connection { upper, lower }
    }
}

fn partials(ctx: &Context) -> Vec<Var> {
    ctx.field_vars()
}

/// Levi-Civita connection of `g`.
pub fn levi_civita(g: &Metric) -> Result<Connection> {
    let n = g.n();
    let vars = partials(g.ctx());
    let low = g.inverse();
    // ∂_k g_{ij} = −g_{ia} ∂_k g^{ab} g_{bj}
    let dlow: Vec<Array2<Scalar>> = vars
        .iter()
        .map(|&v| {
            let dg = g.entries().mapv(|e| e.diff(v));
            Array2::from_shape_fn((n, n), |(i, j)| {
                let mut acc = Scalar::zero();
                for a in 0..n {
                    for b in 0..n {
                        if dg[[a, b]].is_structurally_zero() {
                            continue;
                        }
                        acc = &acc - &(&(&low[[i, a]] * &dg[[a, b]]) * &low[[b, j]]);
                    }
                }
                acc
            })
        })
        .collect();
    let half = Scalar::ratio(1, 2);
    let first = Array3::from_shape_fn((n, n, n), |(s, j, k)| {
        &half * &(&(&dlow[j][[s, k]] + &dlow[k][[s, j]]) - &dlow[s][[j, k]])
    });
    let lower = Array3::from_shape_fn((n, n, n), |(i, j, k)| {
        (0..n).map(|s| g.get(i, s) * &first[[s, j, k]]).sum::<Scalar>()
    });
    let upper = Array3::from_shape_fn((n, n, n), |(i, j, k)| {
        -(0..n).map(|s| g.get(i, s) * &lower[[j, s, k]]).sum::<Scalar>()
    });
    for e in upper.iter().chain(lower.iter()) {
        e.clone().check()?;
    }
    Ok(Connection { upper, lower })
}

/// Riemann tensor in both index positions.
#[derive(Clone, Debug)]
pub struct Curvature {
    /// `R^i_{jkl}` at `[[i, j, k, l]]`.
    pub mixed: Array4<Scalar>,
    /// `R^{ij}_{kl}` at `[[i, j, k, l]]`.
    pub raised: Array4<Scalar>,
}

impl Curvature {
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> &Scalar {
        &self.raised[[i, j, k, l]]
    }

    /// First nonzero `R^{ij}_{kl}` with `k < l`.
    pub fn nonzero_witness(&self) -> Result<Option<String>> {
        let n = self.raised.dim().0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in k + 1..n {
                        let r = &self.raised[[i, j, k, l]];
                        if !r.is_zero()? {
                            return Ok(Some(format!("{} = {r}", label(i, j, k, l))));
                        }
                    }
                }
            }
        }
        Ok(None)
    }
}

fn label(i: usize, j: usize, k: usize, l: usize) -> String {
    format!("R^{{{}{}}}_{{{}{}}}", i + 1, j + 1, k + 1, l + 1)
}

pub fn riemann(g: &Metric) -> Result<Curvature> {
    Ok(curvature_of(g, &levi_civita(g)?))
}

/// Curvature of a given connection, raised with `g`.
pub fn curvature_of(g: &Metric, conn: &Connection) -> Curvature {
    let n = g.n();
    let vars = partials(g.ctx());
    let gam = &conn.lower;
    let dgam: Vec<Array3<Scalar>> = vars.iter().map(|&v| gam.mapv(|e| e.diff(v))).collect();
    let mut mixed = Array4::from_elem((n, n, n, n), Scalar::zero());
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in k + 1..n {
                    let mut r = &dgam[k][[i, l, j]] - &dgam[l][[i, k, j]];
                    for s in 0..n {
                        r = &r + &(&gam[[i, k, s]] * &gam[[s, l, j]]);
                        r = &r - &(&gam[[i, l, s]] * &gam[[s, k, j]]);
                    }
                    mixed[[i, j, l, k]] = -r.clone();
                    mixed[[i, j, k, l]] = r;
                }
            }
        }
    }
    let raised = Array4::from_shape_fn((n, n, n, n), |(i, j, k, l)| {
        if k == l {
            return Scalar::zero();
        }
        (0..n)
            .map(|s| g.get(j, s) * &mixed[[i, s, k, l]])
            .sum::<Scalar>()
    });
    Curvature { mixed, raised }
}

/// First nonzero curvature component, if any.
pub fn flatness_witness(g: &Metric) -> Result<Option<String>> {
    if let Some(w) = crate::numeric::refute_constant_curvature(g, &Scalar::zero()) {
        return Ok(Some(w));
    }
    riemann(g)?.nonzero_witness()
}

pub fn is_flat(g: &Metric) -> Result<bool> {
    Ok(flatness_witness(g)?.is_none())
}

/// Residual `R^{ij}_{kl} − c(δ^i_k δ^j_l − δ^i_l δ^j_k)` for a given `c`.
pub fn constant_curvature_witness(curv: &Curvature, c: &Scalar) -> Result<Option<String>> {
    let n = curv.raised.dim().0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in k + 1..n {
                    let delta = (i == k && j == l) as i64 - (i == l && j == k) as i64;
                    let r = &curv.raised[[i, j, k, l]] - &(c * &Scalar::from_int(delta));
                    if !r.is_zero()? {
                        return Ok(Some(format!(
                            "{} - ({c})*({delta}) = {r}",
                            label(i, j, k, l)
                        )));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// The constant `c` with `R^{ij}_{kl} = c(δ^i_k δ^j_l − δ^i_l δ^j_k)`, if any.
pub fn constant_curvature(g: &Metric) -> Result<Option<Scalar>> {
    let curv = riemann(g)?;
    if g.n() < 2 {
        return Ok(Some(Scalar::zero()));
    }
    let c = curv.raised[[0, 1, 0, 1]].clone();
    if !g.ctx().is_field_free(&c) {
        return Ok(None);
    }
    Ok(constant_curvature_witness(&curv, &c)?.is_none().then_some(c))
}

/// Lie derivative of the contravariant metric along `f`.
pub fn lie_derivative(g: &Metric, f: &VectorField) -> Array2<Scalar> {
    let n = g.n();
    let vars = partials(g.ctx());
    let df: Vec<Vec<Scalar>> = (0..n)
        .map(|i| vars.iter().map(|&v| f.get(i).diff(v)).collect())
        .collect();
    Array2::from_shape_fn((n, n), |(i, j)| {
        let mut acc = Scalar::zero();
        for k in 0..n {
            acc = &acc + &(f.get(k) * &g.get(i, j).diff(vars[k]));
            acc = &acc - &(g.get(k, j) * &df[i][k]);
            acc = &acc - &(g.get(i, k) * &df[j][k]);
        }
        acc
    })
}

/// First nonzero entry of the Lie derivative of `g` along `f`.
pub fn killing_witness(g: &Metric, f: &VectorField) -> Result<Option<String>> {
    let l = lie_derivative(g, f);
    let n = g.n();
    for i in 0..n {
        for j in i..n {
            if !l[[i, j]].is_zero()? {
                return Ok(Some(format!("(L_f g)^{{{}{}}} = {}", i + 1, j + 1, l[[i, j]])));
            }
        }
    }
    Ok(None)
}

pub fn killing_check(g: &Metric, f: &VectorField) -> Result<bool> {
    Ok(killing_witness(g, f)?.is_none())
}

/// `∇^i f^k = g^{is}(∂_s f^k + Γ^k_{sm} f^m)` at `[[i, k]]`.
fn raised_covariant_derivative(g: &Metric, conn: &Connection, f: &VectorField) -> Array2<Scalar> {
    let n = g.n();
    let vars = partials(g.ctx());
    let nabla = Array2::from_shape_fn((n, n), |(s, k)| {
        let mut acc = f.get(k).diff(vars[s]);
        for m in 0..n {
            acc = &acc + &(&conn.lower[[k, s, m]] * f.get(m));
        }
        acc
    });
    Array2::from_shape_fn((n, n), |(i, k)| {
        (0..n).map(|s| g.get(i, s) * &nabla[[s, k]]).sum::<Scalar>()
    })
}

/// First `(i, j, k)` where `f^j ∇^i f^k + f^k ∇^j f^i + f^i ∇^k f^j ≠ 0`.
pub fn cyclic_witness_with(g: &Metric, conn: &Connection, f: &VectorField) -> Result<Option<String>> {
    let n = g.n();
    let d = raised_covariant_derivative(g, conn, f);
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let e = &(&(f.get(j) * &d[[i, k]]) + &(f.get(k) * &d[[j, i]])) + &(f.get(i) * &d[[k, j]]);
                if !e.is_zero()? {
                    return Ok(Some(format!("cyclic sum at ({}, {}, {}) = {e}", i + 1, j + 1, k + 1)));
                }
            }
        }
    }
    Ok(None)
}

pub fn cyclic_witness(g: &Metric, f: &VectorField) -> Result<Option<String>> {
    cyclic_witness_with(g, &levi_civita(g)?, f)
}

pub fn cyclic_check(g: &Metric, f: &VectorField) -> Result<bool> {
    Ok(cyclic_witness(g, f)?.is_none())
}

/// First nonzero `∇_k g^{ij} = ∂_k g^{ij} − Γ^{ij}_k − Γ^{ji}_k`.
pub fn metricity_witness(g: &Metric, upper: &Array3<Scalar>) -> Result<Option<String>> {
    let n = g.n();
    let vars = partials(g.ctx());
    for i in 0..n {
        for j in i..n {
            for (k, &v) in vars.iter().enumerate() {
                let e = &(&g.get(i, j).diff(v) - &upper[[i, j, k]]) - &upper[[j, i, k]];
                if !e.is_zero()? {
                    return Ok(Some(format!("nabla_{} g^{{{}{}}} = {e}", k + 1, i + 1, j + 1)));
                }
            }
        }
    }
    Ok(None)
}

/// Torsion in contravariant form: first `g^{is}Γ^{jk}_s − g^{js}Γ^{ik}_s ≠ 0`.
pub fn torsion_witness(g: &Metric, upper: &Array3<Scalar>) -> Result<Option<String>> {
    let n = g.n();
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                let mut e = Scalar::zero();
                for s in 0..n {
                    e = &e + &(g.get(i, s) * &upper[[j, k, s]]);
                    e = &e - &(g.get(j, s) * &upper[[i, k, s]]);
                }
                if !e.is_zero()? {
                    return Ok(Some(format!("torsion at ({}, {}, {}) = {e}", i + 1, j + 1, k + 1)));
                }
            }
        }
    }
    Ok(None)
}

/// First nonzero `R^i_{jkl} + R^i_{klj} + R^i_{ljk}`.
pub fn bianchi_witness(curv: &Curvature) -> Result<Option<String>> {
    let r = &curv.mixed;
    let n = r.dim().0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let e = &(&r[[i, j, k, l]] + &r[[i, k, l, j]]) + &r[[i, l, j, k]];
                    if !e.is_zero()? {
                        return Ok(Some(format!("Bianchi sum at ({}, {}, {}, {}) = {e}", i + 1, j + 1, k + 1, l + 1)));
                    }
                }
            }
        }
    }
    Ok(None)
}
