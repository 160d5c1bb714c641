//! Pencils `g + λg̃` of contravariant metrics.

use ndarray::Array2;
use pencil_forge_symcore::{Context, Scalar, Var};

use crate::diffgeo::{curvature_of, killing_witness, levi_civita, Connection, Curvature, Metric};
use crate::numeric::{refute_pencil, PencilLevel};
use crate::operators::{symbols_witness, ConstantOp, NonlocalIsometryOp};
use crate::report::Report;
use crate::{Error, Result};

/// Two metrics over the same fields and the combination `g + λg̃` with a
/// fresh generic parameter `λ`.
#[derive(Clone, Debug)]
pub struct Pencil {
    g: Metric,
    gt: Metric,
    lambda: Var,
    combined: Metric,
}

fn fresh_lambda(ctx: &Context) -> String {
    let mut name = String::from("lambda");
    while ctx.classify(&name).is_some() {
        name.push('_');
    }
    name
}

impl Pencil {
    pub fn new(g: &Metric, gt: &Metric) -> Result<Self> {
        if g.ctx().fields() != gt.ctx().fields() {
            return Err(Error::Shape("pencil metrics live over different fields".into()));
        }
        let name = fresh_lambda(g.ctx());
        let ctx = g.ctx().with_generic(&name)?;
        let lambda = Var::symbol(&name);
        let l = Scalar::var(lambda);
        let sum: Array2<Scalar> = Array2::from_shape_fn(g.entries().dim(), |(i, j)| {
            g.get(i, j) + &(&l * gt.get(i, j))
        });
        let combined = Metric::new(&ctx, sum).map_err(|e| match e {
            Error::DegenerateMetric { .. } => Error::DegeneratePencil { lambda: name.clone() },
            e => e,
        })?;
        Ok(Pencil {
            g: g.in_context(&ctx)?,
            gt: gt.in_context(&ctx)?,
            lambda,
            combined,
        })
    }

    pub fn lambda(&self) -> Var {
        self.lambda
    }

    pub fn combined(&self) -> &Metric {
        &self.combined
    }

    fn refute(&self, level: PencilLevel) -> Option<String> {
        refute_pencil(&self.g, &self.gt, self.lambda, level)
    }

    fn connections(&self) -> Result<[Connection; 3]> {
        Ok([levi_civita(&self.g)?, levi_civita(&self.gt)?, levi_civita(&self.combined)?])
    }

    /// First symbol where `Γ_λ ≠ Γ + λΓ̃`.
    pub fn almost_compatible_witness(&self) -> Result<Option<String>> {
        if let Some(w) = self.refute(PencilLevel::Affine) {
            return Ok(Some(w));
        }
        let [c, ct, cl] = self.connections()?;
        self.affine_witness(&c, &ct, &cl)
    }

    fn affine_witness(&self, c: &Connection, ct: &Connection, cl: &Connection) -> Result<Option<String>> {
        let l = Scalar::var(self.lambda);
        let want = ndarray::Zip::from(&c.upper)
            .and(&ct.upper)
            .map_collect(|a, b| a + &(&l * b));
        Ok(symbols_witness(&cl.upper, &want)?.map(|w| format!("pencil connection: {w}")))
    }

    /// Almost compatibility and `R_λ = R + λR̃`.
    pub fn compatibility_witness(&self) -> Result<Option<String>> {
        Ok(self.curvatures()?.err())
    }

    /// Compatibility and `R_λ = 0` for every `λ`.
    pub fn flat_pencil_witness(&self) -> Result<Option<String>> {
        if let Some(w) = self.refute(PencilLevel::Flat) {
            return Ok(Some(w));
        }
        match self.curvatures()? {
            Err(w) => Ok(Some(w)),
            Ok(rl) => Ok(rl.nonzero_witness()?.map(|w| format!("pencil is not flat: {w}"))),
        }
    }

    /// Curvature of `g + λg̃`, or the first obstruction to compatibility.
    fn curvatures(&self) -> Result<std::result::Result<Curvature, String>> {
        if let Some(w) = self.refute(PencilLevel::Splitting) {
            return Ok(Err(w));
        }
        let [c, ct, cl] = self.connections()?;
        if let Some(w) = self.affine_witness(&c, &ct, &cl)? {
            return Ok(Err(w));
        }
        let r = curvature_of(&self.g, &c);
        let rt = curvature_of(&self.gt, &ct);
        let rl = curvature_of(&self.combined, &cl);
        match splitting_witness(&r, &rt, &rl, self.lambda)? {
            Some(w) => Ok(Err(w)),
            None => Ok(Ok(rl)),
        }
    }
}

fn splitting_witness(r: &Curvature, rt: &Curvature, rl: &Curvature, lambda: Var) -> Result<Option<String>> {
    let l = Scalar::var(lambda);
    for ((i, j, k, m), x) in rl.raised.indexed_iter() {
        if k >= m {
            continue;
        }
        let d = &(x - &r.raised[[i, j, k, m]]) - &(&l * &rt.raised[[i, j, k, m]]);
        if !d.is_zero()? {
            return Ok(Some(format!(
                "curvature splitting fails at R^{{{}{}}}_{{{}{}}}: {d}",
                i + 1,
                j + 1,
                k + 1,
                m + 1
            )));
        }
    }
    Ok(None)
}

pub fn almost_compatible(g: &Metric, gt: &Metric) -> Result<bool> {
    Ok(Pencil::new(g, gt)?.almost_compatible_witness()?.is_none())
}

pub fn compatible(g: &Metric, gt: &Metric) -> Result<bool> {
    Ok(Pencil::new(g, gt)?.compatibility_witness()?.is_none())
}

/// Compatibility of `η ∂_x` with a nonlocal operator whose tail is built on
/// an isometry of both metrics: flat pencil and `f` Killing for `η` and `g`.
pub fn pair_check(a: &ConstantOp, b: &NonlocalIsometryOp) -> Result<Report> {
    let ctx = b.ctx();
    if a.n() != b.n() {
        return Err(Error::Shape("operators have different sizes".into()));
    }
    let eta = a.metric(ctx)?;
    let mut report = Report::new();
    report.record(
        "pencil compatibility",
        Pencil::new(&eta, b.metric()).and_then(|p| p.flat_pencil_witness()),
    );
    report.record("Killing for eta", killing_witness(&eta, &b.f));
    report.record("Killing for g", killing_witness(b.metric(), &b.f));
    Ok(report)
}
