//! First-order Hamiltonian operators of hydrodynamic type.

use ndarray::{Array2, Array3};
use pencil_forge_symcore::{potential, Context, Q, Scalar, SymError, Substitution};

use crate::diffgeo::{
    adjugate, constant_curvature_witness, curvature_of, cyclic_witness_with, determinant,
    killing_witness, levi_civita, metricity_witness, torsion_witness, Metric, VectorField,
};
use crate::numeric;
use crate::report::Report;
use crate::{Error, Result};

/// Constant operator `η^{ij} ∂_x`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantOp {
    eta: Array2<Q>,
    inv: Array2<Q>,
}

impl ConstantOp {
    pub fn new(eta: Array2<Q>) -> Result<Self> {
        let (r, c) = eta.dim();
        if r != c {
            return Err(Error::Shape(format!("constant operator is {r}x{c}")));
        }
        if eta != eta.t() {
            return Err(Error::Shape("constant operator is not symmetric".into()));
        }
        let m = eta.mapv(Scalar::from_q);
        let det = determinant(&m);
        if det.is_zero()? {
            return Err(Error::DegenerateMetric { det: "0".into(), reason: "vanishes identically".into() });
        }
        let inv_det = det.recip();
        let inv = adjugate(&m).mapv(|e| (&e * &inv_det).as_constant().expect("rational entries"));
        Ok(ConstantOp { eta, inv })
    }

    /// `η^{ij} = δ^{i, n+1−j}`.
    pub fn antidiagonal(n: usize) -> Self {
        let eta = Array2::from_shape_fn((n, n), |(i, j)| Q::from_integer(((i + j + 1 == n) as i64).into()));
        ConstantOp::new(eta).expect("antidiagonal matrix is invertible")
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("constant operator rows have unequal length".into()));
        }
        ConstantOp::new(Array2::from_shape_fn((n, n), |(i, j)| Q::from_integer(rows[i][j].into())))
    }

    pub fn n(&self) -> usize {
        self.eta.nrows()
    }

    /// `η^{ij}`.
    pub fn matrix(&self) -> &Array2<Q> {
        &self.eta
    }

    /// `η_{ij}`.
    pub fn inverse(&self) -> &Array2<Q> {
        &self.inv
    }

    pub fn upper(&self, i: usize, j: usize) -> Scalar {
        Scalar::from_q(self.eta[[i, j]].clone())
    }

    pub fn lower(&self, i: usize, j: usize) -> Scalar {
        Scalar::from_q(self.inv[[i, j]].clone())
    }

    pub fn metric(&self, ctx: &Context) -> Result<Metric> {
        Metric::new(ctx, self.eta.mapv(Scalar::from_q))
    }

    pub fn is_antidiagonal(&self) -> bool {
        *self == ConstantOp::antidiagonal(self.n())
    }
}

/// `g^{ij} ∂_x + Γ^{ij}_k u^k_x`.
#[derive(Clone, Debug)]
pub struct LocalFirstOrderOp {
    pub metric: Metric,
    /// `Γ^{ij}_k` at `[[i, j, k]]`.
    pub gamma: Array3<Scalar>,
}

impl LocalFirstOrderOp {
    pub fn new(metric: Metric, gamma: Array3<Scalar>) -> Result<Self> {
        let n = metric.n();
        if gamma.dim() != (n, n, n) {
            return Err(Error::Shape(format!("symbols have shape {:?}, expected {n}^3", gamma.dim())));
        }
        Ok(LocalFirstOrderOp { metric, gamma })
    }

    /// Operator with the Levi-Civita symbols of `metric`.
    pub fn levi_civita(metric: Metric) -> Result<Self> {
        let gamma = levi_civita(&metric)?.upper;
        Ok(LocalFirstOrderOp { metric, gamma })
    }

    pub fn ctx(&self) -> &Context {
        self.metric.ctx()
    }

    pub fn n(&self) -> usize {
        self.metric.n()
    }
}

/// `g^{ij} ∂_x + Γ^{ij}_k u^k_x + c u^i_x ∂_x⁻¹ u^j_x + ε f^i ∂_x⁻¹ f^j`.
#[derive(Clone, Debug)]
pub struct NonlocalIsometryOp {
    pub local: LocalFirstOrderOp,
    pub c: Scalar,
    pub epsilon: Scalar,
    pub f: VectorField,
}

impl NonlocalIsometryOp {
    pub fn new(local: LocalFirstOrderOp, c: Scalar, epsilon: Scalar, f: VectorField) -> Result<Self> {
        let ctx = local.ctx();
        for (name, v) in [("c", &c), ("epsilon", &epsilon)] {
            v.clone().check()?;
            if !ctx.is_field_free(v) {
                return Err(Error::Shape(format!("{name} = {v} depends on the fields")));
            }
        }
        if f.components().len() != local.n() {
            return Err(Error::Shape("isometry has the wrong number of components".into()));
        }
        Ok(NonlocalIsometryOp { local, c, epsilon, f })
    }

    /// Operator built on the Levi-Civita symbols of `metric`.
    pub fn from_metric(metric: Metric, c: Scalar, epsilon: Scalar, f: VectorField) -> Result<Self> {
        NonlocalIsometryOp::new(LocalFirstOrderOp::levi_civita(metric)?, c, epsilon, f)
    }

    pub fn metric(&self) -> &Metric {
        &self.local.metric
    }

    pub fn gamma(&self) -> &Array3<Scalar> {
        &self.local.gamma
    }

    pub fn ctx(&self) -> &Context {
        self.local.ctx()
    }

    pub fn n(&self) -> usize {
        self.local.n()
    }
}

/// First component where two symbol arrays differ.
pub(crate) fn symbols_witness(a: &Array3<Scalar>, b: &Array3<Scalar>) -> Result<Option<String>> {
    for ((i, j, k), x) in a.indexed_iter() {
        let d = x - &b[[i, j, k]];
        if !d.is_zero()? {
            return Ok(Some(format!(
                "Gamma^{{{}{}}}_{} differs by {d} (have {x})",
                i + 1,
                j + 1,
                k + 1
            )));
        }
    }
    Ok(None)
}

/// Symmetric metric, Levi-Civita symbols, flat metric.
pub fn validate_local(op: &LocalFirstOrderOp) -> Result<Report> {
    let g = &op.metric;
    let mut report = Report::new();
    report.record("symmetric metric", g.symmetry_witness());
    let lc = levi_civita(g)?;
    report.record("Levi-Civita connection", symbols_witness(&op.gamma, &lc.upper));
    let flat = match numeric::refute_constant_curvature(g, &Scalar::zero()) {
        Some(w) => Ok(Some(w)),
        None => curvature_of(g, &lc).nonzero_witness(),
    };
    report.record("flat metric", flat);
    Ok(report)
}

/// Conditions for the nonlocal operator to be Hamiltonian: metricity and
/// symmetry of the given connection, constant curvature `c`, `f` Killing
/// and cyclic; when `c = 0` the local part must be a valid local operator.
pub fn validate_nonlocal(op: &NonlocalIsometryOp) -> Result<Report> {
    let g = op.metric();
    let mut report = Report::new();
    report.record("symmetric metric", g.symmetry_witness());
    report.record("metric-compatible connection", metricity_witness(g, op.gamma()));
    report.record("symmetric connection", torsion_witness(g, op.gamma()));
    let lc = levi_civita(g)?;
    // The symbolic curvature is only needed when no point refutes it.
    let refuted = numeric::refute_constant_curvature(g, &op.c);
    let curv = refuted.is_none().then(|| curvature_of(g, &lc));
    let constant = match (&refuted, &curv) {
        (Some(w), _) => Ok(Some(w.clone())),
        (None, Some(curv)) => constant_curvature_witness(curv, &op.c),
        (None, None) => unreachable!(),
    };
    report.record("constant curvature", constant);
    report.record("Killing condition", killing_witness(g, &op.f));
    report.record("cyclic condition", cyclic_witness_with(g, &lc, &op.f));
    if op.c.is_zero()? {
        report.record("Levi-Civita connection", symbols_witness(op.gamma(), &lc.upper));
        let flat = match (refuted, curv) {
            (Some(w), _) => Ok(Some(w)),
            (None, Some(curv)) => curv.nonzero_witness(),
            (None, None) => unreachable!(),
        };
        report.record("flat metric", flat);
    }
    Ok(report)
}

/// Liouville potential `r^{ij}`: `∂r^{ij}/∂u^k = Γ^{ij}_k`, `r + rᵀ = g`.
///
/// Integration constants of the symmetric part are fixed by `g`. The
/// antisymmetric constant makes `r − rᵀ` at `base` agree with the reference
/// matrix when one is given, and vanish there otherwise.
pub fn liouville_potential(
    op: &LocalFirstOrderOp,
    reference: Option<&Array2<Scalar>>,
    base: &[Scalar],
) -> Result<Array2<Scalar>> {
    let n = op.n();
    let vars = op.ctx().field_vars();
    let mut p = Array2::from_elem((n, n), Scalar::zero());
    for i in 0..n {
        for j in 0..n {
            let comps: Vec<Scalar> = (0..n).map(|k| op.gamma[[i, j, k]].clone()).collect();
            p[[i, j]] = potential(&comps, &vars).map_err(|e| match e {
                SymError::NotClosed { a, b } => Error::NotLiouville(format!(
                    "d/d{b} Gamma^{{{i1}{j1}}}_{a} != d/d{a} Gamma^{{{i1}{j1}}}_{b}",
                    i1 = i + 1,
                    j1 = j + 1
                )),
                e => e.into(),
            })?;
        }
    }
    let ctx = op.ctx();
    let mut r = p.clone();
    for i in 0..n {
        for j in 0..n {
            let s = &(op.metric.get(i, j) - &p[[i, j]]) - &p[[j, i]];
            if !ctx.is_field_free(&s) {
                return Err(Error::NotLiouville(format!(
                    "g^{{{}{}}} - r^{{{}{}}} - r^{{{}{}}} = {s} is not constant",
                    i + 1,
                    j + 1,
                    i + 1,
                    j + 1,
                    j + 1,
                    i + 1
                )));
            }
            r[[i, j]] = &r[[i, j]] + &(&s * &Scalar::ratio(1, 2));
        }
    }
    if base.len() != n || reference.is_some_and(|m| m.dim() != (n, n)) {
        return Err(Error::Shape("reference potential or base point has the wrong size".into()));
    }
    let sub = vars
        .iter()
        .zip(base)
        .fold(Substitution::new(), |s, (&v, b)| s.bind(v, b.clone()));
    for i in 0..n {
        for j in i + 1..n {
            let want = match reference {
                Some(m) => &m[[i, j]] - &m[[j, i]],
                None => Scalar::zero(),
            };
            let have = &r[[i, j]] - &r[[j, i]];
            let a = (&(&want - &have).substitute(&sub) * &Scalar::ratio(1, 2)).check()?;
            r[[i, j]] = &r[[i, j]] + &a;
            r[[j, i]] = &r[[j, i]] - &a;
        }
    }
    for e in r.iter() {
        e.clone().check()?;
    }
    Ok(r)
}

/// Whether `g^{ij} = η^{is}∂_s H^j + η^{js}∂_s H^i` and
/// `Γ^{ij}_k = η^{is}∂_s∂_k H^j` for the given potentials.
pub fn h_potential_witness(op: &LocalFirstOrderOp, eta: &ConstantOp, h: &[Scalar]) -> Result<Option<String>> {
    let n = op.n();
    if h.len() != n || eta.n() != n {
        return Err(Error::Shape(format!("expected {n} potentials")));
    }
    let vars = op.ctx().field_vars();
    let dh: Vec<Vec<Scalar>> = h.iter().map(|hj| vars.iter().map(|&v| hj.diff(v)).collect()).collect();
    // η^{is} ∂_s H^j
    let a = Array2::from_shape_fn((n, n), |(i, j)| {
        (0..n).map(|s| &eta.upper(i, s) * &dh[j][s]).sum::<Scalar>()
    });
    for i in 0..n {
        for j in i..n {
            let e = &(&a[[i, j]] + &a[[j, i]]) - op.metric.get(i, j);
            if !e.is_zero()? {
                return Ok(Some(format!("metric entry g^{{{}{}}} differs by {e}", i + 1, j + 1)));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for (k, &v) in vars.iter().enumerate() {
                let e = &a[[i, j]].diff(v) - &op.gamma[[i, j, k]];
                if !e.is_zero()? {
                    return Ok(Some(format!("Gamma^{{{}{}}}_{} differs by {e}", i + 1, j + 1, k + 1)));
                }
            }
        }
    }
    Ok(None)
}

pub fn h_potential_check(op: &LocalFirstOrderOp, eta: &ConstantOp, h: &[Scalar]) -> Result<bool> {
    Ok(h_potential_witness(op, eta, h)?.is_none())
}
