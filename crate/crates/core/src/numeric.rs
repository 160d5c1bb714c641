//! Exact curvature at random rational points.
//!
//! Used to refute identities before attempting the symbolic proof: a
//! nonzero value at a point where everything is defined shows the identity
//! fails, whereas a zero proves nothing and the symbolic check follows.

use pencil_forge_symcore::point::{Point, Value};
use pencil_forge_symcore::{Scalar, Var};

use crate::diffgeo::Metric;

/// Points tried before giving up on a refutation.
const POINTS: u64 = 3;
const SEED: u64 = 0x51ab_1e5e_ed00;

type Mat = Vec<Vec<Value>>;

fn zeros(n: usize) -> Mat {
    vec![vec![Value::zero(); n]; n]
}

fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = zeros(n);
    for (i, row) in out.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            for s in 0..n {
                *e = &*e + &(&a[i][s] * &b[s][j]);
            }
        }
    }
    out
}

fn scale_add(a: &Mat, b: &Mat, k: &Value) -> Mat {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + &(k * q)).collect())
        .collect()
}

fn neg(a: &Mat) -> Mat {
    a.iter().map(|r| r.iter().map(|e| -e).collect()).collect()
}

fn add(a: &Mat, b: &Mat) -> Mat {
    scale_add(a, b, &Value::one())
}

/// Gauss-Jordan inverse; undefined entries on a singular matrix.
fn inverse(m: &Mat) -> Option<Mat> {
    let n = m.len();
    let mut a: Mat = m.clone();
    let mut inv = zeros(n);
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = Value::one();
    }
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r][col].is_zero() == Some(false))?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].recip();
        for j in 0..n {
            a[col][j] = &a[col][j] * &p;
            inv[col][j] = &inv[col][j] * &p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r][col].clone();
            if f.is_zero() == Some(true) {
                continue;
            }
            for j in 0..n {
                a[r][j] = &a[r][j] - &(&f * &a[col][j]);
                inv[r][j] = &inv[r][j] - &(&f * &inv[col][j]);
            }
        }
    }
    Some(inv)
}

/// Contravariant metric with first and second partial derivatives at a
/// point.
pub(crate) struct MetricJet {
    g: Mat,
    dg: Vec<Mat>,
    ddg: Vec<Vec<Mat>>,
}

impl MetricJet {
    pub(crate) fn at(metric: &Metric, point: &mut Point) -> MetricJet {
        let n = metric.n();
        let vars = metric.ctx().field_vars();
        let mut eval = |f: &dyn Fn(&Scalar) -> Scalar| -> Mat {
            (0..n)
                .map(|i| (0..n).map(|j| point.eval(&f(metric.get(i, j)))).collect())
                .collect()
        };
        let g = eval(&|e| e.clone());
        let dg = vars.iter().map(|&v| eval(&|e| e.diff(v))).collect();
        let ddg = vars
            .iter()
            .map(|&a| vars.iter().map(|&b| eval(&|e| e.diff(a).diff(b))).collect())
            .collect();
        MetricJet { g, dg, ddg }
    }

    /// `self + k·other`.
    pub(crate) fn combine(&self, other: &MetricJet, k: &Value) -> MetricJet {
        MetricJet {
            g: scale_add(&self.g, &other.g, k),
            dg: self.dg.iter().zip(&other.dg).map(|(a, b)| scale_add(a, b, k)).collect(),
            ddg: self
                .ddg
                .iter()
                .zip(&other.ddg)
                .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| scale_add(a, b, k)).collect())
                .collect(),
        }
    }
}

/// Connection and curvature values at one point, same index layout as the
/// symbolic [`crate::diffgeo::Connection`] and [`crate::diffgeo::Curvature`].
pub(crate) struct PointGeometry {
    /// `Γ^{ij}_k` at `[i][j][k]`.
    pub upper: Vec<Vec<Vec<Value>>>,
    /// `R^{ij}_{kl}` at `[i][j][k][l]`.
    pub raised: Vec<Vec<Vec<Vec<Value>>>>,
}

impl PointGeometry {
    /// `None` when the metric is singular or some quantity is undefined at
    /// the point.
    pub(crate) fn of(jet: &MetricJet) -> Option<PointGeometry> {
        let n = jet.g.len();
        let g = &jet.g;
        let c = inverse(g)?;
        // ∂_k g_{ij} = −(g_cov ∂_k g g_cov)_{ij}
        let dc: Vec<Mat> = jet.dg.iter().map(|d| neg(&matmul(&matmul(&c, d), &c))).collect();
        // ∂_k∂_l g_cov = −(∂_l g_cov ∂_k g g_cov + g_cov ∂_k∂_l g g_cov + g_cov ∂_k g ∂_l g_cov)
        let ddc: Vec<Vec<Mat>> = (0..n)
            .map(|k| {
                (0..n)
                    .map(|l| {
                        let a = matmul(&matmul(&dc[l], &jet.dg[k]), &c);
                        let b = matmul(&matmul(&c, &jet.ddg[k][l]), &c);
                        let d = matmul(&matmul(&c, &jet.dg[k]), &dc[l]);
                        neg(&add(&add(&a, &b), &d))
                    })
                    .collect()
            })
            .collect();
        let half = Value::from_q(pencil_forge_symcore::Q::new(1.into(), 2.into()));
        // first[s][j][k] = ½(∂_j g_{sk} + ∂_k g_{sj} − ∂_s g_{jk}) and its ∂_l
        let first = |s: usize, j: usize, k: usize| -> Value {
            &half * &(&(&dc[j][s][k] + &dc[k][s][j]) - &dc[s][j][k])
        };
        let dfirst = |l: usize, s: usize, j: usize, k: usize| -> Value {
            &half * &(&(&ddc[l][j][s][k] + &ddc[l][k][s][j]) - &ddc[l][s][j][k])
        };
        let mut lower = vec![vec![vec![Value::zero(); n]; n]; n];
        let mut dlower = vec![vec![vec![vec![Value::zero(); n]; n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut v = Value::zero();
                    for s in 0..n {
                        v = &v + &(&g[i][s] * &first(s, j, k));
                    }
                    lower[i][j][k] = v;
                    for l in 0..n {
                        let mut d = Value::zero();
                        for s in 0..n {
                            d = &d + &(&jet.dg[l][i][s] * &first(s, j, k));
                            d = &d + &(&g[i][s] * &dfirst(l, s, j, k));
                        }
                        dlower[l][i][j][k] = d;
                    }
                }
            }
        }
        let mut upper = vec![vec![vec![Value::zero(); n]; n]; n];
        for (i, plane) in upper.iter_mut().enumerate() {
            for (j, row) in plane.iter_mut().enumerate() {
                for (k, e) in row.iter_mut().enumerate() {
                    let mut v = Value::zero();
                    for s in 0..n {
                        v = &v - &(&g[i][s] * &lower[j][s][k]);
                    }
                    *e = v;
                }
            }
        }
        // R^i_{jkl} = ∂_kΓ^i_{lj} − ∂_lΓ^i_{kj} + Γ^i_{ks}Γ^s_{lj} − Γ^i_{ls}Γ^s_{kj}
        let mut mixed = vec![vec![vec![vec![Value::zero(); n]; n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut r = &dlower[k][i][l][j] - &dlower[l][i][k][j];
                        for s in 0..n {
                            r = &r + &(&lower[i][k][s] * &lower[s][l][j]);
                            r = &r - &(&lower[i][l][s] * &lower[s][k][j]);
                        }
                        mixed[i][j][k][l] = r;
                    }
                }
            }
        }
        let mut raised = vec![vec![vec![vec![Value::zero(); n]; n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut r = Value::zero();
                        for s in 0..n {
                            r = &r + &(&g[j][s] * &mixed[i][s][k][l]);
                        }
                        raised[i][j][k][l] = r;
                    }
                }
            }
        }
        let all_defined = upper.iter().flatten().flatten().all(Value::is_defined)
            && raised.iter().flatten().flatten().flatten().all(Value::is_defined);
        all_defined.then_some(PointGeometry { upper, raised })
    }
}

fn label(i: usize, j: usize, k: usize, l: usize) -> String {
    format!("R^{{{}{}}}_{{{}{}}}", i + 1, j + 1, k + 1, l + 1)
}

fn atoms(metric: &Metric) -> Vec<Var> {
    let vars: std::collections::BTreeSet<Var> = metric.entries().iter().flat_map(|e| e.vars()).collect();
    vars.into_iter().collect()
}

/// A point where `R^{ij}_{kl} ≠ c(δ^i_k δ^j_l − δ^i_l δ^j_k)`.
pub(crate) fn refute_constant_curvature(metric: &Metric, c: &Scalar) -> Option<String> {
    let n = metric.n();
    for p in 0..POINTS {
        let mut point = Point::random(SEED + p);
        let cv = point.eval(c);
        let Some(geo) = PointGeometry::of(&MetricJet::at(metric, &mut point)) else {
            continue;
        };
        if !cv.is_defined() {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in k + 1..n {
                        let delta = Value::from_int((i == k && j == l) as i64 - (i == l && j == k) as i64);
                        let r = &geo.raised[i][j][k][l] - &(&cv * &delta);
                        if r.is_zero() == Some(false) {
                            let at = point.describe(&atoms(metric));
                            let shown = if c.is_structurally_zero() {
                                format!("{} = {}", label(i, j, k, l), geo.raised[i][j][k][l])
                            } else {
                                format!("{} - ({c})*({delta}) = {r}", label(i, j, k, l))
                            };
                            return Some(format!("{shown} at {at}"));
                        }
                    }
                }
            }
        }
    }
    None
}

/// Which identities of the pencil `g + λg̃` to test.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum PencilLevel {
    Affine,
    Splitting,
    Flat,
}

/// A point and a value of `λ` at which the pencil fails at `level`.
pub(crate) fn refute_pencil(g: &Metric, gt: &Metric, lambda: Var, level: PencilLevel) -> Option<String> {
    let n = g.n();
    for p in 0..POINTS {
        let mut point = Point::random(SEED ^ (0x9e37 + p));
        let l = Value::from_q(point.value(lambda));
        let a = MetricJet::at(g, &mut point);
        let b = MetricJet::at(gt, &mut point);
        let (Some(ga), Some(gb), Some(gl)) = (
            PointGeometry::of(&a),
            PointGeometry::of(&b),
            PointGeometry::of(&a.combine(&b, &l)),
        ) else {
            continue;
        };
        let mut vars = atoms(g);
        vars.extend(atoms(gt));
        vars.push(lambda);
        vars.sort();
        vars.dedup();
        let at = || point.describe(&vars);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let d = &gl.upper[i][j][k] - &(&ga.upper[i][j][k] + &(&l * &gb.upper[i][j][k]));
                    if d.is_zero() == Some(false) {
                        return Some(format!(
                            "pencil connection: Gamma^{{{}{}}}_{} differs by {d} at {}",
                            i + 1,
                            j + 1,
                            k + 1,
                            at()
                        ));
                    }
                }
            }
        }
        if level == PencilLevel::Affine {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for m in k + 1..n {
                        let split = &ga.raised[i][j][k][m] + &(&l * &gb.raised[i][j][k][m]);
                        let d = &gl.raised[i][j][k][m] - &split;
                        if d.is_zero() == Some(false) {
                            return Some(format!(
                                "curvature splitting fails at {}: {d} at {}",
                                label(i, j, k, m),
                                at()
                            ));
                        }
                    }
                }
            }
        }
        if level == PencilLevel::Splitting {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for m in k + 1..n {
                        let r = &gl.raised[i][j][k][m];
                        if r.is_zero() == Some(false) {
                            return Some(format!("pencil is not flat: {} = {r} at {}", label(i, j, k, m), at()));
                        }
                    }
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::diffgeo::{levi_civita, riemann};

    #[test]
    fn point_values_match_symbolic_geometry() {
        for name in ["g1", "g3", "g6", "astigmatism", "wdvv3"] {
            let case = catalog::lookup(name).unwrap().build().unwrap();
            let g = case.op.metric();
            let conn = levi_civita(g).unwrap();
            let curv = riemann(g).unwrap();
            let mut point = Point::random(7);
            let geo = PointGeometry::of(&MetricJet::at(g, &mut point)).unwrap();
            let n = g.n();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        assert_eq!(point.eval(&conn.upper[[i, j, k]]), geo.upper[i][j][k], "{name}");
                        for l in 0..n {
                            assert_eq!(point.eval(curv.get(i, j, k, l)), geo.raised[i][j][k][l], "{name}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sphere_is_not_refuted_at_its_curvature() {
        let ctx = pencil_forge_symcore::Context::builder()
            .fields(["u", "v"])
            .build()
            .unwrap();
        let g = Metric::parse(&ctx, &[["(1 + (u^2 + v^2)/4)^2", "0"], ["0", "(1 + (u^2 + v^2)/4)^2"]]).unwrap();
        assert!(refute_constant_curvature(&g, &Scalar::from_int(1)).is_none());
        let w = refute_constant_curvature(&g, &Scalar::from_int(2)).unwrap();
        assert!(w.starts_with("R^{"), "{w}");
        assert!(refute_constant_curvature(&g, &Scalar::zero()).is_some());
    }
}
