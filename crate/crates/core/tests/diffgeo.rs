mod common;

use common::{case, ctx2, metric, same, sphere};
use pencil_forge::diffgeo::*;
use pencil_forge::symcore::{Context, Scalar, Var};
use pencil_forge::Error;

#[test]
fn christoffel_symbols_of_the_astigmatism_metric() {
    let c = ctx2(&["alpha", "beta"], &["alpha - beta^2"]);
    let g = metric(&c, &[&["u", "beta"], &["beta", "alpha/u"]]);
    let gam = levi_civita(&g).unwrap().upper;
    let s = |t: &str| c.scalar(t).unwrap();
    // [[i, j, k]] = Γ^{ij}_k
    assert!(same(&gam[[0, 0, 0]], &s("1/2")));
    assert!(same(&gam[[1, 1, 0]], &s("-alpha/(2*u^2)")));
    assert!(same(&gam[[1, 0, 1]], &s("1/2")));
    assert!(same(&gam[[0, 1, 1]], &s("-1/2")));
    for (i, j, k) in [(0, 1, 0), (1, 0, 0), (0, 0, 1), (1, 1, 1)] {
        assert!(gam[[i, j, k]].is_zero().unwrap(), "{i}{j}{k}");
    }
}

#[test]
fn constant_metric_has_vanishing_symbols() {
    let c = ctx2(&[], &[]);
    let g = metric(&c, &[&["0", "1"], &["1", "0"]]);
    let conn = levi_civita(&g).unwrap();
    assert!(conn.upper.iter().chain(conn.lower.iter()).all(|e| e.is_zero().unwrap()));
    assert!(is_flat(&g).unwrap());
    assert!(same(&constant_curvature(&g).unwrap().unwrap(), &Scalar::zero()));
}

#[test]
fn wdvv_metric_symbols_match_the_operator_matrices() {
    let wd = case("wdvv3");
    let c = &wd.ctx;
    let s = |t: &str| c.scalar(t).unwrap();
    let gam = levi_civita(wd.op.metric()).unwrap().upper;
    // coefficient matrix of v_x
    let m = [["3*v^2/(2*w^2)", "0", "0"], ["-3*v/w", "1", "0"], ["-1", "0", "0"]];
    for i in 0..3 {
        for j in 0..3 {
            assert!(same(&gam[[i, j, 1]], &s(m[i][j])), "{i}{j}");
        }
    }
}

#[test]
fn degenerate_metric_is_rejected() {
    let c = ctx2(&["beta"], &[]);
    let rows: &[&[&str]] = &[&["beta^2/v", "beta"], &["beta", "v"]];
    assert!(matches!(Metric::parse(&c, rows), Err(Error::DegenerateMetric { .. })));
    // a parameter combination that is not among the assumptions
    let rows: &[&[&str]] = &[&["1", "beta"], &["beta", "1"]];
    assert!(matches!(Metric::parse(&c, rows), Err(Error::DegenerateMetric { .. })));
    let c = ctx2(&["beta"], &["1 - beta^2"]);
    assert!(Metric::parse(&c, rows).is_ok());
}

#[test]
fn catalog_metric_is_flat() {
    let g1 = case("g1");
    let r = riemann(g1.op.metric()).unwrap();
    assert!(r.raised.iter().all(|e| e.is_zero().unwrap()));
    assert!(is_flat(g1.op.metric()).unwrap());
    let g8 = case("g8");
    assert!(same(&constant_curvature(g8.op.metric()).unwrap().unwrap(), &Scalar::zero()));
}

/// Gaussian curvature of `e^{2φ}δ` as `−e^{−2φ}Δφ`, independent of the
/// Christoffel machinery.
fn conformal_curvature(ctx: &Context, s: &str) -> Scalar {
    let (u, v) = (Var::symbol("u"), Var::symbol("v"));
    let conf = ctx.scalar(s).unwrap();
    // covariant factor e^{2φ} = 1/conf, so φ = −ln(conf)/2
    let phi = &conf.ln() * &Scalar::ratio(-1, 2);
    let lap = &phi.diff(u).diff(u) + &phi.diff(v).diff(v);
    -(&conf * &lap)
}

#[test]
fn constant_curvature_metric() {
    let c = ctx2(&["c"], &["c"]);
    let g = sphere(&c);
    let oracle = conformal_curvature(&c, "(1 + c*(u^2 + v^2)/4)^2");
    let want = c.scalar("c").unwrap();
    assert!(same(&oracle, &want));
    let r = riemann(&g).unwrap();
    assert!(same(r.get(0, 1, 0, 1), &want));
    assert!(same(r.get(0, 1, 1, 0), &-want.clone()));
    assert!(!is_flat(&g).unwrap());
    assert!(same(&constant_curvature(&g).unwrap().unwrap(), &want));
    assert!(flatness_witness(&g).unwrap().unwrap().starts_with("R^{"));
}

#[test]
fn nonconstant_curvature_is_detected() {
    let c = ctx2(&[], &[]);
    let g = metric(&c, &[&["1 + u^2", "0"], &["0", "1"]]);
    // flat: a one-dimensional reparametrisation of u
    assert!(is_flat(&g).unwrap());
    let g = metric(&c, &[&["1 + u^2 + v^2", "0"], &["0", "1"]]);
    assert_eq!(constant_curvature(&g).unwrap(), None);
}

#[test]
fn killing_vectors() {
    let c = ctx2(&["alpha", "beta"], &["alpha - beta^2"]);
    let f = |t: &[&str]| VectorField::parse(&c, t).unwrap();
    let gv = metric(&c, &[&["v^2 + 1", "v"], &["v", "alpha/v"]]);
    assert!(killing_check(&gv, &f(&["1", "0"])).unwrap());
    let g8 = metric(&c, &[&["u/v", "beta"], &["beta", "alpha*v/u"]]);
    assert!(killing_check(&g8, &f(&["u", "-v"])).unwrap());
    // invariant under constant rescaling
    assert!(killing_check(&g8, &f(&["-3*u/2", "3*v/2"])).unwrap());
    let gu = metric(&c, &[&["u", "0"], &["0", "1"]]);
    assert!(!killing_check(&gu, &f(&["1", "0"])).unwrap());
    let w = killing_witness(&gu, &f(&["1", "0"])).unwrap().unwrap();
    assert_eq!(w, "(L_f g)^{11} = 1");
}

#[test]
fn cyclic_condition() {
    let c = ctx2(&["alpha", "beta"], &["alpha - beta^2"]);
    let g = metric(&c, &[&["u", "beta"], &["beta", "alpha/u"]]);
    assert!(cyclic_check(&g, &VectorField::parse(&c, &["0", "1"]).unwrap()).unwrap());
    let w = cyclic_witness(&g, &VectorField::parse(&c, &["u", "0"]).unwrap()).unwrap();
    assert!(w.unwrap().starts_with("cyclic sum at (1, 1, 1)"));
    let wd = case("wdvv3");
    assert!(cyclic_check(wd.op.metric(), &wd.op.f).unwrap());
}

/// Cyclic sum for the identity metric (all symbols zero) evaluated at a
/// point by finite formulas.
fn identity_cyclic_oracle(f: impl Fn([f64; 3]) -> [f64; 3], p: [f64; 3]) -> bool {
    let h = 1e-6;
    let fv = f(p);
    let mut d = [[0.0; 3]; 3];
    for (i, row) in d.iter_mut().enumerate() {
        let mut q = p;
        q[i] += h;
        let fq = f(q);
        for k in 0..3 {
            row[k] = (fq[k] - fv[k]) / h;
        }
    }
    let mut all_zero = true;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let s = fv[j] * d[i][k] + fv[k] * d[j][i] + fv[i] * d[k][j];
                all_zero &= s.abs() < 1e-4;
            }
        }
    }
    all_zero
}

#[test]
fn cyclic_condition_in_three_dimensions() {
    let c = Context::builder().fields(["u", "v", "w"]).build().unwrap();
    let g = Metric::parse(&c, &[["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]).unwrap();
    let expected = identity_cyclic_oracle(|[u, v, w]| [v, w, u], [0.3, 0.7, 1.1]);
    assert!(!expected);
    let f = VectorField::parse(&c, &["v", "w", "u"]).unwrap();
    assert_eq!(cyclic_check(&g, &f).unwrap(), expected);
    // a translation satisfies it
    let f = VectorField::parse(&c, &["1", "2", "0"]).unwrap();
    assert!(cyclic_check(&g, &f).unwrap());
}

#[test]
fn metricity_and_torsion_of_levi_civita() {
    for name in ["g1", "g4", "g7", "astigmatism", "wdvv3"] {
        let k = case(name);
        let g = k.op.metric();
        let conn = levi_civita(g).unwrap();
        assert_eq!(metricity_witness(g, &conn.upper).unwrap(), None, "{name}");
        assert_eq!(torsion_witness(g, &conn.upper).unwrap(), None, "{name}");
    }
    let c = ctx2(&["c"], &["c"]);
    let g = sphere(&c);
    let conn = levi_civita(&g).unwrap();
    assert_eq!(metricity_witness(&g, &conn.upper).unwrap(), None);
    assert_eq!(bianchi_witness(&curvature_of(&g, &conn)).unwrap(), None);
}

#[test]
fn determinant_and_adjugate() {
    let c = Context::builder().fields(["u", "v", "w"]).build().unwrap();
    let g = Metric::parse(&c, &[["u", "1", "0"], ["1", "v", "w"], ["0", "w", "1"]]).unwrap();
    assert!(same(g.determinant(), &c.scalar("u*v - u*w^2 - 1").unwrap()));
    let inv = g.inverse();
    for i in 0..3 {
        for j in 0..3 {
            let e: Scalar = (0..3).map(|s| g.get(i, s) * &inv[[s, j]]).sum();
            assert!(same(&e, &Scalar::from_int((i == j) as i64)));
        }
    }
}
