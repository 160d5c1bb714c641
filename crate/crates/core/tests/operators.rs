mod common;

use common::{case, ctx2, metric, same};
use ndarray::Array2;
use pencil_forge::diffgeo::VectorField;
use pencil_forge::operators::*;
use pencil_forge::report::Status;
use pencil_forge::symcore::{Context, Scalar};
use pencil_forge::Error;

fn astigmatism(ctx: &Context, f: [&str; 2], eps: &str) -> NonlocalIsometryOp {
    let g = metric(ctx, &[&["u", "beta"], &["beta", "alpha/u"]]);
    let f = VectorField::parse(ctx, &f).unwrap();
    NonlocalIsometryOp::from_metric(g, Scalar::zero(), ctx.scalar(eps).unwrap(), f).unwrap()
}

fn actx() -> Context {
    ctx2(&["alpha", "beta", "eps"], &["alpha - beta^2"])
}

#[test]
fn constant_operator_shape() {
    let a = ConstantOp::antidiagonal(3);
    assert!(a.is_antidiagonal());
    assert_eq!(a.upper(0, 2), Scalar::one());
    assert_eq!(a.lower(1, 1), Scalar::one());
    assert!(ConstantOp::from_ints(&[vec![1, 2], vec![0, 1]]).is_err());
    assert!(ConstantOp::from_ints(&[vec![1, 1], vec![1, 1]]).is_err());
    let b = ConstantOp::from_ints(&[vec![2, 1], vec![1, 1]]).unwrap();
    assert!(!b.is_antidiagonal());
    assert_eq!(Scalar::from_q(b.inverse()[[0, 1]].clone()), Scalar::from_int(-1));
    assert_eq!(b.lower(0, 0), Scalar::one());
}

#[test]
fn valid_local_operators() {
    let c = ctx2(&[], &[]);
    let op = LocalFirstOrderOp::levi_civita(metric(&c, &[&["0", "1"], &["1", "0"]])).unwrap();
    assert!(validate_local(&op).unwrap().is_valid());
    let g1 = case("g1");
    assert!(validate_local(&g1.op.local).unwrap().is_valid());
}

#[test]
fn invalid_local_operators() {
    let c = ctx2(&["c"], &["c"]);
    let op = LocalFirstOrderOp::levi_civita(common::sphere(&c)).unwrap();
    let r = validate_local(&op).unwrap();
    assert_eq!(r.get("flat metric").unwrap().status, Status::Fail);
    assert_eq!(r.get("Levi-Civita connection").unwrap().status, Status::Pass);

    let c = ctx2(&[], &[]);
    let g = metric(&c, &[&["u", "0"], &["0", "1"]]);
    let mut gamma = pencil_forge::diffgeo::levi_civita(&g).unwrap().upper;
    gamma[[0, 0, 0]] = Scalar::zero();
    let r = validate_local(&LocalFirstOrderOp::new(g, gamma).unwrap()).unwrap();
    let bad = r.get("Levi-Civita connection").unwrap();
    assert_eq!(bad.status, Status::Fail);
    assert!(bad.detail.as_deref().unwrap().starts_with("Gamma^{11}_1"));
}

#[test]
fn nonlocal_operator_checks() {
    let c = actx();
    let r = validate_nonlocal(&astigmatism(&c, ["0", "1"], "eps")).unwrap();
    assert!(r.is_valid(), "{:?}", r.failures().collect::<Vec<_>>());
    assert_eq!(r.checks.len(), 8);
    // the nonlocal tail can be switched off
    assert!(validate_nonlocal(&astigmatism(&c, ["0", "1"], "0")).unwrap().is_valid());
    let r = validate_nonlocal(&astigmatism(&c, ["1", "1"], "eps")).unwrap();
    let names: Vec<_> = r.failures().map(|c| c.name.as_str()).collect();
    assert!(names.contains(&"Killing condition"), "{names:?}");
}

#[test]
fn nonlocal_operator_with_curvature() {
    let c = Context::builder().fields(["u", "v"]).param("c").assume_nonzero("c").build().unwrap();
    let g = common::sphere(&c);
    let k = c.scalar("c").unwrap();
    // rotations are isometries of the round metric
    let f = VectorField::parse(&c, &["v", "-u"]).unwrap();
    let op = NonlocalIsometryOp::from_metric(g.clone(), k.clone(), Scalar::one(), f).unwrap();
    let r = validate_nonlocal(&op).unwrap();
    assert_eq!(r.get("constant curvature").unwrap().status, Status::Pass);
    assert_eq!(r.get("Killing condition").unwrap().status, Status::Pass);
    assert!(r.get("flat metric").is_none());
    let f = VectorField::parse(&c, &["0", "0"]).unwrap();
    let op = NonlocalIsometryOp::from_metric(g, Scalar::from_int(2), Scalar::one(), f).unwrap();
    let r = validate_nonlocal(&op).unwrap();
    assert_eq!(r.get("constant curvature").unwrap().status, Status::Fail);
}

#[test]
fn epsilon_must_be_constant() {
    let c = actx();
    let g = metric(&c, &[&["u", "beta"], &["beta", "alpha/u"]]);
    let f = VectorField::parse(&c, &["0", "1"]).unwrap();
    let e = NonlocalIsometryOp::from_metric(g, Scalar::zero(), c.scalar("u").unwrap(), f);
    assert!(matches!(e, Err(Error::Shape(_))));
}

fn parse_rows(ctx: &Context, rows: &[&[&str]]) -> Array2<Scalar> {
    let n = rows.len();
    Array2::from_shape_fn((n, n), |(i, j)| ctx.scalar(rows[i][j]).unwrap())
}

#[test]
fn liouville_potential_of_constant_metric_is_half_the_metric() {
    let c = ctx2(&["beta"], &["1 - beta^2"]);
    let g = metric(&c, &[&["1", "beta"], &["beta", "1"]]);
    let op = LocalFirstOrderOp::levi_civita(g.clone()).unwrap();
    let r = liouville_potential(&op, None, &[Scalar::one(), Scalar::one()]).unwrap();
    for ((i, j), e) in r.indexed_iter() {
        assert!(same(e, &(g.get(i, j) * &Scalar::ratio(1, 2))));
    }
}

#[test]
fn liouville_potential_matches_known_gauges() {
    let ones = |n| vec![Scalar::one(); n];
    let a = case("astigmatism");
    let want = parse_rows(&a.ctx, &[&["u/2", "-v/2 + beta"], &["v/2", "alpha/(2*u)"]]);
    let r = liouville_potential(&a.op.local, Some(&want), &ones(2)).unwrap();
    assert!(r.iter().zip(want.iter()).all(|(x, y)| same(x, y)));
    // without a reference the antisymmetric part vanishes at the base point
    let r0 = liouville_potential(&a.op.local, None, &ones(2)).unwrap();
    let d = &r0[[0, 1]] - &r0[[1, 0]];
    assert!(same(&d, &a.ctx.scalar("1 - v").unwrap()));

    let w = case("wdvv3");
    let want = parse_rows(
        &w.ctx,
        &[
            &["v^3/(2*w^2)", "u", "1"],
            &["-3*v^2/(2*w) - u", "(2*v + 1)/2", "0"],
            &["-v", "w", "0"],
        ],
    );
    let r = liouville_potential(&w.op.local, Some(&want), &ones(3)).unwrap();
    for ((i, j), e) in r.indexed_iter() {
        assert!(same(e, &want[[i, j]]), "r^{{{i}{j}}} = {e}");
    }
}

#[test]
fn non_flat_metric_has_no_liouville_potential() {
    let c = ctx2(&[], &[]);
    let g = metric(&c, &[&["1 + u^2 + v^2", "0"], &["0", "1"]]);
    let op = LocalFirstOrderOp::levi_civita(g).unwrap();
    let e = liouville_potential(&op, None, &[Scalar::one(), Scalar::one()]);
    assert!(matches!(e, Err(Error::NotLiouville(_))), "{e:?}");
}

#[test]
fn h_potentials() {
    let w = case("wdvv3");
    let s = |t: &str| w.ctx.scalar(t).unwrap();
    let mut h = vec![s("-u*v - v^3/(2*w)"), s("u*w + v^2/2 + v/2"), s("w")];
    assert!(h_potential_check(&w.op.local, &w.eta, &h).unwrap());
    h[2] = s("2*w");
    assert!(!h_potential_check(&w.op.local, &w.eta, &h).unwrap());
}

#[test]
fn halved_linear_potentials_reproduce_only_the_identity() {
    // η^{is}∂_s H^j with H^j = Σ η_{jk}u^k/2 is δ^{ij}/2, so the symmetrised
    // sum is the identity matrix whatever η is.
    let c = ctx2(&[], &[]);
    let run = |eta: ConstantOp| {
        let g = eta.metric(&c).unwrap();
        let op = LocalFirstOrderOp::levi_civita(g).unwrap();
        let fields: Vec<Scalar> = c.field_vars().into_iter().map(Scalar::var).collect();
        let h: Vec<Scalar> = (0..2)
            .map(|j| (0..2).map(|k| &(&eta.lower(j, k) * &fields[k]) * &Scalar::ratio(1, 2)).sum())
            .collect();
        h_potential_check(&op, &eta, &h).unwrap()
    };
    assert!(run(ConstantOp::from_ints(&[vec![1, 0], vec![0, 1]]).unwrap()));
    assert!(!run(ConstantOp::antidiagonal(2)));
    assert!(!run(ConstantOp::from_ints(&[vec![2, 1], vec![1, 1]]).unwrap()));
}
