use pencil_forge_symcore::{
    antiderivative, potential, Context, Expr, Scalar, SymError, Substitution, Var,
};

fn ctx() -> Context {
    Context::builder()
        .fields(["u", "v", "w"])
        .independents(["x", "t"])
        .params(["alpha", "beta"])
        .function("gamma")
        .assume_nonzero("alpha - beta^2")
        .assume_nonzero("beta")
        .build()
        .unwrap()
}

fn s(text: &str) -> Scalar {
    ctx().scalar(text).unwrap()
}

fn assert_same(a: &Scalar, b: &Scalar) {
    assert!((a - b).is_zero().unwrap(), "{a}  !=  {b}");
}

#[test]
fn parse_tree_shapes() {
    let c = ctx();
    let e = c.parse("v^3/w^2").unwrap();
    let v = Box::new(Expr::Symbol("v".into()));
    let w = Box::new(Expr::Symbol("w".into()));
    assert_eq!(e, Expr::Mul(vec![Expr::Pow(v, 3), Expr::Pow(w, -2)]));
    let e = c.parse("sqrt(u*v)").unwrap();
    assert_eq!(
        e,
        Expr::Sqrt(Box::new(Expr::Mul(vec![
            Expr::Symbol("u".into()),
            Expr::Symbol("v".into())
        ])))
    );
}

#[test]
fn parse_errors_carry_position() {
    let c = ctx();
    assert!(matches!(
        c.parse("alpha/(v"),
        Err(SymError::Syntax { column: 8, .. })
    ));
    assert!(matches!(
        Expr::parse("a/(v"),
        Err(SymError::Syntax { column: 4, .. })
    ));
    match c.parse("u + zeta*v") {
        Err(SymError::UnknownSymbol { name, column }) => {
            assert_eq!(name, "zeta");
            assert_eq!(column, 4);
        }
        other => panic!("{other:?}"),
    }
    // jets only for declared fields and independents
    assert!(c.parse("q_x").is_err());
    assert!(c.parse("u_y").is_err());
    assert!(c.parse("u_xt + u_tx").is_ok());
    assert_same(&s("u_xt"), &s("u_tx"));
}

#[test]
fn partial_derivatives() {
    let u = Var::symbol("u");
    let v = Var::symbol("v");
    assert_same(&s("u^2").diff(u), &s("2*u"));
    assert_same(&s("alpha/v").diff(v), &s("-alpha/v^2"));
    assert_same(&s("sqrt(u*v)").diff(u), &s("v/(2*sqrt(u*v))"));
}

#[test]
fn total_x_derivatives() {
    let c = ctx();
    let e = c.total_x_derivative(&s("-v^3/(2*w^2)")).unwrap();
    assert_same(&e, &s("-(3*v^2/(2*w^2))*v_x + (v^3/w^3)*w_x"));
    assert_same(&c.total_x_derivative(&s("x^2")).unwrap(), &s("2*x"));
    assert_same(&c.total_x_derivative(&s("ln(u)")).unwrap(), &s("u_x/u"));
    assert_same(&c.total_x_derivative(&s("u_x*v")).unwrap(), &s("u_xx*v + u_x*v_x"));
    assert!(matches!(
        c.total_x_derivative(&s("u_xx")),
        Err(SymError::JetOrder(_))
    ));
    // general total derivative has no order limit
    assert_same(&c.total_derivative(&s("u_xx"), 1).unwrap(), &s("u_xxt"));
}

#[test]
fn zero_test() {
    assert!(s("(u+v)^2 - u^2 - 2*u*v - v^2").is_zero().unwrap());
    assert!(s("sqrt(u*v)^2 - u*v").is_zero().unwrap());
    assert!(!s("sqrt(u*v) - u").is_zero().unwrap());
    let two = ctx().parse("sqrt(u) + sqrt(v)").unwrap().normalize();
    assert!(matches!(two.is_zero(), Err(SymError::TwoRadicands(..))));
    // compatible radicands combine
    assert_same(&s("sqrt(u^3*v) - u*sqrt(u*v)"), &Scalar::zero());
    let nested = ctx().parse("sqrt(1 + sqrt(u))").unwrap().normalize();
    assert!(matches!(nested.is_zero(), Err(SymError::NestedRadical(_))));
}

#[test]
fn chazy_residual_of_minus_two_over_w_vanishes() {
    let w = Var::symbol("w");
    let residual = s("gamma'''(w) - 6*gamma(w)*gamma''(w) + 9*gamma'(w)^2");
    let sub = Substitution::new().bind_function("gamma", w, s("-2/w"));
    assert!(residual.substitute(&sub).is_zero().unwrap());
    // γ''' alone is 12/w^4
    assert_same(&s("gamma'''(w)").substitute(&sub), &s("12/w^4"));
}

#[test]
fn antiderivatives() {
    let u = Var::symbol("u");
    let x = Var::symbol("x");
    assert_same(&antiderivative(&s("1/u^2"), u).unwrap(), &s("-1/u"));
    assert_same(&antiderivative(&s("1/u"), u).unwrap(), &s("ln(u)"));
    assert_same(&antiderivative(&s("-2*x"), x).unwrap(), &s("-x^2"));
    let e = s("(3*u^2 + alpha)/(u^2*(u - beta)^2)");
    let big = antiderivative(&e, u).unwrap();
    assert_same(&big.diff(u), &e);
    assert!(matches!(
        antiderivative(&s("1/(u^2 + 1)"), u),
        Err(SymError::NotIntegrable { .. })
    ));
    let f = s("v*gamma''(u)");
    assert_same(&antiderivative(&f, u).unwrap(), &s("v*gamma'(u)"));
}

#[test]
fn potentials() {
    let (u, v) = (Var::symbol("u"), Var::symbol("v"));
    let h = potential(&[s("v + 1/u"), s("u + 2*v")], &[u, v]).unwrap();
    assert_same(&h, &s("u*v + ln(u) + v^2"));
    assert!(matches!(
        potential(&[s("v"), s("2*u")], &[u, v]),
        Err(SymError::NotClosed { .. })
    ));
}

#[test]
fn substitution() {
    let sub = Substitution::new()
        .bind_symbol("u", Scalar::one())
        .bind_symbol("v", Scalar::one());
    assert_same(&s("alpha/v").substitute(&sub), &s("alpha"));
    let c = ctx();
    let z = Context::builder()
        .fields(["z"])
        .independents(["x", "t"])
        .build()
        .unwrap();
    let sub = Substitution::new()
        .bind_symbol("w", z.scalar("z_x").unwrap())
        .bind_symbol("v", z.scalar("z_t").unwrap());
    assert_same(
        &c.scalar("v^3/w^2").unwrap().substitute(&sub),
        &z.scalar("z_t^3/z_x^2").unwrap(),
    );
    let w = Var::symbol("w");
    let sub = Substitution::new().bind_function("gamma", w, s("-2/w"));
    assert_same(&s("-v^3*gamma'(w)/4").substitute(&sub), &s("-v^3/(2*w^2)"));
}

#[test]
fn nonvanishing_certificates() {
    let c = ctx();
    assert!(c.certify_nonzero(&s("2*(alpha - beta^2)*beta^3")).is_ok());
    assert!(c.certify_nonzero(&s("u*v - 1")).is_ok());
    assert!(matches!(
        c.certify_nonzero(&s("alpha + beta")),
        Err(SymError::Uncertified(_))
    ));
    assert!(matches!(
        c.certify_nonzero(&Scalar::zero()),
        Err(SymError::DivisionByZero)
    ));
}

#[test]
fn context_validation() {
    assert!(Context::builder().fields(["u", "u"]).build().is_err());
    assert!(Context::builder().fields(["u"]).param("u").build().is_err());
    assert!(Context::builder().fields(["u"]).param("a").assume_nonzero("a - a").build().is_err());
    assert!(Context::builder().fields(["u"]).assume_nonzero("u").build().is_err());
}

#[test]
fn rendering_is_reparseable_and_ordered() {
    let c = ctx();
    for text in [
        "-v^3/(2*w^2)",
        "alpha/v + beta*u - 3/7",
        "(u - v)/(2*u + 3*w^2)",
        "1/(u*v)",
        "u + sqrt(u^2*v + 2)",
        "gamma''(w)*v - ln(u)",
        "(alpha*u*v + 1)/v^2",
    ] {
        let e = c.scalar(text).unwrap();
        let shown = e.to_string();
        let back = c.scalar(&shown).unwrap();
        assert_eq!(back, e, "{text} -> {shown}");
    }
    assert_eq!(s("w + v + u").to_string(), "u + v + w");
    assert_eq!(s("-v^3/(2*w^2)").to_string(), "-1/2*v^3/w^2");
}

#[test]
fn rational_roots_split_square_free_factors() {
    let x = Var::symbol("x");
    let e = s("1/(x^2 - 1)");
    let big = antiderivative(&e, x).unwrap();
    assert_same(&big.diff(x), &e);
    assert_same(&big, &s("ln(x - 1)/2 - ln(x + 1)/2"));
}
