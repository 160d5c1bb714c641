#![allow(dead_code)]

use pencil_forge::catalog::{lookup, Case};
use pencil_forge::diffgeo::Metric;
use pencil_forge::symcore::{Context, Scalar};

pub fn ctx2(params: &[&str], assume: &[&str]) -> Context {
    let mut b = Context::builder().fields(["u", "v"]).params(params.iter().copied());
    for a in assume {
        b = b.assume_nonzero(*a);
    }
    b.build().unwrap()
}

pub fn metric(ctx: &Context, rows: &[&[&str]]) -> Metric {
    Metric::parse(ctx, rows).unwrap()
}

pub fn case(name: &str) -> Case {
    lookup(name).unwrap().build().unwrap()
}

pub fn same(a: &Scalar, b: &Scalar) -> bool {
    (a - b).is_zero().unwrap()
}

/// Contravariant form of `δ_ij / (1 + c(u² + v²)/4)²`.
pub fn sphere(ctx: &Context) -> Metric {
    let s = "(1 + c*(u^2 + v^2)/4)^2";
    metric(ctx, &[&[s, "0"], &["0", s]])
}
