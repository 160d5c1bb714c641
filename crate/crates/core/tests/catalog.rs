mod common;

use std::collections::BTreeMap;

use pencil_forge::catalog::*;
use pencil_forge::report::Status;
use pencil_forge::symcore::Scalar;
use pencil_forge::Error;

#[test]
fn eleven_builtin_cases() {
    let names: Vec<_> = builtin_cases().into_iter().map(|r| r.name).collect();
    assert_eq!(
        names,
        ["astigmatism", "g1", "g2", "g3", "g4", "g5", "g6", "g7", "g8", "g9", "wdvv3"]
    );
    for n in &names {
        assert_eq!(&lookup(n).unwrap().name, n);
    }
    assert!(lookup("g10").is_none());
}

#[test]
fn builtin_cases_verify() {
    for report in verify_all() {
        let bad: Vec<_> = report.failures().collect();
        assert!(report.valid, "{}: {bad:?}", report.name);
    }
}

#[test]
fn parameter_collision_is_degenerate() {
    let at: BTreeMap<String, String> = [("alpha".to_string(), "beta^2".to_string())].into();
    let record = lookup("g1").unwrap().specialize(&at).unwrap();
    assert!(record.parameters.iter().all(|p| p.nonzero.is_none()));
    assert!(matches!(record.build(), Err(Error::DegenerateMetric { .. })));
    let report = verify_case(&record);
    assert!(!report.valid);
    assert_eq!(report.get("load case").unwrap().status, Status::Error);
}

#[test]
fn unknown_parameter_cannot_be_specialized() {
    let at: BTreeMap<String, String> = [("gamma".to_string(), "1".to_string())].into();
    assert!(lookup("g1").unwrap().specialize(&at).is_err());
}

#[test]
fn cases_without_printed_recursion_are_skipped() {
    for name in ["g9", "wdvv3"] {
        let r = verify_case(&lookup(name).unwrap());
        let c = r.get("recursion operator").unwrap();
        assert_eq!(c.status, Status::Skipped, "{name}");
        assert!(r.valid);
    }
    let r = verify_case(&lookup("g6").unwrap());
    assert_eq!(r.get("recursion operator").unwrap().status, Status::Pass);
}

#[test]
fn perturbed_metric_is_reported() {
    let record = lookup("g1").unwrap().perturbed(1, 1);
    assert_eq!(record.metric[1][1], "(v) + u");
    let mut reports = verify_cases(&[lookup("g3").unwrap(), record]);
    assert_eq!(reports.len(), 2);
    let bad = reports.remove(0);
    assert_eq!(bad.name, "g1");
    assert!(!bad.valid);
    let first = bad.failures().next().unwrap();
    assert!(first.detail.as_deref().is_some_and(|d| !d.is_empty()), "{first:?}");
    assert!(reports[0].valid);
}

#[test]
fn empty_case_list() {
    assert!(verify_cases(&[]).is_empty());
}

#[test]
fn json_round_trip() {
    for record in builtin_cases() {
        let text = record.to_json();
        let back = CaseRecord::from_json(&text).unwrap();
        assert_eq!(back, record);
        assert_eq!(back.to_json(), text);
    }
    assert!(CaseRecord::from_json("{\"name\": \"x\"}").is_err());
    let bad = lookup("g1").unwrap().to_json().replace("\"n\": 2", "\"n\": 3");
    assert!(matches!(CaseRecord::from_json(&bad), Err(Error::Case { .. })));
    let extra = lookup("g1").unwrap().to_json().replacen('{', "{\"colour\": 1,", 1);
    assert!(CaseRecord::from_json(&extra).is_err());
}

#[test]
fn wdvv_residual_factors_through_chazy() {
    let ctx = wdvv_context();
    let f = ctx.scalar("u^2*w/2 + u*v^2/2 - v^4*gamma(w)/16").unwrap();
    let r = wdvv_residual(&ctx, &f).unwrap();
    let gamma = ctx.scalar("gamma(w)").unwrap();
    let w = ctx.field_var(2);
    let want = &ctx.scalar("-v^4/16").unwrap() * &chazy_residual(&gamma, w).unwrap();
    assert!(common::same(&r, &want));
    let bad = ctx.scalar("u^3 + v^4").unwrap();
    assert!(matches!(wdvv_residual(&ctx, &bad), Err(Error::Shape(_))));
}

#[test]
fn chazy_values() {
    let ctx = wdvv_context();
    let w = ctx.field_var(2);
    let s = |t: &str| ctx.scalar(t).unwrap();
    assert_eq!(chazy_residual(&s("w"), w).unwrap(), Scalar::from_int(9));
    assert!(chazy_residual(&s("-2/w"), w).unwrap().is_zero().unwrap());
    // γ = −k/w leaves (6k − 3k²)/w⁴
    assert_eq!(chazy_residual(&s("-1/w"), w).unwrap(), s("3/w^4"));
    assert!(!chazy_residual(&s("w^2"), w).unwrap().is_zero().unwrap());
    // F with γ = −2/w solves WDVV
    let f = s("u^2*w/2 + u*v^2/2 + v^4/(8*w)");
    assert!(wdvv_residual(&ctx, &f).unwrap().is_zero().unwrap());
}

#[test]
fn elimination_reproduces_the_third_order_equation() {
    assert!(elimination_check().unwrap());
    let flow = wdvv_source_flow().unwrap();
    let mut sourceless = flow.clone();
    sourceless.source = vec![Scalar::zero(); 3];
    assert_eq!(elimination_residual(&sourceless).unwrap(), Scalar::one());
    let mut doubled = flow.clone();
    let ctx = wdvv_context();
    doubled.velocity[[0, 2]] = ctx.scalar("2*v^3/w^3").unwrap();
    doubled.velocity[[0, 1]] = ctx.scalar("-3*v^2/w^2").unwrap();
    assert!(!elimination_residual(&doubled).unwrap().is_zero().unwrap());
    let mut wrong_shape = flow;
    wrong_shape.velocity[[1, 0]] = Scalar::zero();
    assert!(elimination_residual(&wrong_shape).is_err());
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

#[test]
fn degenerate_split() {
    // floating-point det(g − η) for the wdvv metric at a few points
    for (v, w) in [(0.7, 1.1), (-2.0, 0.3), (5.0, -4.0)] {
        let m = [
            [v * v * v / (w * w), -1.5 * v * v / w, -v],
            [-1.5 * v * v / w, 2.0 * v, w],
            [-v, w, 0.0],
        ];
        assert!(det3(m).abs() < 1e-9, "{}", det3(m));
    }
    let k = common::case("wdvv3");
    assert!(degenerate_split_check(k.op.metric().entries(), &k.eta).unwrap());
    // α − (β − 1)² for the astigmatism pair
    let k = common::case("astigmatism");
    assert!(!degenerate_split_check(k.op.metric().entries(), &k.eta).unwrap());
    let at: BTreeMap<String, String> = [("alpha".into(), "1".into()), ("beta".into(), "0".into())].into();
    let k = lookup("astigmatism").unwrap().specialize(&at).unwrap().build().unwrap();
    assert!(degenerate_split_check(k.op.metric().entries(), &k.eta).unwrap());
}

#[test]
fn literal_g4_entry_fails() {
    let mut record = lookup("g4").unwrap();
    let r = record.references.recursion.as_mut().unwrap();
    for row in r.matrix.iter_mut() {
        for s in row.iter_mut() {
            s.mult = s.mult.replace("f'(", "f(");
        }
    }
    let report = verify_case(&record);
    assert_eq!(report.get("recursion operator").unwrap().status, Status::Fail);
    assert!(verify_case(&lookup("g4").unwrap()).valid);
}

#[test]
fn expected_failures_flip_the_verdict() {
    let mut record = lookup("astigmatism").unwrap();
    record.references.degenerate_split = Some(true);
    assert!(!verify_case(&record).valid);
    record.expected.insert("degenerate split".into(), false);
    let report = verify_case(&record);
    assert!(report.valid);
    let c = report.get("degenerate split").unwrap();
    assert!(c.detail.as_deref().unwrap().starts_with("fails as expected"));
}

#[test]
fn report_json_omits_timings() {
    let report = verify_case(&lookup("g6").unwrap());
    let v: serde_json::Value = serde_json::to_value(&report).unwrap();
    assert_eq!(v["name"], "g6");
    assert_eq!(v["valid"], true);
    assert!(v.get("elapsed").is_none());
    assert_eq!(v["checks"][0]["status"], "pass");
}
