use ndarray::Array2;
use pencil_forge::diffgeo::*;
use pencil_forge::pencil::compatible;
use pencil_forge::symcore::{Context, Scalar};
use proptest::prelude::*;

fn ctx() -> Context {
    Context::builder().fields(["u", "v"]).build().unwrap()
}

/// `a + b u + c v` with small integer coefficients.
fn entry() -> impl Strategy<Value = String> {
    (-3i64..4, -2i64..3, -2i64..3).prop_map(|(a, b, c)| format!("{a} + {b}*u + {c}*v"))
}

fn random_metric() -> impl Strategy<Value = Option<Metric>> {
    (entry(), entry(), entry()).prop_map(|(a, b, c)| {
        let ctx = ctx();
        let g = Array2::from_shape_vec((2, 2), vec![a, b.clone(), b, c])
            .unwrap()
            .map(|t| ctx.scalar(t).unwrap());
        Metric::new(&ctx, g).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn levi_civita_is_metric_and_torsion_free(g in random_metric()) {
        prop_assume!(g.is_some());
        let g = g.unwrap();
        let conn = levi_civita(&g).unwrap();
        prop_assert_eq!(metricity_witness(&g, &conn.upper).unwrap(), None);
        prop_assert_eq!(torsion_witness(&g, &conn.upper).unwrap(), None);
    }

    #[test]
    fn first_bianchi_identity(g in random_metric()) {
        prop_assume!(g.is_some());
        let g = g.unwrap();
        let conn = levi_civita(&g).unwrap();
        prop_assert_eq!(bianchi_witness(&curvature_of(&g, &conn)).unwrap(), None);
    }

    #[test]
    fn killing_is_invariant_under_scaling(
        g in random_metric(),
        f in (entry(), entry()),
        k in (1i64..5, 1i64..4, any::<bool>()),
    ) {
        prop_assume!(g.is_some());
        let g = g.unwrap();
        let f = VectorField::parse(g.ctx(), &[f.0, f.1]).unwrap();
        let scale = Scalar::ratio(if k.2 { k.0 } else { -k.0 }, k.1);
        let holds = killing_check(&g, &f).unwrap();
        prop_assert_eq!(killing_check(&g, &f.scale(&scale)).unwrap(), holds);
        prop_assert_eq!(cyclic_check(&g, &f.scale(&scale)).unwrap(), cyclic_check(&g, &f).unwrap());
    }

    #[test]
    fn compatibility_is_symmetric(a in random_metric(), b in random_metric()) {
        prop_assume!(a.is_some() && b.is_some());
        let (a, b) = (a.unwrap(), b.unwrap());
        prop_assert_eq!(compatible(&a, &b).unwrap(), compatible(&b, &a).unwrap());
    }
}

#[test]
fn translations_of_constant_metrics_are_killing() {
    let c = ctx();
    let g = Metric::parse(&c, &[["2", "1"], ["1", "-3"]]).unwrap();
    let f = VectorField::parse(&c, &["5", "-7"]).unwrap();
    assert!(killing_check(&g, &f).unwrap());
    assert!(cyclic_check(&g, &f).unwrap());
}
