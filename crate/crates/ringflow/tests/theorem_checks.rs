mod common;

use proptest::prelude::*;
use ringflow::solver::{FourierSeries, MaxSetKind, RingDomain};
use ringflow::theorem_checks::{
    check_gradient_estimate, check_pohozaev, run_suite, CheckOptions, RegionView, Side,
};

use common::{model_field, perturbed_domains, solve};

#[test]
fn models_pass_every_check_with_rigidity() {
    // at R = 0.4 the thin hole leaves W - W_R at 2e-10, above the default
    // tolerance of ten solve residuals
    for r in [0.5, 0.6, 0.7, 0.8] {
        let f = model_field(r, 64, 64);
        let suite = run_suite(&f, &CheckOptions::default()).unwrap();
        assert_eq!(suite.max_set, MaxSetKind::Curve);
        assert!(suite.all_pass(), "R = {r}: {:?}", suite.failures());
        let ge = suite.check("gradient_estimate[outer]").unwrap();
        assert_eq!(ge.rigidity, Some(true));
        assert_eq!(suite.regions.len(), 2);
        for reg in &suite.regions {
            assert!((reg.r_expected - r).abs() < 1e-9, "{reg:?}");
        }
    }
}

#[test]
fn perturbed_domains_pass_the_applicable_checks() {
    for (name, d) in perturbed_domains() {
        let f = solve(&d, 96, 64);
        let suite = run_suite(&f, &CheckOptions::default()).unwrap();
        assert_eq!(suite.max_set, MaxSetKind::Points, "{name}");
        assert!(suite.all_pass(), "{name}: {:?}", suite.failures());
        let ge = suite.check("gradient_estimate[whole]").unwrap();
        assert!(ge.applicable && ge.pass);
        assert_eq!(ge.rigidity, Some(false), "{name}");
        assert!(ge.diagnostics["interior_max_difference"] < 0.0);
    }
}

#[test]
fn gradient_violation_does_not_grow_under_refinement() {
    for (name, d) in perturbed_domains() {
        let worst = |nt, nr| {
            let f = solve(&d, nt, nr);
            let reg = RegionView::new(&f, Side::Whole).unwrap();
            check_gradient_estimate(&reg, &CheckOptions::default()).unwrap().worst_violation.unwrap().max(0.0)
        };
        let (coarse, fine) = (worst(48, 32), worst(96, 64));
        assert!(fine <= coarse + 1e-12, "{name}: {coarse:e} -> {fine:e}");
    }
}

#[test]
fn suite_report_serializes() {
    let (_, d) = perturbed_domains().remove(1);
    let f = solve(&d, 64, 48);
    let suite = run_suite(&f, &CheckOptions::default()).unwrap().without_samples();
    let back: ringflow::theorem_checks::SuiteReport = serde_json::from_str(&suite.to_json().unwrap()).unwrap();
    assert_eq!(back, suite);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gradient_estimate_and_pohozaev_on_random_domains(
        lambda in 0.35f64..0.6,
        q1 in 1usize..5,
        a1 in -0.01f64..0.01,
        q2 in 1usize..5,
        a2 in -0.01f64..0.01,
    ) {
        let d = RingDomain::new(lambda, FourierSeries::cosine(q1, a1), FourierSeries::sine(q2, a2)).unwrap();
        let f = solve(&d, 64, 48);
        for reg in RegionView::regions(&f).unwrap() {
            let opts = CheckOptions::default();
            let ge = check_gradient_estimate(&reg, &opts).unwrap();
            prop_assert!(ge.worst_violation.unwrap() <= 1e-6, "{:?}", ge.diagnostics);
            let p = check_pohozaev(&reg, &opts).unwrap();
            prop_assert!(p.worst_violation.unwrap() < 1e-6, "{:?}", p.diagnostics);
        }
    }
}
