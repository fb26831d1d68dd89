use hlcert_core::chaos::{check_khinchin, holder_interpolation, rademacher_moment, MomentMode, MonteCarloConfig};
use hlcert_core::exponents::{admissibility_failure, inner_exponent, transfer, TransferProblem};
use hlcert_core::norm::{certified_upper, estimate_norm, exact_linf_enum, AscentConfig};
use hlcert_core::special::khinchin_a;
use hlcert_core::tensor::{generate, AnyForm, FormTensor, TensorKind};
use hlcert_core::{
    certify, exponents, region, CertificationReport, ComplexForm, ExponentSet, RealForm, ScalarField, TrialConfig,
    TrialMix,
};
use proptest::prelude::*;

fn admissible_triple() -> impl Strategy<Value = (usize, f64, f64)> {
    (2usize..=7, 1.0f64..2.0, 0.0f64..=1.0).prop_filter_map("empty window", |(m, lambda0, t)| {
        let r = region(m, lambda0).ok()?;
        if r.empty {
            return None;
        }
        let p = r.lower + (r.upper - r.lower) * t;
        (p > r.lower).then_some((m, p, lambda0))
    })
}

proptest! {
    #[test]
    fn admissible_exponents_are_ordered((m, p, lambda0) in admissible_triple()) {
        let e = exponents(m, p, lambda0, ScalarField::Real).unwrap();
        prop_assert!(e.admissible);
        prop_assert!(e.s >= 2.0 - 1e-9);
        prop_assert!(e.eta1 > e.s);
        prop_assert!(e.constant >= 1.0);
        let c = exponents(m, p, lambda0, ScalarField::Complex).unwrap();
        prop_assert!(c.constant <= e.constant + 1e-12);
        prop_assert!(admissibility_failure(m, p, lambda0).unwrap().is_none());
    }

    #[test]
    fn transfer_reproduces_the_exponents((m, p, lambda0) in admissible_triple()) {
        let e = exponents(m, p, lambda0, ScalarField::Real).unwrap();
        let tp = TransferProblem::uniform_from_infinity(m, p, lambda0, e.s);
        let t = transfer(&tp).unwrap();
        prop_assert!((t.eta1 - e.eta1).abs() <= 1e-9 * e.eta1);
        prop_assert!((t.eta2 - inner_exponent(m, p, lambda0).unwrap()).abs() <= 1e-9 * e.s);
    }

    #[test]
    fn khinchin_lower_bound_holds(a in prop::collection::vec(-5.0f64..5.0, 1..=10), q in 1.0f64..=2.0) {
        let r = check_khinchin(&a, q, &MonteCarloConfig::default()).unwrap();
        prop_assert!(r.ratio >= 1.0 - 1e-12);
    }

    #[test]
    fn khinchin_constant_bounds(q in 1.0f64..=2.0) {
        let real = khinchin_a(q, ScalarField::Real).unwrap().value;
        let complex = khinchin_a(q, ScalarField::Complex).unwrap().value;
        prop_assert!(real <= 1.0 + 1e-15 && complex <= 1.0 + 1e-15);
        prop_assert!(complex >= real - 1e-15);
    }

    #[test]
    fn moments_increase_with_q(a in prop::collection::vec(-3.0f64..3.0, 1..=8), q in 1.0f64..3.0, dq in 0.0f64..2.0) {
        let lo = rademacher_moment(&a, q, MomentMode::ExactEnum).unwrap().value;
        let hi = rademacher_moment(&a, q + dq, MomentMode::ExactEnum).unwrap().value;
        prop_assert!(lo <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn holder_interpolation_holds(v in prop::collection::vec(-4.0f64..4.0, 1..=12), s in 2.0f64..20.0) {
        let (lhs, rhs) = holder_interpolation(&v, s);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn norm_bracket_is_consistent(seed in any::<u64>(), n in 1usize..=3, m in 2usize..=3, p in prop_oneof![Just(f64::INFINITY), 1.5f64..8.0]) {
        let t: RealForm = generate(TensorKind::Gaussian, m, n, seed).unwrap();
        let cfg = AscentConfig { restarts: 6, ..AscentConfig::default() };
        let est = estimate_norm(&t, p, &cfg, seed).unwrap();
        prop_assert!(est.lower <= est.upper * (1.0 + 1e-12));
        prop_assert!(est.upper <= certified_upper(&t, p) * (1.0 + 1e-12));
        let value = t.evaluate(&est.witness_refs()).unwrap().abs();
        prop_assert!((value - est.lower).abs() <= 1e-9 * est.lower.max(1.0));
        // The ℓ_p ball lies in the ℓ_∞ ball.
        let linf = exact_linf_enum(&t).unwrap().upper;
        prop_assert!(est.lower <= linf * (1.0 + 1e-12));
    }

    #[test]
    fn norm_is_homogeneous(seed in any::<u64>(), c in 0.1f64..10.0) {
        let t: RealForm = generate(TensorKind::Signs, 3, 2, seed).unwrap();
        let a = exact_linf_enum(&t).unwrap().upper;
        let b = exact_linf_enum(&t.scaled(-c)).unwrap().upper;
        prop_assert!((b - c * a).abs() <= 1e-12 * b);
    }

    #[test]
    fn tensor_json_round_trips(seed in any::<u64>(), m in 1usize..=3, n in 1usize..=3, complex in any::<bool>()) {
        let field = if complex { ScalarField::Complex } else { ScalarField::Real };
        let form = AnyForm::generate(TensorKind::Gaussian, m, n, field, seed).unwrap();
        let text = form.to_json();
        let back = AnyForm::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json(), text);
    }
}

#[test]
fn exponent_set_round_trips_with_infinite_p() {
    let e: ExponentSet = exponents(2, f64::INFINITY, 2.0, ScalarField::Real).unwrap();
    let text = serde_json::to_string(&e).unwrap();
    assert!(text.contains("\"p\":\"inf\""));
    let back: ExponentSet = serde_json::from_str(&text).unwrap();
    assert_eq!(back, e);
}

#[test]
fn certification_is_deterministic_and_ordered() {
    let cfg = TrialConfig {
        trials: 64,
        seed: 99,
        mix: TrialMix::Mixed,
        ascent: AscentConfig {
            restarts: 8,
            ..AscentConfig::default()
        },
    };
    let runs: Vec<CertificationReport> = [1, 3]
        .into_iter()
        .map(|jobs| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .unwrap()
                .install(|| certify::<f64>(3, 2, 5.0, 1.5, &cfg).unwrap())
        })
        .collect();
    assert_eq!(runs[0].records, runs[1].records);
    for r in &runs[0].records {
        assert!(r.ratio_conservative <= r.ratio_empirical);
    }
    assert_eq!(runs[0].violations, 0);
    let text = serde_json::to_string(&runs[0]).unwrap();
    let back: CertificationReport = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string(&back).unwrap(), text);
}

#[test]
fn complex_certification_runs() {
    let cfg = TrialConfig {
        trials: 40,
        seed: 5,
        mix: TrialMix::Single(TensorKind::Steinhaus),
        ascent: AscentConfig {
            restarts: 8,
            ..AscentConfig::default()
        },
    };
    let r = certify::<hlcert_core::Complex64>(3, 2, 5.0, 1.5, &cfg).unwrap();
    assert_eq!(r.params.field, ScalarField::Complex);
    assert_eq!(r.violations, 0);
    let _: ComplexForm = generate(TensorKind::Steinhaus, 2, 2, 1).unwrap();
}

#[test]
fn sparse_unit_forms_attain_ratio_one_for_every_index() {
    let t = FormTensor::from_fn(3, 2, |i| if i == [1, 0, 1] { 1.0f64 } else { 0.0 }).unwrap();
    let e = exponents(3, 4.0, 1.0, ScalarField::Real).unwrap();
    for i in 0..3 {
        let spec = hlcert_core::MixedNormSpec::new(i, e.s, e.eta1).unwrap();
        assert_eq!(t.mixed_norm(&spec).unwrap(), 1.0);
    }
    assert_eq!(exact_linf_enum(&t).unwrap().upper, 1.0);
}
