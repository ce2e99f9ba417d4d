use proptest::prelude::*;

use tailfence::distributions::{DistributionSpec, Params, RngState};
use tailfence::estimators::{self, TailFamily};
use tailfence::tail_chars::{
    characteristics, closed_form_p_e_left, closed_form_p_e_right, generic_characteristics,
    TailCharacteristics,
};
use tailfence::Sample;

fn any_spec() -> impl Strategy<Value = DistributionSpec> {
    let shape = 0.2f64..8.0;
    let loc = -100.0f64..100.0;
    let scale = 0.1f64..10.0;
    prop_oneof![
        (loc.clone(), 0.1f64..50.0).prop_map(|(a, w)| Params::Uniform { a, b: a + w }),
        scale
            .clone()
            .prop_map(|lambda| Params::Exponential { lambda }),
        (shape.clone(), scale.clone()).prop_map(|(alpha, beta)| Params::Gamma { alpha, beta }),
        (loc.clone(), scale.clone()).prop_map(|(mu, s)| Params::Normal { mu, sigma2: s * s }),
        (1u32..30).prop_map(|n| Params::StudentT { n }),
        (shape.clone(), scale.clone()).prop_map(|(alpha, delta)| Params::Pareto { alpha, delta }),
        (shape.clone(), loc.clone(), scale.clone())
            .prop_map(|(alpha, mu, sigma)| Params::Frechet { alpha, mu, sigma }),
        (shape.clone(), loc.clone(), scale.clone())
            .prop_map(|(alpha, mu, sigma)| Params::NegWeibull { alpha, mu, sigma }),
        (loc, scale).prop_map(|(mu, gamma)| Params::Gumbel { mu, gamma }),
        shape.prop_map(|alpha| Params::HillHorror { alpha }),
    ]
    .prop_map(|p| DistributionSpec::new(p).unwrap())
}

fn probabilities(c: &TailCharacteristics) -> [f64; 6] {
    [c.p_el, c.p_er, c.p_e2, c.p_ml, c.p_mr, c.p_m2]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn quantile_is_monotone(spec in any_spec()) {
        let mut prev = f64::NEG_INFINITY;
        for i in 1..1000 {
            let q = spec.quantile(i as f64 / 1000.0).unwrap();
            prop_assert!(q >= prev, "{spec}: q({}) = {q} < {prev}", i as f64 / 1000.0);
            prev = q;
        }
    }

    #[test]
    fn cdf_inverts_quantile(spec in any_spec()) {
        let tol = if spec.family().is_numeric() { 1e-7 } else { 1e-9 };
        for p in [0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99] {
            let x = spec.quantile(p).unwrap();
            // near an endpoint a few ulps of x can move the CDF a lot; accept
            // any x whose rounding neighbourhood brackets p
            let d = 8.0 * f64::EPSILON * x.abs();
            let bracketed = spec.cdf(x - d) <= p + tol && spec.cdf(x + d) >= p - tol;
            prop_assert!((spec.cdf(x) - p).abs() <= tol || bracketed, "{spec} p={p}");
        }
    }

    #[test]
    fn characteristics_are_consistent(spec in any_spec()) {
        let c = characteristics(&spec);
        prop_assert_eq!(c.p_e2, c.p_el + c.p_er);
        prop_assert_eq!(c.p_m2, c.p_ml + c.p_mr);
        for p in probabilities(&c) {
            prop_assert!((0.0..=1.0).contains(&p));
        }
        prop_assert!(c.p_ml + c.p_el <= 1.0 && c.p_mr + c.p_er <= 1.0);
        let f = c.fences;
        prop_assert!(f.iqr >= 0.0);
        prop_assert!(f.outer_low <= f.inner_low && f.inner_low <= f.q1 && f.q1 <= f.q3);
        prop_assert!(f.q3 <= f.inner_high && f.inner_high <= f.outer_high);
    }

    #[test]
    fn closed_forms_agree_with_cdf_route(spec in any_spec()) {
        let generic = generic_characteristics(&spec);
        if let Some(p) = closed_form_p_e_right(&spec) {
            prop_assert!((p - generic.p_er).abs() <= 1e-10, "{spec}: {p} vs {}", generic.p_er);
        }
        if let Some(p) = closed_form_p_e_left(&spec) {
            prop_assert!((p - generic.p_el).abs() <= 1e-10, "{spec}: {p} vs {}", generic.p_el);
        }
    }

    #[test]
    fn empirical_quantile_hits_knots_exactly(
        values in prop::collection::vec(-1e6f64..1e6, 1..200)
    ) {
        let s = Sample::new(values).unwrap();
        let n = s.len();
        for k in 1..=n {
            let q = s.quantile(k as f64 / (n as f64 + 1.0));
            prop_assert_eq!(q.value.to_bits(), s.order_stat(k).to_bits());
            prop_assert!(!q.clamped);
        }
    }

    #[test]
    fn empirical_quantile_is_affine_equivariant(
        values in prop::collection::vec(-100.0f64..100.0, 3..100),
        a in 0.01f64..100.0,
        b in -100.0f64..100.0,
        p in 0.0f64..1.0,
    ) {
        let s = Sample::new(values).unwrap();
        let t = s.map(|x| a * x + b).unwrap();
        let lhs = t.quantile(p).value;
        let rhs = a * s.quantile(p).value + b;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()).max(a * 100.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn outlier_bands_partition_the_sample(
        values in prop::collection::vec(-50.0f64..50.0, 3..200),
        spikes in prop::collection::vec(-1e4f64..1e4, 0..5),
    ) {
        let mut values = values;
        values.extend(spikes);
        let s = Sample::new(values).unwrap();
        let counts = s.outlier_counts(&s.fences().unwrap());
        prop_assert_eq!(counts.total(), s.len());
        let n = s.len() as f64;
        let fractions = [
            counts.extreme_low, counts.mild_low, counts.inside, counts.mild_high, counts.extreme_high,
        ].map(|c| c as f64 / n);
        prop_assert!((fractions.iter().sum::<f64>() - 1.0).abs() <= 1e-15);

        let neg = s.map(|x| -x).unwrap();
        let neg_counts = neg.outlier_counts(&neg.fences().unwrap());
        prop_assert_eq!(neg_counts.extreme_low, counts.extreme_high);
        prop_assert_eq!(neg_counts.extreme_high, counts.extreme_low);
    }

    #[test]
    fn estimators_are_scale_invariant(seed in any::<u64>(), alpha in 0.3f64..3.0, c in 0.01f64..100.0) {
        let spec = DistributionSpec::pareto(alpha, 1.0).unwrap();
        let s = spec.sample(RngState::new(seed, 0), 80).unwrap();
        let scaled = s.map(|x| c * x).unwrap();
        let shifted = s.map(|x| x + 17.0).unwrap();
        // compare on the gamma = 1/alpha scale: gamma estimates can cancel to
        // near zero, which blows relative error on alpha out of proportion
        let same = |a: Option<f64>, b: Option<f64>, tol: f64| match (a, b) {
            (Some(a), Some(b)) => (1.0 / a - 1.0 / b).abs() <= tol * (1.0 / a).abs().max(1.0),
            (None, None) => true,
            _ => false,
        };
        for family in [TailFamily::Pareto, TailFamily::Frechet, TailFamily::HillHorror] {
            let a = estimators::estimate_quartile_ratio(&s, family).unwrap();
            let b = estimators::estimate_quartile_ratio(&scaled, family).unwrap();
            prop_assert!(same(a.alpha_hat, b.alpha_hat, 1e-12), "{family:?}: {a:?} vs {b:?}");
        }
        for k in [5, 10, 20] {
            for est in [estimators::hill, estimators::t_hill, estimators::moment_dedh, estimators::pickands] {
                let a = est(&s, k).unwrap();
                let b = est(&scaled, k).unwrap();
                prop_assert!(same(a.alpha_hat, b.alpha_hat, 1e-12), "{a:?} vs {b:?}");
            }
            let a = estimators::pickands(&s, k).unwrap();
            let d = estimators::pickands(&shifted, k).unwrap();
            // shifting by 17 perturbs spacings only by rounding
            prop_assert!(same(a.alpha_hat, d.alpha_hat, 1e-9), "{a:?} vs {d:?}");
        }
    }

    #[test]
    fn hill_gamma_is_nonnegative(values in prop::collection::vec(0.001f64..1e4, 2..100), k_frac in 0.0f64..1.0) {
        let s = Sample::new(values).unwrap();
        let k = 1 + ((s.len() - 1) as f64 * k_frac) as usize;
        let k = k.min(s.len() - 1);
        let r = estimators::hill(&s, k).unwrap();
        // an invalid record here can only mean a zero log-excess sum
        prop_assert!(r.valid || r.alpha_hat.is_none());
        if let Some(a) = r.alpha_hat {
            prop_assert!(a > 0.0);
        }
    }
}

#[test]
fn fence_prob_estimate_changes_under_scaling() {
    let spec = DistributionSpec::pareto(0.5, 1.0).unwrap();
    let s = spec.sample(RngState::new(5, 0), 200).unwrap();
    let scaled = s.map(|x| 10.0 * x).unwrap();
    for family in [
        TailFamily::Pareto,
        TailFamily::Frechet,
        TailFamily::HillHorror,
    ] {
        let a = estimators::estimate_fence_prob(&s, family).unwrap();
        let b = estimators::estimate_fence_prob(&scaled, family).unwrap();
        assert!(a.valid && b.valid);
        assert_ne!(a.alpha_hat, b.alpha_hat, "{family:?}");
    }
}
