mod common;

use common::{chi2_grid_pvalue, column, correlation, ks_test, mc_normalization};
use proptest::prelude::*;
use smvbs::bs::from_standard;
use smvbs::model::{latent_correlation, product_moment, SmvbsParams, Transform};
use smvbs::rng::seeded;

fn sets() -> Vec<SmvbsParams> {
    vec![
        SmvbsParams::bivariate(0.5, 0.5, 1.0, 1.0, 1.5).unwrap(),
        SmvbsParams::bivariate(0.2, 0.2, 1.0, 1.0, 5.0).unwrap(),
        SmvbsParams::bivariate(0.8, 0.3, 2.0, 0.5, -2.0).unwrap(),
    ]
}

#[test]
fn margins_are_bs() {
    for (s, th) in sets().iter().enumerate() {
        let draws = th.sample(100_000, 100 + s as u64).unwrap();
        for j in 0..2 {
            let m = th.marginal(j);
            let p = ks_test(&column(&draws, j), |t| m.cdf(t).unwrap());
            assert!(p > 0.01, "set {s} margin {j}: p = {p}");
        }
    }
    let th3 = SmvbsParams::new(vec![0.4, 0.9, 0.6], vec![1.0, 3.0, 0.2], 2.5).unwrap();
    let draws = th3.sample(100_000, 7).unwrap();
    for j in 0..3 {
        let m = th3.marginal(j);
        assert!(ks_test(&column(&draws, j), |t| m.cdf(t).unwrap()) > 0.01);
    }
}

#[test]
fn sampler_matches_density_on_grid() {
    for (s, th) in sets().iter().enumerate() {
        let draws = th.sample(100_000, 300 + s as u64).unwrap();
        let p = chi2_grid_pvalue(&draws, [th.marginal(0), th.marginal(1)], |a, b| {
            th.pdf(&[a, b]).unwrap()
        });
        assert!(p > 0.01, "set {s}: p = {p}");
    }
}

#[test]
fn density_integrates_to_one() {
    let mut rng = seeded(31);
    for th in sets() {
        let (est, se) = mc_normalization(
            |a, b| th.pdf(&[a, b]).unwrap(),
            [th.marginal(0), th.marginal(1)],
            1_000_000,
            &mut rng,
        );
        assert!((est - 1.0).abs() <= 3.0 * se, "{th:?}: {est} ± {se}");
    }
}

#[test]
fn independent_margins_uncorrelated() {
    let th = SmvbsParams::bivariate(0.5, 0.9, 1.0, 2.0, 0.0).unwrap();
    let n = 100_000;
    let d = th.sample(n, 41).unwrap();
    let r = correlation(&column(&d, 0), &column(&d, 1));
    assert!(r.abs() < 3.0 / (n as f64).sqrt());
}

#[test]
fn latent_correlation_matches_monte_carlo() {
    let th = SmvbsParams::bivariate(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
    let mut rng = seeded(42);
    let (batches, per) = (100, 100_000);
    let mut rs = Vec::with_capacity(batches);
    let mut z = [0.0; 2];
    for _ in 0..batches {
        let (mut x, mut y) = (Vec::with_capacity(per), Vec::with_capacity(per));
        for _ in 0..per {
            th.sample_latent(&mut rng, &mut z);
            x.push(z[0]);
            y.push(z[1]);
        }
        rs.push(correlation(&x, &y));
    }
    let mean = rs.iter().sum::<f64>() / batches as f64;
    let sd = (rs.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (batches - 1) as f64).sqrt();
    let se = sd / (batches as f64).sqrt();
    let exact = latent_correlation(1.0).unwrap();
    assert!(
        (mean - exact).abs() <= 3.0 * se,
        "{mean} vs {exact} (se {se})"
    );
}

#[test]
fn transform_coherence_in_distribution() {
    let th = SmvbsParams::bivariate(0.4, 0.7, 2.0, 0.5, 1.8).unwrap();
    let n = 100_000;
    let draws = th.sample(n, 51).unwrap();
    let k = [3.0, 0.25];
    type Map = Box<dyn Fn(&[f64]) -> Vec<f64>>;
    let cases: Vec<(Transform, Map)> = vec![
        (
            Transform::Scale(k.to_vec()),
            Box::new(move |t: &[f64]| vec![k[0] * t[0], k[1] * t[1]]),
        ),
        (
            Transform::Invert(vec![0]),
            Box::new(|t: &[f64]| vec![1.0 / t[0], t[1]]),
        ),
        (
            Transform::Invert(vec![1]),
            Box::new(|t: &[f64]| vec![t[0], 1.0 / t[1]]),
        ),
        (
            Transform::Invert(vec![0, 1]),
            Box::new(|t: &[f64]| vec![1.0 / t[0], 1.0 / t[1]]),
        ),
    ];
    for (action, map) in cases {
        let target = th.transform(&action).unwrap();
        let mapped: Vec<Vec<f64>> = draws.iter().map(|t| map(t)).collect();
        for j in 0..2 {
            let m = target.marginal(j);
            assert!(ks_test(&column(&mapped, j), |t| m.cdf(t).unwrap()) > 0.01);
        }
        let p = chi2_grid_pvalue(&mapped, [target.marginal(0), target.marginal(1)], |a, b| {
            target.pdf(&[a, b]).unwrap()
        });
        assert!(p > 0.01, "{action:?}: p = {p}");
    }
}

#[test]
fn product_moment_stable_across_seeds() {
    let th = SmvbsParams::bivariate(0.5, 0.5, 1.0, 1.0, 1.5).unwrap();
    let a = product_moment(&th, 1_000_000, 1).unwrap();
    let b = product_moment(&th, 1_000_000, 2).unwrap();
    assert!((a.value - b.value).abs() <= 3.0 * a.std_error.hypot(b.std_error));
    // positive association raises E(T₁T₂) above the independent value
    let indep = product_moment(
        &SmvbsParams {
            lambda: 0.0,
            ..th.clone()
        },
        0,
        0,
    )
    .unwrap();
    assert!(a.value > indep.value);
}

fn theta2() -> impl Strategy<Value = SmvbsParams> {
    (
        0.05f64..2.0,
        0.05f64..2.0,
        0.1f64..10.0,
        0.1f64..10.0,
        -10.0f64..10.0,
    )
        .prop_map(|(a1, a2, b1, b2, l)| SmvbsParams::bivariate(a1, a2, b1, b2, l).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn zero_lambda_factorizes(th in theta2(), t1 in 0.01f64..20.0, t2 in 0.01f64..20.0) {
        let th = SmvbsParams { lambda: 0.0, ..th };
        let joint = th.pdf(&[t1, t2]).unwrap();
        let prod = th.marginal(0).pdf(t1).unwrap() * th.marginal(1).pdf(t2).unwrap();
        prop_assert!((joint - prod).abs() <= 1e-12 * prod.max(1e-300));
    }

    #[test]
    fn conditional_consistency(th in theta2(), z1 in -4.0f64..4.0, z2 in -4.0f64..4.0) {
        let t1 = from_standard(z1, th.alphas[0], th.betas[0]);
        let t2 = from_standard(z2, th.alphas[1], th.betas[1]);
        let joint = th.pdf(&[t1, t2]).unwrap();
        let rhs = th.conditional_pdf(t1, t2).unwrap() * th.marginal(1).pdf(t2).unwrap();
        prop_assert!((joint - rhs).abs() <= 1e-12 * joint.max(1e-300));
    }

    #[test]
    fn closure_identities(th in theta2(), z1 in -3.0f64..3.0, z2 in -3.0f64..3.0, k1 in 0.1f64..10.0, k2 in 0.1f64..10.0) {
        let t = [from_standard(z1, th.alphas[0], th.betas[0]), from_standard(z2, th.alphas[1], th.betas[1])];
        let f = th.pdf(&t).unwrap();
        let s = th.transform(&Transform::Scale(vec![k1, k2])).unwrap();
        prop_assert!((f - k1 * k2 * s.pdf(&[k1 * t[0], k2 * t[1]]).unwrap()).abs() <= 1e-11 * f);
        let inv = th.transform(&Transform::Invert(vec![0, 1])).unwrap();
        let g = inv.pdf(&[1.0 / t[0], 1.0 / t[1]]).unwrap() / (t[0] * t[0] * t[1] * t[1]);
        prop_assert!((f - g).abs() <= 1e-11 * f);
        let inv2 = th.transform(&Transform::Invert(vec![1])).unwrap();
        let h = inv2.pdf(&[t[0], 1.0 / t[1]]).unwrap() / (t[1] * t[1]);
        prop_assert!((f - h).abs() <= 1e-11 * f);
    }

    #[test]
    fn log_pdf_finite_in_tail(th in theta2(), z1 in -7.0f64..7.0, z2 in -7.0f64..7.0) {
        let t = [from_standard(z1, th.alphas[0], th.betas[0]), from_standard(z2, th.alphas[1], th.betas[1])];
        let a = th.a_values(&t).unwrap();
        prop_assume!((th.lambda * a[0] * a[1]).abs() <= 50.0);
        prop_assert!(th.log_pdf(&t).unwrap().is_finite());
    }

    #[test]
    fn latent_correlation_antisymmetric(l in -50.0f64..50.0) {
        let r = latent_correlation(l).unwrap();
        prop_assert_eq!(latent_correlation(-l).unwrap(), -r);
        prop_assert!(r.abs() <= 1.0);
    }
}
