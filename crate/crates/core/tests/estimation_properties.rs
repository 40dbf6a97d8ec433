mod common;

use nalgebra::DMatrix;
use rand::Rng;
use smvbs::data::volle;
use smvbs::estimation::*;
use smvbs::model::{SmvbsParams, Transform};
use smvbs::rng::seeded;
use smvbs::specfun::Quadrature;
use smvbs::BsParams;

/// 20 (θ, data) pairs with data drawn from a perturbed θ.
fn random_pairs() -> Vec<(SmvbsParams, SampleMatrix)> {
    let mut rng = seeded(71);
    (0..20)
        .map(|i| {
            let p = if i % 4 == 3 { 3 } else { 2 };
            let alphas: Vec<f64> = (0..p).map(|_| rng.random_range(0.1..1.5)).collect();
            let betas: Vec<f64> = (0..p).map(|_| rng.random_range(0.2..20.0)).collect();
            let lam = rng.random_range(-6.0..6.0);
            let gen = SmvbsParams::new(alphas.clone(), betas.clone(), lam * 0.7).unwrap();
            let data = SampleMatrix::new(gen.sample(60, i).unwrap()).unwrap();
            let th = SmvbsParams::new(
                alphas.iter().map(|a| a * 1.1).collect(),
                betas.iter().map(|b| b * 0.95).collect(),
                lam,
            )
            .unwrap();
            (th, data)
        })
        .collect()
}

fn shifted(v: &[f64], k: usize, h: f64) -> SmvbsParams {
    let mut u = v.to_vec();
    u[k] += h;
    SmvbsParams::from_slice(&u).unwrap()
}

#[test]
fn score_matches_finite_differences() {
    for (th, s) in random_pairs() {
        let v = th.to_vec();
        let g = score(&th, &s).unwrap();
        for k in 0..v.len() {
            let h = 1e-6 * v[k].abs().max(1.0);
            let fd = (loglik(&shifted(&v, k, h), &s).unwrap()
                - loglik(&shifted(&v, k, -h), &s).unwrap())
                / (2.0 * h);
            let scale = g.amax().max(1.0);
            assert!((fd - g[k]).abs() <= 1e-6 * scale, "{k}: {fd} vs {}", g[k]);
        }
    }
}

#[test]
fn observed_info_matches_score_jacobian() {
    for (th, s) in random_pairs() {
        let v = th.to_vec();
        let info = observed_info(&th, &s).unwrap();
        assert_eq!(info, info.transpose());
        let scale = info.amax();
        for k in 0..v.len() {
            let h = 1e-6 * v[k].abs().max(1.0);
            let up = score(&shifted(&v, k, h), &s).unwrap();
            let dn = score(&shifted(&v, k, -h), &s).unwrap();
            for m in 0..v.len() {
                let fd = -(up[m] - dn[m]) / (2.0 * h);
                assert!(
                    (fd - info[(m, k)]).abs() <= 1e-4 * info[(m, k)].abs().max(1e-3 * scale),
                    "({m},{k}): {fd} vs {}",
                    info[(m, k)]
                );
            }
        }
    }
}

#[test]
fn observed_info_positive_definite_at_estimate() {
    let s = volle(false);
    let fit = mle(&s, &FitOptions::default()).unwrap();
    let info = observed_info(&fit.theta_hat, &s).unwrap();
    let eig = info.symmetric_eigen().eigenvalues;
    assert!(eig.iter().all(|&e| e > 0.0), "{eig}");
}

#[test]
fn mme_recovers_parameters() {
    let th = SmvbsParams::bivariate(0.5, 0.5, 2.0, 2.0, 0.0).unwrap();
    let rows = th.sample(10_000, 72).unwrap();
    let s = SampleMatrix::new(rows.clone()).unwrap();
    let est = mme(&s);
    let mut rng = seeded(73);
    let reps = 200;
    let mut boot: Vec<Vec<f64>> = (0..4).map(|_| Vec::with_capacity(reps)).collect();
    for _ in 0..reps {
        let resample: Vec<Vec<f64>> = (0..rows.len())
            .map(|_| rows[rng.random_range(0..rows.len())].clone())
            .collect();
        let m = mme(&SampleMatrix::new(resample).unwrap());
        for (j, v) in [m.alphas[0], m.alphas[1], m.betas[0], m.betas[1]]
            .into_iter()
            .enumerate()
        {
            boot[j].push(v);
        }
    }
    let got = [est.alphas[0], est.alphas[1], est.betas[0], est.betas[1]];
    for j in 0..4 {
        let mean = boot[j].iter().sum::<f64>() / reps as f64;
        let sd =
            (boot[j].iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
        let truth = [0.5, 0.5, 2.0, 2.0][j];
        assert!(
            (got[j] - truth).abs() <= 3.0 * sd,
            "{j}: {} vs {truth} (sd {sd})",
            got[j]
        );
    }
}

#[test]
fn loglik_scale_shift() {
    let s = volle(false);
    let th = SmvbsParams::bivariate(0.21, 0.4, 112.0, 91.0, 0.9).unwrap();
    let k = [0.01, 7.0];
    let scaled = s.scaled(&k).unwrap();
    let th_k = th.transform(&Transform::Scale(k.to_vec())).unwrap();
    let n = s.n() as f64;
    let log_k: f64 = k.iter().map(|v| v.ln()).sum();
    let dens = |t: &SmvbsParams, d: &SampleMatrix| -> f64 {
        log_density_terms(t, d).unwrap().iter().sum()
    };
    assert!((dens(&th_k, &scaled) - dens(&th, &s) + n * log_k).abs() < 1e-9);
    let diff = loglik(&th_k, &scaled).unwrap() - loglik(&th, &s).unwrap();
    assert!((diff - 0.5 * n * log_k).abs() < 1e-9);
}

#[test]
fn profile_likelihood_properties() {
    let s = volle(false);
    let fit = mle(&s, &FitOptions::default()).unwrap();
    let th = &fit.theta_hat;
    let at_hat = profile_loglik(&th.betas, th.lambda, &s).unwrap();
    assert!((at_hat - fit.loglik).abs() <= 1e-8);
    for i in -20..=20 {
        for k in -20..=20 {
            if i == 0 && k == 0 {
                continue;
            }
            let b = [
                th.betas[0] * (1.0 + 0.005 * i as f64),
                th.betas[1] * (1.0 + 0.005 * k as f64),
            ];
            assert!(profile_loglik(&b, th.lambda, &s).unwrap() < at_hat);
        }
    }
}

#[test]
fn estimates_are_scale_equivariant() {
    let s = volle(false);
    let k = [0.1, 40.0];
    let fit = mle(&s, &FitOptions::default()).unwrap();
    let fk = mle(&s.scaled(&k).unwrap(), &FitOptions::default()).unwrap();
    assert!(fit.converged && fk.converged);
    for (j, kj) in k.iter().enumerate() {
        assert!((fit.theta_hat.alphas[j] - fk.theta_hat.alphas[j]).abs() <= 1e-6);
        assert!((kj * fit.theta_hat.betas[j] / fk.theta_hat.betas[j] - 1.0).abs() <= 1e-6);
    }
    assert!((fit.theta_hat.lambda - fk.theta_hat.lambda).abs() <= 1e-6);
}

#[test]
fn mle_is_consistent() {
    let truth = SmvbsParams::bivariate(0.5, 0.5, 1.0, 1.0, 1.5).unwrap();
    let tv = truth.to_vec();
    let opts = FitOptions {
        covariance: CovSource::Observed,
        ..FitOptions::default()
    };
    let mut covered = 0;
    for seed in 0..50 {
        let s = SampleMatrix::new(truth.sample(5000, 1000 + seed).unwrap()).unwrap();
        let fit = mle(&s, &opts).unwrap();
        assert!(fit.converged, "seed {seed}");
        let se = fit.std_errors().unwrap();
        let est = fit.estimates();
        if (0..5).all(|k| (est[k] - tv[k]).abs() <= 4.0 * se[k]) {
            covered += 1;
        }
    }
    assert!(covered >= 48, "{covered} of 50");
}

#[test]
fn information_equality_holds() {
    // E[score·scoreᵀ] from simulated data against the expected information
    let th = SmvbsParams::bivariate(0.5, 0.8, 1.0, 2.0, 1.5).unwrap();
    let draws = 200_000;
    let s = SampleMatrix::new(th.sample(draws, 74).unwrap()).unwrap();
    let terms = score_terms(&th, &s).unwrap();
    let dim = 5;
    let mut sum = DMatrix::<f64>::zeros(dim, dim);
    let mut sumsq = DMatrix::<f64>::zeros(dim, dim);
    for g in &terms {
        let o = g * g.transpose();
        sum += &o;
        sumsq += o.component_mul(&o);
    }
    let nd = draws as f64;
    let info = expected_info(&th, 1, McOptions { draws, seed: 75 }).unwrap();
    for k in 0..dim {
        for m in 0..dim {
            let mean = sum[(k, m)] / nd;
            let se = ((sumsq[(k, m)] / nd - mean * mean) / nd).sqrt();
            let tol = 4.0 * se.hypot(info.std_errors[(k, m)]);
            assert!(
                (mean - info.matrix[(k, m)]).abs() <= tol,
                "({k},{m}): {mean} vs {} (tol {tol})",
                info.matrix[(k, m)]
            );
        }
    }
}

fn mean_d(alpha: f64) -> f64 {
    // E√(α²Z² + 4), Z ~ N(0, 1)
    let q = Quadrature::with_tolerances(1e-14, 1e-12);
    q.integrate_real_line(|z| {
        (alpha * alpha * z * z + 4.0).sqrt() * smvbs::specfun::std_normal_pdf(z)
    })
    .value
}

#[test]
fn expected_info_is_continuous_at_zero() {
    let (a1, a2, b1, b2) = (0.5, 0.8, 1.0, 2.0);
    let zero = expected_info(
        &SmvbsParams::bivariate(a1, a2, b1, b2, 0.0).unwrap(),
        1,
        McOptions::default(),
    )
    .unwrap();
    let at = |l: f64| {
        expected_info(
            &SmvbsParams::bivariate(a1, a2, b1, b2, l).unwrap(),
            1,
            McOptions::default(),
        )
        .unwrap()
    };
    let (small, tiny) = (at(1e-2), at(1e-3));
    let w0 = (2.0 / std::f64::consts::PI).sqrt();
    // first-order coefficients
    for (j, al) in [a1, a2].into_iter().enumerate() {
        let slope = (tiny.matrix[(j, 4)] - zero.matrix[(j, 4)]) / 1e-3;
        let want = -w0 * w0 / al;
        assert!(
            (slope / want - 1.0).abs() < 0.01,
            "alpha{j}-lambda slope {slope} vs {want}"
        );
    }
    let slope = (tiny.matrix[(2, 3)] - zero.matrix[(2, 3)]) / 1e-3;
    let want = -w0 * mean_d(a1) * mean_d(a2) / (4.0 * a1 * b1 * a2 * b2);
    assert!(
        (slope / want - 1.0).abs() < 0.01,
        "beta cross slope {slope} vs {want}"
    );
    // the rest moves at second order
    for &(k, m) in &[
        (0, 0),
        (1, 1),
        (0, 1),
        (2, 2),
        (3, 3),
        (4, 4),
        (0, 2),
        (1, 3),
    ] {
        let d_small = (small.matrix[(k, m)] - zero.matrix[(k, m)]).abs();
        let d_tiny = (tiny.matrix[(k, m)] - zero.matrix[(k, m)]).abs();
        let noise = 3.0 * tiny.std_errors[(k, m)];
        assert!(
            d_tiny <= 0.05 * d_small + noise,
            "({k},{m}): {d_tiny} vs {d_small}"
        );
    }
}

#[test]
fn interval_width_behaviour() {
    let s = volle(false);
    let fit = mle(&s, &FitOptions::default()).unwrap();
    let point = confidence_intervals(&fit, 1.0).unwrap();
    for i in &point {
        assert_eq!(i.lower, i.estimate);
        assert_eq!(i.upper, i.estimate);
    }
    let mut prev = [0.0; 5];
    for g in [0.5, 0.2, 0.1, 0.05, 0.01, 0.001] {
        let ci = confidence_intervals(&fit, g).unwrap();
        for (k, i) in ci.iter().enumerate() {
            let w = i.upper - i.lower;
            assert!(w > prev[k]);
            prev[k] = w;
        }
    }
    assert!(confidence_intervals(&fit, 0.0).is_err());
}

#[test]
fn restricted_score_row_at_zero() {
    let s = volle(false);
    let fit = mle(&s, &FitOptions::restricted()).unwrap();
    let g = score(&fit.theta_hat, &s).unwrap();
    for k in 0..4 {
        assert!(g[k].abs() <= 1e-8 * fit.theta_hat.to_vec()[k].max(1.0));
    }
    // the MME is the λ = 0 profile maximizer start; restricted α̂ = α̂(β̂)
    for j in 0..2 {
        let a = alpha_given_beta(fit.theta_hat.betas[j], s.column(j)).unwrap();
        assert!((a - fit.theta_hat.alphas[j]).abs() < 1e-9);
    }
    let _ = BsParams::new(fit.theta_hat.alphas[0], fit.theta_hat.betas[0]).unwrap();
}
