#![allow(dead_code)]

use rand::Rng;
use smvbs::bs::{from_standard, BsParams};
use smvbs::specfun::{chi_square_sf, Quadrature};

/// One-sample Kolmogorov–Smirnov statistic.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut x = sample.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    x.iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS p-value with the usual small-sample correction.
pub fn ks_pvalue(n: usize, d: f64) -> f64 {
    let sn = (n as f64).sqrt();
    let lam = (sn + 0.12 + 0.11 / sn) * d;
    if lam < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        let term = 2.0 * (-2.0 * kf * kf * lam * lam).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    s.clamp(0.0, 1.0)
}

pub fn ks_test(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    ks_pvalue(sample.len(), ks_statistic(sample, cdf))
}

pub fn bin_index(edges: &[f64], v: f64) -> usize {
    // edges are interior cut points
    edges.partition_point(|&e| e <= v)
}

/// Pearson χ² on a 10×10 grid whose cut points are the marginal BS deciles;
/// cell probabilities come from 2-D quadrature of `pdf`.
pub fn chi2_grid_pvalue(
    draws: &[Vec<f64>],
    margins: [BsParams; 2],
    pdf: impl Fn(f64, f64) -> f64,
) -> f64 {
    let k = 10;
    let cuts: Vec<Vec<f64>> = margins
        .iter()
        .map(|m| {
            (1..k)
                .map(|i| m.quantile(i as f64 / k as f64).unwrap())
                .collect()
        })
        .collect();
    let bounds = |j: usize, c: usize| -> (f64, f64) {
        let m = &margins[j];
        let lo = if c == 0 {
            from_standard(-9.0, m.alpha, m.beta)
        } else {
            cuts[j][c - 1]
        };
        let hi = if c == k - 1 {
            from_standard(9.0, m.alpha, m.beta)
        } else {
            cuts[j][c]
        };
        (lo, hi)
    };
    let mut counts = vec![0usize; k * k];
    for t in draws {
        counts[bin_index(&cuts[0], t[0]) * k + bin_index(&cuts[1], t[1])] += 1;
    }
    let q = Quadrature::with_tolerances(1e-12, 1e-9);
    let n = draws.len() as f64;
    let mut stat = 0.0;
    let mut total_p = 0.0;
    for c1 in 0..k {
        let (a, b) = bounds(0, c1);
        for c2 in 0..k {
            let (c, d) = bounds(1, c2);
            let p = q
                .integrate(|x| q.integrate(|y| pdf(x, y), c, d).value, a, b)
                .value;
            total_p += p;
            let e = n * p;
            let o = counts[c1 * k + c2] as f64;
            stat += (o - e) * (o - e) / e;
        }
    }
    assert!(
        (total_p - 1.0).abs() < 1e-6,
        "cell probabilities sum to {total_p}"
    );
    chi_square_sf(stat, (k * k - 1) as f64).unwrap()
}

/// Importance-sampling estimate of `∫∫ f` over ℝ₊² with independent
/// Cauchy-generator BS proposals; returns (estimate, standard error).
pub fn mc_normalization<R: Rng>(
    f: impl Fn(f64, f64) -> f64,
    margins: [BsParams; 2],
    draws: usize,
    rng: &mut R,
) -> (f64, f64) {
    let cauchy_log_pdf = |t: f64, m: &BsParams| {
        let a = m.a(t);
        -std::f64::consts::PI.ln() - (a * a).ln_1p() + smvbs::bs::log_jacobian(t, m.alpha, m.beta)
    };
    let (mut mean, mut m2) = (0.0, 0.0);
    for i in 0..draws {
        let mut t = [0.0; 2];
        let mut lq = 0.0;
        for j in 0..2 {
            let u: f64 = rng.random();
            let z = (std::f64::consts::PI * (u - 0.5)).tan();
            t[j] = from_standard(z, margins[j].alpha, margins[j].beta);
            lq += cauchy_log_pdf(t[j], &margins[j]);
        }
        let w = if t[0] > 0.0 && t[1] > 0.0 && t[0].is_finite() && t[1].is_finite() {
            f(t[0], t[1]) / lq.exp()
        } else {
            0.0
        };
        let w = if w.is_finite() { w } else { 0.0 };
        let delta = w - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (w - mean);
    }
    (mean, (m2 / (draws - 1) as f64 / draws as f64).sqrt())
}

/// Pearson correlation.
pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

pub fn column(rows: &[Vec<f64>], j: usize) -> Vec<f64> {
    rows.iter().map(|r| r[j]).collect()
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}
