//! Univariate Birnbaum–Saunders distribution.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::generator::DensityGenerator;
use crate::rng::seeded;
use crate::specfun::{std_normal_cdf, std_normal_log_pdf, std_normal_quantile};

/// Shape `alpha` and scale `beta` (the median) of a BS law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsParams {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsMoments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub mean_reciprocal: f64,
    pub variance_reciprocal: f64,
}

/// Standardizing map `a(t) = (√(t/β) − √(β/t))/α`.
#[inline]
pub fn a_transform(t: f64, alpha: f64, beta: f64) -> f64 {
    let r = (t / beta).sqrt();
    (r - 1.0 / r) / alpha
}

/// `√(t/β) + √(β/t)` (always ≥ 2).
#[inline]
pub fn d_transform(t: f64, beta: f64) -> f64 {
    let r = (t / beta).sqrt();
    r + 1.0 / r
}

/// Log of the change-of-variables factor `t^{-3/2}(t+β)/(2α√β)`.
#[inline]
pub fn log_jacobian(t: f64, alpha: f64, beta: f64) -> f64 {
    -1.5 * t.ln() + (t + beta).ln() - (2.0 * alpha).ln() - 0.5 * beta.ln()
}

/// Maps a standard variate `z` to `β[αz/2 + √((αz/2)² + 1)]²`.
#[inline]
pub fn from_standard(z: f64, alpha: f64, beta: f64) -> f64 {
    let w = 0.5 * alpha * z;
    let root = w.hypot(1.0);
    // w + √(w²+1) loses everything to cancellation for large negative w
    let base = if w >= 0.0 { w + root } else { 1.0 / (root - w) };
    beta * base * base
}

pub(crate) fn check_positive_time(func: &'static str, t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(domain(
            func,
            format!("observation must be positive and finite, got {t}"),
        ))
    }
}

impl BsParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) || !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "BS parameters must be positive and finite (alpha = {alpha}, beta = {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn a(&self, t: f64) -> f64 {
        a_transform(t, self.alpha, self.beta)
    }

    pub fn pdf(&self, t: f64) -> Result<f64> {
        Ok(self.log_pdf(t)?.exp())
    }

    pub fn log_pdf(&self, t: f64) -> Result<f64> {
        check_positive_time("bs_log_pdf", t)?;
        Ok(std_normal_log_pdf(self.a(t)) + log_jacobian(t, self.alpha, self.beta))
    }

    pub fn cdf(&self, t: f64) -> Result<f64> {
        check_positive_time("bs_cdf", t)?;
        Ok(std_normal_cdf(self.a(t)))
    }

    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(domain("bs_quantile", format!("q = {q} not in (0, 1)")));
        }
        Ok(from_standard(
            std_normal_quantile(q)?,
            self.alpha,
            self.beta,
        ))
    }

    pub fn moments(&self) -> BsMoments {
        let a2 = self.alpha * self.alpha;
        let b = self.beta;
        let denom = 5.0 * a2 + 4.0;
        BsMoments {
            mean: b * (1.0 + 0.5 * a2),
            variance: (self.alpha * b).powi(2) * (1.0 + 1.25 * a2),
            skewness: 4.0 * self.alpha * (11.0 * a2 + 6.0) / denom.powf(1.5),
            kurtosis: 3.0 + 6.0 * a2 * (93.0 * a2 + 40.0) / (denom * denom),
            mean_reciprocal: (1.0 + 0.5 * a2) / b,
            variance_reciprocal: a2 / (b * b) * (1.0 + 1.25 * a2),
        }
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n)
            .map(|_| from_standard(rng.sample(StandardNormal), self.alpha, self.beta))
            .collect()
    }

    /// `n` draws, reproducible for a given `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(domain("bs_sample", "n must be at least 1"));
        }
        Ok(self.sample_with(n, &mut seeded(seed)))
    }
}

/// Generalized BS density `c·g(a_t²)` times the BS Jacobian.
pub fn gbs_pdf(t: f64, params: &BsParams, generator: &DensityGenerator) -> Result<f64> {
    Ok(gbs_log_pdf(t, params, generator)?.exp())
}

pub fn gbs_log_pdf(t: f64, params: &BsParams, generator: &DensityGenerator) -> Result<f64> {
    check_positive_time("gbs_pdf", t)?;
    Ok(generator.log_pdf(params.a(t)) + log_jacobian(t, params.alpha, params.beta))
}
