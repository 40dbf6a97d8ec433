//! The p-variate skewed Birnbaum–Saunders law built from the conditionally
//! specified skew-normal latent vector with density `2∏φ(z_j)·Φ(λ∏z_j)`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bs::{a_transform, check_positive_time, from_standard, log_jacobian, BsParams};
use crate::error::{domain, Error, Result};
use crate::rng::{seeded, substream};
use crate::specfun::{confluent_u, owen_t, std_normal_cdf, std_normal_log_cdf, std_normal_log_pdf};

/// Parameter vector `θ = (α₁..α_p, β₁..β_p, λ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmvbsParams {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub lambda: f64,
}

/// A closure-property action on the random vector.
#[derive(Debug, Clone, PartialEq)]
pub enum Transform {
    /// `T_j ↦ k_j·T_j`
    Scale(Vec<f64>),
    /// `T_j ↦ 1/T_j` for the listed margins.
    Invert(Vec<usize>),
}

impl SmvbsParams {
    pub fn new(alphas: Vec<f64>, betas: Vec<f64>, lambda: f64) -> Result<Self> {
        if alphas.len() != betas.len() {
            return Err(Error::InvalidParams(format!(
                "{} shape values but {} scale values",
                alphas.len(),
                betas.len()
            )));
        }
        if alphas.len() < 2 {
            return Err(Error::InvalidParams(
                "dimension p must be at least 2".into(),
            ));
        }
        for (j, (&a, &b)) in alphas.iter().zip(&betas).enumerate() {
            if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "margin {}: alpha = {a}, beta = {b} must be positive and finite",
                    j + 1
                )));
            }
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidParams(format!(
                "lambda = {lambda} is not finite"
            )));
        }
        Ok(Self {
            alphas,
            betas,
            lambda,
        })
    }

    /// `(α₁, α₂, β₁, β₂, λ)` for the bivariate case.
    pub fn bivariate(a1: f64, a2: f64, b1: f64, b2: f64, lambda: f64) -> Result<Self> {
        Self::new(vec![a1, a2], vec![b1, b2], lambda)
    }

    /// Packs into `(α…, β…, λ)`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.dim() + 1);
        v.extend_from_slice(&self.alphas);
        v.extend_from_slice(&self.betas);
        v.push(self.lambda);
        v
    }

    pub fn from_slice(theta: &[f64]) -> Result<Self> {
        if theta.len() < 5 || theta.len().is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "parameter vector length {} is not 2p+1 with p >= 2",
                theta.len()
            )));
        }
        let p = (theta.len() - 1) / 2;
        Self::new(theta[..p].to_vec(), theta[p..2 * p].to_vec(), theta[2 * p])
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    pub fn marginal(&self, j: usize) -> BsParams {
        BsParams {
            alpha: self.alphas[j],
            beta: self.betas[j],
        }
    }

    fn check_point(&self, t: &[f64]) -> Result<()> {
        if t.len() != self.dim() {
            return Err(domain(
                "smvbs_pdf",
                format!("point has {} coordinates, expected {}", t.len(), self.dim()),
            ));
        }
        for &v in t {
            check_positive_time("smvbs_pdf", v)?;
        }
        Ok(())
    }

    /// Standardized values `a_j(t_j)`.
    pub fn a_values(&self, t: &[f64]) -> Result<Vec<f64>> {
        self.check_point(t)?;
        Ok(t.iter()
            .zip(self.alphas.iter().zip(&self.betas))
            .map(|(&x, (&a, &b))| a_transform(x, a, b))
            .collect())
    }

    pub fn log_pdf(&self, t: &[f64]) -> Result<f64> {
        let a = self.a_values(t)?;
        let prod: f64 = a.iter().product();
        let mut s = std::f64::consts::LN_2 + std_normal_log_cdf(self.lambda * prod);
        for (j, &aj) in a.iter().enumerate() {
            s += std_normal_log_pdf(aj) + log_jacobian(t[j], self.alphas[j], self.betas[j]);
        }
        Ok(s)
    }

    pub fn pdf(&self, t: &[f64]) -> Result<f64> {
        Ok(self.log_pdf(t)?.exp())
    }

    fn require_bivariate(&self, func: &'static str) -> Result<()> {
        if self.dim() == 2 {
            Ok(())
        } else {
            Err(domain(
                func,
                format!("defined for p = 2, got p = {}", self.dim()),
            ))
        }
    }

    /// Density of `T₁` given `T₂ = t2`: `2φ(a₁)Φ(λa₁a₂)` times the Jacobian.
    pub fn conditional_pdf(&self, t1: f64, t2: f64) -> Result<f64> {
        self.require_bivariate("conditional_pdf")?;
        let a = self.a_values(&[t1, t2])?;
        let log = std::f64::consts::LN_2
            + std_normal_log_pdf(a[0])
            + std_normal_log_cdf(self.lambda * a[0] * a[1])
            + log_jacobian(t1, self.alphas[0], self.betas[0]);
        Ok(log.exp())
    }

    /// `P(T₁ ≤ t1 | T₂ = t2) = Φ(a₁) − 2T(a₁, λa₂)`.
    pub fn conditional_cdf(&self, t1: f64, t2: f64) -> Result<f64> {
        self.require_bivariate("conditional_cdf")?;
        let a = self.a_values(&[t1, t2])?;
        let v = std_normal_cdf(a[0]) - 2.0 * owen_t(a[0], self.lambda * a[1]);
        Ok(v.clamp(0.0, 1.0))
    }

    /// One draw of the latent vector `Z`.
    ///
    /// Integrating `z_p` out of `2∏φ(z_j)Φ(λ∏z_j)` leaves independent
    /// standard normals for the first `p−1` coordinates; then
    /// `Z_p | rest ~ SN(λ∏_{j<p} z_j)`.
    pub fn sample_latent<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let p = self.dim();
        let mut prod = 1.0;
        for z in out.iter_mut().take(p - 1) {
            *z = rng.sample(StandardNormal);
            prod *= *z;
        }
        out[p - 1] = skew_normal(self.lambda * prod, rng);
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<Vec<f64>> {
        let p = self.dim();
        let mut z = vec![0.0; p];
        (0..n)
            .map(|_| {
                self.sample_latent(rng, &mut z);
                z.iter()
                    .enumerate()
                    .map(|(j, &zj)| from_standard(zj, self.alphas[j], self.betas[j]))
                    .collect()
            })
            .collect()
    }

    /// `n` reproducible draws (rows of length `p`).
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        if n == 0 {
            return Err(domain("smvbs_sample", "n must be at least 1"));
        }
        Ok(self.sample_with(n, &mut seeded(seed)))
    }

    /// Parameters of the transformed vector.
    pub fn transform(&self, action: &Transform) -> Result<Self> {
        let mut out = self.clone();
        match action {
            Transform::Scale(k) => {
                if k.len() != self.dim() {
                    return Err(domain(
                        "transform_params",
                        format!("{} scale factors for p = {}", k.len(), self.dim()),
                    ));
                }
                for (b, &kj) in out.betas.iter_mut().zip(k) {
                    if !(kj > 0.0 && kj.is_finite()) {
                        return Err(domain(
                            "transform_params",
                            format!("scale factor {kj} must be positive"),
                        ));
                    }
                    *b *= kj;
                }
            }
            Transform::Invert(margins) => {
                let mut seen = vec![false; self.dim()];
                for &j in margins {
                    if j >= self.dim() || seen[j] {
                        return Err(domain(
                            "transform_params",
                            format!("invalid or repeated margin index {j}"),
                        ));
                    }
                    seen[j] = true;
                    out.betas[j] = 1.0 / out.betas[j];
                    // a_j(1/t; β⁻¹) = −a_j(t; β)
                    out.lambda = -out.lambda;
                }
            }
        }
        Ok(out)
    }
}

/// Skew-normal `SN(shape)` draw via `δ|W₀| + √(1−δ²)W₁`.
pub fn skew_normal<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    let w0: f64 = rng.sample(StandardNormal);
    let w1: f64 = rng.sample(StandardNormal);
    let delta = shape / shape.hypot(1.0);
    let comp = 1.0 / shape.hypot(1.0);
    delta * w0.abs() + comp * w1
}

/// Correlation of the latent pair `(Z₁, Z₂)`:
/// `sign(λ)·U(3/2, 2, 1/(2λ²))/(2λ²√π)`.
pub fn latent_correlation(lambda: f64) -> Result<f64> {
    if !lambda.is_finite() {
        return Err(domain("latent_correlation", "lambda must be finite"));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let l2 = lambda * lambda;
    let u = confluent_u(1.5, 2.0, 1.0 / (2.0 * l2))?;
    Ok(lambda.signum() * u / (2.0 * l2 * std::f64::consts::PI.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMethod {
    ClosedForm,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductMoment {
    pub value: f64,
    pub std_error: f64,
    pub draws: usize,
    pub method: MomentMethod,
}

pub const DEFAULT_MOMENT_DRAWS: usize = 1_000_000;

/// `E(T₁T₂)` for the bivariate law: closed form at `λ = 0`, otherwise
/// a Monte-Carlo average over the exact sampler.
pub fn product_moment(theta: &SmvbsParams, draws: usize, seed: u64) -> Result<ProductMoment> {
    theta.require_bivariate("product_moment")?;
    let (a1, a2) = (theta.alphas[0], theta.alphas[1]);
    if theta.lambda == 0.0 {
        let a1s = a1 * a1;
        let a2s = a2 * a2;
        let value = theta.betas[0] * theta.betas[1] * (1.0 + 0.5 * (a1s + a2s) + 0.25 * a1s * a2s);
        return Ok(ProductMoment {
            value,
            std_error: 0.0,
            draws: 0,
            method: MomentMethod::ClosedForm,
        });
    }
    if draws < 2 {
        return Err(domain(
            "product_moment",
            "need at least 2 Monte-Carlo draws",
        ));
    }
    let mut rng = substream(seed, 1);
    let mut z = [0.0; 2];
    let (mut mean, mut m2) = (0.0, 0.0);
    for i in 0..draws {
        theta.sample_latent(&mut rng, &mut z);
        let v = from_standard(z[0], a1, theta.betas[0]) * from_standard(z[1], a2, theta.betas[1]);
        // Welford update
        let delta = v - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (v - mean);
    }
    let var = m2 / (draws - 1) as f64;
    Ok(ProductMoment {
        value: mean,
        std_error: (var / draws as f64).sqrt(),
        draws,
        method: MomentMethod::MonteCarlo,
    })
}

/// Coefficients appearing in the series representation of `E(T₁T₂)`.
///
/// Only the closed-form constants are kept here; the series itself is not
/// summed (`product_moment` uses Monte Carlo instead).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductMomentSeriesTerms {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl ProductMomentSeriesTerms {
    pub fn new(lambda: f64) -> Self {
        let l2 = lambda * lambda;
        Self {
            c1: 1.0,
            c2: 4.0 * l2 / 6.0,
            c3: 32.0 * l2 * l2 / 120.0,
        }
    }

    /// `u_i = (−1)^{i−1}·(1·3···(2i−3))/(i!·2^{3i})`, `i ≥ 2`; `v_k` is the same sequence.
    pub fn u(i: u32) -> f64 {
        assert!(i >= 2, "series index starts at 2");
        let odd: f64 = (1..i).map(|m| (2 * m - 1) as f64).product();
        let fact: f64 = (1..=i).map(f64::from).product();
        let sign = if i.is_multiple_of(2) { -1.0 } else { 1.0 };
        sign * odd / (fact * 8f64.powi(i as i32))
    }
}
