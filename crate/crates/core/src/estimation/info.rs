//! Expected (Fisher) information per observation, scaled by `n`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SmvbsParams;
use crate::rng::seeded;
use crate::specfun::{k_alpha, mills_weight};

pub const DEFAULT_MC_DRAWS: usize = 200_000;
pub const DEFAULT_SEED: u64 = 20_120_428;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McOptions {
    pub draws: usize,
    pub seed: u64,
}

impl Default for McOptions {
    fn default() -> Self {
        Self {
            draws: DEFAULT_MC_DRAWS,
            seed: DEFAULT_SEED,
        }
    }
}

/// An information matrix with element-wise Monte-Carlo standard errors
/// (all zero on the closed-form path).
#[derive(Debug, Clone, PartialEq)]
pub struct InformationMatrix {
    pub matrix: DMatrix<f64>,
    pub std_errors: DMatrix<f64>,
    pub draws: usize,
    pub closed_form: bool,
}

/// `b_j = [α_j K(α_j) + 1]/(α_j² β_j²)`, the per-observation `β_jβ_j` entry at `λ = 0`.
fn beta_beta_base(alpha: f64, beta: f64) -> Result<f64> {
    Ok((alpha * k_alpha(alpha)? + 1.0) / (alpha * alpha * beta * beta))
}

/// `Σ_θ = −E(L̈_θθ)` for a sample of size `n`.
pub fn expected_info(theta: &SmvbsParams, n: usize, mc: McOptions) -> Result<InformationMatrix> {
    if n == 0 {
        return Err(Error::InvalidParams("sample size must be positive".into()));
    }
    let p = theta.dim();
    let dim = 2 * p + 1;
    let nf = n as f64;
    let mut base = DMatrix::zeros(dim, dim);
    for j in 0..p {
        let (al, be) = (theta.alphas[j], theta.betas[j]);
        base[(j, j)] = 2.0 / (al * al);
        base[(p + j, p + j)] = beta_beta_base(al, be)?;
    }
    if theta.lambda == 0.0 {
        base[(2 * p, 2 * p)] = 2.0 / std::f64::consts::PI;
        return Ok(InformationMatrix {
            matrix: base * nf,
            std_errors: DMatrix::zeros(dim, dim),
            draws: 0,
            closed_form: true,
        });
    }
    if mc.draws < 2 {
        return Err(Error::InvalidParams(
            "need at least 2 Monte-Carlo draws".into(),
        ));
    }
    let (sum, sumsq) = mc_moments(theta, mc);
    let nd = mc.draws as f64;
    let mut matrix = DMatrix::zeros(dim, dim);
    let mut se = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        for m in 0..dim {
            let (lo, hi) = (k.min(m), k.max(m));
            let mean = sum[(lo, hi)] / nd;
            let var = (sumsq[(lo, hi)] / nd - mean * mean).max(0.0) * nd / (nd - 1.0);
            matrix[(k, m)] = nf * (base[(k, m)] + mean);
            se[(k, m)] = nf * (var / nd).sqrt();
        }
    }
    Ok(InformationMatrix {
        matrix,
        std_errors: se,
        draws: mc.draws,
        closed_form: false,
    })
}

/// Running sums (upper triangle) of the skewness-dependent integrands.
fn mc_moments(theta: &SmvbsParams, mc: McOptions) -> (DMatrix<f64>, DMatrix<f64>) {
    let p = theta.dim();
    let dim = 2 * p + 1;
    let lam = theta.lambda;
    let al = &theta.alphas;
    let be = &theta.betas;
    let mut rng = seeded(mc.seed);
    let mut z = vec![0.0; p];
    let mut d = vec![0.0; p];
    let mut q = vec![0.0; p];
    let mut v = DMatrix::zeros(dim, dim);
    let mut sum = DMatrix::zeros(dim, dim);
    let mut sumsq = DMatrix::zeros(dim, dim);
    for _ in 0..mc.draws {
        // the a-transform of an SMVBS draw is the latent vector itself
        theta.sample_latent(&mut rng, &mut z);
        let pr: f64 = z.iter().product();
        for j in 0..p {
            d[j] = (al[j] * al[j] * z[j] * z[j] + 4.0).sqrt();
            q[j] = (0..p).filter(|&k| k != j).map(|k| z[k]).product();
        }
        let w = mills_weight(lam * pr);
        let c = w * (lam * pr + w);
        let l2c = lam * lam * c;
        for j in 0..p {
            for m in j..p {
                v[(j, m)] = l2c * pr * pr / (al[j] * al[m]);
            }
            for m in 0..p {
                // (α_m, β_j)
                v[(m, p + j)] = l2c * pr * d[j] * q[j] / (2.0 * al[m] * al[j] * be[j]);
            }
            for m in j..p {
                let scale = 4.0 * al[j] * be[j] * al[m] * be[m];
                let mut e = l2c * d[j] * d[m] * q[j] * q[m] / scale;
                if m != j && p == 2 {
                    e -= lam * w * d[j] * d[m] / scale;
                }
                v[(p + j, p + m)] = e;
            }
            v[(j, 2 * p)] = -lam * c * pr * pr / al[j];
            v[(p + j, 2 * p)] = -lam * c * pr * d[j] * q[j] / (2.0 * al[j] * be[j]);
        }
        v[(2 * p, 2 * p)] = c * pr * pr;
        for k in 0..dim {
            for m in k..dim {
                let x = v[(k, m)];
                sum[(k, m)] += x;
                sumsq[(k, m)] += x * x;
            }
        }
    }
    (sum, sumsq)
}

/// `|Σ_θθ|` at `λ = 0`: `(2^{p+1} n^{2p+1}/π) ∏_j [α_j K(α_j) + 1]/(α_j⁴ β_j²)`.
pub fn fisher_determinant_at_zero(alphas: &[f64], betas: &[f64], n: usize) -> Result<f64> {
    let p = alphas.len();
    if betas.len() != p {
        return Err(Error::InvalidParams(
            "alphas and betas differ in length".into(),
        ));
    }
    let mut v = 2f64.powi(p as i32 + 1) * (n as f64).powi(2 * p as i32 + 1) / std::f64::consts::PI;
    for (&a, &b) in alphas.iter().zip(betas) {
        v *= (a * k_alpha(a)? + 1.0) / (a.powi(4) * b * b);
    }
    Ok(v)
}
