//! Bivariate BS law driven by a correlated bivariate normal.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::bs::{a_transform, check_positive_time, d_transform, from_standard, log_jacobian};
use crate::error::{Error, Result};
use crate::estimation::{minimize, mme, Problem, SampleMatrix, Settings};
use crate::rng::seeded;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KbjParams {
    pub alphas: [f64; 2],
    pub betas: [f64; 2],
    pub rho: f64,
}

impl KbjParams {
    pub fn new(alphas: [f64; 2], betas: [f64; 2], rho: f64) -> Result<Self> {
        for j in 0..2 {
            if !(alphas[j] > 0.0 && betas[j] > 0.0 && alphas[j].is_finite() && betas[j].is_finite())
            {
                return Err(Error::InvalidParams(format!(
                    "margin {}: alpha and beta must be positive",
                    j + 1
                )));
            }
        }
        if !(rho.abs() < 1.0) {
            return Err(Error::InvalidParams(format!("rho = {rho} not in (-1, 1)")));
        }
        Ok(Self { alphas, betas, rho })
    }

    pub fn log_pdf(&self, t1: f64, t2: f64) -> Result<f64> {
        check_positive_time("kbj_pdf", t1)?;
        check_positive_time("kbj_pdf", t2)?;
        let a1 = a_transform(t1, self.alphas[0], self.betas[0]);
        let a2 = a_transform(t2, self.alphas[1], self.betas[1]);
        let r = self.rho;
        let om = 1.0 - r * r;
        let q = (a1 * a1 - 2.0 * r * a1 * a2 + a2 * a2) / om;
        Ok(-(2.0 * std::f64::consts::PI).ln() - 0.5 * om.ln() - 0.5 * q
            + log_jacobian(t1, self.alphas[0], self.betas[0])
            + log_jacobian(t2, self.alphas[1], self.betas[1]))
    }

    pub fn pdf(&self, t1: f64, t2: f64) -> Result<f64> {
        Ok(self.log_pdf(t1, t2)?.exp())
    }

    /// `n` draws via correlated standard normals mapped through each margin.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        if n == 0 {
            return Err(Error::Domain {
                func: "kbj_sample",
                msg: "n must be at least 1".into(),
            });
        }
        let mut rng = seeded(seed);
        let s = (1.0 - self.rho * self.rho).sqrt();
        Ok((0..n)
            .map(|_| {
                let z1: f64 = rng.sample(StandardNormal);
                let w: f64 = rng.sample(StandardNormal);
                let z2 = self.rho * z1 + s * w;
                vec![
                    from_standard(z1, self.alphas[0], self.betas[0]),
                    from_standard(z2, self.alphas[1], self.betas[1]),
                ]
            })
            .collect())
    }

    fn to_vec(self) -> Vec<f64> {
        vec![
            self.alphas[0],
            self.alphas[1],
            self.betas[0],
            self.betas[1],
            self.rho,
        ]
    }
}

fn check_bivariate(sample: &SampleMatrix) -> Result<()> {
    if sample.p() != 2 {
        return Err(Error::Data(format!(
            "the comparison model is bivariate; sample has {} columns",
            sample.p()
        )));
    }
    Ok(())
}

pub fn kbj_log_density_terms(params: &KbjParams, sample: &SampleMatrix) -> Result<Vec<f64>> {
    check_bivariate(sample)?;
    (0..sample.n())
        .map(|i| params.log_pdf(sample.column(0)[i], sample.column(1)[i]))
        .collect()
}

/// Log-likelihood and gradient in `(α, β, ρ)`.
fn loglik_grad(params: &KbjParams, sample: &SampleMatrix) -> (f64, [f64; 5]) {
    let r = params.rho;
    let om = 1.0 - r * r;
    let mut ll = 0.0;
    let mut g = [0.0; 5];
    for i in 0..sample.n() {
        let t = [sample.column(0)[i], sample.column(1)[i]];
        let mut a = [0.0; 2];
        let mut e = [0.0; 2];
        for j in 0..2 {
            let (al, be) = (params.alphas[j], params.betas[j]);
            a[j] = a_transform(t[j], al, be);
            e[j] = -d_transform(t[j], be) / (2.0 * al * be);
            ll += log_jacobian(t[j], al, be);
        }
        let num = a[0] * a[0] - 2.0 * r * a[0] * a[1] + a[1] * a[1];
        ll += -(2.0 * std::f64::consts::PI).ln() - 0.5 * om.ln() - 0.5 * num / om;
        for j in 0..2 {
            let (al, be) = (params.alphas[j], params.betas[j]);
            // ½∂q/∂a_j
            let half_dq = (a[j] - r * a[1 - j]) / om;
            g[j] += -1.0 / al + half_dq * a[j] / al;
            g[2 + j] += -0.5 / be + 1.0 / (t[j] + be) - half_dq * e[j];
        }
        g[4] += r / om + a[0] * a[1] / om - r * num / (om * om);
    }
    (ll, g)
}

struct KbjProblem<'a> {
    sample: &'a SampleMatrix,
}

impl KbjProblem<'_> {
    fn params(x: &DVector<f64>) -> Option<KbjParams> {
        KbjParams::new(
            [x[0].exp(), x[1].exp()],
            [x[2].exp(), x[3].exp()],
            x[4].tanh(),
        )
        .ok()
    }

    fn grad_x(&self, x: &DVector<f64>) -> Option<(f64, DVector<f64>)> {
        let p = Self::params(x)?;
        let (ll, g) = loglik_grad(&p, self.sample);
        if !ll.is_finite() {
            return None;
        }
        let v = p.to_vec();
        let jac = [v[0], v[1], v[2], v[3], 1.0 - p.rho * p.rho];
        Some((-ll, DVector::from_fn(5, |i, _| -g[i] * jac[i])))
    }
}

impl Problem for KbjProblem<'_> {
    fn eval(&self, x: &DVector<f64>) -> Option<(f64, DVector<f64>)> {
        self.grad_x(x)
    }

    fn hessian(&self, x: &DVector<f64>) -> Option<DMatrix<f64>> {
        // central differences of the analytic gradient
        let mut h = DMatrix::zeros(5, 5);
        for k in 0..5 {
            let step = 1e-6 * x[k].abs().max(1.0);
            let mut up = x.clone();
            up[k] += step;
            let mut dn = x.clone();
            dn[k] -= step;
            let gu = self.grad_x(&up)?.1;
            let gd = self.grad_x(&dn)?.1;
            for m in 0..5 {
                h[(m, k)] = (gu[m] - gd[m]) / (2.0 * step);
            }
        }
        Some((&h + h.transpose()) * 0.5)
    }

    fn stop_norm(&self, x: &DVector<f64>, grad: &DVector<f64>) -> f64 {
        let Some(p) = Self::params(x) else {
            return f64::INFINITY;
        };
        let v = p.to_vec();
        let jac = [v[0], v[1], v[2], v[3], 1.0 - p.rho * p.rho];
        (0..5).map(|i| (grad[i] / jac[i]).abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KbjFit {
    pub params: KbjParams,
    pub loglik: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    pub converged: bool,
    pub n: usize,
}

/// MLE started from the moment estimates and the sample correlation of
/// the standardized values.
pub fn kbj_mle(sample: &SampleMatrix) -> Result<KbjFit> {
    check_bivariate(sample)?;
    let m = mme(sample);
    if !m.degenerate.is_empty() {
        return Err(Error::Degenerate("constant column in the sample".into()));
    }
    let a: Vec<[f64; 2]> = (0..sample.n())
        .map(|i| {
            [
                a_transform(sample.column(0)[i], m.alphas[0], m.betas[0]),
                a_transform(sample.column(1)[i], m.alphas[1], m.betas[1]),
            ]
        })
        .collect();
    let rho0 = correlation(&a).clamp(-0.99, 0.99);
    let x0 = DVector::from_vec(vec![
        m.alphas[0].ln(),
        m.alphas[1].ln(),
        m.betas[0].ln(),
        m.betas[1].ln(),
        rho0.atanh(),
    ]);
    let prob = KbjProblem { sample };
    let settings = Settings {
        max_iter: 500,
        gtol: 1e-6,
        xtol: 1e-8,
        max_step: 1.0,
    };
    let out = minimize(&prob, x0, &settings)
        .ok_or_else(|| Error::Numerical("likelihood not finite at the start".into()))?;
    Ok(KbjFit {
        params: KbjProblem::params(&out.x).expect("iterates stay in the domain"),
        loglik: -out.f,
        iterations: out.iterations,
        grad_norm: out.stop_norm,
        converged: out.converged,
        n: sample.n(),
    })
}

fn correlation(a: &[[f64; 2]]) -> f64 {
    let n = a.len() as f64;
    let m0 = a.iter().map(|v| v[0]).sum::<f64>() / n;
    let m1 = a.iter().map(|v| v[1]).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for v in a {
        sxy += (v[0] - m0) * (v[1] - m1);
        sxx += (v[0] - m0) * (v[0] - m0);
        syy += (v[1] - m1) * (v[1] - m1);
    }
    sxy / (sxx * syy).sqrt()
}
