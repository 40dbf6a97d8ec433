//! Maximum-likelihood fitting with optional `λ` restriction, multi-start
//! and Wald intervals.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::info::{expected_info, McOptions};
use super::likelihood::{hessian_from, mme, score_from, LikelihoodWorkspace};
use super::optimize::{minimize, Problem, Settings};
use super::{loglik, SampleMatrix};
use crate::error::{Error, Result};
use crate::model::SmvbsParams;
use crate::specfun::std_normal_quantile;

/// Starting values of `λ` used by [`mle_multistart`] by default.
pub const DEFAULT_LAMBDA_STARTS: [f64; 5] = [-5.0, -2.0, 0.0, 3.0, 4.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InfoKind {
    Observed,
    ExpectedMc,
}

/// Which information matrix the covariance is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovSource {
    Observed,
    Expected(McOptions),
    Skip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    /// Holds `λ` at this value (e.g. `Some(0.0)` for the independence model).
    pub fixed_lambda: Option<f64>,
    pub init: Option<SmvbsParams>,
    pub covariance: CovSource,
    pub max_iter: usize,
    /// Bound on `‖score‖∞` in the original parameterization.
    pub gtol: f64,
    pub xtol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            fixed_lambda: None,
            init: None,
            covariance: CovSource::Expected(McOptions::default()),
            max_iter: 500,
            gtol: 1e-8,
            xtol: 1e-10,
        }
    }
}

impl FitOptions {
    pub fn restricted() -> Self {
        Self {
            fixed_lambda: Some(0.0),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub theta_hat: SmvbsParams,
    pub loglik: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    /// Covariance of the free parameters, ordered `(α, β, λ)` with `λ`
    /// omitted when fixed.
    #[serde(skip)]
    pub cov: Option<DMatrix<f64>>,
    pub info_kind: Option<InfoKind>,
    pub converged: bool,
    pub fixed_lambda: Option<f64>,
    pub n: usize,
    pub warnings: Vec<String>,
}

impl FitResult {
    pub fn param_names(&self) -> Vec<String> {
        let p = self.theta_hat.dim();
        let mut v: Vec<String> = (1..=p).map(|j| format!("alpha{j}")).collect();
        v.extend((1..=p).map(|j| format!("beta{j}")));
        if self.fixed_lambda.is_none() {
            v.push("lambda".into());
        }
        v
    }

    pub fn estimates(&self) -> Vec<f64> {
        let mut v = self.theta_hat.to_vec();
        if self.fixed_lambda.is_some() {
            v.pop();
        }
        v
    }

    pub fn std_errors(&self) -> Option<Vec<f64>> {
        self.cov
            .as_ref()
            .map(|c| c.diagonal().iter().map(|v| v.max(0.0).sqrt()).collect())
    }

    pub fn cov_rows(&self) -> Option<Vec<Vec<f64>>> {
        self.cov.as_ref().map(matrix_rows)
    }
}

pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

/// Negative log-likelihood on `(log α, log β, λ)`, or on `(log α, log β)`
/// when `λ` is fixed.
struct NegLogLik<'a> {
    sample: &'a SampleMatrix,
    fixed_lambda: Option<f64>,
}

impl NegLogLik<'_> {
    fn p(&self) -> usize {
        self.sample.p()
    }

    fn theta(&self, x: &DVector<f64>) -> Option<SmvbsParams> {
        let p = self.p();
        let lam = self.fixed_lambda.unwrap_or_else(|| x[2 * p]);
        let alphas = (0..p).map(|j| x[j].exp()).collect();
        let betas = (0..p).map(|j| x[p + j].exp()).collect();
        SmvbsParams::new(alphas, betas, lam).ok()
    }

    fn to_x(&self, theta: &SmvbsParams) -> DVector<f64> {
        let p = self.p();
        let mut v: Vec<f64> = theta.alphas.iter().map(|a| a.ln()).collect();
        v.extend(theta.betas.iter().map(|b| b.ln()));
        if self.fixed_lambda.is_none() {
            v.push(theta.lambda);
        }
        debug_assert_eq!(v.len(), self.dim_free(p));
        DVector::from_vec(v)
    }

    fn dim_free(&self, p: usize) -> usize {
        2 * p + usize::from(self.fixed_lambda.is_none())
    }
}

impl Problem for NegLogLik<'_> {
    fn eval(&self, x: &DVector<f64>) -> Option<(f64, DVector<f64>)> {
        let theta = self.theta(x)?;
        let ll = loglik(&theta, self.sample).ok()?;
        if !ll.is_finite() {
            return None;
        }
        let ws = LikelihoodWorkspace::new(&theta, self.sample).ok()?;
        let g = score_from(&theta, self.sample, &ws);
        let v = theta.to_vec();
        let k = self.dim_free(self.p());
        let gx = DVector::from_fn(k, |i, _| {
            if i < 2 * self.p() {
                -g[i] * v[i]
            } else {
                -g[i]
            }
        });
        Some((-ll, gx))
    }

    fn hessian(&self, x: &DVector<f64>) -> Option<DMatrix<f64>> {
        let theta = self.theta(x)?;
        let ws = LikelihoodWorkspace::new(&theta, self.sample).ok()?;
        let g = score_from(&theta, self.sample, &ws);
        let h = hessian_from(&theta, self.sample, &ws);
        let v = theta.to_vec();
        let np = 2 * self.p();
        let jac = |i: usize| if i < np { v[i] } else { 1.0 };
        let k = self.dim_free(self.p());
        Some(DMatrix::from_fn(k, k, |i, m| {
            let mut e = h[(i, m)] * jac(i) * jac(m);
            if i == m && i < np {
                e += g[i] * v[i];
            }
            -e
        }))
    }

    fn stop_norm(&self, x: &DVector<f64>, grad: &DVector<f64>) -> f64 {
        let np = 2 * self.p();
        grad.iter()
            .enumerate()
            .map(|(i, &gi)| {
                if i < np {
                    (gi / x[i].exp()).abs()
                } else {
                    gi.abs()
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Maximum-likelihood estimate; non-convergence is reported through
/// `converged = false` together with the best iterate.
pub fn mle(sample: &SampleMatrix, options: &FitOptions) -> Result<FitResult> {
    let p = sample.p();
    if p < 2 {
        return Err(Error::Data("the model needs at least 2 columns".into()));
    }
    let init = match &options.init {
        Some(t) => t.clone(),
        None => {
            let m = mme(sample);
            if !m.degenerate.is_empty() {
                return Err(Error::Degenerate(format!(
                    "constant column(s) {:?}: moment estimate of alpha is 0",
                    m.degenerate.iter().map(|j| j + 1).collect::<Vec<_>>()
                )));
            }
            SmvbsParams::new(m.alphas, m.betas, 0.0)?
        }
    };
    if init.dim() != p {
        return Err(Error::InvalidParams(
            "initial value has the wrong dimension".into(),
        ));
    }
    let prob = NegLogLik {
        sample,
        fixed_lambda: options.fixed_lambda,
    };
    let mut start = init;
    if let Some(l) = options.fixed_lambda {
        start.lambda = l;
    }
    let settings = Settings {
        max_iter: options.max_iter,
        gtol: options.gtol,
        xtol: options.xtol,
        max_step: 1.0,
    };
    let out = minimize(&prob, prob.to_x(&start), &settings).ok_or_else(|| {
        Error::Numerical("log-likelihood is not finite at the starting value".into())
    })?;
    let theta_hat = prob.theta(&out.x).expect("iterates stay in the domain");
    let mut warnings = Vec::new();
    if theta_hat.alphas.iter().any(|&a| a < 1e-6) {
        warnings.push("a shape estimate is approaching the boundary alpha -> 0".into());
    }
    let mut fit = FitResult {
        loglik: -out.f,
        iterations: out.iterations,
        grad_norm: out.stop_norm,
        cov: None,
        info_kind: None,
        converged: out.converged,
        fixed_lambda: options.fixed_lambda,
        n: sample.n(),
        warnings,
        theta_hat,
    };
    attach_covariance(&mut fit, sample, options.covariance)?;
    Ok(fit)
}

fn free_indices(p: usize, lambda_free: bool) -> Vec<usize> {
    (0..2 * p + usize::from(lambda_free)).collect()
}

fn attach_covariance(fit: &mut FitResult, sample: &SampleMatrix, src: CovSource) -> Result<()> {
    let idx = free_indices(sample.p(), fit.fixed_lambda.is_none());
    let (info, kind) = match src {
        CovSource::Skip => return Ok(()),
        CovSource::Observed => (
            super::observed_info(&fit.theta_hat, sample)?,
            InfoKind::Observed,
        ),
        CovSource::Expected(mc) => (
            expected_info(&fit.theta_hat, sample.n(), mc)?.matrix,
            InfoKind::ExpectedMc,
        ),
    };
    let sub = info.select_rows(&idx).select_columns(&idx);
    match sub.clone().cholesky() {
        Some(ch) => {
            let inv = ch.inverse();
            fit.cov = Some((&inv + inv.transpose()) * 0.5);
            fit.info_kind = Some(kind);
        }
        None => fit
            .warnings
            .push("information matrix is not positive definite; no covariance".into()),
    }
    Ok(())
}

/// Fits from several starting values of `λ` (ignored for restricted fits).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiStartFit {
    pub starts: Vec<f64>,
    pub fits: Vec<FitResult>,
    pub best: usize,
    /// Largest pairwise `‖θ̂_a − θ̂_b‖∞` among converged fits.
    pub max_distance: f64,
    /// Distinct optima whose log-likelihoods are within `1e-4`.
    pub ambiguous: bool,
}

impl MultiStartFit {
    pub fn best_fit(&self) -> &FitResult {
        &self.fits[self.best]
    }
}

pub fn mle_multistart(
    sample: &SampleMatrix,
    starts: &[f64],
    options: &FitOptions,
) -> Result<MultiStartFit> {
    if starts.is_empty() {
        return Err(Error::InvalidParams("no starting values".into()));
    }
    let m = mme(sample);
    let mut fits = Vec::with_capacity(starts.len());
    for &l in starts {
        let mut o = options.clone();
        if o.init.is_none() {
            o.init = Some(SmvbsParams::new(m.alphas.clone(), m.betas.clone(), l)?);
        } else if let Some(t) = o.init.as_mut() {
            t.lambda = l;
        }
        // covariance only for the selected fit
        o.covariance = CovSource::Skip;
        fits.push(mle(sample, &o)?);
    }
    let best = (0..fits.len())
        .max_by(|&a, &b| {
            let key = |f: &FitResult| {
                if f.converged {
                    f.loglik
                } else {
                    f64::NEG_INFINITY
                }
            };
            key(&fits[a]).total_cmp(&key(&fits[b]))
        })
        .expect("non-empty");
    let mut max_distance: f64 = 0.0;
    let mut ambiguous = false;
    for a in 0..fits.len() {
        for b in a + 1..fits.len() {
            let dist = fits[a]
                .theta_hat
                .to_vec()
                .iter()
                .zip(fits[b].theta_hat.to_vec())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            max_distance = max_distance.max(dist);
            let close = (fits[a].loglik - fits[b].loglik).abs() <= 1e-4;
            if close && dist > 1e-4 && fits[a].converged && fits[b].converged {
                ambiguous = true;
            }
        }
    }
    attach_covariance(&mut fits[best], sample, options.covariance)?;
    Ok(MultiStartFit {
        starts: starts.to_vec(),
        fits,
        best,
        max_distance,
        ambiguous,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interval {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Wald intervals `θ̂_j ± z_{γ/2}·se_j` at significance level `gamma`.
pub fn confidence_intervals(fit: &FitResult, gamma: f64) -> Result<Vec<Interval>> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidParams(format!(
            "significance level {gamma} not in (0, 1]"
        )));
    }
    let se = fit
        .std_errors()
        .ok_or_else(|| Error::Numerical("fit has no covariance matrix".into()))?;
    let z = std_normal_quantile(1.0 - gamma / 2.0)?;
    Ok(fit
        .param_names()
        .into_iter()
        .zip(fit.estimates())
        .zip(se)
        .map(|((name, est), s)| Interval {
            name,
            estimate: est,
            std_error: s,
            lower: est - z * s,
            upper: est + z * s,
        })
        .collect())
}
