//! Constant-free log-likelihood of the SMVBS model with its score and
//! closed-form Hessian.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::bs::{a_transform, d_transform};
use crate::error::{Error, Result};
use crate::estimation::SampleMatrix;
use crate::model::SmvbsParams;
use crate::specfun::{mills_weight, std_normal_log_cdf};

/// Per-observation quantities shared by the likelihood, score and Hessian.
#[derive(Debug, Clone)]
pub struct LikelihoodWorkspace {
    /// `a_ji`, row-major `n × p`.
    pub a: Vec<f64>,
    /// `d_ij = √(t/β) + √(β/t)`, row-major `n × p`.
    pub d: Vec<f64>,
    /// `∏_j a_ji`.
    pub prod: Vec<f64>,
    /// Mills-ratio weights `φ(λ∏a)/Φ(λ∏a)`.
    pub w: Vec<f64>,
    n: usize,
    p: usize,
}

impl LikelihoodWorkspace {
    pub fn new(theta: &SmvbsParams, sample: &SampleMatrix) -> Result<Self> {
        check_dims(theta, sample)?;
        let (n, p) = (sample.n(), sample.p());
        let mut a = vec![0.0; n * p];
        let mut d = vec![0.0; n * p];
        for j in 0..p {
            let (al, be) = (theta.alphas[j], theta.betas[j]);
            for (i, &t) in sample.column(j).iter().enumerate() {
                a[i * p + j] = a_transform(t, al, be);
                d[i * p + j] = d_transform(t, be);
            }
        }
        let prod: Vec<f64> = a.chunks(p).map(|r| r.iter().product()).collect();
        let w = prod
            .iter()
            .map(|&pr| mills_weight(theta.lambda * pr))
            .collect();
        Ok(Self {
            a,
            d,
            prod,
            w,
            n,
            p,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row_a(&self, i: usize) -> &[f64] {
        &self.a[i * self.p..(i + 1) * self.p]
    }

    pub fn row_d(&self, i: usize) -> &[f64] {
        &self.d[i * self.p..(i + 1) * self.p]
    }
}

fn check_dims(theta: &SmvbsParams, sample: &SampleMatrix) -> Result<()> {
    if theta.dim() != sample.p() {
        return Err(Error::InvalidParams(format!(
            "parameters have p = {} but the sample has {} columns",
            theta.dim(),
            sample.p()
        )));
    }
    Ok(())
}

/// Modified moment estimates; `degenerate` lists constant columns (α̌ = 0).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MmeEstimate {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub degenerate: Vec<usize>,
}

pub fn mme(sample: &SampleMatrix) -> MmeEstimate {
    let mut out = MmeEstimate {
        alphas: Vec::with_capacity(sample.p()),
        betas: Vec::with_capacity(sample.p()),
        degenerate: Vec::new(),
    };
    for j in 0..sample.p() {
        let (s, r) = (sample.s_bar()[j], sample.r_bar()[j]);
        let ratio = (s / r).sqrt() - 1.0;
        let col = sample.column(j);
        if col.iter().all(|&v| v == col[0]) || ratio <= 0.0 {
            out.degenerate.push(j);
            out.alphas.push(0.0);
            out.betas.push(col[0].max(r.min(s)));
        } else {
            out.alphas.push((2.0 * ratio).sqrt());
            out.betas.push((s * r).sqrt());
        }
    }
    out
}

/// `ℓ(θ) = Σ_i Σ_j [−log α_j − ½log β_j + log(t_ji + β_j) − a_ji²/2] + Σ_i log Φ(λ∏_j a_ji)`.
pub fn loglik(theta: &SmvbsParams, sample: &SampleMatrix) -> Result<f64> {
    Ok(loglik_terms(theta, sample)?.iter().sum())
}

/// Per-observation contributions to [`loglik`].
pub fn loglik_terms(theta: &SmvbsParams, sample: &SampleMatrix) -> Result<Vec<f64>> {
    check_dims(theta, sample)?;
    let p = sample.p();
    let base: f64 = (0..p)
        .map(|j| -theta.alphas[j].ln() - 0.5 * theta.betas[j].ln())
        .sum();
    Ok((0..sample.n())
        .map(|i| {
            let mut s = base;
            let mut prod = 1.0;
            for j in 0..p {
                let t = sample.column(j)[i];
                let a = a_transform(t, theta.alphas[j], theta.betas[j]);
                prod *= a;
                s += (t + theta.betas[j]).ln() - 0.5 * a * a;
            }
            s + std_normal_log_cdf(theta.lambda * prod)
        })
        .collect())
}

/// Full log-densities `log f(t_i; θ)` of each observation.
pub fn log_density_terms(theta: &SmvbsParams, sample: &SampleMatrix) -> Result<Vec<f64>> {
    check_dims(theta, sample)?;
    (0..sample.n())
        .map(|i| theta.log_pdf(&sample.row(i)))
        .collect()
}

/// Gradient `(∂ℓ/∂α, ∂ℓ/∂β, ∂ℓ/∂λ)`.
pub fn score(theta: &SmvbsParams, sample: &SampleMatrix) -> Result<DVector<f64>> {
    let ws = LikelihoodWorkspace::new(theta, sample)?;
    Ok(score_from(theta, sample, &ws))
}

/// Per-observation score vectors (rows sum to [`score`]).
pub fn score_terms(theta: &SmvbsParams, sample: &SampleMatrix) -> Result<Vec<DVector<f64>>> {
    let ws = LikelihoodWorkspace::new(theta, sample)?;
    let p = theta.dim();
    let mut q = vec![0.0; p];
    Ok((0..ws.n())
        .map(|i| {
            let mut g = DVector::zeros(2 * p + 1);
            add_score_row(theta, sample, &ws, i, &mut q, &mut g);
            g
        })
        .collect())
}

fn add_score_row(
    theta: &SmvbsParams,
    sample: &SampleMatrix,
    ws: &LikelihoodWorkspace,
    i: usize,
    q: &mut [f64],
    g: &mut DVector<f64>,
) {
    let p = theta.dim();
    let lam = theta.lambda;
    let a = ws.row_a(i);
    let d = ws.row_d(i);
    let (pr, w) = (ws.prod[i], ws.w[i]);
    leave_one_out(a, q);
    for j in 0..p {
        let (al, be) = (theta.alphas[j], theta.betas[j]);
        let t = sample.column(j)[i];
        g[j] += (a[j] * a[j] - 1.0 - w * lam * pr) / al;
        let e = -d[j] / (2.0 * al * be);
        g[p + j] += -0.5 / be + 1.0 / (t + be) - a[j] * e + w * lam * e * q[j];
    }
    g[2 * p] += w * pr;
}

pub(crate) fn score_from(
    theta: &SmvbsParams,
    sample: &SampleMatrix,
    ws: &LikelihoodWorkspace,
) -> DVector<f64> {
    let p = theta.dim();
    let mut g = DVector::zeros(2 * p + 1);
    let mut q = vec![0.0; p];
    for i in 0..ws.n() {
        add_score_row(theta, sample, ws, i, &mut q, &mut g);
    }
    g
}

/// `q_j = ∏_{k≠j} a_k` without division.
fn leave_one_out(a: &[f64], q: &mut [f64]) {
    for (j, qj) in q.iter_mut().enumerate().take(a.len()) {
        *qj = a
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, &v)| v)
            .product();
    }
}

fn leave_two_out(a: &[f64], j: usize, m: usize) -> f64 {
    a.iter()
        .enumerate()
        .filter(|&(k, _)| k != j && k != m)
        .map(|(_, &v)| v)
        .product()
}

/// Hessian `∂²ℓ/∂θ∂θᵀ` in the order `(α, β, λ)`.
pub fn hessian(theta: &SmvbsParams, sample: &SampleMatrix) -> Result<DMatrix<f64>> {
    let ws = LikelihoodWorkspace::new(theta, sample)?;
    Ok(hessian_from(theta, sample, &ws))
}

pub(crate) fn hessian_from(
    theta: &SmvbsParams,
    sample: &SampleMatrix,
    ws: &LikelihoodWorkspace,
) -> DMatrix<f64> {
    let p = theta.dim();
    let dim = 2 * p + 1;
    let lam = theta.lambda;
    let mut hm = DMatrix::zeros(dim, dim);
    let mut q = vec![0.0; p];
    // first derivatives of P wrt (α, β), and of x = λP wrt every θ
    let mut dp = vec![0.0; 2 * p];
    let mut dx = vec![0.0; dim];
    let mut e = vec![0.0; p];
    for i in 0..ws.n() {
        let a = ws.row_a(i);
        let d = ws.row_d(i);
        let (pr, w) = (ws.prod[i], ws.w[i]);
        let x = lam * pr;
        let h = -w * (x + w);
        leave_one_out(a, &mut q);
        for j in 0..p {
            let (al, be) = (theta.alphas[j], theta.betas[j]);
            e[j] = -d[j] / (2.0 * al * be);
            dp[j] = -pr / al;
            dp[p + j] = e[j] * q[j];
        }
        for k in 0..2 * p {
            dx[k] = lam * dp[k];
        }
        dx[2 * p] = pr;

        for j in 0..p {
            let (al, be) = (theta.alphas[j], theta.betas[j]);
            let t = sample.column(j)[i];
            // margin-only terms
            hm[(j, j)] += (1.0 - 3.0 * a[j] * a[j]) / (al * al);
            hm[(j, p + j)] += -a[j] * d[j] / (al * al * be);
            hm[(p + j, p + j)] +=
                0.5 / (be * be) - 1.0 / ((t + be) * (t + be)) - t / (al * al * be * be * be);
        }
        // log Φ(x): h·x_k·x_m + w·x_km
        for k in 0..dim {
            for m in k..dim {
                let mut v = h * dx[k] * dx[m];
                v += w * second_x(k, m, p, lam, pr, a, d, &q, &e, theta);
                hm[(k, m)] += v;
            }
        }
    }
    for k in 0..dim {
        for m in 0..k {
            hm[(k, m)] = hm[(m, k)];
        }
    }
    hm
}

/// `∂²(λP)/∂θ_k∂θ_m` for `k ≤ m`.
#[allow(clippy::too_many_arguments)]
fn second_x(
    k: usize,
    m: usize,
    p: usize,
    lam: f64,
    pr: f64,
    a: &[f64],
    d: &[f64],
    q: &[f64],
    e: &[f64],
    theta: &SmvbsParams,
) -> f64 {
    let al = &theta.alphas;
    let be = &theta.betas;
    let lam_idx = 2 * p;
    if m == lam_idx {
        if k == lam_idx {
            return 0.0;
        }
        // ∂P/∂θ_k
        return if k < p {
            -pr / al[k]
        } else {
            e[k - p] * q[k - p]
        };
    }
    if m < p {
        // both α
        let f = if k == m { 2.0 } else { 1.0 };
        return lam * f * pr / (al[k] * al[m]);
    }
    let jb = m - p;
    if k < p {
        // α_k, β_jb
        return -lam * e[jb] * q[jb] / al[k];
    }
    let kb = k - p;
    if kb == jb {
        let de = a[jb] / (4.0 * be[jb] * be[jb]) + d[jb] / (2.0 * al[jb] * be[jb] * be[jb]);
        lam * de * q[jb]
    } else {
        lam * e[kb] * e[jb] * leave_two_out(a, kb, jb)
    }
}

/// Negative Hessian.
pub fn observed_info(theta: &SmvbsParams, sample: &SampleMatrix) -> Result<DMatrix<f64>> {
    Ok(-hessian(theta, sample)?)
}

/// `α̂_j(β_j) = (s̄_j/β_j + β_j/r̄_j − 2)^{1/2}` for one column.
pub fn alpha_given_beta(beta: f64, column: &[f64]) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "beta = {beta} must be positive"
        )));
    }
    if column.is_empty() {
        return Err(Error::Data("empty column".into()));
    }
    let n = column.len() as f64;
    let s = column.iter().sum::<f64>() / n;
    let r = n / column.iter().map(|v| 1.0 / v).sum::<f64>();
    Ok(alpha_from_means(beta, s, r))
}

fn alpha_from_means(beta: f64, s: f64, r: f64) -> f64 {
    (s / beta + beta / r - 2.0).max(0.0).sqrt()
}

/// Log-likelihood with each `α_j` replaced by `α̂_j(β_j)`.
pub fn profile_loglik(betas: &[f64], lambda: f64, sample: &SampleMatrix) -> Result<f64> {
    if betas.len() != sample.p() {
        return Err(Error::InvalidParams(format!(
            "{} scale values for {} columns",
            betas.len(),
            sample.p()
        )));
    }
    let alphas = betas
        .iter()
        .enumerate()
        .map(|(j, &b)| {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::InvalidParams(format!("beta = {b} must be positive")));
            }
            Ok(alpha_from_means(b, sample.s_bar()[j], sample.r_bar()[j]))
        })
        .collect::<Result<Vec<_>>>()?;
    let theta = SmvbsParams::new(alphas, betas.to_vec(), lambda)?;
    loglik(&theta, sample)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::volle;

    #[test]
    fn mme_on_bundled_data() {
        let m = mme(&volle(false));
        let want = [0.2035, 0.4099, 115.7457, 91.7220];
        let got = [m.alphas[0], m.alphas[1], m.betas[0], m.betas[1]];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 5e-5, "{g} vs {w}");
        }
        assert!(m.degenerate.is_empty());
    }

    #[test]
    fn mme_constant_column() {
        let s = SampleMatrix::new(vec![vec![3.0, 1.0], vec![3.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let m = mme(&s);
        assert_eq!(m.degenerate, vec![0]);
        assert_eq!(m.alphas[0], 0.0);
        assert!((m.betas[0] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn alpha_given_beta_recovers_mme() {
        let s = volle(false);
        let m = mme(&s);
        for j in 0..2 {
            let a = alpha_given_beta(m.betas[j], s.column(j)).unwrap();
            assert!((a - m.alphas[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn loglik_zero_lambda_matches_density_sum() {
        let s = volle(false);
        let th = SmvbsParams::bivariate(0.2, 0.4, 115.0, 92.0, 0.0).unwrap();
        let n = s.n() as f64;
        for lam in [0.0, 1.3] {
            let th = SmvbsParams {
                lambda: lam,
                ..th.clone()
            };
            let dens: f64 = log_density_terms(&th, &s).unwrap().iter().sum();
            // the density adds ln 2 and −ln(2√(2π)) − (3/2)ln t per coordinate
            let ln_t: f64 = (0..2)
                .map(|j| s.column(j).iter().map(|t| t.ln()).sum::<f64>())
                .sum();
            let konst = n * std::f64::consts::LN_2
                - 2.0 * n * (2.0 * (2.0 * std::f64::consts::PI).sqrt()).ln()
                - 1.5 * ln_t;
            let ll = loglik(&th, &s).unwrap();
            assert!((dens - (ll + konst)).abs() < 1e-9);
        }
    }

    #[test]
    fn score_lambda_component_at_zero() {
        let s = volle(false);
        let th = SmvbsParams::bivariate(0.2, 0.4, 115.0, 92.0, 0.0).unwrap();
        let g = score(&th, &s).unwrap();
        let ws = LikelihoodWorkspace::new(&th, &s).unwrap();
        let want = (2.0 / std::f64::consts::PI).sqrt() * ws.prod.iter().sum::<f64>();
        assert!((g[4] - want).abs() < 1e-12 * want.abs().max(1.0));
    }

    fn fd_check(theta: &SmvbsParams, sample: &SampleMatrix) {
        let v = theta.to_vec();
        let g = score(theta, sample).unwrap();
        let hm = hessian(theta, sample).unwrap();
        for k in 0..v.len() {
            let hstep = 1e-5 * v[k].abs().max(1.0);
            let at = |dx: f64| {
                let mut u = v.clone();
                u[k] += dx;
                SmvbsParams::from_slice(&u).unwrap()
            };
            let (up, dn) = (at(hstep), at(-hstep));
            let fd = (loglik(&up, sample).unwrap() - loglik(&dn, sample).unwrap()) / (2.0 * hstep);
            assert!(
                (fd - g[k]).abs() <= 1e-6 * g[k].abs().max(1.0),
                "score {k}: {fd} vs {}",
                g[k]
            );
            let gu = score(&up, sample).unwrap();
            let gd = score(&dn, sample).unwrap();
            for m in 0..v.len() {
                let fdh = (gu[m] - gd[m]) / (2.0 * hstep);
                let tol = 1e-5 * hm[(k, m)].abs().max(1.0);
                assert!(
                    (fdh - hm[(m, k)]).abs() <= tol,
                    "hess ({m},{k}): {fdh} vs {}",
                    hm[(m, k)]
                );
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let th = SmvbsParams::bivariate(0.7, 1.1, 1.3, 0.8, 1.7).unwrap();
        let s = SampleMatrix::new(th.sample(40, 3).unwrap()).unwrap();
        fd_check(&th, &s);
        fd_check(
            &SmvbsParams {
                lambda: -2.5,
                ..th.clone()
            },
            &s,
        );
        let th3 = SmvbsParams::new(vec![0.5, 0.9, 0.3], vec![1.0, 2.0, 0.5], 0.8).unwrap();
        let s3 = SampleMatrix::new(th3.sample(40, 4).unwrap()).unwrap();
        fd_check(&th3, &s3);
    }
}
