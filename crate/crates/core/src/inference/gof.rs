//! Modified Cramér–von Mises and Anderson–Darling statistics for a fitted
//! BS margin, with tabulated critical values for the composite normal case.

use serde::Serialize;

use crate::bs::BsParams;
use crate::error::{Error, Result};
use crate::specfun::{std_normal_cdf, std_normal_quantile};

const U_CLAMP: f64 = 1e-12;

/// `(level, critical value)` for `W*`.
pub const W_STAR_CRITICAL: [(f64, f64); 4] =
    [(0.10, 0.104), (0.05, 0.126), (0.025, 0.148), (0.01, 0.178)];
/// `(level, critical value)` for `A*`.
pub const A_STAR_CRITICAL: [(f64, f64); 4] =
    [(0.10, 0.631), (0.05, 0.752), (0.025, 0.873), (0.01, 1.035)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueBound {
    Above10,
    Between05And10,
    Between025And05,
    Between01And025,
    Below01,
}

impl PValueBound {
    fn from_table(stat: f64, table: &[(f64, f64); 4]) -> Self {
        if stat <= table[0].1 {
            Self::Above10
        } else if stat <= table[1].1 {
            Self::Between05And10
        } else if stat <= table[2].1 {
            Self::Between025And05
        } else if stat <= table[3].1 {
            Self::Between01And025
        } else {
            Self::Below01
        }
    }

    /// True when the p-value is known to be below `level`.
    pub fn rejects_at(self, level: f64) -> bool {
        let upper = match self {
            Self::Above10 => 1.0,
            Self::Between05And10 => 0.10,
            Self::Between025And05 => 0.05,
            Self::Between01And025 => 0.025,
            Self::Below01 => 0.01,
        };
        upper <= level
    }

    pub fn describe(self) -> &'static str {
        match self {
            Self::Above10 => "p > 0.10",
            Self::Between05And10 => "0.05 < p <= 0.10",
            Self::Between025And05 => "0.025 < p <= 0.05",
            Self::Between01And025 => "0.01 < p <= 0.025",
            Self::Below01 => "p <= 0.01",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofReport {
    pub n: usize,
    pub w_star: f64,
    pub a_star: f64,
    pub w_p: PValueBound,
    pub a_p: PValueBound,
    pub w_reject: bool,
    pub a_reject: bool,
    pub level: f64,
    /// Number of probabilities clamped away from 0 or 1.
    pub clamped: usize,
}

pub fn gof_marginal(column: &[f64], params: &BsParams, level: f64) -> Result<GofReport> {
    let n = column.len();
    if n < 5 {
        return Err(Error::Data(format!(
            "need at least 5 observations, got {n}"
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParams(format!("level {level} not in (0, 1)")));
    }
    let mut sorted = column.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut clamped = 0;
    let mut y = Vec::with_capacity(n);
    for &t in &sorted {
        let u = params.cdf(t)?;
        let uc = u.clamp(U_CLAMP, 1.0 - U_CLAMP);
        if uc != u {
            clamped += 1;
        }
        y.push(std_normal_quantile(uc)?);
    }
    let nf = n as f64;
    let mean = y.iter().sum::<f64>() / nf;
    let sd = (y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0)).sqrt();
    if !(sd > 0.0) {
        return Err(Error::Degenerate(
            "transformed sample has zero spread".into(),
        ));
    }
    let v: Vec<f64> = y
        .iter()
        .map(|yi| std_normal_cdf((yi - mean) / sd).clamp(U_CLAMP, 1.0 - U_CLAMP))
        .collect();
    let mut w2 = 1.0 / (12.0 * nf);
    let mut a_sum = 0.0;
    for i in 0..n {
        let k = (2 * i + 1) as f64;
        w2 += (v[i] - k / (2.0 * nf)).powi(2);
        a_sum += k * (v[i].ln() + (1.0 - v[n - 1 - i]).ln());
    }
    let a2 = -nf - a_sum / nf;
    let w_star = w2 * (1.0 + 0.5 / nf);
    let a_star = a2 * (1.0 + 0.75 / nf + 2.25 / (nf * nf));
    let w_p = PValueBound::from_table(w_star, &W_STAR_CRITICAL);
    let a_p = PValueBound::from_table(a_star, &A_STAR_CRITICAL);
    Ok(GofReport {
        n,
        w_star,
        a_star,
        w_p,
        a_p,
        w_reject: w_p.rejects_at(level),
        a_reject: a_p.rejects_at(level),
        level,
        clamped,
    })
}
