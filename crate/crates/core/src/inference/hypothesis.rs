use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimation::FitResult;
use crate::specfun::{chi_square_sf, std_normal_quantile, std_normal_sf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Reject,
    FailToReject,
    FavorA,
    FavorB,
    Equivalent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub name: String,
    pub statistic: f64,
    pub df: Option<usize>,
    pub p_value: Option<f64>,
    /// Interval statement when only tabulated critical values are available.
    pub p_value_bound: Option<String>,
    pub verdict: Verdict,
    pub level: f64,
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("level {level} not in (0, 1)")))
    }
}

/// `ω = 2{ℓ(θ̂) − ℓ(θ̃)}` referred to a χ²(df).
pub fn lr_test(
    full: &FitResult,
    restricted: &FitResult,
    df: usize,
    level: f64,
) -> Result<TestReport> {
    check_level(level)?;
    if df == 0 {
        return Err(Error::InvalidParams("df must be positive".into()));
    }
    let diff = full.loglik - restricted.loglik;
    if diff < -1e-8 {
        return Err(Error::InconsistentFits(format!(
            "restricted log-likelihood exceeds the full one by {:.3e}",
            -diff
        )));
    }
    let omega = 2.0 * diff.max(0.0);
    let p = chi_square_sf(omega, df as f64)?;
    Ok(TestReport {
        name: "likelihood_ratio".into(),
        statistic: omega,
        df: Some(df),
        p_value: Some(p),
        p_value_bound: None,
        verdict: if p < level {
            Verdict::Reject
        } else {
            Verdict::FailToReject
        },
        level,
    })
}

/// Non-nested comparison `T = √n·m̄/sd(m)`, `m_i = log f_A − log f_B`.
pub fn vuong_test(logf_a: &[f64], logf_b: &[f64], level: f64) -> Result<TestReport> {
    check_level(level)?;
    if logf_a.len() != logf_b.len() {
        return Err(Error::Data(format!(
            "{} vs {} log-density values",
            logf_a.len(),
            logf_b.len()
        )));
    }
    let n = logf_a.len();
    if n < 2 {
        return Err(Error::Data("need at least 2 observations".into()));
    }
    let m: Vec<f64> = logf_a.iter().zip(logf_b).map(|(a, b)| a - b).collect();
    let nf = n as f64;
    let mean = m.iter().sum::<f64>() / nf;
    let ss: f64 = m.iter().map(|v| (v - mean) * (v - mean)).sum();
    let sd = (ss / (nf - 1.0)).sqrt();
    if !(sd > 0.0) {
        return Err(Error::Degenerate(
            "log-likelihood ratios have zero variance; the models coincide on the sample".into(),
        ));
    }
    let t = nf.sqrt() * mean / sd;
    let z = std_normal_quantile(1.0 - level / 2.0)?;
    let verdict = if t > z {
        Verdict::FavorA
    } else if t < -z {
        Verdict::FavorB
    } else {
        Verdict::Equivalent
    };
    Ok(TestReport {
        name: "vuong".into(),
        statistic: t,
        df: None,
        p_value: Some((2.0 * std_normal_sf(t.abs())).min(1.0)),
        p_value_bound: None,
        verdict,
        level,
    })
}
