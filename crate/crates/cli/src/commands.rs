use serde_json::{json, Value};
use smvbs::estimation::{
    confidence_intervals, expected_info, log_density_terms, matrix_rows, mle, mle_multistart,
    observed_info, CovSource, FitOptions, FitResult, McOptions, SampleMatrix,
    DEFAULT_LAMBDA_STARTS,
};
use smvbs::grid::DensityGrid;
use smvbs::inference::{
    gof_marginal, kbj_log_density_terms, kbj_mle, lr_test, vuong_test, KbjFit, KbjParams,
};
use smvbs::{
    latent_correlation, product_moment, sbvgbs_log_density_terms, sbvgbs_mle, BsParams,
    DensityGenerator, SbvgbsFit, SbvgbsParams, SmvbsParams,
};

use crate::args::*;
use crate::input::{load_dataset, parse_params};
use crate::report::Report;
use crate::CliError;

fn check_common(c: &Common) -> Result<(), CliError> {
    if !(c.level > 0.0 && c.level < 1.0) {
        return Err(CliError::Input(format!(
            "--level {} not in (0, 1)",
            c.level
        )));
    }
    if c.mc_draws < 1000 {
        return Err(CliError::Input(format!(
            "--mc-draws {} below the minimum of 1000",
            c.mc_draws
        )));
    }
    if !(c.nu > 0.0 && c.nu.is_finite()) {
        return Err(CliError::Input(format!("--nu {} must be positive", c.nu)));
    }
    Ok(())
}

fn sample_from(c: &Common) -> Result<SampleMatrix, CliError> {
    let source = c
        .input
        .as_deref()
        .ok_or_else(|| CliError::Input("--input is required (a file path or \"volle\")".into()))?;
    load_dataset(source, c.raw, c.columns.as_deref())
}

fn config(c: &Common) -> Value {
    json!({
        "input": c.input,
        "columns": c.columns,
        "raw": c.raw,
        "level": c.level,
        "mc_draws": c.mc_draws,
    })
}

fn insert(target: &mut Value, key: &str, v: Value) {
    target
        .as_object_mut()
        .expect("report sections are objects")
        .insert(key.into(), v);
}

fn mc(c: &Common) -> McOptions {
    McOptions {
        draws: c.mc_draws,
        seed: c.seed,
    }
}

enum Fitted {
    Smvbs(FitResult),
    Kbj(KbjFit),
    Gbs(SbvgbsFit),
}

impl Fitted {
    fn converged(&self) -> bool {
        match self {
            Fitted::Smvbs(f) => f.converged,
            Fitted::Kbj(f) => f.converged,
            Fitted::Gbs(f) => f.converged,
        }
    }

    fn names(&self) -> Vec<String> {
        match self {
            Fitted::Smvbs(f) => f.param_names(),
            Fitted::Kbj(_) => ["alpha1", "alpha2", "beta1", "beta2", "rho"]
                .map(String::from)
                .to_vec(),
            Fitted::Gbs(_) => ["alpha1", "alpha2", "beta1", "beta2", "lambda"]
                .map(String::from)
                .to_vec(),
        }
    }

    fn values(&self) -> Vec<f64> {
        match self {
            Fitted::Smvbs(f) => f.estimates(),
            Fitted::Kbj(f) => {
                let p = f.params;
                vec![p.alphas[0], p.alphas[1], p.betas[0], p.betas[1], p.rho]
            }
            Fitted::Gbs(f) => {
                let p = f.params;
                vec![p.alphas[0], p.alphas[1], p.betas[0], p.betas[1], p.lambda]
            }
        }
    }

    fn loglik(&self) -> f64 {
        match self {
            Fitted::Smvbs(f) => f.loglik,
            Fitted::Kbj(f) => f.loglik,
            Fitted::Gbs(f) => f.loglik,
        }
    }

    fn log_density_terms(&self, s: &SampleMatrix) -> Result<Vec<f64>, CliError> {
        Ok(match self {
            Fitted::Smvbs(f) => log_density_terms(&f.theta_hat, s)?,
            Fitted::Kbj(f) => kbj_log_density_terms(&f.params, s)?,
            Fitted::Gbs(f) => sbvgbs_log_density_terms(&f.params, s)?,
        })
    }

    fn margins(&self) -> Option<Vec<BsParams>> {
        match self {
            Fitted::Smvbs(f) => Some(
                (0..f.theta_hat.dim())
                    .map(|j| f.theta_hat.marginal(j))
                    .collect(),
            ),
            Fitted::Kbj(f) => Some(
                (0..2)
                    .map(|j| {
                        BsParams::new(f.params.alphas[j], f.params.betas[j])
                            .expect("fitted values are valid")
                    })
                    .collect(),
            ),
            Fitted::Gbs(_) => None,
        }
    }

    fn pdf(&self, t1: f64, t2: f64) -> smvbs::Result<f64> {
        match self {
            Fitted::Smvbs(f) => f.theta_hat.pdf(&[t1, t2]),
            Fitted::Kbj(f) => f.params.pdf(t1, t2),
            Fitted::Gbs(f) => f.params.pdf(t1, t2),
        }
    }

    fn diagnostics(&self) -> Value {
        match self {
            Fitted::Smvbs(f) => json!({
                "converged": f.converged,
                "iterations": f.iterations,
                "grad_norm": f.grad_norm,
                "n": f.n,
                "warnings": f.warnings,
            }),
            Fitted::Kbj(f) => json!({
                "converged": f.converged,
                "iterations": f.iterations,
                "grad_norm": f.grad_norm,
                "n": f.n,
                "warnings": [],
            }),
            Fitted::Gbs(f) => json!({
                "converged": f.converged,
                "iterations": f.iterations,
                "grad_norm": f.grad_norm,
                "n": f.n,
                "warnings": [],
            }),
        }
    }

    fn summary(&self) -> Value {
        json!({
            "names": self.names(),
            "values": self.values(),
            "loglik": self.loglik(),
        })
    }
}

fn fit_model(
    model: Model,
    sample: &SampleMatrix,
    c: &Common,
    multi_start: bool,
    covariance: CovSource,
) -> Result<(Fitted, Option<Value>), CliError> {
    match model {
        Model::Smvbs | Model::Indep => {
            let options = FitOptions {
                fixed_lambda: (model == Model::Indep).then_some(0.0),
                covariance,
                ..FitOptions::default()
            };
            if multi_start && model == Model::Smvbs {
                let m = mle_multistart(sample, &DEFAULT_LAMBDA_STARTS, &options)?;
                let detail = json!({
                    "starts": m.starts,
                    "logliks": m.fits.iter().map(|f| f.loglik).collect::<Vec<_>>(),
                    "converged": m.fits.iter().map(|f| f.converged).collect::<Vec<_>>(),
                    "best": m.best,
                    "max_distance": m.max_distance,
                    "ambiguous": m.ambiguous,
                });
                Ok((Fitted::Smvbs(m.best_fit().clone()), Some(detail)))
            } else {
                Ok((Fitted::Smvbs(mle(sample, &options)?), None))
            }
        }
        Model::Kbj => Ok((Fitted::Kbj(kbj_mle(sample)?), None)),
        Model::GbsT => Ok((
            Fitted::Gbs(sbvgbs_mle(sample, DensityGenerator::student_t(c.nu)?)?),
            None,
        )),
    }
}

fn covariance_block(fit: &FitResult, level: f64) -> Result<Value, CliError> {
    Ok(json!({
        "std_errors": fit.std_errors(),
        "intervals": confidence_intervals(fit, level)?,
        "covariance": fit.cov_rows(),
    }))
}

pub fn fit(a: &FitArgs) -> Result<(Report, bool), CliError> {
    let c = &a.common;
    check_common(c)?;
    let sample = sample_from(c)?;
    let first_cov = match a.info {
        InfoChoice::Observed => CovSource::Observed,
        _ => CovSource::Expected(mc(c)),
    };
    let (fitted, multi) = fit_model(a.model, &sample, c, a.multi_start, first_cov)?;
    let mut r = Report::new("fit", a.model.name(), c.seed);
    r.params = config(c);
    insert(&mut r.params, "multi_start", json!(a.multi_start));
    insert(
        &mut r.params,
        "info",
        json!(format!("{:?}", a.info).to_lowercase()),
    );
    let mut est = fitted.summary();
    let mut diag = fitted.diagnostics();
    if let Fitted::Smvbs(f) = &fitted {
        let mut blocks = json!({});
        let key = if a.info == InfoChoice::Observed {
            "observed"
        } else {
            "expected"
        };
        if f.cov.is_some() {
            insert(&mut blocks, key, covariance_block(f, c.level)?);
        }
        if a.info == InfoChoice::Both {
            let obs = mle(
                &sample,
                &FitOptions {
                    fixed_lambda: f.fixed_lambda,
                    init: Some(f.theta_hat.clone()),
                    covariance: CovSource::Observed,
                    ..FitOptions::default()
                },
            )?;
            if obs.cov.is_some() {
                insert(&mut blocks, "observed", covariance_block(&obs, c.level)?);
            }
        }
        insert(&mut est, "information", blocks);
    }
    if let Some(m) = multi {
        insert(&mut diag, "multi_start", m);
    }
    if let Some(path) = &a.grid {
        if sample.p() != 2 {
            return Err(CliError::Input("--grid needs a bivariate sample".into()));
        }
        let range = |j: usize| {
            let col = sample.column(j);
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(0.0, f64::max);
            (0.5 * lo, 1.5 * hi)
        };
        let grid = DensityGrid::evaluate(|x, y| fitted.pdf(x, y), range(0), range(1), a.grid_size)?;
        std::fs::write(path, grid.to_csv())
            .map_err(|e| CliError::Input(format!("cannot write {path}: {e}")))?;
        insert(
            &mut diag,
            "grid",
            json!({ "path": path, "size": a.grid_size, "local_maxima": grid.count_local_maxima(1e-3) }),
        );
    }
    r.estimates = est;
    r.diagnostics = diag;
    Ok((r, fitted.converged()))
}

fn smvbs_params(values: &[f64], lambda_free: bool) -> Result<SmvbsParams, CliError> {
    let mut v = values.to_vec();
    if !lambda_free {
        v.push(0.0);
    }
    if v.len() < 5 || v.len().is_multiple_of(2) {
        return Err(CliError::Input(format!(
            "--params: expected {} values, got {}",
            if lambda_free {
                "2p + 1 (alphas, betas, lambda)"
            } else {
                "2p (alphas, betas)"
            },
            values.len()
        )));
    }
    Ok(SmvbsParams::from_slice(&v)?)
}

fn five(values: &[f64], last: &str) -> Result<[f64; 5], CliError> {
    values.try_into().map_err(|_| {
        CliError::Input(format!(
            "--params: expected 5 values (alpha1, alpha2, beta1, beta2, {last}), got {}",
            values.len()
        ))
    })
}

pub fn simulate(a: &SimulateArgs) -> Result<(String, Report), CliError> {
    let c = &a.common;
    check_common(c)?;
    if a.n == 0 {
        return Err(CliError::Input("--n must be at least 1".into()));
    }
    let values = parse_params(&a.params)?;
    let draws = match a.model {
        Model::Smvbs | Model::Indep => {
            smvbs_params(&values, a.model == Model::Smvbs)?.sample(a.n, c.seed)?
        }
        Model::Kbj => {
            let v = five(&values, "rho")?;
            KbjParams::new([v[0], v[1]], [v[2], v[3]], v[4])?.sample(a.n, c.seed)?
        }
        Model::GbsT => {
            let v = five(&values, "lambda")?;
            SbvgbsParams::new(
                [v[0], v[1]],
                [v[2], v[3]],
                v[4],
                DensityGenerator::student_t(c.nu)?,
            )?
            .sample(a.n, c.seed)?
        }
    };
    let p = draws[0].len();
    let mut csv = (1..=p)
        .map(|j| format!("t{j}"))
        .collect::<Vec<_>>()
        .join(",");
    csv.push('\n');
    for row in &draws {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        csv.push_str(&line.join(","));
        csv.push('\n');
    }
    let mut r = Report::new("simulate", a.model.name(), c.seed);
    r.params = json!({ "n": a.n, "params": values });
    if a.model == Model::GbsT {
        insert(&mut r.params, "nu", json!(c.nu));
    }
    r.diagnostics = json!({ "draws": draws });
    Ok((csv, r))
}

pub fn test_lambda(a: &TestLambdaArgs) -> Result<(Report, bool), CliError> {
    let c = &a.common;
    check_common(c)?;
    let sample = sample_from(c)?;
    let (full, multi) = fit_model(Model::Smvbs, &sample, c, a.multi_start, CovSource::Skip)?;
    let (restricted, _) = fit_model(Model::Indep, &sample, c, false, CovSource::Skip)?;
    let (Fitted::Smvbs(f), Fitted::Smvbs(rf)) = (&full, &restricted) else {
        unreachable!("both fits are smvbs fits")
    };
    let lr = lr_test(f, rf, 1, c.level)?;
    let mut r = Report::new("test-lambda", "smvbs", c.seed);
    r.params = config(c);
    insert(&mut r.params, "multi_start", json!(a.multi_start));
    r.estimates = json!({ "full": full.summary(), "restricted": restricted.summary() });
    r.tests
        .push(serde_json::to_value(lr).expect("serializable"));
    let mut diag = json!({ "full": full.diagnostics(), "restricted": restricted.diagnostics() });
    if let Some(m) = multi {
        insert(&mut diag, "multi_start", m);
    }
    r.diagnostics = diag;
    Ok((r, full.converged() && restricted.converged()))
}

pub fn compare(a: &CompareArgs) -> Result<(Report, bool), CliError> {
    let c = &a.common;
    check_common(c)?;
    if a.model == a.against {
        return Err(CliError::Input(
            "--model and --against name the same model".into(),
        ));
    }
    let sample = sample_from(c)?;
    let (fa, _) = fit_model(a.model, &sample, c, false, CovSource::Skip)?;
    let (fb, _) = fit_model(a.against, &sample, c, false, CovSource::Skip)?;
    let v = vuong_test(
        &fa.log_density_terms(&sample)?,
        &fb.log_density_terms(&sample)?,
        c.level,
    )?;
    let mut r = Report::new("compare", a.model.name(), c.seed);
    r.params = config(c);
    insert(&mut r.params, "against", json!(a.against.name()));
    r.estimates = json!({ "a": fa.summary(), "b": fb.summary() });
    r.tests.push(serde_json::to_value(v).expect("serializable"));
    r.diagnostics = json!({ "a": fa.diagnostics(), "b": fb.diagnostics() });
    Ok((r, fa.converged() && fb.converged()))
}

pub fn gof(a: &GofArgs) -> Result<(Report, bool), CliError> {
    let c = &a.common;
    check_common(c)?;
    let sample = sample_from(c)?;
    let (fitted, _) = fit_model(a.model, &sample, c, false, CovSource::Skip)?;
    let margins = fitted.margins().ok_or_else(|| {
        CliError::Input(format!(
            "gof needs Birnbaum-Saunders margins; {} margins are generalized",
            a.model.name()
        ))
    })?;
    let mut r = Report::new("gof", a.model.name(), c.seed);
    r.params = config(c);
    let mut warnings = Vec::new();
    for (j, m) in margins.iter().enumerate() {
        let g = gof_marginal(sample.column(j), m, c.level)?;
        if g.clamped > 0 {
            warnings.push(format!(
                "margin {}: {} probabilities clamped",
                j + 1,
                g.clamped
            ));
        }
        let mut v = serde_json::to_value(&g).expect("serializable");
        insert(&mut v, "name", json!("gof_marginal"));
        insert(&mut v, "margin", json!(j + 1));
        insert(&mut v, "alpha", json!(m.alpha));
        insert(&mut v, "beta", json!(m.beta));
        insert(&mut v, "w_p_value", json!(g.w_p.describe()));
        insert(&mut v, "a_p_value", json!(g.a_p.describe()));
        r.tests.push(v);
    }
    r.estimates = fitted.summary();
    let mut diag = fitted.diagnostics();
    insert(&mut diag, "gof_warnings", json!(warnings));
    r.diagnostics = diag;
    Ok((r, fitted.converged()))
}

pub fn info(a: &InfoArgs) -> Result<(Report, bool), CliError> {
    let c = &a.common;
    check_common(c)?;
    let sample = match &c.input {
        Some(_) => Some(sample_from(c)?),
        None => None,
    };
    let mut converged = true;
    let mut diag = json!({});
    let theta = match (&a.params, &sample) {
        (Some(p), _) => smvbs_params(&parse_params(p)?, true)?,
        (None, Some(s)) => {
            let (f, _) = fit_model(Model::Smvbs, s, c, false, CovSource::Skip)?;
            converged = f.converged();
            diag = f.diagnostics();
            let Fitted::Smvbs(f) = f else {
                unreachable!("smvbs fit")
            };
            f.theta_hat
        }
        (None, None) => return Err(CliError::Input("give --input or --params".into())),
    };
    if let (Some(s), true) = (&sample, a.params.is_some()) {
        if s.p() != theta.dim() {
            return Err(CliError::Input(format!(
                "--params describe p = {} but the sample has {} columns",
                theta.dim(),
                s.p()
            )));
        }
    }
    let names = {
        let p = theta.dim();
        let mut v: Vec<String> = (1..=p).map(|j| format!("alpha{j}")).collect();
        v.extend((1..=p).map(|j| format!("beta{j}")));
        v.push("lambda".into());
        v
    };
    let mut est = json!({ "names": names, "theta": theta.to_vec() });
    let want_obs = a.info != InfoChoice::Expected;
    let want_exp = a.info != InfoChoice::Observed;
    let mut notes = Vec::new();
    if want_obs {
        match &sample {
            Some(s) => insert(
                &mut est,
                "observed",
                json!(matrix_rows(&observed_info(&theta, s)?)),
            ),
            None if a.info == InfoChoice::Observed => {
                return Err(CliError::Input("observed information needs --input".into()))
            }
            None => notes.push("observed information skipped: no data".to_string()),
        }
    }
    if want_exp {
        let n = a
            .n
            .or(sample.as_ref().map(|s| s.n()))
            .ok_or_else(|| CliError::Input("expected information needs --n or --input".into()))?;
        let e = expected_info(&theta, n, mc(c))?;
        insert(
            &mut est,
            "expected",
            json!({
                "matrix": matrix_rows(&e.matrix),
                "mc_std_errors": matrix_rows(&e.std_errors),
                "draws": e.draws,
                "closed_form": e.closed_form,
                "n": n,
            }),
        );
    }
    let mut r = Report::new("info", "smvbs", c.seed);
    r.params = config(c);
    insert(
        &mut r.params,
        "info",
        json!(format!("{:?}", a.info).to_lowercase()),
    );
    r.estimates = est;
    insert(&mut diag, "notes", json!(notes));
    r.diagnostics = diag;
    Ok((r, converged))
}

pub fn corr(a: &CorrArgs) -> Result<(Report, bool), CliError> {
    let c = &a.common;
    check_common(c)?;
    let mut converged = true;
    let mut diag = json!({});
    let theta = match &a.params {
        Some(p) => smvbs_params(&parse_params(p)?, true)?,
        None => {
            let s = sample_from(c)?;
            let (f, _) = fit_model(Model::Smvbs, &s, c, false, CovSource::Skip)?;
            converged = f.converged();
            diag = f.diagnostics();
            let Fitted::Smvbs(f) = f else {
                unreachable!("smvbs fit")
            };
            f.theta_hat
        }
    };
    let rho = latent_correlation(theta.lambda)?;
    let pm = product_moment(&theta, c.mc_draws, c.seed)?;
    let mut r = Report::new("corr", "smvbs", c.seed);
    r.params = config(c);
    r.estimates = json!({
        "theta": theta.to_vec(),
        "latent_correlation": rho,
        "product_moment": pm,
    });
    r.diagnostics = diag;
    Ok((r, converged))
}
