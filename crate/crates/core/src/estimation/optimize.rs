//! Minimizer used by the fitting routines: BFGS with a capped,
//! sufficient-decrease line search followed by Newton refinement.

use nalgebra::{DMatrix, DVector};

pub(crate) trait Problem {
    /// Objective and gradient, or `None` outside the domain.
    fn eval(&self, x: &DVector<f64>) -> Option<(f64, DVector<f64>)>;
    /// Exact Hessian if available.
    fn hessian(&self, _x: &DVector<f64>) -> Option<DMatrix<f64>> {
        None
    }
    /// Gradient norm used for the stopping rule (may differ from the
    /// working-coordinate gradient).
    fn stop_norm(&self, x: &DVector<f64>, grad: &DVector<f64>) -> f64;
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Settings {
    pub max_iter: usize,
    pub gtol: f64,
    pub xtol: f64,
    pub max_step: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub x: DVector<f64>,
    pub f: f64,
    pub iterations: usize,
    pub stop_norm: f64,
    pub converged: bool,
}

const ARMIJO: f64 = 1e-4;

/// Backtracking along `dir` from `x`; returns the accepted point.
fn line_search<P: Problem>(
    prob: &P,
    x: &DVector<f64>,
    f: f64,
    g: &DVector<f64>,
    dir: &DVector<f64>,
    max_step: f64,
) -> Option<(DVector<f64>, f64, DVector<f64>)> {
    let slope = g.dot(dir);
    if !(slope < 0.0) {
        return None;
    }
    let longest = dir.amax();
    let mut t = if longest > max_step {
        max_step / longest
    } else {
        1.0
    };
    for _ in 0..60 {
        let xn = x + dir * t;
        if let Some((fn_, gn)) = prob.eval(&xn) {
            if fn_.is_finite() && fn_ <= f + ARMIJO * t * slope {
                return Some((xn, fn_, gn));
            }
        }
        t *= 0.5;
    }
    None
}

pub(crate) fn minimize<P: Problem>(prob: &P, x0: DVector<f64>, s: &Settings) -> Option<Outcome> {
    let dim = x0.len();
    let (mut f, mut g) = prob.eval(&x0)?;
    let mut x = x0;
    let mut hinv = DMatrix::<f64>::identity(dim, dim);
    let mut iterations = 0;
    let mut last_step = f64::INFINITY;
    let mut first = true;

    // quasi-Newton phase: get close to a stationary point
    while iterations < s.max_iter {
        if g.amax() <= 1e-6 * f.abs().max(1.0) {
            break;
        }
        iterations += 1;
        let mut dir = -(&hinv * &g);
        if g.dot(&dir) >= 0.0 {
            hinv = DMatrix::identity(dim, dim);
            dir = -g.clone();
        }
        let Some((xn, fn_, gn)) = line_search(prob, &x, f, &g, &dir, s.max_step) else {
            if hinv == DMatrix::identity(dim, dim) {
                break;
            }
            hinv = DMatrix::identity(dim, dim);
            continue;
        };
        let sv = &xn - &x;
        let yv = &gn - &g;
        let sy = sv.dot(&yv);
        last_step = sv.amax();
        if sy > 1e-12 * sv.norm() * yv.norm() {
            if first {
                hinv *= sy / yv.dot(&yv);
                first = false;
            }
            let rho = 1.0 / sy;
            let i = DMatrix::<f64>::identity(dim, dim);
            let left = &i - &sv * yv.transpose() * rho;
            let right = &i - &yv * sv.transpose() * rho;
            hinv = &left * &hinv * &right + &sv * sv.transpose() * rho;
        }
        let improvement = f - fn_;
        x = xn;
        f = fn_;
        g = gn;
        if improvement.abs() <= f64::EPSILON * f.abs() && last_step <= s.xtol {
            break;
        }
    }

    // Newton phase: quadratic convergence to machine-level accuracy
    let mut polished = 0;
    while polished < 100 && iterations < s.max_iter + 100 {
        let dir = match prob.hessian(&x).and_then(|h| h.cholesky()) {
            Some(ch) => -ch.solve(&g),
            None => -(&hinv * &g),
        };
        let step_len = dir.amax();
        if prob.stop_norm(&x, &g) <= s.gtol && step_len <= s.xtol {
            last_step = step_len;
            break;
        }
        polished += 1;
        iterations += 1;
        // once the predicted decrease is at rounding level, the objective
        // can no longer rank points; judge the full step by the gradient
        let noise = 1e3 * f64::EPSILON * f.abs().max(1.0);
        if -g.dot(&dir) <= noise && step_len <= s.max_step {
            let xn = &x + &dir;
            match prob.eval(&xn) {
                Some((fn_, gn)) if fn_ <= f + noise && gn.amax() < g.amax() => {
                    last_step = step_len;
                    x = xn;
                    f = fn_;
                    g = gn;
                    continue;
                }
                _ => {}
            }
        }
        match line_search(prob, &x, f, &g, &dir, s.max_step) {
            Some((xn, fn_, gn)) => {
                last_step = (&xn - &x).amax();
                x = xn;
                f = fn_;
                g = gn;
            }
            None => {
                // no further decrease representable in floating point
                last_step = step_len;
                break;
            }
        }
    }
    let stop_norm = prob.stop_norm(&x, &g);
    Some(Outcome {
        converged: stop_norm <= s.gtol && last_step <= s.xtol.max(1e3 * f64::EPSILON),
        x,
        f,
        iterations,
        stop_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Rosenbrock;

    impl Problem for Rosenbrock {
        fn eval(&self, x: &DVector<f64>) -> Option<(f64, DVector<f64>)> {
            let (a, b) = (x[0], x[1]);
            let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
            let g = DVector::from_vec(vec![
                -2.0 * (1.0 - a) - 400.0 * a * (b - a * a),
                200.0 * (b - a * a),
            ]);
            Some((f, g))
        }
        fn hessian(&self, x: &DVector<f64>) -> Option<DMatrix<f64>> {
            let (a, b) = (x[0], x[1]);
            Some(DMatrix::from_row_slice(
                2,
                2,
                &[
                    2.0 - 400.0 * (b - 3.0 * a * a),
                    -400.0 * a,
                    -400.0 * a,
                    200.0,
                ],
            ))
        }
        fn stop_norm(&self, _x: &DVector<f64>, g: &DVector<f64>) -> f64 {
            g.amax()
        }
    }

    #[test]
    fn rosenbrock() {
        let s = Settings {
            max_iter: 1000,
            gtol: 1e-10,
            xtol: 1e-10,
            max_step: 1.0,
        };
        let out = minimize(&Rosenbrock, DVector::from_vec(vec![-1.2, 1.0]), &s).unwrap();
        assert!(out.converged);
        assert!((out.x[0] - 1.0).abs() < 1e-9 && (out.x[1] - 1.0).abs() < 1e-9);
    }
}
