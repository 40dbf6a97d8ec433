//! Density generators `g` of standard symmetric laws `f(z) = c·g(z²)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{
    gamma_q, incomplete_beta_ratio, ln_beta, ln_gamma, std_normal_cdf, std_normal_log_cdf,
    Quadrature, LN_SQRT_2PI,
};

/// Normalizing constant of the type I logistic generator as usually quoted.
pub const LOGISTIC_I_QUOTED_CONSTANT: f64 = 1.484_300_029;

const NORMALIZATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum GeneratorKind {
    Normal,
    Cauchy,
    StudentT { nu: f64 },
    GenStudentT { s: f64, r: f64 },
    LogisticI,
    LogisticII,
    PowerExp { k: f64 },
}

/// A validated generator together with its normalizing constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityGenerator {
    kind: GeneratorKind,
    norm_const: f64,
}

impl GeneratorKind {
    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        match *self {
            GeneratorKind::StudentT { nu } if !(nu > 0.0 && nu.is_finite()) => {
                bad(format!("student_t requires nu > 0, got {nu}"))
            }
            GeneratorKind::GenStudentT { s, r }
                if !(s > 0.0 && r > 0.0 && s.is_finite() && r.is_finite()) =>
            {
                bad(format!(
                    "gen_student_t requires s, r > 0, got s = {s}, r = {r}"
                ))
            }
            GeneratorKind::PowerExp { k } if !(k > -1.0 && k <= 1.0) => {
                bad(format!("power_exp requires -1 < k <= 1, got {k}"))
            }
            _ => Ok(()),
        }
    }

    /// `ln` of the unnormalized kernel at `u = z² ≥ 0`.
    fn ln_kernel(&self, u: f64) -> f64 {
        match *self {
            GeneratorKind::Normal => -0.5 * u,
            GeneratorKind::Cauchy => -u.ln_1p(),
            GeneratorKind::StudentT { nu } => -0.5 * (nu + 1.0) * (u / nu).ln_1p(),
            GeneratorKind::GenStudentT { s, r } => -0.5 * (r + 1.0) * (u / s).ln_1p(),
            GeneratorKind::LogisticI => -u - 2.0 * (-u).exp().ln_1p(),
            GeneratorKind::LogisticII => {
                let v = u.sqrt();
                -v - 2.0 * (-v).exp().ln_1p()
            }
            GeneratorKind::PowerExp { k } => -0.5 * u.powf(1.0 / (1.0 + k)),
        }
    }

    /// Closed-form `ln c` where one exists.
    fn ln_closed_form_const(&self) -> Option<f64> {
        match *self {
            GeneratorKind::Normal => Some(-LN_SQRT_2PI),
            GeneratorKind::Cauchy => Some(-std::f64::consts::PI.ln()),
            GeneratorKind::StudentT { nu } => Some(-0.5 * nu.ln() - ln_beta(0.5, 0.5 * nu)),
            GeneratorKind::GenStudentT { s, r } => Some(-0.5 * s.ln() - ln_beta(0.5, 0.5 * r)),
            GeneratorKind::LogisticI => None,
            GeneratorKind::LogisticII => Some(0.0),
            // reciprocal of Γ(1 + (k+1)/2)·2^{1+(1+k)/2}
            GeneratorKind::PowerExp { k } => Some(
                -(ln_gamma(1.0 + 0.5 * (k + 1.0))
                    + (1.0 + 0.5 * (1.0 + k)) * std::f64::consts::LN_2),
            ),
        }
    }
}

impl DensityGenerator {
    /// Builds the generator and checks `∫ c·g(z²) dz = 1` numerically.
    pub fn new(kind: GeneratorKind) -> Result<Self> {
        kind.validate()?;
        let quad = Quadrature::with_tolerances(1e-13, 1e-11);
        let mass = unit_mass(&quad, |z| kind.ln_kernel(z * z).exp());
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::Numerical(format!(
                "{kind:?}: kernel integral is not a positive finite number ({mass})"
            )));
        }
        let norm_const = match kind.ln_closed_form_const() {
            Some(ln_c) => ln_c.exp(),
            None => 1.0 / mass,
        };
        let check = norm_const * mass;
        if (check - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Numerical(format!(
                "{kind:?}: density integrates to {check}, not 1"
            )));
        }
        Ok(Self { kind, norm_const })
    }

    pub fn normal() -> Self {
        Self::new(GeneratorKind::Normal).expect("normal generator is valid")
    }

    pub fn student_t(nu: f64) -> Result<Self> {
        Self::new(GeneratorKind::StudentT { nu })
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn norm_const(&self) -> f64 {
        self.norm_const
    }

    /// Unnormalized kernel `g(u)`, `u ≥ 0`.
    pub fn kernel(&self, u: f64) -> f64 {
        self.kind.ln_kernel(u).exp()
    }

    pub fn pdf(&self, z: f64) -> f64 {
        self.log_pdf(z).exp()
    }

    pub fn log_pdf(&self, z: f64) -> f64 {
        self.norm_const.ln() + self.kind.ln_kernel(z * z)
    }

    /// Standard cdf `F(z) = ∫_{-∞}^z c·g(x²) dx`.
    pub fn cdf(&self, z: f64) -> f64 {
        if z.is_nan() {
            return f64::NAN;
        }
        if z == f64::INFINITY {
            return 1.0;
        }
        if z == f64::NEG_INFINITY {
            return 0.0;
        }
        // lower tail at -|z|, reflected for positive z
        let lower = self.lower_tail(-z.abs());
        if z > 0.0 {
            1.0 - lower
        } else {
            lower
        }
    }

    pub fn log_cdf(&self, z: f64) -> f64 {
        match self.kind {
            GeneratorKind::Normal => std_normal_log_cdf(z),
            _ if z > 0.0 => (-self.lower_tail(-z)).ln_1p(),
            _ => self.lower_tail(z).ln(),
        }
    }

    /// `F(x)` for `x ≤ 0`.
    fn lower_tail(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.5;
        }
        let x2 = x * x;
        match self.kind {
            GeneratorKind::Normal => std_normal_cdf(x),
            GeneratorKind::Cauchy => 0.5 + x.atan() / std::f64::consts::PI,
            GeneratorKind::StudentT { nu } => {
                0.5 * incomplete_beta_ratio(nu / (nu + x2), 0.5 * nu, 0.5).unwrap_or(f64::NAN)
            }
            GeneratorKind::GenStudentT { s, r } => {
                0.5 * incomplete_beta_ratio(s / (s + x2), 0.5 * r, 0.5).unwrap_or(f64::NAN)
            }
            GeneratorKind::LogisticII => 1.0 / (1.0 + (-x).exp()),
            GeneratorKind::PowerExp { k } => {
                let q = 2.0 / (1.0 + k);
                0.5 * gamma_q(1.0 / q, 0.5 * x.abs().powf(q)).unwrap_or(f64::NAN)
            }
            GeneratorKind::LogisticI => {
                let quad = Quadrature::with_tolerances(1e-14, 1e-12);
                let c = self.norm_const;
                let kind = self.kind;
                let tail = quad.integrate_to_infinity(|v| c * kind.ln_kernel(v * v).exp(), -x);
                tail.value
            }
        }
    }
}

fn unit_mass<F: Fn(f64) -> f64>(quad: &Quadrature, f: F) -> f64 {
    // symmetric integrand: twice the half-line, split at 1 for heavy tails
    let head = quad.integrate(&f, 0.0, 1.0).value;
    let tail = quad.integrate_to_infinity(&f, 1.0).value;
    2.0 * (head + tail)
}

impl std::fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GeneratorKind::Normal => write!(f, "normal"),
            GeneratorKind::Cauchy => write!(f, "cauchy"),
            GeneratorKind::StudentT { nu } => write!(f, "student_t(nu={nu})"),
            GeneratorKind::GenStudentT { s, r } => write!(f, "gen_student_t(s={s}, r={r})"),
            GeneratorKind::LogisticI => write!(f, "logistic_I"),
            GeneratorKind::LogisticII => write!(f, "logistic_II"),
            GeneratorKind::PowerExp { k } => write!(f, "power_exp(k={k})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_kinds() -> Vec<GeneratorKind> {
        vec![
            GeneratorKind::Normal,
            GeneratorKind::Cauchy,
            GeneratorKind::StudentT { nu: 3.5 },
            GeneratorKind::GenStudentT { s: 2.0, r: 4.0 },
            GeneratorKind::LogisticI,
            GeneratorKind::LogisticII,
            GeneratorKind::PowerExp { k: -0.5 },
            GeneratorKind::PowerExp { k: 0.0 },
            GeneratorKind::PowerExp { k: 1.0 },
        ]
    }

    #[test]
    fn every_generator_normalizes() {
        for kind in all_kinds() {
            assert!(DensityGenerator::new(kind).is_ok(), "{kind}");
        }
    }

    #[test]
    fn logistic_constant_matches_quoted_value() {
        let g = DensityGenerator::new(GeneratorKind::LogisticI).unwrap();
        assert!((g.norm_const() - LOGISTIC_I_QUOTED_CONSTANT).abs() < 1e-8);
    }

    #[test]
    fn power_exp_constant_is_reciprocal_of_printed_form() {
        for &k in &[-0.5, 0.0, 0.5, 1.0] {
            let g = DensityGenerator::new(GeneratorKind::PowerExp { k }).unwrap();
            let printed = ln_gamma(1.0 + 0.5 * (k + 1.0)).exp() * 2f64.powf(1.0 + 0.5 * (1.0 + k));
            assert!((g.norm_const() * printed - 1.0).abs() < 1e-12);
        }
        // k = 0 is the normal law
        let g = DensityGenerator::new(GeneratorKind::PowerExp { k: 0.0 }).unwrap();
        assert!((g.cdf(-1.3) - std_normal_cdf(-1.3)).abs() < 1e-13);
    }

    #[test]
    fn cdf_agrees_with_integrated_pdf() {
        let quad = Quadrature::with_tolerances(1e-14, 1e-12);
        for kind in all_kinds() {
            let g = DensityGenerator::new(kind).unwrap();
            for &z in &[-4.0, -1.2, -0.3, 0.0, 0.7, 2.5] {
                let oracle = 0.5 + quad.integrate(|x| g.pdf(x), 0.0, z).value;
                assert!(
                    (g.cdf(z) - oracle).abs() < 1e-9,
                    "{kind} z={z}: {} vs {oracle}",
                    g.cdf(z)
                );
            }
        }
    }

    #[test]
    fn cdf_limits_and_monotonicity() {
        for kind in all_kinds() {
            let g = DensityGenerator::new(kind).unwrap();
            assert_eq!(g.cdf(f64::NEG_INFINITY), 0.0);
            assert_eq!(g.cdf(f64::INFINITY), 1.0);
            let mut prev = 0.0;
            for i in 0..=80 {
                let v = g.cdf(-20.0 + 0.5 * i as f64);
                assert!(v >= prev - 1e-15, "{kind}");
                prev = v;
            }
            assert!(g.cdf(1e6) > 0.99);
        }
    }

    #[test]
    fn rejects_invalid_extra_parameters() {
        assert!(DensityGenerator::new(GeneratorKind::StudentT { nu: 0.0 }).is_err());
        assert!(DensityGenerator::new(GeneratorKind::GenStudentT { s: 1.0, r: -1.0 }).is_err());
        assert!(DensityGenerator::new(GeneratorKind::PowerExp { k: -1.0 }).is_err());
        assert!(DensityGenerator::new(GeneratorKind::PowerExp { k: 1.5 }).is_err());
    }
}
