use super::{ln_gamma, Quadrature};
use crate::error::{domain, Result};

/// Confluent hypergeometric function of the second kind `U(a, b, z)` from
/// its integral representation, restricted to `b > a > 0`, `z > 0`.
///
/// With `t = s/z` and `s = u^{1/a}` the integral becomes
/// `U = z^{-a}/Γ(a+1) ∫₀^∞ exp(-u^{1/a}) (1 + u^{1/a}/z)^{b-a-1} du`,
/// whose integrand is bounded and decays exponentially.
pub fn confluent_u(a: f64, b: f64, z: f64) -> Result<f64> {
    if !(a > 0.0 && b > a && z > 0.0) || !(a.is_finite() && b.is_finite() && z.is_finite()) {
        return Err(domain(
            "confluent_u",
            format!("requires b > a > 0 and z > 0 (a = {a}, b = {b}, z = {z})"),
        ));
    }
    let inv_a = 1.0 / a;
    let expo = b - a - 1.0;
    let integrand = |u: f64| {
        let s = u.powf(inv_a);
        (-s + expo * (s / z).ln_1p()).exp()
    };
    let quad = Quadrature::with_tolerances(1e-300, 1e-12);
    // The factor (1 + s/z) changes character at s ≈ z, i.e. u ≈ z^a.
    let knee = z.powf(a);
    let r = if knee < 1.0 {
        let head = quad.integrate_with_breaks(integrand, &[0.0, knee, 1.0]);
        let tail = quad.integrate_to_infinity(integrand, 1.0);
        head.value + tail.value
    } else {
        quad.integrate_to_infinity(integrand, 0.0).value
    };
    Ok((-a * z.ln() - ln_gamma(a + 1.0)).exp() * r)
}
