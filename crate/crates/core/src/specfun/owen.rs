use std::f64::consts::PI;

use super::Quadrature;

/// Owen's T function `T(h, a) = (1/2π) ∫₀ᵃ exp(-h²(1+t²)/2)/(1+t²) dt`.
///
/// Evaluated by adaptive quadrature after `t = tan θ`, which maps the
/// integral onto the bounded range `[0, arctan a]` with a smooth integrand.
pub fn owen_t(h: f64, a: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    if a < 0.0 {
        return -owen_t(h, -a);
    }
    let h2 = 0.5 * h * h;
    let upper = a.atan();
    let quad = Quadrature::with_tolerances(1e-15, 1e-13);
    let r = quad.integrate(
        |theta: f64| {
            let c = theta.cos();
            (-h2 / (c * c)).exp()
        },
        0.0,
        upper,
    );
    r.value / (2.0 * PI)
}
