use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Below this shape value the series form of `K*` is used.
pub const K_STAR_SWITCH: f64 = 0.5;

/// `K*(α) = [1 - erf(√2/α)]·exp(2/α²)`, written with `erfc` to avoid the
/// cancellation in `1 - erf`.
pub fn k_star_exact(alpha: f64) -> f64 {
    let x = std::f64::consts::SQRT_2 / alpha;
    libm::erfc(x) * (x * x).exp()
}

/// Small-shape approximation `K*(α) ≈ α/√(2π)·(1 - α²/4 + 3α⁴/16)`.
pub fn k_star_series(alpha: f64) -> f64 {
    let a2 = alpha * alpha;
    alpha / (2.0 * PI).sqrt() * (1.0 - a2 / 4.0 + 3.0 * a2 * a2 / 16.0)
}

fn k_from_star(alpha: f64, k_star: f64) -> f64 {
    0.5 * (alpha - PI.sqrt() * k_star / std::f64::consts::SQRT_2)
}

/// `K(α) = [α - √π·K*(α)/√2]/2`, the constant in the β-block of the
/// expected information.
pub fn k_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(domain(
            "k_alpha",
            format!("alpha must be positive, got {alpha}"),
        ));
    }
    let k_star = if alpha < K_STAR_SWITCH {
        k_star_series(alpha)
    } else {
        k_star_exact(alpha)
    };
    Ok(k_from_star(alpha, k_star))
}

/// `K(α)` with the exact `K*` everywhere (usable for `α ≳ 0.03`).
pub fn k_alpha_exact(alpha: f64) -> f64 {
    k_from_star(alpha, k_star_exact(alpha))
}
