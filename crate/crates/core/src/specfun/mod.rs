//! Scalar special functions.

mod confluent;
mod gamma;
mod kalpha;
mod normal;
mod owen;
mod quad;

pub use confluent::confluent_u;
pub use gamma::{
    beta, chi_square_cdf, chi_square_sf, gamma, gamma_p, gamma_q, incomplete_beta_ratio, ln_beta,
    ln_gamma,
};
pub use kalpha::{k_alpha, k_alpha_exact, k_star_exact, k_star_series, K_STAR_SWITCH};
pub use normal::{
    erf, erfc, erfcx, mills_weight, std_normal_cdf, std_normal_log_cdf, std_normal_log_pdf,
    std_normal_pdf, std_normal_quantile, std_normal_sf, INV_SQRT_2PI, LN_SQRT_2PI,
};
pub use owen::owen_t;
pub use quad::{QuadResult, Quadrature};
