mod fit;
mod info;
mod likelihood;
mod optimize;
mod sample;

pub use fit::{
    confidence_intervals, matrix_rows, mle, mle_multistart, CovSource, FitOptions, FitResult,
    InfoKind, Interval, MultiStartFit, DEFAULT_LAMBDA_STARTS,
};
pub use info::{
    expected_info, fisher_determinant_at_zero, InformationMatrix, McOptions, DEFAULT_MC_DRAWS,
    DEFAULT_SEED,
};
pub use likelihood::{
    alpha_given_beta, hessian, log_density_terms, loglik, loglik_terms, mme, observed_info,
    profile_loglik, score, score_terms, LikelihoodWorkspace, MmeEstimate,
};
pub(crate) use optimize::{minimize, Problem, Settings};
pub use sample::SampleMatrix;
