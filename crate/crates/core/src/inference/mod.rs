mod gof;
mod hypothesis;
mod kbj;

pub use gof::{gof_marginal, GofReport, PValueBound, A_STAR_CRITICAL, W_STAR_CRITICAL};
pub use hypothesis::{lr_test, vuong_test, TestReport, Verdict};
pub use kbj::{kbj_log_density_terms, kbj_mle, KbjFit, KbjParams};
