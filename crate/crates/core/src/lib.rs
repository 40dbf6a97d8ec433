//! Skewed multivariate Birnbaum-Saunders distributions.
//!
//! ```
//! use smvbs::data::volle;
//! use smvbs::estimation::{confidence_intervals, mle, FitOptions};
//! use smvbs::inference::lr_test;
//!
//! let sample = volle(false);
//! let full = mle(&sample, &FitOptions::default())?;
//! let restricted = mle(&sample, &FitOptions::restricted())?;
//! let lr = lr_test(&full, &restricted, 1, 0.05)?;
//! assert!((lr.statistic - 6.6834).abs() < 0.02);
//! for ci in confidence_intervals(&full, 0.05)? {
//!     println!("{}: [{:.4}, {:.4}]", ci.name, ci.lower, ci.upper);
//! }
//! # Ok::<(), smvbs::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bs;
pub mod data;
pub mod error;
pub mod estimation;
pub mod gbs;
pub mod generator;
pub mod grid;
pub mod inference;
pub mod model;
pub mod rng;
pub mod specfun;

pub use bs::{BsMoments, BsParams};
pub use error::{Error, Result};
pub use gbs::{
    sbvbs_t_pdf, sbvgbs_log_density_terms, sbvgbs_mle, sbvgbs_pdf, SbvgbsFit, SbvgbsParams,
};
pub use generator::{DensityGenerator, GeneratorKind};
pub use model::{latent_correlation, product_moment, SmvbsParams, Transform};
