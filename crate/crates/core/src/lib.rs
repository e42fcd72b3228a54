//! Quantile regression forests with kernel density forecasts.
//!
//! The pipeline mirrors a small-sample crop-yield study: impute missing
//! weather values with KNN, min-max normalise, split chronologically, grow
//! a random forest whose leaves keep their training rows, and read
//! conditional quantiles, prediction intervals and smoothed density
//! forecasts off the forest weights.
//!
//! ```no_run
//! use qrfsj::dataset::{chronological_split, knn_impute, load_csv, min_max_normalize};
//! use qrfsj::forest::{Forest, ForestConfig};
//! use qrfsj::qrf::{predict_median, prediction_interval};
//!
//! # fn main() -> qrfsj::Result<()> {
//! let raw = knn_impute(&load_csv("yield.csv")?, 3)?;
//! let (data, _params) = min_max_normalize(&raw)?;
//! let (train, test) = chronological_split(&data, 0.8)?;
//! let forest = Forest::fit(&train, &ForestConfig::default())?;
//! for i in 0..test.len() {
//!     let x = test.row(i);
//!     let pi = prediction_interval(&forest, x, 0.9)?;
//!     println!("{} {:.3} [{:.3}, {:.3}]", test.years()[i], predict_median(&forest, x)?, pi.lower, pi.upper);
//! }
//! # Ok(())
//! # }
//! ```

pub mod cli;
pub mod dataset;
pub mod error;
pub mod forest;
pub mod kde;
pub mod metrics;
pub mod numeric;
pub mod qrf;

pub use error::{Error, Result};
