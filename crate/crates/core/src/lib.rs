//! Imputation quality assessment for tabular data.
//!
//! Every feature gets a quality score ω = μ + (1 − μ)·δ, combining its
//! completeness μ with how well its best unbiased imputer recovers masked
//! values (δ). Features below a threshold can be dropped; the rest are filled
//! by a trainable, serialisable pipeline.
//!
//! ```no_run
//! use iqa::engine::{assess, AssessOptions};
//! use iqa::table::{load_csv, CsvOptions};
//!
//! let table = load_csv("data.csv", &CsvOptions::default())?;
//! for r in assess(&table, &AssessOptions::default())? {
//!     println!("{} ω={:.3} via {}", r.feature, r.omega, r.chosen_imputer);
//! }
//! # Ok::<(), iqa::error::IqaError>(())
//! ```

// `!(x >= 0.0)` style range checks are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod cli;
pub mod config;
pub mod depgraph;
pub mod engine;
pub mod error;
pub mod estimators;
pub mod imputers;
pub mod metrics;
pub mod report;
pub mod seed;
pub mod stats;
pub mod table;

pub use error::{IqaError, Result};
