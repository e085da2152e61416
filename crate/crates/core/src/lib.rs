//! Forecasting library built around a three-stage fitting network:
//! a stationary trend transform, a stack of linear-regression feature
//! encoders, and an interchangeable fine-tune regression layer.
//!
//! The pipeline trains on a single real-valued series and extrapolates it
//! one step at a time: normalize to [0, 1], divide out a fitted trend,
//! encode each position into an m-dimensional feature vector of chained
//! one-step-ahead linear predictions, and fit a regressor (linear,
//! boosted trees, or a small feedforward net) from features to the next
//! transformed value. Forecasting rolls the trained one-step map forward,
//! inverting the trend and normalization at each new grid point.
//!
//! Modules:
//! - [`series`]: validated series container, normalization, differencing,
//!   error metrics
//! - [`stationary`]: trend classification and the stationary transform
//! - [`lrf`]: the layered linear-regression feature encoder
//! - [`regress`]: fine-tune regression backends behind one contract
//! - [`pipeline`]: end-to-end training, rolling generalization,
//!   serialization
//! - [`bench`]: synthetic function suite, CSV ingestion, benchmark
//!   protocols and reports

pub mod bench;
pub mod lrf;
pub mod pipeline;
pub mod regress;
pub mod series;
mod solve;
pub mod stationary;

pub use pipeline::{FittedPipeline, PipelineConfig};
pub use series::{NormParams, Series};
