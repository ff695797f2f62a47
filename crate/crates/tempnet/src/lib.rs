//! Temporal contact networks as time series.
//!
//! The pipeline: parse contact logs into equispaced graph snapshots, extract
//! per-snapshot structural properties as time series, pick a forecasting
//! window from neighborhood-overlap decay, forecast each property with
//! sliding-window ARIMA models, optionally filter prediction points by
//! spectrogram suitability, and drive targeted-attack simulations scored by
//! temporal robustness.

pub mod arima;
pub mod attack;
pub mod community;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod pipeline;
pub mod series;
pub mod spectral;
pub mod stationarity;
pub mod synth;

mod linalg;

pub use error::{Error, Result};
