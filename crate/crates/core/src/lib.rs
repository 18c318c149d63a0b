//! Service-stage classification of surgical face masks from micro-photographs.
//!
//! A photo is converted to gray, quantized to a small number of levels, and
//! summarized by four gray-level co-occurrence measures (contrast,
//! correlation, energy, homogeneity). A k-nearest-neighbor model over those
//! vectors assigns one of three stages: type I "normal use" (day 0–1),
//! type II "early warning" (day 2–3) and type III "not recommended"
//! (day 4–5).

pub mod cli;
pub mod dataset;
pub mod error;
pub mod glcm;
pub mod imaging;
pub mod knn;
pub mod metrics;
pub mod pipeline;
pub mod service;

pub use error::{Error, Result};
pub use glcm::{FeatureConfig, FeatureVector, GlcmConfig, Offset};
pub use knn::{BinaryLabel, Model, StageLabel};
