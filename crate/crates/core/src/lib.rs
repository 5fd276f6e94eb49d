//! Texture analysis with a dyadic Gabor filter bank.
//!
//! The crate covers the whole feature pipeline: single-channel preprocessing,
//! frequency-domain Gabor filtering with energy signatures, four
//! fixed-resolution signatures (fractal dimension, GMRF, co-occurrence and
//! run-length statistics), feature fusion and a diagonal Gaussian Bayes
//! classifier evaluated by leave-one-out cross-validation. Seeded synthetic
//! textures with known properties live in [`synth`].
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`). The `*F64` aliases
//! below are what the command-line front end and the acceptance suite use.

pub mod classify;
pub mod error;
pub mod features;
pub mod fft;
pub mod fixed_res;
pub mod gabor;
pub mod image;
pub mod scalar;
pub mod synth;

pub use crate::error::{Result, TexError};
pub use crate::features::{fuse, FeatureVector};
pub use crate::scalar::Real;

pub type GrayImageF64 = image::GrayImage<f64>;
pub type GrayImageF32 = image::GrayImage<f32>;
pub type ZeroMeanImageF64 = image::ZeroMeanImage<f64>;
pub type ZeroMeanImageF32 = image::ZeroMeanImage<f32>;
pub type GaborFilterSpecF64 = gabor::GaborFilterSpec<f64>;
pub type BankConfigF64 = gabor::BankConfig<f64>;
pub type BankConfigF32 = gabor::BankConfig<f32>;
pub type MagnitudeResponseF64 = gabor::MagnitudeResponse<f64>;
pub type FeatureVectorF64 = FeatureVector<f64>;
pub type FeatureVectorF32 = FeatureVector<f32>;
pub type LabeledDatasetF64 = classify::LabeledDataset<f64>;
pub type GaussianBayesModelF64 = classify::GaussianBayesModel<f64>;
