//! Non-local means image denoising with sigma-clipped patch populations.
//!
//! The crate provides plain non-local means together with two robust
//! variants that discard outlying patches before averaging: one clips around
//! the window mean, the other around the window median. Around the filters
//! sit the pieces needed to evaluate them: a grayscale [`Image`] type with
//! mirror padding, PGM I/O, seeded speckle noise, synthetic test images,
//! PSNR/MSE metrics and a sweep harness that emits CSV.
//!
//! Everything is generic over the amplitude type through [`Real`]; the
//! aliases below fix it to `f64` or `f32`.

pub mod bench;
mod error;
pub mod filter;
pub mod image;
pub mod metrics;
pub mod noise;
pub mod pgm;
mod scalar;
pub mod synth;

pub use error::{Error, Result};
pub use filter::{default_h, denoise, ClipAnchor, FilterParams, Method, PatchDistance};
pub use image::{extract_patch, pad_mirror, Image, Patch, PixelIndex};
pub use metrics::{mse, psnr};
pub use noise::{add_speckle, NoiseDistribution, NoiseSpec};
pub use pgm::{read_pgm, write_pgm};
pub use scalar::Real;

pub type ImageF64 = Image<f64>;
pub type ImageF32 = Image<f32>;
pub type PatchF64 = Patch<f64>;
pub type PatchF32 = Patch<f32>;
pub type FilterParamsF64 = FilterParams<f64>;
pub type FilterParamsF32 = FilterParams<f32>;
