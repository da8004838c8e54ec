//! Non-local means and its sigma-clipped variants.
//!
//! All three filters share the same search window and patch weights:
//!
//! * [`Method::Nlm`] averages every window pixel with weight
//!   `exp(-‖P_i - P_j‖² / h²)`.
//! * [`Method::Nlscem`] summarizes each window patch by its amplitude sum,
//!   keeps only patches whose sum lies within one population standard
//!   deviation of the window mean, and averages those.
//! * [`Method::Nlacm`] does the same around the window median.
//!
//! The window is `(2⌊s/2⌋ + 1)²` pixels centered on the pixel being filtered,
//! and borders are handled by mirror padding. Patch distances default to the
//! mean squared difference per patch pixel ([`PatchDistance::Mean`]); the raw
//! squared Euclidean norm is available as [`PatchDistance::Sum`].

mod engine;
pub mod stats;
pub mod weight;

use std::fmt;
use std::str::FromStr;

pub use engine::{
    denoise, denoise_clipped, denoise_nlm, patch_estimate, weight_map, window_patch_sums,
};
pub use stats::{clip_limits, mean, median, sd_about, ClipAnchor, ClippedSet, WindowStats};
pub use weight::{
    patch_distance, patch_sum, patch_weight, patch_weight_with, PatchDistance, WeightMap,
};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DEFAULT_SEARCH_SIZE: usize = 10;
pub const DEFAULT_PATCH_SIZE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Plain non-local means.
    Nlm,
    /// Mean-anchored clipping.
    Nlscem,
    /// Median-anchored clipping.
    Nlacm,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Nlm, Method::Nlscem, Method::Nlacm];

    pub fn clip_anchor(self) -> Option<ClipAnchor> {
        match self {
            Method::Nlm => None,
            Method::Nlscem => Some(ClipAnchor::Mean),
            Method::Nlacm => Some(ClipAnchor::Median),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Nlm => "nlm",
            Method::Nlscem => "nlscem",
            Method::Nlacm => "nlacm",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nlm" => Ok(Method::Nlm),
            "nlscem" | "nlscm" => Ok(Method::Nlscem),
            "nlacm" => Ok(Method::Nlacm),
            other => Err(Error::InvalidParameter(format!(
                "unknown method '{other}' (expected nlm, nlscem or nlacm)"
            ))),
        }
    }
}

/// Smoothing parameter rule `h = 10 · variance · 100 / 255`.
pub fn default_h(noise_variance: f64) -> Result<f64> {
    if !(noise_variance > 0.0 && noise_variance.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise variance must be positive, got {noise_variance}"
        )));
    }
    Ok(10.0 * noise_variance * 100.0 / 255.0)
}

/// Search window size `s`, patch side `r`, smoothing `h` and method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterParams<T> {
    s: usize,
    r: usize,
    h: T,
    method: Method,
    distance: PatchDistance,
}

impl<T: Real> FilterParams<T> {
    pub fn new(s: usize, r: usize, h: T, method: Method) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidParameter("search size s must be >= 1".into()));
        }
        if r == 0 || r.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "patch size r must be odd and >= 1, got {r}"
            )));
        }
        if !(h > T::zero() && h.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "h must be positive and finite, got {h}"
            )));
        }
        Ok(Self {
            s,
            r,
            h,
            method,
            distance: PatchDistance::default(),
        })
    }

    /// `s = 10`, `r = 3` and `h` from [`default_h`].
    pub fn for_variance(noise_variance: f64, method: Method) -> Result<Self> {
        let h = T::lit(default_h(noise_variance)?);
        Self::new(DEFAULT_SEARCH_SIZE, DEFAULT_PATCH_SIZE, h, method)
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_distance(mut self, distance: PatchDistance) -> Self {
        self.distance = distance;
        self
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn distance(&self) -> PatchDistance {
        self.distance
    }

    /// Half-width of the search window, `⌊s/2⌋`.
    pub fn window_radius(&self) -> usize {
        self.s / 2
    }

    /// Side of the (square, centered) search window.
    pub fn window_side(&self) -> usize {
        2 * self.window_radius() + 1
    }

    pub fn patch_radius(&self) -> usize {
        self.r / 2
    }

    /// Padding needed so every window patch of every pixel exists.
    pub fn margin(&self) -> usize {
        self.window_radius() + self.patch_radius()
    }
}
