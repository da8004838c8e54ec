//! Patch similarity weights and patch sums.

use crate::error::{Error, Result};
use crate::image::Patch;
use crate::scalar::Real;

/// How the squared patch difference enters the weight `exp(-d / h²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PatchDistance {
    /// `d = ‖a - b‖²`.
    Sum,
    /// `d = ‖a - b‖² / r²`, the mean squared difference per patch pixel.
    /// Keeps `h` on the same scale for every patch size.
    #[default]
    Mean,
}

impl PatchDistance {
    pub fn name(self) -> &'static str {
        match self {
            PatchDistance::Sum => "sum",
            PatchDistance::Mean => "mean",
        }
    }

    #[inline]
    pub(crate) fn scale<T: Real>(self, d2: T, patch_len: usize) -> T {
        match self {
            PatchDistance::Sum => d2,
            PatchDistance::Mean => d2 / T::from_usize(patch_len).expect("patch size fits"),
        }
    }
}

impl std::str::FromStr for PatchDistance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sum" => Ok(PatchDistance::Sum),
            "mean" => Ok(PatchDistance::Mean),
            other => Err(Error::InvalidParameter(format!(
                "unknown patch distance '{other}' (expected sum or mean)"
            ))),
        }
    }
}

/// Squared Euclidean distance between two patches, without normalization.
pub fn patch_distance<T: Real>(a: &Patch<T>, b: &Patch<T>) -> Result<T> {
    if a.side() != b.side() {
        return Err(Error::PatchSideMismatch(a.side(), b.side()));
    }
    Ok(a.values()
        .iter()
        .zip(b.values())
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum())
}

/// `exp(-‖a - b‖² / h²)`.
pub fn patch_weight<T: Real>(a: &Patch<T>, b: &Patch<T>, h: T) -> Result<T> {
    patch_weight_with(a, b, h, PatchDistance::Sum)
}

/// Patch weight under the given distance convention.
pub fn patch_weight_with<T: Real>(
    a: &Patch<T>,
    b: &Patch<T>,
    h: T,
    distance: PatchDistance,
) -> Result<T> {
    if h.is_nan() || h <= T::zero() {
        return Err(Error::InvalidParameter(format!(
            "h must be positive, got {h}"
        )));
    }
    let d2 = distance.scale(patch_distance(a, b)?, a.values().len());
    Ok(weight_from_distance(d2, h * h))
}

#[inline]
pub(crate) fn weight_from_distance<T: Real>(d2: T, h2: T) -> T {
    (-d2 / h2).exp()
}

pub fn patch_sum<T: Real>(p: &Patch<T>) -> T {
    p.values().iter().copied().sum()
}

/// Weights of every search-window neighbor of one pixel, offsets row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMap<T> {
    pub weights: Vec<((isize, isize), T)>,
}

impl<T: Real> WeightMap<T> {
    pub fn get(&self, offset: (isize, isize)) -> Option<T> {
        self.weights
            .iter()
            .find(|(o, _)| *o == offset)
            .map(|&(_, w)| w)
    }
}
