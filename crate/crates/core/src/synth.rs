//! Synthetic test images.

use crate::error::{Error, Result};
use crate::image::Image;
use crate::scalar::Real;

fn check_levels<T: Real>(low: T, high: T) -> Result<()> {
    if low >= T::zero() && low < high && high <= T::one() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "levels must satisfy 0 <= low < high <= 1, got low={low} high={high}"
        )))
    }
}

/// Checkerboard with `square`-pixel cells; the top-left cell is `high`.
pub fn generate_checker<T: Real>(
    width: usize,
    height: usize,
    square: usize,
    low: T,
    high: T,
) -> Result<Image<T>> {
    if square == 0 {
        return Err(Error::InvalidParameter(
            "checker square must be >= 1".into(),
        ));
    }
    check_levels(low, high)?;
    Image::from_fn(width, height, |row, col| {
        if (row / square + col / square).is_multiple_of(2) {
            high
        } else {
            low
        }
    })
}

/// The 256×256 checker with 32-pixel squares used by the benchmarks.
pub fn default_checker<T: Real>() -> Image<T> {
    generate_checker(256, 256, 32, T::zero(), T::one()).expect("valid defaults")
}

/// Vertical step: columns `< width / 2` are `low`, the rest `high`.
pub fn generate_step_edge<T: Real>(
    width: usize,
    height: usize,
    low: T,
    high: T,
) -> Result<Image<T>> {
    if width < 2 {
        return Err(Error::InvalidParameter(format!(
            "step edge needs width >= 2, got {width}"
        )));
    }
    check_levels(low, high)?;
    let split = width / 2;
    Image::from_fn(width, height, |_, col| if col < split { low } else { high })
}
