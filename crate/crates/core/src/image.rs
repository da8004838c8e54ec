//! Grayscale raster, mirror padding and patch extraction.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row/column address of a pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PixelIndex {
    pub row: usize,
    pub col: usize,
}

impl PixelIndex {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

/// Single-channel image with amplitudes in `[0, 1]`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Image<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Real> Image<T> {
    /// Builds an image from row-major data, checking size and amplitude range.
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "expected {} samples for {width}x{height}, got {}",
                width * height,
                data.len()
            )));
        }
        if let Some(pos) = data
            .iter()
            .position(|&a| !(a >= T::zero() && a <= T::one()))
        {
            return Err(Error::InvalidImage(format!(
                "amplitude {} at index {pos} is outside [0, 1]",
                data[pos]
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Constant image.
    pub fn filled(width: usize, height: usize, value: T) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Builds an image by evaluating `f(row, col)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> T,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                data.push(f(row, col));
            }
        }
        Self::new(width, height, data)
    }

    // Callers guarantee the invariants (every internal producer clamps).
    pub(crate) fn from_raw(width: usize, height: usize, data: Vec<T>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn at(&self, index: PixelIndex) -> T {
        self.get(index.row, index.col)
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.data[row * self.width..(row + 1) * self.width]
    }

    pub fn same_dimensions(&self, other: &Self) -> Result<()> {
        if self.width == other.width && self.height == other.height {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left_width: self.width,
                left_height: self.height,
                right_width: other.width,
                right_height: other.height,
            })
        }
    }

    /// Copies out the `width`×`height` block whose top-left corner is `(top, left)`.
    pub fn crop(&self, top: usize, left: usize, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 || top + height > self.height || left + width > self.width {
            return Err(Error::InvalidImage(format!(
                "crop {width}x{height} at ({top}, {left}) exceeds {}x{}",
                self.width, self.height
            )));
        }
        let mut data = Vec::with_capacity(width * height);
        for row in top..top + height {
            let start = row * self.width + left;
            data.extend_from_slice(&self.data[start..start + width]);
        }
        Ok(Self::from_raw(width, height, data))
    }

    pub fn flip_horizontal(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for row in 0..self.height {
            data.extend(self.row(row).iter().rev().copied());
        }
        Self::from_raw(self.width, self.height, data)
    }

    pub fn flip_vertical(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for row in (0..self.height).rev() {
            data.extend_from_slice(self.row(row));
        }
        Self::from_raw(self.width, self.height, data)
    }

    /// Rotates a quarter turn clockwise; the result is `height`×`width`.
    pub fn rotate90(&self) -> Self {
        let (w, h) = (self.height, self.width);
        let mut data = Vec::with_capacity(self.data.len());
        for row in 0..h {
            for col in 0..w {
                data.push(self.get(self.height - 1 - col, row));
            }
        }
        Self::from_raw(w, h, data)
    }

    pub fn min_max(&self) -> (T, T) {
        self.data
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }
}

/// Maps a possibly out-of-range coordinate onto `0..len` by reflection about
/// the edge samples, without repeating them. Repeats cyclically for offsets
/// larger than the dimension.
#[inline]
pub fn reflect_index(k: isize, len: usize) -> usize {
    if len == 1 {
        return 0;
    }
    let period = 2 * (len as isize - 1);
    let t = k.rem_euclid(period);
    if t < len as isize {
        t as usize
    } else {
        (period - t) as usize
    }
}

/// Extends the image by `margin` pixels on every side using mirror reflection.
pub fn pad_mirror<T: Real>(img: &Image<T>, margin: usize) -> Image<T> {
    let (w, h) = (img.width(), img.height());
    let pw = w + 2 * margin;
    let ph = h + 2 * margin;
    let m = margin as isize;
    let cols: Vec<usize> = (0..pw as isize).map(|c| reflect_index(c - m, w)).collect();
    let mut data = Vec::with_capacity(pw * ph);
    for prow in 0..ph as isize {
        let src = img.row(reflect_index(prow - m, h));
        data.extend(cols.iter().map(|&c| src[c]));
    }
    Image::from_raw(pw, ph, data)
}

/// Square `side`×`side` block of amplitudes centered on a pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch<T> {
    side: usize,
    values: Vec<T>,
    center_value: T,
}

impl<T: Real> Patch<T> {
    pub fn new(side: usize, values: Vec<T>) -> Result<Self> {
        if side == 0 || side.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "patch side must be odd and positive, got {side}"
            )));
        }
        if values.len() != side * side {
            return Err(Error::LengthMismatch(side * side, values.len()));
        }
        let center_value = values[(side * side - 1) / 2];
        Ok(Self {
            side,
            values,
            center_value,
        })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn center_value(&self) -> T {
        self.center_value
    }
}

/// Copies the `r`×`r` block centered on `center`.
///
/// The image must already be padded so the whole block exists.
pub fn extract_patch<T: Real>(img: &Image<T>, center: PixelIndex, r: usize) -> Result<Patch<T>> {
    if r == 0 || r.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "patch side must be odd and positive, got {r}"
        )));
    }
    let half = r / 2;
    let out_of_bounds = Error::PatchOutOfBounds {
        row: center.row,
        col: center.col,
        side: r,
    };
    if center.row < half
        || center.col < half
        || center.row + half >= img.height()
        || center.col + half >= img.width()
    {
        return Err(out_of_bounds);
    }
    let mut values = Vec::with_capacity(r * r);
    for row in center.row - half..=center.row + half {
        values.extend_from_slice(&img.row(row)[center.col - half..=center.col + half]);
    }
    Patch::new(r, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img(w: usize, h: usize, data: &[f64]) -> Image<f64> {
        Image::new(w, h, data.to_vec()).unwrap()
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(Image::<f64>::new(0, 1, vec![]).is_err());
        assert!(Image::<f64>::new(2, 2, vec![0.0; 3]).is_err());
        assert!(Image::<f64>::new(1, 1, vec![1.5]).is_err());
        assert!(Image::<f64>::new(1, 1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn pad_single_pixel() {
        let p = pad_mirror(&img(1, 1, &[0.5]), 1);
        assert_eq!((p.width(), p.height()), (3, 3));
        assert!(p.data().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn pad_row_without_edge_duplication() {
        let (a, b, c) = (0.1, 0.2, 0.3);
        let p = pad_mirror(&img(3, 1, &[a, b, c]), 1);
        assert_eq!(p.row(1), &[b, a, b, c, b]);
        assert_eq!(p.row(0), p.row(1));
        assert_eq!(p.row(2), p.row(1));
    }

    #[test]
    fn pad_margin_beyond_dimension_repeats() {
        let p = pad_mirror(&img(2, 1, &[0.0, 1.0]), 3);
        assert_eq!(p.row(0), &[1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn pad_interior_matches_index_oracle() {
        let data: Vec<f64> = (0..16).map(|i| ((i * 7) % 16) as f64 / 16.0).collect();
        let src = img(4, 4, &data);
        let p = pad_mirror(&src, 2);
        for row in 0..4 {
            for col in 0..4 {
                assert_eq!(p.get(row + 2, col + 2), src.get(row, col));
            }
        }
        // reflected corner: padded (0,0) is source (2,2)
        assert_eq!(p.get(0, 0), src.get(2, 2));
        assert_eq!(p.get(1, 7), src.get(1, 1));
    }

    #[test]
    fn reflect_index_table() {
        let got: Vec<usize> = (-4..8).map(|k| reflect_index(k, 4)).collect();
        assert_eq!(got, vec![2, 3, 2, 1, 0, 1, 2, 3, 2, 1, 0, 1]);
    }

    #[test]
    fn extract_from_constant() {
        let p =
            extract_patch(&Image::filled(5, 5, 0.3).unwrap(), PixelIndex::new(2, 3), 3).unwrap();
        assert!(p.values().iter().all(|&v| v == 0.3));
        assert_eq!(p.center_value(), 0.3);
    }

    #[test]
    fn extract_from_ramp() {
        let ramp = Image::from_fn(5, 5, |_, c| c as f64 / 5.0).unwrap();
        let p = extract_patch(&ramp, PixelIndex::new(2, 2), 3).unwrap();
        let expected: Vec<f64> = (1..=3)
            .flat_map(|_| (1..=3).map(|c| c as f64 / 5.0))
            .collect();
        assert_eq!(p.values(), expected.as_slice());
        assert_eq!(p.center_value(), ramp.get(2, 2));
    }

    #[test]
    fn extract_degenerate_patch() {
        let src = img(2, 1, &[0.25, 0.75]);
        let p = extract_patch(&src, PixelIndex::new(0, 1), 1).unwrap();
        assert_eq!(p.values(), &[0.75]);
    }

    #[test]
    fn extract_requires_padding() {
        let src = Image::filled(3, 3, 0.0).unwrap();
        assert!(matches!(
            extract_patch(&src, PixelIndex::new(0, 1), 3),
            Err(Error::PatchOutOfBounds { .. })
        ));
        assert!(extract_patch(&src, PixelIndex::new(1, 1), 2).is_err());
    }

    #[test]
    fn rotations_compose_to_identity() {
        let src = Image::from_fn(3, 2, |r, c| (r * 3 + c) as f64 / 6.0).unwrap();
        let r1 = src.rotate90();
        assert_eq!((r1.width(), r1.height()), (2, 3));
        assert_eq!(r1.get(0, 0), src.get(1, 0));
        assert_eq!(r1.rotate90().rotate90().rotate90(), src);
        assert_eq!(src.flip_horizontal().flip_horizontal(), src);
        assert_eq!(src.flip_vertical().get(0, 2), src.get(1, 2));
    }
}
