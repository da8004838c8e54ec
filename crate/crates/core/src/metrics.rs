//! MSE/PSNR and scanline edge profiles.

use crate::error::{Error, Result};
use crate::image::Image;
use crate::scalar::Real;

/// Mean of squared element-wise differences.
pub fn mse<T: Real>(a: &Image<T>, b: &Image<T>) -> Result<T> {
    a.same_dimensions(b)?;
    let n = T::from_usize(a.data().len()).expect("pixel count fits the scalar type");
    let ss = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<T>();
    Ok(ss / n)
}

/// `10·log10(1 / mse)` for unit peak amplitude; `+∞` when the images match.
pub fn psnr<T: Real>(a: &Image<T>, b: &Image<T>) -> Result<T> {
    Ok(psnr_from_mse(mse(a, b)?))
}

pub fn psnr_from_mse<T: Real>(mse: T) -> T {
    if mse == T::zero() {
        T::infinity()
    } else {
        T::lit(10.0) * (T::one() / mse).log10()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport<T> {
    pub mse: T,
    pub psnr_db: T,
}

pub fn quality<T: Real>(reference: &Image<T>, test: &Image<T>) -> Result<QualityReport<T>> {
    let mse = mse(reference, test)?;
    Ok(QualityReport {
        mse,
        psnr_db: psnr_from_mse(mse),
    })
}

/// Amplitudes along one image row.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeProfile<T> {
    pub positions: Vec<usize>,
    pub amplitudes: Vec<T>,
}

pub fn extract_profile<T: Real>(img: &Image<T>, row: usize) -> Result<EdgeProfile<T>> {
    if row >= img.height() {
        return Err(Error::RowOutOfRange {
            row,
            height: img.height(),
        });
    }
    Ok(EdgeProfile {
        positions: (0..img.width()).collect(),
        amplitudes: img.row(row).to_vec(),
    })
}

/// Root-mean-square amplitude difference between two profiles.
pub fn profile_rmse<T: Real>(clean: &EdgeProfile<T>, test: &EdgeProfile<T>) -> Result<T> {
    let (n, m) = (clean.amplitudes.len(), test.amplitudes.len());
    if n != m {
        return Err(Error::LengthMismatch(n, m));
    }
    if n == 0 {
        return Err(Error::EmptyPopulation);
    }
    let ss = clean
        .amplitudes
        .iter()
        .zip(&test.amplitudes)
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum::<T>();
    Ok((ss / T::from_usize(n).expect("length fits")).sqrt())
}
