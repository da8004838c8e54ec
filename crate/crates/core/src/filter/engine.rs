//! Per-pixel filtering over a mirror-padded buffer, parallel across rows.
//!
//! Every output pixel reads only the immutable padded input and a table of
//! patch sums, so rows can be split across threads freely. The result does
//! not depend on how they are split.
//!
//! Weighted means are accumulated relative to the center pixel,
//! `v_i + Σ w_j (v_j - v_i) / Σ w_j`, which keeps constant regions exact.

use rayon::prelude::*;

use super::stats::{ClipAnchor, WindowStats};
use super::weight::{patch_weight_with, weight_from_distance, PatchDistance, WeightMap};
use super::{FilterParams, Method};
use crate::error::{Error, Result};
use crate::image::{extract_patch, pad_mirror, Image, Patch, PixelIndex};
use crate::scalar::{clamp_unit, Real};

/// Padded input plus the patch sum of every position that has a full patch.
struct Prepared<T> {
    padded: Image<T>,
    sums: Vec<T>,
    margin: usize,
    window_radius: usize,
    patch_side: usize,
    distance: PatchDistance,
    h2: T,
}

impl<T: Real> Prepared<T> {
    fn new(img: &Image<T>, params: &FilterParams<T>) -> Self {
        let margin = params.margin();
        let padded = pad_mirror(img, margin);
        let (pw, ph) = (padded.width(), padded.height());
        let pr = params.patch_radius();
        let side = params.r();
        let mut sums = vec![T::zero(); pw * ph];
        for y in pr..ph - pr {
            for x in pr..pw - pr {
                let mut acc = T::zero();
                for py in y - pr..y - pr + side {
                    for &v in &padded.row(py)[x - pr..x - pr + side] {
                        acc = acc + v;
                    }
                }
                sums[y * pw + x] = acc;
            }
        }
        let h = params.h();
        Self {
            padded,
            sums,
            margin,
            window_radius: params.window_radius(),
            patch_side: side,
            distance: params.distance(),
            h2: h * h,
        }
    }

    /// Squared patch distance between padded positions `(ay, ax)` and `(by, bx)`.
    #[inline]
    fn patch_ssd(&self, ay: usize, ax: usize, by: usize, bx: usize) -> T {
        let pr = self.patch_side / 2;
        let side = self.patch_side;
        let mut acc = T::zero();
        for k in 0..side {
            let ra = &self.padded.row(ay - pr + k)[ax - pr..ax - pr + side];
            let rb = &self.padded.row(by - pr + k)[bx - pr..bx - pr + side];
            for (&a, &b) in ra.iter().zip(rb) {
                let d = a - b;
                acc = acc + d * d;
            }
        }
        acc
    }

    /// Fills `scratch` with weight, center value and patch sum of each
    /// window member of original pixel `(row, col)`, offsets row-major.
    fn gather(&self, row: usize, col: usize, scratch: &mut Scratch<T>) {
        scratch.clear();
        let (cy, cx) = (row + self.margin, col + self.margin);
        let wr = self.window_radius;
        let pw = self.padded.width();
        for ny in cy - wr..=cy + wr {
            let prow = &self.padded.row(ny)[cx - wr..=cx + wr];
            for (nx, &value) in (cx - wr..=cx + wr).zip(prow) {
                let d2 = self.distance.scale(
                    self.patch_ssd(cy, cx, ny, nx),
                    self.patch_side * self.patch_side,
                );
                scratch.weights.push(weight_from_distance(d2, self.h2));
                scratch.values.push(value);
                scratch.sums.push(self.sums[ny * pw + nx]);
            }
        }
    }

    fn center(&self, row: usize, col: usize) -> T {
        self.padded.get(row + self.margin, col + self.margin)
    }
}

#[derive(Default)]
struct Scratch<T> {
    weights: Vec<T>,
    values: Vec<T>,
    sums: Vec<T>,
    select: Vec<T>,
}

impl<T> Scratch<T> {
    fn with_capacity(n: usize) -> Self {
        Self {
            weights: Vec::with_capacity(n),
            values: Vec::with_capacity(n),
            sums: Vec::with_capacity(n),
            select: Vec::with_capacity(n),
        }
    }

    fn clear(&mut self) {
        self.weights.clear();
        self.values.clear();
        self.sums.clear();
    }
}

/// Weighted mean of the window values relative to `center`, restricted to
/// members accepted by `keep`. `None` when the retained weight is zero.
#[inline]
fn relative_mean<T: Real>(
    scratch: &Scratch<T>,
    center: T,
    keep: impl Fn(usize) -> bool,
) -> Option<T> {
    let mut num = T::zero();
    let mut den = T::zero();
    for (k, (&w, &v)) in scratch.weights.iter().zip(&scratch.values).enumerate() {
        if keep(k) {
            num = num + w * (v - center);
            den = den + w;
        }
    }
    (den > T::zero()).then(|| center + num / den)
}

fn filter_pixel<T: Real>(
    prep: &Prepared<T>,
    anchor: Option<ClipAnchor>,
    row: usize,
    col: usize,
    scratch: &mut Scratch<T>,
) -> T {
    prep.gather(row, col, scratch);
    let center = prep.center(row, col);
    let stats = anchor.map(|anchor| {
        WindowStats::compute(&scratch.sums, anchor, &mut scratch.select)
            .expect("search window is never empty")
    });
    let scratch = &*scratch;
    // the self weight is exactly 1, so the unclipped mean always exists
    let unclipped = || relative_mean(scratch, center, |_| true).unwrap_or(center);
    let value = match stats {
        None => unclipped(),
        Some(stats) => relative_mean(scratch, center, |k| stats.retains(scratch.sums[k]))
            .unwrap_or_else(unclipped),
    };
    clamp_unit(value)
}

fn run<T: Real>(img: &Image<T>, params: &FilterParams<T>, anchor: Option<ClipAnchor>) -> Image<T> {
    let prep = Prepared::new(img, params);
    let width = img.width();
    let window = params.window_side() * params.window_side();
    let mut out = vec![T::zero(); width * img.height()];
    out.par_chunks_mut(width).enumerate().for_each_init(
        || Scratch::with_capacity(window),
        |scratch, (row, line)| {
            for (col, px) in line.iter_mut().enumerate() {
                *px = filter_pixel(&prep, anchor, row, col, scratch);
            }
        },
    );
    Image::from_raw(width, img.height(), out)
}

/// Plain non-local means, whatever `params.method()` says.
pub fn denoise_nlm<T: Real>(img: &Image<T>, params: &FilterParams<T>) -> Image<T> {
    run(img, params, None)
}

/// Sigma-clipped non-local means around the given anchor.
///
/// Each window patch is summarized by its amplitude sum; only patches whose
/// sum falls in `[anchor - sd, anchor + sd]` contribute to the weighted mean.
/// If nothing with positive weight survives, the unclipped mean is used.
pub fn denoise_clipped<T: Real>(
    img: &Image<T>,
    params: &FilterParams<T>,
    anchor: ClipAnchor,
) -> Image<T> {
    run(img, params, Some(anchor))
}

/// Denoises with the method selected in `params`.
pub fn denoise<T: Real>(img: &Image<T>, params: &FilterParams<T>) -> Image<T> {
    run(img, params, params.method().clip_anchor())
}

fn check_index<T: Real>(img: &Image<T>, index: PixelIndex) -> Result<()> {
    if index.row < img.height() && index.col < img.width() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "pixel ({}, {}) outside {}x{} image",
            index.row,
            index.col,
            img.width(),
            img.height()
        )))
    }
}

type Neighbors<T> = Vec<((isize, isize), Patch<T>)>;

fn window_patches<T: Real>(
    padded: &Image<T>,
    params: &FilterParams<T>,
    index: PixelIndex,
) -> Result<(Patch<T>, Neighbors<T>)> {
    let m = params.margin();
    let wr = params.window_radius() as isize;
    let center = PixelIndex::new(index.row + m, index.col + m);
    let own = extract_patch(padded, center, params.r())?;
    let mut neighbors = Vec::with_capacity(params.window_side() * params.window_side());
    for dy in -wr..=wr {
        for dx in -wr..=wr {
            let at = PixelIndex::new(
                (center.row as isize + dy) as usize,
                (center.col as isize + dx) as usize,
            );
            neighbors.push(((dy, dx), extract_patch(padded, at, params.r())?));
        }
    }
    Ok((own, neighbors))
}

/// Search-window weights of one pixel, offsets in row-major order.
pub fn weight_map<T: Real>(
    img: &Image<T>,
    index: PixelIndex,
    params: &FilterParams<T>,
) -> Result<WeightMap<T>> {
    check_index(img, index)?;
    let padded = pad_mirror(img, params.margin());
    let (own, neighbors) = window_patches(&padded, params, index)?;
    let weights = neighbors
        .iter()
        .map(|(offset, p)| {
            Ok((
                *offset,
                patch_weight_with(&own, p, params.h(), params.distance())?,
            ))
        })
        .collect::<Result<_>>()?;
    Ok(WeightMap { weights })
}

/// Patch sums of one pixel's search window, offsets in row-major order.
pub fn window_patch_sums<T: Real>(
    img: &Image<T>,
    index: PixelIndex,
    params: &FilterParams<T>,
) -> Result<Vec<T>> {
    check_index(img, index)?;
    let padded = pad_mirror(img, params.margin());
    let (_, neighbors) = window_patches(&padded, params, index)?;
    Ok(neighbors
        .iter()
        .map(|(_, p)| super::weight::patch_sum(p))
        .collect())
}

/// Patch-space estimate `P'_i = Σ w_ij P_j / Σ w_ij` over the (clipped)
/// window of one pixel, before clamping. Its center element is the value
/// [`denoise`] produces for that pixel.
///
/// Works patch by patch and is far slower than [`denoise`]; it exists to
/// check the center-pixel reduction the engine relies on.
pub fn patch_estimate<T: Real>(
    img: &Image<T>,
    index: PixelIndex,
    params: &FilterParams<T>,
) -> Result<Patch<T>> {
    check_index(img, index)?;
    let padded = pad_mirror(img, params.margin());
    let (own, neighbors) = window_patches(&padded, params, index)?;
    let weights: Vec<T> = neighbors
        .iter()
        .map(|(_, p)| patch_weight_with(&own, p, params.h(), params.distance()))
        .collect::<Result<_>>()?;

    let aggregate = |keep: &dyn Fn(usize) -> bool| -> Option<Vec<T>> {
        let r2 = params.r() * params.r();
        let mut acc = vec![T::zero(); r2];
        let mut den = T::zero();
        for (k, ((_, p), &w)) in neighbors.iter().zip(&weights).enumerate() {
            if keep(k) {
                for (a, &v) in acc.iter_mut().zip(p.values()) {
                    *a = *a + w * v;
                }
                den = den + w;
            }
        }
        (den > T::zero()).then(|| acc.into_iter().map(|a| a / den).collect())
    };

    let all = |_: usize| true;
    let values = match params.method() {
        Method::Nlm => aggregate(&all),
        method => {
            let anchor = method.clip_anchor().expect("clipping method");
            let sums: Vec<T> = neighbors
                .iter()
                .map(|(_, p)| super::weight::patch_sum(p))
                .collect();
            let stats = super::stats::clip_limits(&sums, anchor)?;
            aggregate(&|k| stats.retains(sums[k])).or_else(|| aggregate(&all))
        }
    }
    .expect("self weight is 1");
    Patch::new(params.r(), values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(s: usize, r: usize, h: f64, method: Method) -> FilterParams<f64> {
        FilterParams::new(s, r, h, method).unwrap()
    }

    fn lcg_image(w: usize, h: usize, seed: u64) -> Image<f64> {
        let mut state = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        Image::from_fn(w, h, |_, _| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        })
        .unwrap()
    }

    #[test]
    fn single_pixel_is_unchanged() {
        let img = Image::new(1, 1, vec![0.37]).unwrap();
        for m in Method::ALL {
            let out = denoise(&img, &params(10, 3, 0.2, m));
            assert_eq!(out.data(), &[0.37]);
        }
    }

    #[test]
    fn constant_is_a_fixpoint() {
        let img = Image::filled(9, 6, 0.3).unwrap();
        for m in Method::ALL {
            assert_eq!(denoise(&img, &params(4, 3, 0.05, m)), img);
        }
    }

    #[test]
    fn dispatch_matches_direct_calls() {
        let img = lcg_image(12, 9, 4);
        let p = params(4, 3, 0.4, Method::Nlm);
        assert_eq!(denoise(&img, &p), denoise_nlm(&img, &p));
        assert_eq!(
            denoise(&img, &p.with_method(Method::Nlacm)),
            denoise_clipped(&img, &p, ClipAnchor::Median)
        );
        assert_eq!(
            denoise(&img, &p.with_method(Method::Nlscem)),
            denoise_clipped(&img, &p, ClipAnchor::Mean)
        );
    }

    #[test]
    fn weights_are_bounded_and_self_is_one() {
        let img = lcg_image(8, 8, 9);
        let p = params(4, 3, 0.5, Method::Nlm);
        for index in [
            PixelIndex::new(0, 0),
            PixelIndex::new(3, 5),
            PixelIndex::new(7, 7),
        ] {
            let map = weight_map(&img, index, &p).unwrap();
            assert_eq!(map.weights.len(), 25);
            assert_eq!(map.get((0, 0)), Some(1.0));
            assert!(map.weights.iter().all(|&(_, w)| w > 0.0 && w <= 1.0));
        }
        assert!(weight_map(&img, PixelIndex::new(8, 0), &p).is_err());
    }

    #[test]
    fn patch_estimate_center_matches_engine() {
        let img = lcg_image(10, 10, 21);
        for m in Method::ALL {
            let p = params(4, 3, 0.6, m);
            let out = denoise(&img, &p);
            for (row, col) in [(0, 0), (4, 7), (9, 2)] {
                let est = patch_estimate(&img, PixelIndex::new(row, col), &p).unwrap();
                assert!(
                    (est.center_value() - out.get(row, col)).abs() < 1e-12,
                    "{m} ({row},{col})"
                );
            }
        }
    }

    #[test]
    fn independent_of_thread_count() {
        let img = lcg_image(24, 17, 33);
        let p = params(6, 3, 0.3, Method::Nlacm);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = single.install(|| denoise(&img, &p));
        let b = many.install(|| denoise(&img, &p));
        assert_eq!(a, b);
    }

    #[test]
    fn f32_path_runs() {
        let img = Image::<f32>::from_fn(8, 8, |r, c| ((r * 8 + c) % 7) as f32 / 7.0).unwrap();
        let p = FilterParams::new(4, 3, 0.3f32, Method::Nlacm).unwrap();
        let out = denoise(&img, &p);
        assert!(out.data().iter().all(|v| (0.0..=1.0).contains(v)));
        let flat = Image::<f32>::filled(5, 5, 0.6).unwrap();
        assert_eq!(denoise(&flat, &p), flat);
    }
}
