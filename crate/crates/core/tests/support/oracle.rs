//! Literal, per-pixel transcription of the three filters.
//!
//! Shares nothing with the library's filter code: its own border reflection,
//! its own patch copies, sorting-based median, and the patch-space weighted
//! mean whose center element is taken as the output.

#![allow(dead_code)]

use nlclip::{Image, Method, PatchDistance};

/// Mirror reflection without repeating the edge sample.
fn reflect(k: isize, n: usize) -> usize {
    let n = n as isize;
    if n == 1 {
        return 0;
    }
    let mut k = k;
    loop {
        if k < 0 {
            k = -k;
        } else if k >= n {
            k = 2 * (n - 1) - k;
        } else {
            return k as usize;
        }
    }
}

fn pixel(img: &Image<f64>, row: isize, col: isize) -> f64 {
    img.get(reflect(row, img.height()), reflect(col, img.width()))
}

fn patch(img: &Image<f64>, row: isize, col: isize, r: usize) -> Vec<f64> {
    let q = (r / 2) as isize;
    let mut out = Vec::new();
    for dy in -q..=q {
        for dx in -q..=q {
            out.push(pixel(img, row + dy, col + dx));
        }
    }
    out
}

fn population_sd(values: &[f64], center: f64) -> f64 {
    let n = values.len() as f64;
    (values.iter().map(|p| (p - center).powi(2)).sum::<f64>() / n).sqrt()
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Weighted patch mean over `members`; `None` if their weights sum to zero.
fn weighted_patch(patches: &[Vec<f64>], weights: &[f64], members: &[usize]) -> Option<Vec<f64>> {
    let len = patches[0].len();
    let mut num = vec![0.0; len];
    let mut den = 0.0;
    for &j in members {
        for e in 0..len {
            num[e] += weights[j] * patches[j][e];
        }
        den += weights[j];
    }
    if den > 0.0 {
        Some(num.into_iter().map(|x| x / den).collect())
    } else {
        None
    }
}

/// Denoises pixel by pixel following the algorithm step by step.
pub fn denoise(img: &Image<f64>, s: usize, r: usize, h: f64, method: Method) -> Image<f64> {
    denoise_with(img, s, r, h, method, PatchDistance::Mean)
}

pub fn denoise_with(
    img: &Image<f64>,
    s: usize,
    r: usize,
    h: f64,
    method: Method,
    distance: PatchDistance,
) -> Image<f64> {
    let half = (s / 2) as isize;
    let mut out = Vec::with_capacity(img.width() * img.height());
    for row in 0..img.height() as isize {
        for col in 0..img.width() as isize {
            // Step I: patch around the pixel being denoised.
            let own = patch(img, row, col, r);

            // Step II(a)-(b): weights and patch sums over the search window.
            let mut patches = Vec::new();
            let mut weights = Vec::new();
            let mut sums = Vec::new();
            for dy in -half..=half {
                for dx in -half..=half {
                    let pj = patch(img, row + dy, col + dx, r);
                    let mut d2: f64 = own.iter().zip(&pj).map(|(a, b)| (a - b) * (a - b)).sum();
                    if distance == PatchDistance::Mean {
                        d2 /= (r * r) as f64;
                    }
                    weights.push((-d2 / (h * h)).exp());
                    sums.push(pj.iter().sum::<f64>());
                    patches.push(pj);
                }
            }
            let everyone: Vec<usize> = (0..patches.len()).collect();

            let estimate = match method {
                Method::Nlm => weighted_patch(&patches, &weights, &everyone).unwrap(),
                Method::Nlscem | Method::Nlacm => {
                    // Step II(c): clip the population of patch sums.
                    let anchor = if method == Method::Nlscem {
                        sums.iter().sum::<f64>() / sums.len() as f64
                    } else {
                        median(&sums)
                    };
                    let sd = population_sd(&sums, anchor);
                    let (lo, hi) = (anchor - sd, anchor + sd);
                    let kept: Vec<usize> = everyone
                        .iter()
                        .copied()
                        .filter(|&j| sums[j] >= lo && sums[j] <= hi)
                        .collect();
                    // Step II(d); fall back to the unclipped mean if nothing is left.
                    weighted_patch(&patches, &weights, &kept)
                        .unwrap_or_else(|| weighted_patch(&patches, &weights, &everyone).unwrap())
                }
            };
            // Step II(e): center element of the estimated patch.
            let v = estimate[(r * r - 1) / 2];
            out.push(v.clamp(0.0, 1.0));
        }
    }
    Image::new(img.width(), img.height(), out).unwrap()
}

/// Unweighted mean over the mirror-padded search window.
pub fn box_mean(img: &Image<f64>, s: usize) -> Image<f64> {
    let half = (s / 2) as isize;
    Image::from_fn(img.width(), img.height(), |row, col| {
        let mut acc = 0.0;
        let mut n = 0.0;
        for dy in -half..=half {
            for dx in -half..=half {
                acc += pixel(img, row as isize + dy, col as isize + dx);
                n += 1.0;
            }
        }
        acc / n
    })
    .unwrap()
}

/// Uniform random image from a 64-bit seed (splitmix64).
pub fn random_image(width: usize, height: usize, seed: u64) -> Image<f64> {
    let mut state = seed;
    Image::from_fn(width, height, |_, _| {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64
    })
    .unwrap()
}

pub fn max_abs_diff(a: &Image<f64>, b: &Image<f64>) -> f64 {
    assert_eq!((a.width(), a.height()), (b.width(), b.height()));
    a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
