//! Seeded multiplicative (speckle) noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::scalar::{clamp_unit, Real};

/// Distribution of the per-pixel multiplier `n` in `V = I + n·I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseDistribution {
    /// Uniform on `[-√(3σ²), √(3σ²)]`.
    #[default]
    Uniform,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    variance: f64,
    pub seed: u64,
    pub distribution: NoiseDistribution,
}

impl NoiseSpec {
    pub fn new(variance: f64, seed: u64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise variance must be positive and finite, got {variance}"
            )));
        }
        Ok(Self {
            variance,
            seed,
            distribution: NoiseDistribution::Uniform,
        })
    }

    pub fn with_distribution(mut self, distribution: NoiseDistribution) -> Self {
        self.distribution = distribution;
        self
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Zero-mean multiplier stream. ChaCha8 seeded from `seed`; one draw per
    /// pixel, taken in row-major order.
    pub fn multipliers(&self) -> impl Iterator<Item = f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let sampler = match self.distribution {
            NoiseDistribution::Uniform => {
                let a = (3.0 * self.variance).sqrt();
                Sampler::Uniform(Uniform::new_inclusive(-a, a).expect("finite bounds"))
            }
            NoiseDistribution::Gaussian => {
                Sampler::Normal(Normal::new(0.0, self.variance.sqrt()).expect("finite sd"))
            }
        };
        std::iter::repeat_with(move || sampler.draw(&mut rng))
    }
}

enum Sampler {
    Uniform(Uniform<f64>),
    Normal(Normal<f64>),
}

impl Sampler {
    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Uniform(d) => d.sample(rng),
            Sampler::Normal(d) => d.sample(rng),
        }
    }
}

/// Corrupts `img` with speckle noise: `clamp(I + n·I, 0, 1)`.
pub fn add_speckle<T: Real>(img: &Image<T>, spec: &NoiseSpec) -> Image<T> {
    let data = img
        .data()
        .iter()
        .zip(spec.multipliers())
        .map(|(&a, n)| clamp_unit(a + T::lit(n) * a))
        .collect();
    Image::from_raw(img.width(), img.height(), data)
}
