//! Window statistics for sigma clipping: anchors, spread and clip limits.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Central value the clipping interval is built around.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClipAnchor {
    Mean,
    Median,
}

/// Clipping state of one search window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowStats<T> {
    pub anchor: ClipAnchor,
    pub anchor_value: T,
    pub sd: T,
    pub lower: T,
    pub upper: T,
    pub population: usize,
}

impl<T: Real> WindowStats<T> {
    /// Computes the statistics, using `scratch` for the median selection.
    pub fn compute(values: &[T], anchor: ClipAnchor, scratch: &mut Vec<T>) -> Result<Self> {
        let anchor_value = match anchor {
            ClipAnchor::Mean => mean(values)?,
            ClipAnchor::Median => median_with(values, scratch)?,
        };
        let sd = sd_about(values, anchor_value)?;
        Ok(Self {
            anchor,
            anchor_value,
            sd,
            lower: anchor_value - sd,
            upper: anchor_value + sd,
            population: values.len(),
        })
    }

    /// Closed-interval membership test.
    #[inline]
    pub fn retains(&self, value: T) -> bool {
        value >= self.lower && value <= self.upper
    }

    pub fn clip(&self, values: &[T]) -> ClippedSet {
        ClippedSet {
            members: values
                .iter()
                .enumerate()
                .filter(|(_, &v)| self.retains(v))
                .map(|(k, _)| k)
                .collect(),
        }
    }
}

/// Indices of the window elements that survive clipping.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClippedSet {
    pub members: Vec<usize>,
}

impl ClippedSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.binary_search(&index).is_ok()
    }
}

pub fn mean<T: Real>(values: &[T]) -> Result<T> {
    if values.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let n = T::from_usize(values.len()).expect("population fits the scalar type");
    Ok(values.iter().copied().sum::<T>() / n)
}

/// Median; an even count averages the two middle order statistics.
pub fn median<T: Real>(values: &[T]) -> Result<T> {
    median_with(values, &mut Vec::new())
}

fn median_with<T: Real>(values: &[T], scratch: &mut Vec<T>) -> Result<T> {
    if values.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    scratch.clear();
    scratch.extend_from_slice(values);
    let n = scratch.len();
    let mid = n / 2;
    let cmp = |a: &T, b: &T| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal);
    let (lower, upper, _) = scratch.select_nth_unstable_by(mid, cmp);
    let upper = *upper;
    if n % 2 == 1 {
        Ok(upper)
    } else {
        let below = lower.iter().copied().fold(T::neg_infinity(), T::max);
        Ok((below + upper) / T::lit(2.0))
    }
}

/// Population standard deviation about an arbitrary center (divisor N).
pub fn sd_about<T: Real>(values: &[T], center: T) -> Result<T> {
    if values.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let n = T::from_usize(values.len()).expect("population fits the scalar type");
    let ss = values
        .iter()
        .map(|&p| (p - center) * (p - center))
        .sum::<T>();
    Ok((ss / n).sqrt())
}

/// Anchor, spread and `[anchor - sd, anchor + sd]` limits of a population.
pub fn clip_limits<T: Real>(values: &[T], anchor: ClipAnchor) -> Result<WindowStats<T>> {
    WindowStats::compute(values, anchor, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EPS: f64 = 1e-9;

    #[test]
    fn sd_examples() {
        assert!((sd_about(&[1.0, 2.0, 3.0], 2.0).unwrap() - (2.0f64 / 3.0).sqrt()).abs() < EPS);
        let sd: f64 = sd_about(&[1.0, 2.0, 10.0], 2.0).unwrap();
        assert!((sd - 4.65475).abs() < 1e-5);
        assert!((sd - (65.0f64 / 3.0).sqrt()).abs() < EPS);
        assert_eq!(sd_about(&[0.7], 0.7).unwrap(), 0.0);
        assert_eq!(sd_about::<f64>(&[], 0.0), Err(Error::EmptyPopulation));
    }

    #[test]
    fn mean_anchor_hand_case() {
        let values = [1.0f64, 2.0, 3.0];
        let st = clip_limits(&values, ClipAnchor::Mean).unwrap();
        assert_eq!(st.anchor_value, 2.0);
        assert!((st.sd - 0.81650).abs() < 1e-5);
        assert!((st.lower - 1.18350).abs() < 1e-5);
        assert!((st.upper - 2.81650).abs() < 1e-5);
        assert_eq!(st.clip(&values).members, vec![1]);
        assert_eq!(st.population, 3);
    }

    #[test]
    fn median_anchor_hand_case() {
        let values = [1.0f64, 2.0, 10.0];
        let st = clip_limits(&values, ClipAnchor::Median).unwrap();
        assert_eq!(st.anchor_value, 2.0);
        assert!((st.lower + 2.65475).abs() < 1e-5);
        assert!((st.upper - 6.65475).abs() < 1e-5);
        assert_eq!(st.clip(&values).members, vec![0, 1]);
    }

    #[test]
    fn constant_population_keeps_everything() {
        for anchor in [ClipAnchor::Mean, ClipAnchor::Median] {
            let values = [0.5; 9];
            let st = clip_limits(&values, anchor).unwrap();
            assert_eq!((st.lower, st.upper), (0.5, 0.5));
            assert_eq!(st.clip(&values).len(), 9);
        }
    }

    #[test]
    fn even_median_averages_middle_pair() {
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]).unwrap(), 2.5);
        assert_eq!(median(&[5.0, 5.0]).unwrap(), 5.0);
        assert_eq!(median::<f32>(&[]), Err(Error::EmptyPopulation));
        assert_eq!(
            clip_limits::<f64>(&[], ClipAnchor::Mean),
            Err(Error::EmptyPopulation)
        );
    }

    proptest! {
        #[test]
        fn limits_bracket_anchor(values in proptest::collection::vec(0.0f64..9.0, 1..60)) {
            for anchor in [ClipAnchor::Mean, ClipAnchor::Median] {
                let st = clip_limits(&values, anchor).unwrap();
                prop_assert!(st.sd >= 0.0);
                prop_assert!(st.lower <= st.anchor_value && st.anchor_value <= st.upper);
                let set = st.clip(&values);
                prop_assert!(set.members.iter().all(|&k| st.retains(values[k])));
                prop_assert!(set.members.iter().all(|&k| k < values.len()));
            }
        }

        #[test]
        fn odd_median_element_is_retained(values in proptest::collection::vec(0.0f64..9.0, 1..30)) {
            let mut values = values;
            if values.len() % 2 == 0 {
                values.pop();
            }
            prop_assume!(!values.is_empty());
            let st = clip_limits(&values, ClipAnchor::Median).unwrap();
            let set = st.clip(&values);
            prop_assert!(values.iter().enumerate().any(|(k, &v)| v == st.anchor_value && set.contains(k)));
        }

        #[test]
        fn median_matches_sort(values in proptest::collection::vec(0.0f64..1.0, 1..40)) {
            let mut sorted = values.clone();
            sorted.sort_by(f64::total_cmp);
            let n = sorted.len();
            let expected = if n % 2 == 1 { sorted[n / 2] } else { (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0 };
            prop_assert_eq!(median(&values).unwrap(), expected);
        }
    }
}
