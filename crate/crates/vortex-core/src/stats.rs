//! Batch means, Poisson laws and total-variation distances.

use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use crate::error::{Error, Result};

/// Fewest batches accepted by [`batch_means`].
pub const MIN_BATCHES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

/// Mean with a batch-means standard error. Trailing samples that do not
/// fill a batch are dropped from the error but kept in the mean.
pub fn batch_means(series: &[f64], batches: usize) -> Result<Estimate> {
    if batches < MIN_BATCHES {
        return Err(Error::Statistics("batch means needs at least 16 batches"));
    }
    if series.len() < batches {
        return Err(Error::Statistics("fewer samples than batches"));
    }
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    let size = series.len() / batches;
    let means: Vec<f64> = (0..batches).map(|b| series[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64).collect();
    let bm = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - bm) * (m - bm)).sum::<f64>() / (batches - 1) as f64;
    Ok(Estimate { mean, stderr: libm::sqrt(var / batches as f64) })
}

/// Mean and standard error of independent samples.
pub fn mean_stderr(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return Estimate { mean: 0.0, stderr: 0.0 };
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return Estimate { mean, stderr: 0.0 };
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    Estimate { mean, stderr: libm::sqrt(var / n) }
}

/// `P(N = k)` for `N ~ Poisson(lambda)`, `lambda >= 0`.
pub fn poisson_pmf(k: u64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    libm::exp(k as f64 * libm::log(lambda) - lambda - libm::lgamma(k as f64 + 1.0))
}

/// Empirical law of non-negative counts.
pub fn histogram(samples: &[u32]) -> Vec<f64> {
    let top = samples.iter().copied().max().unwrap_or(0) as usize;
    let mut h = vec![0.0; top + 1];
    for &s in samples {
        h[s as usize] += 1.0;
    }
    let n = samples.len().max(1) as f64;
    h.iter_mut().for_each(|x| *x /= n);
    h
}

/// Total variation between the empirical law of `samples` and `Poisson(lambda)`,
/// with the Poisson tail beyond the largest sample added in closed form.
pub fn tv_to_poisson(samples: &[u32], lambda: f64) -> f64 {
    let h = histogram(samples);
    let mut tv = 0.0;
    let mut mass = 0.0;
    for (k, &p) in h.iter().enumerate() {
        let q = poisson_pmf(k as u64, lambda);
        mass += q;
        tv += (p - q).abs();
    }
    0.5 * (tv + (1.0 - mass).max(0.0))
}

/// Total variation and its bootstrap standard deviation over `resamples` draws.
pub fn bootstrap_tv<R: Rng>(samples: &[u32], lambda: f64, resamples: usize, rng: &mut R) -> (f64, f64) {
    let tv = tv_to_poisson(samples, lambda);
    if samples.is_empty() || resamples < 2 {
        return (tv, 0.0);
    }
    let mut buf = vec![0u32; samples.len()];
    let draws: Vec<f64> = (0..resamples)
        .map(|_| {
            for b in buf.iter_mut() {
                *b = samples[rng.random_range(0..samples.len())];
            }
            tv_to_poisson(&buf, lambda)
        })
        .collect();
    let m = draws.iter().sum::<f64>() / resamples as f64;
    let var = draws.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (resamples - 1) as f64;
    (tv, libm::sqrt(var))
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Adds another running sum, keeping both compensation terms.
    pub fn add_sum(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_has_zero_error() {
        let e = batch_means(&[2.5; 64], 16).unwrap();
        assert_eq!((e.mean, e.stderr), (2.5, 0.0));
        assert!(batch_means(&[1.0; 64], 8).is_err());
    }

    #[test]
    fn shifted_samples_against_poisson() {
        let tv = tv_to_poisson(&[1; 100], 0.1);
        assert!((tv - (1.0 - 0.1 * libm::exp(-0.1))).abs() < 1e-12);
        assert_eq!(tv_to_poisson(&[0; 10], 0.0), 0.0);
    }

    #[test]
    fn pmf_sums_to_one() {
        let s: f64 = (0..60).map(|k| poisson_pmf(k, 3.7)).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }
}
