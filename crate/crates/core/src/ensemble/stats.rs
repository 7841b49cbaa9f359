/// Count, mean and centred second moment of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMoments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl SampleMoments {
    /// Two-pass moments, summed in slice order.
    pub fn from_slice(xs: &[f64]) -> Self {
        if xs.is_empty() {
            return Self {
                count: 0,
                mean: f64::NAN,
                m2: 0.0,
            };
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let m2 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
        Self {
            count: xs.len() as u64,
            mean,
            m2,
        }
    }

    /// Pools two disjoint samples (Chan et al. update).
    pub fn merge(&self, other: &Self) -> Self {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        Self {
            count: self.count + other.count,
            mean: (na * self.mean + nb * other.mean) / n,
            m2: self.m2 + other.m2 + delta * delta * na * nb / n,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// NaN for an empty sample.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero below two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn sem(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_sample() {
        let m = SampleMoments::from_slice(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert_eq!(m.mean(), 5.0);
        assert!((m.variance() - 32.0 / 7.0).abs() < 1e-14);
        assert!((m.sem() - (32.0f64 / 7.0 / 8.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn degenerate_samples() {
        let empty = SampleMoments::from_slice(&[]);
        assert!(empty.mean().is_nan());
        assert_eq!(empty.sem(), 0.0);
        let one = SampleMoments::from_slice(&[3.5]);
        assert_eq!((one.mean(), one.sem()), (3.5, 0.0));
        assert_eq!(empty.merge(&one), one);
        assert_eq!(one.merge(&empty), one);
    }

    #[test]
    fn merge_matches_whole() {
        let xs: Vec<f64> = (0..37).map(|i| ((i * 7919) % 101) as f64 * 0.37 - 5.0).collect();
        let whole = SampleMoments::from_slice(&xs);
        let pooled = SampleMoments::from_slice(&xs[..13]).merge(&SampleMoments::from_slice(&xs[13..]));
        assert_eq!(pooled.count(), whole.count());
        assert!((pooled.mean() - whole.mean()).abs() < 1e-13);
        assert!((pooled.variance() - whole.variance()).abs() < 1e-11);
    }
}
