use serde::{Deserialize, Serialize};

/// Population moments of a rating series. Skewness of a constant (or empty)
/// series is 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RatingStats {
    pub mean: f64,
    pub median: f64,
    pub variance: f64,
    pub skewness: f64,
}

impl RatingStats {
    pub fn from_ratings(ratings: &[f64]) -> Self {
        if ratings.is_empty() {
            return Self::default();
        }
        let n = ratings.len() as f64;
        let mean = ratings.iter().sum::<f64>() / n;
        let m2 = ratings.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
        let m3 = ratings.iter().map(|r| (r - mean).powi(3)).sum::<f64>() / n;
        let skewness = if m2 > 1e-12 { m3 / m2.powf(1.5) } else { 0.0 };

        let mut sorted = ratings.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len().is_multiple_of(2) {
            0.5 * (sorted[mid - 1] + sorted[mid])
        } else {
            sorted[mid]
        };
        Self {
            mean,
            median,
            variance: m2,
            skewness,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_moments() {
        let s = RatingStats::from_ratings(&[1.0, 3.0, 5.0]);
        assert_eq!(s.mean, 3.0);
        assert_eq!(s.median, 3.0);
        assert!((s.variance - 8.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.skewness, 0.0);

        let s = RatingStats::from_ratings(&[1.0, 1.0, 1.0, 5.0]);
        assert_eq!(s.median, 1.0);
        // m2 = 3, m3 = 6 -> skew = 6 / 3^1.5
        assert!((s.skewness - 6.0 / 3f64.powf(1.5)).abs() < 1e-12);

        assert_eq!(RatingStats::from_ratings(&[2.0, 4.0]).median, 3.0);
        assert_eq!(RatingStats::from_ratings(&[4.0, 4.0]).skewness, 0.0);
    }
}
