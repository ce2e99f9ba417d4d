//! Order statistics, the type-6 empirical quantile and empirical outlier
//! fractions.

use crate::error::{Error, Result};
use crate::tail_chars::{FenceMultipliers, Fences};

/// A finite, non-empty sample with its order statistics cached.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    sorted: Vec<f64>,
}

/// Result of [`Sample::quantile`]. `clamped` is set when `p` lies outside
/// `[1/(n+1), n/(n+1)]` and the nearest extreme order statistic was returned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalQuantile {
    pub value: f64,
    pub clamped: bool,
}

/// How many observations fall in each Tukey band. Fence-equal points belong to
/// the inner band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutlierCounts {
    pub extreme_low: usize,
    pub mild_low: usize,
    pub inside: usize,
    pub mild_high: usize,
    pub extreme_high: usize,
}

impl OutlierCounts {
    pub fn total(&self) -> usize {
        self.extreme_low + self.mild_low + self.inside + self.mild_high + self.extreme_high
    }
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { values, sorted })
    }

    /// Parses newline-delimited numbers or a single-column CSV. A first line
    /// that is not a number is treated as a header; blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        let mut first = true;
        for (lineno, line) in text.lines().enumerate() {
            let field = line.trim().trim_matches('"').trim();
            if field.is_empty() {
                continue;
            }
            if field.contains(',') {
                return Err(Error::Parse {
                    token: line.to_string(),
                    message: format!("line {}: expected a single column", lineno + 1),
                });
            }
            match field.parse::<f64>() {
                Ok(v) => values.push(v),
                Err(_) if first => {}
                Err(_) => {
                    return Err(Error::Parse {
                        token: field.to_string(),
                        message: format!("line {}: not a number", lineno + 1),
                    })
                }
            }
            first = false;
        }
        Sample::new(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Observations in input order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Ascending order statistics `X_(1:n) <= ... <= X_(n:n)`.
    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// The `k`-th order statistic, 1-based.
    pub fn order_stat(&self, k: usize) -> f64 {
        self.sorted[k - 1]
    }

    /// Type-6 empirical quantile: linear interpolation between `X_(j:n)` and
    /// `X_(j+1:n)` at `h = (n+1)p`, `j = floor(h)`.
    ///
    /// `h` within a few ulps of an integer is snapped to it, so `p = k/(n+1)`
    /// returns `X_(k:n)` exactly.
    pub fn quantile(&self, p: f64) -> EmpiricalQuantile {
        let n = self.sorted.len();
        let h = (n as f64 + 1.0) * p;
        let nearest = h.round();
        let h = if (h - nearest).abs() <= 4.0 * f64::EPSILON * nearest.abs() {
            nearest
        } else {
            h
        };
        if h.is_nan() || h < 1.0 {
            return EmpiricalQuantile {
                value: self.sorted[0],
                clamped: true,
            };
        }
        if h > n as f64 {
            return EmpiricalQuantile {
                value: self.sorted[n - 1],
                clamped: true,
            };
        }
        let j = h.floor() as usize;
        let frac = h - j as f64;
        let lower = self.sorted[j - 1];
        let value = if frac == 0.0 {
            lower
        } else {
            lower + frac * (self.sorted[j] - lower)
        };
        EmpiricalQuantile {
            value,
            clamped: false,
        }
    }

    /// Fences from the type-6 quartiles with the default 1.5 / 3 multipliers.
    pub fn fences(&self) -> Result<Fences> {
        self.fences_with(FenceMultipliers::default())
    }

    pub fn fences_with(&self, multipliers: FenceMultipliers) -> Result<Fences> {
        if self.len() < 3 {
            return Err(Error::SampleTooSmall(self.len()));
        }
        Ok(Fences::from_quartiles(
            self.quantile(0.25).value,
            self.quantile(0.75).value,
            multipliers,
        ))
    }

    /// Counts per band, using strict inequalities against each fence.
    pub fn outlier_counts(&self, fences: &Fences) -> OutlierCounts {
        let below = |t: f64| self.sorted.partition_point(|&x| x < t);
        let above = |t: f64| self.sorted.len() - self.sorted.partition_point(|&x| x <= t);
        let extreme_low = below(fences.outer_low);
        let extreme_high = above(fences.outer_high);
        let mild_low = below(fences.inner_low) - extreme_low;
        let mild_high = above(fences.inner_high) - extreme_high;
        OutlierCounts {
            extreme_low,
            mild_low,
            inside: self.len() - extreme_low - mild_low - mild_high - extreme_high,
            mild_high,
            extreme_high,
        }
    }

    /// Fraction of observations strictly above the upper outer fence.
    pub fn p_e_right(&self) -> Result<f64> {
        let fences = self.fences()?;
        Ok(self.outlier_counts(&fences).extreme_high as f64 / self.len() as f64)
    }

    /// Fraction of observations strictly below the lower outer fence.
    pub fn p_e_left(&self) -> Result<f64> {
        let fences = self.fences()?;
        Ok(self.outlier_counts(&fences).extreme_low as f64 / self.len() as f64)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Sample> {
        Sample::new(self.values.iter().map(|&x| f(x)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(v: &[f64]) -> Sample {
        Sample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn quantile_examples() {
        let s = sample(&[30.0, 10.0, 20.0]);
        assert_eq!(s.quantile(0.25).value, 10.0);
        assert_eq!(s.quantile(0.5).value, 20.0);
        let s = sample(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.quantile(0.75).value, 3.75);
        assert!(!s.quantile(0.75).clamped);
    }

    #[test]
    fn out_of_range_probability_is_clamped() {
        let s = sample(&[1.0, 2.0, 3.0, 4.0]);
        let q = s.quantile(0.1);
        assert_eq!(
            q,
            EmpiricalQuantile {
                value: 1.0,
                clamped: true
            }
        );
        let q = s.quantile(0.95);
        assert_eq!(
            q,
            EmpiricalQuantile {
                value: 4.0,
                clamped: true
            }
        );
        let q = s.quantile(0.8);
        assert_eq!(
            q,
            EmpiricalQuantile {
                value: 4.0,
                clamped: false
            }
        );
    }

    #[test]
    fn fences_examples() {
        let f = sample(&[1.0, 2.0, 3.0, 4.0]).fences().unwrap();
        assert_eq!((f.q1, f.q3, f.outer_high), (1.25, 3.75, 11.25));

        let f = sample(&[7.5; 6]).fences().unwrap();
        assert_eq!(f.iqr, 0.0);
        for v in [
            f.outer_low,
            f.inner_low,
            f.q1,
            f.q3,
            f.inner_high,
            f.outer_high,
        ] {
            assert_eq!(v, 7.5);
        }

        let grid: Vec<f64> = (1..=100).map(f64::from).collect();
        let f = sample(&grid).fences().unwrap();
        assert_eq!((f.q1, f.q3), (25.25, 75.75));
    }

    #[test]
    fn fences_need_three_observations() {
        assert_eq!(
            sample(&[1.0, 2.0]).fences().unwrap_err(),
            Error::SampleTooSmall(2)
        );
        assert!(sample(&[1.0, 2.0]).p_e_right().is_err());
    }

    #[test]
    fn extreme_outlier_fractions() {
        assert_eq!(sample(&[1.0, 2.0, 3.0, 4.0]).p_e_right().unwrap(), 0.0);
        // n = 8: q1 = 2.25, q3 = 6.75, upper outer fence 20.25.
        let s = sample(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 100.0]);
        let f = s.fences().unwrap();
        assert_eq!((f.q1, f.q3, f.outer_high), (2.25, 6.75, 20.25));
        assert_eq!(s.p_e_right().unwrap(), 1.0 / 8.0);
        assert_eq!(s.p_e_left().unwrap(), 0.0);
        // Five points: the maximum always sits inside the upper outer fence.
        assert_eq!(
            sample(&[1.0, 2.0, 3.0, 4.0, 100.0]).p_e_right().unwrap(),
            0.0
        );
    }

    #[test]
    fn negation_swaps_left_and_right() {
        let s = sample(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 100.0, -80.0, 2.5]);
        let neg = s.map(|x| -x).unwrap();
        assert_eq!(neg.p_e_left().unwrap(), s.p_e_right().unwrap());
        assert_eq!(neg.p_e_right().unwrap(), s.p_e_left().unwrap());
    }

    #[test]
    fn fence_ties_are_not_outliers() {
        // q1 = 1.25, q3 = 3.75, outer_high = 11.25 when computed on the first
        // four points; adding the fence value itself moves the quartiles, so
        // check the counting rule directly.
        let s = sample(&[1.0, 2.0, 3.0, 4.0, 11.25]);
        let fences = sample(&[1.0, 2.0, 3.0, 4.0]).fences().unwrap();
        let c = s.outlier_counts(&fences);
        assert_eq!(c.extreme_high, 0);
        assert_eq!(c.mild_high, 1);
        assert_eq!(c.total(), 5);
    }

    #[test]
    fn ingestion_formats() {
        let s = Sample::parse("3.5\n1\n\n2e0\n").unwrap();
        assert_eq!(s.sorted(), &[1.0, 2.0, 3.5]);
        let s = Sample::parse("value\n\"4\"\n5\n").unwrap();
        assert_eq!(s.values(), &[4.0, 5.0]);
        assert!(Sample::parse("1\nabc\n").is_err());
        assert!(Sample::parse("1,2\n").is_err());
        assert_eq!(Sample::parse("header\n").unwrap_err(), Error::EmptySample);
        assert_eq!(Sample::parse("1\ninf\n").unwrap_err(), Error::NonFinite(1));
    }
}
