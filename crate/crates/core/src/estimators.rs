//! Tail-index estimators.
//!
//! Six distribution-sensitive estimators match either the empirical
//! extreme-outlier fraction or the empirical quartile ratio to the value a
//! Pareto, Fréchet or Hill-horror law would produce. Writing `u` for the
//! empirical upper outer fence `Q3 + 3 IQR` and `p` for the fraction of
//! observations above it:
//!
//! ```text
//! par_n = -ln p / ln u                      par_q = ln 3 / (ln Q3 - ln Q1)
//! fr_n  = -ln(-ln(1 - p)) / ln u            fr_q  = (ln ln 4 - ln ln(4/3)) / (ln Q3 - ln Q1)
//! hh_n  = ln p / ln(-ln p / u)              hh_q  = ln 3 / (ln Q3 - ln Q1 + ln ln(4/3) - ln ln 4)
//! ```
//!
//! The four classical comparators use the top `k + 1` order statistics. Their
//! formulas are the standard literature forms:
//!
//! * Hill: `gamma = mean_i ln(X_(n-i+1) / X_(n-k))`, `alpha = 1 / gamma`.
//! * t-Hill: `T = mean_i X_(n-k) / X_(n-i+1)`, `alpha = T / (1 - T)`, from
//!   `E[t / X | X > t] = alpha / (alpha + 1)` for Pareto tails.
//! * Pickands: `gamma = ln[(X_(n-k+1) - X_(n-2k+1)) / (X_(n-2k+1) - X_(n-4k+1))] / ln 2`.
//! * Moment (Dekkers, Einmahl, de Haan): with `M_j = mean_i [ln X_(n-i+1) - ln X_(n-k)]^j`,
//!   `gamma = M_1 + 1 - 1 / (2 (1 - M_1^2 / M_2))`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::empirical::Sample;
use crate::error::{Error, Result};

/// Parametric family a distribution-sensitive estimator is tuned for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TailFamily {
    Pareto,
    Frechet,
    HillHorror,
}

/// The ten estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ParN,
    ParQ,
    FrN,
    FrQ,
    HhN,
    HhQ,
    Hill,
    THill,
    Pickands,
    Moment,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::ParN,
        Method::ParQ,
        Method::FrN,
        Method::FrQ,
        Method::HhN,
        Method::HhQ,
        Method::Hill,
        Method::THill,
        Method::Pickands,
        Method::Moment,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::ParN => "par_n",
            Method::ParQ => "par_q",
            Method::FrN => "fr_n",
            Method::FrQ => "fr_q",
            Method::HhN => "hh_n",
            Method::HhQ => "hh_q",
            Method::Hill => "hill",
            Method::THill => "thill",
            Method::Pickands => "pickands",
            Method::Moment => "moment",
        }
    }

    /// Classical estimators take an order-statistic count `k`.
    pub fn is_classical(self) -> bool {
        matches!(
            self,
            Method::Hill | Method::THill | Method::Pickands | Method::Moment
        )
    }

    /// Runs the estimator. `k` is required for classical methods and ignored
    /// otherwise.
    pub fn estimate(self, sample: &Sample, k: Option<usize>) -> Result<EstimateRecord> {
        let need_k = || {
            k.ok_or(Error::InvalidK {
                k: 0,
                n: sample.len(),
                message: "classical estimators need k",
            })
        };
        match self {
            Method::ParN => estimate_fence_prob(sample, TailFamily::Pareto),
            Method::FrN => estimate_fence_prob(sample, TailFamily::Frechet),
            Method::HhN => estimate_fence_prob(sample, TailFamily::HillHorror),
            Method::ParQ => estimate_quartile_ratio(sample, TailFamily::Pareto),
            Method::FrQ => estimate_quartile_ratio(sample, TailFamily::Frechet),
            Method::HhQ => estimate_quartile_ratio(sample, TailFamily::HillHorror),
            Method::Hill => hill(sample, need_k()?),
            Method::THill => t_hill(sample, need_k()?),
            Method::Pickands => pickands(sample, need_k()?),
            Method::Moment => moment_dedh(sample, need_k()?),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| Error::Parse {
                token: s.to_string(),
                message: "unknown estimator".into(),
            })
    }
}

/// Why an estimate is not usable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Invalidity {
    NoExtremeOutliers,
    AllExtremeOutliers,
    NonPositiveFence,
    FenceEqualsOne,
    FenceEqualsNegLogP,
    NonPositiveQuartiles,
    EqualQuartiles,
    ZeroDenominator,
    FamilyMismatch,
    NonPositiveOrderStatistics,
    DegenerateTail,
    TiedOrderStatistics,
    NonHeavyTail,
}

impl fmt::Display for Invalidity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Invalidity::NoExtremeOutliers => "no extreme outliers observed",
            Invalidity::AllExtremeOutliers => "every observation is an extreme outlier",
            Invalidity::NonPositiveFence => "upper outer fence must be positive",
            Invalidity::FenceEqualsOne => "upper outer fence equals 1",
            Invalidity::FenceEqualsNegLogP => "upper outer fence equals -log p_eR",
            Invalidity::NonPositiveQuartiles => "needs positive quartiles",
            Invalidity::EqualQuartiles => "equal quartiles",
            Invalidity::ZeroDenominator => "zero denominator",
            Invalidity::FamilyMismatch => "family mismatch",
            Invalidity::NonPositiveOrderStatistics => "non-positive order statistics",
            Invalidity::DegenerateTail => "degenerate tail",
            Invalidity::TiedOrderStatistics => "tied order statistics",
            Invalidity::NonHeavyTail => "non-heavy tail estimate",
        })
    }
}

/// One estimate with its validity.
///
/// `alpha_hat` may be present on an invalid record: a finite but non-positive
/// estimate (family mismatch, non-heavy tail) is reported as diagnostic
/// evidence rather than dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateRecord {
    pub method: Method,
    pub k: Option<usize>,
    pub alpha_hat: Option<f64>,
    pub valid: bool,
    pub reason: Option<Invalidity>,
}

impl EstimateRecord {
    fn ok(method: Method, k: Option<usize>, alpha: f64) -> Self {
        Self {
            method,
            k,
            alpha_hat: Some(alpha),
            valid: true,
            reason: None,
        }
    }

    fn invalid(method: Method, k: Option<usize>, reason: Invalidity) -> Self {
        Self {
            method,
            k,
            alpha_hat: None,
            valid: false,
            reason: Some(reason),
        }
    }

    /// Positive finite estimates are valid; anything else is flagged, keeping
    /// finite values for diagnostics.
    fn checked(method: Method, k: Option<usize>, alpha: f64, otherwise: Invalidity) -> Self {
        if alpha.is_finite() && alpha > 0.0 {
            Self::ok(method, k, alpha)
        } else {
            Self {
                method,
                k,
                alpha_hat: alpha.is_finite().then_some(alpha),
                valid: false,
                reason: Some(otherwise),
            }
        }
    }

    /// The estimate when valid.
    pub fn value(&self) -> Option<f64> {
        if self.valid {
            self.alpha_hat
        } else {
            None
        }
    }
}

/// Tail index from an extreme-outlier fraction `p_er` and the upper outer
/// fence, assuming the given family.
pub fn alpha_from_fence(family: TailFamily, p_er: f64, outer_high: f64) -> EstimateRecord {
    let method = match family {
        TailFamily::Pareto => Method::ParN,
        TailFamily::Frechet => Method::FrN,
        TailFamily::HillHorror => Method::HhN,
    };
    if p_er <= 0.0 {
        return EstimateRecord::invalid(method, None, Invalidity::NoExtremeOutliers);
    }
    if p_er >= 1.0 {
        return EstimateRecord::invalid(method, None, Invalidity::AllExtremeOutliers);
    }
    if outer_high <= 0.0 {
        return EstimateRecord::invalid(method, None, Invalidity::NonPositiveFence);
    }
    let alpha = match family {
        TailFamily::Pareto | TailFamily::Frechet => {
            if outer_high == 1.0 {
                return EstimateRecord::invalid(method, None, Invalidity::FenceEqualsOne);
            }
            let numerator = match family {
                TailFamily::Pareto => -p_er.ln(),
                _ => -(-(-p_er).ln_1p()).ln(),
            };
            numerator / outer_high.ln()
        }
        TailFamily::HillHorror => {
            let neg_log_p = -p_er.ln();
            if outer_high == neg_log_p {
                return EstimateRecord::invalid(method, None, Invalidity::FenceEqualsNegLogP);
            }
            p_er.ln() / (neg_log_p / outer_high).ln()
        }
    };
    EstimateRecord::checked(method, None, alpha, Invalidity::FamilyMismatch)
}

/// `par_n`, `fr_n` or `hh_n` on a sample.
pub fn estimate_fence_prob(sample: &Sample, family: TailFamily) -> Result<EstimateRecord> {
    let fences = sample.fences()?;
    let p_er = sample.outlier_counts(&fences).extreme_high as f64 / sample.len() as f64;
    Ok(alpha_from_fence(family, p_er, fences.outer_high))
}

/// Tail index from the quartile pair, assuming the given family.
pub fn alpha_from_quartiles(family: TailFamily, q1: f64, q3: f64) -> EstimateRecord {
    let method = match family {
        TailFamily::Pareto => Method::ParQ,
        TailFamily::Frechet => Method::FrQ,
        TailFamily::HillHorror => Method::HhQ,
    };
    if q1 <= 0.0 {
        return EstimateRecord::invalid(method, None, Invalidity::NonPositiveQuartiles);
    }
    if q1 == q3 {
        return EstimateRecord::invalid(method, None, Invalidity::EqualQuartiles);
    }
    let log_ratio = q3.ln() - q1.ln();
    let l4 = 4f64.ln();
    let l43 = (4.0f64 / 3.0).ln();
    let alpha = match family {
        TailFamily::Pareto => 3f64.ln() / log_ratio,
        TailFamily::Frechet => (l4.ln() - l43.ln()) / log_ratio,
        TailFamily::HillHorror => {
            let denominator = log_ratio + l43.ln() - l4.ln();
            if denominator == 0.0 {
                return EstimateRecord::invalid(method, None, Invalidity::ZeroDenominator);
            }
            3f64.ln() / denominator
        }
    };
    EstimateRecord::checked(method, None, alpha, Invalidity::FamilyMismatch)
}

/// `par_q`, `fr_q` or `hh_q` on a sample.
pub fn estimate_quartile_ratio(sample: &Sample, family: TailFamily) -> Result<EstimateRecord> {
    let fences = sample.fences()?;
    Ok(alpha_from_quartiles(family, fences.q1, fences.q3))
}

fn check_k(sample: &Sample, k: usize) -> Result<()> {
    let n = sample.len();
    if k == 0 || k >= n {
        return Err(Error::InvalidK {
            k,
            n,
            message: "need 1 <= k <= n - 1",
        });
    }
    Ok(())
}

/// Top `k` order statistics (descending) and the threshold `X_(n-k:n)`.
fn upper_tail(sample: &Sample, k: usize) -> (&[f64], f64) {
    let sorted = sample.sorted();
    let n = sorted.len();
    (&sorted[n - k..], sorted[n - k - 1])
}

/// Log-excess moments `M_1`, `M_2` over the top `k`, or `None` when the
/// threshold is not positive.
fn log_excess_moments(sample: &Sample, k: usize) -> Option<(f64, f64)> {
    let (top, threshold) = upper_tail(sample, k);
    if threshold <= 0.0 {
        return None;
    }
    let log_t = threshold.ln();
    let (m1, m2) = top.iter().fold((0.0, 0.0), |(s1, s2), &x| {
        let d = x.ln() - log_t;
        (s1 + d, s2 + d * d)
    });
    Some((m1 / k as f64, m2 / k as f64))
}

pub fn hill(sample: &Sample, k: usize) -> Result<EstimateRecord> {
    check_k(sample, k)?;
    let m = Method::Hill;
    let Some((gamma, _)) = log_excess_moments(sample, k) else {
        return Ok(EstimateRecord::invalid(
            m,
            Some(k),
            Invalidity::NonPositiveOrderStatistics,
        ));
    };
    if gamma <= 0.0 {
        return Ok(EstimateRecord::invalid(
            m,
            Some(k),
            Invalidity::DegenerateTail,
        ));
    }
    Ok(EstimateRecord::checked(
        m,
        Some(k),
        1.0 / gamma,
        Invalidity::DegenerateTail,
    ))
}

pub fn t_hill(sample: &Sample, k: usize) -> Result<EstimateRecord> {
    check_k(sample, k)?;
    let m = Method::THill;
    let (top, threshold) = upper_tail(sample, k);
    if threshold <= 0.0 {
        return Ok(EstimateRecord::invalid(
            m,
            Some(k),
            Invalidity::NonPositiveOrderStatistics,
        ));
    }
    let t = top.iter().map(|&x| threshold / x).sum::<f64>() / k as f64;
    if t >= 1.0 {
        return Ok(EstimateRecord::invalid(
            m,
            Some(k),
            Invalidity::DegenerateTail,
        ));
    }
    Ok(EstimateRecord::checked(
        m,
        Some(k),
        t_hill_alpha(t),
        Invalidity::DegenerateTail,
    ))
}

/// Maps the mean ratio `T` to a tail index.
fn t_hill_alpha(t: f64) -> f64 {
    t / (1.0 - t)
}

pub fn pickands(sample: &Sample, k: usize) -> Result<EstimateRecord> {
    let n = sample.len();
    if k == 0 || 4 * k > n {
        return Err(Error::InvalidK {
            k,
            n,
            message: "pickands needs 1 <= k and 4k <= n",
        });
    }
    let m = Method::Pickands;
    let x1 = sample.order_stat(n - k + 1);
    let x2 = sample.order_stat(n - 2 * k + 1);
    let x4 = sample.order_stat(n - 4 * k + 1);
    let (upper, lower) = (x1 - x2, x2 - x4);
    if upper == 0.0 || lower == 0.0 {
        return Ok(EstimateRecord::invalid(
            m,
            Some(k),
            Invalidity::TiedOrderStatistics,
        ));
    }
    let gamma = (upper / lower).ln() / std::f64::consts::LN_2;
    Ok(EstimateRecord::checked(
        m,
        Some(k),
        1.0 / gamma,
        Invalidity::NonHeavyTail,
    ))
}

/// Moment estimator of `gamma` from `M_1`, `M_2`.
pub fn moment_gamma(m1: f64, m2: f64) -> f64 {
    m1 + 1.0 - 0.5 / (1.0 - m1 * m1 / m2)
}

pub fn moment_dedh(sample: &Sample, k: usize) -> Result<EstimateRecord> {
    check_k(sample, k)?;
    let m = Method::Moment;
    let Some((m1, m2)) = log_excess_moments(sample, k) else {
        return Ok(EstimateRecord::invalid(
            m,
            Some(k),
            Invalidity::NonPositiveOrderStatistics,
        ));
    };
    if m2 <= 0.0 || m1 * m1 == m2 {
        return Ok(EstimateRecord::invalid(
            m,
            Some(k),
            Invalidity::DegenerateTail,
        ));
    }
    let gamma = moment_gamma(m1, m2);
    Ok(EstimateRecord::checked(
        m,
        Some(k),
        1.0 / gamma,
        Invalidity::NonHeavyTail,
    ))
}
