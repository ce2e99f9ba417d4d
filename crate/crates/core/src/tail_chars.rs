//! Theoretical outlier-probability characteristics.
//!
//! For a law with quartiles `Q1`, `Q3` and `IQR = Q3 - Q1`:
//!
//! ```text
//! p_eL = P(X < Q1 - 3 IQR)                 p_eR = P(X > Q3 + 3 IQR)
//! p_mL = P(X < Q1 - 1.5 IQR) - p_eL        p_mR = P(X > Q3 + 1.5 IQR) - p_eR
//! p_e2 = p_eL + p_eR                       p_m2 = p_mL + p_mR
//! ```
//!
//! The mild bands are the regions between inner and outer fences, so the mild
//! and extreme probabilities never overlap. Every family in the catalog is
//! continuous, hence `P(X < t) = F(t)`.
//!
//! All six quantities are invariant under increasing affine maps of `X`, and a
//! negative scale swaps left and right.

use serde::Serialize;

use crate::distributions::{DistributionSpec, Params};
use crate::error::{Error, Result};

/// Tukey fence multipliers on the IQR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FenceMultipliers {
    pub inner: f64,
    pub outer: f64,
}

impl Default for FenceMultipliers {
    fn default() -> Self {
        Self {
            inner: 1.5,
            outer: 3.0,
        }
    }
}

impl FenceMultipliers {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner.is_finite() && inner > 0.0) {
            return Err(Error::InvalidFences(format!(
                "inner multiplier must be > 0, got {inner}"
            )));
        }
        if !(outer.is_finite() && outer >= inner) {
            return Err(Error::InvalidFences(format!(
                "outer multiplier must be finite and >= inner ({inner}), got {outer}"
            )));
        }
        Ok(Self { inner, outer })
    }

    pub fn is_default(&self) -> bool {
        *self == Self::default()
    }
}

/// Quartiles and the inner/outer fences built from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fences {
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    pub inner_low: f64,
    pub inner_high: f64,
    pub outer_low: f64,
    pub outer_high: f64,
}

impl Fences {
    pub fn from_quartiles(q1: f64, q3: f64, multipliers: FenceMultipliers) -> Self {
        let iqr = q3 - q1;
        Self {
            q1,
            q3,
            iqr,
            inner_low: q1 - multipliers.inner * iqr,
            inner_high: q3 + multipliers.inner * iqr,
            outer_low: q1 - multipliers.outer * iqr,
            outer_high: q3 + multipliers.outer * iqr,
        }
    }
}

/// The six tail-heaviness probabilities and the fences behind them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailCharacteristics {
    pub p_el: f64,
    pub p_er: f64,
    pub p_e2: f64,
    pub p_ml: f64,
    pub p_mr: f64,
    pub p_m2: f64,
    pub fences: Fences,
}

/// Theoretical quartile fences with the default multipliers.
pub fn fences(spec: &DistributionSpec) -> Fences {
    fences_with(spec, FenceMultipliers::default())
}

pub fn fences_with(spec: &DistributionSpec, multipliers: FenceMultipliers) -> Fences {
    Fences::from_quartiles(
        spec.quantile_unchecked(0.25),
        spec.quantile_unchecked(0.75),
        multipliers,
    )
}

/// Characteristics with the default fences, preferring closed forms.
pub fn characteristics(spec: &DistributionSpec) -> TailCharacteristics {
    characteristics_with(spec, FenceMultipliers::default())
}

/// Characteristics for arbitrary fence multipliers. Closed forms are only
/// known for the default outer multiplier; otherwise the CDF route is used.
pub fn characteristics_with(
    spec: &DistributionSpec,
    multipliers: FenceMultipliers,
) -> TailCharacteristics {
    let fences = fences_with(spec, multipliers);
    let closed = multipliers.outer == FenceMultipliers::default().outer;
    let p_el = closed
        .then(|| closed_form_p_e_left(spec))
        .flatten()
        .unwrap_or_else(|| spec.cdf(fences.outer_low));
    let p_er = closed
        .then(|| closed_form_p_e_right(spec))
        .flatten()
        .unwrap_or_else(|| spec.sf(fences.outer_high));
    assemble(spec, fences, p_el, p_er)
}

/// Characteristics evaluated only through the distribution's CDF and
/// survival function, bypassing every closed form.
pub fn generic_characteristics(spec: &DistributionSpec) -> TailCharacteristics {
    generic_characteristics_with(spec, FenceMultipliers::default())
}

pub fn generic_characteristics_with(
    spec: &DistributionSpec,
    multipliers: FenceMultipliers,
) -> TailCharacteristics {
    let fences = fences_with(spec, multipliers);
    let p_el = spec.cdf(fences.outer_low);
    let p_er = spec.sf(fences.outer_high);
    assemble(spec, fences, p_el, p_er)
}

fn assemble(spec: &DistributionSpec, fences: Fences, p_el: f64, p_er: f64) -> TailCharacteristics {
    let p_ml = (spec.cdf(fences.inner_low) - p_el).max(0.0);
    let p_mr = (spec.sf(fences.inner_high) - p_er).max(0.0);
    TailCharacteristics {
        p_el,
        p_er,
        p_e2: p_el + p_er,
        p_ml,
        p_mr,
        p_m2: p_ml + p_mr,
        fences,
    }
}

/// Shape value above which the Fréchet lower outer fence rises above the
/// location parameter, making `p_eL > 0` (and, symmetrically, above which the
/// negative Weibull upper outer fence falls below its endpoint):
/// `ln(ln 4 / ln(4/3)) / ln(4/3) ≈ 5.4662`.
pub fn frechet_left_threshold() -> f64 {
    let l4 = 4f64.ln();
    let l43 = (4.0f64 / 3.0).ln();
    (l4 / l43).ln() / l43
}

/// Closed-form `p_eR` (outer multiplier 3), or `None` for families evaluated
/// numerically (Gamma, Normal, Student-t, Hill-horror).
pub fn closed_form_p_e_right(spec: &DistributionSpec) -> Option<f64> {
    let l4 = 4f64.ln();
    let l43 = (4.0f64 / 3.0).ln();
    match spec.params() {
        Params::Uniform { .. } => Some(0.0),
        // mirror image of the Fréchet left tail: the upper outer fence only
        // drops below the endpoint once the shape passes the same threshold
        Params::NegWeibull { alpha, .. } => {
            if alpha <= frechet_left_threshold() {
                Some(0.0)
            } else {
                let bracket = 4.0 * l43.powf(1.0 / alpha) - 3.0 * l4.powf(1.0 / alpha);
                Some(-(-bracket.powf(alpha)).exp_m1())
            }
        }
        Params::Exponential { .. } => Some(1.0 / 108.0),
        Params::Pareto { alpha, .. } => {
            Some(3.0 / (4.0 * (4.0 * 3f64.powf(1.0 / alpha) - 3.0).powf(alpha)))
        }
        Params::Frechet { alpha, .. } => {
            let bracket = 4.0 * l43.powf(-1.0 / alpha) - 3.0 * l4.powf(-1.0 / alpha);
            Some(-(-bracket.powf(-alpha)).exp_m1())
        }
        Params::Gumbel { .. } => Some(-(-(l43.powi(4) / l4.powi(3))).exp_m1()),
        Params::Gamma { .. }
        | Params::Normal { .. }
        | Params::StudentT { .. }
        | Params::HillHorror { .. } => None,
    }
}

/// Closed-form `p_eL` (outer multiplier 3), or `None` for Gamma, Normal and
/// Student-t.
pub fn closed_form_p_e_left(spec: &DistributionSpec) -> Option<f64> {
    let l4 = 4f64.ln();
    let l43 = (4.0f64 / 3.0).ln();
    match spec.params() {
        Params::Uniform { .. }
        | Params::Exponential { .. }
        | Params::Pareto { .. }
        | Params::HillHorror { .. } => Some(0.0),
        Params::Frechet { alpha, .. } => {
            if alpha <= frechet_left_threshold() {
                Some(0.0)
            } else {
                let bracket = 4.0 * l4.powf(-1.0 / alpha) - 3.0 * l43.powf(-1.0 / alpha);
                Some((-bracket.powf(-alpha)).exp())
            }
        }
        Params::NegWeibull { alpha, .. } => {
            let bracket = 4.0 * l4.powf(1.0 / alpha) - 3.0 * l43.powf(1.0 / alpha);
            Some((-bracket.powf(alpha)).exp())
        }
        Params::Gumbel { .. } => Some((-(l4.powi(4) / l43.powi(3))).exp()),
        Params::Gamma { .. } | Params::Normal { .. } | Params::StudentT { .. } => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn exponential_fences() {
        let f = fences(&DistributionSpec::exponential(1.0).unwrap());
        assert!(close(f.q1, (4.0f64 / 3.0).ln(), 1e-15));
        assert!(close(f.q3, 4f64.ln(), 1e-15));
        assert!(close(f.iqr, 3f64.ln(), 1e-15));
    }

    #[test]
    fn normal_outer_fence() {
        let f = fences(&DistributionSpec::normal(0.0, 1.0).unwrap());
        assert!(close(f.outer_high, 4.7214, 5e-5));
        assert_eq!(f.outer_low, -f.outer_high);
    }

    #[test]
    fn pareto_outer_fence() {
        let f = fences(&DistributionSpec::pareto(1.0, 1.0).unwrap());
        assert!(close(f.outer_high, 12.0, 1e-12));
    }

    #[test]
    fn fence_ordering() {
        let f = fences(&DistributionSpec::gumbel(2.0, 3.0).unwrap());
        assert!(f.iqr >= 0.0);
        assert!(f.outer_low <= f.inner_low && f.inner_low <= f.q1 && f.q1 <= f.q3);
        assert!(f.q3 <= f.inner_high && f.inner_high <= f.outer_high);
    }

    #[test]
    fn exponential_characteristics() {
        let c = characteristics(&DistributionSpec::exponential(3.7).unwrap());
        assert_eq!(c.p_el, 0.0);
        assert!(close(c.p_er, 1.0 / 108.0, 1e-15));
        assert_eq!(c.p_e2, c.p_el + c.p_er);
    }

    #[test]
    fn normal_characteristics() {
        let c = characteristics(&DistributionSpec::normal(5.0, 4.0).unwrap());
        assert!(close(c.p_el, 0.000_001_171, 1e-9));
        assert!(close(c.p_er, 0.000_001_171, 1e-9));
    }

    #[test]
    fn gumbel_characteristics() {
        let c = characteristics(&DistributionSpec::gumbel(0.0, 1.0).unwrap());
        assert!(((c.p_el - 4.264e-68) / 4.264e-68).abs() < 1e-3);
        assert!(close(c.p_er, 0.0026, 1e-4));
    }

    #[test]
    fn closed_form_examples() {
        let pareto = DistributionSpec::pareto(1.0, 7.0).unwrap();
        assert!(close(
            closed_form_p_e_right(&pareto).unwrap(),
            1.0 / 12.0,
            1e-15
        ));
        // oracle: Pareto survival at the fence, straight from its CDF
        let outer = fences(&pareto).outer_high;
        assert!(close(7.0 / outer, 1.0 / 12.0, 1e-14));

        let nw = DistributionSpec::neg_weibull(2.0, 0.0, 1.0).unwrap();
        assert_eq!(closed_form_p_e_right(&nw), Some(0.0));
        // past the threshold the upper fence sits inside the support
        let nw8 = DistributionSpec::neg_weibull(8.0, 0.0, 1.0).unwrap();
        let p = closed_form_p_e_right(&nw8).unwrap();
        assert!(p > 0.0);
        assert!(close(p, generic_characteristics(&nw8).p_er, 1e-14));
        assert!(fences(&nw8).outer_high < 0.0);

        let fr = DistributionSpec::frechet(1.0, 0.0, 1.0).unwrap();
        let l4 = 4f64.ln();
        let l43 = (4.0f64 / 3.0).ln();
        let expected = 1.0 - (-1.0 / (4.0 / l43 - 3.0 / l4)).exp();
        assert!(close(closed_form_p_e_right(&fr).unwrap(), expected, 1e-15));
        assert!(close(generic_characteristics(&fr).p_er, expected, 1e-12));

        let fr5 = DistributionSpec::frechet(5.0, 0.0, 1.0).unwrap();
        assert_eq!(closed_form_p_e_left(&fr5), Some(0.0));
        assert!(close(frechet_left_threshold(), 5.4662, 1e-4));

        let nw1 = DistributionSpec::neg_weibull(1.0, 0.0, 1.0).unwrap();
        let expected = (-(4.0 * l4 - 3.0 * l43)).exp();
        assert!(close(closed_form_p_e_left(&nw1).unwrap(), expected, 1e-15));
        assert!(close(generic_characteristics(&nw1).p_el, expected, 1e-12));

        for spec in [
            DistributionSpec::gamma(2.0, 1.0).unwrap(),
            DistributionSpec::normal(0.0, 1.0).unwrap(),
            DistributionSpec::student_t(3).unwrap(),
        ] {
            assert_eq!(closed_form_p_e_right(&spec), None);
            assert_eq!(closed_form_p_e_left(&spec), None);
        }
        assert_eq!(
            closed_form_p_e_right(&DistributionSpec::hill_horror(1.0).unwrap()),
            None
        );
    }

    #[test]
    fn frechet_left_tail_switches_on_at_threshold() {
        let t = frechet_left_threshold();
        for alpha in [t - 1e-3, t + 1e-3, 8.0, 20.0] {
            let spec = DistributionSpec::frechet(alpha, 0.0, 1.0).unwrap();
            let closed = closed_form_p_e_left(&spec).unwrap();
            let generic = generic_characteristics(&spec).p_el;
            assert!(
                close(closed, generic, 1e-10),
                "alpha {alpha}: {closed} vs {generic}"
            );
            if alpha < t {
                assert_eq!(closed, 0.0);
            }
        }
        // just above the threshold the probability underflows; well above it
        // is strictly positive
        for alpha in [20.0, 50.0] {
            let spec = DistributionSpec::frechet(alpha, 0.0, 1.0).unwrap();
            assert!(closed_form_p_e_left(&spec).unwrap() > 0.0);
        }
    }

    #[test]
    fn uniform_has_no_outliers() {
        let c = characteristics(&DistributionSpec::uniform(0.0, 1.0).unwrap());
        for p in [c.p_el, c.p_er, c.p_e2, c.p_ml, c.p_mr, c.p_m2] {
            assert_eq!(p, 0.0);
        }
    }

    #[test]
    fn mild_band_is_disjoint_from_extreme() {
        let spec = DistributionSpec::exponential(1.0).unwrap();
        let c = characteristics(&spec);
        let f = c.fences;
        let expected = (-f.inner_high).exp() - 1.0 / 108.0;
        assert!(close(c.p_mr, expected, 1e-15));
        assert!(c.p_mr + c.p_er <= 1.0 && c.p_ml + c.p_el <= 1.0);
    }

    #[test]
    fn custom_multipliers_use_the_cdf_route() {
        let spec = DistributionSpec::exponential(1.0).unwrap();
        let m = FenceMultipliers::new(1.0, 2.0).unwrap();
        let c = characteristics_with(&spec, m);
        let q1 = (4.0f64 / 3.0).ln();
        let q3 = 4f64.ln();
        let outer = q3 + 2.0 * (q3 - q1);
        assert!(close(c.p_er, (-outer).exp(), 1e-15));
        assert!(FenceMultipliers::new(0.0, 3.0).is_err());
        assert!(FenceMultipliers::new(2.0, 1.0).is_err());
    }

    #[test]
    fn gamma_right_tail_heavier_than_exponential_only_below_shape_one() {
        let exp_level = 1.0 / 108.0;
        for alpha in [0.2, 0.5, 0.9] {
            let c = characteristics(&DistributionSpec::gamma(alpha, 1.0).unwrap());
            assert!(c.p_er > exp_level, "alpha {alpha}: {}", c.p_er);
            assert_eq!(c.p_el, 0.0);
        }
        for alpha in [1.5, 3.0, 10.0] {
            let c = characteristics(&DistributionSpec::gamma(alpha, 1.0).unwrap());
            assert!(c.p_er < exp_level, "alpha {alpha}: {}", c.p_er);
        }
        let c = characteristics(&DistributionSpec::gamma(1.0, 1.0).unwrap());
        assert!(close(c.p_er, exp_level, 1e-10));
    }

    #[test]
    fn right_tail_probability_decreases_with_alpha() {
        let grid = [0.2, 0.5, 1.0, 2.0, 5.0];
        type Ctor = fn(f64) -> DistributionSpec;
        let ctors: [Ctor; 3] = [
            |a| DistributionSpec::pareto(a, 1.0).unwrap(),
            |a| DistributionSpec::frechet(a, 0.0, 1.0).unwrap(),
            |a| DistributionSpec::hill_horror(a).unwrap(),
        ];
        for ctor in ctors {
            let values: Vec<f64> = grid
                .iter()
                .map(|&a| characteristics(&ctor(a)).p_er)
                .collect();
            assert!(values.windows(2).all(|w| w[0] > w[1]), "{values:?}");
        }
    }
}
