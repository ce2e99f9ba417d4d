//! Catalog of continuous distributions with CDF, survival function, quantile
//! function and inverse-transform sampling.
//!
//! A [`DistributionSpec`] can only be obtained through validated construction
//! (from [`Params`] or from the compact text form), so every method below may
//! assume a valid parameter record.
//!
//! # Text form
//!
//! ```text
//! spec   := family "(" [ param { "," param } ] ")"
//! param  := name "=" number
//! ```
//!
//! Whitespace is ignored. Family names and their parameters (defaults in
//! brackets, parameters without a default are required):
//!
//! | family                         | parameters                          |
//! |--------------------------------|-------------------------------------|
//! | `uniform`                      | `a` [0], `b` [1]                    |
//! | `exp`, `exponential`           | `lambda` [1]                        |
//! | `gamma`                        | `alpha`, `beta` [1] (rate)          |
//! | `normal`, `norm`               | `mu` [0], `sigma2` [1] (variance)   |
//! | `t`, `student_t`               | `n` (positive integer)              |
//! | `pareto`                       | `alpha`, `delta` [1]                |
//! | `frechet`                      | `alpha`, `mu` [0], `sigma` [1]      |
//! | `negweibull`, `weibull_neg`    | `alpha`, `mu` [0], `sigma` [1]      |
//! | `gumbel`                       | `mu` [0], `gamma` [1]               |
//! | `hillhorror`, `hill_horror`    | `alpha`                             |

use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::empirical::Sample;
use crate::error::{Error, Result};
use crate::special;

/// Distribution family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Uniform,
    Exponential,
    Gamma,
    Normal,
    StudentT,
    Pareto,
    Frechet,
    NegWeibull,
    Gumbel,
    HillHorror,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::Uniform,
        Family::Exponential,
        Family::Gamma,
        Family::Normal,
        Family::StudentT,
        Family::Pareto,
        Family::Frechet,
        Family::NegWeibull,
        Family::Gumbel,
        Family::HillHorror,
    ];

    /// Canonical keyword used by the text form.
    pub fn keyword(self) -> &'static str {
        match self {
            Family::Uniform => "uniform",
            Family::Exponential => "exp",
            Family::Gamma => "gamma",
            Family::Normal => "normal",
            Family::StudentT => "t",
            Family::Pareto => "pareto",
            Family::Frechet => "frechet",
            Family::NegWeibull => "negweibull",
            Family::Gumbel => "gumbel",
            Family::HillHorror => "hillhorror",
        }
    }

    fn from_keyword(word: &str) -> Option<Family> {
        let family = match word.to_ascii_lowercase().as_str() {
            "uniform" => Family::Uniform,
            "exp" | "exponential" => Family::Exponential,
            "gamma" => Family::Gamma,
            "normal" | "norm" => Family::Normal,
            "t" | "student_t" | "studentt" => Family::StudentT,
            "pareto" => Family::Pareto,
            "frechet" => Family::Frechet,
            "negweibull" | "weibull_neg" => Family::NegWeibull,
            "gumbel" => Family::Gumbel,
            "hillhorror" | "hill_horror" => Family::HillHorror,
            _ => return None,
        };
        Some(family)
    }

    /// Whether the CDF is evaluated by numerical inversion or special
    /// functions rather than in closed form.
    pub fn is_numeric(self) -> bool {
        matches!(self, Family::Gamma | Family::StudentT | Family::HillHorror)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Raw parameter record, one variant per family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Params {
    Uniform {
        a: f64,
        b: f64,
    },
    Exponential {
        lambda: f64,
    },
    /// `beta` is a rate: the mean is `alpha / beta`.
    Gamma {
        alpha: f64,
        beta: f64,
    },
    /// `sigma2` is the variance.
    Normal {
        mu: f64,
        sigma2: f64,
    },
    StudentT {
        n: u32,
    },
    Pareto {
        alpha: f64,
        delta: f64,
    },
    Frechet {
        alpha: f64,
        mu: f64,
        sigma: f64,
    },
    NegWeibull {
        alpha: f64,
        mu: f64,
        sigma: f64,
    },
    Gumbel {
        mu: f64,
        gamma: f64,
    },
    HillHorror {
        alpha: f64,
    },
}

impl Params {
    pub fn family(&self) -> Family {
        match self {
            Params::Uniform { .. } => Family::Uniform,
            Params::Exponential { .. } => Family::Exponential,
            Params::Gamma { .. } => Family::Gamma,
            Params::Normal { .. } => Family::Normal,
            Params::StudentT { .. } => Family::StudentT,
            Params::Pareto { .. } => Family::Pareto,
            Params::Frechet { .. } => Family::Frechet,
            Params::NegWeibull { .. } => Family::NegWeibull,
            Params::Gumbel { .. } => Family::Gumbel,
            Params::HillHorror { .. } => Family::HillHorror,
        }
    }

    /// `(name, value)` pairs in canonical order.
    pub fn named_values(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Params::Uniform { a, b } => vec![("a", a), ("b", b)],
            Params::Exponential { lambda } => vec![("lambda", lambda)],
            Params::Gamma { alpha, beta } => vec![("alpha", alpha), ("beta", beta)],
            Params::Normal { mu, sigma2 } => vec![("mu", mu), ("sigma2", sigma2)],
            Params::StudentT { n } => vec![("n", n as f64)],
            Params::Pareto { alpha, delta } => vec![("alpha", alpha), ("delta", delta)],
            Params::Frechet { alpha, mu, sigma } | Params::NegWeibull { alpha, mu, sigma } => {
                vec![("alpha", alpha), ("mu", mu), ("sigma", sigma)]
            }
            Params::Gumbel { mu, gamma } => vec![("mu", mu), ("gamma", gamma)],
            Params::HillHorror { alpha } => vec![("alpha", alpha)],
        }
    }

    fn validate(&self) -> Result<()> {
        let family = self.family().keyword();
        let bad = |message: String| Err(Error::InvalidParameter { family, message });
        let positive = |name: &str, v: f64| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    family,
                    message: format!("{name} must be finite and > 0, got {v}"),
                })
            }
        };
        let finite = |name: &str, v: f64| -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    family,
                    message: format!("{name} must be finite, got {v}"),
                })
            }
        };
        match *self {
            Params::Uniform { a, b } => {
                finite("a", a)?;
                finite("b", b)?;
                if a >= b {
                    return bad(format!("need a < b, got a = {a}, b = {b}"));
                }
            }
            Params::Exponential { lambda } => positive("lambda", lambda)?,
            Params::Gamma { alpha, beta } => {
                positive("alpha", alpha)?;
                positive("beta", beta)?;
            }
            Params::Normal { mu, sigma2 } => {
                finite("mu", mu)?;
                positive("sigma2", sigma2)?;
            }
            Params::StudentT { n } => {
                if n == 0 {
                    return bad("n must be >= 1".into());
                }
            }
            Params::Pareto { alpha, delta } => {
                positive("alpha", alpha)?;
                positive("delta", delta)?;
            }
            Params::Frechet { alpha, mu, sigma } | Params::NegWeibull { alpha, mu, sigma } => {
                positive("alpha", alpha)?;
                finite("mu", mu)?;
                positive("sigma", sigma)?;
            }
            Params::Gumbel { mu, gamma } => {
                finite("mu", mu)?;
                positive("gamma", gamma)?;
            }
            Params::HillHorror { alpha } => positive("alpha", alpha)?,
        }
        Ok(())
    }
}

/// A validated distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DistributionSpec {
    params: Params,
}

impl DistributionSpec {
    pub fn new(params: Params) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Self::new(Params::Uniform { a, b })
    }

    pub fn exponential(lambda: f64) -> Result<Self> {
        Self::new(Params::Exponential { lambda })
    }

    pub fn gamma(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Params::Gamma { alpha, beta })
    }

    pub fn normal(mu: f64, sigma2: f64) -> Result<Self> {
        Self::new(Params::Normal { mu, sigma2 })
    }

    pub fn student_t(n: u32) -> Result<Self> {
        Self::new(Params::StudentT { n })
    }

    pub fn pareto(alpha: f64, delta: f64) -> Result<Self> {
        Self::new(Params::Pareto { alpha, delta })
    }

    pub fn frechet(alpha: f64, mu: f64, sigma: f64) -> Result<Self> {
        Self::new(Params::Frechet { alpha, mu, sigma })
    }

    pub fn neg_weibull(alpha: f64, mu: f64, sigma: f64) -> Result<Self> {
        Self::new(Params::NegWeibull { alpha, mu, sigma })
    }

    pub fn gumbel(mu: f64, gamma: f64) -> Result<Self> {
        Self::new(Params::Gumbel { mu, gamma })
    }

    pub fn hill_horror(alpha: f64) -> Result<Self> {
        Self::new(Params::HillHorror { alpha })
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn family(&self) -> Family {
        self.params.family()
    }

    /// Parameters as `name=value;name=value`, the form used in CSV cells.
    pub fn params_string(&self) -> String {
        self.params
            .named_values()
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self.params {
            Params::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            Params::Exponential { lambda } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-lambda * x).exp_m1()
                }
            }
            Params::Gamma { alpha, beta } => special::gamma_p(alpha, beta * x),
            Params::Normal { mu, sigma2 } => special::norm_cdf((x - mu) / sigma2.sqrt()),
            Params::StudentT { n } => student_t_cdf(n, x),
            Params::Pareto { alpha, delta } => {
                if x < delta {
                    0.0
                } else {
                    -(alpha * (delta / x).ln()).exp_m1()
                }
            }
            Params::Frechet { alpha, mu, sigma } => {
                if x <= mu {
                    0.0
                } else {
                    (-((x - mu) / sigma).powf(-alpha)).exp()
                }
            }
            Params::NegWeibull { alpha, mu, sigma } => {
                if x >= mu {
                    1.0
                } else {
                    (-(-(x - mu) / sigma).powf(alpha)).exp()
                }
            }
            Params::Gumbel { mu, gamma } => (-(-(x - mu) / gamma).exp()).exp(),
            Params::HillHorror { alpha } => -hill_horror_log_survival(alpha, x).exp_m1(),
        }
    }

    /// `P(X > x)`, evaluated without the cancellation of `1 - cdf(x)`.
    pub fn sf(&self, x: f64) -> f64 {
        match self.params {
            Params::Uniform { a, b } => ((b - x) / (b - a)).clamp(0.0, 1.0),
            Params::Exponential { lambda } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-lambda * x).exp()
                }
            }
            Params::Gamma { alpha, beta } => special::gamma_q(alpha, beta * x),
            Params::Normal { mu, sigma2 } => special::norm_cdf(-(x - mu) / sigma2.sqrt()),
            Params::StudentT { n } => student_t_cdf(n, -x),
            Params::Pareto { alpha, delta } => {
                if x < delta {
                    1.0
                } else {
                    (delta / x).powf(alpha)
                }
            }
            Params::Frechet { alpha, mu, sigma } => {
                if x <= mu {
                    1.0
                } else {
                    -(-((x - mu) / sigma).powf(-alpha)).exp_m1()
                }
            }
            Params::NegWeibull { alpha, mu, sigma } => {
                if x >= mu {
                    0.0
                } else {
                    -(-(-(x - mu) / sigma).powf(alpha)).exp_m1()
                }
            }
            Params::Gumbel { mu, gamma } => -(-(-(x - mu) / gamma).exp()).exp_m1(),
            Params::HillHorror { alpha } => hill_horror_log_survival(alpha, x).exp(),
        }
    }

    /// `inf { x : F(x) >= p }` for `p` in `(0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        Ok(self.quantile_unchecked(p))
    }

    pub(crate) fn quantile_unchecked(&self, p: f64) -> f64 {
        match self.params {
            Params::Uniform { a, b } => a + p * (b - a),
            Params::Exponential { lambda } => -(-p).ln_1p() / lambda,
            Params::Gamma { alpha, beta } => gamma_quantile(alpha, p) / beta,
            Params::Normal { mu, sigma2 } => mu + sigma2.sqrt() * special::norm_quantile(p),
            Params::StudentT { n } => student_t_quantile(n, p),
            Params::Pareto { alpha, delta } => delta * (-(-p).ln_1p() / alpha).exp(),
            Params::Frechet { alpha, mu, sigma } => mu + sigma * (-p.ln()).powf(-1.0 / alpha),
            Params::NegWeibull { alpha, mu, sigma } => mu - sigma * (-p.ln()).powf(1.0 / alpha),
            Params::Gumbel { mu, gamma } => mu - gamma * (-p.ln()).ln(),
            Params::HillHorror { alpha } => {
                let neg_log_survival = -(-p).ln_1p();
                (neg_log_survival / alpha).exp() * neg_log_survival
            }
        }
    }

    /// Draws `count` i.i.d. observations by inverse transform of open-interval
    /// uniforms from the stream identified by `rng`.
    pub fn sample(&self, rng: RngState, count: usize) -> Result<Sample> {
        if count == 0 {
            return Err(Error::EmptySample);
        }
        Sample::new(self.draw(rng, count))
    }

    pub(crate) fn draw(&self, rng: RngState, count: usize) -> Vec<f64> {
        let mut gen = rng.generator();
        (0..count)
            .map(|_| {
                let u: f64 = gen.sample(Open01);
                self.quantile_unchecked(u)
            })
            .collect()
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = self
            .params
            .named_values()
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(",");
        write!(f, "{}({params})", self.family().keyword())
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let parse_err = |token: &str, message: &str| Error::Parse {
            token: token.to_string(),
            message: message.to_string(),
        };
        let open = compact
            .find('(')
            .ok_or_else(|| parse_err(&compact, "expected `family(name=value,...)`"))?;
        if !compact.ends_with(')') {
            return Err(parse_err(&compact, "missing closing `)`"));
        }
        let name = &compact[..open];
        let family = Family::from_keyword(name)
            .ok_or_else(|| parse_err(name, "unknown distribution family"))?;
        let body = &compact[open + 1..compact.len() - 1];

        let mut values: Vec<(&str, f64)> = Vec::new();
        for item in body.split(',').filter(|s| !s.is_empty()) {
            let (key, raw) = item
                .split_once('=')
                .ok_or_else(|| parse_err(item, "expected `name=value`"))?;
            let value: f64 = raw.parse().map_err(|_| parse_err(raw, "not a number"))?;
            if values.iter().any(|(k, _)| *k == key) {
                return Err(parse_err(key, "parameter given twice"));
            }
            values.push((key, value));
        }

        let allowed: &[&str] = match family {
            Family::Uniform => &["a", "b"],
            Family::Exponential => &["lambda"],
            Family::Gamma => &["alpha", "beta"],
            Family::Normal => &["mu", "sigma2"],
            Family::StudentT => &["n"],
            Family::Pareto => &["alpha", "delta"],
            Family::Frechet | Family::NegWeibull => &["alpha", "mu", "sigma"],
            Family::Gumbel => &["mu", "gamma"],
            Family::HillHorror => &["alpha"],
        };
        if let Some((key, _)) = values.iter().find(|(k, _)| !allowed.contains(k)) {
            return Err(parse_err(key, &format!("unknown parameter for {family}")));
        }
        let get = |key: &str, default: Option<f64>| -> Result<f64> {
            values
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .or(default)
                .ok_or_else(|| parse_err(key, &format!("missing required parameter for {family}")))
        };

        let params = match family {
            Family::Uniform => Params::Uniform {
                a: get("a", Some(0.0))?,
                b: get("b", Some(1.0))?,
            },
            Family::Exponential => Params::Exponential {
                lambda: get("lambda", Some(1.0))?,
            },
            Family::Gamma => Params::Gamma {
                alpha: get("alpha", None)?,
                beta: get("beta", Some(1.0))?,
            },
            Family::Normal => Params::Normal {
                mu: get("mu", Some(0.0))?,
                sigma2: get("sigma2", Some(1.0))?,
            },
            Family::StudentT => {
                let n = get("n", None)?;
                if n.fract() != 0.0 || !(1.0..=f64::from(u32::MAX)).contains(&n) {
                    return Err(parse_err(
                        "n",
                        "degrees of freedom must be a positive integer",
                    ));
                }
                Params::StudentT { n: n as u32 }
            }
            Family::Pareto => Params::Pareto {
                alpha: get("alpha", None)?,
                delta: get("delta", Some(1.0))?,
            },
            Family::Frechet => Params::Frechet {
                alpha: get("alpha", None)?,
                mu: get("mu", Some(0.0))?,
                sigma: get("sigma", Some(1.0))?,
            },
            Family::NegWeibull => Params::NegWeibull {
                alpha: get("alpha", None)?,
                mu: get("mu", Some(0.0))?,
                sigma: get("sigma", Some(1.0))?,
            },
            Family::Gumbel => Params::Gumbel {
                mu: get("mu", Some(0.0))?,
                gamma: get("gamma", Some(1.0))?,
            },
            Family::HillHorror => Params::HillHorror {
                alpha: get("alpha", None)?,
            },
        };
        DistributionSpec::new(params)
    }
}

/// Identifies one independent random stream: `(seed, stream)` fully determines
/// the sequence of draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RngState {
    pub seed: u64,
    pub stream: u64,
}

impl RngState {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// ChaCha8 keyed by `seed`, positioned on `stream`.
    pub fn generator(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

fn student_t_cdf(n: u32, t: f64) -> f64 {
    let n = f64::from(n);
    let tail = 0.5 * special::beta_inc(0.5 * n, 0.5, n / (n + t * t));
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

fn student_t_pdf(n: u32, t: f64) -> f64 {
    let n = f64::from(n);
    (special::ln_gamma(0.5 * (n + 1.0))
        - special::ln_gamma(0.5 * n)
        - 0.5 * (n * std::f64::consts::PI).ln()
        - 0.5 * (n + 1.0) * (t * t / n).ln_1p())
    .exp()
}

fn student_t_quantile(n: u32, p: f64) -> f64 {
    if p < 0.5 {
        return -student_t_quantile(n, 1.0 - p);
    }
    if p == 0.5 {
        return 0.0;
    }
    let mut hi = 1.0;
    while student_t_cdf(n, hi) < p {
        hi *= 2.0;
    }
    special::invert_cdf(|t| student_t_cdf(n, t), |t| student_t_pdf(n, t), p, 0.0, hi)
}

/// Quantile of Gamma(shape, rate = 1).
fn gamma_quantile(shape: f64, p: f64) -> f64 {
    let mut hi = shape.max(1.0);
    while special::gamma_p(shape, hi) < p {
        hi *= 2.0;
    }
    let ln_norm = special::ln_gamma(shape);
    special::invert_cdf(
        |x| special::gamma_p(shape, x),
        |x| {
            if x <= 0.0 {
                0.0
            } else {
                ((shape - 1.0) * x.ln() - x - ln_norm).exp()
            }
        },
        p,
        0.0,
        hi,
    )
}

/// `ln P(X > x)` for the Hill-horror law.
///
/// With `s = 1 - p` the quantile is `s^(-1/alpha) * (-ln s)`, strictly
/// decreasing in `u = ln s`; the equation `quantile = x` is solved for `u` by
/// bisection down to adjacent floats.
fn hill_horror_log_survival(alpha: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return f64::NEG_INFINITY;
    }
    let g = |u: f64| (-u / alpha).exp() * (-u);
    let mut lo = -1.0;
    while g(lo) < x {
        lo *= 2.0;
    }
    let mut hi = 0.0_f64;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) >= x {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * lo.abs() {
            break;
        }
    }
    0.5 * (lo + hi)
}
