//! Outlier-probability tail characteristics and distribution-sensitive
//! tail-index estimators.
//!
//! * [`distributions`]: the distribution catalog (CDF, quantile, sampling).
//! * [`tail_chars`]: Tukey-fence outlier probabilities of a law.
//! * [`empirical`]: samples, the type-6 empirical quantile, empirical fences.
//! * [`estimators`]: six quartile/fence based tail-index estimators and the
//!   Hill, t-Hill, Pickands and moment estimators.
//! * [`montecarlo`]: seeded replication studies comparing the estimators.

pub mod distributions;
pub mod empirical;
pub mod error;
pub mod estimators;
pub mod montecarlo;
pub mod report;
pub mod special;
pub mod tail_chars;

pub use distributions::{DistributionSpec, Family, Params, RngState};
pub use empirical::Sample;
pub use error::{Error, Result};
pub use estimators::{EstimateRecord, Method, TailFamily};
pub use montecarlo::{run_study, summarize_ci, Axis, StudyConfig, StudyResult};
pub use tail_chars::{characteristics, FenceMultipliers, Fences, TailCharacteristics};
