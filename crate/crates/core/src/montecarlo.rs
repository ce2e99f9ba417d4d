//! Seeded Monte Carlo comparison of the estimators.
//!
//! For every sample size `n` in the grid, `m` independent samples are drawn and
//! each distribution-sensitive estimator is applied to all of them. The
//! classical estimators are evaluated at the largest `n` of the grid, on the
//! same replicate samples, for every `k` in the k-grid.
//!
//! Replicate `r` at grid index `g` draws from stream `g * m + r` of the study
//! seed, so results do not depend on scheduling. Replicates run in parallel and
//! are gathered back in replicate order before aggregation.

use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{DistributionSpec, RngState};
use crate::empirical::Sample;
use crate::error::{Error, Result};
use crate::estimators::Method;
use crate::report::{format_g12, format_opt};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyConfig {
    pub spec: DistributionSpec,
    /// Strictly ascending sample sizes, each at least 5.
    pub n_grid: Vec<usize>,
    /// Replicates per grid point.
    pub m: usize,
    /// Order-statistic counts for the classical estimators at the largest `n`.
    pub k_grid: Vec<usize>,
    pub seed: u64,
    pub methods: Vec<Method>,
}

impl StudyConfig {
    /// Defaults: `n = 10, 15, ..., 100`, `m = 1000`, `k = 2..=99`, all methods.
    pub fn new(spec: DistributionSpec, seed: u64) -> Self {
        Self {
            spec,
            n_grid: (10..=100).step_by(5).collect(),
            m: 1000,
            k_grid: (2..100).collect(),
            seed,
            methods: Method::ALL.to_vec(),
        }
    }

    /// Sample size at which the classical estimators are evaluated.
    pub fn k_axis_n(&self) -> usize {
        self.n_grid.last().copied().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.m < 2 {
            return bad(format!("m must be at least 2, got {}", self.m));
        }
        if self.n_grid.is_empty() {
            return bad("n grid is empty".into());
        }
        if let Some(&n) = self.n_grid.iter().find(|&&n| n < 5) {
            return bad(format!("every n must be at least 5, got {n}"));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("n grid must be strictly ascending".into());
        }
        if self.methods.is_empty() {
            return bad("no methods selected".into());
        }
        if self.methods.iter().any(|m| m.is_classical()) {
            let n = self.k_axis_n();
            if self.k_grid.is_empty() {
                return bad("k grid is empty".into());
            }
            if let Some(&k) = self.k_grid.iter().find(|&&k| k == 0 || k >= n) {
                return bad(format!("k = {k} outside [1, {}]", n - 1));
            }
        }
        let streams = (self.n_grid.len() as u128) * (self.m as u128);
        if streams > u64::MAX as u128 {
            return bad("too many replicates for the stream space".into());
        }
        Ok(())
    }
}

/// Which quantity varies along a result table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Sample size, distribution-sensitive estimators.
    N,
    /// Order-statistic count at fixed `n`, classical estimators.
    K,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::N => "n",
            Axis::K => "k",
        }
    }
}

/// Mean and empirical 95% band of a set of estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CiSummary {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Mean with type-6 empirical 2.5% and 97.5% quantiles (clamped to the
/// extreme order statistics when `m` is small).
pub fn summarize_ci(values: &[f64]) -> Result<CiSummary> {
    let sample = Sample::new(values.to_vec())?;
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(CiSummary {
        mean,
        ci_low: sample.quantile(0.025).value,
        ci_high: sample.quantile(0.975).value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StudyRow {
    pub axis: Axis,
    pub axis_value: usize,
    pub method: Method,
    /// `None` when no replicate produced a valid estimate.
    pub summary: Option<CiSummary>,
    pub valid_fraction: f64,
}

impl StudyRow {
    /// `mean - truth`, when defined.
    pub fn bias(&self, truth: f64) -> Option<f64> {
        self.summary.map(|s| s.mean - truth)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyResult {
    pub config: StudyConfig,
    pub rows: Vec<StudyRow>,
}

impl StudyResult {
    pub fn rows_on(&self, axis: Axis) -> impl Iterator<Item = &StudyRow> {
        self.rows.iter().filter(move |r| r.axis == axis)
    }

    pub fn row(&self, axis: Axis, axis_value: usize, method: Method) -> Option<&StudyRow> {
        self.rows
            .iter()
            .find(|r| r.axis == axis && r.axis_value == axis_value && r.method == method)
    }

    /// CSV table for one axis:
    /// `axis,method,mean,ci_low,ci_high,valid_fraction,m,seed`.
    pub fn to_csv(&self, axis: Axis) -> String {
        let mut out = String::from("axis,method,mean,ci_low,ci_high,valid_fraction,m,seed\n");
        for row in self.rows_on(axis) {
            let s = row.summary;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                row.axis_value,
                row.method,
                format_opt(s.map(|s| s.mean)),
                format_opt(s.map(|s| s.ci_low)),
                format_opt(s.map(|s| s.ci_high)),
                format_g12(row.valid_fraction),
                self.config.m,
                self.config.seed,
            ));
        }
        out
    }
}

/// Valid estimates of one replicate, laid out method-major to match the rows
/// the grid point will emit.
type ReplicateEstimates = Vec<Option<f64>>;

pub fn run_study(config: &StudyConfig) -> Result<StudyResult> {
    config.validate()?;
    let quick: Vec<Method> = config
        .methods
        .iter()
        .copied()
        .filter(|m| !m.is_classical())
        .collect();
    let classical: Vec<Method> = config
        .methods
        .iter()
        .copied()
        .filter(|m| m.is_classical())
        .collect();
    let k_n = config.k_axis_n();
    let k_slots: Vec<(usize, Method)> = config
        .k_grid
        .iter()
        .flat_map(|&k| classical.iter().map(move |&m| (k, m)))
        .filter(|&(k, m)| m != Method::Pickands || 4 * k <= k_n)
        .collect();

    let mut rows = Vec::new();
    let mut k_rows = Vec::new();
    let last = config.n_grid.len() - 1;
    for (g, &n) in config.n_grid.iter().enumerate() {
        let with_k = g == last && !k_slots.is_empty();
        let replicates: Vec<(ReplicateEstimates, ReplicateEstimates)> = (0..config.m)
            .into_par_iter()
            .map(|r| {
                let stream = (g * config.m + r) as u64;
                let sample = config.spec.sample(RngState::new(config.seed, stream), n)?;
                let quick_est = quick
                    .iter()
                    .map(|m| m.estimate(&sample, None).map(|rec| rec.value()))
                    .collect::<Result<Vec<_>>>()?;
                let k_est = if with_k {
                    k_slots
                        .iter()
                        .map(|&(k, m)| m.estimate(&sample, Some(k)).map(|rec| rec.value()))
                        .collect::<Result<Vec<_>>>()?
                } else {
                    Vec::new()
                };
                Ok((quick_est, k_est))
            })
            .collect::<Result<_>>()?;

        for (i, &method) in quick.iter().enumerate() {
            rows.push(aggregate(
                Axis::N,
                n,
                method,
                replicates.iter().map(|r| r.0[i]),
                config.m,
            )?);
        }
        if with_k {
            for (i, &(k, method)) in k_slots.iter().enumerate() {
                k_rows.push(aggregate(
                    Axis::K,
                    k,
                    method,
                    replicates.iter().map(|r| r.1[i]),
                    config.m,
                )?);
            }
        }
    }
    rows.extend(k_rows);
    Ok(StudyResult {
        config: config.clone(),
        rows,
    })
}

fn aggregate(
    axis: Axis,
    axis_value: usize,
    method: Method,
    estimates: impl Iterator<Item = Option<f64>>,
    m: usize,
) -> Result<StudyRow> {
    let valid: Vec<f64> = estimates.flatten().collect();
    let summary = if valid.is_empty() {
        None
    } else {
        Some(summarize_ci(&valid)?)
    };
    Ok(StudyRow {
        axis,
        axis_value,
        method,
        summary,
        valid_fraction: valid.len() as f64 / m as f64,
    })
}
