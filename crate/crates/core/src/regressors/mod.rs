//! Regression fits for predicting one attribute from the other eight.
//!
//! Three procedures share the [`LinearModel`] output type:
//!
//! * [`fit_ols`] — ordinary least squares over all eight candidate
//!   attributes, optionally followed by greedy backward elimination under
//!   the Akaike criterion;
//! * [`fit_lms`] — least median of squares via elemental subsets: fit
//!   every (or a seeded sample of) size-(p+1) subset exactly and keep the
//!   candidate minimizing the median squared residual over the whole
//!   dataset;
//! * [`fit_simple`] — the best single-attribute least-squares line.
//!
//! All fits are deterministic given (data, params, seed). Build time is
//! recorded in [`FitMeta`] as wall-clock seconds at millisecond
//! resolution.

mod linalg;

use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Attribute, Dataset, SoilSample};
use linalg::{least_squares, DesignMatrix};

/// Errors raised by the regression fits.
#[derive(Debug, Error)]
pub enum RegressionError {
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("target column contains a non-finite value")]
    NonFiniteTarget,
    #[error("invalid search config: {0}")]
    InvalidConfig(String),
}

/// Provenance of a fit: algorithm tag, wall time, and objective value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitMeta {
    pub algorithm: String,
    /// Wall-clock build time in seconds, millisecond resolution.
    pub build_time_s: f64,
    /// Residual sum of squares for OLS/simple; median squared residual
    /// for LMS.
    pub objective: f64,
}

/// A fitted linear predictor for one target attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub target: Attribute,
    /// Retained predictor attributes, canonical order.
    pub retained: Vec<Attribute>,
    /// Coefficients parallel to `retained`.
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub fit_meta: FitMeta,
}

impl LinearModel {
    /// `intercept + sum(coefficient * attribute)` over retained attributes.
    pub fn predict(&self, s: &SoilSample) -> f64 {
        let mut y = self.intercept;
        for (attr, c) in self.retained.iter().zip(self.coefficients.iter()) {
            y += c * s.value(*attr);
        }
        y
    }
}

/// Free-function form of [`LinearModel::predict`].
pub fn predict_value(m: &LinearModel, s: &SoilSample) -> f64 {
    m.predict(s)
}

/// Search budget for [`fit_lms`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmsConfig {
    /// Random elemental subsets to draw when not exhaustive.
    pub subsample_count: usize,
    pub seed: u64,
    /// Enumerate all subsets when their total count is at most this.
    pub exhaustive_below: usize,
}

impl Default for LmsConfig {
    fn default() -> Self {
        LmsConfig {
            subsample_count: 1000,
            seed: 42,
            exhaustive_below: 5000,
        }
    }
}

/// The candidate predictors for a target: all other attributes, in
/// canonical order.
pub fn candidate_attributes(target: Attribute) -> Vec<Attribute> {
    Attribute::ALL.into_iter().filter(|a| *a != target).collect()
}

fn target_column(d: &Dataset, target: Attribute) -> Result<Vec<f64>, RegressionError> {
    let y: Vec<f64> = d.rows().iter().map(|r| r.value(target)).collect();
    if y.iter().any(|v| !v.is_finite()) {
        return Err(RegressionError::NonFiniteTarget);
    }
    Ok(y)
}

/// Design matrix over the given attributes plus a trailing intercept
/// column, taking rows at `indices` (all rows when `None`).
fn design(d: &Dataset, attrs: &[Attribute], indices: Option<&[usize]>) -> DesignMatrix {
    let n = indices.map_or(d.len(), |ix| ix.len());
    let mut m = DesignMatrix::zeros(n, attrs.len() + 1);
    for r in 0..n {
        let row = &d.rows()[indices.map_or(r, |ix| ix[r])];
        for (c, attr) in attrs.iter().enumerate() {
            m.set(r, c, row.value(*attr));
        }
        m.set(r, attrs.len(), 1.0);
    }
    m
}

/// Solve the least-squares problem for one attribute subset; returns
/// (attribute coefficients, intercept, rss).
fn fit_subset(d: &Dataset, attrs: &[Attribute], y: &[f64]) -> (Vec<f64>, f64, f64) {
    let a = design(d, attrs, None);
    let sol = least_squares(&a, y);
    let intercept = sol.coeffs[attrs.len()];
    let coeffs = sol.coeffs[..attrs.len()].to_vec();
    let rss: f64 = y
        .iter()
        .enumerate()
        .map(|(r, &yi)| (yi - a.row_dot(r, &sol.coeffs)).powi(2))
        .sum();
    (coeffs, intercept, rss)
}

/// Akaike criterion with the RSS floored so exact fits stay comparable.
fn aic(n: usize, rss: f64, params: usize) -> f64 {
    let n = n as f64;
    n * (rss.max(1e-12) / n).ln() + 2.0 * (params as f64 + 1.0)
}

fn elapsed_ms(start: Instant) -> f64 {
    (start.elapsed().as_secs_f64() * 1000.0).round() / 1000.0
}

/// Ordinary least squares, optionally with greedy backward elimination.
///
/// With `select`, attributes are removed one at a time while dropping the
/// attribute with the best (lowest) Akaike criterion improves on the
/// current model; elimination may empty the set, leaving the intercept
/// (mean) model.
pub fn fit_ols(
    d: &Dataset,
    target: Attribute,
    select: bool,
) -> Result<LinearModel, RegressionError> {
    let start = Instant::now();
    let candidates = candidate_attributes(target);
    let needed = candidates.len() + 1;
    if d.len() < needed {
        return Err(RegressionError::TooFewRows {
            needed,
            got: d.len(),
        });
    }
    let y = target_column(d, target)?;

    let mut retained = candidates;
    let (mut coeffs, mut intercept, mut rss) = fit_subset(d, &retained, &y);
    if select {
        let mut current_aic = aic(d.len(), rss, retained.len() + 1);
        loop {
            let mut best: Option<(usize, Vec<f64>, f64, f64, f64)> = None;
            for i in 0..retained.len() {
                let mut subset = retained.clone();
                subset.remove(i);
                let (c, ic, r) = fit_subset(d, &subset, &y);
                let a = aic(d.len(), r, subset.len() + 1);
                if best.as_ref().map_or(true, |b| a < b.4) {
                    best = Some((i, c, ic, r, a));
                }
            }
            match best {
                Some((i, c, ic, r, a)) if a < current_aic => {
                    retained.remove(i);
                    coeffs = c;
                    intercept = ic;
                    rss = r;
                    current_aic = a;
                }
                _ => break,
            }
        }
    }

    Ok(LinearModel {
        target,
        retained,
        coefficients: coeffs,
        intercept,
        fit_meta: FitMeta {
            algorithm: "ols".into(),
            build_time_s: elapsed_ms(start),
            objective: rss,
        },
    })
}

/// Median of a slice of squared residuals (average of the two middle
/// values for even lengths). Reorders the slice.
fn median(values: &mut [f64]) -> f64 {
    let n = values.len();
    let (_, mid, _) = values.select_nth_unstable_by(n / 2, |a, b| a.partial_cmp(b).unwrap());
    let mid = *mid;
    if n % 2 == 1 {
        mid
    } else {
        // Largest element strictly left of the midpoint.
        let lower = values[..n / 2]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + mid)
    }
}

/// Number of size-k subsets of n items, saturating at f64 range.
fn subset_count(n: usize, k: usize) -> f64 {
    let mut c = 1.0f64;
    for i in 0..k {
        c *= (n - i) as f64 / (i + 1) as f64;
        if c > 1e18 {
            return f64::INFINITY;
        }
    }
    c
}

/// Least median of squares via elemental subsets.
///
/// Subsets have size p+1 (p = candidate attribute count). When the total
/// subset count is at most `cfg.exhaustive_below` they are enumerated in
/// lexicographic order; otherwise `cfg.subsample_count` subsets are drawn
/// by seeded partial Fisher-Yates. Each subset is fitted exactly (ridge
/// fallback on singular subsets) and scored by the median squared
/// residual over all rows; ties keep the earliest candidate.
pub fn fit_lms(
    d: &Dataset,
    target: Attribute,
    cfg: &LmsConfig,
) -> Result<LinearModel, RegressionError> {
    let start = Instant::now();
    if cfg.subsample_count < 1 {
        return Err(RegressionError::InvalidConfig(
            "subsample_count must be >= 1".into(),
        ));
    }
    let candidates = candidate_attributes(target);
    let subset_size = candidates.len() + 1;
    let needed = candidates.len() + 2;
    let n = d.len();
    if n < needed {
        return Err(RegressionError::TooFewRows { needed, got: n });
    }
    let y = target_column(d, target)?;

    let full = design(d, &candidates, None);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut residuals = vec![0.0f64; n];

    let mut evaluate = |indices: &[usize], best: &mut Option<(f64, Vec<f64>)>| {
        let a = design(d, &candidates, Some(indices));
        let ys: Vec<f64> = indices.iter().map(|&i| y[i]).collect();
        let sol = least_squares(&a, &ys);
        if sol.coeffs.iter().any(|c| !c.is_finite()) {
            return;
        }
        for r in 0..n {
            let e = y[r] - full.row_dot(r, &sol.coeffs);
            residuals[r] = e * e;
        }
        let m = median(&mut residuals);
        if m.is_finite() && best.as_ref().map_or(true, |(obj, _)| m < *obj) {
            *best = Some((m, sol.coeffs));
        }
    };

    if subset_count(n, subset_size) <= cfg.exhaustive_below as f64 {
        // Lexicographic enumeration of all combinations.
        let mut indices: Vec<usize> = (0..subset_size).collect();
        'outer: loop {
            evaluate(&indices, &mut best);
            let mut i = subset_size;
            loop {
                if i == 0 {
                    break 'outer;
                }
                i -= 1;
                if indices[i] != i + n - subset_size {
                    indices[i] += 1;
                    for j in (i + 1)..subset_size {
                        indices[j] = indices[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut pool: Vec<usize> = (0..n).collect();
        for _ in 0..cfg.subsample_count {
            for i in 0..subset_size {
                let j = i + (rng.next_u64() % (n - i) as u64) as usize;
                pool.swap(i, j);
            }
            let mut subset = pool[..subset_size].to_vec();
            subset.sort_unstable();
            evaluate(&subset, &mut best);
        }
    }

    let (objective, coeffs) = best.expect("at least one finite elemental fit");
    Ok(LinearModel {
        target,
        retained: candidates.clone(),
        coefficients: coeffs[..candidates.len()].to_vec(),
        intercept: coeffs[candidates.len()],
        fit_meta: FitMeta {
            algorithm: "lms".into(),
            build_time_s: elapsed_ms(start),
            objective,
        },
    })
}

/// Best single-attribute least-squares line, ties broken by canonical
/// attribute order.
pub fn fit_simple(d: &Dataset, target: Attribute) -> Result<LinearModel, RegressionError> {
    let start = Instant::now();
    let n = d.len();
    if n < 2 {
        return Err(RegressionError::TooFewRows { needed: 2, got: n });
    }
    let y = target_column(d, target)?;
    let my = y.iter().sum::<f64>() / n as f64;

    let mut best: Option<(f64, Attribute, f64, f64)> = None;
    for attr in candidate_attributes(target) {
        let xs: Vec<f64> = d.rows().iter().map(|r| r.value(attr)).collect();
        let mx = xs.iter().sum::<f64>() / n as f64;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs
            .iter()
            .zip(y.iter())
            .map(|(x, yi)| (x - mx) * (yi - my))
            .sum();
        let (slope, intercept) = if sxx > 0.0 {
            let s = sxy / sxx;
            (s, my - s * mx)
        } else {
            // Constant column: flat line through the target mean.
            (0.0, my)
        };
        let rss: f64 = xs
            .iter()
            .zip(y.iter())
            .map(|(x, yi)| (yi - (intercept + slope * x)).powi(2))
            .sum();
        if best.as_ref().map_or(true, |(b, ..)| rss < *b) {
            best = Some((rss, attr, slope, intercept));
        }
    }

    let (rss, attr, slope, intercept) = best.unwrap();
    Ok(LinearModel {
        target,
        retained: vec![attr],
        coefficients: vec![slope],
        intercept,
        fit_meta: FitMeta {
            algorithm: "simple".into(),
            build_time_s: elapsed_ms(start),
            objective: rss,
        },
    })
}
