//! Stratified cross-validation and the comparison metrics.
//!
//! Folds are a pure function of (labels, k, seed): within each class the
//! indices are shuffled by a seeded ChaCha8 stream, then dealt cyclically
//! across folds with a cursor that carries over between classes, so fold
//! sizes differ by at most one overall and per-class counts differ by at
//! most one per fold.
//!
//! Fold evaluation may run in parallel; results are reduced in fold order,
//! so parallel and serial runs produce identical reports (timing fields
//! aside).

mod table;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifiers::{ClassDistribution, ClassifierError, ClassifierSpec};
use crate::data::{Attribute, Dataset, FertilityClass, CLASS_COUNT};
use crate::regressors::{
    fit_lms, fit_ols, fit_simple, FitMeta, LinearModel, LmsConfig, RegressionError,
};

pub use table::{compare_table, ComparisonTable, Report};

/// Errors raised by the evaluation harness.
#[derive(Debug, Error)]
pub enum EvalError {
    #[error("k must satisfy 2 <= k <= {n}, got {k}")]
    BadK { k: usize, n: usize },
    #[error("dataset has no labels")]
    UnlabeledDataset,
    #[error("confusion matrix is empty")]
    EmptyMatrix,
    #[error("length mismatch: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("a vector is constant; correlation is undefined")]
    ZeroVariance,
    #[error("baseline absolute deviation is zero")]
    DegenerateBaseline,
    #[error("cannot compare reports of different kinds")]
    MixedKinds,
    #[error("training failed on fold {fold}: {source}")]
    Train {
        fold: usize,
        source: ClassifierError,
    },
    #[error("fit failed on fold {fold}: {source}")]
    Fit {
        fold: usize,
        source: RegressionError,
    },
}

/// 6x6 confusion counts; rows are actual classes, columns predicted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    counts: [[usize; CLASS_COUNT]; CLASS_COUNT],
}

impl Default for ConfusionMatrix {
    fn default() -> Self {
        ConfusionMatrix {
            counts: [[0; CLASS_COUNT]; CLASS_COUNT],
        }
    }
}

impl ConfusionMatrix {
    pub fn record(&mut self, actual: FertilityClass, predicted: FertilityClass) {
        self.counts[actual.index()][predicted.index()] += 1;
    }

    pub fn count(&self, actual: FertilityClass, predicted: FertilityClass) -> usize {
        self.counts[actual.index()][predicted.index()]
    }

    pub fn counts(&self) -> &[[usize; CLASS_COUNT]; CLASS_COUNT] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> usize {
        (0..CLASS_COUNT).map(|i| self.counts[i][i]).sum()
    }

    /// Build a matrix directly from counts (reports, fixtures).
    pub fn from_counts(counts: [[usize; CLASS_COUNT]; CLASS_COUNT]) -> ConfusionMatrix {
        ConfusionMatrix { counts }
    }
}

/// Fraction of correctly classified instances: trace / total.
pub fn accuracy(c: &ConfusionMatrix) -> Result<f64, EvalError> {
    let total = c.total();
    if total == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    Ok(c.trace() as f64 / total as f64)
}

/// `1 - accuracy`, exactly.
pub fn error_rate(c: &ConfusionMatrix) -> Result<f64, EvalError> {
    Ok(1.0 - accuracy(c)?)
}

/// One-vs-rest true/false positive rates for a class. A zero denominator
/// reports a 0 rate with the corresponding `defined` flag cleared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub tpr: f64,
    pub fpr: f64,
    pub tpr_defined: bool,
    pub fpr_defined: bool,
}

pub fn tpr_fpr(c: &ConfusionMatrix, class: FertilityClass) -> Rates {
    let ci = class.index();
    let tp = c.counts[ci][ci];
    let actual_pos: usize = c.counts[ci].iter().sum();
    let fn_ = actual_pos - tp;
    let predicted_pos: usize = (0..CLASS_COUNT).map(|r| c.counts[r][ci]).sum();
    let fp = predicted_pos - tp;
    let total = c.total();
    let tn = total - tp - fn_ - fp;

    let (tpr, tpr_defined) = if tp + fn_ > 0 {
        (tp as f64 / (tp + fn_) as f64, true)
    } else {
        (0.0, false)
    };
    let (fpr, fpr_defined) = if fp + tn > 0 {
        (fp as f64 / (fp + tn) as f64, true)
    } else {
        (0.0, false)
    };
    Rates {
        tpr,
        fpr,
        tpr_defined,
        fpr_defined,
    }
}

/// Classification mean absolute error: the mean over instances of the
/// per-class L1 distance between the predicted distribution and the
/// one-hot truth, divided by the class count.
pub fn mae_classification(
    predictions: &[ClassDistribution],
    truth: &[FertilityClass],
) -> Result<f64, EvalError> {
    if predictions.len() != truth.len() || predictions.is_empty() {
        return Err(EvalError::LengthMismatch {
            a: predictions.len(),
            b: truth.len(),
        });
    }
    let mut total = 0.0;
    for (dist, actual) in predictions.iter().zip(truth.iter()) {
        let mut l1 = 0.0;
        for class in FertilityClass::ALL {
            let target = if class == *actual { 1.0 } else { 0.0 };
            l1 += (dist.probability(class) - target).abs();
        }
        total += l1 / CLASS_COUNT as f64;
    }
    Ok(total / predictions.len() as f64)
}

/// Sample Pearson correlation between two vectors.
pub fn correlation_coefficient(pred: &[f64], actual: &[f64]) -> Result<f64, EvalError> {
    if pred.len() != actual.len() {
        return Err(EvalError::LengthMismatch {
            a: pred.len(),
            b: actual.len(),
        });
    }
    if pred.len() < 2 {
        return Err(EvalError::ZeroVariance);
    }
    let n = pred.len() as f64;
    let mx = pred.iter().sum::<f64>() / n;
    let my = actual.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in pred.iter().zip(actual.iter()) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(EvalError::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Relative absolute error as a percentage against a baseline mean
/// predictor: `100 * sum|pred - actual| / sum|actual - baseline_mean|`.
pub fn relative_absolute_error(
    pred: &[f64],
    actual: &[f64],
    baseline_mean: f64,
) -> Result<f64, EvalError> {
    if pred.len() != actual.len() {
        return Err(EvalError::LengthMismatch {
            a: pred.len(),
            b: actual.len(),
        });
    }
    let numerator: f64 = pred
        .iter()
        .zip(actual.iter())
        .map(|(p, a)| (p - a).abs())
        .sum();
    let denominator: f64 = actual.iter().map(|a| (a - baseline_mean).abs()).sum();
    if denominator == 0.0 {
        return Err(EvalError::DegenerateBaseline);
    }
    Ok(100.0 * numerator / denominator)
}

/// Stratified fold assignment: k disjoint index sets covering [0, N).
pub fn stratified_k_fold(
    d: &Dataset,
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>, EvalError> {
    let (_, labels) = d.labeled().map_err(|_| EvalError::UnlabeledDataset)?;
    let n = labels.len();
    if k < 2 || k > n {
        return Err(EvalError::BadK { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut cursor = 0usize;
    for class in FertilityClass::ALL {
        let mut indices: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
        for i in (1..indices.len()).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            indices.swap(i, j);
        }
        for idx in indices {
            folds[cursor % k].push(idx);
            cursor += 1;
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}

/// Per-class rates carried in an evaluation report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassRates {
    pub class: FertilityClass,
    pub rates: Rates,
}

/// Cross-validated classification metrics for one algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub algorithm: String,
    pub k: usize,
    pub seed: u64,
    pub correct: usize,
    pub incorrect: usize,
    pub accuracy: f64,
    pub mae: f64,
    pub per_class: Vec<ClassRates>,
    /// Support-weighted one-vs-rest rates.
    pub weighted_tpr: f64,
    pub weighted_fpr: f64,
    pub confusion: ConfusionMatrix,
    /// Mean per-fold training wall time, seconds at ms resolution.
    pub build_time_s: f64,
}

/// Cross-validate a classifier: train on each fold's complement, predict
/// the fold, and pool confusion counts and MAE over all out-of-fold
/// predictions.
pub fn cross_validate_classifier(
    spec: &ClassifierSpec,
    d: &Dataset,
    k: usize,
    seed: u64,
) -> Result<EvaluationReport, EvalError> {
    let folds = stratified_k_fold(d, k, seed)?;
    let labels = d.labels().expect("checked by fold construction");
    let n = d.len();

    struct FoldOutcome {
        predictions: Vec<(usize, ClassDistribution)>,
        train_seconds: f64,
    }

    let outcomes: Vec<Result<FoldOutcome, EvalError>> = folds
        .par_iter()
        .enumerate()
        .map(|(fold_no, fold)| {
            let train_idx: Vec<usize> = {
                let mut in_fold = vec![false; n];
                for &i in fold {
                    in_fold[i] = true;
                }
                (0..n).filter(|&i| !in_fold[i]).collect()
            };
            let train_data = d.select(&train_idx);
            let started = std::time::Instant::now();
            let model = spec.train(&train_data).map_err(|source| EvalError::Train {
                fold: fold_no,
                source,
            })?;
            let train_seconds = started.elapsed().as_secs_f64();
            let predictions = fold
                .iter()
                .map(|&i| (i, model.predict(&d.rows()[i])))
                .collect();
            Ok(FoldOutcome {
                predictions,
                train_seconds,
            })
        })
        .collect();

    let mut confusion = ConfusionMatrix::default();
    let mut dists = Vec::with_capacity(n);
    let mut truths = Vec::with_capacity(n);
    let mut total_train = 0.0;
    for outcome in outcomes {
        let outcome = outcome?;
        total_train += outcome.train_seconds;
        for (i, dist) in outcome.predictions {
            confusion.record(labels[i], dist.argmax());
            dists.push(dist);
            truths.push(labels[i]);
        }
    }

    let correct = confusion.trace();
    let total = confusion.total();
    let acc = accuracy(&confusion)?;
    let mae = mae_classification(&dists, &truths)?;

    let mut per_class = Vec::with_capacity(CLASS_COUNT);
    let mut weighted_tpr = 0.0;
    let mut weighted_fpr = 0.0;
    for class in FertilityClass::ALL {
        let rates = tpr_fpr(&confusion, class);
        let support: usize = confusion.counts()[class.index()].iter().sum();
        weighted_tpr += rates.tpr * support as f64 / total as f64;
        weighted_fpr += rates.fpr * support as f64 / total as f64;
        per_class.push(ClassRates { class, rates });
    }

    Ok(EvaluationReport {
        algorithm: spec.tag().to_string(),
        k,
        seed,
        correct,
        incorrect: total - correct,
        accuracy: acc,
        mae,
        per_class,
        weighted_tpr,
        weighted_fpr,
        confusion,
        build_time_s: ((total_train / k as f64) * 1000.0).round() / 1000.0,
    })
}

/// A regression fitter selection with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RegressorSpec {
    Ols { select: bool },
    Lms(LmsConfig),
    Simple,
    /// Constant predictor of the training target mean.
    Mean,
}

impl RegressorSpec {
    pub fn tag(&self) -> &'static str {
        match self {
            RegressorSpec::Ols { .. } => "ols",
            RegressorSpec::Lms(_) => "lms",
            RegressorSpec::Simple => "simple",
            RegressorSpec::Mean => "mean",
        }
    }

    pub fn fit(&self, d: &Dataset, target: Attribute) -> Result<LinearModel, RegressionError> {
        match self {
            RegressorSpec::Ols { select } => fit_ols(d, target, *select),
            RegressorSpec::Lms(cfg) => fit_lms(d, target, cfg),
            RegressorSpec::Simple => fit_simple(d, target),
            RegressorSpec::Mean => {
                if d.is_empty() {
                    return Err(RegressionError::TooFewRows { needed: 1, got: 0 });
                }
                let y: Vec<f64> = d.rows().iter().map(|r| r.value(target)).collect();
                let mean = y.iter().sum::<f64>() / y.len() as f64;
                let rss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
                Ok(LinearModel {
                    target,
                    retained: vec![],
                    coefficients: vec![],
                    intercept: mean,
                    fit_meta: FitMeta {
                        algorithm: "mean".into(),
                        build_time_s: 0.0,
                        objective: rss,
                    },
                })
            }
        }
    }
}

/// One out-of-fold prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionPair {
    pub actual: f64,
    pub predicted: f64,
}

/// Cross-validated regression metrics for one algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionReport {
    pub algorithm: String,
    pub k: usize,
    pub seed: u64,
    /// Pearson correlation over pooled out-of-fold predictions.
    pub correlation: f64,
    /// Pooled relative absolute error (per-fold training-mean baselines).
    pub rae_percent: f64,
    /// Wall time of one fit on the full dataset, seconds at ms resolution.
    pub build_time_s: f64,
}

/// Report plus the pooled out-of-fold predictions in row order.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionOutcome {
    pub report: RegressionReport,
    pub predictions: Vec<PredictionPair>,
}

/// Cross-validate a regressor on a numeric target.
///
/// Folds are stratified on the dataset labels when present, otherwise
/// plain seeded k-way splits are used. RAE numerators and denominators
/// are summed across folds with each fold's training mean as baseline;
/// build time comes from one additional fit on the full dataset.
pub fn cross_validate_regressor(
    spec: &RegressorSpec,
    d: &Dataset,
    target: Attribute,
    k: usize,
    seed: u64,
) -> Result<RegressionOutcome, EvalError> {
    let n = d.len();
    let folds = if d.labels().is_some() {
        stratified_k_fold(d, k, seed)?
    } else {
        plain_k_fold(n, k, seed)?
    };

    struct FoldOutcome {
        predictions: Vec<(usize, f64)>,
        numerator: f64,
        denominator: f64,
    }

    let outcomes: Vec<Result<FoldOutcome, EvalError>> = folds
        .par_iter()
        .enumerate()
        .map(|(fold_no, fold)| {
            let train_idx: Vec<usize> = {
                let mut in_fold = vec![false; n];
                for &i in fold {
                    in_fold[i] = true;
                }
                (0..n).filter(|&i| !in_fold[i]).collect()
            };
            let train_data = d.select(&train_idx);
            let model = spec
                .fit(&train_data, target)
                .map_err(|source| EvalError::Fit {
                    fold: fold_no,
                    source,
                })?;
            let baseline: f64 = train_idx
                .iter()
                .map(|&i| d.rows()[i].value(target))
                .sum::<f64>()
                / train_idx.len() as f64;
            let mut predictions = Vec::with_capacity(fold.len());
            let mut numerator = 0.0;
            let mut denominator = 0.0;
            for &i in fold {
                let actual = d.rows()[i].value(target);
                let predicted = model.predict(&d.rows()[i]);
                numerator += (predicted - actual).abs();
                denominator += (actual - baseline).abs();
                predictions.push((i, predicted));
            }
            Ok(FoldOutcome {
                predictions,
                numerator,
                denominator,
            })
        })
        .collect();

    let mut by_row: Vec<Option<f64>> = vec![None; n];
    let mut numerator = 0.0;
    let mut denominator = 0.0;
    for outcome in outcomes {
        let outcome = outcome?;
        numerator += outcome.numerator;
        denominator += outcome.denominator;
        for (i, p) in outcome.predictions {
            by_row[i] = Some(p);
        }
    }
    if denominator == 0.0 {
        return Err(EvalError::DegenerateBaseline);
    }

    let predictions: Vec<PredictionPair> = by_row
        .iter()
        .enumerate()
        .map(|(i, p)| PredictionPair {
            actual: d.rows()[i].value(target),
            predicted: p.expect("folds cover every row"),
        })
        .collect();
    let pred_vec: Vec<f64> = predictions.iter().map(|p| p.predicted).collect();
    let actual_vec: Vec<f64> = predictions.iter().map(|p| p.actual).collect();
    let correlation = correlation_coefficient(&pred_vec, &actual_vec)?;

    let full_fit = spec
        .fit(d, target)
        .map_err(|source| EvalError::Fit { fold: k, source })?;

    Ok(RegressionOutcome {
        report: RegressionReport {
            algorithm: spec.tag().to_string(),
            k,
            seed,
            correlation,
            rae_percent: 100.0 * numerator / denominator,
            build_time_s: full_fit.fit_meta.build_time_s,
        },
        predictions,
    })
}

/// Unstratified seeded k-way split for unlabeled data.
fn plain_k_fold(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>, EvalError> {
    if k < 2 || k > n {
        return Err(EvalError::BadK { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        indices.swap(i, j);
    }
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (pos, idx) in indices.into_iter().enumerate() {
        folds[pos % k].push(idx);
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}
