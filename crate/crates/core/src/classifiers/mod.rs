//! From-scratch classifiers: Gaussian Naive Bayes, a C4.5-style decision
//! tree, and a RIPPER-style rule learner, plus a constant-majority
//! baseline.
//!
//! All trainers are pure functions of (dataset, params, seed); trained
//! models are immutable, serializable through [`io`], and predict a
//! [`ClassDistribution`] over the six fertility classes.

mod info;
pub mod io;
mod naive_bayes;
mod ripper;
mod tree;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Dataset, FertilityClass, SoilSample, CLASS_COUNT};

pub use info::{entropy, gain_ratio, SplitScore};
pub use naive_bayes::{nb_predict, train_naive_bayes, Gaussian, NaiveBayesModel};
pub use ripper::{
    ripper_predict, train_ripper, CondOp, Condition, LearnedRule, RipperParams, RuleList,
};
pub use tree::{c45_predict, train_c45, C45Params, DecisionTree, Node};

/// Errors raised by training and the information primitives.
#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dataset has no labels")]
    Unlabeled,
    #[error("all class counts are zero")]
    AllZero,
    #[error("threshold leaves one side of the split empty")]
    DegenerateSplit,
}

/// A probability distribution over the six fertility classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassDistribution {
    probabilities: [f64; CLASS_COUNT],
}

impl ClassDistribution {
    /// Wrap raw probabilities; callers are responsible for normalization.
    pub fn new(probabilities: [f64; CLASS_COUNT]) -> ClassDistribution {
        ClassDistribution { probabilities }
    }

    /// Laplace-smoothed distribution from per-class counts:
    /// `(count + 1) / (total + 6)`.
    pub fn laplace(counts: &[usize; CLASS_COUNT]) -> ClassDistribution {
        let total: usize = counts.iter().sum();
        let mut probabilities = [0.0; CLASS_COUNT];
        for (p, &c) in probabilities.iter_mut().zip(counts.iter()) {
            *p = (c as f64 + 1.0) / (total as f64 + CLASS_COUNT as f64);
        }
        ClassDistribution { probabilities }
    }

    /// Probability mass of one class.
    pub fn probability(&self, class: FertilityClass) -> f64 {
        self.probabilities[class.index()]
    }

    pub fn probabilities(&self) -> &[f64; CLASS_COUNT] {
        &self.probabilities
    }

    /// Most probable class; ties go to the lower class level.
    pub fn argmax(&self) -> FertilityClass {
        let mut best = FertilityClass::VeryLow;
        let mut best_p = self.probabilities[0];
        for class in FertilityClass::ALL {
            let p = self.probabilities[class.index()];
            if p > best_p {
                best = class;
                best_p = p;
            }
        }
        best
    }

    /// Total mass; 1 ± 1e-12 for every distribution built by the crate.
    pub fn sum(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

/// Per-class label counts for a labeled slice.
pub(crate) fn class_counts(labels: &[FertilityClass]) -> [usize; CLASS_COUNT] {
    let mut counts = [0usize; CLASS_COUNT];
    for l in labels {
        counts[l.index()] += 1;
    }
    counts
}

/// A trainer selection with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ClassifierSpec {
    /// Constant predictor of the training majority distribution.
    Majority,
    NaiveBayes,
    C45(C45Params),
    Ripper(RipperParams),
}

impl ClassifierSpec {
    /// Short tag used in reports and on the command line.
    pub fn tag(&self) -> &'static str {
        match self {
            ClassifierSpec::Majority => "majority",
            ClassifierSpec::NaiveBayes => "nb",
            ClassifierSpec::C45(_) => "c45",
            ClassifierSpec::Ripper(_) => "ripper",
        }
    }

    pub fn train(&self, d: &Dataset) -> Result<TrainedClassifier, ClassifierError> {
        match self {
            ClassifierSpec::Majority => {
                let (_, labels) = d.labeled().map_err(|_| ClassifierError::Unlabeled)?;
                if labels.is_empty() {
                    return Err(ClassifierError::EmptyDataset);
                }
                Ok(TrainedClassifier::Majority(ClassDistribution::laplace(
                    &class_counts(labels),
                )))
            }
            ClassifierSpec::NaiveBayes => Ok(TrainedClassifier::NaiveBayes(train_naive_bayes(d)?)),
            ClassifierSpec::C45(params) => Ok(TrainedClassifier::Tree(train_c45(d, params)?)),
            ClassifierSpec::Ripper(params) => {
                Ok(TrainedClassifier::Rules(train_ripper(d, params)?))
            }
        }
    }
}

/// A trained model of any supported kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TrainedClassifier {
    Majority(ClassDistribution),
    NaiveBayes(NaiveBayesModel),
    Tree(DecisionTree),
    Rules(RuleList),
}

impl TrainedClassifier {
    pub fn predict(&self, s: &SoilSample) -> ClassDistribution {
        match self {
            TrainedClassifier::Majority(dist) => *dist,
            TrainedClassifier::NaiveBayes(m) => m.predict(s),
            TrainedClassifier::Tree(t) => t.predict(s),
            TrainedClassifier::Rules(r) => r.predict(s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplace_distribution_sums_to_one() {
        let d = ClassDistribution::laplace(&[3, 0, 0, 1, 0, 0]);
        assert!((d.sum() - 1.0).abs() < 1e-12);
        assert!((d.probability(FertilityClass::VeryLow) - 4.0 / 10.0).abs() < 1e-12);
    }

    #[test]
    fn argmax_ties_take_the_lower_class() {
        let d = ClassDistribution::new([0.25, 0.25, 0.2, 0.1, 0.1, 0.1]);
        assert_eq!(d.argmax(), FertilityClass::VeryLow);
    }
}
