//! Gaussian Naive Bayes with Laplace class priors.
//!
//! Priors are `(count + 1) / (N + 6)`. Per (class, attribute) the model
//! stores the sample mean and sample variance, floored at
//! `1e-9 * (global attribute variance + 1e-12)` so constant columns never
//! produce a zero density. Classes absent from training fall back to the
//! global attribute statistics. Posteriors are computed in log space and
//! normalized with log-sum-exp.

use serde::{Deserialize, Serialize};

use crate::data::{Attribute, Dataset, SoilSample, ATTRIBUTE_COUNT, CLASS_COUNT};

use super::{class_counts, ClassDistribution, ClassifierError};

/// Mean and variance of one (class, attribute) likelihood.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub mean: f64,
    pub variance: f64,
}

impl Gaussian {
    fn log_density(&self, x: f64) -> f64 {
        -0.5 * (std::f64::consts::TAU * self.variance).ln()
            - (x - self.mean).powi(2) / (2.0 * self.variance)
    }
}

/// Trained Gaussian Naive Bayes model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    /// Laplace-smoothed class priors, summing to 1.
    pub class_priors: [f64; CLASS_COUNT],
    /// Per class, per attribute (canonical order) likelihoods.
    pub likelihoods: Vec<[Gaussian; ATTRIBUTE_COUNT]>,
}

/// Sample mean and (n-1) variance; variance 0 below two observations.
fn sample_stats(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, ss / (n - 1.0))
}

/// Train the model; requires a non-empty labeled dataset.
pub fn train_naive_bayes(d: &Dataset) -> Result<NaiveBayesModel, ClassifierError> {
    let (rows, labels) = d.labeled().map_err(|_| ClassifierError::Unlabeled)?;
    if rows.is_empty() {
        return Err(ClassifierError::EmptyDataset);
    }
    let counts = class_counts(labels);
    let n = rows.len() as f64;

    let mut class_priors = [0.0; CLASS_COUNT];
    for (prior, &count) in class_priors.iter_mut().zip(counts.iter()) {
        *prior = (count as f64 + 1.0) / (n + CLASS_COUNT as f64);
    }

    // Global per-attribute stats drive the variance floor and the fallback
    // for absent classes.
    let mut global = [Gaussian {
        mean: 0.0,
        variance: 0.0,
    }; ATTRIBUTE_COUNT];
    let mut floors = [0.0f64; ATTRIBUTE_COUNT];
    for attr in Attribute::ALL {
        let values: Vec<f64> = rows.iter().map(|r| r.value(attr)).collect();
        let (mean, variance) = sample_stats(&values);
        let floor = 1e-9 * (variance + 1e-12);
        global[attr.index()] = Gaussian {
            mean,
            variance: variance.max(floor),
        };
        floors[attr.index()] = floor;
    }

    let mut likelihoods = Vec::with_capacity(CLASS_COUNT);
    for class_index in 0..CLASS_COUNT {
        if counts[class_index] == 0 {
            likelihoods.push(global);
            continue;
        }
        let mut per_attr = [Gaussian {
            mean: 0.0,
            variance: 0.0,
        }; ATTRIBUTE_COUNT];
        for attr in Attribute::ALL {
            let values: Vec<f64> = rows
                .iter()
                .zip(labels.iter())
                .filter(|(_, l)| l.index() == class_index)
                .map(|(r, _)| r.value(attr))
                .collect();
            let (mean, variance) = sample_stats(&values);
            per_attr[attr.index()] = Gaussian {
                mean,
                variance: variance.max(floors[attr.index()]),
            };
        }
        likelihoods.push(per_attr);
    }

    Ok(NaiveBayesModel {
        class_priors,
        likelihoods,
    })
}

impl NaiveBayesModel {
    /// Posterior distribution for one sample, log-space throughout.
    pub fn predict(&self, s: &SoilSample) -> ClassDistribution {
        let mut log_post = [0.0f64; CLASS_COUNT];
        for class_index in 0..CLASS_COUNT {
            let mut lp = self.class_priors[class_index].ln();
            for attr in Attribute::ALL {
                lp += self.likelihoods[class_index][attr.index()].log_density(s.value(attr));
            }
            log_post[class_index] = lp;
        }
        let max = log_post.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut probs = [0.0f64; CLASS_COUNT];
        let mut total = 0.0;
        for (p, lp) in probs.iter_mut().zip(log_post.iter()) {
            *p = (lp - max).exp();
            total += *p;
        }
        for p in probs.iter_mut() {
            *p /= total;
        }
        ClassDistribution::new(probs)
    }
}

/// Free-function form of [`NaiveBayesModel::predict`].
pub fn nb_predict(m: &NaiveBayesModel, s: &SoilSample) -> ClassDistribution {
    m.predict(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::FertilityClass;

    fn row(oc: f64, k: f64) -> SoilSample {
        SoilSample::new([7.0, 1.0, oc, 1.0, k, 1.0, 1.0, 1.0, 1.0]).unwrap()
    }

    fn two_class_fixture() -> Dataset {
        use FertilityClass::{High, Low};
        let rows = vec![
            row(0.2, 80.0),
            row(0.3, 100.0),
            row(0.4, 120.0),
            row(1.0, 280.0),
            row(1.1, 300.0),
            row(1.2, 320.0),
        ];
        Dataset::new(
            rows,
            Some(vec![Low, Low, Low, High, High, High]),
            "test",
        )
        .unwrap()
    }

    #[test]
    fn single_class_priors_follow_laplace_smoothing() {
        let rows = vec![row(0.5, 100.0); 4];
        let d = Dataset::new(rows, Some(vec![FertilityClass::High; 4]), "test").unwrap();
        let m = train_naive_bayes(&d).unwrap();
        assert!((m.class_priors[FertilityClass::High.index()] - 5.0 / 10.0).abs() < 1e-12);
        for class in FertilityClass::ALL {
            if class != FertilityClass::High {
                assert!((m.class_priors[class.index()] - 1.0 / 10.0).abs() < 1e-12);
            }
        }
        assert!((m.class_priors.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_attribute_keeps_a_positive_floored_variance() {
        let d = two_class_fixture();
        let m = train_naive_bayes(&d).unwrap();
        // Ph is constant in the fixture; its variance must be the floor,
        // not zero.
        let v = m.likelihoods[FertilityClass::Low.index()][Attribute::Ph.index()].variance;
        assert!(v > 0.0);
        assert!(v <= 1e-9 * 1e-11);
    }

    #[test]
    fn fixture_means_and_variances_match_hand_stats() {
        let d = two_class_fixture();
        let m = train_naive_bayes(&d).unwrap();
        let low = &m.likelihoods[FertilityClass::Low.index()];
        // OC in the Low class: {0.2, 0.3, 0.4} -> mean 0.3, var 0.01.
        assert!((low[Attribute::Oc.index()].mean - 0.3).abs() < 1e-12);
        assert!((low[Attribute::Oc.index()].variance - 0.01).abs() < 1e-12);
        // K in the Low class: {80, 100, 120} -> mean 100, var 400.
        assert!((low[Attribute::K.index()].mean - 100.0).abs() < 1e-12);
        assert!((low[Attribute::K.index()].variance - 400.0).abs() < 1e-12);
    }

    #[test]
    fn equidistant_sample_splits_mass_between_symmetric_classes() {
        // Hand-built two-class model: equal priors, mirrored means, equal
        // variances; the four other classes carry zero prior.
        let neutral = [Gaussian {
            mean: 0.0,
            variance: 1.0,
        }; ATTRIBUTE_COUNT];
        let mut low = neutral;
        let mut high = neutral;
        low[Attribute::Oc.index()] = Gaussian {
            mean: 0.3,
            variance: 0.01,
        };
        high[Attribute::Oc.index()] = Gaussian {
            mean: 1.1,
            variance: 0.01,
        };
        let mut priors = [0.0; CLASS_COUNT];
        priors[FertilityClass::Low.index()] = 0.5;
        priors[FertilityClass::High.index()] = 0.5;
        let m = NaiveBayesModel {
            class_priors: priors,
            likelihoods: vec![neutral, low, neutral, neutral, high, neutral],
        };
        // OC 0.7 is exactly halfway between the class means.
        let p = m.predict(&row(0.7, 0.0));
        assert!((p.probability(FertilityClass::Low) - 0.5).abs() < 1e-12);
        assert!((p.probability(FertilityClass::High) - 0.5).abs() < 1e-12);
        assert!((p.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sample_at_a_class_mean_is_dominated_by_that_class() {
        use FertilityClass::{High, Low};
        // Tight within-class spread so the informed densities at a class
        // mean tower over everything else.
        let rows = vec![
            row(0.29, 99.0),
            row(0.30, 100.0),
            row(0.31, 101.0),
            row(1.09, 299.0),
            row(1.10, 300.0),
            row(1.11, 301.0),
        ];
        let d = Dataset::new(rows, Some(vec![Low, Low, Low, High, High, High]), "test").unwrap();
        let m = train_naive_bayes(&d).unwrap();
        let p = m.predict(&row(0.3, 100.0));
        assert!(p.probability(FertilityClass::Low) > 0.99, "{p:?}");
        assert_eq!(p.argmax(), FertilityClass::Low);
    }

    #[test]
    fn log_space_posterior_matches_direct_bayes_quotient() {
        let d = two_class_fixture();
        let m = train_naive_bayes(&d).unwrap();
        let s = row(0.5, 150.0);
        let p = m.predict(&s);
        // Direct-probability oracle: density products without logs.
        let mut direct = [0.0f64; CLASS_COUNT];
        for ci in 0..CLASS_COUNT {
            let mut mass = m.class_priors[ci];
            for attr in Attribute::ALL {
                let g = m.likelihoods[ci][attr.index()];
                let x = s.value(attr);
                mass *= (-((x - g.mean).powi(2)) / (2.0 * g.variance)).exp()
                    / (std::f64::consts::TAU * g.variance).sqrt();
            }
            direct[ci] = mass;
        }
        let total: f64 = direct.iter().sum();
        for ci in 0..CLASS_COUNT {
            assert!(
                (p.probabilities()[ci] - direct[ci] / total).abs() < 1e-9,
                "class {ci}: {} vs {}",
                p.probabilities()[ci],
                direct[ci] / total
            );
        }
    }

    #[test]
    fn empty_or_unlabeled_datasets_error() {
        let d = Dataset::new(vec![], Some(vec![]), "test").unwrap();
        assert!(matches!(
            train_naive_bayes(&d).unwrap_err(),
            ClassifierError::EmptyDataset
        ));
        let d = Dataset::new(vec![row(0.5, 100.0)], None, "test").unwrap();
        assert!(matches!(
            train_naive_bayes(&d).unwrap_err(),
            ClassifierError::Unlabeled
        ));
    }
}
