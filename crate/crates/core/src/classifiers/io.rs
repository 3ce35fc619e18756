//! Versioned JSON serialization for trained models.
//!
//! Every model kind shares one envelope: `{"format_version": 1, "model":
//! {"kind": "...", ...}}`. Floating-point fields round-trip exactly, so a
//! reloaded model reproduces its predictions bit for bit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::regressors::LinearModel;

use super::TrainedClassifier;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error("model json: {0}")]
    Json(String),
    #[error("unsupported model format version {0}")]
    UnsupportedVersion(u32),
}

/// Any serializable trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Model {
    Classifier { classifier: TrainedClassifier },
    Regressor { regressor: LinearModel },
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    format_version: u32,
    model: Model,
}

/// Serialize a model inside the versioned envelope.
pub fn to_json(model: &Model) -> String {
    serde_json::to_string_pretty(&Envelope {
        format_version: FORMAT_VERSION,
        model: model.clone(),
    })
    .expect("models always serialize")
}

/// Parse a versioned model envelope.
pub fn from_json(text: &str) -> Result<Model, ModelIoError> {
    let envelope: Envelope =
        serde_json::from_str(text).map_err(|e| ModelIoError::Json(e.to_string()))?;
    if envelope.format_version != FORMAT_VERSION {
        return Err(ModelIoError::UnsupportedVersion(envelope.format_version));
    }
    Ok(envelope.model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::ClassifierSpec;
    use crate::data::{Attribute, Dataset, FertilityClass, SoilSample};

    fn small_labeled() -> Dataset {
        let rows: Vec<SoilSample> = (0..12)
            .map(|i| {
                let oc = 0.1 + 0.1 * i as f64;
                SoilSample::new([6.0, 1.0, oc, 5.0, 150.0, 4.0, 2.0, 3.0, 1.0]).unwrap()
            })
            .collect();
        let labels = (0..12)
            .map(|i| {
                if i < 6 {
                    FertilityClass::Low
                } else {
                    FertilityClass::High
                }
            })
            .collect();
        Dataset::new(rows, Some(labels), "test").unwrap()
    }

    #[test]
    fn classifier_round_trip_preserves_predictions_bit_exactly() {
        let d = small_labeled();
        for spec in [
            ClassifierSpec::Majority,
            ClassifierSpec::NaiveBayes,
            ClassifierSpec::C45(Default::default()),
            ClassifierSpec::Ripper(Default::default()),
        ] {
            let trained = spec.train(&d).unwrap();
            let json = to_json(&Model::Classifier {
                classifier: trained.clone(),
            });
            let Model::Classifier { classifier: back } = from_json(&json).unwrap() else {
                panic!("wrong kind");
            };
            for row in d.rows() {
                let a = trained.predict(row);
                let b = back.predict(row);
                for (x, y) in a.probabilities().iter().zip(b.probabilities()) {
                    assert_eq!(x.to_bits(), y.to_bits(), "{}", spec.tag());
                }
            }
        }
    }

    #[test]
    fn regressor_round_trip_preserves_predictions_bit_exactly() {
        let d = small_labeled();
        let m = crate::regressors::fit_simple(&d, Attribute::P).unwrap();
        let json = to_json(&Model::Regressor {
            regressor: m.clone(),
        });
        let Model::Regressor { regressor: back } = from_json(&json).unwrap() else {
            panic!("wrong kind");
        };
        for row in d.rows() {
            assert_eq!(m.predict(row).to_bits(), back.predict(row).to_bits());
        }
    }

    #[test]
    fn version_mismatch_is_rejected() {
        let text = r#"{"format_version": 99, "model": {"kind": "Regressor", "regressor": {
            "target": "P", "retained": [], "coefficients": [], "intercept": 1.0,
            "fit_meta": {"algorithm": "ols", "build_time_s": 0.0, "objective": 0.0}}}}"#;
        assert!(matches!(
            from_json(text).unwrap_err(),
            ModelIoError::UnsupportedVersion(99)
        ));
    }
}
