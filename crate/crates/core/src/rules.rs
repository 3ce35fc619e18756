//! Rule-based fertility classification.
//!
//! A [`RuleSet`] rates each participating attribute against an ordered
//! list of threshold bands, aggregates the ratings into a weighted-mean
//! fertility index, and maps the index through five ascending cuts to one
//! of the six [`FertilityClass`] levels.
//!
//! Bands and cuts are half-open: a value selects the first band whose
//! upper bound it is strictly below, and an index exactly equal to a cut
//! belongs to the higher class. Every valid sample therefore receives
//! exactly one class.
//!
//! The repository ships a default rule file (see [`default_rules`]). It is
//! illustrative — thresholds in the style of soil-testing rating manuals —
//! and is meant to be replaced by a laboratory's own rule file.

use serde::Deserialize;
use thiserror::Error;

use crate::data::{Attribute, DataError, Dataset, FertilityClass, SoilSample};

/// Errors raised while parsing or validating a rule file.
#[derive(Debug, Error)]
pub enum RuleError {
    #[error("rule file syntax: {0}")]
    Syntax(String),
    #[error("unknown attribute {0:?}")]
    UnknownAttribute(String),
    #[error("more than one rule for attribute {0}")]
    DuplicateAttribute(Attribute),
    #[error("bands for {0} are not strictly ascending and ending at infinity")]
    BandsNotAscending(Attribute),
    #[error("bad cuts: {0}")]
    BadCuts(String),
    #[error("bad weight for {0}: must be finite and non-negative")]
    BadWeight(Attribute),
    #[error("rule set must contain at least one rule with positive weight")]
    NoPositiveWeight,
}

/// One rating band: values strictly below `upper` score `rating`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    /// Exclusive upper bound; `f64::INFINITY` for the final band.
    pub upper: f64,
    pub rating: i64,
}

/// Rating rule for a single attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeRule {
    pub attribute: Attribute,
    pub weight: f64,
    /// Bands sorted strictly ascending by upper bound; the last band's
    /// bound is infinity, so every value lands in exactly one band.
    pub bands: Vec<Band>,
}

impl AttributeRule {
    /// Rating of the band containing the value.
    pub fn rating(&self, value: f64) -> i64 {
        self.bands
            .iter()
            .find(|b| value < b.upper)
            .expect("final band is unbounded")
            .rating
    }
}

/// A validated set of attribute rules plus class cuts.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleSet {
    rules: Vec<AttributeRule>,
    cuts: [f64; 5],
}

#[derive(Deserialize)]
struct BandFile {
    below: Option<f64>,
    rating: i64,
}

#[derive(Deserialize)]
struct RuleFile {
    attribute: String,
    weight: f64,
    bands: Vec<BandFile>,
}

#[derive(Deserialize)]
struct RuleSetFile {
    rules: Vec<RuleFile>,
    cuts: Vec<f64>,
}

impl RuleSet {
    pub fn rules(&self) -> &[AttributeRule] {
        &self.rules
    }

    pub fn cuts(&self) -> &[f64; 5] {
        &self.cuts
    }

    /// Validate parts assembled in code; rule files go through
    /// [`parse_rules`], which reuses this.
    pub fn new(rules: Vec<AttributeRule>, cuts: [f64; 5]) -> Result<RuleSet, RuleError> {
        let mut seen: Vec<Attribute> = Vec::new();
        let mut total_weight = 0.0;
        for rule in &rules {
            if seen.contains(&rule.attribute) {
                return Err(RuleError::DuplicateAttribute(rule.attribute));
            }
            seen.push(rule.attribute);
            if !rule.weight.is_finite() || rule.weight < 0.0 {
                return Err(RuleError::BadWeight(rule.attribute));
            }
            total_weight += rule.weight;
            let ascending = rule.bands.windows(2).all(|w| w[0].upper < w[1].upper);
            let covered = rule
                .bands
                .last()
                .map(|b| b.upper == f64::INFINITY)
                .unwrap_or(false);
            if !ascending || !covered {
                return Err(RuleError::BandsNotAscending(rule.attribute));
            }
        }
        if total_weight <= 0.0 {
            return Err(RuleError::NoPositiveWeight);
        }
        if !cuts.windows(2).all(|w| w[0] < w[1]) || cuts.iter().any(|c| !c.is_finite()) {
            return Err(RuleError::BadCuts(
                "cuts must be five finite, strictly ascending values".into(),
            ));
        }
        Ok(RuleSet { rules, cuts })
    }
}

/// Parse and validate a JSON rule file.
///
/// Schema: `{"rules": [{"attribute": "OC", "weight": 1.0, "bands":
/// [{"below": 0.4, "rating": 0}, {"below": null, "rating": 10}]}],
/// "cuts": [c1, c2, c3, c4, c5]}` where `"below": null` is +infinity.
pub fn parse_rules(text: &str) -> Result<RuleSet, RuleError> {
    let file: RuleSetFile =
        serde_json::from_str(text).map_err(|e| RuleError::Syntax(e.to_string()))?;
    let mut rules = Vec::with_capacity(file.rules.len());
    for r in file.rules {
        let attribute = Attribute::parse(&r.attribute)
            .ok_or_else(|| RuleError::UnknownAttribute(r.attribute.clone()))?;
        let bands = r
            .bands
            .iter()
            .map(|b| Band {
                upper: b.below.unwrap_or(f64::INFINITY),
                rating: b.rating,
            })
            .collect();
        rules.push(AttributeRule {
            attribute,
            weight: r.weight,
            bands,
        });
    }
    if file.cuts.len() != 5 {
        return Err(RuleError::BadCuts(format!(
            "expected 5 cuts, got {}",
            file.cuts.len()
        )));
    }
    let cuts = [
        file.cuts[0],
        file.cuts[1],
        file.cuts[2],
        file.cuts[3],
        file.cuts[4],
    ];
    RuleSet::new(rules, cuts)
}

/// The default rule file shipped with the repository (illustrative).
pub const DEFAULT_RULES_JSON: &str = include_str!("../assets/default_rules.json");

/// Parsed form of [`DEFAULT_RULES_JSON`].
pub fn default_rules() -> RuleSet {
    parse_rules(DEFAULT_RULES_JSON).expect("shipped rule file is valid")
}

/// Weighted-mean fertility index of a sample.
///
/// `index = sum(weight * band rating) / sum(weight)` over all rules.
pub fn fertility_index(rs: &RuleSet, s: &SoilSample) -> f64 {
    let mut weighted = 0.0;
    let mut total = 0.0;
    for rule in &rs.rules {
        weighted += rule.weight * rule.rating(s.value(rule.attribute)) as f64;
        total += rule.weight;
    }
    weighted / total
}

/// Map an index to its class: level `i` covers `cuts[i-1] <= index < cuts[i]`.
pub fn classify_index(rs: &RuleSet, index: f64) -> FertilityClass {
    let level = rs.cuts.iter().filter(|&&c| c <= index).count();
    FertilityClass::from_index(level).expect("5 cuts give at most level 5")
}

/// Classify one sample through the index.
pub fn classify_sample(rs: &RuleSet, s: &SoilSample) -> FertilityClass {
    classify_index(rs, fertility_index(rs, s))
}

/// Label every row of a dataset, replacing any existing labels.
pub fn label_dataset(rs: &RuleSet, d: &Dataset) -> Result<Dataset, DataError> {
    let labels = d.rows().iter().map(|r| classify_sample(rs, r)).collect();
    d.with_labels(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_rules() -> &'static str {
        r#"{
            "rules": [
                {"attribute": "OC", "weight": 1.0, "bands": [
                    {"below": 0.4, "rating": 0},
                    {"below": null, "rating": 10}
                ]}
            ],
            "cuts": [1, 2, 3, 4, 5]
        }"#
    }

    fn fixture_sample() -> SoilSample {
        SoilSample::new([6.5, 1.2, 0.8, 12.0, 200.0, 5.0, 2.0, 3.0, 1.0]).unwrap()
    }

    #[test]
    fn parses_minimal_rule_file() {
        let rs = parse_rules(minimal_rules()).unwrap();
        assert_eq!(rs.rules().len(), 1);
        assert_eq!(rs.rules()[0].attribute, Attribute::Oc);
        assert_eq!(rs.rules()[0].bands[1].upper, f64::INFINITY);
        assert_eq!(*rs.cuts(), [1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn duplicate_attribute_is_its_own_error() {
        let text = r#"{
            "rules": [
                {"attribute": "OC", "weight": 1.0, "bands": [{"below": null, "rating": 1}]},
                {"attribute": "OC", "weight": 1.0, "bands": [{"below": null, "rating": 2}]}
            ],
            "cuts": [1, 2, 3, 4, 5]
        }"#;
        match parse_rules(text).unwrap_err() {
            RuleError::DuplicateAttribute(a) => assert_eq!(a, Attribute::Oc),
            other => panic!("expected DuplicateAttribute, got {other:?}"),
        }
    }

    #[test]
    fn unsorted_bands_are_rejected() {
        let text = r#"{
            "rules": [
                {"attribute": "K", "weight": 1.0, "bands": [
                    {"below": 5, "rating": 1},
                    {"below": 3, "rating": 2},
                    {"below": null, "rating": 3}
                ]}
            ],
            "cuts": [1, 2, 3, 4, 5]
        }"#;
        match parse_rules(text).unwrap_err() {
            RuleError::BandsNotAscending(a) => assert_eq!(a, Attribute::K),
            other => panic!("expected BandsNotAscending, got {other:?}"),
        }
    }

    #[test]
    fn missing_final_infinity_band_is_rejected() {
        let text = r#"{
            "rules": [
                {"attribute": "K", "weight": 1.0, "bands": [{"below": 5, "rating": 1}]}
            ],
            "cuts": [1, 2, 3, 4, 5]
        }"#;
        assert!(matches!(
            parse_rules(text).unwrap_err(),
            RuleError::BandsNotAscending(Attribute::K)
        ));
    }

    #[test]
    fn unknown_attribute_is_rejected() {
        let text = r#"{
            "rules": [
                {"attribute": "N", "weight": 1.0, "bands": [{"below": null, "rating": 1}]}
            ],
            "cuts": [1, 2, 3, 4, 5]
        }"#;
        match parse_rules(text).unwrap_err() {
            RuleError::UnknownAttribute(n) => assert_eq!(n, "N"),
            other => panic!("expected UnknownAttribute, got {other:?}"),
        }
    }

    #[test]
    fn wrong_cut_count_is_rejected() {
        let text = r#"{
            "rules": [
                {"attribute": "OC", "weight": 1.0, "bands": [{"below": null, "rating": 1}]}
            ],
            "cuts": [1, 2, 3]
        }"#;
        assert!(matches!(parse_rules(text).unwrap_err(), RuleError::BadCuts(_)));
    }

    #[test]
    fn malformed_json_is_a_syntax_error() {
        assert!(matches!(
            parse_rules("{ not json").unwrap_err(),
            RuleError::Syntax(_)
        ));
    }

    #[test]
    fn single_rule_index_is_the_band_rating() {
        let rs = parse_rules(minimal_rules()).unwrap();
        // OC = 0.1 sits below the first bound.
        let s = SoilSample::new([6.5, 1.2, 0.1, 12.0, 200.0, 5.0, 2.0, 3.0, 1.0]).unwrap();
        assert_eq!(fertility_index(&rs, &s), 0.0);
        // OC = 0.8 lands in the unbounded band.
        assert_eq!(fertility_index(&rs, &fixture_sample()), 10.0);
    }

    #[test]
    fn index_is_the_weighted_mean_of_ratings() {
        let rules = vec![
            AttributeRule {
                attribute: Attribute::Oc,
                weight: 1.0,
                bands: vec![Band {
                    upper: f64::INFINITY,
                    rating: 0,
                }],
            },
            AttributeRule {
                attribute: Attribute::K,
                weight: 3.0,
                bands: vec![Band {
                    upper: f64::INFINITY,
                    rating: 8,
                }],
            },
        ];
        let rs = RuleSet::new(rules, [1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(fertility_index(&rs, &fixture_sample()), 6.0);
    }

    #[test]
    fn default_rules_index_matches_hand_trace() {
        let rs = default_rules();
        // Band lookups for the fixture, rule by rule:
        //   Ph 6.5 -> 10 (w 1.5), EC 1.2 -> 8 (w 1.5), OC 0.8 -> 9 (w 2),
        //   P 12 -> 7 (w 2), K 200 -> 5 (w 2), Fe 5 -> 5, Zn 2 -> 5,
        //   Mn 3 -> 5, Cu 1 -> 5 (w 1 each).
        // Weighted sum 89, total weight 13.
        let expected = 89.0 / 13.0;
        assert!((fertility_index(&rs, &fixture_sample()) - expected).abs() < 1e-12);
    }

    #[test]
    fn index_below_first_cut_is_very_low() {
        let rs = parse_rules(minimal_rules()).unwrap();
        assert_eq!(classify_index(&rs, 0.5), FertilityClass::VeryLow);
    }

    #[test]
    fn index_equal_to_a_cut_takes_the_higher_class() {
        let rs = parse_rules(minimal_rules()).unwrap();
        assert_eq!(classify_index(&rs, 3.0), FertilityClass::ModeratelyHigh);
    }

    #[test]
    fn sweeping_across_cuts_walks_the_classes_in_order() {
        let rs = parse_rules(minimal_rules()).unwrap();
        let indices = [0.9, 1.1, 2.1, 3.1, 4.1, 5.1];
        let classes: Vec<FertilityClass> =
            indices.iter().map(|&i| classify_index(&rs, i)).collect();
        assert_eq!(classes, FertilityClass::ALL.to_vec());
    }

    #[test]
    fn labeling_an_empty_dataset_gives_empty_labels() {
        let d = Dataset::new(vec![], None, "test").unwrap();
        let labeled = label_dataset(&default_rules(), &d).unwrap();
        assert_eq!(labeled.labels().unwrap().len(), 0);
    }

    #[test]
    fn labeling_one_row_matches_pointwise_classification() {
        let d = Dataset::new(vec![fixture_sample()], None, "test").unwrap();
        let labeled = label_dataset(&default_rules(), &d).unwrap();
        assert_eq!(
            labeled.labels().unwrap()[0],
            classify_sample(&default_rules(), &fixture_sample())
        );
    }

    #[test]
    fn labeling_matches_a_brute_force_per_row_loop() {
        let cfg = crate::data::SynthConfig {
            n: 100,
            ..Default::default()
        };
        let d = crate::data::generate_synthetic(&cfg).unwrap();
        let rs = default_rules();
        let labeled = label_dataset(&rs, &d).unwrap();
        let mut hist = [0usize; 6];
        for row in d.rows() {
            hist[classify_sample(&rs, row).index()] += 1;
        }
        let mut got = [0usize; 6];
        for l in labeled.labels().unwrap() {
            got[l.index()] += 1;
        }
        assert_eq!(hist, got);
    }
}
