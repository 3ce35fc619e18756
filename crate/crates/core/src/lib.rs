//! Data-mining toolkit for laboratory soil samples.
//!
//! The crate covers the full pipeline from raw soil-test records to
//! comparative reports:
//!
//! * [`data`] — the nine-attribute sample schema, CSV ingestion with
//!   validation and imputation, and a seeded synthetic generator.
//! * [`rules`] — a declarative rule engine that rates each attribute
//!   against threshold bands and maps the aggregate score to one of six
//!   ordered fertility classes.
//! * [`classifiers`] — from-scratch Gaussian Naive Bayes, a C4.5-style
//!   decision tree, and a RIPPER-style rule learner.
//! * [`regressors`] — ordinary least squares (with backward attribute
//!   elimination), least-median-of-squares, and single-attribute simple
//!   regression for predicting an untested nutrient.
//! * [`eval`] — stratified k-fold cross-validation, classification and
//!   regression metrics, and comparison-table rendering.
//!
//! All randomized procedures are driven by ChaCha8 streams seeded from a
//! caller-supplied 64-bit seed, so identical inputs reproduce identical
//! models, folds, and reports.

pub mod classifiers;
pub mod data;
pub mod eval;
pub mod regressors;
pub mod rules;

pub use data::{Attribute, Dataset, FertilityClass, SoilSample};
