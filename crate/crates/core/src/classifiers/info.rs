//! Entropy and gain-ratio primitives shared by the tree learner.

use crate::data::{Attribute, Dataset};

use super::{class_counts, ClassifierError};

/// Shannon entropy in bits of a count vector.
///
/// Zero counts contribute nothing; at least one count must be positive.
pub fn entropy(counts: &[usize]) -> Result<f64, ClassifierError> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(ClassifierError::AllZero);
    }
    let total = total as f64;
    let mut h = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / total;
            h -= p * p.log2();
        }
    }
    Ok(h)
}

/// Scores of one binary threshold split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitScore {
    pub info_gain: f64,
    pub split_info: f64,
    pub gain_ratio: f64,
}

/// Split scores for `attribute <= threshold` vs `> threshold` on a labeled
/// dataset. Both sides must be non-empty.
pub fn gain_ratio(
    d: &Dataset,
    attribute: Attribute,
    threshold: f64,
) -> Result<SplitScore, ClassifierError> {
    let (rows, labels) = d.labeled().map_err(|_| ClassifierError::Unlabeled)?;
    if rows.is_empty() {
        return Err(ClassifierError::EmptyDataset);
    }
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (row, &label) in rows.iter().zip(labels.iter()) {
        if row.value(attribute) <= threshold {
            left.push(label);
        } else {
            right.push(label);
        }
    }
    if left.is_empty() || right.is_empty() {
        return Err(ClassifierError::DegenerateSplit);
    }
    let parent = entropy(&class_counts(labels))?;
    let h_left = entropy(&class_counts(&left))?;
    let h_right = entropy(&class_counts(&right))?;
    let n = rows.len() as f64;
    let wl = left.len() as f64 / n;
    let wr = right.len() as f64 / n;
    let info_gain = parent - (wl * h_left + wr * h_right);
    let split_info = entropy(&[left.len(), right.len()])?;
    Ok(SplitScore {
        info_gain,
        split_info,
        gain_ratio: info_gain / split_info,
    })
}
