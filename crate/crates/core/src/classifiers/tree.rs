//! C4.5-style binary decision tree.
//!
//! Growth: recursive best-gain-ratio splits over candidate thresholds at
//! the midpoints between consecutive distinct sorted values, with both
//! children required to hold at least `min_leaf` instances. Recursion
//! stops on purity, node size below `2 * min_leaf`, or no split with
//! positive information gain.
//!
//! Pruning: bottom-up subtree replacement using the pessimistic error
//! estimate — the binomial upper confidence bound at `prune_confidence` —
//! replacing a subtree whenever the collapsed leaf's estimate does not
//! exceed the subtree's. Ties at a threshold route left (`<=`).

use serde::{Deserialize, Serialize};

use crate::data::{Attribute, Dataset, FertilityClass, SoilSample, CLASS_COUNT};

use super::{class_counts, entropy, ClassDistribution, ClassifierError};

/// Training parameters mirroring the standard tool defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct C45Params {
    pub min_leaf: usize,
    pub prune_confidence: f64,
    pub pruning: bool,
}

impl Default for C45Params {
    fn default() -> Self {
        C45Params {
            min_leaf: 2,
            prune_confidence: 0.25,
            pruning: true,
        }
    }
}

/// A tree node: threshold splits route `value <= threshold` left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Internal {
        attribute: Attribute,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
    Leaf {
        /// Training class counts at this leaf.
        counts: [usize; CLASS_COUNT],
        majority: FertilityClass,
        count: usize,
        /// Pessimistic error estimate used during pruning.
        error_estimate: f64,
    },
}

impl Node {
    fn node_count(&self) -> usize {
        match self {
            Node::Leaf { .. } => 1,
            Node::Internal { left, right, .. } => 1 + left.node_count() + right.node_count(),
        }
    }

    fn pessimistic_errors(&self) -> f64 {
        match self {
            Node::Leaf { error_estimate, .. } => *error_estimate,
            Node::Internal { left, right, .. } => {
                left.pessimistic_errors() + right.pessimistic_errors()
            }
        }
    }
}

/// Trained decision tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub root: Node,
    pub training_count: usize,
}

impl DecisionTree {
    /// Route a sample to its leaf and return the Laplace-smoothed leaf
    /// distribution.
    pub fn predict(&self, s: &SoilSample) -> ClassDistribution {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { counts, .. } => return ClassDistribution::laplace(counts),
                Node::Internal {
                    attribute,
                    threshold,
                    left,
                    right,
                } => {
                    node = if s.value(*attribute) <= *threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    /// Number of nodes, internal and leaf.
    pub fn node_count(&self) -> usize {
        self.root.node_count()
    }

    /// Sum of leaf pessimistic error estimates.
    pub fn pessimistic_errors(&self) -> f64 {
        self.root.pessimistic_errors()
    }
}

/// Free-function form of [`DecisionTree::predict`].
pub fn c45_predict(t: &DecisionTree, s: &SoilSample) -> ClassDistribution {
    t.predict(s)
}

/// Inverse of the standard normal CDF (Acklam's rational approximation,
/// absolute error below 1.2e-9).
fn normal_quantile(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Pessimistic error count for a node with `n` instances and `e` observed
/// errors: `e` plus the one-sided binomial upper-bound surplus at the
/// given confidence.
fn pessimistic_error_count(n: f64, e: f64, confidence: f64) -> f64 {
    if n <= 0.0 {
        return 0.0;
    }
    if e < 0.5 {
        // No observed errors: n * (1 - CF^(1/n)).
        return e + n * (1.0 - confidence.powf(1.0 / n));
    }
    if e >= n {
        return n;
    }
    let z = normal_quantile(1.0 - confidence);
    let f = e / n;
    let upper = (f
        + z * z / (2.0 * n)
        + z * (f / n - f * f / n + z * z / (4.0 * n * n)).sqrt())
        / (1.0 + z * z / n);
    (upper * n).max(e)
}

struct Builder<'a> {
    rows: &'a [SoilSample],
    labels: &'a [FertilityClass],
    params: C45Params,
}

impl Builder<'_> {
    fn leaf(&self, indices: &[usize]) -> Node {
        let labels: Vec<FertilityClass> = indices.iter().map(|&i| self.labels[i]).collect();
        let counts = class_counts(&labels);
        let majority = majority_class(&counts);
        let count = indices.len();
        let errors = (count - counts[majority.index()]) as f64;
        Node::Leaf {
            counts,
            majority,
            count,
            error_estimate: pessimistic_error_count(
                count as f64,
                errors,
                self.params.prune_confidence,
            ),
        }
    }

    fn grow(&self, indices: &[usize]) -> Node {
        let counts = {
            let labels: Vec<FertilityClass> = indices.iter().map(|&i| self.labels[i]).collect();
            class_counts(&labels)
        };
        let total = indices.len();
        let pure = counts.iter().any(|&c| c == total);
        if pure || total < 2 * self.params.min_leaf {
            return self.leaf(indices);
        }

        let parent_entropy = entropy(&counts).expect("non-empty node");
        let mut best: Option<(Attribute, f64, f64)> = None; // attr, threshold, gain_ratio

        for attr in Attribute::ALL {
            // Sort once per attribute, then sweep boundaries between
            // distinct values with cumulative class counts.
            let mut order: Vec<usize> = indices.to_vec();
            order.sort_by(|&a, &b| {
                self.rows[a]
                    .value(attr)
                    .partial_cmp(&self.rows[b].value(attr))
                    .unwrap()
            });
            let mut left_counts = [0usize; CLASS_COUNT];
            for (pos, &i) in order.iter().enumerate().take(total - 1) {
                left_counts[self.labels[i].index()] += 1;
                let v = self.rows[i].value(attr);
                let next = self.rows[order[pos + 1]].value(attr);
                if next <= v {
                    continue; // not a boundary between distinct values
                }
                let left_n = pos + 1;
                let right_n = total - left_n;
                if left_n < self.params.min_leaf || right_n < self.params.min_leaf {
                    continue;
                }
                let mut right_counts = [0usize; CLASS_COUNT];
                for c in 0..CLASS_COUNT {
                    right_counts[c] = counts[c] - left_counts[c];
                }
                let h_left = entropy(&left_counts).unwrap();
                let h_right = entropy(&right_counts).unwrap();
                let n = total as f64;
                let info_gain = parent_entropy
                    - (left_n as f64 / n) * h_left
                    - (right_n as f64 / n) * h_right;
                if info_gain <= 1e-12 {
                    continue;
                }
                let split_info = entropy(&[left_n, right_n]).unwrap();
                let ratio = info_gain / split_info;
                if best.map_or(true, |(.., b)| ratio > b) {
                    best = Some((attr, (v + next) / 2.0, ratio));
                }
            }
        }

        let Some((attribute, threshold, _)) = best else {
            return self.leaf(indices);
        };

        let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
            .iter()
            .partition(|&&i| self.rows[i].value(attribute) <= threshold);
        let left = self.grow(&left_idx);
        let right = self.grow(&right_idx);

        let node = Node::Internal {
            attribute,
            threshold,
            left: Box::new(left),
            right: Box::new(right),
        };

        if self.params.pruning {
            // Subtree replacement: collapse when the leaf estimate does
            // not exceed the subtree estimate.
            let as_leaf = self.leaf(indices);
            let leaf_errors = match &as_leaf {
                Node::Leaf { error_estimate, .. } => *error_estimate,
                Node::Internal { .. } => unreachable!(),
            };
            if leaf_errors <= node.pessimistic_errors() {
                return as_leaf;
            }
        }
        node
    }
}

fn majority_class(counts: &[usize; CLASS_COUNT]) -> FertilityClass {
    let mut best = FertilityClass::VeryLow;
    let mut best_count = counts[0];
    for class in FertilityClass::ALL {
        if counts[class.index()] > best_count {
            best = class;
            best_count = counts[class.index()];
        }
    }
    best
}

/// Grow (and by default prune) a tree on a labeled dataset.
pub fn train_c45(d: &Dataset, params: &C45Params) -> Result<DecisionTree, ClassifierError> {
    let (rows, labels) = d.labeled().map_err(|_| ClassifierError::Unlabeled)?;
    if rows.is_empty() {
        return Err(ClassifierError::EmptyDataset);
    }
    let builder = Builder {
        rows,
        labels,
        params: *params,
    };
    let indices: Vec<usize> = (0..rows.len()).collect();
    Ok(DecisionTree {
        root: builder.grow(&indices),
        training_count: rows.len(),
    })
}
