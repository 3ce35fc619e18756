//! RIPPER-style ordered rule-list learner.
//!
//! Classes are processed in ascending training frequency; the most
//! frequent class becomes the trailing default. Per class, rules are grown
//! greedily on a grow split (the numeric condition with the best FOIL
//! gain, until no negatives are covered), pruned on a prune split by
//! deleting trailing conditions to maximize `(p - n) / (p + n)`, and
//! accepted until the ruleset description length exceeds the best seen so
//! far by 64 bits or a rule's error on the prune split passes 50%. Each
//! optimization pass revisits every rule with a freshly grown replacement
//! and a revision variant, keeping whichever gives the smallest
//! description length, then covers residual positives with new rules.
//!
//! The seed drives every grow/prune shuffle, so training is a pure
//! function of (dataset, params).

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::data::{Attribute, Dataset, FertilityClass, SoilSample, CLASS_COUNT};

use super::{class_counts, ClassDistribution, ClassifierError};

/// Bits of description-length slack before rule growth stops.
const MDL_SURPLUS: f64 = 64.0;

/// Training parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RipperParams {
    /// Grow/prune split granularity: the prune side gets 1/folds of the
    /// data, the grow side the rest.
    pub folds: usize,
    /// Optimization passes over the learned rules.
    pub optimizations: usize,
    pub seed: u64,
}

impl Default for RipperParams {
    fn default() -> Self {
        RipperParams {
            folds: 3,
            optimizations: 2,
            seed: 42,
        }
    }
}

/// Direction of a numeric condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CondOp {
    Le,
    Ge,
}

/// One numeric condition on an attribute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub attribute: Attribute,
    pub op: CondOp,
    pub value: f64,
}

impl Condition {
    pub fn matches(&self, s: &SoilSample) -> bool {
        let v = s.value(self.attribute);
        match self.op {
            CondOp::Le => v <= self.value,
            CondOp::Ge => v >= self.value,
        }
    }
}

/// Internal rule form used during learning.
#[derive(Debug, Clone, PartialEq)]
struct RawRule {
    conditions: Vec<Condition>,
    class: FertilityClass,
}

impl RawRule {
    fn matches(&self, s: &SoilSample) -> bool {
        self.conditions.iter().all(|c| c.matches(s))
    }
}

/// A rule with its training-precision statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnedRule {
    pub conditions: Vec<Condition>,
    pub class: FertilityClass,
    /// Training instances that reached this rule (in list order) and
    /// matched it.
    pub matched: usize,
    pub correct: usize,
    /// Laplace-smoothed training precision `(correct+1)/(matched+2)`.
    pub confidence: f64,
}

impl LearnedRule {
    pub fn matches(&self, s: &SoilSample) -> bool {
        self.conditions.iter().all(|c| c.matches(s))
    }
}

/// An ordered rule list with a trailing default class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleList {
    pub rules: Vec<LearnedRule>,
    pub default_class: FertilityClass,
    /// Global training label counts (drives the non-fired mass spread).
    pub training_counts: [usize; CLASS_COUNT],
    /// Label counts of training instances that fell through every rule.
    pub default_counts: [usize; CLASS_COUNT],
}

impl RuleList {
    /// First matching rule fires; its class receives the rule's
    /// confidence, the rest is spread over the other classes in
    /// proportion to the training distribution. Unmatched samples get
    /// the default rule's Laplace-smoothed distribution.
    pub fn predict(&self, s: &SoilSample) -> ClassDistribution {
        for rule in &self.rules {
            if rule.matches(s) {
                let mut probs = [0.0f64; CLASS_COUNT];
                let others: f64 = FertilityClass::ALL
                    .iter()
                    .filter(|c| **c != rule.class)
                    .map(|c| self.training_counts[c.index()] as f64)
                    .sum();
                if others == 0.0 {
                    probs[rule.class.index()] = 1.0;
                } else {
                    probs[rule.class.index()] = rule.confidence;
                    for c in FertilityClass::ALL {
                        if c != rule.class {
                            probs[c.index()] = (1.0 - rule.confidence)
                                * self.training_counts[c.index()] as f64
                                / others;
                        }
                    }
                }
                return ClassDistribution::new(probs);
            }
        }
        ClassDistribution::laplace(&self.default_counts)
    }
}

/// Free-function form of [`RuleList::predict`].
pub fn ripper_predict(r: &RuleList, s: &SoilSample) -> ClassDistribution {
    r.predict(s)
}

/// FOIL gain of moving from (p0, n0) coverage to (p1, n1).
fn foil_gain(p0: f64, n0: f64, p1: f64, n1: f64) -> f64 {
    if p1 <= 0.0 {
        return 0.0;
    }
    p1 * ((p1 / (p1 + n1)).log2() - (p0 / (p0 + n0)).log2())
}

/// Coding cost of identifying a k-subset of t items at success rate p.
fn subset_dl(t: f64, k: f64, p: f64) -> f64 {
    if k <= 0.0 {
        return 0.0;
    }
    let p = p.clamp(1e-12, 1.0 - 1e-12);
    let mut dl = -k * p.log2();
    if t - k > 0.0 {
        dl -= (t - k) * (1.0 - p).log2();
    }
    dl
}

/// Theory cost of a rule with k conditions out of t possible ones.
fn theory_dl(k: usize, total_conditions: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let kf = k as f64;
    let mut dl = kf.log2();
    if k > 1 {
        dl += 2.0 * kf.log2().log2();
    }
    dl += subset_dl(total_conditions, kf, kf / total_conditions.max(kf));
    0.5 * dl
}

/// Exception-coding cost of a ruleset with the given coverage stats.
fn data_dl(expected_fp_rate: f64, cov: f64, uncov: f64, fp: f64, fnn: f64) -> f64 {
    let total_bits = (cov + uncov + 1.0).log2();
    let expected_err = expected_fp_rate * (fp + fnn);
    let (cover_bits, uncover_bits) = if cov > uncov {
        (
            subset_dl(cov, fp, if cov > 0.0 { expected_err / cov } else { 0.0 }),
            if uncov > 0.0 {
                subset_dl(uncov, fnn, fnn / uncov)
            } else {
                0.0
            },
        )
    } else {
        (
            if cov > 0.0 {
                subset_dl(cov, fp, fp / cov)
            } else {
                0.0
            },
            if uncov > 0.0 {
                subset_dl(uncov, fnn, expected_err / uncov)
            } else {
                0.0
            },
        )
    };
    total_bits + cover_bits + uncover_bits
}

struct ClassLearner<'a> {
    rows: &'a [SoilSample],
    labels: &'a [FertilityClass],
    cls: FertilityClass,
    folds: usize,
    expected_fp_rate: f64,
    total_conditions: f64,
}

impl ClassLearner<'_> {
    fn is_pos(&self, i: usize) -> bool {
        self.labels[i] == self.cls
    }

    fn pos_neg(&self, rule: &RawRule, indices: &[usize]) -> (usize, usize) {
        let mut p = 0;
        let mut n = 0;
        for &i in indices {
            if rule.matches(&self.rows[i]) {
                if self.is_pos(i) {
                    p += 1;
                } else {
                    n += 1;
                }
            }
        }
        (p, n)
    }

    /// Description length of the whole ruleset over the class data:
    /// theory bits plus exception bits.
    fn ruleset_dl(&self, ruleset: &[RawRule], class_data: &[usize]) -> f64 {
        let mut cov = 0usize;
        let mut fp = 0usize;
        let mut fnn = 0usize;
        for &i in class_data {
            let covered = ruleset.iter().any(|r| r.matches(&self.rows[i]));
            if covered {
                cov += 1;
                if !self.is_pos(i) {
                    fp += 1;
                }
            } else if self.is_pos(i) {
                fnn += 1;
            }
        }
        let uncov = class_data.len() - cov;
        let theory: f64 = ruleset
            .iter()
            .map(|r| theory_dl(r.conditions.len(), self.total_conditions))
            .sum();
        theory
            + data_dl(
                self.expected_fp_rate,
                cov as f64,
                uncov as f64,
                fp as f64,
                fnn as f64,
            )
    }

    /// Seeded shuffle, then a stratified grow/prune split: the prune side
    /// receives one fold's share of positives and of negatives.
    fn split_grow_prune(&self, work: &[usize], rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<usize>) {
        let mut shuffled = work.to_vec();
        for i in (1..shuffled.len()).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            shuffled.swap(i, j);
        }
        let (pos, neg): (Vec<usize>, Vec<usize>) =
            shuffled.into_iter().partition(|&i| self.is_pos(i));
        let mut grow = Vec::with_capacity(work.len());
        let mut prune = Vec::new();
        for list in [pos, neg] {
            let prune_n = list.len() / self.folds;
            let grow_n = list.len() - prune_n;
            grow.extend_from_slice(&list[..grow_n]);
            prune.extend_from_slice(&list[grow_n..]);
        }
        (grow, prune)
    }

    /// Greedily add the FOIL-gain-maximizing condition until the rule
    /// covers no negatives on the grow split.
    fn grow_rule(&self, grow: &[usize], initial: Vec<Condition>) -> RawRule {
        let mut rule = RawRule {
            conditions: initial,
            class: self.cls,
        };
        let mut covered: Vec<usize> = grow
            .iter()
            .copied()
            .filter(|&i| rule.matches(&self.rows[i]))
            .collect();
        loop {
            let p0 = covered.iter().filter(|&&i| self.is_pos(i)).count() as f64;
            let n0 = covered.len() as f64 - p0;
            if n0 == 0.0 || p0 == 0.0 {
                break;
            }
            let mut best: Option<(Condition, f64)> = None;
            for attr in Attribute::ALL {
                let mut vals: Vec<(f64, bool)> = covered
                    .iter()
                    .map(|&i| (self.rows[i].value(attr), self.is_pos(i)))
                    .collect();
                vals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                let total_p = p0;
                let total_n = n0;
                // x <= v at each run end (cumulative prefix counts).
                let mut p1 = 0.0;
                let mut n1 = 0.0;
                for (pos, &(v, is_pos)) in vals.iter().enumerate() {
                    if is_pos {
                        p1 += 1.0;
                    } else {
                        n1 += 1.0;
                    }
                    let run_end = pos + 1 == vals.len() || vals[pos + 1].0 > v;
                    if !run_end || pos + 1 == vals.len() {
                        continue; // covering everything gains nothing
                    }
                    let gain = foil_gain(total_p, total_n, p1, n1);
                    if gain > 1e-12 && best.as_ref().map_or(true, |(_, g)| gain > *g) {
                        best = Some((
                            Condition {
                                attribute: attr,
                                op: CondOp::Le,
                                value: v,
                            },
                            gain,
                        ));
                    }
                }
                // x >= v at each run start (suffix counts).
                let mut p_seen = 0.0;
                let mut n_seen = 0.0;
                for (pos, &(v, is_pos)) in vals.iter().enumerate() {
                    let run_start = pos == 0 || vals[pos - 1].0 < v;
                    if run_start && pos > 0 {
                        let gain =
                            foil_gain(total_p, total_n, total_p - p_seen, total_n - n_seen);
                        if gain > 1e-12 && best.as_ref().map_or(true, |(_, g)| gain > *g) {
                            best = Some((
                                Condition {
                                    attribute: attr,
                                    op: CondOp::Ge,
                                    value: v,
                                },
                                gain,
                            ));
                        }
                    }
                    if is_pos {
                        p_seen += 1.0;
                    } else {
                        n_seen += 1.0;
                    }
                }
            }
            let Some((condition, _)) = best else {
                break;
            };
            rule.conditions.push(condition);
            covered.retain(|&i| condition.matches(&self.rows[i]));
        }
        rule
    }

    /// Keep the prefix of conditions maximizing `(p - n) / (p + n)` on the
    /// prune split; ties prefer the shorter rule. A rule covering nothing
    /// on the prune split offers no pruning evidence and stays unchanged.
    fn prune_rule(&self, mut rule: RawRule, prune: &[usize]) -> RawRule {
        if prune.is_empty() || rule.conditions.is_empty() {
            return rule;
        }
        let len = rule.conditions.len();
        let mut keep_counts = vec![(0f64, 0f64); len + 1]; // coverage per prefix length
        for &i in prune {
            // Index of the first condition row i fails; the row is
            // covered by every prefix of length <= that index.
            let mut first_fail = len;
            for (k, c) in rule.conditions.iter().enumerate() {
                if !c.matches(&self.rows[i]) {
                    first_fail = k;
                    break;
                }
            }
            for j in 0..=first_fail {
                if self.is_pos(i) {
                    keep_counts[j].0 += 1.0;
                } else {
                    keep_counts[j].1 += 1.0;
                }
            }
        }
        let (full_p, full_n) = keep_counts[len];
        if full_p + full_n == 0.0 {
            return rule;
        }
        // Prefix coverage is a superset of full-rule coverage, so every
        // worth below is well-defined.
        let worth = |(p, n): (f64, f64)| (p - n) / (p + n);
        let mut best_j = 0;
        let mut best_worth = worth(keep_counts[0]);
        for (j, &counts) in keep_counts.iter().enumerate().skip(1) {
            let w = worth(counts);
            if w > best_worth {
                best_worth = w;
                best_j = j;
            }
        }
        rule.conditions.truncate(best_j);
        rule
    }

    /// Append rules covering the positives of `class_data` not yet covered
    /// by `ruleset`, with the MDL and error-rate stopping conditions.
    fn grow_ruleset(
        &self,
        ruleset: &mut Vec<RawRule>,
        class_data: &[usize],
        rng: &mut ChaCha8Rng,
    ) {
        let mut work: Vec<usize> = class_data
            .iter()
            .copied()
            .filter(|&i| !ruleset.iter().any(|r| r.matches(&self.rows[i])))
            .collect();
        let mut best_dl = self.ruleset_dl(ruleset, class_data);
        loop {
            if !work.iter().any(|&i| self.is_pos(i)) {
                break;
            }
            let (grow, prune) = self.split_grow_prune(&work, rng);
            let grown = self.grow_rule(&grow, Vec::new());
            let pruned = self.prune_rule(grown, &prune);
            let (p, n) = self.pos_neg(&pruned, &prune);
            if p + n > 0 && n as f64 / (p + n) as f64 > 0.5 {
                break;
            }
            let (pw, _) = self.pos_neg(&pruned, &work);
            if pw == 0 {
                break;
            }
            ruleset.push(pruned);
            let dl = self.ruleset_dl(ruleset, class_data);
            if dl > best_dl + MDL_SURPLUS {
                ruleset.pop();
                break;
            }
            best_dl = best_dl.min(dl);
            let last = ruleset.last().unwrap().clone();
            work.retain(|&i| !last.matches(&self.rows[i]));
        }
    }

    /// One optimization pass: per rule, grow a replacement from scratch
    /// and a revision seeded with the current conditions, then keep the
    /// variant minimizing the ruleset description length.
    fn optimize(&self, ruleset: &mut Vec<RawRule>, class_data: &[usize], rng: &mut ChaCha8Rng) {
        for i in 0..ruleset.len() {
            let ctx: Vec<usize> = class_data
                .iter()
                .copied()
                .filter(|&r| !ruleset[..i].iter().any(|ru| ru.matches(&self.rows[r])))
                .collect();
            if !ctx.iter().any(|&r| self.is_pos(r)) {
                continue;
            }
            let (grow, prune) = self.split_grow_prune(&ctx, rng);
            let replacement = self.prune_rule(self.grow_rule(&grow, Vec::new()), &prune);
            let revision = self.prune_rule(
                self.grow_rule(&grow, ruleset[i].conditions.clone()),
                &prune,
            );

            let dl_original = self.ruleset_dl(ruleset, class_data);
            let with_variant = |variant: &RawRule| {
                let mut alt = ruleset.clone();
                alt[i] = variant.clone();
                self.ruleset_dl(&alt, class_data)
            };
            let dl_replacement = with_variant(&replacement);
            let dl_revision = with_variant(&revision);
            if dl_replacement < dl_original && dl_replacement <= dl_revision {
                ruleset[i] = replacement;
            } else if dl_revision < dl_original {
                ruleset[i] = revision;
            }
        }
        // Cover any residual positives uncovered after revision.
        self.grow_ruleset(ruleset, class_data, rng);
    }
}

/// Total candidate conditions over the given rows: two per distinct value
/// per attribute.
fn count_all_conditions(rows: &[SoilSample], indices: &[usize]) -> f64 {
    let mut total = 0usize;
    for attr in Attribute::ALL {
        let mut values: Vec<f64> = indices.iter().map(|&i| rows[i].value(attr)).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        values.dedup();
        total += 2 * values.len();
    }
    total as f64
}

/// Learn an ordered rule list on a labeled dataset.
pub fn train_ripper(d: &Dataset, params: &RipperParams) -> Result<RuleList, ClassifierError> {
    let (rows, labels) = d.labeled().map_err(|_| ClassifierError::Unlabeled)?;
    if rows.is_empty() {
        return Err(ClassifierError::EmptyDataset);
    }
    let folds = params.folds.max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let counts = class_counts(labels);
    let mut order: Vec<FertilityClass> = FertilityClass::ALL
        .into_iter()
        .filter(|c| counts[c.index()] > 0)
        .collect();
    order.sort_by_key(|c| (counts[c.index()], c.index()));
    let default_class = *order.last().unwrap();

    let mut rules: Vec<RawRule> = Vec::new();
    let mut remaining: Vec<usize> = (0..rows.len()).collect();
    for &cls in &order[..order.len() - 1] {
        if !remaining.iter().any(|&i| labels[i] == cls) {
            continue;
        }
        let class_data = remaining.clone();
        let pos_total = class_data.iter().filter(|&&i| labels[i] == cls).count();
        let learner = ClassLearner {
            rows,
            labels,
            cls,
            folds,
            expected_fp_rate: pos_total as f64 / class_data.len() as f64,
            total_conditions: count_all_conditions(rows, &class_data),
        };
        let mut class_rules: Vec<RawRule> = Vec::new();
        learner.grow_ruleset(&mut class_rules, &class_data, &mut rng);
        for _ in 0..params.optimizations {
            learner.optimize(&mut class_rules, &class_data, &mut rng);
        }
        // Delete rules whose removal does not increase the description
        // length, scanning backward until stable.
        loop {
            let mut removed = false;
            let mut i = class_rules.len();
            while i > 0 {
                i -= 1;
                let current = learner.ruleset_dl(&class_rules, &class_data);
                let mut alt = class_rules.clone();
                alt.remove(i);
                if learner.ruleset_dl(&alt, &class_data) <= current {
                    class_rules.remove(i);
                    removed = true;
                }
            }
            if !removed {
                break;
            }
        }
        // A kept rule must cover at least one positive of its class data.
        class_rules.retain(|r| {
            class_data
                .iter()
                .any(|&i| labels[i] == cls && r.matches(&rows[i]))
        });
        remaining.retain(|&i| !class_rules.iter().any(|r| r.matches(&rows[i])));
        rules.extend(class_rules);
    }

    // Sequential-match statistics over the full training set.
    let mut stats = vec![(0usize, 0usize); rules.len()];
    let mut default_counts = [0usize; CLASS_COUNT];
    for (i, row) in rows.iter().enumerate() {
        match rules.iter().position(|r| r.matches(row)) {
            Some(k) => {
                stats[k].0 += 1;
                if labels[i] == rules[k].class {
                    stats[k].1 += 1;
                }
            }
            None => default_counts[labels[i].index()] += 1,
        }
    }
    if default_counts.iter().sum::<usize>() == 0 {
        default_counts[default_class.index()] = 1;
    }

    let learned = rules
        .into_iter()
        .zip(stats)
        .map(|(r, (matched, correct))| LearnedRule {
            conditions: r.conditions,
            class: r.class,
            matched,
            correct,
            confidence: (correct as f64 + 1.0) / (matched as f64 + 2.0),
        })
        .collect();

    Ok(RuleList {
        rules: learned,
        default_class,
        training_counts: counts,
        default_counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::FertilityClass::{High, Low, Moderate};

    fn one_dim(values: &[f64], labels: &[FertilityClass]) -> Dataset {
        let rows: Vec<SoilSample> = values
            .iter()
            .map(|&v| SoilSample::new([7.0, 1.0, v, 1.0, 100.0, 1.0, 1.0, 1.0, 1.0]).unwrap())
            .collect();
        Dataset::new(rows, Some(labels.to_vec()), "test").unwrap()
    }

    fn sample(oc: f64) -> SoilSample {
        SoilSample::new([7.0, 1.0, oc, 1.0, 100.0, 1.0, 1.0, 1.0, 1.0]).unwrap()
    }

    #[test]
    fn single_class_data_yields_only_the_default() {
        let d = one_dim(&[0.1, 0.5, 0.9], &[High, High, High]);
        let r = train_ripper(&d, &RipperParams::default()).unwrap();
        assert!(r.rules.is_empty());
        assert_eq!(r.default_class, High);
        assert_eq!(r.predict(&sample(0.5)).argmax(), High);
    }

    #[test]
    fn separable_one_dim_data_needs_one_rule() {
        let d = one_dim(
            &[0.1, 0.2, 0.3, 0.7, 0.8, 0.9],
            &[Low, Low, Low, High, High, High],
        );
        let r = train_ripper(&d, &RipperParams::default()).unwrap();
        assert_eq!(r.rules.len(), 1, "rules: {:?}", r.rules);
        assert_eq!(r.rules[0].conditions.len(), 1);
        assert_eq!(r.rules[0].class, Low);
        assert_eq!(r.default_class, High);
        // Training set is classified perfectly.
        for (row, label) in d.rows().iter().zip(d.labels().unwrap()) {
            assert_eq!(r.predict(row).argmax(), *label);
        }
    }

    #[test]
    fn first_matching_rule_fires() {
        let make_rule = |value: f64, class: FertilityClass| LearnedRule {
            conditions: vec![Condition {
                attribute: Attribute::Oc,
                op: CondOp::Le,
                value,
            }],
            class,
            matched: 10,
            correct: 10,
            confidence: 11.0 / 12.0,
        };
        let list = RuleList {
            rules: vec![make_rule(0.5, Low), make_rule(0.9, Moderate)],
            default_class: High,
            training_counts: [0, 10, 10, 0, 10, 0],
            default_counts: [0, 0, 0, 0, 10, 0],
        };
        // Matches both rules; the first wins.
        assert_eq!(list.predict(&sample(0.3)).argmax(), Low);
        // Matches only the second.
        assert_eq!(list.predict(&sample(0.7)).argmax(), Moderate);
        // Matches none: default distribution.
        assert_eq!(list.predict(&sample(0.95)).argmax(), High);
    }

    #[test]
    fn empty_list_always_predicts_the_default_distribution() {
        let list = RuleList {
            rules: vec![],
            default_class: Moderate,
            training_counts: [0, 0, 5, 0, 0, 0],
            default_counts: [0, 0, 5, 0, 0, 0],
        };
        for oc in [0.1, 0.5, 2.5] {
            let p = list.predict(&sample(oc));
            assert_eq!(p.argmax(), Moderate);
            assert!((p.probability(Moderate) - 6.0 / 11.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hand_built_list_fires_as_traced() {
        let rule = |attr: Attribute, op: CondOp, value: f64, class: FertilityClass| LearnedRule {
            conditions: vec![Condition {
                attribute: attr,
                op,
                value,
            }],
            class,
            matched: 8,
            correct: 7,
            confidence: 8.0 / 10.0,
        };
        let list = RuleList {
            rules: vec![
                rule(Attribute::Oc, CondOp::Le, 0.2, FertilityClass::VeryLow),
                rule(Attribute::Oc, CondOp::Ge, 1.0, FertilityClass::VeryHigh),
                rule(Attribute::K, CondOp::Le, 120.0, Low),
            ],
            default_class: Moderate,
            training_counts: [8, 8, 8, 0, 0, 8],
            default_counts: [0, 0, 8, 0, 0, 0],
        };
        // oc 0.15 -> rule 1.
        assert_eq!(list.predict(&sample(0.15)).argmax(), FertilityClass::VeryLow);
        // oc 1.2 -> rule 2.
        assert_eq!(list.predict(&sample(1.2)).argmax(), FertilityClass::VeryHigh);
        // oc 0.5, k 100 -> rule 3.
        assert_eq!(list.predict(&sample(0.5)).argmax(), Low);
        // k 300 escapes rule 3 -> default.
        let far = SoilSample::new([7.0, 1.0, 0.5, 1.0, 300.0, 1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(list.predict(&far).argmax(), Moderate);
    }

    #[test]
    fn fired_distribution_carries_laplace_precision() {
        let list = RuleList {
            rules: vec![LearnedRule {
                conditions: vec![Condition {
                    attribute: Attribute::Oc,
                    op: CondOp::Le,
                    value: 0.5,
                }],
                class: Low,
                matched: 8,
                correct: 6,
                confidence: 7.0 / 10.0,
            }],
            default_class: High,
            training_counts: [2, 8, 4, 0, 6, 0],
            default_counts: [0, 0, 0, 0, 6, 0],
        };
        let p = list.predict(&sample(0.3));
        assert!((p.probability(Low) - 0.7).abs() < 1e-12);
        // Remainder spread over the other classes by training share:
        // others total 12, VeryLow 2 -> 0.3 * 2/12.
        assert!((p.probability(FertilityClass::VeryLow) - 0.3 * 2.0 / 12.0).abs() < 1e-12);
        assert!((p.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn training_is_deterministic_in_the_seed() {
        let values: Vec<f64> = (0..60).map(|i| (i as f64 * 0.713).sin() + 1.5).collect();
        let labels: Vec<FertilityClass> = values
            .iter()
            .map(|&v| if v > 1.5 { High } else { Low })
            .collect();
        let d = one_dim(&values, &labels);
        let a = train_ripper(&d, &RipperParams::default()).unwrap();
        let b = train_ripper(&d, &RipperParams::default()).unwrap();
        assert_eq!(a, b);
        let c = train_ripper(
            &d,
            &RipperParams {
                seed: 7,
                ..Default::default()
            },
        )
        .unwrap();
        // A different seed is allowed to learn different rules, but must
        // still classify the separable training data perfectly.
        for (row, label) in d.rows().iter().zip(d.labels().unwrap()) {
            assert_eq!(c.predict(row).argmax(), *label);
        }
    }

    #[test]
    fn empty_dataset_is_an_error() {
        let d = Dataset::new(vec![], Some(vec![]), "test").unwrap();
        assert!(matches!(
            train_ripper(&d, &RipperParams::default()).unwrap_err(),
            ClassifierError::EmptyDataset
        ));
    }
}
