//! Seeded synthetic dataset generation.
//!
//! The generator is a pure function of its config. Random draws come from
//! a ChaCha8 stream (seeded from the 64-bit seed via the standard
//! SplitMix64 expansion), mapped to floats in-house so the stream is fully
//! specified and reproducible in any implementation:
//!
//! * uniform in `[0, 1)`: take the top 53 bits of one `u64` output and
//!   scale by 2⁻⁵³;
//! * standard normal: Box-Muller on one pair of `u64` outputs, keeping the
//!   cosine branch only (`sqrt(-2 ln u1) * cos(2π u2)` with `u1` in
//!   `(0, 1]`).
//!
//! Per row, the eight predictor attributes are drawn uniformly from their
//! ranges in canonical order, then phosphorus is computed from the linear
//! formula plus Gaussian noise and clamped at zero.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::{Attribute, DataError, Dataset, FertilityClass, SoilSample, CLASS_COUNT};

/// The eight predictor attributes (everything except phosphorus), in
/// canonical order.
pub const PREDICTORS: [Attribute; 8] = [
    Attribute::Ph,
    Attribute::Ec,
    Attribute::Oc,
    Attribute::K,
    Attribute::Fe,
    Attribute::Zn,
    Attribute::Mn,
    Attribute::Cu,
];

/// Linear formula generating phosphorus from the eight predictors.
#[derive(Debug, Clone, PartialEq)]
pub struct PFormula {
    /// Coefficients over [`PREDICTORS`], in that order.
    pub coefficients: [f64; 8],
    pub intercept: f64,
    /// Standard deviation of the additive Gaussian noise.
    pub noise_std: f64,
}

impl PFormula {
    /// Noise-free phosphorus value for one sample.
    pub fn signal(&self, s: &SoilSample) -> f64 {
        let mut p = self.intercept;
        for (attr, beta) in PREDICTORS.iter().zip(self.coefficients.iter()) {
            p += beta * s.value(*attr);
        }
        p
    }
}

/// Configuration for [`generate_synthetic`].
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n: usize,
    pub seed: u64,
    /// `[min, max)` per predictor attribute, in [`PREDICTORS`] order.
    pub ranges: [(f64, f64); 8],
    pub p_formula: PFormula,
    /// Fraction of labels to reassign when noise is requested downstream.
    pub label_noise: f64,
}

impl SynthConfig {
    /// Check every config invariant, naming the violated field.
    pub fn validate(&self) -> Result<(), DataError> {
        if self.n < 1 {
            return Err(DataError::InvalidConfig("n must be >= 1".into()));
        }
        if !(self.p_formula.noise_std >= 0.0 && self.p_formula.noise_std.is_finite()) {
            return Err(DataError::InvalidConfig(
                "p_formula.noise_std must be finite and >= 0".into(),
            ));
        }
        if !self.p_formula.intercept.is_finite()
            || self.p_formula.coefficients.iter().any(|c| !c.is_finite())
        {
            return Err(DataError::InvalidConfig(
                "p_formula coefficients must be finite".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.label_noise) {
            return Err(DataError::InvalidConfig(
                "label_noise must be within [0, 1)".into(),
            ));
        }
        for (attr, &(min, max)) in PREDICTORS.iter().zip(self.ranges.iter()) {
            if !(min.is_finite() && max.is_finite() && min < max) {
                return Err(DataError::InvalidConfig(format!(
                    "range for {attr} must satisfy min < max"
                )));
            }
            if min < 0.0 || (*attr == Attribute::Ph && max > 14.0) {
                return Err(DataError::InvalidConfig(format!(
                    "range for {attr} violates sample invariants"
                )));
            }
        }
        Ok(())
    }
}

impl Default for SynthConfig {
    /// The shipped generator configuration: 1988 rows, seed 42, ranges
    /// and a phosphorus formula chosen to give plausible agronomic values.
    /// These numbers are generator configuration only, not measurements.
    fn default() -> Self {
        SynthConfig {
            n: 1988,
            seed: 42,
            ranges: [
                (4.0, 9.0),    // Ph
                (0.0, 4.0),    // EC dS/m
                (0.1, 1.5),    // OC %
                (50.0, 400.0), // K ppm
                (0.2, 20.0),   // Fe ppm
                (0.2, 20.0),   // Zn ppm
                (0.2, 20.0),   // Mn ppm
                (0.2, 20.0),   // Cu ppm
            ],
            p_formula: PFormula {
                // P rides mostly on organic carbon, potassium, and zinc.
                coefficients: [0.0, 0.0, 4.0, 0.02, 0.0, 0.3, 0.0, 0.0],
                intercept: 1.0,
                noise_std: 0.3,
            },
            label_noise: 0.05,
        }
    }
}

/// Uniform draw in `[0, 1)` from the top 53 bits of one `u64`.
fn next_unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal draw via Box-Muller (cosine branch).
fn next_gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
    let u2 = next_unit(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Generate an unlabeled dataset deterministically from the config.
pub fn generate_synthetic(cfg: &SynthConfig) -> Result<Dataset, DataError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::with_capacity(cfg.n);
    for _ in 0..cfg.n {
        let mut values = [0.0f64; 9];
        for (attr, &(min, max)) in PREDICTORS.iter().zip(cfg.ranges.iter()) {
            values[attr.index()] = min + next_unit(&mut rng) * (max - min);
        }
        let noise = if cfg.p_formula.noise_std > 0.0 {
            cfg.p_formula.noise_std * next_gaussian(&mut rng)
        } else {
            0.0
        };
        let mut p = cfg.p_formula.intercept + noise;
        for (attr, beta) in PREDICTORS.iter().zip(cfg.p_formula.coefficients.iter()) {
            p += beta * values[attr.index()];
        }
        values[Attribute::P.index()] = p.max(0.0);
        let sample = SoilSample::new(values)
            .map_err(|e| DataError::InvalidConfig(format!("generated sample invalid: {e}")))?;
        rows.push(sample);
    }
    Dataset::new(rows, None, format!("synthetic(n={}, seed={})", cfg.n, cfg.seed))
}

/// Reassign a fraction of labels uniformly at random.
///
/// Exactly `round(fraction * n)` distinct rows are selected by a seeded
/// Fisher-Yates shuffle; each selected row receives a label drawn
/// uniformly from all six classes (possibly the one it already had).
pub fn apply_label_noise(
    d: &Dataset,
    fraction: f64,
    seed: u64,
) -> Result<Dataset, DataError> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(DataError::InvalidConfig(
            "label noise fraction must be within [0, 1)".into(),
        ));
    }
    let (_, labels) = d.labeled()?;
    let n = d.len();
    let count = (fraction * n as f64).round() as usize;
    let mut new_labels = labels.to_vec();
    if count > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Fisher-Yates with index = next_u64 mod (i+1); modulo bias is
        // irrelevant here, the fixed scheme is what matters.
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            order.swap(i, j);
        }
        for &idx in order.iter().take(count) {
            let c = (rng.next_u64() % CLASS_COUNT as u64) as usize;
            new_labels[idx] = FertilityClass::from_index(c).unwrap();
        }
    }
    d.with_labels(new_labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_free_formula_is_exact() {
        let cfg = SynthConfig {
            n: 1,
            seed: 9,
            p_formula: PFormula {
                coefficients: [0.0; 8],
                intercept: 7.0,
                noise_std: 0.0,
            },
            ..SynthConfig::default()
        };
        let d = generate_synthetic(&cfg).unwrap();
        assert_eq!(d.rows()[0].value(Attribute::P), 7.0);
    }

    #[test]
    fn same_config_gives_equal_datasets() {
        let cfg = SynthConfig {
            n: 50,
            ..SynthConfig::default()
        };
        let a = generate_synthetic(&cfg).unwrap();
        let b = generate_synthetic(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noise_free_p_correlates_perfectly_with_signal() {
        let cfg = SynthConfig {
            n: 1000,
            seed: 3,
            p_formula: PFormula {
                noise_std: 0.0,
                ..SynthConfig::default().p_formula
            },
            ..SynthConfig::default()
        };
        let d = generate_synthetic(&cfg).unwrap();
        // Independent one-pass correlation between P and the signal.
        let xs: Vec<f64> = d.rows().iter().map(|r| cfg.p_formula.signal(r)).collect();
        let ys: Vec<f64> = d.rows().iter().map(|r| r.value(Attribute::P)).collect();
        let n = xs.len() as f64;
        let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (x, y) in xs.iter().zip(ys.iter()) {
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
        }
        let r = (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt());
        assert!((r - 1.0).abs() <= 1e-9, "r = {r}");
    }

    #[test]
    fn invalid_config_names_field() {
        let cfg = SynthConfig {
            n: 0,
            ..SynthConfig::default()
        };
        match generate_synthetic(&cfg).unwrap_err() {
            DataError::InvalidConfig(msg) => assert!(msg.contains('n')),
            other => panic!("expected InvalidConfig, got {other:?}"),
        }

        let mut cfg = SynthConfig::default();
        cfg.ranges[0] = (9.0, 4.0);
        assert!(matches!(
            generate_synthetic(&cfg).unwrap_err(),
            DataError::InvalidConfig(_)
        ));
    }

    #[test]
    fn label_noise_touches_requested_fraction() {
        let cfg = SynthConfig {
            n: 200,
            ..SynthConfig::default()
        };
        let d = generate_synthetic(&cfg).unwrap();
        let labeled = d
            .with_labels(vec![FertilityClass::High; 200])
            .unwrap();
        let noisy = apply_label_noise(&labeled, 0.10, 7).unwrap();
        let changed = noisy
            .labels()
            .unwrap()
            .iter()
            .filter(|&&c| c != FertilityClass::High)
            .count();
        // 20 rows reassigned, each keeps its old label with prob 1/6.
        assert!(changed <= 20 && changed >= 10, "changed = {changed}");
        // Deterministic in the seed.
        let again = apply_label_noise(&labeled, 0.10, 7).unwrap();
        assert_eq!(noisy, again);
    }
}
