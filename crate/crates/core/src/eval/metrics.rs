//! Class-level aggregates: mAP, class frequencies, inverse-class-frequency
//! weights and the weighted mAP built from them.

use alloc::collections::BTreeMap;
use core::fmt;

use super::difficulty::{Difficulty, DifficultyRule};
use crate::label::{EvalClass, ObjectLabel};

pub type ClassMap<T> = BTreeMap<EvalClass, T>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricsError {
    MissingClass(EvalClass),
    /// No counted object of any scored class at this difficulty.
    EmptySplit(Difficulty),
    /// A class frequency is zero (or not a positive finite number).
    ZeroFrequency(EvalClass),
    NoClasses,
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::MissingClass(c) => write!(f, "no value for class {c}"),
            MetricsError::EmptySplit(d) => write!(f, "no counted objects at difficulty {d}"),
            MetricsError::ZeroFrequency(c) => {
                write!(f, "class {c} has zero frequency; inverse weight undefined")
            }
            MetricsError::NoClasses => f.write_str("empty class map"),
        }
    }
}

impl core::error::Error for MetricsError {}

/// Unweighted mean AP over car, pedestrian and cyclist.
pub fn mean_ap(aps: &ClassMap<f64>) -> Result<f64, MetricsError> {
    let mut sum = 0.0;
    for c in EvalClass::ALL {
        sum += *aps.get(&c).ok_or(MetricsError::MissingClass(c))?;
    }
    Ok(sum / EvalClass::ALL.len() as f64)
}

/// Counted objects per scored class (every class present, possibly 0).
pub fn class_counts<'a, I>(labels: I, rule: &DifficultyRule) -> ClassMap<usize>
where
    I: IntoIterator<Item = &'a ObjectLabel>,
{
    let mut counts: ClassMap<usize> = EvalClass::ALL.into_iter().map(|c| (c, 0)).collect();
    for l in labels {
        if let Some(c) = l.eval_class() {
            if rule.counts(l) {
                *counts.get_mut(&c).expect("all classes seeded") += 1;
            }
        }
    }
    counts
}

/// Relative frequency of each class; sums to one.
pub fn frequencies_from_counts(
    counts: &ClassMap<usize>,
    difficulty: Difficulty,
) -> Result<ClassMap<f64>, MetricsError> {
    let total: usize = counts.values().sum();
    if total == 0 {
        return Err(MetricsError::EmptySplit(difficulty));
    }
    Ok(counts
        .iter()
        .map(|(&c, &n)| (c, n as f64 / total as f64))
        .collect())
}

/// Class frequencies per difficulty over a split's ground truth.
pub fn class_frequencies(
    labels: &[ObjectLabel],
    rules: &[DifficultyRule],
) -> Result<BTreeMap<Difficulty, ClassMap<f64>>, MetricsError> {
    rules
        .iter()
        .map(|r| {
            frequencies_from_counts(&class_counts(labels, r), r.difficulty)
                .map(|f| (r.difficulty, f))
        })
        .collect()
}

/// `w_c = (1 / f_c) / sum_k (1 / f_k)`.
pub fn icfw_weights(freqs: &ClassMap<f64>) -> Result<ClassMap<f64>, MetricsError> {
    if freqs.is_empty() {
        return Err(MetricsError::NoClasses);
    }
    let mut inverse = ClassMap::new();
    for (&c, &f) in freqs {
        if !(f > 0.0 && f.is_finite()) {
            return Err(MetricsError::ZeroFrequency(c));
        }
        inverse.insert(c, 1.0 / f);
    }
    let total: f64 = inverse.values().sum();
    Ok(inverse.into_iter().map(|(c, v)| (c, v / total)).collect())
}

/// `sum_c w_c * AP_c` over a shared class set.
///
/// Equal weights summing to one are exactly `1 / n`, so that case is
/// evaluated as the plain mean and agrees bit-for-bit with [`mean_ap`].
pub fn icfw_map(aps: &ClassMap<f64>, weights: &ClassMap<f64>) -> Result<f64, MetricsError> {
    if weights.is_empty() {
        return Err(MetricsError::NoClasses);
    }
    if let Some(&c) = aps.keys().find(|c| !weights.contains_key(c)) {
        return Err(MetricsError::MissingClass(c));
    }
    let mut values = alloc::vec::Vec::with_capacity(weights.len());
    for (&c, &w) in weights {
        values.push((w, *aps.get(&c).ok_or(MetricsError::MissingClass(c))?));
    }
    let first = values[0].0;
    if values.iter().all(|(w, _)| w.to_bits() == first.to_bits()) {
        return Ok(values.iter().map(|(_, ap)| ap).sum::<f64>() / values.len() as f64);
    }
    Ok(values.iter().map(|(w, ap)| w * ap).sum())
}
