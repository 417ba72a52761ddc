use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::matching::{FrameMatches, Outcome, ScoredOutcome};

/// Recall sampling of the interpolated precision curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Interpolation {
    /// 40 points `1/40 ..= 40/40`.
    #[default]
    R40,
    /// 11 points `0, 0.1, ..., 1.0`.
    R11,
}

impl Interpolation {
    /// Recall sample points as `(numerator, denominator)`.
    fn samples(self) -> impl Iterator<Item = (u64, u64)> {
        let (range, den) = match self {
            Interpolation::R40 => (1..=40u64, 40u64),
            Interpolation::R11 => (0..=10u64, 10u64),
        };
        range.map(move |k| (k, den))
    }

    pub fn point_count(self) -> usize {
        match self {
            Interpolation::R40 => 40,
            Interpolation::R11 => 11,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Interpolation::R40 => "r40",
            Interpolation::R11 => "r11",
        }
    }
}

impl fmt::Display for Interpolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Interpolation {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "r40" | "R40" => Ok(Interpolation::R40),
            "r11" | "R11" => Ok(Interpolation::R11),
            _ => Err(()),
        }
    }
}

/// Cumulative true/false positive counts over a score-sorted detection
/// list, ignored detections removed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PrCurve {
    /// `(cumulative tp, cumulative fp)` after each detection.
    pub counts: Vec<(u64, u64)>,
    pub positives: u64,
}

impl PrCurve {
    pub fn from_sorted(outcomes: &[ScoredOutcome], positives: usize) -> Self {
        let (mut tp, mut fp) = (0u64, 0u64);
        let mut counts = Vec::with_capacity(outcomes.len());
        for o in outcomes {
            match o.outcome {
                Outcome::TruePositive => tp += 1,
                Outcome::FalsePositive => fp += 1,
                Outcome::Ignored => continue,
            }
            counts.push((tp, fp));
        }
        Self {
            counts,
            positives: positives as u64,
        }
    }

    /// Merge per-frame matches into one curve. Detections are ordered by
    /// descending score; equal scores keep frame order, then in-frame order.
    pub fn from_frames<'a, I>(frames: I) -> Self
    where
        I: IntoIterator<Item = &'a FrameMatches>,
    {
        let mut all = Vec::new();
        let mut positives = 0;
        for f in frames {
            all.extend_from_slice(&f.outcomes);
            positives += f.positives;
        }
        // stable: ties stay in frame order
        all.sort_by(|a, b| b.score.total_cmp(&a.score));
        Self::from_sorted(&all, positives)
    }

    /// `(recall, precision)` after each detection.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.positives as f64;
        self.counts
            .iter()
            .map(move |&(tp, fp)| (tp as f64 / n, tp as f64 / (tp + fp) as f64))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApValue {
    pub ap: f64,
    /// No counted ground truth; `ap` is 0 by definition.
    pub no_positives: bool,
}

/// Mean of the interpolated precision `max_{r' >= r} p(r')` over the recall
/// sample points; 0 where no detection reaches the recall level.
pub fn average_precision(curve: &PrCurve, mode: Interpolation) -> ApValue {
    if curve.positives == 0 {
        return ApValue {
            ap: 0.0,
            no_positives: true,
        };
    }
    // suffix maximum of precision
    let mut best = alloc::vec![0.0f64; curve.counts.len() + 1];
    for (i, &(tp, fp)) in curve.counts.iter().enumerate().rev() {
        let p = tp as f64 / (tp + fp) as f64;
        best[i] = p.max(best[i + 1]);
    }
    let npos = curve.positives;
    let mut sum = 0.0;
    let mut i = 0;
    for (k, den) in mode.samples() {
        // first detection with recall >= k / den, compared exactly
        while i < curve.counts.len() && curve.counts[i].0 * den < k * npos {
            i += 1;
        }
        sum += best[i];
    }
    ApValue {
        ap: sum / mode.point_count() as f64,
        no_positives: false,
    }
}
