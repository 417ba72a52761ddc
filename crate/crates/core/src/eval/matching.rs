use alloc::vec::Vec;
use core::fmt;

use super::difficulty::DifficultyPartition;
use crate::label::ObjectLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    TruePositive,
    FalsePositive,
    /// Absorbed by an ignored ground-truth object.
    Ignored,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredOutcome {
    pub score: f64,
    pub outcome: Outcome,
}

/// Matching result for one frame, in descending score order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameMatches {
    pub outcomes: Vec<ScoredOutcome>,
    /// Counted ground truths left unmatched.
    pub false_negatives: usize,
    /// Number of counted ground truths.
    pub positives: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MissingScore {
    /// Position of the offending prediction in the input slice.
    pub index: usize,
}

impl fmt::Display for MissingScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "prediction {} has no confidence score", self.index)
    }
}

impl core::error::Error for MissingScore {}

/// Greedy score-ordered matching.
///
/// Predictions are visited by descending score (ties keep input order). A
/// prediction claims the unmatched counted object of highest IoU at or
/// above `threshold`; failing that it is absorbed if it reaches `threshold`
/// against any ignored object, and is a false positive otherwise.
pub fn match_detections<F>(
    gts: &DifficultyPartition<'_>,
    preds: &[&ObjectLabel],
    iou: F,
    threshold: f64,
) -> Result<FrameMatches, MissingScore>
where
    F: Fn(&ObjectLabel, &ObjectLabel) -> f64,
{
    let mut order: Vec<(usize, f64)> = Vec::with_capacity(preds.len());
    for (index, p) in preds.iter().enumerate() {
        match p.score {
            Some(s) => order.push((index, s)),
            None => return Err(MissingScore { index }),
        }
    }
    order.sort_by(|a, b| b.1.total_cmp(&a.1));

    let mut taken = alloc::vec![false; gts.counted.len()];
    let mut outcomes = Vec::with_capacity(order.len());
    for (index, score) in order {
        let pred = preds[index];
        let mut best: Option<(usize, f64)> = None;
        for (g, gt) in gts.counted.iter().enumerate() {
            if taken[g] {
                continue;
            }
            let v = iou(gt, pred);
            if v >= threshold && best.is_none_or(|(_, b)| v > b) {
                best = Some((g, v));
            }
        }
        let outcome = if let Some((g, _)) = best {
            taken[g] = true;
            Outcome::TruePositive
        } else if gts.ignored.iter().any(|gt| iou(gt, pred) >= threshold) {
            Outcome::Ignored
        } else {
            Outcome::FalsePositive
        };
        outcomes.push(ScoredOutcome { score, outcome });
    }
    Ok(FrameMatches {
        outcomes,
        false_negatives: taken.iter().filter(|t| !**t).count(),
        positives: gts.counted.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::difficulty::{difficulty_filter, Difficulty, DifficultyRule};
    use crate::geometry::{iou_2d, Rect2D};

    fn lbl(l: f64, score: Option<f64>) -> ObjectLabel {
        let mut o = ObjectLabel::new_2d("Car", Rect2D::new(l, 0.0, l + 50.0, 50.0));
        o.score = score;
        o
    }

    fn box_iou(a: &ObjectLabel, b: &ObjectLabel) -> f64 {
        iou_2d(&a.box2d, &b.box2d)
    }

    const EASY: DifficultyRule = DifficultyRule::kitti(Difficulty::Easy);

    #[test]
    fn single_perfect_match() {
        let gt = lbl(0.0, None);
        let p = lbl(0.0, Some(0.9));
        let m = match_detections(&difficulty_filter([&gt], &EASY), &[&p], box_iou, 0.7).unwrap();
        assert_eq!(m.outcomes[0].outcome, Outcome::TruePositive);
        assert_eq!(m.false_negatives, 0);
    }

    #[test]
    fn second_detection_is_duplicate() {
        let gt = lbl(0.0, None);
        let lo = lbl(1.0, Some(0.5));
        let hi = lbl(2.0, Some(0.9));
        let m =
            match_detections(&difficulty_filter([&gt], &EASY), &[&lo, &hi], box_iou, 0.5).unwrap();
        assert_eq!(
            m.outcomes[0],
            ScoredOutcome {
                score: 0.9,
                outcome: Outcome::TruePositive
            }
        );
        assert_eq!(
            m.outcomes[1],
            ScoredOutcome {
                score: 0.5,
                outcome: Outcome::FalsePositive
            }
        );
    }

    #[test]
    fn ignored_ground_truth_absorbs() {
        let mut gt = lbl(0.0, None);
        gt.occlusion = 3;
        let p = lbl(0.0, Some(0.8));
        let part = difficulty_filter([&gt], &EASY);
        assert!(part.counted.is_empty());
        let m = match_detections(&part, &[&p], box_iou, 0.7).unwrap();
        assert_eq!(m.outcomes[0].outcome, Outcome::Ignored);
        assert_eq!((m.false_negatives, m.positives), (0, 0));
    }

    #[test]
    fn prefers_highest_iou_counted() {
        let g1 = lbl(0.0, None);
        let g2 = lbl(10.0, None);
        let p = lbl(9.0, Some(1.0));
        let m =
            match_detections(&difficulty_filter([&g1, &g2], &EASY), &[&p], box_iou, 0.5).unwrap();
        assert_eq!(m.outcomes[0].outcome, Outcome::TruePositive);
        // g1 is left over
        assert_eq!(m.false_negatives, 1);
    }

    #[test]
    fn missing_score_is_reported() {
        let gt = lbl(0.0, None);
        let p = lbl(0.0, None);
        let err =
            match_detections(&difficulty_filter([&gt], &EASY), &[&p], box_iou, 0.7).unwrap_err();
        assert_eq!(err, MissingScore { index: 0 });
    }
}
