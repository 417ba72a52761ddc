use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::ap::{average_precision, Interpolation, PrCurve};
use super::difficulty::{difficulty_filter, Difficulty, DifficultyRule};
use super::matching::{match_detections, FrameMatches};
use super::metrics::{
    class_counts, frequencies_from_counts, icfw_map, icfw_weights, mean_ap, ClassMap, MetricsError,
};
use crate::geometry::{iou_3d, iou_bev, to_bev, to_box3d};
use crate::label::{EvalClass, ObjectLabel};

/// Overlap measure used for matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Metric {
    #[cfg_attr(feature = "serde", serde(rename = "3d"))]
    ThreeD,
    #[cfg_attr(feature = "serde", serde(rename = "bev"))]
    Bev,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::ThreeD, Metric::Bev];

    pub fn name(self) -> &'static str {
        match self {
            Metric::ThreeD => "3d",
            Metric::Bev => "bev",
        }
    }

    pub fn iou(self, a: &ObjectLabel, b: &ObjectLabel) -> f64 {
        match self {
            Metric::ThreeD => iou_3d(&to_box3d(a), &to_box3d(b)),
            Metric::Bev => iou_bev(&to_bev(a), &to_bev(b)),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// IoU threshold for each scored class.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ClassThresholds {
    pub car: f64,
    pub pedestrian: f64,
    pub cyclist: f64,
}

impl Default for ClassThresholds {
    /// 0.7 for cars, 0.25 for pedestrians and cyclists.
    fn default() -> Self {
        Self {
            car: 0.7,
            pedestrian: 0.25,
            cyclist: 0.25,
        }
    }
}

impl ClassThresholds {
    pub fn uniform(t: f64) -> Self {
        Self {
            car: t,
            pedestrian: t,
            cyclist: t,
        }
    }

    pub fn get(&self, class: EvalClass) -> f64 {
        match class {
            EvalClass::Car => self.car,
            EvalClass::Pedestrian => self.pedestrian,
            EvalClass::Cyclist => self.cyclist,
        }
    }

    pub fn set(&mut self, class: EvalClass, t: f64) {
        match class {
            EvalClass::Car => self.car = t,
            EvalClass::Pedestrian => self.pedestrian = t,
            EvalClass::Cyclist => self.cyclist = t,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    /// Each entry produces a full table.
    pub thresholds: Vec<ClassThresholds>,
    pub interpolation: Interpolation,
    pub rules: Vec<DifficultyRule>,
    pub metrics: Vec<Metric>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            thresholds: alloc::vec![ClassThresholds::default()],
            interpolation: Interpolation::R40,
            rules: DifficultyRule::kitti_all().to_vec(),
            metrics: Metric::ALL.to_vec(),
        }
    }
}

/// Ground truth and predictions of one image.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalFrame {
    pub id: String,
    pub ground_truth: Vec<ObjectLabel>,
    pub predictions: Vec<ObjectLabel>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    MissingScore { frame: String, index: usize },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::MissingScore { frame, index } => {
                write!(
                    f,
                    "frame {frame}: prediction {index} has no confidence score"
                )
            }
        }
    }
}

impl core::error::Error for EvalError {}

#[derive(Debug, Clone, PartialEq)]
pub struct ApEntry {
    pub class: EvalClass,
    pub difficulty: Difficulty,
    pub metric: Metric,
    /// Index into [`EvalReport::thresholds`].
    pub set: usize,
    pub threshold: f64,
    pub ap: f64,
    pub no_positives: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryEntry {
    pub difficulty: Difficulty,
    pub metric: Metric,
    pub set: usize,
    pub map: f64,
    /// Absent when the weights for this difficulty are undefined.
    pub icfw_map: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyRow {
    pub difficulty: Difficulty,
    pub counts: ClassMap<usize>,
    pub frequencies: Option<ClassMap<f64>>,
    pub weights: Option<ClassMap<f64>>,
    /// Why frequencies or weights are missing.
    pub error: Option<MetricsError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub interpolation: Interpolation,
    pub thresholds: Vec<ClassThresholds>,
    pub entries: Vec<ApEntry>,
    pub summaries: Vec<SummaryEntry>,
    pub frequencies: Vec<FrequencyRow>,
}

impl EvalReport {
    pub fn ap(
        &self,
        class: EvalClass,
        difficulty: Difficulty,
        metric: Metric,
        set: usize,
    ) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| {
                e.class == class && e.difficulty == difficulty && e.metric == metric && e.set == set
            })
            .map(|e| e.ap)
    }

    pub fn class_aps(&self, difficulty: Difficulty, metric: Metric, set: usize) -> ClassMap<f64> {
        self.entries
            .iter()
            .filter(|e| e.difficulty == difficulty && e.metric == metric && e.set == set)
            .map(|e| (e.class, e.ap))
            .collect()
    }

    pub fn weights(&self, difficulty: Difficulty) -> Option<&ClassMap<f64>> {
        self.frequencies
            .iter()
            .find(|r| r.difficulty == difficulty)
            .and_then(|r| r.weights.as_ref())
    }

    pub fn summary(
        &self,
        difficulty: Difficulty,
        metric: Metric,
        set: usize,
    ) -> Option<&SummaryEntry> {
        self.summaries
            .iter()
            .find(|s| s.difficulty == difficulty && s.metric == metric && s.set == set)
    }

    /// Largest gap between a stored mAP / weighted mAP and its recomputation
    /// from the stored per-class APs and weights. Infinite when a summary
    /// cannot be recomputed at all.
    pub fn consistency_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for s in &self.summaries {
            let aps = self.class_aps(s.difficulty, s.metric, s.set);
            match mean_ap(&aps) {
                Ok(m) => worst = worst.max((m - s.map).abs()),
                Err(_) => return f64::INFINITY,
            }
            let recomputed = self.weights(s.difficulty).map(|w| icfw_map(&aps, w));
            match (s.icfw_map, recomputed) {
                (None, None) => {}
                (Some(v), Some(Ok(r))) => worst = worst.max((v - r).abs()),
                _ => return f64::INFINITY,
            }
        }
        for row in &self.frequencies {
            if let Some(w) = &row.weights {
                worst = worst.max((w.values().sum::<f64>() - 1.0).abs());
            }
        }
        worst
    }
}

/// Counts, frequencies and weights of `labels` at one difficulty. Failures
/// are recorded in the row rather than returned.
pub fn frequency_row<'a, I>(labels: I, rule: &DifficultyRule) -> FrequencyRow
where
    I: IntoIterator<Item = &'a ObjectLabel>,
{
    let counts = class_counts(labels, rule);
    let mut row = FrequencyRow {
        difficulty: rule.difficulty,
        counts,
        frequencies: None,
        weights: None,
        error: None,
    };
    match frequencies_from_counts(&row.counts, rule.difficulty) {
        Ok(f) => {
            match icfw_weights(&f) {
                Ok(w) => row.weights = Some(w),
                Err(e) => row.error = Some(e),
            }
            row.frequencies = Some(f);
        }
        Err(e) => row.error = Some(e),
    }
    row
}

/// Score predictions against ground truth for every threshold set, scored
/// class, difficulty and metric in `cfg`.
///
/// For class `c`, a frame's ground truth is its `c` objects plus its
/// DontCare regions, and its predictions are its `c` detections.
pub fn evaluate(frames: &[EvalFrame], cfg: &EvalConfig) -> Result<EvalReport, EvalError> {
    for f in frames {
        if let Some(index) = f.predictions.iter().position(|p| p.score.is_none()) {
            return Err(EvalError::MissingScore {
                frame: f.id.clone(),
                index,
            });
        }
    }

    let frequencies: Vec<FrequencyRow> = cfg
        .rules
        .iter()
        .map(|r| frequency_row(frames.iter().flat_map(|f| f.ground_truth.iter()), r))
        .collect();

    let mut entries = Vec::new();
    let mut summaries = Vec::new();
    for (set, thresholds) in cfg.thresholds.iter().enumerate() {
        for rule in &cfg.rules {
            for &metric in &cfg.metrics {
                let mut aps = ClassMap::new();
                for class in EvalClass::ALL {
                    let threshold = thresholds.get(class);
                    let mut matches: Vec<FrameMatches> = Vec::with_capacity(frames.len());
                    for f in frames {
                        let gts = f
                            .ground_truth
                            .iter()
                            .filter(|l| l.is_dont_care() || l.eval_class() == Some(class));
                        let part = difficulty_filter(gts, rule);
                        let preds: Vec<&ObjectLabel> = f
                            .predictions
                            .iter()
                            .filter(|p| p.eval_class() == Some(class))
                            .collect();
                        let m = match_detections(&part, &preds, |g, p| metric.iou(g, p), threshold)
                            .expect("scores checked above");
                        matches.push(m);
                    }
                    let value =
                        average_precision(&PrCurve::from_frames(&matches), cfg.interpolation);
                    aps.insert(class, value.ap);
                    entries.push(ApEntry {
                        class,
                        difficulty: rule.difficulty,
                        metric,
                        set,
                        threshold,
                        ap: value.ap,
                        no_positives: value.no_positives,
                    });
                }
                let weights = frequencies
                    .iter()
                    .find(|r| r.difficulty == rule.difficulty)
                    .and_then(|r| r.weights.as_ref());
                summaries.push(SummaryEntry {
                    difficulty: rule.difficulty,
                    metric,
                    set,
                    map: mean_ap(&aps).expect("all classes scored"),
                    icfw_map: weights.map(|w| icfw_map(&aps, w).expect("same class set")),
                });
            }
        }
    }
    Ok(EvalReport {
        interpolation: cfg.interpolation,
        thresholds: cfg.thresholds.clone(),
        entries,
        summaries,
        frequencies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect2D;
    use crate::label::{Dims3, Location3};
    use alloc::format;
    use alloc::vec;

    fn object(class: EvalClass, x: f64, z: f64) -> ObjectLabel {
        let mut l =
            ObjectLabel::new_2d(class.kitti_name(), Rect2D::new(100.0, 100.0, 160.0, 200.0));
        l.dims3d = Dims3 {
            height: 1.6,
            width: 1.7,
            length: 4.0,
        };
        l.location3d = Location3 { x, y: 1.6, z };
        l
    }

    fn perfect_frames() -> Vec<EvalFrame> {
        (0..3)
            .map(|i| {
                let gt: Vec<ObjectLabel> = EvalClass::ALL
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| object(c, k as f64 * 10.0, 20.0 + i as f64))
                    .collect();
                let preds = gt.iter().cloned().map(|l| l.with_score(1.0)).collect();
                EvalFrame {
                    id: format!("{i:06}"),
                    ground_truth: gt,
                    predictions: preds,
                }
            })
            .collect()
    }

    #[test]
    fn perfect_detector_scores_one() {
        let report = evaluate(&perfect_frames(), &EvalConfig::default()).unwrap();
        assert!(report.entries.iter().all(|e| e.ap == 1.0));
        for s in &report.summaries {
            assert_eq!(s.map, 1.0);
            assert_eq!(s.icfw_map, Some(1.0));
        }
        assert!(report.consistency_deviation() <= 1e-12);
    }

    #[test]
    fn empty_predictions_score_zero() {
        let mut frames = perfect_frames();
        frames.iter_mut().for_each(|f| f.predictions.clear());
        let report = evaluate(&frames, &EvalConfig::default()).unwrap();
        assert!(report
            .entries
            .iter()
            .all(|e| e.ap == 0.0 && !e.no_positives));
    }

    #[test]
    fn missing_score_names_the_frame() {
        let mut frames = perfect_frames();
        frames[1].predictions[2].score = None;
        assert_eq!(
            evaluate(&frames, &EvalConfig::default()),
            Err(EvalError::MissingScore {
                frame: "000001".into(),
                index: 2
            })
        );
    }

    #[test]
    fn threshold_sets_produce_separate_tables() {
        let cfg = EvalConfig {
            thresholds: vec![ClassThresholds::uniform(0.5), ClassThresholds::uniform(0.7)],
            ..EvalConfig::default()
        };
        let report = evaluate(&perfect_frames(), &cfg).unwrap();
        assert_eq!(report.entries.len(), 2 * 3 * 3 * 2);
        assert_eq!(report.summaries.len(), 2 * 3 * 2);
        assert_eq!(
            report.ap(EvalClass::Car, Difficulty::Hard, Metric::Bev, 1),
            Some(1.0)
        );
    }

    #[test]
    fn single_class_split_has_no_weights() {
        let frames = vec![EvalFrame {
            id: "0".into(),
            ground_truth: vec![object(EvalClass::Car, 0.0, 10.0)],
            predictions: vec![object(EvalClass::Car, 0.0, 10.0).with_score(0.5)],
        }];
        let report = evaluate(&frames, &EvalConfig::default()).unwrap();
        let row = &report.frequencies[0];
        assert_eq!(
            row.error,
            Some(MetricsError::ZeroFrequency(EvalClass::Pedestrian))
        );
        assert!(report.summaries.iter().all(|s| s.icfw_map.is_none()));
        assert!(report.consistency_deviation() <= 1e-12);
    }

    #[test]
    fn shifted_prediction_fails_strict_threshold() {
        let gt = object(EvalClass::Car, 0.0, 10.0);
        let mut pred = gt.clone().with_score(0.9);
        // 1 m along a 4 m car: BEV IoU 3/5
        pred.location3d.x += 1.0;
        let frames = vec![EvalFrame {
            id: "0".into(),
            ground_truth: vec![gt],
            predictions: vec![pred],
        }];
        let cfg = EvalConfig {
            thresholds: vec![ClassThresholds::uniform(0.7), ClassThresholds::uniform(0.5)],
            ..EvalConfig::default()
        };
        let report = evaluate(&frames, &cfg).unwrap();
        assert_eq!(
            report.ap(EvalClass::Car, Difficulty::Easy, Metric::Bev, 0),
            Some(0.0)
        );
        assert_eq!(
            report.ap(EvalClass::Car, Difficulty::Easy, Metric::Bev, 1),
            Some(1.0)
        );
    }
}
