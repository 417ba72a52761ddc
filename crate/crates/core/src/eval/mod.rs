//! Detection scoring: difficulty filtering, greedy matching, interpolated
//! average precision, mAP and the inverse-class-frequency weighted mAP.

mod ap;
mod difficulty;
mod matching;
mod metrics;
mod report;

pub use ap::{average_precision, ApValue, Interpolation, PrCurve};
pub use difficulty::{difficulty_filter, Difficulty, DifficultyPartition, DifficultyRule};
pub use matching::{match_detections, FrameMatches, MissingScore, Outcome, ScoredOutcome};
pub use metrics::{
    class_counts, class_frequencies, frequencies_from_counts, icfw_map, icfw_weights, mean_ap,
    ClassMap, MetricsError,
};
pub use report::{
    evaluate, frequency_row, ApEntry, ClassThresholds, EvalConfig, EvalError, EvalFrame,
    EvalReport, FrequencyRow, Metric, SummaryEntry,
};
