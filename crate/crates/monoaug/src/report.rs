//! Human-readable tables and JSON documents for evaluation results and
//! class-frequency statistics.

use std::fmt::Write;

use monoaug_core::eval::{ClassMap, ClassThresholds, Difficulty, EvalReport, FrequencyRow, Metric};
use monoaug_core::EvalClass;
use serde_json::{json, Value};

fn pct(v: f64) -> String {
    format!("{:.2}", 100.0 * v)
}

fn thresholds_label(t: &ClassThresholds) -> String {
    EvalClass::ALL
        .iter()
        .map(|&c| format!("{}={}", c.key(), t.get(c)))
        .collect::<Vec<_>>()
        .join(",")
}

/// One AP table per (threshold set, metric), with a row per difficulty.
/// Values are percentages.
pub fn eval_table(report: &EvalReport) -> String {
    let mut out = String::new();
    let metrics: Vec<Metric> = Metric::ALL
        .into_iter()
        .filter(|m| report.entries.iter().any(|e| e.metric == *m))
        .collect();
    let difficulties: Vec<Difficulty> = report.frequencies.iter().map(|r| r.difficulty).collect();
    for (set, t) in report.thresholds.iter().enumerate() {
        for &metric in &metrics {
            let _ = writeln!(
                out,
                "AP_{} ({}) IoU {}",
                metric.name().to_uppercase(),
                report.interpolation.name(),
                thresholds_label(t)
            );
            let _ = writeln!(
                out,
                "{:<10} {:>10} {:>10} {:>10} {:>8} {:>9}",
                "difficulty", "Car", "Pedestrian", "Cyclist", "mAP", "ICFW mAP"
            );
            for &d in &difficulties {
                let cell = |c| {
                    let e = report.entries.iter().find(|e| {
                        e.class == c && e.difficulty == d && e.metric == metric && e.set == set
                    });
                    match e {
                        Some(e) if e.no_positives => "n/a".to_owned(),
                        Some(e) => pct(e.ap),
                        None => "-".to_owned(),
                    }
                };
                let (map, icfw) = match report.summary(d, metric, set) {
                    Some(s) => (pct(s.map), s.icfw_map.map_or("-".to_owned(), pct)),
                    None => ("-".to_owned(), "-".to_owned()),
                };
                let _ = writeln!(
                    out,
                    "{:<10} {:>10} {:>10} {:>10} {:>8} {:>9}",
                    d.name(),
                    cell(EvalClass::Car),
                    cell(EvalClass::Pedestrian),
                    cell(EvalClass::Cyclist),
                    map,
                    icfw
                );
            }
            out.push('\n');
        }
    }
    out
}

fn frequency_json(row: &FrequencyRow) -> Value {
    json!({
        "difficulty": row.difficulty,
        "counts": row.counts,
        "frequencies": row.frequencies,
        "weights": row.weights,
        "error": row.error.map(|e| e.to_string()),
    })
}

/// Machine-readable report: one record per (class, difficulty, metric,
/// threshold) plus the summary rows and the weights they used.
pub fn eval_json(report: &EvalReport) -> Value {
    let records: Vec<Value> = report
        .entries
        .iter()
        .map(|e| {
            json!({
                "class": e.class,
                "difficulty": e.difficulty,
                "metric": e.metric,
                "threshold_set": e.set,
                "threshold": e.threshold,
                "ap": e.ap,
                "no_positives": e.no_positives,
            })
        })
        .collect();
    let summaries: Vec<Value> = report
        .summaries
        .iter()
        .map(|s| {
            json!({
                "difficulty": s.difficulty,
                "metric": s.metric,
                "threshold_set": s.set,
                "map": s.map,
                "icfw_map": s.icfw_map,
            })
        })
        .collect();
    json!({
        "interpolation": report.interpolation,
        "threshold_sets": report.thresholds,
        "records": records,
        "summaries": summaries,
        "frequencies": report.frequencies.iter().map(frequency_json).collect::<Vec<_>>(),
    })
}

fn pair(freqs: Option<&ClassMap<f64>>, weights: Option<&ClassMap<f64>>, c: EvalClass) -> String {
    let f = freqs
        .and_then(|m| m.get(&c))
        .map_or("-".to_owned(), |v| format!("{v:.2}"));
    let w = weights
        .and_then(|m| m.get(&c))
        .map_or("-".to_owned(), |v| format!("{v:.2}"));
    format!("{f}/{w}")
}

/// Frequency/weight pairs per difficulty and class.
pub fn stats_table(rows: &[FrequencyRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:>11} {:>11} {:>11}   (frequency/weight)",
        "difficulty", "Car", "Pedestrian", "Cyclist"
    );
    for row in rows {
        let f = row.frequencies.as_ref();
        let w = row.weights.as_ref();
        let _ = writeln!(
            out,
            "{:<10} {:>11} {:>11} {:>11}",
            row.difficulty.name(),
            pair(f, w, EvalClass::Car),
            pair(f, w, EvalClass::Pedestrian),
            pair(f, w, EvalClass::Cyclist)
        );
    }
    for row in rows {
        let counts: Vec<String> = row
            .counts
            .iter()
            .map(|(c, n)| format!("{}={n}", c.key()))
            .collect();
        let _ = write!(
            out,
            "{} counts: {}",
            row.difficulty.name(),
            counts.join(" ")
        );
        if let Some(e) = &row.error {
            let _ = write!(out, "  error: {e}");
        }
        out.push('\n');
    }
    out
}

pub fn stats_json(rows: &[FrequencyRow]) -> Value {
    Value::Array(rows.iter().map(frequency_json).collect())
}
