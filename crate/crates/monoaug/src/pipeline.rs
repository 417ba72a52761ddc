use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use monoaug_core::augment::{apply, AugmentConfig, AugmentedSample, OpKind, OpStats, Provenance};
use monoaug_core::{derive_stream, RandomSource, Sample};
use rayon::prelude::*;
use serde::Serialize;

use crate::kitti_io::{load_sample, write_sample, DatasetIndex, KittiError, SplitManifest};

pub const PROVENANCE_FILE: &str = "provenance.jsonl";

/// One step of the schedule, with its fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleEntry {
    pub op: OpKind,
    pub config: AugmentConfig,
}

impl ScheduleEntry {
    pub fn new(op: OpKind) -> Self {
        Self {
            op,
            config: AugmentConfig::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SampleError {
    #[error(transparent)]
    Io(#[from] KittiError),
    #[error(transparent)]
    Augment(#[from] monoaug_core::augment::AugmentError),
    #[error("{op} needs a partner but the split has no other sample")]
    NoPartner { op: OpKind },
}

/// Per-entry counters summed over the split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OpCounters {
    pub op: OpKind,
    /// Samples the entry ran on.
    pub applied: usize,
    pub kept: usize,
    pub rejected: usize,
    pub retention_dropped: usize,
    pub conform_dropped: usize,
}

impl OpCounters {
    fn new(op: OpKind) -> Self {
        Self {
            op,
            applied: 0,
            kept: 0,
            rejected: 0,
            retention_dropped: 0,
            conform_dropped: 0,
        }
    }

    fn add(&mut self, s: &OpStats) {
        self.applied += 1;
        self.kept += s.kept;
        self.rejected += s.rejected;
        self.retention_dropped += s.retention_dropped;
        self.conform_dropped += s.conform_dropped;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailedSample {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipelineReport {
    pub samples_written: usize,
    /// Labels dropped at load because they had no area inside the image.
    pub load_dropped: usize,
    pub ops: Vec<OpCounters>,
    pub failed: Vec<FailedSample>,
}

impl PipelineReport {
    pub fn success(&self) -> bool {
        self.failed.is_empty()
    }
}

impl fmt::Display for PipelineReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "samples written: {}", self.samples_written)?;
        if self.load_dropped > 0 {
            writeln!(f, "labels dropped at load: {}", self.load_dropped)?;
        }
        if !self.ops.is_empty() {
            writeln!(
                f,
                "{:<4} {:<14} {:>8} {:>8} {:>9} {:>10} {:>8}",
                "#", "op", "applied", "kept", "rejected", "retention", "conform"
            )?;
        }
        for (i, c) in self.ops.iter().enumerate() {
            writeln!(
                f,
                "{:<4} {:<14} {:>8} {:>8} {:>9} {:>10} {:>8}",
                i,
                c.op.name(),
                c.applied,
                c.kept,
                c.rejected,
                c.retention_dropped,
                c.conform_dropped
            )?;
        }
        for failed in &self.failed {
            writeln!(f, "failed {}: {}", failed.id, failed.reason)?;
        }
        Ok(())
    }
}

/// Draw `count` ordinals from `0..n` excluding `own`, without replacement
/// while enough candidates remain.
pub fn draw_partners(rng: &mut RandomSource, n: usize, own: usize, count: usize) -> Vec<usize> {
    let candidates: Vec<usize> = (0..n).filter(|&i| i != own).collect();
    let mut pool = candidates.clone();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        if pool.is_empty() {
            pool = candidates.clone();
        }
        let k = rng.below(pool.len() as u64) as usize;
        out.push(pool.remove(k));
    }
    out
}

struct SampleOutcome {
    augmented: AugmentedSample,
    per_op: Vec<OpStats>,
    load_dropped: usize,
}

/// Run the whole schedule on the split member at `ordinal`.
///
/// Each entry acts on the previous entry's output; partners are always the
/// untouched source samples. `stats` and `regions` of the result describe
/// the last entry only.
pub fn augment_one(
    index: &DatasetIndex,
    split: &SplitManifest,
    ordinal: usize,
    schedule: &[ScheduleEntry],
    seed: u64,
) -> Result<AugmentedSample, SampleError> {
    run_one(index, split, ordinal, schedule, seed).map(|o| o.augmented)
}

fn run_one(
    index: &DatasetIndex,
    split: &SplitManifest,
    ordinal: usize,
    schedule: &[ScheduleEntry],
    seed: u64,
) -> Result<SampleOutcome, SampleError> {
    let mut rng = derive_stream(seed, &[ordinal as u64]);
    let (sample, mut load_dropped) = load_sample(index, &split.ids[ordinal])?;
    let mut current = AugmentedSample::from_sample(sample);
    let mut per_op = Vec::with_capacity(schedule.len());
    for entry in schedule {
        let needed = entry.op.partners_needed();
        if needed > 0 && split.ids.len() < 2 {
            return Err(SampleError::NoPartner { op: entry.op });
        }
        let mut partners: Vec<Sample> = Vec::with_capacity(needed);
        for p in draw_partners(&mut rng, split.ids.len(), ordinal, needed) {
            let (s, dropped) = load_sample(index, &split.ids[p])?;
            load_dropped += dropped;
            partners.push(s);
        }
        let refs: Vec<&Sample> = partners.iter().collect();
        let mut step = apply(entry.op, &current.sample, &refs, &entry.config, &mut rng)?;
        per_op.push(step.stats);
        let mut provenance = std::mem::take(&mut current.provenance);
        provenance.append(&mut step.provenance);
        step.provenance = provenance;
        current = step;
    }
    Ok(SampleOutcome {
        augmented: current,
        per_op,
        load_dropped,
    })
}

#[derive(Serialize)]
struct ProvenanceRecord<'a> {
    id: &'a str,
    ops: Vec<ProvenanceStep<'a>>,
}

#[derive(Serialize)]
struct ProvenanceStep<'a> {
    op: OpKind,
    partners: &'a [String],
    draw_digest: String,
}

fn provenance_line(id: &str, steps: &[Provenance]) -> String {
    let record = ProvenanceRecord {
        id,
        ops: steps
            .iter()
            .map(|p| ProvenanceStep {
                op: p.op,
                partners: &p.partners,
                draw_digest: format!("{:016x}", p.draw_digest),
            })
            .collect(),
    };
    serde_json::to_string(&record).expect("provenance serializes")
}

/// Augment every sample of `split` and write the results under `out_root`
/// in KITTI layout, plus one provenance line per written sample.
///
/// Output bytes depend only on the dataset, schedule, seed and split, never
/// on `workers`. A failing sample is listed in the report and skipped; only
/// failures to set up the output tree abort the run.
pub fn run_pipeline(
    index: &DatasetIndex,
    split: &SplitManifest,
    schedule: &[ScheduleEntry],
    seed: u64,
    out_root: &Path,
    workers: usize,
) -> Result<PipelineReport, KittiError> {
    split.validate(index)?;
    fs::create_dir_all(out_root).map_err(|e| KittiError::Io {
        path: out_root.to_owned(),
        source: e,
    })?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    let results: Vec<Result<SampleOutcome, SampleError>> = pool.install(|| {
        (0..split.ids.len())
            .into_par_iter()
            .map(|ordinal| {
                let outcome = run_one(index, split, ordinal, schedule, seed)?;
                write_sample(&outcome.augmented.sample, out_root)?;
                log::debug!("wrote {}", outcome.augmented.sample.id);
                Ok(outcome)
            })
            .collect()
    });

    let mut report = PipelineReport {
        samples_written: 0,
        load_dropped: 0,
        ops: schedule.iter().map(|e| OpCounters::new(e.op)).collect(),
        failed: Vec::new(),
    };
    let mut provenance = String::new();
    for (id, result) in split.ids.iter().zip(results) {
        match result {
            Ok(outcome) => {
                report.samples_written += 1;
                report.load_dropped += outcome.load_dropped;
                for (counters, stats) in report.ops.iter_mut().zip(&outcome.per_op) {
                    counters.add(stats);
                }
                provenance.push_str(&provenance_line(id, &outcome.augmented.provenance));
                provenance.push('\n');
            }
            Err(e) => {
                log::error!("sample {id}: {e}");
                report.failed.push(FailedSample {
                    id: id.clone(),
                    reason: e.to_string(),
                });
            }
        }
    }
    let path = out_root.join(PROVENANCE_FILE);
    let mut file = fs::File::create(&path).map_err(|e| KittiError::Io {
        path: path.clone(),
        source: e,
    })?;
    file.write_all(provenance.as_bytes())
        .map_err(|e| KittiError::Io { path, source: e })?;
    Ok(report)
}
