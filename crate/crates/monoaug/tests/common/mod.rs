//! Fixture generators and naive reference implementations shared by the
//! integration tests. Nothing here calls into the code under test except
//! for plain data types.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use monoaug::core::eval::{ClassThresholds, DifficultyRule, Interpolation, Metric};
use monoaug::core::{Dims3, Location3, ObjectLabel, PixelImage, Rect2D, Sample};
use sha2::{Digest, Sha256};

/// Small splitmix64 generator for fixtures.
pub struct Gen(u64);

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as i64
    }

    pub fn usize(&mut self, lo: usize, hi: usize) -> usize {
        self.int(lo as i64, hi as i64) as usize
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.usize(0, items.len() - 1)]
    }
}

pub const CLASSES: [&str; 4] = ["Car", "Pedestrian", "Cyclist", "Van"];

/// Random label with a box that may stick out of `w` x `h` and random 3D
/// fields. Coordinates are sometimes snapped to half pixels so that box
/// edges land exactly on pixel boundaries.
pub fn random_label(g: &mut Gen, w: f64, h: f64) -> ObjectLabel {
    let snap = g.chance(0.3);
    let mut coord = |lo: f64, hi: f64| {
        let v = g.range(lo, hi);
        if snap {
            (v * 2.0).round() / 2.0
        } else {
            v
        }
    };
    let l = coord(-0.2 * w, 0.9 * w);
    let t = coord(-0.2 * h, 0.9 * h);
    let r = l + coord(0.5, 0.6 * w);
    let b = t + coord(0.5, 0.6 * h);
    let class = if g.chance(0.1) {
        "DontCare"
    } else {
        *g.pick(&CLASSES)
    };
    let mut label = ObjectLabel::new_2d(class, Rect2D::new(l, t, r, b));
    label.truncation = g.range(0.0, 1.0);
    label.occlusion = g.int(0, 3) as i32;
    label.alpha = g.range(-PI, PI);
    label.dims3d = Dims3 {
        height: g.range(0.5, 3.0),
        width: g.range(0.5, 2.5),
        length: g.range(0.5, 5.0),
    };
    label.location3d = Location3 {
        x: g.range(-20.0, 20.0),
        y: g.range(0.0, 3.0),
        z: g.range(2.0, 60.0),
    };
    label.rotation_y = g.range(-PI, PI);
    label
}

pub fn random_image(g: &mut Gen, w: usize, h: usize) -> PixelImage {
    let data = (0..w * h * 3).map(|_| g.next_u64() as u8).collect();
    PixelImage::new(w, h, data).unwrap()
}

pub fn random_sample(g: &mut Gen, id: &str, w: usize, h: usize, max_labels: usize) -> Sample {
    let n = g.usize(0, max_labels);
    let labels = (0..n)
        .map(|_| random_label(g, w as f64, h as f64))
        .collect();
    Sample::new(id, random_image(g, w, h), labels)
}

/// 2D IoU from interval overlaps.
pub fn naive_iou(a: &Rect2D, b: &Rect2D) -> f64 {
    let ix = (a.right.min(b.right) - a.left.max(b.left)).max(0.0);
    let iy = (a.bottom.min(b.bottom) - a.top.max(b.top)).max(0.0);
    let inter = ix * iy;
    let area = |r: &Rect2D| (r.right - r.left).max(0.0) * (r.bottom - r.top).max(0.0);
    let union = area(a) + area(b) - inter;
    if inter > 0.0 && union > 0.0 {
        inter / union
    } else {
        0.0
    }
}

/// Is pixel `(x, y)` covered by the box under the floor/ceil rule?
pub fn covers(r: &Rect2D, x: usize, y: usize) -> bool {
    let (x, y) = (x as f64, y as f64);
    r.left.floor() <= x && x < r.right.ceil() && r.top.floor() <= y && y < r.bottom.ceil()
}

/// Partner boxes that survive cropping to `w` x `h` (at least 40% of their
/// area left), clipped.
pub fn naive_conform_labels(
    labels: &[ObjectLabel],
    w: f64,
    h: f64,
    same_size: bool,
) -> Vec<ObjectLabel> {
    if same_size {
        return labels.to_vec();
    }
    labels
        .iter()
        .filter_map(|l| {
            let b = &l.box2d;
            let (cl, ct) = (b.left.max(0.0), b.top.max(0.0));
            let (cr, cb) = (b.right.min(w).max(cl), b.bottom.min(h).max(ct));
            let area = (b.right - b.left).max(0.0) * (b.bottom - b.top).max(0.0);
            let kept = (cr - cl) * (cb - ct);
            (area > 0.0 && kept / area >= 0.4).then(|| {
                let mut l = l.clone();
                l.box2d = Rect2D::new(cl, ct, cr, cb);
                l
            })
        })
        .collect()
}

/// Per-pixel Box-MixUp (`paste == false`) or Box-Cut-Paste reference.
pub fn naive_mix(
    a: &Sample,
    b: &Sample,
    threshold: f64,
    paste: bool,
) -> (Vec<u8>, Vec<ObjectLabel>) {
    let (w, h) = (a.image.width(), a.image.height());
    let same = b.image.dimensions() == (w, h);
    let partner = naive_conform_labels(&b.labels, w as f64, h as f64, same);
    let kept: Vec<ObjectLabel> = partner
        .into_iter()
        .filter(|l| l.class_name != "DontCare")
        .filter(|l| {
            a.labels
                .iter()
                .filter(|r| r.class_name != "DontCare")
                .all(|r| naive_iou(&r.box2d, &l.box2d) < threshold)
        })
        .collect();
    let mut out = Vec::with_capacity(w * h * 3);
    for y in 0..h {
        for x in 0..w {
            let on = kept.iter().any(|l| covers(&l.box2d, x, y));
            for c in 0..3 {
                let pa = a.image.pixel(x, y)[c];
                let pb = if x < b.image.width() && y < b.image.height() {
                    b.image.pixel(x, y)[c]
                } else {
                    0
                };
                let v = match (on, paste) {
                    (false, _) => pa,
                    (true, true) => pb,
                    (true, false) => (0.5 * pa as f64 + 0.5 * pb as f64).round() as u8,
                };
                out.push(v);
            }
        }
    }
    let mut labels = a.labels.clone();
    labels.extend(kept);
    (out, labels)
}

/// Fraction of `b` inside the tile, from interval lengths.
pub fn naive_overlap_fraction(b: &Rect2D, tile: &Rect2D) -> f64 {
    let ix = (b.right.min(tile.right) - b.left.max(tile.left)).max(0.0);
    let iy = (b.bottom.min(tile.bottom) - b.top.max(tile.top)).max(0.0);
    let area = (b.right - b.left).max(0.0) * (b.bottom - b.top).max(0.0);
    if area > 0.0 {
        ix * iy / area
    } else {
        0.0
    }
}

// ---------------------------------------------------------------------------
// Brute-force detection evaluation

fn counted(rule: &DifficultyRule, l: &ObjectLabel) -> bool {
    l.class_name != "DontCare"
        && l.box2d.bottom - l.box2d.top >= rule.min_box_height
        && l.occlusion <= rule.max_occlusion
        && l.truncation <= rule.max_truncation
}

pub struct Frame {
    pub gt: Vec<ObjectLabel>,
    pub pred: Vec<ObjectLabel>,
}

/// Outcome of every prediction of one frame, recomputed from scratch for
/// each prediction by replaying all predictions ranked before it.
/// `Some(true)` = TP, `Some(false)` = FP, `None` = ignored.
fn frame_outcomes(
    gts: &[&ObjectLabel],
    preds: &[&ObjectLabel],
    rule: &DifficultyRule,
    iou: &dyn Fn(&ObjectLabel, &ObjectLabel) -> f64,
    threshold: f64,
) -> Vec<(f64, Option<bool>)> {
    // rank: higher score first, ties by input position
    let mut rank: Vec<usize> = (0..preds.len()).collect();
    rank.sort_by(|&i, &j| {
        let (si, sj) = (preds[i].score.unwrap(), preds[j].score.unwrap());
        sj.partial_cmp(&si).unwrap().then(i.cmp(&j))
    });
    let mut result = Vec::new();
    for (pos, &pi) in rank.iter().enumerate() {
        let mut taken = vec![false; gts.len()];
        let mut outcome = None;
        for &qi in &rank[..=pos] {
            let q = preds[qi];
            let mut best: Option<(usize, f64)> = None;
            for (g, gt) in gts.iter().enumerate() {
                if taken[g] || !counted(rule, gt) {
                    continue;
                }
                let v = iou(gt, q);
                if v >= threshold && best.is_none_or(|(_, b)| v > b) {
                    best = Some((g, v));
                }
            }
            outcome = match best {
                Some((g, _)) => {
                    taken[g] = true;
                    Some(true)
                }
                None if gts
                    .iter()
                    .any(|gt| !counted(rule, gt) && iou(gt, q) >= threshold) =>
                {
                    None
                }
                None => Some(false),
            };
        }
        result.push((preds[pi].score.unwrap(), outcome));
    }
    result
}

pub fn brute_ap(
    frames: &[Frame],
    class: &str,
    rule: &DifficultyRule,
    metric: Metric,
    threshold: f64,
    mode: Interpolation,
) -> f64 {
    let iou = |a: &ObjectLabel, b: &ObjectLabel| metric.iou(a, b);
    let mut all: Vec<(f64, usize, usize, Option<bool>)> = Vec::new();
    let mut npos = 0usize;
    for (fi, f) in frames.iter().enumerate() {
        let gts: Vec<&ObjectLabel> =
            f.gt.iter()
                .filter(|l| l.class_name == class || l.class_name == "DontCare")
                .collect();
        npos += gts.iter().filter(|g| counted(rule, g)).count();
        let preds: Vec<&ObjectLabel> = f.pred.iter().filter(|p| p.class_name == class).collect();
        for (k, (s, o)) in frame_outcomes(&gts, &preds, rule, &iou, threshold)
            .into_iter()
            .enumerate()
        {
            all.push((s, fi, k, o));
        }
    }
    if npos == 0 {
        return 0.0;
    }
    all.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    let mut points = Vec::new();
    let (mut tp, mut fp) = (0usize, 0usize);
    for (_, _, _, o) in &all {
        match o {
            Some(true) => tp += 1,
            Some(false) => fp += 1,
            None => continue,
        }
        points.push((tp as f64 / npos as f64, tp as f64 / (tp + fp) as f64));
    }
    let levels: Vec<f64> = match mode {
        Interpolation::R40 => (1..=40).map(|k| k as f64 / 40.0).collect(),
        Interpolation::R11 => (0..=10).map(|k| k as f64 / 10.0).collect(),
    };
    let total: f64 = levels
        .iter()
        .map(|&r| {
            points
                .iter()
                .filter(|(rec, _)| *rec >= r)
                .map(|(_, p)| *p)
                .fold(0.0, f64::max)
        })
        .sum();
    total / levels.len() as f64
}

pub fn class_threshold(t: &ClassThresholds, class: &str) -> f64 {
    match class {
        "Car" => t.car,
        "Pedestrian" => t.pedestrian,
        _ => t.cyclist,
    }
}

/// Ground truth plus detections: jittered copies of some objects, duplicates,
/// and spurious boxes, with occasionally tied scores.
pub fn detection_fixture(g: &mut Gen) -> Vec<Frame> {
    let frames = g.usize(1, 5);
    (0..frames)
        .map(|_| {
            let n = g.usize(0, 10);
            let mut gt = Vec::new();
            for _ in 0..n {
                let class = *g.pick(&["Car", "Pedestrian", "Cyclist", "DontCare", "Van"]);
                let top = g.range(100.0, 200.0);
                let mut l = ObjectLabel::new_2d(
                    class,
                    Rect2D::new(100.0, top, 160.0, top + g.range(20.0, 90.0)),
                );
                l.truncation = *g.pick(&[0.0, 0.1, 0.2, 0.4, 0.8]);
                l.occlusion = g.int(0, 3) as i32;
                l.dims3d = Dims3 {
                    height: g.range(1.4, 1.8),
                    width: g.range(0.6, 1.8),
                    length: g.range(0.8, 4.5),
                };
                l.location3d = Location3 {
                    x: g.range(-15.0, 15.0),
                    y: g.range(1.4, 1.8),
                    z: g.range(5.0, 50.0),
                };
                l.rotation_y = g.range(-3.1, 3.1);
                gt.push(l);
            }
            let mut pred = Vec::new();
            for l in &gt {
                if l.class_name == "DontCare" {
                    continue;
                }
                let copies = *g.pick(&[0, 1, 1, 1, 2]);
                for _ in 0..copies {
                    let mut p = l.clone();
                    let jitter = *g.pick(&[0.0, 0.05, 0.2, 0.6]);
                    p.location3d.x += g.range(-jitter, jitter);
                    p.location3d.z += g.range(-jitter, jitter);
                    p.rotation_y += g.range(-jitter, jitter);
                    p.dims3d.length *= 1.0 + g.range(-jitter, jitter) * 0.3;
                    let score = if g.chance(0.2) {
                        0.5
                    } else {
                        (g.range(0.0, 1.0) * 100.0).round() / 100.0
                    };
                    pred.push(p.with_score(score));
                }
            }
            for _ in 0..g.usize(0, 3) {
                let mut p = random_label(g, 1242.0, 375.0);
                p.class_name = (*g.pick(&["Car", "Pedestrian", "Cyclist"])).to_owned();
                pred.push(p.with_score(g.range(0.0, 1.0)));
            }
            Frame { gt, pred }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Dataset trees

/// SHA-256 over every file below `root`: sorted relative paths and contents.
pub fn tree_digest(root: &Path) -> String {
    fn walk(dir: &Path, root: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for e in fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(&p, root, out);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, fs::read(&p).unwrap());
            }
        }
    }
    let mut files = BTreeMap::new();
    walk(root, root, &mut files);
    let mut h = Sha256::new();
    for (name, bytes) in &files {
        h.update((name.len() as u64).to_le_bytes());
        h.update(name.as_bytes());
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Write `n` random samples of mixed sizes with on-image boxes in KITTI
/// layout.
pub fn write_fixture(root: &Path, n: usize, seed: u64) {
    let mut g = Gen::new(seed);
    for i in 0..n {
        let (w, h) = (g.usize(60, 64), g.usize(44, 48));
        let mut s = random_sample(&mut g, &format!("{i:06}"), w, h, 6);
        for l in &mut s.labels {
            l.box2d = l.box2d.clip_to(w as f64, h as f64);
            l.box2d = Rect2D::new(
                (l.box2d.left * 100.0).round() / 100.0,
                (l.box2d.top * 100.0).round() / 100.0,
                (l.box2d.right * 100.0).round() / 100.0,
                (l.box2d.bottom * 100.0).round() / 100.0,
            );
        }
        s.labels.retain(|l| l.box2d.area() > 0.0);
        monoaug::kitti_io::write_sample(&s, root).unwrap();
    }
}
