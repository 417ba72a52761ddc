//! Box-MixUp and Box-Cut-Paste.
//!
//! Both take a reference sample A and a partner B, keep only the partner
//! boxes that pass the IoU check against A's boxes, rasterize the kept
//! boxes into a mask and combine the images under it:
//!
//! * mixup: `round(0.5 * a + 0.5 * b)` on the mask, `a` elsewhere
//! * cut-paste: `b` on the mask, `a` elsewhere
//!
//! The output labels are A's labels followed by the kept partner labels.

use alloc::vec;
use alloc::vec::Vec;

use super::config::{MixConfig, DEFAULT_RETENTION};
use super::{AugmentedSample, OpKind, OpStats, Provenance};
use crate::geometry::iou_2d;
use crate::image::CHANNELS;
use crate::label::{ObjectLabel, Sample};
use crate::mask::{build_box_mask, BoxMask};

/// Partner labels whose 2D IoU with every non-DontCare reference box is
/// strictly below `iou_threshold`; with no reference boxes every partner
/// passes. DontCare partners are never kept. Order is preserved.
pub fn filter_partner_boxes(
    reference: &[ObjectLabel],
    incoming: &[ObjectLabel],
    iou_threshold: f64,
) -> Vec<ObjectLabel> {
    incoming
        .iter()
        .filter(|b| !b.is_dont_care())
        .filter(|b| {
            reference
                .iter()
                .filter(|a| !a.is_dont_care())
                .all(|a| iou_2d(&a.box2d, &b.box2d) < iou_threshold)
        })
        .cloned()
        .collect()
}

/// Crop/zero-pad `partner` at the bottom-right to `width` x `height`.
/// Boxes are clipped to the new extent; a box keeps its place only when at
/// least `retention` of its original area survives. Returns the conformed
/// sample and the number of dropped boxes.
pub fn conform_sample(
    partner: &Sample,
    width: usize,
    height: usize,
    retention: f64,
) -> (Sample, usize) {
    if partner.image.dimensions() == (width, height) {
        return (partner.clone(), 0);
    }
    let image = partner.image.conform(width, height);
    let mut dropped = 0;
    let labels = partner
        .labels
        .iter()
        .filter_map(|l| {
            let clipped = l.box2d.clip_to(width as f64, height as f64);
            let area = l.box2d.area();
            if area > 0.0 && clipped.area() / area >= retention {
                let mut kept = l.clone();
                kept.box2d = clipped;
                Some(kept)
            } else {
                dropped += 1;
                None
            }
        })
        .collect();
    (Sample::new(partner.id.clone(), image, labels), dropped)
}

#[derive(Clone, Copy)]
enum Blend {
    Average,
    Paste,
}

fn combine(a: &Sample, b: &Sample, cfg: &MixConfig, blend: Blend, op: OpKind) -> AugmentedSample {
    let (w, h) = a.image.dimensions();
    let (b, conform_dropped) = conform_sample(b, w, h, DEFAULT_RETENTION);
    let candidates = b.labels.iter().filter(|l| !l.is_dont_care()).count();
    let kept = filter_partner_boxes(&a.labels, &b.labels, cfg.effective_threshold());
    let mask = build_box_mask(&kept, w, h);

    let mut image = a.image.clone();
    apply_under_mask(image.data_mut(), b.image.data(), &mask, blend);

    let mut labels = Vec::with_capacity(a.labels.len() + kept.len());
    labels.extend_from_slice(&a.labels);
    let kept_count = kept.len();
    labels.extend(kept);

    let mut out = AugmentedSample::from_sample(Sample::new(a.id.clone(), image, labels));
    out.stats = OpStats {
        kept: kept_count,
        rejected: candidates - kept_count,
        conform_dropped,
        ..OpStats::default()
    };
    out.provenance.push(Provenance {
        op,
        partners: vec![b.id.clone()],
        draw_digest: 0,
    });
    out
}

fn apply_under_mask(dst: &mut [u8], src: &[u8], mask: &BoxMask, blend: Blend) {
    for (i, &on) in mask.bits().iter().enumerate() {
        if !on {
            continue;
        }
        let o = i * CHANNELS;
        for c in o..o + CHANNELS {
            dst[c] = match blend {
                // round half away from zero of (a + b) / 2
                Blend::Average => ((u16::from(dst[c]) + u16::from(src[c]) + 1) >> 1) as u8,
                Blend::Paste => src[c],
            };
        }
    }
}

pub fn box_mixup(a: &Sample, b: &Sample, cfg: &MixConfig) -> AugmentedSample {
    combine(a, b, cfg, Blend::Average, OpKind::BoxMixup)
}

pub fn box_cut_paste(a: &Sample, b: &Sample, cfg: &MixConfig) -> AugmentedSample {
    combine(a, b, cfg, Blend::Paste, OpKind::BoxCutPaste)
}
