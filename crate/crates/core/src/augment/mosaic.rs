use alloc::vec::Vec;

use super::config::MosaicConfig;
use super::{AugmentError, AugmentedSample, OpKind, OpStats, Provenance};
use crate::geometry::Rect2D;
use crate::image::{PixelImage, CHANNELS};
use crate::label::Sample;

/// Tiles of a `width` x `height` image split at `(width / 2, height / 2)`,
/// ordered top-left, top-right, bottom-left, bottom-right.
pub fn tile_rects(width: usize, height: usize) -> [Rect2D; 4] {
    let (w, h) = (width as f64, height as f64);
    let (sx, sy) = ((width / 2) as f64, (height / 2) as f64);
    [
        Rect2D::new(0.0, 0.0, sx, sy),
        Rect2D::new(sx, 0.0, w, sy),
        Rect2D::new(0.0, sy, sx, h),
        Rect2D::new(sx, sy, w, h),
    ]
}

/// Fraction of `b`'s own area that lies inside `tile`; 0 for empty boxes.
pub fn overlap_fraction(b: &Rect2D, tile: &Rect2D) -> f64 {
    let area = b.area();
    if area > 0.0 {
        b.intersection_area(tile) / area
    } else {
        0.0
    }
}

/// Compose one image from the matching quadrant of each of four samples.
///
/// Samples 1..=3 are cropped or zero-padded to sample 0's size. A label of
/// sample `k` survives when at least `cfg.retention` of its original box
/// area lies in tile `k`; its 2D box is then clipped to the tile and its 3D
/// fields are left untouched.
pub fn mosaic_tile(
    quads: [&Sample; 4],
    cfg: &MosaicConfig,
) -> Result<AugmentedSample, AugmentError> {
    let (w, h) = quads[0].image.dimensions();
    if w < 2 || h < 2 {
        return Err(AugmentError::DimensionMismatch {
            expected: (2, 2),
            actual: (w, h),
        });
    }
    let tiles = tile_rects(w, h);
    let (sx, sy) = (w / 2, h / 2);

    let mut data = alloc::vec![0u8; w * h * CHANNELS];
    let mut labels = Vec::new();
    let mut stats = OpStats::default();
    for (k, (sample, tile)) in quads.iter().zip(tiles.iter()).enumerate() {
        let src = sample.image.conform(w, h);
        let (x0, x1) = if k % 2 == 0 { (0, sx) } else { (sx, w) };
        let (y0, y1) = if k < 2 { (0, sy) } else { (sy, h) };
        for y in y0..y1 {
            let span = y * w * CHANNELS + x0 * CHANNELS..y * w * CHANNELS + x1 * CHANNELS;
            data[span.clone()].copy_from_slice(&src.data()[span]);
        }
        for l in sample.labels.iter().filter(|l| !l.is_dont_care()) {
            if overlap_fraction(&l.box2d, tile) >= cfg.retention {
                let mut kept = l.clone();
                kept.box2d = l.box2d.intersection(tile);
                labels.push(kept);
                stats.kept += 1;
            } else {
                stats.retention_dropped += 1;
            }
        }
    }
    let image = PixelImage::new(w, h, data).expect("dimensions of the reference");
    let mut out = AugmentedSample::from_sample(Sample::new(quads[0].id.clone(), image, labels));
    out.stats = stats;
    out.regions = tiles.to_vec();
    out.provenance.push(Provenance {
        op: OpKind::MosaicTile,
        partners: quads[1..].iter().map(|s| s.id.clone()).collect(),
        draw_digest: 0,
    });
    Ok(out)
}
