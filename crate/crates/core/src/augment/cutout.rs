use alloc::vec::Vec;

use super::config::{CutoutConfig, CutoutFill, GREY_LEVEL, NOISE_MEAN, NOISE_STD};
use super::{AugmentedSample, OpKind, Provenance};
use crate::geometry::Rect2D;
use crate::image::{round_clamp, PixelImage, CHANNELS};
use crate::label::Sample;
use crate::rng::RandomSource;

/// Pixel square `[x0, x1) x [y0, y1)` of one hole, already clipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hole {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl Hole {
    /// Square of `side` pixels whose center pixel is `(cx, cy)`, clipped to
    /// the image. The top-left corner sits `side / 2` pixels before the center.
    pub fn centered(cx: usize, cy: usize, side: u32, width: usize, height: usize) -> Hole {
        let half = i64::from(side / 2);
        let clip = |c: usize, limit: usize| {
            let lo = c as i64 - half;
            let hi = lo + i64::from(side);
            (
                lo.clamp(0, limit as i64) as usize,
                hi.clamp(0, limit as i64) as usize,
            )
        };
        let (x0, x1) = clip(cx, width);
        let (y0, y1) = clip(cy, height);
        Hole { x0, y0, x1, y1 }
    }

    pub fn area(&self) -> usize {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    pub fn rect(&self) -> Rect2D {
        Rect2D::new(
            self.x0 as f64,
            self.y0 as f64,
            self.x1 as f64,
            self.y1 as f64,
        )
    }
}

/// Draw hole centers uniformly over the image and fill each hole. Labels
/// pass through untouched.
pub fn cutout(s: &Sample, cfg: &CutoutConfig, rng: &mut RandomSource) -> AugmentedSample {
    let mut image = s.image.clone();
    let (w, h) = image.dimensions();
    let mut holes = Vec::with_capacity(cfg.holes as usize);
    for _ in 0..cfg.holes {
        let cx = rng.below(w as u64) as usize;
        let cy = rng.below(h as u64) as usize;
        let hole = Hole::centered(cx, cy, cfg.side, w, h);
        fill_hole(&mut image, &hole, cfg.fill, rng);
        holes.push(hole);
    }
    let mut out = AugmentedSample::from_sample(Sample::new(s.id.clone(), image, s.labels.clone()));
    out.regions = holes.iter().map(Hole::rect).collect();
    out.provenance.push(Provenance {
        op: OpKind::Cutout,
        partners: Vec::new(),
        draw_digest: rng.draw_digest(),
    });
    out
}

fn fill_hole(image: &mut PixelImage, hole: &Hole, fill: CutoutFill, rng: &mut RandomSource) {
    match fill {
        CutoutFill::Zeros => image.fill_rect(hole.x0, hole.y0, hole.x1, hole.y1, [0; 3]),
        CutoutFill::Grey => image.fill_rect(hole.x0, hole.y0, hole.x1, hole.y1, [GREY_LEVEL; 3]),
        CutoutFill::Gaussian => {
            for y in hole.y0..hole.y1 {
                let row = image.row_mut(y);
                for v in &mut row[hole.x0 * CHANNELS..hole.x1 * CHANNELS] {
                    *v = round_clamp(rng.gaussian(NOISE_MEAN, NOISE_STD));
                }
            }
        }
    }
}
