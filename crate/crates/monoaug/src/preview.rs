//! Side-by-side rendering of a sample before and after augmentation.

use monoaug_core::augment::{AugmentedSample, OpKind};
use monoaug_core::{PixelImage, Rect2D, Sample};

pub const ANNOTATION: [u8; 3] = [0, 0, 255];
pub const CUTOUT_REGION: [u8; 3] = [255, 0, 0];
pub const OUTLINE_WIDTH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Panel {
    Original,
    Augmented,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Overlay {
    pub panel: Panel,
    pub rect: Rect2D,
    pub color: [u8; 3],
}

/// Draw a rectangle outline `OUTLINE_WIDTH` pixels thick, inside the box's
/// pixel span.
pub fn draw_outline(img: &mut PixelImage, rect: &Rect2D, color: [u8; 3]) {
    let (x0, y0, x1, y1) = rect.pixel_span(img.width(), img.height());
    if x0 >= x1 || y0 >= y1 {
        return;
    }
    let w = OUTLINE_WIDTH;
    img.fill_rect(x0, y0, x1, (y0 + w).min(y1), color);
    img.fill_rect(x0, y1.saturating_sub(w).max(y0), x1, y1, color);
    img.fill_rect(x0, y0, (x0 + w).min(x1), y1, color);
    img.fill_rect(x1.saturating_sub(w).max(x0), y0, x1, y1, color);
}

/// Everything that gets drawn: object boxes of both panels in blue, and
/// for cutout the holes in red on the augmented panel.
pub fn overlays(original: &Sample, augmented: &AugmentedSample, op: OpKind) -> Vec<Overlay> {
    let boxes = |panel, s: &Sample| {
        s.labels
            .iter()
            .filter(|l| !l.is_dont_care())
            .map(move |l| Overlay {
                panel,
                rect: l.box2d,
                color: ANNOTATION,
            })
            .collect::<Vec<_>>()
    };
    let mut out = boxes(Panel::Original, original);
    out.extend(boxes(Panel::Augmented, &augmented.sample));
    if op == OpKind::Cutout {
        out.extend(augmented.regions.iter().map(|r| Overlay {
            panel: Panel::Augmented,
            rect: *r,
            color: CUTOUT_REGION,
        }));
    }
    out
}

/// A `2W x H` image: original on the left, augmented on the right.
pub fn render(original: &Sample, augmented: &AugmentedSample, overlays: &[Overlay]) -> PixelImage {
    let (w, h) = original.image.dimensions();
    let mut left = original.image.clone();
    let mut right = augmented.sample.image.conform(w, h);
    for o in overlays {
        let target = match o.panel {
            Panel::Original => &mut left,
            Panel::Augmented => &mut right,
        };
        draw_outline(target, &o.rect, o.color);
    }
    let mut canvas = PixelImage::filled(2 * w, h, [0; 3]);
    for y in 0..h {
        let row = canvas.row_mut(y);
        row[..3 * w].copy_from_slice(left.row(y));
        row[3 * w..].copy_from_slice(right.row(y));
    }
    canvas
}
