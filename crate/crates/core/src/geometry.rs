//! Overlap geometry: axis-aligned image boxes, rotated bird's-eye-view
//! footprints and upright 3D boxes.
//!
//! Rotated intersections are computed by clipping one rectangle's corner
//! polygon against the other's four half-planes (Sutherland-Hodgman) and
//! measuring the result with the shoelace formula. All IoU functions are
//! total: zero-area unions give 0.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::label::ObjectLabel;

/// Intersections below this area (m^2 or px^2) are treated as empty.
pub const SLIVER_AREA: f64 = 1e-12;

/// Axis-aligned image-plane box in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rect2D {
    pub left: f64,
    pub top: f64,
    pub right: f64,
    pub bottom: f64,
}

impl Rect2D {
    pub const fn new(left: f64, top: f64, right: f64, bottom: f64) -> Self {
        Self {
            left,
            top,
            right,
            bottom,
        }
    }

    #[inline]
    pub fn width(&self) -> f64 {
        (self.right - self.left).max(0.0)
    }

    #[inline]
    pub fn height(&self) -> f64 {
        (self.bottom - self.top).max(0.0)
    }

    #[inline]
    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Possibly empty (zero width or height) overlap rectangle.
    pub fn intersection(&self, other: &Rect2D) -> Rect2D {
        let left = self.left.max(other.left);
        let top = self.top.max(other.top);
        Rect2D {
            left,
            top,
            right: self.right.min(other.right).max(left),
            bottom: self.bottom.min(other.bottom).max(top),
        }
    }

    #[inline]
    pub fn intersection_area(&self, other: &Rect2D) -> f64 {
        self.intersection(other).area()
    }

    /// Clip into `[0, width] x [0, height]`.
    pub fn clip_to(&self, width: f64, height: f64) -> Rect2D {
        self.intersection(&Rect2D::new(0.0, 0.0, width, height))
    }

    /// Half-open integer pixel span `[floor(left), ceil(right)) x
    /// [floor(top), ceil(bottom))` clipped to a `width` x `height` raster.
    /// Returns `(x0, y0, x1, y1)` with `x0 <= x1` and `y0 <= y1`.
    pub fn pixel_span(&self, width: usize, height: usize) -> (usize, usize, usize, usize) {
        let x0 = clamp_index(libm::floor(self.left), width);
        let x1 = clamp_index(libm::ceil(self.right), width).max(x0);
        let y0 = clamp_index(libm::floor(self.top), height);
        let y1 = clamp_index(libm::ceil(self.bottom), height).max(y0);
        (x0, y0, x1, y1)
    }
}

#[inline]
fn clamp_index(v: f64, limit: usize) -> usize {
    // NaN and negatives map to 0
    if v.is_nan() || v <= 0.0 {
        0
    } else if v >= limit as f64 {
        limit
    } else {
        v as usize
    }
}

/// Intersection over union of two image boxes.
pub fn iou_2d(a: &Rect2D, b: &Rect2D) -> f64 {
    let inter = a.intersection_area(b);
    let union = a.area() + b.area() - inter;
    ratio(inter, union)
}

#[inline]
fn ratio(inter: f64, union: f64) -> f64 {
    if union.is_nan() || inter.is_nan() || union <= 0.0 || inter <= 0.0 {
        0.0
    } else {
        (inter / union).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

#[inline]
fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Signed shoelace area; positive for counter-clockwise vertex order.
pub fn signed_area(poly: &[Point2]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for (i, p) in poly.iter().enumerate() {
        let q = poly[(i + 1) % poly.len()];
        twice += p.x * q.y - q.x * p.y;
    }
    0.5 * twice
}

/// Clip convex `subject` against convex counter-clockwise `clip`.
///
/// Vertices within a tiny scale-relative distance of a clip edge count as
/// inside, so coincident edges survive floating-point noise.
pub fn clip_convex(subject: &[Point2], clip: &[Point2]) -> Vec<Point2> {
    if subject.len() < 3 || clip.len() < 3 || signed_area(clip) < SLIVER_AREA {
        return Vec::new();
    }
    let scale = subject
        .iter()
        .chain(clip)
        .fold(1.0f64, |m, p| m.max(p.x.abs()).max(p.y.abs()));
    let tol = 1e-12 * scale;

    let mut output: Vec<Point2> = subject.to_vec();
    let mut input: Vec<Point2> = Vec::with_capacity(subject.len() + clip.len());
    for (i, &c0) in clip.iter().enumerate() {
        let c1 = clip[(i + 1) % clip.len()];
        let edge_len = libm::hypot(c1.x - c0.x, c1.y - c0.y);
        if edge_len == 0.0 {
            continue;
        }
        core::mem::swap(&mut input, &mut output);
        output.clear();
        if input.is_empty() {
            break;
        }
        let dist = |p: Point2| cross(c0, c1, p) / edge_len;
        let mut s = input[input.len() - 1];
        let mut ds = dist(s);
        for &e in input.iter() {
            let de = dist(e);
            let e_in = de >= -tol;
            let s_in = ds >= -tol;
            if e_in {
                if !s_in {
                    output.push(edge_point(s, e, ds, de));
                }
                output.push(e);
            } else if s_in {
                output.push(edge_point(s, e, ds, de));
            }
            s = e;
            ds = de;
        }
    }
    output
}

#[inline]
fn edge_point(s: Point2, e: Point2, ds: f64, de: f64) -> Point2 {
    let t = (ds / (ds - de)).clamp(0.0, 1.0);
    Point2::new(s.x + t * (e.x - s.x), s.y + t * (e.y - s.y))
}

/// Bird's-eye-view footprint on the camera x-z ground plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RotatedRect {
    /// (x, z) in meters, stored as `Point2 { x, y: z }`.
    pub center: Point2,
    /// Extent along the heading direction.
    pub length: f64,
    pub width: f64,
    /// Yaw in radians (KITTI `rotation_y`).
    pub angle: f64,
}

impl RotatedRect {
    pub fn new(cx: f64, cz: f64, length: f64, width: f64, angle: f64) -> Self {
        Self {
            center: Point2::new(cx, cz),
            length,
            width,
            angle,
        }
    }

    #[inline]
    pub fn area(&self) -> f64 {
        self.length.max(0.0) * self.width.max(0.0)
    }

    /// Corners in counter-clockwise order. Local `(l, w)` offsets are
    /// rotated as `x = cos*l + sin*w`, `z = -sin*l + cos*w`, the KITTI devkit
    /// rotation about the camera y axis.
    pub fn corners(&self) -> [Point2; 4] {
        let (s, c) = libm::sincos(self.angle);
        let hl = 0.5 * self.length.max(0.0);
        let hw = 0.5 * self.width.max(0.0);
        [(hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)]
            .map(|(l, w)| Point2::new(self.center.x + c * l + s * w, self.center.y - s * l + c * w))
    }

    fn order_key(&self) -> [f64; 5] {
        [
            self.center.x,
            self.center.y,
            self.length,
            self.width,
            self.angle,
        ]
    }
}

fn canonical_pair<'a>(
    a: &'a RotatedRect,
    b: &'a RotatedRect,
) -> (&'a RotatedRect, &'a RotatedRect) {
    let ord = a
        .order_key()
        .iter()
        .zip(b.order_key().iter())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal);
    if ord == Ordering::Greater {
        (b, a)
    } else {
        (a, b)
    }
}

/// Area of the overlap of two rotated rectangles. The pair is put in a
/// canonical order first so the result is exactly symmetric.
pub fn bev_intersection_area(a: &RotatedRect, b: &RotatedRect) -> f64 {
    if a.area() < SLIVER_AREA || b.area() < SLIVER_AREA {
        return 0.0;
    }
    let (a, b) = canonical_pair(a, b);
    let poly = clip_convex(&a.corners(), &b.corners());
    let area = signed_area(&poly).abs();
    if area < SLIVER_AREA {
        0.0
    } else {
        area
    }
}

pub fn iou_bev(a: &RotatedRect, b: &RotatedRect) -> f64 {
    let inter = bev_intersection_area(a, b);
    ratio(inter, a.area() + b.area() - inter)
}

/// Upright 3D box: a BEV footprint extruded upward from `y_bottom`
/// (camera y grows downward, so the box spans `[y_bottom - height, y_bottom]`).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Box3D {
    pub bev: RotatedRect,
    pub y_bottom: f64,
    pub height: f64,
}

impl Box3D {
    #[inline]
    pub fn volume(&self) -> f64 {
        self.bev.area() * self.height.max(0.0)
    }

    /// Length of the shared vertical interval.
    pub fn vertical_overlap(&self, other: &Box3D) -> f64 {
        let top =
            (self.y_bottom - self.height.max(0.0)).max(other.y_bottom - other.height.max(0.0));
        let bottom = self.y_bottom.min(other.y_bottom);
        (bottom - top).max(0.0)
    }
}

pub fn iou_3d(a: &Box3D, b: &Box3D) -> f64 {
    let overlap = a.vertical_overlap(b);
    if overlap <= 0.0 {
        return 0.0;
    }
    let inter = bev_intersection_area(&a.bev, &b.bev) * overlap;
    ratio(inter, a.volume() + b.volume() - inter)
}

/// BEV footprint of a label: center `(x, z)`, size `(length, width)`,
/// angle `rotation_y`. Negative sentinel sizes collapse to zero, giving a
/// footprint that overlaps nothing.
pub fn to_bev(label: &ObjectLabel) -> RotatedRect {
    RotatedRect::new(
        label.location3d.x,
        label.location3d.z,
        label.dims3d.length.max(0.0),
        label.dims3d.width.max(0.0),
        label.rotation_y,
    )
}

pub fn to_box3d(label: &ObjectLabel) -> Box3D {
    Box3D {
        bev: to_bev(label),
        y_bottom: label.location3d.y,
        height: label.dims3d.height.max(0.0),
    }
}
