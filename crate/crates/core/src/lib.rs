//! Allocation-only core for monocular 3D detection datasets.
//!
//! Everything in this crate is pure: pixel buffers, KITTI-style object
//! labels, binary box masks, a splittable deterministic random source, the
//! overlap geometry (2D, rotated bird's-eye-view and 3D IoU), the five 2D
//! augmentation families and the AP / mAP / inverse-class-frequency
//! weighted mAP scoring. File formats, PNG codecs and the command line live
//! in the `monoaug` companion crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod augment;
pub mod eval;
pub mod geometry;
pub mod image;
pub mod label;
pub mod mask;
pub mod rng;

pub use geometry::{Box3D, Point2, Rect2D, RotatedRect};
pub use image::{ImageError, PixelImage};
pub use label::{Dims3, EvalClass, Location3, ObjectLabel, Sample, DONT_CARE};
pub use mask::{build_box_mask, BoxMask};
pub use rng::{derive_stream, RandomSource};
