//! The 2D augmentation families: cutout, photometric jitter, Box-MixUp,
//! Box-Cut-Paste and Mosaic-Tile. None of them touches a label's 3D fields.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::geometry::Rect2D;
use crate::label::Sample;
use crate::rng::RandomSource;

pub mod config;
mod cutout;
mod mix;
mod mosaic;
mod photometric;

pub use config::{
    AugmentConfig, CutoutConfig, CutoutFill, InvalidConfig, MixConfig, MosaicConfig,
    PhotometricConfig,
};
pub use cutout::{cutout, Hole};
pub use mix::{box_cut_paste, box_mixup, conform_sample, filter_partner_boxes};
pub use mosaic::{mosaic_tile, overlap_fraction, tile_rects};
pub use photometric::{adjust_contrast, motion_blur, photometric, rgb_shift, BlurAngle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum OpKind {
    Cutout,
    Photometric,
    BoxMixup,
    BoxCutPaste,
    MosaicTile,
}

impl OpKind {
    pub const ALL: [OpKind; 5] = [
        OpKind::Cutout,
        OpKind::Photometric,
        OpKind::BoxMixup,
        OpKind::BoxCutPaste,
        OpKind::MosaicTile,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OpKind::Cutout => "cutout",
            OpKind::Photometric => "photometric",
            OpKind::BoxMixup => "box-mixup",
            OpKind::BoxCutPaste => "box-cut-paste",
            OpKind::MosaicTile => "mosaic-tile",
        }
    }

    /// Number of partner samples the op consumes besides the reference.
    pub fn partners_needed(self) -> usize {
        match self {
            OpKind::Cutout | OpKind::Photometric => 0,
            OpKind::BoxMixup | OpKind::BoxCutPaste => 1,
            OpKind::MosaicTile => 3,
        }
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownOp(pub String);

impl fmt::Display for UnknownOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown augmentation `{}`", self.0)
    }
}

impl core::error::Error for UnknownOp {}

impl FromStr for OpKind {
    type Err = UnknownOp;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OpKind::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| UnknownOp(s.into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AugmentError {
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },
    WrongPartnerCount {
        op: OpKind,
        expected: usize,
        actual: usize,
    },
    InvalidConfig(InvalidConfig),
}

impl fmt::Display for AugmentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AugmentError::DimensionMismatch { expected, actual } => write!(
                f,
                "image is {}x{}, need at least {}x{}",
                actual.0, actual.1, expected.0, expected.1
            ),
            AugmentError::WrongPartnerCount {
                op,
                expected,
                actual,
            } => {
                write!(f, "{op} takes {expected} partner samples, got {actual}")
            }
            AugmentError::InvalidConfig(e) => write!(f, "invalid augmentation config: {e}"),
        }
    }
}

impl core::error::Error for AugmentError {}

impl From<InvalidConfig> for AugmentError {
    fn from(e: InvalidConfig) -> Self {
        AugmentError::InvalidConfig(e)
    }
}

/// One applied op.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub op: OpKind,
    pub partners: Vec<String>,
    /// Digest of the random stream after the op; 0 for ops that draw nothing.
    pub draw_digest: u64,
}

/// Box bookkeeping of the ops that merge label sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OpStats {
    /// Partner or tile boxes that made it into the output.
    pub kept: usize,
    /// Partner boxes vetoed by the IoU check.
    pub rejected: usize,
    /// Mosaic boxes under the retention fraction.
    pub retention_dropped: usize,
    /// Partner boxes lost when cropping to the reference size.
    pub conform_dropped: usize,
}

impl core::ops::AddAssign for OpStats {
    fn add_assign(&mut self, rhs: Self) {
        self.kept += rhs.kept;
        self.rejected += rhs.rejected;
        self.retention_dropped += rhs.retention_dropped;
        self.conform_dropped += rhs.conform_dropped;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedSample {
    pub sample: Sample,
    pub provenance: Vec<Provenance>,
    pub stats: OpStats,
    /// Cutout holes, or the four mosaic tiles.
    pub regions: Vec<Rect2D>,
}

impl AugmentedSample {
    pub fn from_sample(sample: Sample) -> Self {
        Self {
            sample,
            provenance: Vec::new(),
            stats: OpStats::default(),
            regions: Vec::new(),
        }
    }
}

/// Run `op` on `reference` with the given partners (see
/// [`OpKind::partners_needed`]).
pub fn apply(
    op: OpKind,
    reference: &Sample,
    partners: &[&Sample],
    cfg: &AugmentConfig,
    rng: &mut RandomSource,
) -> Result<AugmentedSample, AugmentError> {
    if partners.len() != op.partners_needed() {
        return Err(AugmentError::WrongPartnerCount {
            op,
            expected: op.partners_needed(),
            actual: partners.len(),
        });
    }
    Ok(match op {
        OpKind::Cutout => cutout(reference, &cfg.cutout, rng),
        OpKind::Photometric => photometric(reference, &cfg.photometric, rng),
        OpKind::BoxMixup => box_mixup(reference, partners[0], &cfg.mixup),
        OpKind::BoxCutPaste => box_cut_paste(reference, partners[0], &cfg.cutpaste),
        OpKind::MosaicTile => mosaic_tile(
            [reference, partners[0], partners[1], partners[2]],
            &cfg.mosaic,
        )?,
    })
}
