use core::fmt;

/// What goes into a cutout hole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum CutoutFill {
    #[default]
    Zeros,
    Grey,
    Gaussian,
}

pub const GREY_LEVEL: u8 = 127;
pub const NOISE_MEAN: f64 = 127.0;
pub const NOISE_STD: f64 = 32.0;

/// IoU threshold of the partner-box overlap check.
pub const DEFAULT_IOU_THRESHOLD: f64 = 0.4;
/// Minimum fraction of a box's area that must survive tiling or cropping.
pub const DEFAULT_RETENTION: f64 = 0.4;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct CutoutConfig {
    pub holes: u32,
    pub side: u32,
    pub fill: CutoutFill,
}

impl Default for CutoutConfig {
    fn default() -> Self {
        Self {
            holes: 2,
            side: 64,
            fill: CutoutFill::Zeros,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct PhotometricConfig {
    /// Motion-blur kernel length in pixels.
    pub blur_len: u32,
    pub blur_prob: f64,
    /// Largest absolute per-channel offset.
    pub rgb_shift_max: u8,
    pub rgb_shift_prob: f64,
    /// Contrast factor is drawn from `[1 - contrast_max, 1 + contrast_max]`.
    pub contrast_max: f64,
    pub contrast_prob: f64,
}

impl Default for PhotometricConfig {
    fn default() -> Self {
        Self {
            blur_len: 5,
            blur_prob: 0.5,
            rgb_shift_max: 20,
            rgb_shift_prob: 0.5,
            contrast_max: 0.2,
            contrast_prob: 0.5,
        }
    }
}

/// Settings shared by Box-MixUp and Box-Cut-Paste.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct MixConfig {
    pub iou_check: bool,
    pub iou_threshold: f64,
}

impl Default for MixConfig {
    fn default() -> Self {
        Self {
            iou_check: true,
            iou_threshold: DEFAULT_IOU_THRESHOLD,
        }
    }
}

impl MixConfig {
    /// Threshold handed to the partner filter; infinite when the check is off.
    pub fn effective_threshold(&self) -> f64 {
        if self.iou_check {
            self.iou_threshold
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct MosaicConfig {
    pub retention: f64,
}

impl Default for MosaicConfig {
    fn default() -> Self {
        Self {
            retention: DEFAULT_RETENTION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct AugmentConfig {
    pub cutout: CutoutConfig,
    pub photometric: PhotometricConfig,
    pub mixup: MixConfig,
    pub cutpaste: MixConfig,
    pub mosaic: MosaicConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvalidConfig {
    pub field: &'static str,
    pub reason: &'static str,
}

impl fmt::Display for InvalidConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.reason)
    }
}

impl core::error::Error for InvalidConfig {}

fn unit(field: &'static str, v: f64) -> Result<(), InvalidConfig> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(InvalidConfig {
            field,
            reason: "must lie in [0, 1]",
        })
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<(), InvalidConfig> {
        if self.cutout.side == 0 {
            return Err(InvalidConfig {
                field: "cutout.side",
                reason: "must be at least 1",
            });
        }
        let p = &self.photometric;
        if p.blur_len == 0 {
            return Err(InvalidConfig {
                field: "photometric.blur_len",
                reason: "must be at least 1",
            });
        }
        unit("photometric.blur_prob", p.blur_prob)?;
        unit("photometric.rgb_shift_prob", p.rgb_shift_prob)?;
        unit("photometric.contrast_max", p.contrast_max)?;
        unit("photometric.contrast_prob", p.contrast_prob)?;
        unit("mixup.iou_threshold", self.mixup.iou_threshold)?;
        unit("cutpaste.iou_threshold", self.cutpaste.iou_threshold)?;
        unit("mosaic.retention", self.mosaic.retention)?;
        Ok(())
    }
}
