use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::geometry::Rect2D;
use crate::image::PixelImage;

/// Class token KITTI uses for regions excluded from training and scoring.
pub const DONT_CARE: &str = "DontCare";

/// Object size in meters, KITTI order (height, width, length).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dims3 {
    pub height: f64,
    pub width: f64,
    pub length: f64,
}

/// Bottom-face center of the object in camera coordinates (meters).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Location3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// One KITTI annotation or prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectLabel {
    pub class_name: String,
    pub truncation: f64,
    /// 0..=3, or -1 when unknown.
    pub occlusion: i32,
    pub alpha: f64,
    pub box2d: Rect2D,
    pub dims3d: Dims3,
    pub location3d: Location3,
    pub rotation_y: f64,
    pub score: Option<f64>,
}

impl ObjectLabel {
    /// A fully visible, untruncated label with the given class and 2D box and
    /// zeroed 3D fields.
    pub fn new_2d(class_name: impl Into<String>, box2d: Rect2D) -> Self {
        Self {
            class_name: class_name.into(),
            truncation: 0.0,
            occlusion: 0,
            alpha: 0.0,
            box2d,
            dims3d: Dims3::default(),
            location3d: Location3::default(),
            rotation_y: 0.0,
            score: None,
        }
    }

    #[inline]
    pub fn is_dont_care(&self) -> bool {
        self.class_name == DONT_CARE
    }

    pub fn eval_class(&self) -> Option<EvalClass> {
        self.class_name.parse().ok()
    }

    pub fn with_score(mut self, score: f64) -> Self {
        self.score = Some(score);
        self
    }

    /// True when alpha, 3D size, location and yaw are bit-identical.
    pub fn same_3d_geometry(&self, other: &ObjectLabel) -> bool {
        let bits = |l: &ObjectLabel| {
            [
                l.alpha.to_bits(),
                l.dims3d.height.to_bits(),
                l.dims3d.width.to_bits(),
                l.dims3d.length.to_bits(),
                l.location3d.x.to_bits(),
                l.location3d.y.to_bits(),
                l.location3d.z.to_bits(),
                l.rotation_y.to_bits(),
            ]
        };
        bits(self) == bits(other)
    }
}

/// An image with its annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub id: String,
    pub image: PixelImage,
    pub labels: Vec<ObjectLabel>,
}

impl Sample {
    pub fn new(id: impl Into<String>, image: PixelImage, labels: Vec<ObjectLabel>) -> Self {
        Self {
            id: id.into(),
            image,
            labels,
        }
    }
}

/// The scored class set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum EvalClass {
    Car,
    Pedestrian,
    Cyclist,
}

impl EvalClass {
    pub const ALL: [EvalClass; 3] = [EvalClass::Car, EvalClass::Pedestrian, EvalClass::Cyclist];

    /// KITTI label token.
    pub fn kitti_name(self) -> &'static str {
        match self {
            EvalClass::Car => "Car",
            EvalClass::Pedestrian => "Pedestrian",
            EvalClass::Cyclist => "Cyclist",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            EvalClass::Car => "car",
            EvalClass::Pedestrian => "pedestrian",
            EvalClass::Cyclist => "cyclist",
        }
    }
}

impl fmt::Display for EvalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kitti_name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownClass;

impl fmt::Display for UnknownClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("not one of car, pedestrian, cyclist")
    }
}

impl FromStr for EvalClass {
    type Err = UnknownClass;

    /// Accepts the KITTI token or its lowercase form.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Car" | "car" => Ok(EvalClass::Car),
            "Pedestrian" | "pedestrian" => Ok(EvalClass::Pedestrian),
            "Cyclist" | "cyclist" => Ok(EvalClass::Cyclist),
            _ => Err(UnknownClass),
        }
    }
}
