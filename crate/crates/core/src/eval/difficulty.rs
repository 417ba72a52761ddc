use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::label::ObjectLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Difficulty {
    Easy,
    Moderate,
    Hard,
}

impl Difficulty {
    pub const ALL: [Difficulty; 3] = [Difficulty::Easy, Difficulty::Moderate, Difficulty::Hard];

    pub fn name(self) -> &'static str {
        match self {
            Difficulty::Easy => "easy",
            Difficulty::Moderate => "moderate",
            Difficulty::Hard => "hard",
        }
    }
}

impl fmt::Display for Difficulty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Difficulty {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Difficulty::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or(())
    }
}

/// Thresholds a ground-truth object must meet to count at a difficulty.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DifficultyRule {
    pub difficulty: Difficulty,
    /// Minimum 2D box height in pixels.
    pub min_box_height: f64,
    pub max_occlusion: i32,
    pub max_truncation: f64,
}

impl DifficultyRule {
    /// KITTI benchmark thresholds.
    pub const fn kitti(difficulty: Difficulty) -> Self {
        let (min_box_height, max_occlusion, max_truncation) = match difficulty {
            Difficulty::Easy => (40.0, 0, 0.15),
            Difficulty::Moderate => (25.0, 1, 0.30),
            Difficulty::Hard => (25.0, 2, 0.50),
        };
        Self {
            difficulty,
            min_box_height,
            max_occlusion,
            max_truncation,
        }
    }

    pub fn kitti_all() -> [DifficultyRule; 3] {
        Difficulty::ALL.map(DifficultyRule::kitti)
    }

    /// True for a non-DontCare label meeting every threshold.
    pub fn counts(&self, label: &ObjectLabel) -> bool {
        !label.is_dont_care()
            && label.box2d.height() >= self.min_box_height
            && label.occlusion <= self.max_occlusion
            && label.truncation <= self.max_truncation
    }
}

/// Ground truth split for scoring. Ignored objects may absorb a detection
/// without it counting as a true or false positive.
#[derive(Debug, Clone, Default)]
pub struct DifficultyPartition<'a> {
    pub counted: Vec<&'a ObjectLabel>,
    pub ignored: Vec<&'a ObjectLabel>,
}

pub fn difficulty_filter<'a, I>(labels: I, rule: &DifficultyRule) -> DifficultyPartition<'a>
where
    I: IntoIterator<Item = &'a ObjectLabel>,
{
    let mut part = DifficultyPartition::default();
    for l in labels {
        if rule.counts(l) {
            part.counted.push(l);
        } else {
            part.ignored.push(l);
        }
    }
    part
}
