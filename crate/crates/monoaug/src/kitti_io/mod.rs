//! KITTI object-detection layout: `image_2/<id>.png` next to
//! `label_2/<id>.txt`, one object per line.

use std::io;
use std::path::PathBuf;

mod dataset;
mod label;
mod png;

pub use dataset::{
    load_sample, read_label_dir, resolve_label_dir, write_sample, DatasetIndex, SampleFiles,
    SplitManifest,
};
pub use label::{
    normalize_angle, parse_label_line, parse_labels, quantize_label, serialize_label,
    serialize_labels,
};
pub use png::{decode_png, encode_png, read_png, write_png};

#[derive(Debug, thiserror::Error)]
pub enum KittiError {
    #[error("{}line {line}: {reason}", path.as_ref().map(|p| format!("{}: ", p.display())).unwrap_or_default())]
    MalformedLine {
        path: Option<PathBuf>,
        line: usize,
        reason: String,
    },
    #[error("missing file: {}", .0.display())]
    MissingFile(PathBuf),
    #[error("corrupt image {}: {source}", path.display())]
    CorruptImage {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("I/O failure on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("split {split}: sample id {id} is not in the dataset")]
    UnknownId { split: String, id: String },
    #[error("split {split}: duplicate sample id {id}")]
    DuplicateId { split: String, id: String },
}

impl KittiError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        let path = path.into();
        if source.kind() == io::ErrorKind::NotFound {
            KittiError::MissingFile(path)
        } else {
            KittiError::Io { path, source }
        }
    }
}

pub type Result<T, E = KittiError> = std::result::Result<T, E>;
