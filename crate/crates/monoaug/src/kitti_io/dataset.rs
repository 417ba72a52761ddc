use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use monoaug_core::{ObjectLabel, Sample};

use super::label::{parse_labels, serialize_labels};
use super::png::{read_png, write_png};
use super::{KittiError, Result};

pub const IMAGE_DIR: &str = "image_2";
pub const LABEL_DIR: &str = "label_2";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleFiles {
    pub image: PathBuf,
    /// Absent for unlabeled (test-style) splits.
    pub label: Option<PathBuf>,
}

/// Sorted listing of a KITTI-layout dataset directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetIndex {
    root: PathBuf,
    ids: Vec<String>,
    files: BTreeMap<String, SampleFiles>,
}

impl DatasetIndex {
    /// Index every `image_2/*.png` under `root`.
    pub fn scan(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref().to_owned();
        let image_dir = root.join(IMAGE_DIR);
        let label_dir = root.join(LABEL_DIR);
        let entries = fs::read_dir(&image_dir).map_err(|e| KittiError::io(&image_dir, e))?;
        let mut files = BTreeMap::new();
        for entry in entries {
            let path = entry.map_err(|e| KittiError::io(&image_dir, e))?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("png") || !path.is_file() {
                continue;
            }
            let Some(id) = path.file_stem().and_then(|s| s.to_str()) else {
                continue;
            };
            let label = label_dir.join(format!("{id}.txt"));
            files.insert(
                id.to_owned(),
                SampleFiles {
                    image: path.clone(),
                    label: label.is_file().then_some(label),
                },
            );
        }
        Ok(Self {
            root,
            ids: files.keys().cloned().collect(),
            files,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Sample ids in lexicographic order.
    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn files(&self, id: &str) -> Option<&SampleFiles> {
        self.files.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.files.contains_key(id)
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.ids
            .binary_search_by(|probe| probe.as_str().cmp(id))
            .ok()
    }
}

/// A named list of sample ids, stored one per line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitManifest {
    pub name: String,
    pub ids: Vec<String>,
}

impl SplitManifest {
    pub fn new(name: impl Into<String>, ids: Vec<String>) -> Result<Self> {
        let name = name.into();
        let mut seen = BTreeSet::new();
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(KittiError::DuplicateId {
                    split: name,
                    id: id.clone(),
                });
            }
        }
        Ok(Self { name, ids })
    }

    /// Every id of `index`, in index order.
    pub fn all(index: &DatasetIndex) -> Self {
        Self {
            name: "all".into(),
            ids: index.ids().to_vec(),
        }
    }

    pub fn parse(name: impl Into<String>, text: &str) -> Result<Self> {
        let ids = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_owned)
            .collect();
        Self::new(name, ids)
    }

    /// The split name is the file stem.
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| KittiError::io(path, e))?;
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("split")
            .to_owned();
        Self::parse(name, &text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = String::new();
        for id in &self.ids {
            text.push_str(id);
            text.push('\n');
        }
        fs::write(path, text).map_err(|e| KittiError::Io {
            path: path.to_owned(),
            source: e,
        })
    }

    pub fn validate(&self, index: &DatasetIndex) -> Result<()> {
        match self.ids.iter().find(|id| !index.contains(id)) {
            Some(id) => Err(KittiError::UnknownId {
                split: self.name.clone(),
                id: id.clone(),
            }),
            None => Ok(()),
        }
    }
}

fn read_label_file(path: &Path) -> Result<Vec<ObjectLabel>> {
    let text = fs::read_to_string(path).map_err(|e| KittiError::io(path, e))?;
    parse_labels(&text).map_err(|e| match e {
        KittiError::MalformedLine { line, reason, .. } => KittiError::MalformedLine {
            path: Some(path.to_owned()),
            line,
            reason,
        },
        other => other,
    })
}

/// Decode a sample and clip its 2D boxes to the image. Labels whose
/// clipped box has zero area are dropped; their count is returned.
pub fn load_sample(index: &DatasetIndex, id: &str) -> Result<(Sample, usize)> {
    let files = index.files(id).ok_or_else(|| {
        KittiError::MissingFile(index.root().join(IMAGE_DIR).join(format!("{id}.png")))
    })?;
    let image = read_png(&files.image)?;
    let labels = match &files.label {
        Some(p) => read_label_file(p)?,
        None => Vec::new(),
    };
    let (w, h) = (image.width() as f64, image.height() as f64);
    let before = labels.len();
    let labels: Vec<ObjectLabel> = labels
        .into_iter()
        .filter_map(|mut l| {
            l.box2d = l.box2d.clip_to(w, h);
            (l.box2d.area() > 0.0).then_some(l)
        })
        .collect();
    let dropped = before - labels.len();
    if dropped > 0 {
        log::warn!("sample {id}: dropped {dropped} labels with no area inside the image");
    }
    Ok((Sample::new(id, image, labels), dropped))
}

/// Write `image_2/<id>.png` and `label_2/<id>.txt` under `out_root`.
pub fn write_sample(sample: &Sample, out_root: &Path) -> Result<()> {
    let image_dir = out_root.join(IMAGE_DIR);
    let label_dir = out_root.join(LABEL_DIR);
    for dir in [&image_dir, &label_dir] {
        fs::create_dir_all(dir).map_err(|e| KittiError::Io {
            path: dir.clone(),
            source: e,
        })?;
    }
    write_png(&sample.image, &image_dir.join(format!("{}.png", sample.id)))?;
    let label_path = label_dir.join(format!("{}.txt", sample.id));
    fs::write(&label_path, serialize_labels(&sample.labels)).map_err(|e| KittiError::Io {
        path: label_path,
        source: e,
    })
}

/// `dir/label_2` when it exists, else `dir` itself.
pub fn resolve_label_dir(dir: &Path) -> PathBuf {
    let nested = dir.join(LABEL_DIR);
    if nested.is_dir() {
        nested
    } else {
        dir.to_owned()
    }
}

/// Parse every `<id>.txt` in a label directory.
pub fn read_label_dir(dir: &Path) -> Result<BTreeMap<String, Vec<ObjectLabel>>> {
    let entries = fs::read_dir(dir).map_err(|e| KittiError::io(dir, e))?;
    let mut out = BTreeMap::new();
    for entry in entries {
        let path = entry.map_err(|e| KittiError::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("txt") {
            continue;
        }
        if let Some(id) = path.file_stem().and_then(|s| s.to_str()) {
            out.insert(id.to_owned(), read_label_file(&path)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use monoaug_core::{PixelImage, Rect2D};

    fn sample(id: &str, labels: Vec<ObjectLabel>) -> Sample {
        Sample::new(id, PixelImage::filled(20, 10, [9, 8, 7]), labels)
    }

    #[test]
    fn write_then_scan_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let car = ObjectLabel::new_2d("Car", Rect2D::new(1.234, 2.0, 15.0, 9.5));
        write_sample(&sample("000001", vec![car.clone()]), dir.path()).unwrap();
        write_sample(&sample("000000", vec![]), dir.path()).unwrap();
        let index = DatasetIndex::scan(dir.path()).unwrap();
        assert_eq!(index.ids(), ["000000", "000001"]);
        assert_eq!(index, DatasetIndex::scan(dir.path()).unwrap());
        let (s, dropped) = load_sample(&index, "000001").unwrap();
        assert_eq!(dropped, 0);
        assert_eq!(s.labels[0].box2d, Rect2D::new(1.23, 2.0, 15.0, 9.5));
        let (empty, _) = load_sample(&index, "000000").unwrap();
        assert!(empty.labels.is_empty());
        let label_file = dir.path().join(LABEL_DIR).join("000000.txt");
        assert_eq!(fs::read(label_file).unwrap().len(), 0);
    }

    #[test]
    fn boxes_are_clipped_and_empty_ones_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let over = ObjectLabel::new_2d("Car", Rect2D::new(15.0, 2.0, 30.0, 8.0));
        let outside = ObjectLabel::new_2d("Car", Rect2D::new(25.0, 2.0, 30.0, 8.0));
        write_sample(&sample("000003", vec![over, outside]), dir.path()).unwrap();
        let index = DatasetIndex::scan(dir.path()).unwrap();
        let (s, dropped) = load_sample(&index, "000003").unwrap();
        assert_eq!(dropped, 1);
        assert_eq!(s.labels[0].box2d, Rect2D::new(15.0, 2.0, 20.0, 8.0));
    }

    #[test]
    fn missing_ids_and_files() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            DatasetIndex::scan(dir.path()),
            Err(KittiError::MissingFile(_))
        ));
        write_sample(&sample("000000", vec![]), dir.path()).unwrap();
        let index = DatasetIndex::scan(dir.path()).unwrap();
        assert!(matches!(
            load_sample(&index, "999999"),
            Err(KittiError::MissingFile(_))
        ));
    }

    #[test]
    fn unlabeled_images_are_indexed() {
        let dir = tempfile::tempdir().unwrap();
        write_sample(&sample("000000", vec![]), dir.path()).unwrap();
        fs::remove_file(dir.path().join(LABEL_DIR).join("000000.txt")).unwrap();
        let index = DatasetIndex::scan(dir.path()).unwrap();
        assert_eq!(index.files("000000").unwrap().label, None);
        assert!(load_sample(&index, "000000").unwrap().0.labels.is_empty());
    }

    #[test]
    fn malformed_label_reports_path() {
        let dir = tempfile::tempdir().unwrap();
        write_sample(&sample("000000", vec![]), dir.path()).unwrap();
        let p = dir.path().join(LABEL_DIR).join("000000.txt");
        fs::write(&p, "Car 1 2\n").unwrap();
        let index = DatasetIndex::scan(dir.path()).unwrap();
        match load_sample(&index, "000000") {
            Err(KittiError::MalformedLine {
                path: Some(path),
                line: 1,
                ..
            }) => assert_eq!(path, p),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn split_manifest_rules() {
        let dir = tempfile::tempdir().unwrap();
        write_sample(&sample("000000", vec![]), dir.path()).unwrap();
        let index = DatasetIndex::scan(dir.path()).unwrap();
        let split = SplitManifest::parse("val", "000000\n\n").unwrap();
        split.validate(&index).unwrap();
        assert!(matches!(
            SplitManifest::parse("val", "000000\n000000\n"),
            Err(KittiError::DuplicateId { .. })
        ));
        let unknown = SplitManifest::parse("val", "000123\n").unwrap();
        assert!(matches!(
            unknown.validate(&index),
            Err(KittiError::UnknownId { .. })
        ));
        let path = dir.path().join("train.txt");
        split.write(&path).unwrap();
        let back = SplitManifest::read(&path).unwrap();
        assert_eq!(back.name, "train");
        assert_eq!(back.ids, split.ids);
    }

    #[cfg(unix)]
    #[test]
    fn read_only_output_is_an_io_failure() {
        use std::os::unix::fs::PermissionsExt;
        let dir = tempfile::tempdir().unwrap();
        let ro = dir.path().join("ro");
        fs::create_dir(&ro).unwrap();
        fs::set_permissions(&ro, fs::Permissions::from_mode(0o555)).unwrap();
        // root ignores permission bits; only assert when the write really fails
        let res = write_sample(&sample("000000", vec![]), &ro);
        if fs::File::create(ro.join("probe")).is_err() {
            assert!(matches!(res, Err(KittiError::Io { .. })));
        }
    }
}
