use std::f64::consts::{PI, TAU};
use std::fmt::Write;

use monoaug_core::{Dims3, Location3, ObjectLabel, Rect2D};

use super::{KittiError, Result};

const GT_FIELDS: usize = 15;
const PRED_FIELDS: usize = 16;

fn malformed(line: usize, reason: impl Into<String>) -> KittiError {
    KittiError::MalformedLine {
        path: None,
        line,
        reason: reason.into(),
    }
}

/// Wrap an angle into `[-pi, pi]`; values already inside are untouched.
pub fn normalize_angle(a: f64) -> f64 {
    if (-PI..=PI).contains(&a) {
        return a;
    }
    let wrapped = a - TAU * (a / TAU).round();
    wrapped.clamp(-PI, PI)
}

/// Parse one label line: type, truncated, occluded, alpha, bbox (4),
/// dimensions (h, w, l), location (x, y, z), rotation_y and an optional
/// trailing score. `line_no` is 1-based and only used in errors.
pub fn parse_label_line(line: &str, line_no: usize) -> Result<ObjectLabel> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != GT_FIELDS && fields.len() != PRED_FIELDS {
        return Err(malformed(
            line_no,
            format!(
                "expected {GT_FIELDS} or {PRED_FIELDS} fields, found {}",
                fields.len()
            ),
        ));
    }
    let num = |i: usize, name: &str| -> Result<f64> {
        match fields[i].parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(malformed(
                line_no,
                format!("field {name} is not a finite number: {:?}", fields[i]),
            )),
        }
    };
    let occlusion = match fields[2].parse::<i32>() {
        Ok(v) => v,
        Err(_) => {
            let v = num(2, "occluded")?;
            if v.fract() != 0.0 || v.abs() > 1e6 {
                return Err(malformed(
                    line_no,
                    format!("field occluded is not an integer: {:?}", fields[2]),
                ));
            }
            v as i32
        }
    };
    Ok(ObjectLabel {
        class_name: fields[0].to_owned(),
        truncation: num(1, "truncated")?,
        occlusion,
        alpha: normalize_angle(num(3, "alpha")?),
        box2d: Rect2D::new(
            num(4, "left")?,
            num(5, "top")?,
            num(6, "right")?,
            num(7, "bottom")?,
        ),
        dims3d: Dims3 {
            height: num(8, "height")?,
            width: num(9, "width")?,
            length: num(10, "length")?,
        },
        location3d: Location3 {
            x: num(11, "x")?,
            y: num(12, "y")?,
            z: num(13, "z")?,
        },
        rotation_y: normalize_angle(num(14, "rotation_y")?),
        score: if fields.len() == PRED_FIELDS {
            Some(num(15, "score")?)
        } else {
            None
        },
    })
}

/// Parse a whole label file; blank lines are skipped.
pub fn parse_labels(text: &str) -> Result<Vec<ObjectLabel>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_label_line(l, i + 1))
        .collect()
}

fn push_real(out: &mut String, v: f64) {
    let start = out.len();
    write!(out, " {v:.2}").expect("writing to a String");
    if &out[start..] == " -0.00" {
        out.truncate(start);
        out.push_str(" 0.00");
    }
}

/// Canonical line: space separated, reals with two decimals, angles
/// wrapped into [-pi, pi], occlusion as an integer, no trailing newline.
pub fn serialize_label(l: &ObjectLabel) -> String {
    let mut out = String::with_capacity(96);
    out.push_str(&l.class_name);
    push_real(&mut out, l.truncation);
    write!(out, " {}", l.occlusion).expect("writing to a String");
    for v in [
        normalize_angle(l.alpha),
        l.box2d.left,
        l.box2d.top,
        l.box2d.right,
        l.box2d.bottom,
        l.dims3d.height,
        l.dims3d.width,
        l.dims3d.length,
        l.location3d.x,
        l.location3d.y,
        l.location3d.z,
        normalize_angle(l.rotation_y),
    ] {
        push_real(&mut out, v);
    }
    if let Some(s) = l.score {
        push_real(&mut out, s);
    }
    out
}

/// One line per label, each newline-terminated.
pub fn serialize_labels(labels: &[ObjectLabel]) -> String {
    let mut out = String::new();
    for l in labels {
        out.push_str(&serialize_label(l));
        out.push('\n');
    }
    out
}

/// The label as it reads back after serialization.
pub fn quantize_label(l: &ObjectLabel) -> ObjectLabel {
    parse_label_line(&serialize_label(l), 1).expect("canonical serialization parses")
}
