//! Line-delimited JSON annotation files.
//!
//! The first record is a header:
//!
//! ```json
//! {"format":"ospa-pose-annotations","version":1,"kind":"ground_truth","scene":"cubberly-auditorium-2019-04-22_0","frame_rate_hz":15.0,"joints":["head", "..."]}
//! ```
//!
//! followed by one record per frame:
//!
//! ```json
//! {"frame_id":0,"poses":[{"track_id":3,"bbox":[x,y,w,h],"score":0.9,"keypoints":[[x,y,v], "..."]}]}
//! ```
//!
//! `joints` gives the keypoint order used by the file; it is mapped onto the
//! schema order on load and defaults to the schema order when absent.
//! Prediction keypoints may omit `v`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{EvalError, Result};
use crate::model::{
    BBox, FrameAnnotations, Keypoint, KeypointSchema, Pose, SequenceSet, Visibility, NUM_KEYPOINTS,
};

pub const FORMAT_NAME: &str = "ospa-pose-annotations";
pub const FORMAT_VERSION: u32 = 1;
pub const FILE_EXTENSION: &str = "jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnotationKind {
    GroundTruth,
    Prediction,
}

impl AnnotationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AnnotationKind::GroundTruth => "ground_truth",
            AnnotationKind::Prediction => "prediction",
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    kind: AnnotationKind,
    scene: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    frame_rate_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    camera_id: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    joints: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameIn {
    frame_id: u64,
    #[serde(default)]
    #[allow(dead_code)]
    camera_id: Option<u32>,
    #[serde(default)]
    poses: Vec<PoseIn>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoseIn {
    #[serde(default)]
    track_id: Option<u64>,
    #[serde(default)]
    bbox: Option<[f64; 4]>,
    #[serde(default)]
    score: Option<f64>,
    #[serde(default)]
    head_bbox: Option<[f64; 4]>,
    #[serde(default)]
    wraps: bool,
    keypoints: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
struct FrameOut {
    frame_id: u64,
    poses: Vec<PoseOut>,
}

#[derive(Debug, Serialize)]
struct PoseOut {
    #[serde(skip_serializing_if = "Option::is_none")]
    track_id: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bbox: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    score: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    head_bbox: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    wraps: bool,
    keypoints: Vec<(f64, f64, u8)>,
}

fn bbox_array(b: BBox) -> [f64; 4] {
    [b.x, b.y, b.w, b.h]
}

fn bbox_from(a: [f64; 4]) -> BBox {
    BBox::new(a[0], a[1], a[2], a[3])
}

struct LineContext<'a> {
    file: &'a Path,
    line: usize,
}

impl LineContext<'_> {
    fn error(&self, message: impl Into<String>) -> EvalError {
        EvalError::Parse {
            file: self.file.to_path_buf(),
            line: self.line,
            message: message.into(),
        }
    }
}

/// Maps file keypoint positions to schema positions.
fn joint_order(
    schema: &KeypointSchema,
    joints: Option<&[String]>,
) -> Result<[usize; NUM_KEYPOINTS]> {
    let mut order = [0usize; NUM_KEYPOINTS];
    match joints {
        None => {
            for (i, slot) in order.iter_mut().enumerate() {
                *slot = i;
            }
        }
        Some(names) => {
            if names.len() != NUM_KEYPOINTS {
                return Err(EvalError::Schema(format!(
                    "annotation header lists {} joints, expected {NUM_KEYPOINTS}",
                    names.len()
                )));
            }
            let mut seen = [false; NUM_KEYPOINTS];
            for (i, name) in names.iter().enumerate() {
                let idx = schema
                    .index_of(name)
                    .ok_or_else(|| EvalError::UnknownJoint(name.clone()))?;
                if seen[idx] {
                    return Err(EvalError::Schema(format!(
                        "joint `{name}` listed twice in annotation header"
                    )));
                }
                seen[idx] = true;
                order[i] = idx;
            }
        }
    }
    Ok(order)
}

fn convert_pose(
    raw: PoseIn,
    kind: AnnotationKind,
    order: &[usize; NUM_KEYPOINTS],
    frame_id: u64,
    index: usize,
    ctx: &LineContext<'_>,
) -> Result<Pose> {
    let err = |msg: String| ctx.error(format!("frame {frame_id}, pose {index}: {msg}"));
    if raw.keypoints.len() != NUM_KEYPOINTS {
        return Err(err(format!(
            "expected {NUM_KEYPOINTS} keypoints, got {}",
            raw.keypoints.len()
        )));
    }
    let mut keypoints = [Keypoint::visible(0.0, 0.0); NUM_KEYPOINTS];
    for (i, kp) in raw.keypoints.iter().enumerate() {
        let visibility = match (kp.len(), kind) {
            (3, _) => {
                let v = kp[2];
                let label = if v.fract() == 0.0 && (0.0..=2.0).contains(&v) {
                    Visibility::from_label(v as u8)
                } else {
                    None
                };
                label.ok_or_else(|| {
                    err(format!(
                        "keypoint {i}: visibility must be 0, 1 or 2, got {v}"
                    ))
                })?
            }
            (2, AnnotationKind::Prediction) => Visibility::Visible,
            (2, AnnotationKind::GroundTruth) => {
                return Err(err(format!(
                    "keypoint {i}: ground truth requires a visibility label"
                )))
            }
            (n, _) => {
                return Err(err(format!(
                    "keypoint {i}: expected [x, y, v], got {n} values"
                )))
            }
        };
        if !(kp[0].is_finite() && kp[1].is_finite()) {
            return Err(err(format!("keypoint {i}: non-finite coordinate")));
        }
        keypoints[order[i]] = Keypoint::new(kp[0], kp[1], visibility);
    }
    let bbox = raw.bbox.map(bbox_from);
    match (bbox, kind) {
        (None, AnnotationKind::GroundTruth) => {
            return Err(err("ground-truth pose has no bbox".to_string()))
        }
        (Some(b), _) if b.is_degenerate() || !(b.x.is_finite() && b.y.is_finite()) => {
            return Err(err(format!(
                "degenerate bbox [{}, {}, {}, {}]",
                b.x, b.y, b.w, b.h
            )))
        }
        _ => {}
    }
    if let Some(s) = raw.score {
        if !(0.0..=1.0).contains(&s) {
            return Err(err(format!("score {s} outside [0, 1]")));
        }
    }
    Ok(Pose {
        keypoints,
        bbox,
        track_id: raw.track_id,
        score: raw.score,
        head_bbox: raw.head_bbox.map(bbox_from),
        wraps: raw.wraps,
    })
}

/// Reads and validates one scene file.
pub fn load_annotations(
    path: &Path,
    kind: AnnotationKind,
    schema: &KeypointSchema,
) -> Result<SequenceSet> {
    let file = File::open(path).map_err(|e| EvalError::io(path, e))?;
    read_annotations(BufReader::new(file), path, kind, schema)
}

/// Parses annotation records from any reader; `path` is used for diagnostics
/// and as the fallback scene name.
pub fn read_annotations(
    reader: impl BufRead,
    path: &Path,
    kind: AnnotationKind,
    schema: &KeypointSchema,
) -> Result<SequenceSet> {
    let mut header: Option<(Header, [usize; NUM_KEYPOINTS])> = None;
    let mut frames: Vec<FrameAnnotations> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let ctx = LineContext {
            file: path,
            line: lineno + 1,
        };
        let line = line.map_err(|e| EvalError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let Some((_, order)) = &header else {
            let h: Header = serde_json::from_str(&line)
                .map_err(|e| ctx.error(format!("invalid header record: {e}")))?;
            if h.format != FORMAT_NAME {
                return Err(ctx.error(format!("unknown format `{}`", h.format)));
            }
            if h.version != FORMAT_VERSION {
                return Err(ctx.error(format!("unsupported version {}", h.version)));
            }
            if h.kind != kind {
                return Err(ctx.error(format!(
                    "file holds {} records, expected {}",
                    h.kind.as_str(),
                    kind.as_str()
                )));
            }
            let order =
                joint_order(schema, h.joints.as_deref()).map_err(|e| ctx.error(e.to_string()))?;
            header = Some((h, order));
            continue;
        };
        let raw: FrameIn = serde_json::from_str(&line)
            .map_err(|e| ctx.error(format!("invalid frame record: {e}")))?;
        if let Some(prev) = frames.last() {
            if raw.frame_id <= prev.frame_id {
                return Err(ctx.error(format!(
                    "frame {} follows frame {}; frame ids must increase",
                    raw.frame_id, prev.frame_id
                )));
            }
        }
        let frame_id = raw.frame_id;
        let poses = raw
            .poses
            .into_iter()
            .enumerate()
            .map(|(i, p)| convert_pose(p, kind, order, frame_id, i, &ctx))
            .collect::<Result<Vec<_>>>()?;
        let frame = FrameAnnotations::new(frame_id, poses);
        frame
            .check_unique_tracks()
            .map_err(|e| ctx.error(e.to_string()))?;
        frames.push(frame);
    }
    let Some((h, _)) = header else {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        return Ok(SequenceSet::empty(stem));
    };
    let mut seq = SequenceSet::new(h.scene, frames)?;
    seq.camera_id = h.camera_id;
    if let Some(rate) = h.frame_rate_hz {
        seq.frame_rate_hz = rate;
    }
    Ok(seq)
}

/// Serializes a scene in schema joint order.
pub fn write_annotations(
    seq: &SequenceSet,
    kind: AnnotationKind,
    schema: &KeypointSchema,
    mut out: impl Write,
) -> std::io::Result<()> {
    let header = Header {
        format: FORMAT_NAME.to_string(),
        version: FORMAT_VERSION,
        kind,
        scene: seq.scene.clone(),
        frame_rate_hz: Some(seq.frame_rate_hz),
        camera_id: seq.camera_id,
        joints: Some(schema.names().to_vec()),
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    for frame in seq.frames() {
        let record = FrameOut {
            frame_id: frame.frame_id,
            poses: frame
                .poses
                .iter()
                .map(|p| PoseOut {
                    track_id: p.track_id,
                    bbox: p.bbox.map(bbox_array),
                    score: p.score,
                    head_bbox: p.head_bbox.map(bbox_array),
                    wraps: p.wraps,
                    keypoints: p
                        .keypoints
                        .iter()
                        .map(|k| (k.x, k.y, k.visibility.label()))
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_writer(&mut out, &record)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn save_annotations(
    seq: &SequenceSet,
    kind: AnnotationKind,
    schema: &KeypointSchema,
    path: &Path,
) -> Result<()> {
    let file = File::create(path).map_err(|e| EvalError::io(path, e))?;
    let mut writer = BufWriter::new(file);
    write_annotations(seq, kind, schema, &mut writer).map_err(|e| EvalError::io(path, e))?;
    writer.flush().map_err(|e| EvalError::io(path, e))
}

/// Scene files under `path`: the file itself, or every `*.jsonl` in a directory
/// sorted by file name.
pub fn scene_files(path: &Path) -> Result<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files = Vec::new();
    for entry in std::fs::read_dir(path).map_err(|e| EvalError::io(path, e))? {
        let entry = entry.map_err(|e| EvalError::io(path, e))?;
        let p = entry.path();
        if p.is_file() && p.extension().is_some_and(|e| e == FILE_EXTENSION) {
            files.push(p);
        }
    }
    files.sort();
    Ok(files)
}

/// Loads every scene under `path` (see [`scene_files`]) in parallel.
pub fn load_dataset(
    path: &Path,
    kind: AnnotationKind,
    schema: &KeypointSchema,
) -> Result<Vec<SequenceSet>> {
    scene_files(path)?
        .par_iter()
        .map(|f| load_annotations(f, kind, schema))
        .collect()
}
