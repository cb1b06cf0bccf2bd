//! Converter from COCO-style per-scene keypoint JSON to [`SequenceSet`].
//!
//! Expected input: `images` (`id`, `file_name`), `annotations` (`image_id`,
//! `track_id`, `bbox`, flat `keypoints` triples, optional `score`) and an
//! optional `categories[0].keypoints` list of joint names in file order.
//! Frame ids are taken from the numeric file stem when every image has one,
//! otherwise from the position of the image in id order.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use crate::error::{EvalError, Result};
use crate::model::{
    BBox, FrameAnnotations, Keypoint, KeypointSchema, Pose, SequenceSet, Visibility, NUM_KEYPOINTS,
};

#[derive(Debug, Deserialize)]
struct CocoFile {
    images: Vec<CocoImage>,
    #[serde(default)]
    annotations: Vec<CocoAnnotation>,
    #[serde(default)]
    categories: Vec<CocoCategory>,
}

#[derive(Debug, Deserialize)]
struct CocoImage {
    id: u64,
    #[serde(default)]
    file_name: String,
}

#[derive(Debug, Deserialize)]
struct CocoAnnotation {
    image_id: u64,
    #[serde(default)]
    track_id: Option<u64>,
    #[serde(default)]
    bbox: Option<[f64; 4]>,
    keypoints: Vec<f64>,
    #[serde(default)]
    score: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct CocoCategory {
    #[serde(default)]
    keypoints: Vec<String>,
}

fn numeric_stem(name: &str) -> Option<u64> {
    Path::new(name).file_stem()?.to_str()?.parse().ok()
}

/// Reads one COCO-style scene document.
pub fn convert_coco_scene(
    reader: impl Read,
    scene: &str,
    schema: &KeypointSchema,
) -> Result<SequenceSet> {
    let doc: CocoFile = serde_json::from_reader(reader).map_err(|e| EvalError::Parse {
        file: scene.into(),
        line: e.line(),
        message: e.to_string(),
    })?;
    let order: Vec<usize> = match doc.categories.first().map(|c| &c.keypoints) {
        Some(names) if !names.is_empty() => names
            .iter()
            .map(|n| {
                schema
                    .index_of(n)
                    .ok_or_else(|| EvalError::UnknownJoint(n.clone()))
            })
            .collect::<Result<_>>()?,
        _ => (0..NUM_KEYPOINTS).collect(),
    };
    if order.len() != NUM_KEYPOINTS {
        return Err(EvalError::Schema(format!(
            "category lists {} joints, expected {NUM_KEYPOINTS}",
            order.len()
        )));
    }

    let mut images = doc.images;
    images.sort_by_key(|im| im.id);
    let use_stems = images
        .iter()
        .all(|im| numeric_stem(&im.file_name).is_some());
    let frame_of: BTreeMap<u64, u64> = images
        .iter()
        .enumerate()
        .map(|(i, im)| {
            let frame = if use_stems {
                numeric_stem(&im.file_name).unwrap_or(i as u64)
            } else {
                i as u64
            };
            (im.id, frame)
        })
        .collect();

    let mut frames: BTreeMap<u64, Vec<Pose>> =
        frame_of.values().map(|&f| (f, Vec::new())).collect();
    for (n, ann) in doc.annotations.into_iter().enumerate() {
        let bad = |msg: String| EvalError::Parse {
            file: scene.into(),
            line: 0,
            message: format!("annotation {n}: {msg}"),
        };
        let frame = *frame_of
            .get(&ann.image_id)
            .ok_or_else(|| bad(format!("unknown image id {}", ann.image_id)))?;
        if ann.keypoints.len() != 3 * NUM_KEYPOINTS {
            return Err(bad(format!(
                "expected {} keypoint values",
                3 * NUM_KEYPOINTS
            )));
        }
        let mut keypoints = [Keypoint::visible(0.0, 0.0); NUM_KEYPOINTS];
        for (i, triple) in ann.keypoints.chunks_exact(3).enumerate() {
            let visibility = Visibility::from_label(triple[2] as u8)
                .filter(|_| triple[2].fract() == 0.0 && triple[2] >= 0.0)
                .ok_or_else(|| bad(format!("keypoint {i}: visibility {}", triple[2])))?;
            keypoints[order[i]] = Keypoint::new(triple[0], triple[1], visibility);
        }
        let mut pose = Pose::new(keypoints);
        pose.bbox = ann.bbox.map(|b| BBox::new(b[0], b[1], b[2], b[3]));
        pose.track_id = ann.track_id;
        pose.score = ann.score;
        frames.entry(frame).or_default().push(pose);
    }
    let frames = frames
        .into_iter()
        .map(|(id, poses)| {
            let f = FrameAnnotations::new(id, poses);
            f.check_unique_tracks().map(|_| f)
        })
        .collect::<Result<Vec<_>>>()?;
    SequenceSet::new(scene, frames)
}
