//! Fusion of per-camera annotations into the stitched panorama.

use std::collections::BTreeMap;

use crate::dataio::format::AnnotationKind;
use crate::error::{EvalError, Result};
use crate::model::{BBox, FrameAnnotations, Keypoint, Pose, SequenceSet, NUM_KEYPOINTS};

/// Default overlap above which a merged prediction is suppressed.
pub const DEFAULT_NMS_IOU: f64 = 0.5;

/// Horizontal placement of each camera view in the panorama.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraLayout {
    pub width: f64,
    pub height: f64,
    /// `(camera id, x offset)` in panorama order.
    pub cameras: Vec<(u32, f64)>,
}

impl Default for CameraLayout {
    fn default() -> Self {
        CameraLayout {
            width: 3760.0,
            height: 480.0,
            cameras: vec![(0, 0.0), (2, 752.0), (4, 1504.0), (6, 2256.0), (8, 3008.0)],
        }
    }
}

impl CameraLayout {
    pub fn new(width: f64, height: f64, cameras: Vec<(u32, f64)>) -> Result<Self> {
        if !(width > 0.0 && width.is_finite() && height > 0.0 && height.is_finite()) {
            return Err(EvalError::Layout(format!(
                "panorama size {width} x {height} must be positive"
            )));
        }
        if cameras.is_empty() {
            return Err(EvalError::Layout("no cameras listed".into()));
        }
        for (i, &(id, offset)) in cameras.iter().enumerate() {
            if !(0.0..width).contains(&offset) {
                return Err(EvalError::Layout(format!(
                    "camera {id} offset {offset} outside [0, {width})"
                )));
            }
            if let Some(&(prev_id, prev)) = i.checked_sub(1).map(|p| &cameras[p]) {
                if offset <= prev {
                    return Err(EvalError::Layout(format!(
                        "camera {id} offset {offset} does not follow camera {prev_id} at {prev}"
                    )));
                }
            }
            if cameras[..i].iter().any(|&(other, _)| other == id) {
                return Err(EvalError::Layout(format!("camera {id} listed twice")));
            }
        }
        Ok(CameraLayout {
            width,
            height,
            cameras,
        })
    }

    /// Parses `key = value` lines: `panorama_width`, `panorama_height` and one
    /// `camera_<id> = <x offset>` per camera, in panorama order.
    pub fn parse(text: &str) -> Result<Self> {
        let defaults = CameraLayout::default();
        let (mut width, mut height) = (defaults.width, defaults.height);
        let mut cameras = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| EvalError::Layout(format!("line {}: {msg}", lineno + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let number = value
                .parse::<f64>()
                .map_err(|e| bad(format!("`{key}`: {e}")))?;
            match key {
                "panorama_width" => width = number,
                "panorama_height" => height = number,
                _ => {
                    let id = key
                        .strip_prefix("camera_")
                        .or_else(|| key.strip_prefix("camera."))
                        .and_then(|id| id.parse::<u32>().ok())
                        .ok_or_else(|| bad(format!("unknown key `{key}`")))?;
                    cameras.push((id, number));
                }
            }
        }
        if cameras.is_empty() {
            cameras = defaults.cameras;
        }
        CameraLayout::new(width, height, cameras)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "panorama_width = {}\npanorama_height = {}\n",
            self.width, self.height
        );
        for (id, offset) in &self.cameras {
            out.push_str(&format!("camera_{id} = {offset}\n"));
        }
        out
    }

    fn wrap_x(&self, x: f64) -> f64 {
        let w = x.rem_euclid(self.width);
        // rem_euclid can round up to the modulus itself.
        if w >= self.width {
            0.0
        } else {
            w
        }
    }

    /// Overlap of two panorama boxes, accounting for the seam.
    pub fn circular_iou(&self, a: &BBox, b: &BBox) -> f64 {
        [-self.width, 0.0, self.width]
            .iter()
            .map(|shift| a.iou(&BBox::new(b.x + shift, b.y, b.w, b.h)))
            .fold(0.0, f64::max)
    }
}

struct ViewPose<'a> {
    camera: usize,
    offset: f64,
    pose: &'a Pose,
}

fn shift_keypoint(layout: &CameraLayout, kp: &Keypoint, offset: f64) -> Keypoint {
    Keypoint::new(layout.wrap_x(kp.x + offset), kp.y, kp.visibility)
}

fn shift_box(layout: &CameraLayout, b: &BBox, offset: f64) -> (BBox, bool) {
    let x = layout.wrap_x(b.x + offset);
    (BBox::new(x, b.y, b.w, b.h), x + b.w > layout.width)
}

/// Moves a single-view pose into panorama coordinates.
fn shift_pose(layout: &CameraLayout, pose: &Pose, offset: f64) -> Pose {
    let mut out = pose.clone();
    for kp in out.keypoints.iter_mut() {
        *kp = shift_keypoint(layout, kp, offset);
    }
    if let Some(b) = &pose.bbox {
        let (b, wraps) = shift_box(layout, b, offset);
        out.bbox = Some(b);
        out.wraps = wraps;
    }
    if let Some(h) = &pose.head_bbox {
        out.head_bbox = Some(shift_box(layout, h, offset).0);
    }
    out
}

/// Joint-by-joint fusion of the views of one track.
///
/// Each joint comes from the view with the higher visibility label; ties go
/// to the pose with the higher summed visibility, then to the earlier camera.
fn fuse(layout: &CameraLayout, views: &[ViewPose<'_>]) -> Pose {
    let rank = |v: &ViewPose<'_>| (v.pose.overall_visibility(), std::cmp::Reverse(v.camera));
    let primary = views
        .iter()
        .max_by_key(|v| rank(v))
        .expect("at least one view");
    let mut out = shift_pose(layout, primary.pose, primary.offset);
    for j in 0..NUM_KEYPOINTS {
        let best = views
            .iter()
            .max_by_key(|v| (v.pose.keypoints[j].visibility, rank(v)))
            .expect("at least one view");
        out.keypoints[j] = shift_keypoint(layout, &best.pose.keypoints[j], best.offset);
    }
    // Box: union of the view boxes, unwrapped next to the primary view's box.
    if let Some((reference, _)) = primary
        .pose
        .bbox
        .map(|b| shift_box(layout, &b, primary.offset))
    {
        let (mut x0, mut y0) = (reference.x, reference.y);
        let (mut x1, mut y1) = (reference.x + reference.w, reference.y + reference.h);
        for v in views {
            let Some(b) = v.pose.bbox else { continue };
            let (b, _) = shift_box(layout, &b, v.offset);
            let x = [b.x - layout.width, b.x, b.x + layout.width]
                .into_iter()
                .min_by(|a, c| (a - reference.x).abs().total_cmp(&(c - reference.x).abs()))
                .unwrap_or(b.x);
            x0 = x0.min(x);
            y0 = y0.min(b.y);
            x1 = x1.max(x + b.w);
            y1 = y1.max(b.y + b.h);
        }
        let merged = BBox::new(x0, y0, x1 - x0, y1 - y0);
        let (merged, wraps) = shift_box(layout, &merged, 0.0);
        out.bbox = Some(merged);
        out.wraps = wraps;
    }
    out
}

fn check_frames(per_camera: &[&SequenceSet]) -> Result<()> {
    let first: Vec<u64> = per_camera[0].frames().iter().map(|f| f.frame_id).collect();
    for seq in &per_camera[1..] {
        let ids: Vec<u64> = seq.frames().iter().map(|f| f.frame_id).collect();
        if ids != first {
            let differing = ids
                .iter()
                .zip(&first)
                .find(|(a, b)| a != b)
                .map(|(a, b)| format!("frame {a} vs {b}"))
                .unwrap_or_else(|| format!("{} vs {} frames", ids.len(), first.len()));
            return Err(EvalError::FrameMismatch(format!(
                "scene `{}` camera {:?}: {differing}",
                seq.scene, seq.camera_id
            )));
        }
    }
    Ok(())
}

/// Orders views by the layout: by `camera_id` when every view carries one,
/// otherwise positionally.
fn arrange<'a>(
    per_camera: &'a [SequenceSet],
    layout: &CameraLayout,
) -> Result<Vec<(&'a SequenceSet, f64)>> {
    if per_camera.len() != layout.cameras.len() {
        return Err(EvalError::Config(format!(
            "layout lists {} cameras but {} per-camera scenes were given",
            layout.cameras.len(),
            per_camera.len()
        )));
    }
    if per_camera.iter().all(|s| s.camera_id.is_some()) {
        layout
            .cameras
            .iter()
            .map(|&(id, offset)| {
                per_camera
                    .iter()
                    .find(|s| s.camera_id == Some(id))
                    .map(|s| (s, offset))
                    .ok_or_else(|| EvalError::Config(format!("no view for camera {id}")))
            })
            .collect()
    } else {
        Ok(per_camera
            .iter()
            .zip(&layout.cameras)
            .map(|(s, &(_, offset))| (s, offset))
            .collect())
    }
}

/// Greedy box suppression, highest score first; returns surviving indices in input order.
pub fn suppress_duplicates(
    layout: &CameraLayout,
    poses: &[Pose],
    iou_threshold: f64,
) -> Result<Vec<usize>> {
    let boxes: Vec<BBox> = poses
        .iter()
        .map(|p| {
            p.bbox
                .or_else(|| BBox::enclosing(&p.keypoints))
                .expect("17 keypoints")
        })
        .collect();
    let mut order: Vec<usize> = (0..poses.len()).collect();
    let scores: Vec<f64> = poses
        .iter()
        .enumerate()
        .map(|(index, p)| p.score.ok_or(EvalError::MissingScore { frame: 0, index }))
        .collect::<Result<_>>()?;
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        if kept
            .iter()
            .all(|&k| layout.circular_iou(&boxes[k], &boxes[i]) <= iou_threshold)
        {
            kept.push(i);
        }
    }
    kept.sort_unstable();
    Ok(kept)
}

/// Stitches per-camera scenes into one panoramic scene.
pub fn merge_views(
    per_camera: &[SequenceSet],
    layout: &CameraLayout,
    kind: AnnotationKind,
    nms_iou: f64,
) -> Result<SequenceSet> {
    let views = arrange(per_camera, layout)?;
    let seqs: Vec<&SequenceSet> = views.iter().map(|(s, _)| *s).collect();
    check_frames(&seqs)?;
    let frame_count = seqs[0].frames().len();
    let mut frames = Vec::with_capacity(frame_count);
    for f in 0..frame_count {
        let frame_id = seqs[0].frames()[f].frame_id;
        let mut candidates = Vec::new();
        for (camera, (seq, offset)) in views.iter().enumerate() {
            for pose in &seq.frames()[f].poses {
                candidates.push(ViewPose {
                    camera,
                    offset: *offset,
                    pose,
                });
            }
        }
        let poses = match kind {
            AnnotationKind::GroundTruth => {
                let mut groups: BTreeMap<u64, Vec<ViewPose<'_>>> = BTreeMap::new();
                for (index, c) in candidates.into_iter().enumerate() {
                    let id = c.pose.track_id.ok_or(EvalError::MissingTrackId {
                        frame: frame_id,
                        index,
                    })?;
                    groups.entry(id).or_default().push(c);
                }
                groups.values().map(|views| fuse(layout, views)).collect()
            }
            AnnotationKind::Prediction => {
                let shifted: Vec<Pose> = candidates
                    .iter()
                    .map(|c| shift_pose(layout, c.pose, c.offset))
                    .collect();
                let kept = suppress_duplicates(layout, &shifted, nms_iou).map_err(|e| match e {
                    EvalError::MissingScore { index, .. } => EvalError::MissingScore {
                        frame: frame_id,
                        index,
                    },
                    other => other,
                })?;
                kept.into_iter().map(|i| shifted[i].clone()).collect()
            }
        };
        frames.push(FrameAnnotations::new(frame_id, poses));
    }
    let mut out = SequenceSet::new(seqs[0].scene.clone(), frames)?;
    out.frame_rate_hz = seqs[0].frame_rate_hz;
    Ok(out)
}
