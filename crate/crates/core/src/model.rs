//! Core domain types shared by the metric and I/O modules.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{EvalError, Result};

/// Number of body joints in every pose.
pub const NUM_KEYPOINTS: usize = 17;

/// Per-keypoint occlusion label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Visibility {
    /// Out of frame or especially hard to annotate; location inferred from context.
    Invisible = 0,
    /// Obscured by an object or another body part.
    Occluded = 1,
    /// Fully visible.
    Visible = 2,
}

impl Visibility {
    /// All labels, in report order (Visible, Occluded, Invisible).
    pub const REPORT_ORDER: [Visibility; 3] = [
        Visibility::Visible,
        Visibility::Occluded,
        Visibility::Invisible,
    ];

    pub fn from_label(label: u8) -> Option<Self> {
        match label {
            0 => Some(Visibility::Invisible),
            1 => Some(Visibility::Occluded),
            2 => Some(Visibility::Visible),
            _ => None,
        }
    }

    pub fn label(self) -> u8 {
        self as u8
    }

    /// One-letter column tag: V, O or I.
    pub fn short(self) -> &'static str {
        match self {
            Visibility::Visible => "V",
            Visibility::Occluded => "O",
            Visibility::Invisible => "I",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Visibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Visibility::Invisible => "invisible",
            Visibility::Occluded => "occluded",
            Visibility::Visible => "visible",
        };
        f.write_str(name)
    }
}

/// A value per visibility level, indexed by label.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PerVisibility<T> {
    pub invisible: T,
    pub occluded: T,
    pub visible: T,
}

impl<T> PerVisibility<T> {
    pub fn from_fn(mut f: impl FnMut(Visibility) -> T) -> Self {
        PerVisibility {
            invisible: f(Visibility::Invisible),
            occluded: f(Visibility::Occluded),
            visible: f(Visibility::Visible),
        }
    }

    pub fn try_from_fn<E>(mut f: impl FnMut(Visibility) -> Result<T, E>) -> Result<Self, E> {
        Ok(PerVisibility {
            invisible: f(Visibility::Invisible)?,
            occluded: f(Visibility::Occluded)?,
            visible: f(Visibility::Visible)?,
        })
    }

    pub fn get(&self, level: Visibility) -> &T {
        match level {
            Visibility::Invisible => &self.invisible,
            Visibility::Occluded => &self.occluded,
            Visibility::Visible => &self.visible,
        }
    }

    pub fn get_mut(&mut self, level: Visibility) -> &mut T {
        match level {
            Visibility::Invisible => &mut self.invisible,
            Visibility::Occluded => &mut self.occluded,
            Visibility::Visible => &mut self.visible,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Keypoint {
    pub x: f64,
    pub y: f64,
    pub visibility: Visibility,
}

impl Keypoint {
    pub fn new(x: f64, y: f64, visibility: Visibility) -> Self {
        Keypoint { x, y, visibility }
    }

    pub fn visible(x: f64, y: f64) -> Self {
        Keypoint::new(x, y, Visibility::Visible)
    }

    pub fn distance(&self, other: &Keypoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Axis-aligned box `(x, y, w, h)` in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        BBox { x, y, w, h }
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.w > 0.0 && self.h > 0.0 && self.w.is_finite() && self.h.is_finite())
    }

    pub fn intersection(&self, other: &BBox) -> f64 {
        let iw = (self.x + self.w).min(other.x + other.w) - self.x.max(other.x);
        let ih = (self.y + self.h).min(other.y + other.h) - self.y.max(other.y);
        if iw <= 0.0 || ih <= 0.0 {
            0.0
        } else {
            iw * ih
        }
    }

    pub fn iou(&self, other: &BBox) -> f64 {
        let inter = self.intersection(other);
        let union = self.area() + other.area() - inter;
        if union <= 0.0 {
            0.0
        } else {
            inter / union
        }
    }

    /// Tight box around a set of keypoints.
    pub fn enclosing(keypoints: &[Keypoint]) -> Option<BBox> {
        let first = keypoints.first()?;
        let (mut x0, mut y0, mut x1, mut y1) = (first.x, first.y, first.x, first.y);
        for kp in &keypoints[1..] {
            x0 = x0.min(kp.x);
            y0 = y0.min(kp.y);
            x1 = x1.max(kp.x);
            y1 = y1.max(kp.y);
        }
        Some(BBox::new(x0, y0, x1 - x0, y1 - y0))
    }
}

/// One annotated or predicted body pose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    /// Joints in schema order.
    pub keypoints: [Keypoint; NUM_KEYPOINTS],
    pub bbox: Option<BBox>,
    pub track_id: Option<u64>,
    pub score: Option<f64>,
    /// Head box; carried through I/O and statistics only.
    pub head_bbox: Option<BBox>,
    /// Set when the box crosses the panorama seam and x values were wrapped.
    pub wraps: bool,
}

impl Pose {
    pub fn new(keypoints: [Keypoint; NUM_KEYPOINTS]) -> Self {
        Pose {
            keypoints,
            bbox: None,
            track_id: None,
            score: None,
            head_bbox: None,
            wraps: false,
        }
    }

    pub fn with_bbox(mut self, bbox: BBox) -> Self {
        self.bbox = Some(bbox);
        self
    }

    pub fn with_track(mut self, track_id: u64) -> Self {
        self.track_id = Some(track_id);
        self
    }

    pub fn with_score(mut self, score: f64) -> Self {
        self.score = Some(score);
        self
    }

    /// Sum of the visibility labels of all joints.
    pub fn overall_visibility(&self) -> u32 {
        self.keypoints
            .iter()
            .map(|kp| u32::from(kp.visibility.label()))
            .sum()
    }

    pub fn count_at(&self, level: Visibility) -> usize {
        self.keypoints
            .iter()
            .filter(|kp| kp.visibility == level)
            .count()
    }

    /// Short human-readable identity used in diagnostics.
    pub fn describe(&self) -> String {
        match self.track_id {
            Some(id) => format!("(track {id})"),
            None => "(untracked)".to_string(),
        }
    }

    /// Copy with every joint and box displaced by `(dx, dy)`.
    pub fn translated(&self, dx: f64, dy: f64) -> Pose {
        let mut out = self.clone();
        for kp in out.keypoints.iter_mut() {
            kp.x += dx;
            kp.y += dy;
        }
        for b in [&mut out.bbox, &mut out.head_bbox].into_iter().flatten() {
            b.x += dx;
            b.y += dy;
        }
        out
    }
}

/// Which OKS form is used for pose similarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OksMode {
    /// `exp(-d_E^2 / (2 s^2 k^2))` with `d_E` the mean joint distance and a scalar `k`.
    PaperMean,
    /// COCO-style mean over joints of `exp(-d_j^2 / (2 s^2 k_j^2))`.
    PerJointAverage,
}

impl OksMode {
    pub fn as_str(self) -> &'static str {
        match self {
            OksMode::PaperMean => "paper_mean",
            OksMode::PerJointAverage => "per_joint_average",
        }
    }
}

impl std::str::FromStr for OksMode {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "paper_mean" | "paper" | "mean" => Ok(OksMode::PaperMean),
            "per_joint_average" | "per_joint" | "coco" => Ok(OksMode::PerJointAverage),
            other => Err(EvalError::Schema(format!("unknown oks_mode `{other}`"))),
        }
    }
}

/// Joint names paired with their OKS sigmas.
pub const DEFAULT_JOINTS: [(&str, f64); NUM_KEYPOINTS] = [
    ("head", 0.026),
    ("left_eye", 0.025),
    ("right_eye", 0.025),
    // Doubles as the center shoulder.
    ("neck", 0.079),
    ("left_shoulder", 0.079),
    ("right_shoulder", 0.079),
    ("left_elbow", 0.072),
    ("right_elbow", 0.072),
    ("left_wrist", 0.062),
    ("right_wrist", 0.062),
    ("left_hip", 0.107),
    ("right_hip", 0.107),
    ("center_hip", 0.107),
    ("left_knee", 0.087),
    ("right_knee", 0.087),
    ("left_ankle", 0.089),
    ("right_ankle", 0.089),
];

/// Joint names, per-joint sigmas and OKS configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeypointSchema {
    names: Vec<String>,
    sigmas: [f64; NUM_KEYPOINTS],
    oks_mode: OksMode,
    scalar_k: f64,
}

impl Default for KeypointSchema {
    fn default() -> Self {
        let names = DEFAULT_JOINTS.iter().map(|(n, _)| n.to_string()).collect();
        let sigmas = DEFAULT_JOINTS.map(|(_, s)| s);
        let scalar_k = sigmas.iter().sum::<f64>() / NUM_KEYPOINTS as f64;
        KeypointSchema {
            names,
            sigmas,
            oks_mode: OksMode::PaperMean,
            scalar_k,
        }
    }
}

impl KeypointSchema {
    pub fn new(
        names: Vec<String>,
        sigmas: [f64; NUM_KEYPOINTS],
        oks_mode: OksMode,
        scalar_k: f64,
    ) -> Result<Self> {
        if names.len() != NUM_KEYPOINTS {
            return Err(EvalError::Schema(format!(
                "expected {NUM_KEYPOINTS} joint names, got {}",
                names.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(EvalError::Schema(format!("duplicate joint name `{name}`")));
            }
        }
        for (name, sigma) in names.iter().zip(sigmas.iter()) {
            if !(*sigma > 0.0 && sigma.is_finite()) {
                return Err(EvalError::Schema(format!(
                    "sigma for `{name}` must be positive, got {sigma}"
                )));
            }
        }
        if !(scalar_k > 0.0 && scalar_k.is_finite()) {
            return Err(EvalError::Schema(format!(
                "scalar_k must be positive, got {scalar_k}"
            )));
        }
        Ok(KeypointSchema {
            names,
            sigmas,
            oks_mode,
            scalar_k,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn sigmas(&self) -> &[f64; NUM_KEYPOINTS] {
        &self.sigmas
    }

    pub fn oks_mode(&self) -> OksMode {
        self.oks_mode
    }

    pub fn scalar_k(&self) -> f64 {
        self.scalar_k
    }

    pub fn with_mode(mut self, mode: OksMode) -> Self {
        self.oks_mode = mode;
        self
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Parses the plain-text schema document.
    ///
    /// Lines are either `key = value` settings (`oks_mode`, `scalar_k`) or
    /// `joint_name sigma` rows, 17 of them, in schema order. `#` starts a comment.
    /// When `scalar_k` is omitted it defaults to the mean of the sigmas.
    pub fn parse(text: &str) -> Result<Self> {
        let mut names = Vec::new();
        let mut sigmas = Vec::new();
        let mut mode = OksMode::PaperMean;
        let mut scalar_k = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| EvalError::Schema(format!("line {}: {msg}", lineno + 1));
            if let Some((key, value)) = line.split_once('=') {
                let value = value.trim();
                match key.trim() {
                    "oks_mode" => mode = value.parse()?,
                    "scalar_k" => {
                        scalar_k = Some(
                            value
                                .parse::<f64>()
                                .map_err(|e| bad(format!("scalar_k: {e}")))?,
                        )
                    }
                    other => return Err(bad(format!("unknown key `{other}`"))),
                }
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(name), Some(sigma), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(bad(format!("expected `name sigma`, got `{line}`")));
            };
            let sigma = sigma
                .parse::<f64>()
                .map_err(|e| bad(format!("sigma for `{name}`: {e}")))?;
            names.push(name.to_string());
            sigmas.push(sigma);
        }
        let sigmas: [f64; NUM_KEYPOINTS] = sigmas.try_into().map_err(|v: Vec<f64>| {
            EvalError::Schema(format!(
                "expected {NUM_KEYPOINTS} joint rows, got {}",
                v.len()
            ))
        })?;
        let scalar_k =
            scalar_k.unwrap_or_else(|| sigmas.iter().sum::<f64>() / NUM_KEYPOINTS as f64);
        KeypointSchema::new(names, sigmas, mode, scalar_k)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "oks_mode = {}\nscalar_k = {}\n",
            self.oks_mode.as_str(),
            self.scalar_k
        );
        for (name, sigma) in self.names.iter().zip(self.sigmas.iter()) {
            out.push_str(&format!("{name} {sigma}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameAnnotations {
    pub frame_id: u64,
    pub poses: Vec<Pose>,
}

impl FrameAnnotations {
    pub fn new(frame_id: u64, poses: Vec<Pose>) -> Self {
        FrameAnnotations { frame_id, poses }
    }

    /// Rejects repeated track ids within the frame.
    pub fn check_unique_tracks(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for pose in &self.poses {
            if let Some(id) = pose.track_id {
                if !seen.insert(id) {
                    return Err(EvalError::DuplicateTrack {
                        frame: self.frame_id,
                        track_id: id,
                    });
                }
            }
        }
        Ok(())
    }
}

/// A track id and its poses over the frames where it exists.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    track_id: u64,
    states: BTreeMap<u64, Pose>,
}

impl Trajectory {
    pub fn new(track_id: u64, states: BTreeMap<u64, Pose>) -> Result<Self> {
        if states.is_empty() {
            return Err(EvalError::EmptyTrajectory(track_id));
        }
        Ok(Trajectory { track_id, states })
    }

    pub fn track_id(&self) -> u64 {
        self.track_id
    }

    pub fn states(&self) -> &BTreeMap<u64, Pose> {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn domain(&self) -> impl Iterator<Item = u64> + '_ {
        self.states.keys().copied()
    }

    pub fn get(&self, frame_id: u64) -> Option<&Pose> {
        self.states.get(&frame_id)
    }
}

/// Frame-indexed annotations of one scene.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSet {
    pub scene: String,
    pub camera_id: Option<u32>,
    pub frame_rate_hz: f64,
    frames: Vec<FrameAnnotations>,
}

impl SequenceSet {
    pub const DEFAULT_FRAME_RATE_HZ: f64 = 15.0;

    pub fn new(scene: impl Into<String>, frames: Vec<FrameAnnotations>) -> Result<Self> {
        let scene = scene.into();
        for pair in frames.windows(2) {
            if pair[1].frame_id <= pair[0].frame_id {
                return Err(EvalError::FrameOrder {
                    scene,
                    prev: pair[0].frame_id,
                    next: pair[1].frame_id,
                });
            }
        }
        Ok(SequenceSet {
            scene,
            camera_id: None,
            frame_rate_hz: Self::DEFAULT_FRAME_RATE_HZ,
            frames,
        })
    }

    pub fn empty(scene: impl Into<String>) -> Self {
        SequenceSet {
            scene: scene.into(),
            camera_id: None,
            frame_rate_hz: Self::DEFAULT_FRAME_RATE_HZ,
            frames: Vec::new(),
        }
    }

    pub fn frames(&self) -> &[FrameAnnotations] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<FrameAnnotations> {
        self.frames
    }

    pub fn frame(&self, frame_id: u64) -> Option<&FrameAnnotations> {
        self.frames
            .binary_search_by_key(&frame_id, |f| f.frame_id)
            .ok()
            .map(|i| &self.frames[i])
    }

    pub fn pose_count(&self) -> usize {
        self.frames.iter().map(|f| f.poses.len()).sum()
    }

    /// Frame ids present in either set, ascending, with the poses of each side
    /// (empty when a side has no record for that frame).
    pub fn aligned<'a>(gt: &'a SequenceSet, pred: &'a SequenceSet) -> Vec<AlignedFrame<'a>> {
        let mut out = Vec::with_capacity(gt.frames.len().max(pred.frames.len()));
        let (mut i, mut j) = (0, 0);
        let (g, p) = (&gt.frames, &pred.frames);
        while i < g.len() || j < p.len() {
            let take_gt = j >= p.len() || (i < g.len() && g[i].frame_id <= p[j].frame_id);
            let take_pred = i >= g.len() || (j < p.len() && p[j].frame_id <= g[i].frame_id);
            let frame_id = if take_gt {
                g[i].frame_id
            } else {
                p[j].frame_id
            };
            let gt_poses: &[Pose] = if take_gt { &g[i].poses } else { &[] };
            let pred_poses: &[Pose] = if take_pred { &p[j].poses } else { &[] };
            out.push(AlignedFrame {
                frame_id,
                gt: gt_poses,
                pred: pred_poses,
            });
            i += usize::from(take_gt);
            j += usize::from(take_pred);
        }
        out
    }
}

/// Ground-truth and predicted poses of one frame id.
#[derive(Debug, Clone, Copy)]
pub struct AlignedFrame<'a> {
    pub frame_id: u64,
    pub gt: &'a [Pose],
    pub pred: &'a [Pose],
}

/// Groups the id-carrying poses of a sequence into trajectories, ordered by track id.
///
/// Poses without a track id are skipped.
pub fn build_trajectories(seq: &SequenceSet) -> Result<Vec<Trajectory>> {
    let mut by_id: BTreeMap<u64, BTreeMap<u64, Pose>> = BTreeMap::new();
    for frame in seq.frames() {
        for pose in &frame.poses {
            let Some(id) = pose.track_id else { continue };
            match by_id.entry(id).or_default().entry(frame.frame_id) {
                Entry::Occupied(_) => {
                    return Err(EvalError::DuplicateTrack {
                        frame: frame.frame_id,
                        track_id: id,
                    })
                }
                Entry::Vacant(slot) => {
                    slot.insert(pose.clone());
                }
            }
        }
    }
    Ok(by_id
        .into_iter()
        .map(|(track_id, states)| Trajectory { track_id, states })
        .collect())
}

/// Inverse of [`build_trajectories`]: one frame record per frame id that has a state,
/// poses ordered by track id.
pub fn flatten_trajectories(scene: &str, tracks: &[Trajectory]) -> Result<SequenceSet> {
    let mut frames: BTreeMap<u64, Vec<Pose>> = BTreeMap::new();
    let mut sorted: Vec<&Trajectory> = tracks.iter().collect();
    sorted.sort_by_key(|t| t.track_id);
    for track in sorted {
        for (&frame_id, pose) in &track.states {
            let mut pose = pose.clone();
            pose.track_id = Some(track.track_id);
            frames.entry(frame_id).or_default().push(pose);
        }
    }
    let frames = frames
        .into_iter()
        .map(|(frame_id, poses)| FrameAnnotations::new(frame_id, poses))
        .collect();
    SequenceSet::new(scene, frames)
}
