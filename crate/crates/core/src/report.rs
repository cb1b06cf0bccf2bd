//! Dataset-level evaluation: pairs scenes, runs every metric and collects the
//! numbers the command-line tables and JSON reports are built from.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classic::{
    average_precision, coco_thresholds, mean_average_precision, track_metrics, ScenePair,
    TrackEvalResult, DEFAULT_OKS_THRESHOLD,
};
use crate::error::{EvalError, Result};
use crate::model::{
    build_trajectories, KeypointSchema, OksMode, PerVisibility, SequenceSet, Visibility,
};
use crate::ospa::{loc_breakdown, ospa_pose, LevelLoc};
use crate::ospa2::{ospa2_pose, Ospa2Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub oks_threshold: f64,
    /// Also report AP averaged over OKS thresholds 0.50:0.05:0.95.
    pub coco_map: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            oks_threshold: DEFAULT_OKS_THRESHOLD,
            coco_map: false,
        }
    }
}

impl EvalOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.oks_threshold > 0.0 && self.oks_threshold < 1.0) {
            return Err(EvalError::Config(format!(
                "OKS threshold {} must lie in (0, 1)",
                self.oks_threshold
            )));
        }
        Ok(())
    }
}

/// Matches prediction scenes to ground-truth scenes by name.
///
/// A ground-truth scene without predictions is paired with an empty scene.
/// When each side holds exactly one scene the two are paired regardless of name.
pub fn pair_scenes(gt: &[SequenceSet], pred: &[SequenceSet]) -> Vec<(SequenceSet, SequenceSet)> {
    if gt.len() == 1 && pred.len() == 1 {
        if gt[0].scene != pred[0].scene {
            log::warn!(
                "pairing ground-truth scene `{}` with prediction scene `{}`",
                gt[0].scene,
                pred[0].scene
            );
        }
        return vec![(gt[0].clone(), pred[0].clone())];
    }
    for p in pred {
        if !gt.iter().any(|g| g.scene == p.scene) {
            log::warn!(
                "prediction scene `{}` has no ground truth; ignored",
                p.scene
            );
        }
    }
    gt.iter()
        .map(|g| {
            let p = pred
                .iter()
                .find(|p| p.scene == g.scene)
                .cloned()
                .unwrap_or_else(|| SequenceSet::empty(g.scene.clone()));
            (g.clone(), p)
        })
        .collect()
}

/// Localization attributed to one visibility level, with the normalizations
/// reported alongside the raw sum.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VisibilityLoc {
    /// Sum over frames of the per-frame contribution.
    pub sum: f64,
    /// `sum` divided by the number of evaluated frames.
    pub per_frame: f64,
    /// `sum` divided by the number of ground-truth poses.
    pub per_pose: f64,
    /// `sum` divided by the number of ground-truth keypoints with this label.
    pub per_keypoint: f64,
    pub gt_keypoints: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseRow {
    pub scene: String,
    pub frames: usize,
    pub gt_poses: usize,
    pub pred_poses: usize,
    /// Mean of per-frame OSPA-Pose.
    pub ospa: f64,
    pub loc: f64,
    pub card: f64,
    pub ap: f64,
    pub ar: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coco_map: Option<f64>,
    pub visibility: PerVisibility<VisibilityLoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseEvalReport {
    pub oks_mode: OksMode,
    pub oks_threshold: f64,
    pub overall: PoseRow,
    pub scenes: Vec<PoseRow>,
}

/// Per-frame sums for one scene, kept in frame order.
struct SceneFrames {
    totals: Vec<(f64, f64, f64)>,
    levels: Vec<PerVisibility<LevelLoc>>,
}

fn scene_frames(
    gt: &SequenceSet,
    pred: &SequenceSet,
    schema: &KeypointSchema,
) -> Result<SceneFrames> {
    let mut out = SceneFrames {
        totals: Vec::new(),
        levels: Vec::new(),
    };
    for frame in SequenceSet::aligned(gt, pred) {
        let result = ospa_pose(frame.gt, frame.pred, schema)?;
        out.levels
            .push(loc_breakdown(frame.gt, frame.pred, schema, &result)?);
        out.totals.push((result.total, result.loc, result.card));
    }
    Ok(out)
}

fn pose_row(
    scene: String,
    frames: &[&SceneFrames],
    gt_poses: usize,
    pred_poses: usize,
    ap: (f64, f64),
    coco_map: Option<f64>,
) -> PoseRow {
    let count: usize = frames.iter().map(|f| f.totals.len()).sum();
    let mean = |pick: fn(&(f64, f64, f64)) -> f64| {
        if count == 0 {
            return 0.0;
        }
        let mut sum = 0.0;
        for f in frames {
            for t in &f.totals {
                sum += pick(t);
            }
        }
        sum / count as f64
    };
    let visibility = PerVisibility::from_fn(|level: Visibility| {
        let mut sum = 0.0;
        let mut gt_keypoints = 0usize;
        for f in frames {
            for l in &f.levels {
                sum += l.get(level).contribution;
                gt_keypoints += l.get(level).gt_keypoints;
            }
        }
        let ratio = |d: usize| if d == 0 { 0.0 } else { sum / d as f64 };
        VisibilityLoc {
            sum,
            per_frame: ratio(count),
            per_pose: ratio(gt_poses),
            per_keypoint: ratio(gt_keypoints),
            gt_keypoints,
        }
    });
    PoseRow {
        scene,
        frames: count,
        gt_poses,
        pred_poses,
        ospa: mean(|t| t.0),
        loc: mean(|t| t.1),
        card: mean(|t| t.2),
        ap: ap.0,
        ar: ap.1,
        coco_map,
        visibility,
    }
}

/// OSPA-Pose with its per-visibility breakdown, plus AP/AR, per scene and overall.
///
/// The overall OSPA-Pose is the unweighted mean over every evaluated frame of
/// every scene; a frame is evaluated when either side has a record for it.
pub fn evaluate_pose(
    gt: &[SequenceSet],
    pred: &[SequenceSet],
    schema: &KeypointSchema,
    options: &EvalOptions,
) -> Result<PoseEvalReport> {
    options.validate()?;
    let pairs = pair_scenes(gt, pred);
    let per_scene: Vec<(SceneFrames, (f64, f64), Option<f64>)> = pairs
        .par_iter()
        .map(|(g, p)| {
            let frames = scene_frames(g, p, schema)?;
            let single: [ScenePair<'_>; 1] = [(g, p)];
            let ap = average_precision(&single, schema, options.oks_threshold)?;
            let map = if options.coco_map {
                Some(mean_average_precision(&single, schema, &coco_thresholds())?)
            } else {
                None
            };
            Ok((frames, (ap.ap, ap.ar), map))
        })
        .collect::<Result<_>>()?;

    let mut scenes = Vec::with_capacity(pairs.len());
    for ((g, p), (frames, ap, map)) in pairs.iter().zip(&per_scene) {
        scenes.push(pose_row(
            g.scene.clone(),
            &[frames],
            g.pose_count(),
            p.pose_count(),
            *ap,
            *map,
        ));
    }

    let refs: Vec<ScenePair<'_>> = pairs.iter().map(|(g, p)| (g, p)).collect();
    let ap = average_precision(&refs, schema, options.oks_threshold)?;
    let map = if options.coco_map {
        Some(mean_average_precision(&refs, schema, &coco_thresholds())?)
    } else {
        None
    };
    let all_frames: Vec<&SceneFrames> = per_scene.iter().map(|(f, _, _)| f).collect();
    let overall = pose_row(
        "all".to_string(),
        &all_frames,
        pairs.iter().map(|(g, _)| g.pose_count()).sum(),
        pairs.iter().map(|(_, p)| p.pose_count()).sum(),
        (ap.ap, ap.ar),
        map,
    );
    Ok(PoseEvalReport {
        oks_mode: schema.oks_mode(),
        oks_threshold: options.oks_threshold,
        overall,
        scenes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Ospa2Summary {
    pub total: f64,
    pub loc: f64,
    pub card: f64,
    /// Total per visibility level, each with its own assignment.
    pub by_visibility: PerVisibility<f64>,
}

impl From<&Ospa2Result> for Ospa2Summary {
    fn from(r: &Ospa2Result) -> Self {
        Ospa2Summary {
            total: r.total(),
            loc: r.loc(),
            card: r.card(),
            by_visibility: PerVisibility::from_fn(|l| r.per_visibility.get(l).total),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackRow {
    pub scene: String,
    pub gt_tracks: usize,
    pub pred_tracks: usize,
    pub clear: TrackEvalResult,
    pub ospa2: Ospa2Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackEvalReport {
    pub oks_mode: OksMode,
    pub oks_threshold: f64,
    /// CLEAR and identity counts summed over scenes; OSPA² macro-averaged over scenes.
    pub overall: TrackRow,
    pub scenes: Vec<TrackRow>,
}

/// MOTA, IDF1, IDSW and OSPA²-Pose, per scene and overall.
pub fn evaluate_track(
    gt: &[SequenceSet],
    pred: &[SequenceSet],
    schema: &KeypointSchema,
    options: &EvalOptions,
) -> Result<TrackEvalReport> {
    options.validate()?;
    let pairs = pair_scenes(gt, pred);
    let scenes: Vec<TrackRow> = pairs
        .par_iter()
        .map(|(g, p)| {
            let clear = track_metrics(&[(g, p)], schema, options.oks_threshold)?;
            let gt_tracks = build_trajectories(g)?;
            let pred_tracks = build_trajectories(p)?;
            let o2 = ospa2_pose(&gt_tracks, &pred_tracks, schema)?;
            Ok(TrackRow {
                scene: g.scene.clone(),
                gt_tracks: gt_tracks.len(),
                pred_tracks: pred_tracks.len(),
                clear,
                ospa2: Ospa2Summary::from(&o2),
            })
        })
        .collect::<Result<_>>()?;

    let refs: Vec<ScenePair<'_>> = pairs.iter().map(|(g, p)| (g, p)).collect();
    let clear = track_metrics(&refs, schema, options.oks_threshold)?;
    let n = scenes.len();
    let macro_avg = |pick: &dyn Fn(&Ospa2Summary) -> f64| {
        if n == 0 {
            0.0
        } else {
            scenes.iter().map(|s| pick(&s.ospa2)).sum::<f64>() / n as f64
        }
    };
    let ospa2 = Ospa2Summary {
        total: macro_avg(&|s| s.total),
        loc: macro_avg(&|s| s.loc),
        card: macro_avg(&|s| s.card),
        by_visibility: PerVisibility::from_fn(|l| macro_avg(&|s| *s.by_visibility.get(l))),
    };
    let overall = TrackRow {
        scene: "all".to_string(),
        gt_tracks: scenes.iter().map(|s| s.gt_tracks).sum(),
        pred_tracks: scenes.iter().map(|s| s.pred_tracks).sum(),
        clear,
        ospa2,
    };
    Ok(TrackEvalReport {
        oks_mode: schema.oks_mode(),
        oks_threshold: options.oks_threshold,
        overall,
        scenes,
    })
}
