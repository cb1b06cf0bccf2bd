//! Dataset statistics: track lengths, crowding, keypoint visibility and box scale.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{build_trajectories, PerVisibility, SequenceSet, Visibility, NUM_KEYPOINTS};

/// Width, in pixels of `sqrt(box area)`, of one bbox scale bin.
pub const SCALE_BIN_PX: f64 = 25.0;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StatsSummary {
    pub scene_count: usize,
    pub frame_count: usize,
    pub track_count: usize,
    pub mean_track_length: f64,
    pub max_track_length: usize,
    pub total_poses: usize,
    pub total_keypoints: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DatasetStats {
    /// Annotated frames per track -> number of tracks.
    pub track_length_histogram: BTreeMap<usize, usize>,
    /// Poses in a frame -> number of frames.
    pub poses_per_frame_histogram: BTreeMap<usize, usize>,
    /// Visible keypoints in a pose -> number of poses.
    pub visible_keypoints_histogram: BTreeMap<usize, usize>,
    /// Scene -> keypoint count per visibility label.
    pub per_scene_visibility: BTreeMap<String, PerVisibility<usize>>,
    /// Lower edge of the `sqrt(area)` bin -> number of boxes.
    pub bbox_scale_histogram: BTreeMap<u64, usize>,
    pub summary: StatsSummary,
}

fn add<K: Ord>(into: &mut BTreeMap<K, usize>, key: K, count: usize) {
    *into.entry(key).or_default() += count;
}

fn scene_stats(seq: &SequenceSet) -> Result<DatasetStats> {
    let mut stats = DatasetStats::default();
    let mut visibility = PerVisibility::<usize>::default();
    for frame in seq.frames() {
        add(&mut stats.poses_per_frame_histogram, frame.poses.len(), 1);
        for pose in &frame.poses {
            add(
                &mut stats.visible_keypoints_histogram,
                pose.count_at(Visibility::Visible),
                1,
            );
            for kp in &pose.keypoints {
                *visibility.get_mut(kp.visibility) += 1;
            }
            if let Some(b) = pose.bbox {
                let bin = (b.area().max(0.0).sqrt() / SCALE_BIN_PX).floor() * SCALE_BIN_PX;
                add(&mut stats.bbox_scale_histogram, bin as u64, 1);
            }
        }
    }
    let tracks = build_trajectories(seq)?;
    for t in &tracks {
        add(&mut stats.track_length_histogram, t.len(), 1);
    }
    stats
        .per_scene_visibility
        .insert(seq.scene.clone(), visibility);
    stats.summary = StatsSummary {
        scene_count: 1,
        frame_count: seq.frames().len(),
        track_count: tracks.len(),
        mean_track_length: 0.0,
        max_track_length: tracks.iter().map(|t| t.len()).max().unwrap_or(0),
        total_poses: seq.pose_count(),
        total_keypoints: seq.pose_count() * NUM_KEYPOINTS,
    };
    Ok(stats)
}

impl DatasetStats {
    fn absorb(&mut self, other: DatasetStats) {
        for (k, v) in other.track_length_histogram {
            add(&mut self.track_length_histogram, k, v);
        }
        for (k, v) in other.poses_per_frame_histogram {
            add(&mut self.poses_per_frame_histogram, k, v);
        }
        for (k, v) in other.visible_keypoints_histogram {
            add(&mut self.visible_keypoints_histogram, k, v);
        }
        for (k, v) in other.bbox_scale_histogram {
            add(&mut self.bbox_scale_histogram, k, v);
        }
        for (scene, v) in other.per_scene_visibility {
            let slot = self.per_scene_visibility.entry(scene).or_default();
            for level in Visibility::REPORT_ORDER {
                *slot.get_mut(level) += *v.get(level);
            }
        }
        let s = &mut self.summary;
        let o = other.summary;
        s.scene_count += o.scene_count;
        s.frame_count += o.frame_count;
        s.track_count += o.track_count;
        s.max_track_length = s.max_track_length.max(o.max_track_length);
        s.total_poses += o.total_poses;
        s.total_keypoints += o.total_keypoints;
    }
}

/// Statistics over stitched ground-truth scenes. Track ids are scoped to their scene.
pub fn compute_stats(scenes: &[SequenceSet]) -> Result<DatasetStats> {
    let per_scene = scenes
        .par_iter()
        .map(scene_stats)
        .collect::<Result<Vec<_>>>()?;
    let mut total = DatasetStats::default();
    for s in per_scene {
        total.absorb(s);
    }
    let length_sum: usize = total
        .track_length_histogram
        .iter()
        .map(|(len, count)| len * count)
        .sum();
    if total.summary.track_count > 0 {
        total.summary.mean_track_length = length_sum as f64 / total.summary.track_count as f64;
    }
    Ok(total)
}
