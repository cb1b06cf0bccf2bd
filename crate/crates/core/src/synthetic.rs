//! Seeded synthetic annotations for tests, benchmarks and self-checks.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assignment::CostMatrix;
use crate::model::{
    BBox, FrameAnnotations, Keypoint, Pose, SequenceSet, Trajectory, Visibility, NUM_KEYPOINTS,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_visibility(rng: &mut impl Rng) -> Visibility {
    match rng.gen_range(0..20) {
        0..=11 => Visibility::Visible,
        12..=16 => Visibility::Occluded,
        _ => Visibility::Invisible,
    }
}

/// A 80 x 200 px person with joints scattered inside its box and random labels.
pub fn random_pose(rng: &mut impl Rng, x0: f64, y0: f64) -> Pose {
    let (w, h) = (80.0, 200.0);
    let mut keypoints = [Keypoint::visible(0.0, 0.0); NUM_KEYPOINTS];
    for (j, kp) in keypoints.iter_mut().enumerate() {
        let row = j as f64 / NUM_KEYPOINTS as f64;
        *kp = Keypoint::new(
            x0 + rng.gen_range(0.1..0.9) * w,
            y0 + (row + rng.gen_range(0.0..0.05)) * h,
            random_visibility(rng),
        );
    }
    Pose::new(keypoints).with_bbox(BBox::new(x0, y0, w, h))
}

/// Copy of `pose` with every joint jittered by up to `max_px` in each axis.
pub fn jitter(rng: &mut impl Rng, pose: &Pose, max_px: f64) -> Pose {
    let mut out = pose.clone();
    if max_px > 0.0 {
        for kp in out.keypoints.iter_mut() {
            kp.x += rng.gen_range(-max_px..=max_px);
            kp.y += rng.gen_range(-max_px..=max_px);
        }
    }
    out
}

/// Frame ranges of the tracks in every synthetic scene; the fourth track only
/// appears in odd-numbered scenes.
const TRACK_SPANS: [&[(u64, u64)]; 4] = [&[(0, 24)], &[(12, 24)], &[(0, 8), (14, 24)], &[(4, 18)]];

pub const FIXTURE_FRAMES: u64 = 24;

/// One ground-truth scene of well-separated, slowly drifting tracks.
pub fn scene(name: &str, index: usize, seed: u64) -> SequenceSet {
    let mut rng = rng(seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let track_count = if index % 2 == 1 { 4 } else { 3 };
    let mut frames: BTreeMap<u64, Vec<Pose>> =
        (0..FIXTURE_FRAMES).map(|f| (f, Vec::new())).collect();
    for (k, spans) in TRACK_SPANS.iter().take(track_count).enumerate() {
        let base_x = 200.0 + 800.0 * k as f64;
        for &(start, end) in spans.iter() {
            for f in start..end {
                let pose =
                    random_pose(&mut rng, base_x + 2.0 * f as f64, 150.0).with_track(k as u64 + 1);
                frames.get_mut(&f).expect("frame in range").push(pose);
            }
        }
    }
    let frames = frames
        .into_iter()
        .map(|(id, poses)| FrameAnnotations::new(id, poses))
        .collect();
    SequenceSet::new(name, frames).expect("ascending frames")
}

/// `count` ground-truth scenes named `scene_00`, `scene_01`, ...
pub fn fixture(count: usize, seed: u64) -> Vec<SequenceSet> {
    (0..count)
        .map(|i| scene(&format!("scene_{i:02}"), i, seed))
        .collect()
}

/// Predictions equal to the ground truth, all with confidence 1.
pub fn perfect_predictions(gt: &SequenceSet) -> SequenceSet {
    let frames = gt
        .frames()
        .iter()
        .map(|f| {
            FrameAnnotations::new(
                f.frame_id,
                f.poses.iter().map(|p| p.clone().with_score(1.0)).collect(),
            )
        })
        .collect();
    SequenceSet::new(gt.scene.clone(), frames).expect("copied order")
}

/// Random non-negative matrix with entries in `[0, 1)`.
pub fn random_cost_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CostMatrix {
    CostMatrix::from_fn(rows, cols, |_, _| rng.gen::<f64>()).expect("finite entries")
}

/// Poses of one frame, clustered so that some pairs are close and some are far.
/// Every box has the same area, so the pose distance is symmetric under role swap.
pub fn random_pose_set(rng: &mut impl Rng, count: usize) -> Vec<Pose> {
    (0..count)
        .map(|_| {
            let slot = rng.gen_range(0..4) as f64;
            let base = random_pose(rng, 100.0 + 120.0 * slot, 100.0);
            let spread = rng.gen_range(0.0..12.0);
            jitter(rng, &base, spread)
        })
        .collect()
}

/// Up to `max_tracks` trajectories over frames `0..frames` with random gaps.
pub fn random_track_set(rng: &mut impl Rng, max_tracks: usize, frames: u64) -> Vec<Trajectory> {
    let count = rng.gen_range(0..=max_tracks);
    (0..count)
        .map(|k| {
            let slot = rng.gen_range(0..3) as f64;
            let mut states = BTreeMap::new();
            for f in 0..frames {
                if rng.gen_bool(0.6) {
                    let base = random_pose(rng, 100.0 + 150.0 * slot + f as f64, 100.0);
                    states.insert(f, jitter(rng, &base, 5.0));
                }
            }
            if states.is_empty() {
                states.insert(
                    rng.gen_range(0..frames),
                    random_pose(rng, 100.0 + 150.0 * slot, 100.0),
                );
            }
            Trajectory::new(k as u64, states).expect("non-empty")
        })
        .collect()
}
