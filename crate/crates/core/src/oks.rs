//! Object keypoint similarity and the normalized pose distance `1 - OKS`.
//!
//! OKS is asymmetric: the ground-truth pose supplies the scale (its box) and
//! the visibility labels used by [`VisibilityFilter`].

use serde::{Deserialize, Serialize};

use crate::error::{EvalError, Result};
use crate::model::{KeypointSchema, OksMode, Pose, Visibility};

/// Selects the joints, by ground-truth visibility, that enter a distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum VisibilityFilter {
    #[default]
    All,
    Only(Visibility),
}

impl VisibilityFilter {
    pub fn selects(self, level: Visibility) -> bool {
        match self {
            VisibilityFilter::All => true,
            VisibilityFilter::Only(v) => v == level,
        }
    }
}

fn selected_joints(gt: &Pose, filter: VisibilityFilter) -> impl Iterator<Item = usize> + '_ {
    gt.keypoints
        .iter()
        .enumerate()
        .filter(move |(_, kp)| filter.selects(kp.visibility))
        .map(|(j, _)| j)
}

/// Mean Euclidean distance over the joints selected by `filter`; 0 when none are selected.
pub fn mean_euclidean(gt: &Pose, pred: &Pose, filter: VisibilityFilter) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for j in selected_joints(gt, filter) {
        sum += gt.keypoints[j].distance(&pred.keypoints[j]);
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Squared OKS scale `s^2`, the ground-truth box area.
fn scale_squared(gt: &Pose) -> Result<f64> {
    let bbox = gt
        .bbox
        .ok_or_else(|| EvalError::MissingBbox(gt.describe()))?;
    if bbox.is_degenerate() {
        return Err(EvalError::DegenerateBbox {
            pose: gt.describe(),
            w: bbox.w,
            h: bbox.h,
        });
    }
    Ok(bbox.area())
}

/// Similarity in `[0, 1]` between a ground-truth and a predicted pose.
pub fn oks(
    gt: &Pose,
    pred: &Pose,
    schema: &KeypointSchema,
    filter: VisibilityFilter,
) -> Result<f64> {
    let s2 = scale_squared(gt)?;
    let value = match schema.oks_mode() {
        OksMode::PaperMean => {
            let d = mean_euclidean(gt, pred, filter);
            let k = schema.scalar_k();
            (-(d * d) / (2.0 * s2 * k * k)).exp()
        }
        OksMode::PerJointAverage => {
            let sigmas = schema.sigmas();
            let mut sum = 0.0;
            let mut count = 0usize;
            for j in selected_joints(gt, filter) {
                let d = gt.keypoints[j].distance(&pred.keypoints[j]);
                let k = sigmas[j];
                sum += (-(d * d) / (2.0 * s2 * k * k)).exp();
                count += 1;
            }
            if count == 0 {
                1.0
            } else {
                sum / count as f64
            }
        }
    };
    Ok(value)
}

/// Normalized pose distance `1 - OKS`, in `[0, 1]`.
pub fn pose_distance(
    gt: &Pose,
    pred: &Pose,
    schema: &KeypointSchema,
    filter: VisibilityFilter,
) -> Result<f64> {
    oks(gt, pred, schema, filter).map(|s| 1.0 - s)
}
