//! OSPA-Pose: optimal sub-pattern assignment over the poses of one frame.
//!
//! The cutoff is fixed at 1 (the pose distance never exceeds it) and the order at 1,
//! so the value is `(min assignment cost + |n - m|) / n` with `n` the larger set size.

use serde::{Deserialize, Serialize};

use crate::assignment::{solve_min_cost, Assignment, CostMatrix};
use crate::error::Result;
use crate::model::{KeypointSchema, PerVisibility, Pose, Visibility};
use crate::oks::{pose_distance, VisibilityFilter};

/// A set distance split into its localization and cardinality terms.
///
/// `assignment` pairs are `(ground-truth index, prediction index)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OspaResult {
    pub total: f64,
    pub loc: f64,
    pub card: f64,
    pub assignment: Assignment,
    /// Smaller set size.
    pub m: usize,
    /// Larger set size.
    pub n: usize,
}

impl OspaResult {
    fn empty() -> Self {
        OspaResult {
            total: 0.0,
            loc: 0.0,
            card: 0.0,
            assignment: Assignment::default(),
            m: 0,
            n: 0,
        }
    }
}

/// Unit-cutoff, order-1 OSPA over a ground-truth x prediction distance matrix.
pub fn ospa_from_matrix(matrix: &CostMatrix) -> OspaResult {
    let m = matrix.rows().min(matrix.cols());
    let n = matrix.rows().max(matrix.cols());
    if n == 0 {
        return OspaResult::empty();
    }
    let assignment = solve_min_cost(matrix);
    let loc = assignment.total_cost / n as f64;
    let card = (n - m) as f64 / n as f64;
    OspaResult {
        total: loc + card,
        loc,
        card,
        assignment,
        m,
        n,
    }
}

/// Matrix of `1 - OKS` between every ground-truth and predicted pose.
pub fn distance_matrix(
    gt: &[Pose],
    pred: &[Pose],
    schema: &KeypointSchema,
    filter: VisibilityFilter,
) -> Result<CostMatrix> {
    CostMatrix::try_from_fn(gt.len(), pred.len(), |i, j| {
        pose_distance(&gt[i], &pred[j], schema, filter)
    })
}

/// OSPA-Pose between the ground-truth and predicted poses of one frame.
pub fn ospa_pose(gt: &[Pose], pred: &[Pose], schema: &KeypointSchema) -> Result<OspaResult> {
    let matrix = distance_matrix(gt, pred, schema, VisibilityFilter::All)?;
    Ok(ospa_from_matrix(&matrix))
}

/// Localization attributed to one visibility level for one frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LevelLoc {
    /// `sum over matched pairs of d_K restricted to the level, divided by n`.
    pub contribution: f64,
    /// Ground-truth keypoints carrying this label.
    pub gt_keypoints: usize,
}

impl LevelLoc {
    pub fn per_keypoint(&self) -> f64 {
        if self.gt_keypoints == 0 {
            0.0
        } else {
            self.contribution / self.gt_keypoints as f64
        }
    }
}

/// Splits the localization term of `result` by ground-truth visibility.
///
/// The pairs of the unrestricted assignment in `result` are kept; only their
/// distances are recomputed with each level's filter.
pub fn loc_breakdown(
    gt: &[Pose],
    pred: &[Pose],
    schema: &KeypointSchema,
    result: &OspaResult,
) -> Result<PerVisibility<LevelLoc>> {
    PerVisibility::try_from_fn(|level: Visibility| {
        let filter = VisibilityFilter::Only(level);
        let mut sum = 0.0;
        for &(g, p) in &result.assignment.pairs {
            sum += pose_distance(&gt[g], &pred[p], schema, filter)?;
        }
        let contribution = if result.n == 0 {
            0.0
        } else {
            sum / result.n as f64
        };
        let gt_keypoints = gt.iter().map(|pose| pose.count_at(level)).sum();
        Ok(LevelLoc {
            contribution,
            gt_keypoints,
        })
    })
}

/// Runs [`ospa_pose`] and breaks its localization term down by visibility level.
pub fn loc_breakdown_by_visibility(
    gt: &[Pose],
    pred: &[Pose],
    schema: &KeypointSchema,
) -> Result<PerVisibility<LevelLoc>> {
    let result = ospa_pose(gt, pred, schema)?;
    loc_breakdown(gt, pred, schema, &result)
}
