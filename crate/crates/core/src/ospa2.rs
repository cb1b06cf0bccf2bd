//! OSPA²-Pose: OSPA over a matrix of time-averaged distances between pose tracks.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment::CostMatrix;
use crate::error::{EvalError, Result};
use crate::model::{KeypointSchema, PerVisibility, Trajectory};
use crate::oks::{pose_distance, VisibilityFilter};
use crate::ospa::{ospa_from_matrix, OspaResult};

/// Track-set distance with a separately optimized result per visibility level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ospa2Result {
    pub overall: OspaResult,
    pub per_visibility: PerVisibility<OspaResult>,
}

impl Ospa2Result {
    pub fn total(&self) -> f64 {
        self.overall.total
    }

    pub fn loc(&self) -> f64 {
        self.overall.loc
    }

    pub fn card(&self) -> f64 {
        self.overall.card
    }
}

/// Mean over the union of both domains of the per-timestep distance: `1 - OKS`
/// where both tracks exist and 1 where exactly one does.
pub fn track_distance(
    gt: &Trajectory,
    pred: &Trajectory,
    schema: &KeypointSchema,
    filter: VisibilityFilter,
) -> Result<f64> {
    for t in [gt, pred] {
        if t.is_empty() {
            return Err(EvalError::EmptyTrajectory(t.track_id()));
        }
    }
    let mut a = gt.states().iter().peekable();
    let mut b = pred.states().iter().peekable();
    let mut sum = 0.0;
    let mut steps = 0usize;
    loop {
        let step = match (a.peek(), b.peek()) {
            (None, None) => break,
            (Some((ta, pa)), Some((tb, pb))) if ta == tb => {
                let d = pose_distance(pa, pb, schema, filter)?;
                a.next();
                b.next();
                d
            }
            (Some((ta, _)), Some((tb, _))) => {
                if ta < tb {
                    a.next();
                } else {
                    b.next();
                }
                1.0
            }
            (Some(_), None) => {
                a.next();
                1.0
            }
            (None, Some(_)) => {
                b.next();
                1.0
            }
        };
        sum += step;
        steps += 1;
    }
    Ok(if steps == 0 { 0.0 } else { sum / steps as f64 })
}

/// Matrix of [`track_distance`] values, ground-truth tracks as rows.
pub fn track_distance_matrix(
    gt: &[Trajectory],
    pred: &[Trajectory],
    schema: &KeypointSchema,
    filter: VisibilityFilter,
) -> Result<CostMatrix> {
    let rows: Vec<Vec<f64>> = gt
        .par_iter()
        .map(|g| {
            pred.iter()
                .map(|p| track_distance(g, p, schema, filter))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let data: Vec<f64> = rows.into_iter().flatten().collect();
    CostMatrix::new(gt.len(), pred.len(), data)
}

fn check_unique(tracks: &[Trajectory]) -> Result<()> {
    let mut seen = HashSet::new();
    for t in tracks {
        if !seen.insert(t.track_id()) {
            return Err(EvalError::DuplicateTrajectory(t.track_id()));
        }
    }
    Ok(())
}

/// OSPA²-Pose between ground-truth and predicted track sets of one scene.
///
/// Each visibility level re-solves its own outer assignment on the filtered matrix.
pub fn ospa2_pose(
    gt: &[Trajectory],
    pred: &[Trajectory],
    schema: &KeypointSchema,
) -> Result<Ospa2Result> {
    check_unique(gt)?;
    check_unique(pred)?;
    let overall = ospa_from_matrix(&track_distance_matrix(
        gt,
        pred,
        schema,
        VisibilityFilter::All,
    )?);
    let per_visibility = PerVisibility::try_from_fn(|level| {
        let matrix = track_distance_matrix(gt, pred, schema, VisibilityFilter::Only(level))?;
        Ok::<_, EvalError>(ospa_from_matrix(&matrix))
    })?;
    Ok(Ospa2Result {
        overall,
        per_visibility,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::model::{BBox, Keypoint, Pose, NUM_KEYPOINTS};

    fn pose(x0: f64) -> Pose {
        let mut kps = [Keypoint::visible(0.0, 0.0); NUM_KEYPOINTS];
        for (j, kp) in kps.iter_mut().enumerate() {
            kp.x = x0 + 3.0 * j as f64;
            kp.y = 200.0 - 5.0 * j as f64;
        }
        Pose::new(kps).with_bbox(BBox::new(x0, 100.0, 60.0, 150.0))
    }

    fn track(id: u64, frames: &[u64], x0: f64) -> Trajectory {
        let states: BTreeMap<u64, Pose> = frames.iter().map(|&f| (f, pose(x0))).collect();
        Trajectory::new(id, states).unwrap()
    }

    #[test]
    fn worked_two_thirds() {
        let schema = KeypointSchema::default();
        let g = track(1, &[1, 2], 0.0);
        let p = track(5, &[2, 3], 0.0);
        let d = track_distance(&g, &p, &schema, VisibilityFilter::All).unwrap();
        assert_eq!(d, 2.0 / 3.0);
    }

    #[test]
    fn identical_and_disjoint_tracks() {
        let schema = KeypointSchema::default();
        let g = track(1, &[0, 1, 4], 10.0);
        assert_eq!(
            track_distance(&g, &g, &schema, VisibilityFilter::All).unwrap(),
            0.0
        );
        let a = track(1, &[0, 1], 0.0);
        let b = track(2, &[5, 6], 0.0);
        assert_eq!(
            track_distance(&a, &b, &schema, VisibilityFilter::All).unwrap(),
            1.0
        );
    }

    #[test]
    fn set_conventions() {
        let schema = KeypointSchema::default();
        let g = vec![track(1, &[0, 1, 2], 0.0)];
        assert_eq!(ospa2_pose(&[], &[], &schema).unwrap().total(), 0.0);
        assert_eq!(ospa2_pose(&g, &[], &schema).unwrap().total(), 1.0);
        assert_eq!(ospa2_pose(&g, &g, &schema).unwrap().total(), 0.0);
        let preds = vec![track(1, &[0, 1, 2], 0.0), track(2, &[7, 8], 0.0)];
        let r = ospa2_pose(&g, &preds, &schema).unwrap();
        assert_eq!((r.total(), r.loc(), r.card()), (0.5, 0.0, 0.5));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let schema = KeypointSchema::default();
        let g = vec![track(1, &[0], 0.0), track(1, &[1], 0.0)];
        assert!(matches!(
            ospa2_pose(&g, &[], &schema),
            Err(EvalError::DuplicateTrajectory(1))
        ));
    }

    #[test]
    fn per_visibility_ignores_other_levels() {
        let schema = KeypointSchema::default();
        let g = vec![track(1, &[0, 1], 0.0)];
        let p = vec![track(1, &[0, 1], 4.0)];
        let r = ospa2_pose(&g, &p, &schema).unwrap();
        assert!(r.total() > 0.0);
        assert_eq!(r.per_visibility.visible.total, r.total());
        assert_eq!(r.per_visibility.occluded.total, 0.0);
        assert_eq!(r.per_visibility.invisible.total, 0.0);
    }
}
