//! Multi-person pose estimation and pose tracking evaluation.
//!
//! Pose similarity is OKS; set-level errors are OSPA-Pose (per frame) and
//! OSPA²-Pose (per scene, over tracks), both split into localization and
//! cardinality terms and broken down by keypoint visibility. Conventional
//! AP/AR, MOTA, IDF1 and IDSW are computed with OKS correspondence.

pub mod assignment;
pub mod classic;
pub mod dataio;
pub mod error;
pub mod model;
pub mod oks;
pub mod oracle;
pub mod ospa;
pub mod ospa2;
pub mod report;
pub mod synthetic;

pub use assignment::{brute_force_min_cost, solve_min_cost, Assignment, CostMatrix};
pub use classic::{
    average_precision, greedy_match, track_metrics, ApResult, GreedyMatch, PrCurve,
    TrackEvalResult, DEFAULT_OKS_THRESHOLD,
};
pub use dataio::{AnnotationKind, CameraLayout, DatasetStats};
pub use error::{EvalError, Result};
pub use model::{
    build_trajectories, BBox, FrameAnnotations, Keypoint, KeypointSchema, OksMode, PerVisibility,
    Pose, SequenceSet, Trajectory, Visibility, NUM_KEYPOINTS,
};
pub use oks::{mean_euclidean, oks, pose_distance, VisibilityFilter};
pub use ospa::{loc_breakdown_by_visibility, ospa_pose, OspaResult};
pub use ospa2::{ospa2_pose, track_distance, Ospa2Result};
pub use report::{evaluate_pose, evaluate_track, EvalOptions, PoseEvalReport, TrackEvalReport};
