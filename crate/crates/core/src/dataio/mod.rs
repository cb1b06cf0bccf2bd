//! Annotation I/O, panorama merging and dataset statistics.

pub mod convert;
pub mod format;
pub mod merge;
pub mod stats;

pub use convert::convert_coco_scene;
pub use format::{
    load_annotations, load_dataset, read_annotations, save_annotations, scene_files,
    write_annotations, AnnotationKind,
};
pub use merge::{merge_views, suppress_duplicates, CameraLayout, DEFAULT_NMS_IOU};
pub use stats::{compute_stats, DatasetStats, StatsSummary};
