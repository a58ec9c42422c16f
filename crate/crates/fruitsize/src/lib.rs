//! Fruit diameter estimation from RGB-D imagery.
//!
//! The library takes detected fruits (bounding box, optional segmentation
//! mask, depth map) and estimates the real-world diameter in millimetres
//! with six interchangeable estimators: three operating on the image plane
//! (`2d-bbox`, `2d-lseg`, `2d-ht`) and three on back-projected point clouds
//! (`3d-lseg`, `3d-lsq`, `3d-ransac`). An evaluation harness reproduces
//! retention-rate sweeps against ground-truth caliper diameters, box-plot
//! quartile statistics, IoU-matched detection evaluation and COCO-style
//! detection metrics, and generates synthetic RGB-D scenes with exact
//! ground truth for end-to-end verification.

pub mod dataset;
pub mod estimators_2d;
pub mod estimators_3d;
pub mod eval;
pub mod filtering;
pub mod geometry;

pub use dataset::{AnnotatedFruit, DetectionRecord, Frame, Ripeness};
pub use estimators_2d::{BoundingBox, CircleFit, FruitMask, HoughConfig};
pub use estimators_3d::{RansacConfig, SphereFit};
pub use eval::{Estimator, QuartileSummary, SizeErrorRecord};
pub use filtering::RetentionRange;
pub use geometry::{CameraIntrinsics, FruitPointCloud, Pixel, Point3};
