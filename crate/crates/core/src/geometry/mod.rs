//! Pure 2D geometry kernels: resampling, distances, crossings, rigid
//! registration, corner detection and projection.

mod corners;
mod crossing;
mod point;
mod polyline;
mod procrustes;
mod transform;

pub use corners::{detect_corners, find_corners, CornerSplit, ShortStrawConfig};
pub use crossing::{count_crossings, crossings, Crossing};
pub use point::{bbox_diagonal, centroid, Point2};
pub use polyline::{
    arc_length, dist_min_reverse, pairwise_dist, project_to_polyline, resample, smooth, Polyline,
    Projection, DEDUP_EPSILON,
};
pub use procrustes::{best_fit_rigid, best_fit_similarity, rigid_residual};
pub use transform::{wrap_angle, Affine2, RigidTransform2};
