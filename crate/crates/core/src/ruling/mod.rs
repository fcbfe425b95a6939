//! Flat and ruled regions of convex bodies, and finite-size classification
//! of the mechanism behind a ruled family.

mod faces;
mod hausdorff;
mod io;
mod scaling;

pub use faces::{
    detect_flat_faces, line_angle, ClusterKind, FaceCluster, MAX_BEND, MIN_AREA_FRACTION, MIN_RULING_EXTENT,
};
pub use hausdorff::{convergence_metric, hausdorff_distance};
pub use io::{read_series_csv, write_series_csv, SERIES_COLUMNS};
pub use scaling::{
    classify, scan_family, Cell, CellRecord, ClassifyConfig, GapFit, LambdaFamily, RatioFit, RulingReport,
    ScalingSeries, ScanOptions, Verdict,
};

use thiserror::Error;

use crate::spinops::SpinOpsError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RulingError {
    #[error("body has no facets")]
    EmptyBody,
    #[error("angle tolerance {0} outside (0, 0.1]")]
    InvalidAngleTolerance(f64),
    #[error("polyline needs at least 2 distinct points, got {0}")]
    DegeneratePolyline(usize),
    #[error("invalid lambda family '{input}': {reason}")]
    InvalidFamily { input: String, reason: String },
    #[error("particle numbers must be >= 2 and strictly ascending")]
    InvalidParticleNumbers,
    #[error("parameter grid is empty")]
    EmptyParameterGrid,
    #[error("need at least {needed} particle numbers spanning a factor {span}, got {count} spanning {got:.3}")]
    InsufficientSpan { needed: usize, span: f64, count: usize, got: f64 },
    #[error("malformed series at line {line}: {reason}")]
    MalformedSeries { line: usize, reason: String },
    #[error(transparent)]
    Operator(#[from] SpinOpsError),
}
