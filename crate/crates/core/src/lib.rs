//! Random Tukey depth and the random Tukey median.
//!
//! The crate computes halfspace depth exactly (small dimension), over a
//! random set of directions, or for a known population law, and finds a
//! point of maximal random depth by solving a sequence of linear programs.

pub mod depth;
pub mod dists;
pub mod error;
pub mod experiments;
pub mod gauss;
pub mod geom;
pub mod io;
pub mod lp;
pub mod median;
pub mod seed;
pub mod sphere;
pub mod stats;
pub mod svg;
pub mod verify;

pub use depth::{DepthMethod, DepthResult};
pub use dists::{DistKind, DistributionSpec, McBudget};
pub use error::{Error, Result};
pub use experiments::{ExperimentConfig, ExperimentReport, Scenario};
pub use gauss::Probability;
pub use geom::{PointCloud, UnitDirection, Vector};
pub use median::MedianResult;
pub use seed::{SeedSpec, StreamRng};
pub use sphere::DirectionBatch;
pub use verify::CheckReport;
