//! Parametric 3D human body reconstruction from front and side silhouettes.
//!
//! A statistical shape model (PCA basis plus linear blend skinning) generates
//! candidate bodies from a 24-parameter vector: 20 shape coefficients and 4
//! limb angles. Each candidate is projected orthographically into the front
//! and side views, rasterized, and its traced contour is aligned to the
//! subject contour by 2D rigid registration. A per-body-part weighted matching
//! cost drives a genetic algorithm over the parameters, and reconstructions
//! are evaluated through 16 anthropometric measurements against ground truth.
//!
//! The crate ships a synthetic model builder so the whole pipeline runs
//! without any external dataset.

pub mod anthropometry;
pub mod contour;
pub mod cross_section;
pub mod error;
pub mod experiment;
pub mod fitting;
pub mod ga;
pub mod hausdorff;
pub mod kdtree;
pub mod mesh;
pub mod model;
pub mod model_io;
pub mod objective;
pub mod primitives;
pub mod projection;
pub mod raster;
pub mod registration;
pub mod synthetic;

pub use error::{Error, Result};
pub use mesh::{BodyPart, Mesh};
