//! Turn a finite symmetry cluster into a quasiperiodic point pattern.
//!
//! The pipeline: build a G-cluster from group generators and seed points,
//! lift it to a superspace representation with exact projectors onto the
//! physical space and the dense/lattice parts of the internal space, select
//! lattice points through a shifted hypercube strip, and analyze the
//! resulting finite patches (Delone radii, density, occupation,
//! self-similarity, autocorrelation, diffraction).
//!
//! All geometry that decides membership or equality is exact: cyclotomic
//! field arithmetic for coordinates, rational linear algebra for the
//! lattice part, and interval refinement for sign decisions. Doubles appear
//! only as output shadows and as the fast path of the strip test, which
//! falls back to exact arithmetic near the window boundary.

pub mod cluster;
pub mod error;
pub mod exact;
pub mod geom;
pub mod lp;
pub mod patch;
pub mod presets;
pub mod superspace;
pub mod window;

pub use cluster::{build_cluster, ClusterSpec, GCluster, SignedPermutation};
pub use error::{Error, Result};
pub use exact::FieldElement;
pub use superspace::{decompose, Classification, SuperspaceDecomposition};
pub use patch::{generate_patch, naive_patch, ModelSetPatch, PatchOptions, PatchPoint};
pub use window::{component_windows, make_window, strip_contains, ComponentWindow, WindowSpec};
