//! Meshless level-set shape optimization.
//!
//! Shapes are the negative sublevel set `{φ_θ < 0}` of a small network fitted
//! to a signed distance function. PDEs on the shape are solved on random
//! geometric graphs over uniform samples, and a gradient flow advects
//! boundary/domain samples and refits the network each iteration.
//!
//! The crate is `no_std` + `alloc`. All randomness flows through explicit
//! seeds and transcendental functions go through `libm`, so a run is
//! bit-reproducible on a given machine and build.
//!
//! Module map:
//!
//! | module | contents |
//! |--------|----------|
//! | [`levelset`] | networks, analytic shapes, normals, curvature, Monte-Carlo volume/perimeter, SDF fitting |
//! | [`sampling`] | uniform/shape/band sampling, Newton projection, Riesz boundary sampling, advection |
//! | [`graph`] | geometric graphs, Laplacian eigenpairs, Dirichlet solves, graph gradients |
//! | [`problems`] | Neumann eigenvalue, Poisson and convex perimeter-constrained problems |
//! | [`optimizer`] | the outer gradient-flow loop |
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod graph;
pub mod levelset;
pub mod optimizer;
pub mod problems;
pub mod rng;
pub mod sampling;
pub mod spatial;

pub use error::{Error, Result};
pub use levelset::{Architecture, LevelSet, LevelSetNetwork, NetworkParams};
pub use sampling::{PointCloud, Role};
