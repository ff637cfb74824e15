//! Numerical kernels for the G-equation `u_t + |Du| + Du·V(x) = 0` on the
//! flat torus: control-set geometry, invariant-set detection, intrinsic
//! metrics, effective Hamiltonians and the time-dependent solvers.

pub mod error;
pub mod torus_grid;
pub mod vector_field;
pub mod isoperimetric;
pub mod geometry;
pub mod stencil;
pub mod dynamics;
pub mod metric;
pub mod effective;
pub mod hj_solver;

pub use dynamics::{InvariantSetReport, ReachabilityGraph, Side};
pub use effective::{EffectiveOptions, EffectiveResult, WulffSet};
pub use error::{Error, Result};
pub use geometry::{ControlSetQuery, SupportValue};
pub use hj_solver::{InitialData, SolverConfig};
pub use metric::{CycleCertificate, EdgeWeighting, WeightTable};
pub use stencil::Stencil;
pub use torus_grid::{GridFunction, TorusGrid};
pub use vector_field::VectorFieldSpec;
