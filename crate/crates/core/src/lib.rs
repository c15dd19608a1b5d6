//! Numerical laboratory for symmetrization and rearrangement inequalities on
//! graphs, product spaces and planar grids.
// `!(x >= 0.0)` is used deliberately so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod continuum;
pub mod error;
pub mod graphs;
pub mod operators;
pub mod rearrange;
pub mod solver;
pub mod suite;
pub mod verify;

pub use error::{Error, Result};
pub use graphs::{ball, build_space, canonical_order, product, Graph, GroundSpace, Order, ProductSpace, SpaceSpec, VertexSet};
pub use operators::{
    dirichlet_eigenvalue, dirichlet_energy, heat_kernel, j_transform, laplacian, product_kernel, star_function, Kernel,
};
pub use rearrange::{
    polarize, rearrange_function, rearrange_set, similarly_ordered_companion, steiner_rearrange, DiscreteFunction,
    Reflection,
};
pub use solver::{
    compare_elliptic, compare_parabolic, solve_elliptic, solve_parabolic, symmetrize_problem, ComparisonReport, Phi,
    ProblemSpec,
};
pub use verify::{Mode, Report, SearchConfig};
