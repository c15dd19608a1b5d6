//! Planar and model-space checks: geodesic ball geometry, Schwarz
//! symmetrization of grid functions, and a finite-difference Poisson solver.

mod geometry;
mod grid;
mod poisson;

pub use geometry::{curvature_limit, unit_sphere_area, ModelSpace};
pub use grid::{
    cut_boundary_length, isoperimetric_battery, parse_pbm, schwarz_profile, schwarz_rearrange_grid, GridConfig,
    GridDomain, RadialProfile, Shape,
};
pub use poisson::{
    bump, check_polya_szego_grid, compare_continuum, disk_torsion_error, polya_szego_rows, solve_poisson_2d,
    torsion_max, PolyaSzegoRow, POLYA_SZEGO_SLACK,
};
