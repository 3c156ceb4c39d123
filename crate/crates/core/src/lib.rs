//! Simulation and verification toolkit for the anisotropic porous medium
//! equation `u_t = Σ_i (u^{m_i})_{x_i x_i}` with all `m_i > 1`.

pub mod cli;
pub mod diagnostics;
pub mod exponents;
pub mod grid;
pub mod io;
pub mod profile;
pub mod rescale;
pub mod solver;
mod stencil;
pub mod sum;
pub mod support;

pub use exponents::{
    check_scaling_identity, derive_exponents, Exponents, HypothesisError, MediumParams,
};
pub use grid::{lp_norm, sample, total_mass, Field, Grid, GridError};
pub use profile::{barenblatt, compute_profile, Barenblatt, Profile, ProfileError, ProfileOptions};
pub use rescale::RescaleMap;
pub use solver::{Boundary, Solver, SolverConfig, SolverError, StepReport};
pub use support::{box_bound_check, hausdorff, SupportSet};
