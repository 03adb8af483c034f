//! Numerical toolkit for degenerate diffusion equations of porous-medium
//! type, built around a regularizing change of unknowns.
//!
//! Solutions of d/dt u = a(u) lap u + f(u) with a(0) = 0 are in general only
//! Holder continuous across the set where u vanishes: the free boundary of
//! the Barenblatt solution carries a jump in lap u. This crate implements a
//! strictly increasing substitution v = V(u), built from the diffusion
//! coefficient and a capped modulus function, under which the equation
//! becomes d/dt v = div(a(U(v)) grad v) + fbar with every term Holder
//! continuous up to the degeneracy set; the substituted equation can then be
//! read classically. The library provides
//!
//! * [`grid`]: uniform space-time grids, fields, difference stencils and
//!   level-set regions;
//! * [`barenblatt`]: the exact Barenblatt family and the substitution to the
//!   standard porous-medium form — the oracle for everything else;
//! * [`transform`]: the substitution machinery (modulus cap, iterated
//!   integral, V, its inverse U, the substituted reaction term), in closed
//!   form for power laws and by quadrature in general;
//! * [`holder`]: discrete parabolic Holder norms, seminorms and the
//!   level-set regularity profile psi;
//! * [`solver`]: an explicit finite-difference solver producing trajectories
//!   independent of the oracle;
//! * [`residual`]: residual evaluation for both equations and the
//!   refinement studies exhibiting the bounded/unbounded dichotomy at the
//!   free boundary;
//! * [`config`]: TOML configs and named presets for reproducible runs.

pub mod barenblatt;
pub mod config;
pub mod error;
pub mod grid;
pub mod holder;
pub mod numerics;
pub mod residual;
pub mod solver;
pub mod transform;

pub use barenblatt::{from_standard_form, to_standard_form, BarenblattParams};
pub use error::{Error, Result};
pub use grid::{LevelSign, RegionMask, ScalarField, SpaceTimeGrid};
pub use holder::{
    holder_seminorm, parabolic_distance, parabolic_norm_2plus, psi_components, psi_profile,
    DataTraces, HolderReport, PairSampling, PsiComponents, PsiExponents, PsiProfile,
};
pub use residual::{
    cfl_matched_nt, convergence_study, dichotomy_study, identity_residual_analytic,
    interface_band, mutation_sweep, residual_original, residual_transformed,
    sample_interior_points, ConvergenceRow, DichotomyRow, PointResidualReport, ResidualReport,
    Scenario, INTERFACE_BAND_CELLS,
};
pub use solver::{
    cfl_dt, compatibility_check, solve, standard_mass, step_explicit, BoundaryTrace,
    CompatibilityReport, PMEProblem,
};
pub use transform::{
    cap_modulus, CoefficientFunction, FormCoefficient, ModulusSpec, PowerLawForms,
    TransformSpec, DEFAULT_NODES_PER_UNIT,
};
