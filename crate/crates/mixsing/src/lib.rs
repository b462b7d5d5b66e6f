//! Numerical solver and verification harness for the mixed local-nonlocal
//! singular elliptic problem
//!
//! ```text
//!   -Delta u + (-Delta)^s u + g(u) = h(u) f   in Omega,
//!    u = 0                                    on R^n \ Omega,
//! ```
//!
//! with a monotone absorption g (model: u^q) and a factor h singular at
//! zero (model: u^{-gamma}, 0 <= gamma <= 1). The crate provides
//!
//! - conforming P1/Q1 discretizations of the mixed operator on intervals
//!   and rectangles, with the exterior condition enforced through an exact
//!   kernel tail term ([`operators`]);
//! - a damped Newton solver for the truncated/regularized approximating
//!   problems and the drive to their monotone limit ([`solver`]);
//! - exact rearrangement calculus on piecewise-constant data
//!   ([`rearrange`]);
//! - the radial comparison profile, pointwise comparison checks and the
//!   explicit summability constants ([`talenti`]);
//! - experiment orchestration with reproducible reports ([`report`]).
//!
//! See the `examples/` directory for runnable entry points covering each
//! capability.

pub mod data;
pub mod error;
pub mod grid;
pub mod operators;
pub mod quadrature;
pub mod rearrange;
pub mod report;
pub mod solver;
pub mod talenti;

pub use data::{
    build_truncated_data, classify_regime, validate_hypotheses, NonlinearitySpec, ProblemSpec,
    RegimeReport, Schedule, SourceSpec, SummabilityCase, Tolerances,
};
pub use error::{Error, Result};
pub use grid::{build_grid, sample_function, Domain, Grid, GridFunction};
pub use operators::{bilinear_form, DiscreteMixedOperator};
pub use rearrange::{
    decreasing_rearrangement, distribution_function, grid_rearrangement, hardy_littlewood_gap,
    profile_lp_norm, schwarz_rearrangement, unit_ball_volume, RearrangedProfile,
};
pub use report::{run_experiment, run_sweep, selftest, ExperimentConfig};
pub use solver::{
    energy_diagnostics, equiintegrability_check, solve_limit, solve_truncated, uniqueness_probe,
    LimitReport, SolveReport,
};
pub use talenti::{
    bliss_constant, comparison_profile, levelset_inequality_check, orlicz_sup,
    summability_bounds, talenti_margin, BoundReport, ComparisonReport,
};
