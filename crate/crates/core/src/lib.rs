//! Numerics for positive solutions of `-Δu + m|∇u|^q - u^p = 0` near an
//! isolated boundary singularity.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the `*F64` aliases
//! below are the types the command line tool uses.

// `!(x > y)` is used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Band storage loops read clearer with explicit row indices.
#![allow(clippy::needless_range_loop)]

pub mod classify;
pub mod constants;
pub mod error;
pub mod fd;
pub mod io;
pub mod params;
pub mod pde;
pub mod profiles;
pub mod roots;
pub mod scalar;

pub use classify::{
    classify, classify_boundary_singularity, dirac_admissibility, measure_conditions, removability,
    trace_existence, ConditionTag, ExistenceVerdict, MeasureDescriptor, RegimeReport, Removability,
    SingularityType, TraceType,
};
pub use constants::{
    constant_report, critical_exponents, m_one, m_one_supremum, m_p_threshold, m_star, phi_eval,
    phi_root_structure, phi_roots, ConstantReport, MpThreshold, PhiRoots, RootStructure,
};
pub use error::{Error, Result};
pub use io::{emit_report, Format, Report};
pub use params::ProblemParams;
pub use pde::{
    estimate_m_threshold, fit_exponent, solve_bvp, BoundarySpec, FieldSolution, InitialIterate,
    InnerBoundary, OuterBoundary, PolarGrid, SolverOptions, Terms,
};
pub use profiles::{
    ode_residual, profile_scaling_check, shoot, solve_profile, solve_profile_with, ProfileKind,
    ProfileOptions, ProfileOutcome, ProfileSolution, ShootOutcome,
};
pub use scalar::Real;

pub type ProblemParamsF64 = ProblemParams<f64>;
pub type ConstantReportF64 = ConstantReport<f64>;
pub type ProfileSolutionF64 = ProfileSolution<f64>;
pub type RegimeReportF64 = RegimeReport<f64>;
pub type FieldSolutionF64 = FieldSolution<f64>;
pub type PolarGridF64 = PolarGrid<f64>;
