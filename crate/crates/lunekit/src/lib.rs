//! Constant-curvature geometry toolkit: model surfaces M²(κ) in embedding
//! coordinates, curves of constant geodesic curvature, λ-convex lunes and
//! the sharp inradius bound ρ_λ, random λ-convex domains, and a batch
//! verification harness with SVG rendering.

pub mod curves;
pub mod domains;
pub mod error;
pub mod files;
pub mod kernel;
pub mod lune;
pub mod render;
pub mod verify;

pub use curves::{
    classify, f_lambda_perimeter, f_lambda_radius, f_lambda_supporting_at, swerve_closed,
    swerve_open, ConstantCurvatureArc, Containment, CurveKind, FLambdaRegion, RegionLocus,
    SwerveSide,
};
pub use error::{Error, Result};
pub use lune::{
    build_lune, lune_inradius_numeric, phase_transition_check, rho, rho_branch, rho_derivative,
    rho_domain, Lune, PhaseTransitionReport, RhoBranch, RhoDomain,
};
pub use kernel::{
    angle, distance, exp_map, log_dir, point_reflection, rotate90, signed_angle, Curvature,
    GeodesicSegment, ModelPoint, TangentVector,
};
pub use domains::{
    balanced_chord, chord_imbalance, circumradius, generate_lambda_convex, inradius,
    is_lambda_convex, arclength_profile, profile_mismatch, radial_profile, reflect_arc, resample_ring, rolling_check,
    BalancedChord, ConvexPolyDomain, LambdaConvexReport, RollingReport,
};
pub use verify::{
    run_all, run_formula_oracle, run_inradius_bound, run_phase_transitions, CorpusSpec,
    DomainRow, Tolerances, VerificationReport,
};
