//! Planar model of the vision obstruction caused by a vehicle's driver-side
//! B-pillar.
//!
//! The closed-form engine lives in [`scene`], [`mirror`], [`obstruction`] and
//! [`headmotion`]. [`oracle`] re-derives every quantity by brute-force ray
//! casting, reflection tracing and bisection; [`analysis`] runs the parameter
//! sweeps and reproduction reports that the `pillar-sight` binary exposes.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod headmotion;
pub mod mirror;
pub mod obstruction;
pub mod oracle;
pub mod report;
pub mod scene;
pub mod svg;

pub use error::{GeometryError, Result};
pub use headmotion::{first_crossing, required_shift, required_shift_bse, ShiftResult};
pub use mirror::{kappa, mirror_sightline, tau0, MirrorSightLine};
pub use obstruction::{
    binocular_alpha, binocular_alpha_at, classify_eyes, monocular_lambda, monocular_lambda_bse,
    EyePositionCase, ObstructionResult,
};
pub use scene::{
    deflect, intersect_lines, pupil_offset, reflect_direction, Angle, BseConfig, DriverModel,
    FieldOfView, Point2, SightLine, VehicleGeometry,
};
