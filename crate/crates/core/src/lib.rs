//! Design and simulation toolkit for a cam-driven spiral scanner.
//!
//! A cam travelling along a screw pushes on the curved face of a pivoting
//! cone. Shaping that face as a quadratic makes the probe tip at the end of
//! the cone trace an Archimedean spiral as the cam turns. The crate covers
//! the contact geometry, fitting the face profile, forward simulation of
//! the tip, scan and motor planning, and scan quality metrics.

pub mod error;
pub mod geometry;
pub mod io;
pub mod kinematics;
pub mod metrics;
pub mod planning;
pub mod profile;
pub mod report;
pub mod roots;
pub mod trajectory;

pub use error::{Error, ErrorKind, Result};
pub use geometry::{
    contact_from_deflection, radial_margin, radial_margin_in_tube, target_deflection, tip_pose,
    ContactGeometry, DesignParams, RequirementSpec, TipPose, TUBE_INNER_RADIUS,
};
pub use kinematics::{
    simulate_scan, solve_deflection, tip_position, CamProgram, CamSetpoint, CamState,
};
pub use metrics::{
    apply_drag_surrogate, match_ratio, mismatch, mismatch_c, mismatch_d, resample,
    DragSurrogateParams, MatchRatioReport, MismatchReport,
};
pub use planning::{
    constant_speed_cam_program, coverage_report, plan_raster, plan_spiral, CoverageReport,
    ScanPlan,
};
pub use profile::{
    fit_profile, generate_fit_samples, linearity_report, validate_design, ConicProfile,
    FitSampleSet, LinearityReport,
};
pub use report::{ConstraintCheck, ConstraintReport};
pub use trajectory::{rescale_trajectory, Sample, Trajectory};
